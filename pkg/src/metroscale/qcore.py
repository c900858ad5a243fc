"""Dense complex linear algebra for small probe registers.

States are 1-D complex numpy arrays and operators are square 2-D complex
arrays. Multi-probe registers use big-endian site ordering: site 0 is the
most significant factor of the Kronecker product, so a register of ``n``
probes of local dimension ``d`` reshapes to ``(d,) * n`` with axis ``k``
belonging to probe ``k``.

Randomness: every stochastic routine takes an explicit integer seed and
draws from PCG64 streams keyed by ``numpy.random.SeedSequence``. A child
stream ``(seed, k1, k2, ...)`` is ``SeedSequence(entropy=seed,
spawn_key=(k1, k2, ...))``; it depends only on its own key, never on how
many sibling streams were consumed, which makes partitioned Monte Carlo
order-independent.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import (
    DimensionMismatch,
    DimensionTooLarge,
    NonHermitian,
    NonUnitary,
    NumericalFailure,
)

MAX_REGISTER_DIM = 2**20
HERMITIAN_ATOL = 1e-10
UNITARY_ATOL = 1e-8
NORM_ATOL = 1e-10


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    """PCG64 generator for the child stream ``(seed, *keys)``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(seed: int, *keys: int) -> int:
    """Deterministic 63-bit seed mixed from a root seed and integer keys."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


def _as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    return m


def as_state(psi, atol: float = NORM_ATOL) -> np.ndarray:
    """Validate a state vector and return it as a complex array."""
    v = np.asarray(psi, dtype=complex)
    if v.ndim != 1 or v.size < 1:
        raise DimensionMismatch(f"expected a 1-D state vector, got shape {v.shape}")
    norm2 = float(np.vdot(v, v).real)
    if abs(norm2 - 1.0) > atol:
        raise ValueError(f"state is not normalized: |psi|^2 = {norm2!r}")
    return v


def normalize(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("cannot normalize the zero vector")
    return v / n


def basis_state(dim: int, index: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def is_hermitian(h, atol: float = HERMITIAN_ATOL) -> bool:
    m = _as_matrix(h)
    return bool(np.max(np.abs(m - m.conj().T)) <= atol)


def is_unitary(u, atol: float = UNITARY_ATOL) -> bool:
    m = _as_matrix(u)
    return bool(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) <= atol)


@dataclass(frozen=True)
class EigenSystem:
    """Ascending real eigenvalues and orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def eigensystem(h, atol: float = HERMITIAN_ATOL) -> EigenSystem:
    m = _as_matrix(h)
    if np.max(np.abs(m - m.conj().T)) > atol:
        raise NonHermitian("matrix is not Hermitian within tolerance")
    # symmetrize so eigh sees exactly the Hermitian part
    m = 0.5 * (m + m.conj().T)
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigendecomposition failed: {exc}") from exc
    if not (np.all(np.isfinite(w)) and np.all(np.isfinite(v))):
        raise NumericalFailure("eigendecomposition produced non-finite values")
    w.setflags(write=False)
    v.setflags(write=False)
    return EigenSystem(w, v)


def phase_unitary(h, phi: float) -> np.ndarray:
    """``exp(-i phi H)`` through the spectral decomposition of ``H``.

    ``h`` may be a Hermitian matrix or an already computed ``EigenSystem``.
    """
    es = h if isinstance(h, EigenSystem) else eigensystem(h)
    v = es.eigenvectors
    return (v * np.exp(-1j * phi * es.eigenvalues)) @ v.conj().T


def apply(u, psi, atol: float = UNITARY_ATOL) -> np.ndarray:
    m = _as_matrix(u)
    v = as_state(psi)
    if m.shape[1] != v.shape[0]:
        raise DimensionMismatch(f"operator dim {m.shape[1]} vs state dim {v.shape[0]}")
    if not is_unitary(m, atol):
        raise NonUnitary("operator is not unitary within tolerance")
    return m @ v


def tensor(a, b) -> np.ndarray:
    """Kronecker product of two states or two square operators."""
    x = np.asarray(a, dtype=complex)
    y = np.asarray(b, dtype=complex)
    if x.ndim != y.ndim or x.ndim not in (1, 2):
        raise DimensionMismatch("tensor operands must both be states or both be matrices")
    if x.ndim == 2:
        _as_matrix(x)
        _as_matrix(y)
    return np.kron(x, y)


def tensor_power(a, n: int) -> np.ndarray:
    return reduce(tensor, [a] * n)


def check_register(local_dim: int, n_sites: int) -> int:
    """Register dimension ``local_dim**n_sites``; raises past the statevector cap."""
    if n_sites < 1 or local_dim < 1:
        raise ValueError("register needs at least one site of dimension >= 1")
    if n_sites * np.log2(local_dim) > np.log2(MAX_REGISTER_DIM) + 1e-12:
        raise DimensionTooLarge(
            f"{local_dim}^{n_sites} exceeds the statevector cap {MAX_REGISTER_DIM}"
        )
    return local_dim**n_sites


def _sites(psi: np.ndarray, local_dim: int, n_sites: int) -> np.ndarray:
    if psi.shape != (local_dim**n_sites,):
        raise DimensionMismatch(
            f"state of dim {psi.shape} does not hold {n_sites} sites of dim {local_dim}"
        )
    return psi.reshape((local_dim,) * n_sites)


def apply_local(op, psi, site: int, n_sites: int) -> np.ndarray:
    """Apply a single-site operator to ``site`` of an ``n_sites`` register."""
    m = _as_matrix(op)
    d = m.shape[0]
    t = _sites(np.asarray(psi, dtype=complex), d, n_sites)
    out = np.tensordot(m, t, axes=([1], [site]))
    return np.moveaxis(out, 0, site).reshape(-1)


def apply_sum_local(op, psi, n_sites: int) -> np.ndarray:
    """``(sum_j op_j) psi`` without building the collective operator."""
    m = _as_matrix(op)
    d = m.shape[0]
    t = _sites(np.asarray(psi, dtype=complex), d, n_sites)
    out = np.zeros_like(t)
    for site in range(n_sites):
        out += np.moveaxis(np.tensordot(m, t, axes=([1], [site])), 0, site)
    return out.reshape(-1)


def sample_from_cdf(cdf: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Inverse-CDF sampling: index ``k`` such that ``cdf[k-1] <= u < cdf[k]``.

    Monotone in the probabilities for fixed uniforms, which is what makes
    common-random-number comparisons between nearby distributions work.
    """
    idx = np.searchsorted(cdf, u, side="right")
    return np.minimum(idx, cdf.shape[0] - 1)


def cdf_of(probs: np.ndarray) -> np.ndarray:
    p = np.clip(np.asarray(probs, dtype=float), 0.0, None)
    cdf = np.cumsum(p)
    cdf /= cdf[-1]
    cdf[-1] = 1.0
    return cdf


def projective_probabilities(psi, basis) -> np.ndarray:
    """``|<b_k|psi>|^2`` for the columns ``b_k`` of ``basis`` (matrix or EigenSystem)."""
    v = as_state(psi)
    b = basis.eigenvectors if isinstance(basis, EigenSystem) else _as_matrix(basis)
    if b.shape[0] != v.shape[0]:
        raise DimensionMismatch(f"basis dim {b.shape[0]} vs state dim {v.shape[0]}")
    return np.abs(b.conj().T @ v) ** 2


def measure_projective(psi, basis, shots: int, seed: int) -> np.ndarray:
    """Outcome counts per basis index after ``shots`` projective measurements."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    p = projective_probabilities(psi, basis)
    idx = sample_from_cdf(cdf_of(p), make_rng(seed).random(shots))
    return np.bincount(idx, minlength=p.shape[0])


def local_probabilities(psi, local_basis, n_sites: int) -> np.ndarray:
    """Joint outcome probabilities, shape ``(d,) * n_sites``, for measuring every
    site in the same local basis (columns of ``local_basis``)."""
    b = local_basis.eigenvectors if isinstance(local_basis, EigenSystem) else _as_matrix(local_basis)
    d = b.shape[0]
    t = _sites(as_state(psi), d, n_sites)
    bd = b.conj().T
    for site in range(n_sites):
        t = np.moveaxis(np.tensordot(bd, t, axes=([1], [site])), 0, site)
    return np.abs(t) ** 2


def measure_local(psi, local_basis, n_sites: int, shots: int, seed: int) -> np.ndarray:
    """Counts over joint local outcomes, shape ``(d,) * n_sites``."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    p = local_probabilities(psi, local_basis, n_sites)
    idx = sample_from_cdf(cdf_of(p.ravel()), make_rng(seed).random(shots))
    return np.bincount(idx, minlength=p.size).reshape(p.shape)

"""Generator analysis: extremal eigenvectors, optimal probe states, the
collective-generator spread, and generators of sequential circuits."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import unitary_group

from . import qcore
from .errors import (
    ConfigError,
    DimensionMismatch,
    NonUnitaryInterleave,
    NumericalFailure,
    ZeroGap,
)

GAP_ATOL = 1e-12
DEGENERACY_ATOL = 1e-10
FD_STEP = 1e-5
FD_ATOL = 1e-4
SPECTRUM_SLACK = 1e-6


@dataclass(frozen=True)
class Generator:
    """Hermitian generator ``H`` of ``U_phi = exp(-i phi H)`` with its extremes.

    For a degenerate extreme eigenvalue the lowest-index eigenvector of the
    ascending spectrum is used.
    """

    matrix: np.ndarray
    eigen: qcore.EigenSystem
    lambda_max: float
    lambda_min: float
    index_max: int
    index_min: int

    @classmethod
    def from_matrix(cls, h) -> "Generator":
        es = qcore.eigensystem(h)
        w = es.eigenvalues
        m = np.array(h, dtype=complex)
        m.setflags(write=False)
        i_max = int(np.flatnonzero(w >= w[-1] - DEGENERACY_ATOL)[0])
        return cls(m, es, float(w[-1]), float(w[0]), i_max, 0)

    @property
    def dim(self) -> int:
        return self.eigen.dim

    @property
    def gap(self) -> float:
        return self.lambda_max - self.lambda_min

    @property
    def vec_max(self) -> np.ndarray:
        return self.eigen.eigenvectors[:, self.index_max]

    @property
    def vec_min(self) -> np.ndarray:
        return self.eigen.eigenvectors[:, self.index_min]

    def require_gap(self) -> None:
        if self.gap <= GAP_ATOL:
            raise ZeroGap("generator has no spectral gap; the phase is unobservable")


PRESETS = {
    "qubit-z": np.diag([-0.5, 0.5]),
    "qutrit": np.diag([0.0, 1.0, 2.0]),
}


def preset(name: str) -> Generator:
    try:
        return Generator.from_matrix(PRESETS[name])
    except KeyError:
        raise ConfigError(f"unknown generator preset {name!r}; choose from {sorted(PRESETS)}") from None


def flip_operator(g: Generator) -> np.ndarray:
    """``|l_min><l_max| + |l_max><l_min|``, the local observable of the GHZ readout."""
    a, b = g.vec_min, g.vec_max
    return np.outer(a, b.conj()) + np.outer(b, a.conj())


def extremal_superposition(g: Generator) -> np.ndarray:
    g.require_gap()
    return (g.vec_max + g.vec_min) / np.sqrt(2.0)


def ghz_state(g: Generator, n: int) -> np.ndarray:
    """``(|l_min>^n + |l_max>^n)/sqrt(2)`` on ``n`` probes."""
    g.require_gap()
    qcore.check_register(g.dim, n)
    return (qcore.tensor_power(g.vec_min, n) + qcore.tensor_power(g.vec_max, n)) / np.sqrt(2.0)


def delta_h(psi, g: Generator, n: int) -> float:
    """Standard deviation of ``h = sum_j H_j`` on an ``n``-probe pure state.

    ``<h^2>`` is the squared norm of ``h|psi>``, so the ``d^n x d^n`` operator
    is never formed.
    """
    v = np.asarray(psi, dtype=complex)
    if v.shape != (g.dim**n,):
        raise DimensionMismatch(f"state dim {v.shape} is not {g.dim}^{n}")
    hv = qcore.apply_sum_local(g.matrix, v, n)
    mean = np.vdot(v, hv).real
    second = np.vdot(hv, hv).real
    return float(np.sqrt(max(second - mean * mean, 0.0)))


def product_delta_h(single, g: Generator, n: int) -> float:
    """Spread of ``h`` on ``single^{⊗n}``; variances add over product factors."""
    return float(np.sqrt(n) * delta_h(single, g, 1))


def ghz_delta_h(g: Generator, n: int) -> float:
    """Spread of ``h`` on the GHZ state, evaluated on its two-branch support."""
    # h is diagonal on |l_min>^n, |l_max>^n with eigenvalues n*l_min, n*l_max
    vals = np.array([n * g.lambda_min, n * g.lambda_max])
    return float(np.sqrt(np.mean(vals**2) - np.mean(vals) ** 2))


@dataclass(frozen=True)
class SequentialCircuit:
    """``W = V_N U V_{N-1} ... V_1 U V_0`` on probe ⊗ ancilla (probe first)."""

    generator: Generator
    interleaved: tuple = field(default_factory=tuple)
    ancilla_dim: int = 1

    def __post_init__(self):
        vs = tuple(np.array(v, dtype=complex) for v in self.interleaved)
        if len(vs) < 2:
            raise DimensionMismatch("a sequential circuit needs N+1 >= 2 interleaved unitaries")
        dim = self.dim
        for j, v in enumerate(vs):
            if v.shape != (dim, dim):
                raise DimensionMismatch(f"V_{j} has shape {v.shape}, expected {(dim, dim)}")
            if not qcore.is_unitary(v):
                raise NonUnitaryInterleave(f"V_{j} is not unitary")
            v.setflags(write=False)
        object.__setattr__(self, "interleaved", vs)

    @property
    def n(self) -> int:
        return len(self.interleaved) - 1

    @property
    def dim(self) -> int:
        return self.generator.dim * self.ancilla_dim

    def embed(self, op) -> np.ndarray:
        return np.kron(op, np.eye(self.ancilla_dim))


def identity_circuit(g: Generator, n: int, ancilla_dim: int = 1) -> SequentialCircuit:
    eye = np.eye(g.dim * ancilla_dim)
    return SequentialCircuit(g, tuple(eye for _ in range(n + 1)), ancilla_dim)


def random_circuit(g: Generator, n: int, ancilla_dim: int, seed: int) -> SequentialCircuit:
    """Circuit with Haar-random interleaved unitaries."""
    rng = qcore.make_rng(seed)
    dim = g.dim * ancilla_dim
    vs = tuple(unitary_group.rvs(dim, random_state=rng) for _ in range(n + 1))
    return SequentialCircuit(g, vs, ancilla_dim)


def circuit_unitary(c: SequentialCircuit, phi: float) -> np.ndarray:
    u = c.embed(qcore.phase_unitary(c.generator.eigen, phi))
    w = c.interleaved[0]
    for v in c.interleaved[1:]:
        w = v @ u @ w
    return w


def conjugated_terms(c: SequentialCircuit, phi: float) -> list[np.ndarray]:
    """The terms ``A_k H A_k^†`` of the circuit generator, ``k = 1..N``.

    ``A_k = V_N U V_{N-1} ... U V_k`` is everything to the left of the k-th
    use of ``U``; differentiating that use gives ``-i A_k H A_k^† W``.
    Returned in order ``k = 1..N``.
    """
    u = c.embed(qcore.phase_unitary(c.generator.eigen, phi))
    h = c.embed(c.generator.matrix)
    vs = c.interleaved
    terms = []
    left = vs[-1]
    for k in range(c.n, 0, -1):
        terms.append(left @ h @ left.conj().T)
        left = left @ u @ vs[k - 1]
    return terms[::-1]


def finite_difference_generator(c: SequentialCircuit, phi: float, step: float | None = None) -> np.ndarray:
    """``i (dW/dphi) W^†`` by central differences.

    The default step is ``FD_STEP`` shrunk by the total phase rate
    ``N max|lambda|`` so the truncation error stays small for long circuits.
    """
    if step is None:
        g = c.generator
        step = FD_STEP / max(1.0, c.n * max(abs(g.lambda_max), abs(g.lambda_min)))
    dw = (circuit_unitary(c, phi + step) - circuit_unitary(c, phi - step)) / (2 * step)
    return 1j * dw @ circuit_unitary(c, phi).conj().T


def sequential_generator(c: SequentialCircuit, phi: float, verify: bool = True) -> np.ndarray:
    h = sum(conjugated_terms(c, phi))
    if np.max(np.abs(h - h.conj().T)) > 1e-8:
        raise NumericalFailure("sequential generator is not Hermitian")
    h = 0.5 * (h + h.conj().T)
    if verify:
        err = np.max(np.abs(h - finite_difference_generator(c, phi)))
        if err > FD_ATOL:
            raise NumericalFailure(f"generator disagrees with finite differences by {err:.3g}")
    return h


@dataclass(frozen=True)
class SpectrumReport:
    max_eig: float
    min_eig: float
    upper: float
    lower: float
    within_bounds: bool


def spectrum_bound_check(c: SequentialCircuit, phi: float) -> SpectrumReport:
    w = qcore.eigensystem(sequential_generator(c, phi)).eigenvalues
    g = c.generator
    upper, lower = c.n * g.lambda_max, c.n * g.lambda_min
    ok = w[-1] <= upper + SPECTRUM_SLACK and w[0] >= lower - SPECTRUM_SLACK
    return SpectrumReport(float(w[-1]), float(w[0]), upper, lower, bool(ok))

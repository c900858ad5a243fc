"""Runnable phase-estimation experiments.

Each protocol reduces one repetition to a discrete outcome distribution
computed by evolving probe states under a counting ``PhaseChannel``.
Repetitions are then sampled by inverse-CDF from one uniform each, with
uniforms drawn from the stream ``(seed, trial)``. Because the sampler is
monotone in the outcome probabilities, runs at nearby phases with the same
seed share their random numbers, and two simulation paths that produce the
same distribution produce the same outcome stream.

The experiment is repeated ``trials`` times (each trial is a full batch of
``nu`` repetitions producing one phase estimate) so that the RMS error of
the ``nu``-repetition estimator can be measured directly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from functools import reduce

import numpy as np
from scipy.stats import binom

from . import estimation, genspec, qcore
from .errors import ConfigError, DegenerateOperatingPoint, DigitAmbiguous
from .estimation import BoundKind
from .genspec import Generator

AUTO_STATEVECTOR_DIM = 4096
SLOPE_FLOOR = 1e-6
LIKELIHOOD_RATIO_MIN = 10.0
_CHUNK_SAMPLES = 2_000_000


class Protocol(str, enum.Enum):
    RAMSEY_CC = "ramsey-cc"
    GHZ_QC = "ghz-qc"
    SEQUENTIAL = "sequential"
    DIGIT_BY_DIGIT = "digits"

    @classmethod
    def parse(cls, name) -> "Protocol":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower()
        aliases = {
            "ramsey": cls.RAMSEY_CC, "cc": cls.RAMSEY_CC,
            "ghz": cls.GHZ_QC, "qc": cls.GHZ_QC,
            "seq": cls.SEQUENTIAL,
            "digit": cls.DIGIT_BY_DIGIT, "digit-by-digit": cls.DIGIT_BY_DIGIT,
        }
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise ConfigError(f"unknown protocol {name!r}") from None


class OperatingPoint(str, enum.Enum):
    AT_TRUE_VALUE = "at-true-value"
    MAX_SLOPE = "max-slope"


class GhzPath(str, enum.Enum):
    AUTO = "auto"
    STATEVECTOR = "statevector"
    ANALYTIC = "analytic"


class DigitEngine(str, enum.Enum):
    SEQUENTIAL = "sequential"
    GHZ = "ghz"


def _coerce(enum_cls, value, what):
    if isinstance(value, enum_cls):
        return value
    try:
        return enum_cls(str(value).strip().lower())
    except ValueError:
        raise ConfigError(f"invalid {what} {value!r}; choose from {[e.value for e in enum_cls]}") from None


@dataclass(frozen=True)
class StrategyConfig:
    """One experiment: ``nu`` repetitions, each using ``U_phi`` ``n`` times.

    ``trials`` independent batches are simulated to score the estimator.
    ``digit_base`` and ``digit_count`` apply to the digit-by-digit protocol
    only, which ignores ``n``.
    """

    protocol: Protocol
    generator: Generator
    n: int = 1
    nu: int = 1
    phi_true: float = 0.0
    seed: int = 0
    policy: OperatingPoint = OperatingPoint.MAX_SLOPE
    trials: int = 1000
    digit_base: int = 2
    digit_count: int = 1
    ghz_path: GhzPath = GhzPath.AUTO
    digit_engine: DigitEngine = DigitEngine.SEQUENTIAL
    keep_outcomes: bool = False

    def __post_init__(self):
        object.__setattr__(self, "protocol", Protocol.parse(self.protocol))
        object.__setattr__(self, "policy", _coerce(OperatingPoint, self.policy, "operating point policy"))
        object.__setattr__(self, "ghz_path", _coerce(GhzPath, self.ghz_path, "GHZ path"))
        object.__setattr__(self, "digit_engine", _coerce(DigitEngine, self.digit_engine, "digit engine"))
        for name in ("n", "nu", "trials", "digit_count"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.digit_base < 2:
            raise ConfigError("digit_base must be >= 2")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if not math.isfinite(self.phi_true):
            raise ConfigError("phi_true must be finite")


class PhaseChannel:
    """The unknown-phase unitary, counting every use.

    ``times`` is the number of physical uses one call stands for: an
    evolution computed once and shared by ``nu`` identical repetitions
    counts ``nu`` uses.
    """

    def __init__(self, generator: Generator, phi: float):
        self.generator = generator
        self.phi = phi
        self.unitary = qcore.phase_unitary(generator.eigen, phi)
        self.uses = 0

    def apply(self, psi, site: int = 0, n_sites: int = 1, times: int = 1) -> np.ndarray:
        self.uses += times
        if n_sites == 1:
            return self.unitary @ psi
        return qcore.apply_local(self.unitary, psi, site, n_sites)

    def branch_phases(self, times: int = 1) -> tuple[complex, complex]:
        """One use on a single probe of each GHZ branch: the diagonal elements
        of ``U`` on ``|l_min>`` and ``|l_max>``."""
        self.uses += times
        g, u = self.generator, self.unitary
        return complex(np.vdot(g.vec_min, u @ g.vec_min)), complex(np.vdot(g.vec_max, u @ g.vec_max))


def offset_unitary(g: Generator, theta: float) -> np.ndarray:
    """Known reference phase ``theta`` imprinted on the ``|l_max>`` component."""
    v = g.vec_max
    return np.eye(g.dim, dtype=complex) + (np.exp(-1j * theta) - 1) * np.outer(v, v.conj())


@dataclass(frozen=True)
class Fringe:
    """Signal ``<x> = cos(scale*phi + offset)`` inverted on one monotonic branch
    ``[branch_start, branch_start + pi]``."""

    scale: float
    offset: float
    branch_start: float

    def phase(self, phi):
        return self.scale * np.asarray(phi) + self.offset

    def invert(self, x) -> np.ndarray:
        a = np.arccos(np.clip(x, -1.0, 1.0))
        k = int(round(self.branch_start / math.pi))
        inner = a if k % 2 == 0 else math.pi - a
        return (self.branch_start + inner - self.offset) / self.scale


def fringe_for(g: Generator, n_eff: int, phi_true: float, policy: OperatingPoint) -> Fringe:
    scale = n_eff * g.gap
    phase = scale * phi_true
    offset = (math.pi / 2 - phase) % (2 * math.pi) if policy == OperatingPoint.MAX_SLOPE else 0.0
    total = phase + offset
    # dP/dphi for P = (1 + cos total)/2
    if abs(math.sin(total)) * scale / 2 < SLOPE_FLOOR:
        raise DegenerateOperatingPoint(
            f"fringe slope vanishes at total phase {total:.6g}; use the max-slope policy"
        )
    return Fringe(scale, offset, math.floor(total / math.pi) * math.pi)


@dataclass(frozen=True)
class Readout:
    """Per-repetition outcome distribution.

    ``values`` are the signal contributions whose repetition mean estimates
    ``cos(phase)``; ``labels`` are the raw outcomes recorded in streams.
    """

    values: np.ndarray
    labels: np.ndarray
    cdf: np.ndarray
    p_plus: float


def _two_outcome(p_plus: float) -> Readout:
    p = min(max(p_plus, 0.0), 1.0)
    return Readout(np.array([1.0, -1.0]), np.array([1, -1]), np.array([p, 1.0]), p)


def ramsey_readout(g: Generator, n: int, offset: float, channel: PhaseChannel, reps: int) -> Readout:
    """``n`` independent probes in the extremal superposition; outcome is the
    number ``k`` that project back onto the input state."""
    psi0 = genspec.extremal_superposition(g)
    out = offset_unitary(g, offset) @ channel.apply(psi0, times=n * reps)
    p = float(np.abs(np.vdot(psi0, out)) ** 2)
    k = np.arange(n, -1, -1)
    return Readout(2.0 * k / n - 1.0, k, qcore.cdf_of(binom.pmf(k, n, p)), p)


def sequential_readout(g: Generator, n: int, offset: float, channel: PhaseChannel, reps: int) -> Readout:
    """One probe passed ``n`` times through the channel; +1 if it is found unchanged."""
    psi0 = genspec.extremal_superposition(g)
    psi = psi0
    for _ in range(n):
        psi = channel.apply(psi, times=reps)
    psi = offset_unitary(g, offset) @ psi
    return _two_outcome(float(np.abs(np.vdot(psi0, psi)) ** 2))


def ghz_statevector_readout(g: Generator, n: int, offset: float, channel: PhaseChannel, reps: int) -> Readout:
    """Full register simulation; every probe is measured in the eigenbasis of the
    flip observable and the outcome is the product of the local eigenvalues.

    Joint outcomes are ordered +1 first, so the product is +1 exactly when
    the uniform falls below ``P(+1)``.
    """
    psi = genspec.ghz_state(g, n)
    for site in range(n):
        psi = channel.apply(psi, site, n, times=reps)
    psi = qcore.apply_local(offset_unitary(g, offset), psi, 0, n)
    basis = qcore.eigensystem(genspec.flip_operator(g))
    probs = qcore.local_probabilities(psi, basis, n).ravel()
    site_vals = np.rint(basis.eigenvalues)
    vals = reduce(np.multiply.outer, [site_vals] * n).ravel()
    order = np.argsort(-vals, kind="stable")
    p_plus = float(probs[vals > 0.5].sum())
    return Readout(vals[order], vals[order].astype(int), qcore.cdf_of(probs[order]), p_plus)


def ghz_analytic_readout(g: Generator, n: int, offset: float, channel: PhaseChannel, reps: int) -> Readout:
    """Two-branch representation of the GHZ register: only the amplitudes of
    ``|l_min>^n`` and ``|l_max>^n`` are tracked."""
    a_min = a_max = 1 / math.sqrt(2)
    for _ in range(n):
        u_min, u_max = channel.branch_phases(times=reps)
        a_min *= u_min
        a_max *= u_max
    a_max *= np.exp(-1j * offset)
    parity = 2 * (np.conj(a_min) * a_max).real
    return _two_outcome(float((1 + parity) / 2))


def resolve_ghz_path(g: Generator, n: int, path: GhzPath) -> GhzPath:
    if path == GhzPath.AUTO:
        return GhzPath.STATEVECTOR if g.dim**n <= AUTO_STATEVECTOR_DIM else GhzPath.ANALYTIC
    if path == GhzPath.STATEVECTOR:
        qcore.check_register(g.dim, n)
    return path


def _sample(readout: Readout, nu: int, trials: int, seed: int, keep: bool = False):
    """Per-trial signal means and, optionally, the raw outcome stream."""
    means = np.empty(trials)
    streams = np.empty((trials, nu), dtype=np.int16) if keep else None
    chunk = max(1, _CHUNK_SAMPLES // nu)
    for start in range(0, trials, chunk):
        stop = min(start + chunk, trials)
        u = np.stack([qcore.make_rng(seed, t).random(nu) for t in range(start, stop)])
        idx = qcore.sample_from_cdf(readout.cdf, u)
        means[start:stop] = readout.values[idx].mean(axis=1)
        if keep:
            streams[start:stop] = readout.labels[idx]
    return means, streams


@dataclass(frozen=True)
class EstimationResult:
    config: StrategyConfig
    phi_estimates: np.ndarray
    delta_phi_empirical: float
    slope: float
    u_phi_applications: int
    theoretical_bound: float
    bound_kind: BoundKind
    offset: float
    p_plus: float
    clipped_trials: int
    path: str
    outcomes: np.ndarray | None = field(default=None, repr=False)

    @property
    def ratio(self) -> float:
        return self.delta_phi_empirical / self.theoretical_bound

    def summary(self) -> dict:
        c = self.config
        return {
            "protocol": c.protocol.value,
            "N": c.n,
            "nu": c.nu,
            "trials": c.trials,
            "seed": c.seed,
            "phi_true": c.phi_true,
            "policy": c.policy.value,
            "path": self.path,
            "gap": c.generator.gap,
            "offset": self.offset,
            "mean_estimate": float(np.mean(self.phi_estimates)),
            "slope": self.slope,
            "delta_phi": self.delta_phi_empirical,
            "bound": self.theoretical_bound,
            "bound_kind": self.bound_kind.value,
            "ratio": self.ratio,
            "u_phi_applications": self.u_phi_applications,
            "clipped_trials": self.clipped_trials,
        }


def _run_fringe(cfg: StrategyConfig, n_eff: int, build, bound_kind: BoundKind, path: str) -> EstimationResult:
    g = cfg.generator
    g.require_gap()
    fringe = fringe_for(g, n_eff, cfg.phi_true, cfg.policy)

    def runner(phi, nu, seed):
        readout = build(g, cfg.n, fringe.offset, PhaseChannel(g, phi), nu)
        means, _ = _sample(readout, nu, cfg.trials, seed)
        return fringe.invert(means)

    channel = PhaseChannel(g, cfg.phi_true)
    readout = build(g, cfg.n, fringe.offset, channel, cfg.nu)
    means, streams = _sample(readout, cfg.nu, cfg.trials, cfg.seed, cfg.keep_outcomes)
    estimates = fringe.invert(means)
    step = estimation.default_slope_step(n_eff, g.gap)
    slope = estimation.slope_of_mean(runner, cfg.phi_true, step, cfg.nu, cfg.seed)
    dphi = estimation.delta_phi(estimates, cfg.phi_true, slope, origin=cfg.phi_true)
    bound = estimation.BOUNDS[bound_kind](cfg.n, cfg.nu, g.gap)
    return EstimationResult(
        config=cfg,
        phi_estimates=estimates,
        delta_phi_empirical=dphi,
        slope=slope,
        u_phi_applications=channel.uses,
        theoretical_bound=bound,
        bound_kind=bound_kind,
        offset=fringe.offset,
        p_plus=readout.p_plus,
        clipped_trials=int(np.count_nonzero(np.abs(means) >= 1.0)),
        path=path,
        outcomes=streams,
    )


def _require(cfg: StrategyConfig, protocol: Protocol) -> None:
    if cfg.protocol != protocol:
        raise ConfigError(f"config is for {cfg.protocol.value}, not {protocol.value}")


def run_ramsey_cc(cfg: StrategyConfig) -> EstimationResult:
    _require(cfg, Protocol.RAMSEY_CC)
    return _run_fringe(cfg, 1, ramsey_readout, BoundKind.CC_CQ, "statevector")


def run_ghz_qc(cfg: StrategyConfig) -> EstimationResult:
    _require(cfg, Protocol.GHZ_QC)
    path = resolve_ghz_path(cfg.generator, cfg.n, cfg.ghz_path)
    build = ghz_statevector_readout if path == GhzPath.STATEVECTOR else ghz_analytic_readout
    return _run_fringe(cfg, cfg.n, build, BoundKind.QC_QQ, path.value)


def run_sequential(cfg: StrategyConfig) -> EstimationResult:
    _require(cfg, Protocol.SEQUENTIAL)
    return _run_fringe(cfg, cfg.n, sequential_readout, BoundKind.SEQUENTIAL, "statevector")


def input_delta_h(cfg: StrategyConfig) -> float:
    """Spread of the collective generator on the protocol's input state."""
    g = cfg.generator
    if cfg.protocol == Protocol.RAMSEY_CC:
        return genspec.product_delta_h(genspec.extremal_superposition(g), g, cfg.n)
    if cfg.protocol == Protocol.GHZ_QC:
        return genspec.ghz_delta_h(g, cfg.n)
    if cfg.protocol == Protocol.SEQUENTIAL:
        h = genspec.sequential_generator(genspec.identity_circuit(g, cfg.n), cfg.phi_true)
        psi = genspec.extremal_superposition(g)
        hv = h @ psi
        mean = np.vdot(psi, hv).real
        return float(np.sqrt(max(np.vdot(hv, hv).real - mean**2, 0.0)))
    n_last = cfg.digit_base ** (cfg.digit_count - 1)
    return genspec.ghz_delta_h(g, n_last)


# --- digit-by-digit -------------------------------------------------------


@dataclass(frozen=True)
class DigitReport:
    index: int
    n_uses: int
    probes: int
    u_phi_applications: int
    digit: int
    true_digit: int
    success_rate: float
    min_log10_likelihood_ratio: float


@dataclass(frozen=True)
class DigitResult:
    """Outcome of the digit-by-digit procedure.

    ``fractions`` are the per-trial estimates of ``phi*gap/(2 pi)`` modulo 1.
    ``probes_per_batch`` is the number of ``U_phi`` uses (entangled probes
    for the GHZ engine) one repetition of every digit stage consumes,
    ``sum_{j<l} b^j``; ``probes_through_last_index`` extends that sum to
    ``j = l``, i.e. ``(b^(l+1) - 1)/(b - 1)``.
    """

    estimation: EstimationResult
    digits: tuple
    fractions: np.ndarray
    fraction_true: float
    success_rate: float
    ambiguous_trials: int
    probes_per_batch: int
    probes_through_last_index: int

    @property
    def assembled_digits(self) -> tuple:
        return tuple(d.digit for d in self.digits)


def geometric_total(base: int, last_index: int) -> int:
    """``sum_{j=0}^{last_index} base^j`` in exact integer arithmetic."""
    return sum(base**j for j in range(last_index + 1))


def to_digits(fraction: float, base: int, count: int) -> tuple:
    """Base-``base`` digits of ``fraction`` rounded to ``count`` places (mod 1)."""
    r = int(round(fraction * base**count)) % base**count
    out = []
    for _ in range(count):
        r, d = divmod(r, base)
        out.append(d)
    return tuple(reversed(out))


def _wrap(x):
    return (np.asarray(x) + 0.5) % 1.0 - 0.5


def _stage_loglik(x, counts, n_uses):
    """Log-likelihood of fractions ``x`` under one stage's quadrature counts."""
    phase = 2 * math.pi * n_uses * np.asarray(x)
    eps = 1e-15
    pc = np.clip((1 + np.cos(phase)) / 2, eps, 1 - eps)
    ps = np.clip((1 + np.sin(phase)) / 2, eps, 1 - eps)
    cp, cm, sp, sm = counts
    return cp * np.log(pc) + cm * np.log1p(-pc) + sp * np.log(ps) + sm * np.log1p(-ps)


def run_digit_by_digit(cfg: StrategyConfig) -> DigitResult:
    """Recover the base-``b`` digits of ``phi*gap/(2 pi)`` one stage at a time.

    Stage ``j`` uses ``b^j`` channel uses per repetition (``b^j`` entangled
    probes or ``b^j`` passes of one probe). Its ``nu`` repetitions are split
    between two reference phases, 0 and ``-pi/2``, which read out the cosine
    and sine of ``b^j phi gap``; together they fix ``frac(b^j x)``. Going up
    the stages, each new fractional reading has ``b`` lifts compatible with
    the running estimate, and the lift maximizing the likelihood of all
    earlier stages' counts is kept.
    """
    _require(cfg, Protocol.DIGIT_BY_DIGIT)
    g = cfg.generator
    g.require_gap()
    b, l, nu, trials = cfg.digit_base, cfg.digit_count, cfg.nu, cfg.trials
    if nu < 2:
        raise ConfigError("digit-by-digit needs nu >= 2 to sample both quadratures")
    nu_c = (nu + 1) // 2
    nu_s = nu - nu_c
    x_true = (cfg.phi_true * g.gap / (2 * math.pi)) % 1.0

    stage_counts, thetas, uses = [], [], []
    for j in range(l):
        n_j = b**j
        channel = PhaseChannel(g, cfg.phi_true)
        if cfg.digit_engine == DigitEngine.SEQUENTIAL:
            build = sequential_readout
        else:
            path = resolve_ghz_path(g, n_j, cfg.ghz_path)
            build = ghz_statevector_readout if path == GhzPath.STATEVECTOR else ghz_analytic_readout
        ro_c = build(g, n_j, 0.0, channel, nu_c)
        ro_s = build(g, n_j, -math.pi / 2, channel, nu_s)
        uses.append(channel.uses)
        cp = np.empty(trials)
        sp = np.empty(trials)
        for t in range(trials):
            u = qcore.make_rng(cfg.seed, t, j).random(nu)
            cp[t] = np.count_nonzero(ro_c.values[qcore.sample_from_cdf(ro_c.cdf, u[:nu_c])] > 0)
            sp[t] = np.count_nonzero(ro_s.values[qcore.sample_from_cdf(ro_s.cdf, u[nu_c:])] > 0)
        counts = (cp, nu_c - cp, sp, nu_s - sp)
        stage_counts.append(counts)
        c_mean = 2 * cp / nu_c - 1
        s_mean = 2 * sp / nu_s - 1
        thetas.append((np.arctan2(s_mean, c_mean) / (2 * math.pi)) % 1.0)

    x_hat = thetas[0].copy()
    min_lr = [math.inf] * l
    ambiguous = np.zeros(trials, dtype=bool)
    for j in range(1, l):
        n_j = b**j
        for t in range(trials):
            m0 = int(round(n_j * x_hat[t] - thetas[j][t]))
            lifts = {}
            for k in range(-b, b + 1):
                x = ((m0 + k + thetas[j][t]) / n_j) % 1.0
                lifts.setdefault((m0 + k) % n_j, x)
            xs = np.array(list(lifts.values()))
            dist = np.abs(_wrap(xs - x_hat[t]))
            cands = xs[np.argsort(dist, kind="stable")[:b]]
            ll = sum(
                _stage_loglik(cands, tuple(c[t] for c in stage_counts[i]), b**i) for i in range(j)
            )
            order = np.argsort(-ll, kind="stable")
            log10_lr = (ll[order[0]] - ll[order[1]]) / math.log(10)
            min_lr[j] = min(min_lr[j], float(log10_lr))
            if log10_lr < math.log10(LIKELIHOOD_RATIO_MIN):
                ambiguous[t] = True
            x_hat[t] = cands[order[0]]

    if ambiguous.any() and trials == 1:
        raise DigitAmbiguous("likelihood ratio between the two best lifts is below 10")

    err = _wrap(x_hat - x_true)
    ok = (np.abs(err) <= 0.5 * float(b) ** (-l)) & ~ambiguous
    est_digits = [to_digits(x, b, l) for x in x_hat]
    true_digits = to_digits(x_true, b, l)
    reports = []
    for j in range(l):
        rate = float(np.mean([d[j] == true_digits[j] for d in est_digits]))
        reports.append(
            DigitReport(
                index=j,
                n_uses=b**j,
                probes=b**j if cfg.digit_engine == DigitEngine.GHZ else 1,
                u_phi_applications=uses[j],
                digit=est_digits[0][j],
                true_digit=true_digits[j],
                success_rate=rate,
                min_log10_likelihood_ratio=min_lr[j],
            )
        )

    to_phi = 2 * math.pi / g.gap
    phi_est = cfg.phi_true + err * to_phi
    if trials >= 2:
        dphi = estimation.delta_phi(phi_est, cfg.phi_true, 1.0, origin=cfg.phi_true)
    else:
        dphi = float(abs(err[0]) * to_phi)
    kind = BoundKind.SEQUENTIAL if cfg.digit_engine == DigitEngine.SEQUENTIAL else BoundKind.QC_QQ
    est = EstimationResult(
        config=cfg,
        phi_estimates=phi_est,
        delta_phi_empirical=dphi,
        slope=1.0,
        u_phi_applications=int(sum(uses)),
        theoretical_bound=estimation.BOUNDS[kind](b ** (l - 1), nu, g.gap),
        bound_kind=kind,
        offset=0.0,
        p_plus=float("nan"),
        clipped_trials=0,
        path=cfg.digit_engine.value,
    )
    return DigitResult(
        estimation=est,
        digits=tuple(reports),
        fractions=x_hat,
        fraction_true=x_true,
        success_rate=float(np.mean(ok)),
        ambiguous_trials=int(ambiguous.sum()),
        probes_per_batch=geometric_total(b, l - 1),
        probes_through_last_index=geometric_total(b, l),
    )


RUNNERS = {
    Protocol.RAMSEY_CC: run_ramsey_cc,
    Protocol.GHZ_QC: run_ghz_qc,
    Protocol.SEQUENTIAL: run_sequential,
}


def run(cfg: StrategyConfig):
    """Dispatch on ``cfg.protocol``; digit-by-digit returns a ``DigitResult``."""
    if cfg.protocol == Protocol.DIGIT_BY_DIGIT:
        return run_digit_by_digit(cfg)
    return RUNNERS[cfg.protocol](cfg)


def quadrature_phase(g: Generator, protocol: Protocol, n: int) -> float:
    """A true phase that already sits at quadrature, so max-slope needs no offset."""
    n_eff = 1 if protocol == Protocol.RAMSEY_CC else n
    return math.pi / (2 * n_eff * g.gap)


def with_overrides(cfg: StrategyConfig, **kw) -> StrategyConfig:
    return replace(cfg, **kw)

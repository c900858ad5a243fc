"""Error functional, error propagation, closed-form precision bounds and
the pure-state quantum Fisher information.

All errors are reported as root-mean-square quantities so that they share
units with the bounds.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import genspec
from .errors import InsufficientSamples, ZeroDerivative, ZeroSlope

SLOPE_ATOL = 1e-9
DERIVATIVE_ATOL = 1e-12
UNCERTAINTY_SLACK = 0.1
# the fringe-inversion estimator is only required to land within this factor
# of saturating the uncertainty relation
SATURATION_ENVELOPE = 2.0


class BoundKind(str, enum.Enum):
    CC_CQ = "cc-cq"
    QC_QQ = "qc-qq"
    SEQUENTIAL = "sequential"
    CRAMER_RAO = "cramer-rao"


@dataclass(frozen=True)
class ErrorEvaluation:
    delta_phi: float
    mean_estimate: float
    slope_d_mean_d_phi: float
    nu: int
    bound: float
    bound_kind: BoundKind

    @property
    def ratio(self) -> float:
        return self.delta_phi / self.bound


def delta_phi(samples, phi_true: float, slope: float, origin: float = 0.0) -> float:
    """RMS of ``est/|slope| - phi_true`` over the estimator samples.

    ``origin`` shifts both the estimates and the true value before the
    rescaling, so a locally calibrated estimator can be scored about its
    operating point instead of about zero. With ``origin=0`` this is the
    plain definition.
    """
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise InsufficientSamples("need at least two estimator samples")
    if not abs(slope) > SLOPE_ATOL:
        raise ZeroSlope(f"|d<phi_est>/dphi| = {abs(slope):.3g} is too small to rescale")
    dev = (x - origin) / abs(slope) - (phi_true - origin)
    return float(np.sqrt(np.mean(dev * dev)))


def default_slope_step(n: int, gap: float) -> float:
    """Finite-difference step: 1e-3 of the fringe period ``2 pi / (n gap)``."""
    return 1e-3 * 2 * math.pi / (n * gap)


def slope_of_mean(
    runner: Callable[[float, int, int], np.ndarray],
    phi: float,
    step: float,
    nu_probe: int,
    seed: int,
) -> float:
    """Central difference of the mean estimate, same seed on both sides.

    ``runner(phi, nu, seed)`` returns estimator samples; reusing the seed
    gives common random numbers, so most of the sampling noise cancels in
    the difference.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    hi = np.mean(runner(phi + step, nu_probe, seed))
    lo = np.mean(runner(phi - step, nu_probe, seed))
    return float((hi - lo) / (2 * step))


def error_propagation(expectation: float, variance: float, d_expectation_d_phi: float, nu: int) -> float:
    """``sqrt(variance) / (sqrt(nu) |d<X>/dphi|)``.

    ``expectation`` is accepted for symmetry with the signal model but does
    not enter the result. At fringe nodes the derivative vanishes and this
    raises instead of taking the analytic limit.
    """
    if variance < 0:
        raise ValueError("variance must be non-negative")
    if nu < 1:
        raise ValueError("nu must be >= 1")
    if not abs(d_expectation_d_phi) > DERIVATIVE_ATOL:
        raise ZeroDerivative("signal derivative vanishes at this phase")
    return math.sqrt(variance) / (math.sqrt(nu) * abs(d_expectation_d_phi))


def bound_cc(n: int, nu: int, gap: float) -> float:
    """Best error with separable probes: ``1/(sqrt(nu n) gap)``."""
    return 1.0 / (math.sqrt(nu * n) * gap)


def bound_qc(n: int, nu: int, gap: float) -> float:
    """Best error with entangled probes: ``1/(sqrt(nu) n gap)``."""
    return bound_cc(n, nu, gap) / math.sqrt(n)


def bound_sequential(n: int, nu: int, gap: float) -> float:
    return bound_qc(n, nu, gap)


BOUNDS = {
    BoundKind.CC_CQ: bound_cc,
    BoundKind.QC_QQ: bound_qc,
    BoundKind.SEQUENTIAL: bound_sequential,
}


@dataclass(frozen=True)
class UncertaintyReport:
    lhs: float
    rhs: float
    slack: float
    satisfied_with_slack: bool

    @property
    def saturation(self) -> float:
        """``lhs / rhs``; 1 means the relation is saturated."""
        return self.lhs / self.rhs


def uncertainty_relation_check(delta_phi: float, delta_h: float, nu: int, slack: float = UNCERTAINTY_SLACK) -> UncertaintyReport:
    lhs = delta_phi * delta_h
    rhs = 1.0 / (2 * math.sqrt(nu))
    return UncertaintyReport(lhs, rhs, slack, bool(lhs >= (1 - slack) * rhs))


def qfi_pure(psi, g: genspec.Generator, n: int) -> float:
    """Quantum Fisher information of a pure state under ``exp(-i phi h)``."""
    return 4.0 * genspec.delta_h(psi, g, n) ** 2


def cramer_rao_bound(qfi: float, nu: int) -> float:
    return 1.0 / math.sqrt(nu * qfi)

"""Self-contained invariant suite behind ``metroscale check``."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass

import numpy as np

from . import estimation, genspec, harness, protocols, qcore
from .protocols import Protocol


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str
    seconds: float = 0.0


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (a + a.conj().T) / 2


def random_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    return qcore.normalize(rng.normal(size=dim) + 1j * rng.normal(size=dim))


def check_unitary_algebra(seed: int = 11) -> tuple[bool, str]:
    rng = qcore.make_rng(seed)
    worst = {"unitary": 0.0, "inverse": 0.0, "group": 0.0, "norm": 0.0, "recon": 0.0, "ortho": 0.0}
    for dim in (2, 3, 4, 8):
        for _ in range(10):
            h = random_hermitian(dim, rng)
            es = qcore.eigensystem(h)
            worst["recon"] = max(worst["recon"], np.linalg.norm(es.reconstruct() - h) / np.linalg.norm(h))
            v = es.eigenvectors
            worst["ortho"] = max(worst["ortho"], np.max(np.abs(v.conj().T @ v - np.eye(dim))))
            a, b = rng.uniform(-3, 3, size=2)
            ua, ub = qcore.phase_unitary(es, a), qcore.phase_unitary(es, b)
            eye = np.eye(dim)
            worst["unitary"] = max(worst["unitary"], np.max(np.abs(ua.conj().T @ ua - eye)))
            worst["inverse"] = max(worst["inverse"], np.max(np.abs(ua @ qcore.phase_unitary(es, -a) - eye)))
            worst["group"] = max(worst["group"], np.max(np.abs(ua @ ub - qcore.phase_unitary(es, a + b))))
            out = qcore.apply(ua, random_state(dim, rng))
            worst["norm"] = max(worst["norm"], abs(np.linalg.norm(out) - 1))
    ok = (
        worst["unitary"] <= 1e-10 and worst["inverse"] <= 1e-9 and worst["group"] <= 1e-9
        and worst["norm"] <= 1e-10 and worst["recon"] <= 1e-9 and worst["ortho"] <= 1e-10
    )
    return ok, ", ".join(f"{k} {v:.1e}" for k, v in worst.items())


def check_qfi_identity(seed: int = 12, nu: int = 10_000) -> tuple[bool, str]:
    rng = qcore.make_rng(seed)
    worst = 0.0
    for g, n in ((genspec.preset("qubit-z"), 4), (genspec.preset("qutrit"), 3)):
        for _ in range(20):
            psi = random_state(g.dim**n, rng)
            dh = genspec.delta_h(psi, g, n)
            lhs = estimation.cramer_rao_bound(estimation.qfi_pure(psi, g, n), nu)
            rhs = 1 / (2 * math.sqrt(nu) * dh)
            worst = max(worst, abs(lhs - rhs) / rhs)
    return worst <= 1e-12, f"max relative deviation {worst:.1e}"


def check_bound_identity() -> tuple[bool, str]:
    bad = 0
    for n in (1, 2, 3, 7, 10, 64, 1000):
        for nu in (1, 10, 10_000):
            for gap in (0.5, 1.0, 2.0, 3.7):
                qc = estimation.bound_qc(n, nu, gap)
                bad += qc != estimation.bound_cc(n, nu, gap) / math.sqrt(n)
                bad += qc != estimation.bound_sequential(n, nu, gap)
                bad += not math.isclose(qc, 1 / (math.sqrt(nu) * n * gap), rel_tol=1e-12)
    return bad == 0, f"{bad} mismatches over the grid"


def _synthetic_report(seed: int) -> harness.ScalingReport:
    rng = qcore.make_rng(seed)
    cells = []
    for s in (Protocol.RAMSEY_CC, Protocol.GHZ_QC):
        for n in (4, 8, 16):
            cells.append(harness.Cell(s, n, 100, int(rng.integers(2**62)), float(rng.random() / n), float(rng.random() / n)))
    fits = (harness.Fit(Protocol.RAMSEY_CC, -0.5 + rng.normal() * 1e-3, float(rng.normal()), 0.01, 1e-3, 3),)
    config = {"strategies": ["ramsey-cc", "ghz-qc"], "N_values": [4, 8, 16], "nu": 100, "trials": 10,
              "phi_true": None, "policy": "max-slope", "ghz_path": "auto", "seed": seed, "generator": "qubit-z"}
    return harness.ScalingReport(config, tuple(cells), fits)


def check_round_trip(seed: int = 13) -> tuple[bool, str]:
    report = _synthetic_report(seed)
    rows = list(csv.reader(io.StringIO(harness.report_to_csv(report))))
    csv_ok = tuple(rows[0]) == harness.CSV_HEADER and all(
        float(r[3]) == c.delta_phi and float(r[4]) == c.bound and float(r[5]) == c.ratio
        for r, c in zip(rows[1:], report.cells)
    ) and len(rows) - 1 == len(report.cells)
    text = harness.report_to_json(report)
    back = harness.report_from_dict(json.loads(text))
    json_ok = back == report
    schema_note = ""
    try:
        import jsonschema
    except ImportError:
        schema_note = " (jsonschema not installed, schema not validated)"
    else:
        jsonschema.validate(json.loads(text), harness.load_schema())
    return csv_ok and json_ok, f"csv {'ok' if csv_ok else 'MISMATCH'}, json {'ok' if json_ok else 'MISMATCH'}{schema_note}"


def check_spectrum_bounds(count: int = 20, seed: int = 14) -> tuple[bool, str]:
    g = genspec.preset("qubit-z")
    failures, worst_fd = 0, 0.0
    for k in range(count):
        c = genspec.random_circuit(g, 4, 2, qcore.derive_seed(seed, k))
        phi = 0.1 + 0.05 * k
        rep = genspec.spectrum_bound_check(c, phi)
        failures += not rep.within_bounds
        h = genspec.sequential_generator(c, phi, verify=False)
        worst_fd = max(worst_fd, np.max(np.abs(h - genspec.finite_difference_generator(c, phi))))
    return failures == 0 and worst_fd <= 1e-4, f"{failures} out of bounds, max FD deviation {worst_fd:.1e}"


def check_uncertainty(seed: int = 15) -> tuple[bool, str]:
    g = genspec.preset("qubit-z")
    worst = []
    for proto, n in ((Protocol.RAMSEY_CC, 6), (Protocol.GHZ_QC, 6), (Protocol.SEQUENTIAL, 6)):
        cfg = protocols.StrategyConfig(proto, g, n=n, nu=2000, phi_true=0.2, seed=seed, trials=400)
        r = protocols.run(cfg)
        rep = estimation.uncertainty_relation_check(r.delta_phi_empirical, protocols.input_delta_h(cfg), cfg.nu)
        worst.append((proto.value, rep.satisfied_with_slack, rep.saturation))
    ok = all(s and sat <= estimation.SATURATION_ENVELOPE for _, s, sat in worst)
    return ok, ", ".join(f"{p} {sat:.3f}" for p, _, sat in worst)


def check_fast_path(seed: int = 16) -> tuple[bool, str]:
    g = genspec.preset("qubit-z")
    rng = qcore.make_rng(seed)
    worst = 0.0
    for n in range(1, 11):
        phi, offset = rng.uniform(-2, 2, size=2)
        sv = protocols.ghz_statevector_readout(g, n, offset, protocols.PhaseChannel(g, phi), 1)
        an = protocols.ghz_analytic_readout(g, n, offset, protocols.PhaseChannel(g, phi), 1)
        worst = max(worst, abs(sv.p_plus - an.p_plus))
    base = protocols.StrategyConfig(Protocol.GHZ_QC, g, n=6, nu=500, phi_true=0.3, seed=seed, trials=20, keep_outcomes=True)
    a = protocols.run_ghz_qc(protocols.with_overrides(base, ghz_path="statevector"))
    b = protocols.run_ghz_qc(protocols.with_overrides(base, ghz_path="analytic"))
    same = np.array_equal(a.outcomes, b.outcomes)
    return worst <= 1e-12 and same, f"max |dP| {worst:.1e}, streams {'identical' if same else 'DIFFER'}"


CHECKS = (
    ("unitarity / group law / normalization", check_unitary_algebra),
    ("QFI identity 1/sqrt(nu QFI) = 1/(2 sqrt(nu) dh)", check_qfi_identity),
    ("bound identity qc = cc/sqrt(N) = sequential", check_bound_identity),
    ("csv/json round-trip", check_round_trip),
    ("sequential generator spectrum bounds", check_spectrum_bounds),
    ("uncertainty relation with slack", check_uncertainty),
    ("GHZ statevector vs analytic path", check_fast_path),
)


def run_checks() -> list[CheckResult]:
    results = []
    for name, fn in CHECKS:
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(ok), detail, time.perf_counter() - t0))
    return results

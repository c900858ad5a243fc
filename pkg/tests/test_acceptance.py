"""Acceptance criteria at full size. Each test appends one PASS/FAIL line to
the terminal summary."""

import math
import time

import numpy as np
import pytest

from metroscale import checks, estimation, genspec, harness, protocols, qcore
from metroscale.errors import DigitAmbiguous
from metroscale.protocols import Protocol, StrategyConfig

from conftest import ACCEPTANCE_LINES

NU = 10_000
QUBIT = genspec.preset("qubit-z")


def record(number, ok, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
    assert ok, detail


def timed(fn, *args, **kw):
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t0


def quadrature_config(protocol, n, seed=0, **kw):
    protocol = Protocol.parse(protocol)
    return StrategyConfig(protocol, QUBIT, n=n, nu=NU, phi_true=protocols.quadrature_phase(QUBIT, protocol, n),
                          seed=seed, **kw)


@pytest.fixture(scope="module")
def ensemble():
    """Every estimation run by the criteria below, for the uncertainty check."""
    return []


@pytest.fixture(scope="module")
def ghz_runs(ensemble):
    base = quadrature_config("ghz-qc", 8, seed=2, keep_outcomes=True)
    sv, t_sv = timed(protocols.run, protocols.with_overrides(base, ghz_path="statevector"))
    an, t_an = timed(protocols.run, protocols.with_overrides(base, ghz_path="analytic"))
    ensemble += [(sv.config, sv.delta_phi_empirical), (an.config, an.delta_phi_empirical)]
    return sv, an, t_sv + t_an


@pytest.fixture(scope="module")
def sweeps(ensemble):
    default_cfg = harness.make_sweep_config()
    seq_cfg = harness.make_sweep_config(strategies=["sequential"], N_values=[2**k for k in range(2, 11)])
    t0 = time.perf_counter()
    default = harness.run_sweep(default_cfg)
    seq = harness.run_sweep(seq_cfg)
    elapsed = time.perf_counter() - t0
    for cell in default.cells + seq.cells:
        cfg = StrategyConfig(cell.strategy, QUBIT, n=cell.n, nu=cell.nu,
                             phi_true=protocols.quadrature_phase(QUBIT, cell.strategy, cell.n))
        ensemble.append((cfg, cell.delta_phi))
    return default, seq, elapsed


def test_criterion_1_cc_bound(ensemble):
    r, seconds = timed(protocols.run, quadrature_config("ramsey-cc", 10, seed=1))
    ensemble.append((r.config, r.delta_phi_empirical))
    target = 3.162e-3
    err = abs(r.delta_phi_empirical / target - 1)
    record(1, err <= 0.10 and seconds < 10,
           f"Ramsey CC N=10 nu=1e4 delta_phi={r.delta_phi_empirical:.4e} (target {target:.4e}, "
           f"off by {err:.1%}, limit 10%), {seconds:.1f}s (limit 10s)")


def test_criterion_2_qc_bound(ghz_runs):
    sv, an, seconds = ghz_runs
    target = 1.25e-3
    errs = [abs(r.delta_phi_empirical / target - 1) for r in (sv, an)]
    same = np.array_equal(sv.outcomes, an.outcomes)
    record(2, max(errs) <= 0.10 and same and seconds < 30,
           f"GHZ QC N=8 nu=1e4 delta_phi statevector={sv.delta_phi_empirical:.4e} analytic={an.delta_phi_empirical:.4e} "
           f"(target {target:.4e}, worst {max(errs):.1%}), streams {'identical' if same else 'DIFFER'}, "
           f"{seconds:.1f}s (limit 30s)")


def test_criterion_3_sequential_equivalence(ghz_runs, ensemble):
    sv, _, _ = ghz_runs
    seq = protocols.run(quadrature_config("sequential", 8, seed=2))
    indep = protocols.run(quadrature_config("sequential", 8, seed=3))
    ensemble += [(seq.config, seq.delta_phi_empirical), (indep.config, indep.delta_phi_empirical)]
    err = abs(seq.delta_phi_empirical / 1.25e-3 - 1)
    ratio = seq.delta_phi_empirical / sv.delta_phi_empirical
    ratio_indep = indep.delta_phi_empirical / sv.delta_phi_empirical
    ok = err <= 0.10 and 0.85 <= ratio <= 1.18 and 0.85 <= ratio_indep <= 1.18
    record(3, ok,
           f"sequential N=8 delta_phi={seq.delta_phi_empirical:.4e} (off by {err:.1%}); ratio to GHZ "
           f"{ratio:.4f} at equal seed, {ratio_indep:.4f} at independent seed (band [0.85, 1.18])")


def test_criterion_4_scaling_exponents(sweeps):
    default, seq, seconds = sweeps
    cc = default.fit_for("ramsey-cc").exponent
    qc = default.fit_for("ghz-qc").exponent
    sq = seq.fit_for("sequential").exponent
    ok = (abs(cc + 0.5) <= 0.1 and abs(qc + 1.0) <= 0.1 and abs(sq + 1.0) <= 0.05
          and seconds < 300 and not default.partial and not seq.partial)
    record(4, ok,
           f"exponents ramsey-cc {cc:+.4f} (-0.5±0.1), ghz-qc {qc:+.4f} (-1±0.1), "
           f"sequential to N=1024 {sq:+.4f} (-1±0.05), {seconds:.1f}s (limit 300s)")


def test_criterion_5_uncertainty_relation(ensemble, ghz_runs, sweeps):
    assert len(ensemble) == 24
    worst, ghz_worst = math.inf, 0.0
    all_ok = True
    for cfg, dphi in ensemble:
        rep = estimation.uncertainty_relation_check(dphi, protocols.input_delta_h(cfg), cfg.nu)
        all_ok &= rep.satisfied_with_slack
        worst = min(worst, rep.saturation)
        if cfg.protocol == Protocol.GHZ_QC:
            ghz_worst = max(ghz_worst, rep.saturation)
    ok = all_ok and ghz_worst <= estimation.SATURATION_ENVELOPE
    record(5, ok,
           f"{len(ensemble)} experiments, min delta_phi*dh*2*sqrt(nu) = {worst:.4f} (floor 0.9), "
           f"GHZ max {ghz_worst:.4f} (limit 2)")


def test_criterion_6_sequential_spectrum():
    failures, worst_fd = 0, 0.0
    rng = qcore.make_rng(6)
    for k in range(100):
        c = genspec.random_circuit(QUBIT, 4, 2, qcore.derive_seed(6, k))
        phi = float(rng.uniform(-math.pi, math.pi))
        failures += not genspec.spectrum_bound_check(c, phi).within_bounds
        h = genspec.sequential_generator(c, phi, verify=False)
        worst_fd = max(worst_fd, float(np.max(np.abs(h - genspec.finite_difference_generator(c, phi)))))
    record(6, failures == 0 and worst_fd <= 1e-4,
           f"100 random circuits N=4 with qubit ancilla: {failures} outside [N l_min, N l_max], "
           f"max finite-difference deviation {worst_fd:.2e} (limit 1e-4)")


def test_criterion_7_variance_extremality():
    n, gap = 6, QUBIT.gap
    rng = qcore.make_rng(7)
    prod_max, ent_max = 0.0, 0.0
    for _ in range(1000):
        psi = np.ones(1, dtype=complex)
        for _ in range(n):
            psi = qcore.tensor(psi, qcore.normalize(rng.normal(size=2) + 1j * rng.normal(size=2)))
        prod_max = max(prod_max, genspec.delta_h(psi, QUBIT, n))
        ent = qcore.normalize(rng.normal(size=2**n) + 1j * rng.normal(size=2**n))
        ent_max = max(ent_max, genspec.delta_h(ent, QUBIT, n))
    prod_bound, ent_bound = math.sqrt(n) * gap / 2, n * gap / 2
    extremal = genspec.delta_h(qcore.tensor_power(genspec.extremal_superposition(QUBIT), n), QUBIT, n)
    ghz = genspec.delta_h(genspec.ghz_state(QUBIT, n), QUBIT, n)
    ok = (prod_max <= prod_bound + 1e-9 and ent_max <= ent_bound + 1e-9
          and abs(extremal - prod_bound) <= 1e-9 and abs(ghz - ent_bound) <= 1e-9)
    record(7, ok,
           f"N=6: product max {prod_max:.4f} <= {prod_bound:.4f} (extremal product {extremal:.12f}), "
           f"entangled max {ent_max:.4f} <= {ent_bound:.1f} (GHZ {ghz:.12f})")


def test_criterion_8_digit_by_digit():
    b, l = 2, 6
    rng = qcore.make_rng(8)
    hits, ambiguous = 0, 0
    t0 = time.perf_counter()
    for trial in range(100):
        frac = float(rng.random())
        cfg = StrategyConfig(Protocol.DIGIT_BY_DIGIT, QUBIT, nu=400, phi_true=2 * math.pi * frac / QUBIT.gap,
                             seed=trial, trials=1, digit_base=b, digit_count=l, digit_engine="sequential")
        try:
            r = protocols.run(cfg)
        except DigitAmbiguous:
            ambiguous += 1
            continue
        err = abs((r.fractions[0] - r.fraction_true + 0.5) % 1.0 - 0.5)
        hits += err <= 2.0**-(l + 1)
    seconds = time.perf_counter() - t0
    acct = protocols.run(StrategyConfig(Protocol.DIGIT_BY_DIGIT, QUBIT, nu=400, phi_true=1.0, trials=2,
                                        digit_base=b, digit_count=l))
    acct10 = protocols.run(StrategyConfig(Protocol.DIGIT_BY_DIGIT, QUBIT, nu=400, phi_true=1.0, trials=2,
                                          digit_base=10, digit_count=2))
    ok = hits >= 95 and acct.probes_per_batch == 63 and acct10.probes_through_last_index == 111
    record(8, ok,
           f"base 2, 6 digits, nu=400: {hits}/100 within 2^-7 ({ambiguous} ambiguous), "
           f"probes per batch {acct.probes_per_batch} (want 63), base 10 l=2 accounting "
           f"{acct10.probes_through_last_index} (want 111), {seconds:.1f}s")


def test_criterion_9_invariant_suite():
    results, seconds = timed(checks.run_checks)
    names = {r.name: r for r in results}
    required = ("unitarity", "QFI identity", "bound identity", "round-trip")
    present = all(any(key in name for name in names) for key in required)
    failed = [r.name for r in results if not r.ok]
    record(9, present and not failed and seconds < 60,
           f"{len(results)} checks, {len(failed)} failed{': ' + ', '.join(failed) if failed else ''}, "
           f"{seconds:.1f}s (limit 60s)")

"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s``.
"""

import math
from fractions import Fraction
import random
import time

import numpy as np
import pytest

from femtodfr import cli
from femtodfr import propagation as prop
from femtodfr.allocation import (
    FemtoNetwork,
    NetworkNode,
    SensingReport,
    Tier,
    Zone,
    classify,
)
from femtodfr.metrics import UserClassRates, average_sum_rate, outage_probability
from femtodfr.scenario import (
    EDGE_FUE,
    ExperimentConfig,
    Scheme,
    run_experiment,
)
from femtodfr.spectrum import BandSet, build_plan, femto_pool, verify_partition, width_identities

pytestmark = pytest.mark.acceptance


@pytest.fixture
def report(capsys):
    def emit(number, passed, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {number}: {'PASS' if passed else 'FAIL'} - {detail}")
    return emit


# 1 -------------------------------------------------------------------------

def test_criterion_1_partition_identities(report):
    rng = random.Random(20240)
    worst, failures = 0.0, []
    start = time.perf_counter()
    for k in range(1000):
        plan = build_plan([rng.uniform(1e3, 1e8) for _ in range(3)],
                          [rng.uniform(1e3, 1e8) for _ in range(3)], rng.uniform(0.0, 3e9))
        for i in (1, 2, 3):
            pool, own = femto_pool(plan, i), plan.macro(i)
            if not (pool.isdisjoint(own) and pool | own == plan.total):
                failures.append((k, i, "symbolic"))
        if not all(verify_partition(plan).values()):
            failures.append((k, "intervals"))
        for lhs, rhs in width_identities(plan).values():
            worst = max(worst, abs(lhs - rhs) / abs(rhs))
    elapsed = time.perf_counter() - start
    passed = not failures and worst <= 1e-9 and elapsed < 1.0
    report(1, passed, f"1000 plans, {len(failures)} identity failures, worst width rel err "
                      f"{worst:.2e}, {elapsed:.3f} s")
    assert not failures
    assert worst <= 1e-9
    assert elapsed < 1.0


# 2 -------------------------------------------------------------------------

def test_criterion_2_selection_rule(report):
    plan = build_plan(10e6, 2e6)
    macros = [NetworkNode(i, Tier.MACRO, (0.0, 1000.0 * i), 1500.0, 50.0) for i in (1, 2, 3)]
    s_th = 1e-10
    half_lo, half_hi = BandSet.part("X", 0, 0.5), BandSet.part("X", 0.5, 1)
    macro1 = {
        (Zone.CELL_EDGE, 1): [BandSet.of("Y", "Z")],
        (Zone.CELL_EDGE, 2): [BandSet.of("Y") | half_hi, BandSet.of("Z") | half_lo],
        (Zone.CELL_EDGE, 3): [BandSet.of("X"), BandSet.of("Y"), BandSet.of("Z")],
        (Zone.INNER, 1): [BandSet.of("m2", "m3")],
        (Zone.INNER, 2): [BandSet.of("m2"), BandSet.of("m3")],
        (Zone.INNER, 3): [BandSet.part("m2", 0, Fraction(2, 3)),
                          BandSet.part("m2", Fraction(2, 3), 1)
                          | BandSet.part("m3", 0, Fraction(1, 3)),
                          BandSet.part("m3", Fraction(1, 3), 1)],
    }

    def install_sequence(serving, zone):
        """Three femtos joining one by one; the state after each install."""
        net = FemtoNetwork(plan, macros, s_th)
        states = []
        for k in range(3):
            signals = [s_th / 2] * 3
            signals[serving - 1] = 1e-6
            if zone is Zone.CELL_EDGE:
                signals[serving % 3] = 2 * s_th
            rep = SensingReport(*signals, interferer_ids=tuple(range(10, 10 + k)))
            assert classify(rep, s_th) == (serving, zone)
            net.install_femto(NetworkNode(10 + k, Tier.FEMTO, (0.0, float(k)), 0.01, 2.0),
                              report=rep)
            states.append([a.assigned_bands for a in net.snapshot()])
        return states

    start = time.perf_counter()
    wrong, checked = [], 0
    for serving in (1, 2, 3):
        for zone in (Zone.CELL_EDGE, Zone.INNER):
            for size, got in enumerate(install_sequence(serving, zone), start=1):
                want = [b.rotated(serving - 1) for b in macro1[(zone, size)]]
                checked += 1
                if got != want:
                    wrong.append(f"macro {serving} {zone.value} size {size}")
    elapsed = time.perf_counter() - start
    thirds_ok = all(plan.width_hz(b) == pytest.approx(20e6 / 3, rel=1e-12)
                    for b in macro1[(Zone.INNER, 3)])
    passed = not wrong and thirds_ok and elapsed < 1.0
    report(2, passed, f"{checked} branch outcomes (3 macros x 2 zones x group size 1-3) "
                      f"in {elapsed * 1e3:.0f} ms, mismatches: {wrong or 'none'}")
    assert not wrong and thirds_ok and elapsed < 1.0


# 3 -------------------------------------------------------------------------

def test_criterion_3_propagation_oracle(report):
    # 30-digit hand evaluation of the model formulas
    expected = {
        "macro paper-mode 1 km": 116.24233676115942,
        "macro standard-mode 1 km": 123.44233676115942,
        "femto 10 m, N=30": 61.0848501887865,
    }
    got = {
        "macro paper-mode 1 km": prop.hata_path_loss(
            prop.MacroLinkParams(900.0, 50.0, 1.5, 1.0), prop.PAPER),
        "macro standard-mode 1 km": prop.hata_path_loss(
            prop.MacroLinkParams(900.0, 50.0, 1.5, 1.0), prop.STANDARD),
        "femto 10 m, N=30": prop.femto_path_loss(prop.FemtoLinkParams(900.0, 10.0, 30.0)),
    }
    errs = {k: abs(got[k] - expected[k]) for k in expected}
    passed = max(errs.values()) <= 0.01
    report(3, passed, ", ".join(f"{k} {got[k]:.4f} dB" for k in got)
           + f"; max err {max(errs.values()):.1e} dB")
    assert passed


# 4 -------------------------------------------------------------------------

def test_criterion_4_outage_identities(report):
    zetas = [1e-3, 0.5, 1.0, 10 ** 0.7, 42.0, 1e4]
    identity_err = max(abs(outage_probability(z, z) - (1 - math.exp(-1))) for z in zetas)
    sinr = np.logspace(-3, 4, 100)
    zeta = np.logspace(-2, 3, 100)
    grid = outage_probability(sinr[:, None], zeta[None, :])
    falls_with_sinr = bool(np.all(np.diff(grid, axis=0) <= 0))
    rises_with_zeta = bool(np.all(np.diff(grid, axis=1) >= 0))
    bounded = bool(np.all((grid >= 0) & (grid <= 1)))
    passed = identity_err <= 1e-12 and falls_with_sinr and rises_with_zeta and bounded
    report(4, passed, f"identity err {identity_err:.1e}, 100x100 grid monotone: "
                      f"SINR {falls_with_sinr}, zeta {rises_with_zeta}")
    assert passed


# 5 -------------------------------------------------------------------------

def test_criterion_5_guard_protection(report):
    cfg = ExperimentConfig(n_interfering_femtos=(15,), trials=1000,
                           schemes=(Scheme.DFR_GUARD, Scheme.COCHANNEL))
    res = run_experiment(cfg)
    c = res.columns
    guard = res.select(scheme=Scheme.DFR_GUARD, user_class=EDGE_FUE)
    leaked = int(np.count_nonzero(res.macro_interf_w[guard]))
    # same (trial, user) key under both schemes thanks to shared randomness
    co_rows = res.select(scheme=Scheme.COCHANNEL)
    co = {(int(t), int(u)): s for t, u, s in zip(c["trial"][co_rows], c["user_id"][co_rows],
                                                 c["sinr_db"][co_rows])}
    worse = [(int(t), int(u)) for t, u, s in zip(c["trial"][guard], c["user_id"][guard],
                                                c["sinr_db"][guard])
             if s < co[(int(t), int(u))]]
    trials_with_edge = len(np.unique(c["trial"][guard]))
    passed = leaked == 0 and not worse and trials_with_edge == cfg.trials
    report(5, passed, f"{int(guard.sum())} edge-FUE samples over {trials_with_edge} trials, "
                      f"{leaked} with macro interference, {len(worse)} below co-channel SINR")
    assert passed


# 6 -------------------------------------------------------------------------

ORDER = (Scheme.DFR_GUARD, Scheme.DFR_PLAIN, Scheme.HYBRID, Scheme.COCHANNEL)
OPERATING_POINT = 15


def test_criterion_6_scheme_orderings(report):
    cfg = ExperimentConfig(n_interfering_femtos=tuple(range(0, 41, 5)), trials=1000,
                           schemes=ORDER)
    start = time.perf_counter()
    res = run_experiment(cfg)
    elapsed = time.perf_counter() - start

    def mean(metric, scheme, n):
        return res.mean(metric, scheme=scheme, n_femtos=n, user_class=EDGE_FUE)

    broken = []
    lines = []
    for a, b in zip(ORDER, ORDER[1:]):
        ra, rb = mean("rate_bps", a, OPERATING_POINT), mean("rate_bps", b, OPERATING_POINT)
        ok = ra >= rb
        lines.append(f"    rate n={OPERATING_POINT}: {a.value} {ra / 1e6:.2f} >= "
                     f"{b.value} {rb / 1e6:.2f} Mb/s: {'ok' if ok else 'VIOLATED'}")
        if not ok:
            broken.append(f"rate {a.value}>={b.value}")
    for n in cfg.n_interfering_femtos:
        for a, b in zip(ORDER, ORDER[1:]):
            pa, pb = mean("outage_prob", a, n), mean("outage_prob", b, n)
            ok = pa <= pb
            lines.append(f"    outage n={n}: {a.value} {pa:.4f} <= {b.value} {pb:.4f}: "
                         f"{'ok' if ok else 'VIOLATED'}")
            if not ok:
                broken.append(f"outage n={n} {a.value}<={b.value}")
    passed = not broken and elapsed < 60.0
    report(6, passed, f"1000 trials x 9 densities in {elapsed:.1f} s, "
                      f"{len(broken)} ordering violations")
    print("\n".join(lines))
    assert elapsed < 60.0
    assert not broken, "ordering violations: " + "; ".join(broken)


# 7 -------------------------------------------------------------------------

def test_criterion_7_determinism(report, tmp_path):
    ini = tmp_path / "exp.ini"
    ini.write_text("[scenario]\nschemes = dfr_guard, dfr_plain, hybrid, cochannel, dedicated\n"
                   "n_interfering_femtos = 0, 15, 40\ntrials = 100\nseed = 77\n")
    first, second, third = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    assert cli.main(["run", str(ini), "-o", str(first)]) == 0
    assert cli.main(["run", str(first / "manifest.json"), "-o", str(second)]) == 0
    assert cli.main(["run", str(first / "manifest.json"), "-o", str(third)]) == 0
    a, b, c = ((d / "results.csv").read_bytes() for d in (first, second, third))
    passed = a == b == c
    report(7, passed, f"results.csv {len(a)} bytes, reruns from manifest identical: {passed}")
    assert passed


# 8 -------------------------------------------------------------------------

def test_criterion_8_average_sum_rate(report):
    rng = random.Random(14)
    worst = 0.0
    for _ in range(50):
        classes = [[rng.uniform(0.0, 1e8) for _ in range(rng.randint(0, 30))] for _ in range(3)]
        got = average_sum_rate(UserClassRates(*classes))
        # termwise: each class mean computed separately with exact summation
        want = math.fsum(math.fsum(c) / len(c) for c in classes if c)
        err = abs(got - want) / want if want else abs(got)
        worst = max(worst, err)
    passed = worst <= 1e-9
    report(8, passed, f"50 populations, worst rel err {worst:.1e}")
    assert passed

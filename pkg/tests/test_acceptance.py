"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.  Criterion 9 needs an externally supplied leakage-bound grid file and
is skipped unless FLQKD_CHI_FIXTURE points at one.
"""

import json
import math
import os
import subprocess
import sys
import time
from dataclasses import replace

import numpy as np
import pytest
from scipy.special import ndtr

from flqkd import (
    ConfusionMatrix,
    EveModel,
    GaussianChannel,
    MonitorCounts,
    ProtocolParams,
    TabulatedBound,
    ZeroLeakage,
    confusion_monte_carlo,
    confusion_quadrature,
    intrusion_parameter,
    link_budget,
    mutual_information,
    mutual_information_circulant,
    optimize_brightness,
    simulate_counts,
    sweep,
)

CLI = [sys.executable, "-m", "flqkd"]


def _report(num, name, ok, detail=""):
    line = f"ACCEPTANCE {num} {name}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f" [{detail}]"
    print(line)
    assert ok, line


def test_criterion_1_noiseless_capacity():
    t0 = time.perf_counter()
    R = 1e10
    worst = 0.0
    for K in (2, 4, 8, 32):
        cm = confusion_quadrature(GaussianChannel.from_snr(1e12), K)
        i_ab = mutual_information(cm, R)
        worst = max(worst, abs(i_ab - R * math.log2(K)) / (R * math.log2(K)))
    elapsed = time.perf_counter() - t0
    _report(1, "noiseless capacity", worst <= 1e-9 and elapsed < 1.0,
            f"max rel err {worst:.2e}, {elapsed:.2f}s")


def test_criterion_2_bpsk_oracle():
    t0 = time.perf_counter()
    worst = 0.0
    for snr in (0.25, 1.0, 4.0, 9.0, 16.0):
        cm = confusion_quadrature(GaussianChannel.from_snr(snr), 2)
        tail = float(ndtr(-math.sqrt(snr)))
        worst = max(worst, abs(cm.p[0, 1] - tail), abs(cm.p[1, 0] - tail))
    elapsed = time.perf_counter() - t0
    _report(2, "closed-form binary-error oracle", worst <= 1e-8 and elapsed < 1.0,
            f"max abs err {worst:.2e}, {elapsed:.2f}s")


def test_criterion_3_monte_carlo_vs_quadrature():
    t0 = time.perf_counter()
    ch = GaussianChannel.from_snr(10.0)
    ref = confusion_quadrature(ch, 8)
    inside = total = 0
    for seed in range(20):
        cm, se = confusion_monte_carlo(ch, 8, 10 ** 6, seed=seed)
        inside += int(np.sum(np.abs(cm.p - ref.p) <= 4.0 * se))
        total += cm.p.size
    frac = inside / total
    elapsed = time.perf_counter() - t0
    _report(3, "sampling vs quadrature agreement", frac >= 0.99 and elapsed < 30.0,
            f"{frac:.4f} of entries within 4 se, {elapsed:.1f}s")


def test_criterion_4_circulant_structure_and_identity():
    t0 = time.perf_counter()
    circ_defect = 0.0
    for K, snr in ((2, 4.0), (8, 10.0), (32, 100.0)):
        cm = confusion_quadrature(GaussianChannel.from_snr(snr), K)
        for k in range(K):
            circ_defect = max(circ_defect, float(np.max(np.abs(cm.p[k] - np.roll(cm.p[0], k)))))
    rng = np.random.default_rng(1234)
    ident_defect = 0.0
    for _ in range(100):
        K = int(rng.integers(2, 17))
        q = rng.dirichlet(np.ones(K))
        full = mutual_information(ConfusionMatrix.from_circulant(q), 1.0)
        fast = mutual_information_circulant(q, 1.0)
        ident_defect = max(ident_defect, abs(full - fast) / max(1.0, abs(full)))
    elapsed = time.perf_counter() - t0
    _report(4, "circulant structure and reduction identity",
            circ_defect <= 1e-10 and ident_defect <= 1e-12,
            f"circulant defect {circ_defect:.2e}, identity defect {ident_defect:.2e}, {elapsed:.1f}s")


def test_criterion_5_intrusion_estimator():
    t0 = time.perf_counter()
    # exact algebra cases
    mk = lambda c_ib: MonitorCounts(S_I=1e6, S_A=16.0, S_B=16.0, C_IA=4.0,
                                    C_IB=c_ib, C_IA_shift=0.0, C_IB_shift=0.0,
                                    duration=1.0)
    exact = (
        intrusion_parameter(mk(4.0)).raw == 0.0,
        intrusion_parameter(MonitorCounts(S_I=1e6, S_A=16.0, S_B=16.0, C_IA=4.0,
                                          C_IB=2.0, C_IA_shift=0.0, C_IB_shift=2.0,
                                          duration=1.0)).raw == 1.0,
        intrusion_parameter(mk(2.0)).raw == 0.5,
    )
    # statistical recovery at the default parameter table; N_S small enough
    # that accidentals stay below the tap singles at the 1 ns gate
    p = ProtocolParams(N_S=1e-3)
    coverage_ok = True
    fractions = []
    for f_true in (0.0, 0.25, 1.0):
        hits = 0
        for seed in range(100):
            est = intrusion_parameter(
                simulate_counts(p, f_true, duration=10.0, seed=seed))
            hits += int(abs(est.raw - f_true) <= 3.0 * est.stderr)
        fractions.append(hits / 100.0)
        coverage_ok = coverage_ok and hits >= 95
    elapsed = time.perf_counter() - t0
    _report(5, "intrusion estimator",
            all(exact) and coverage_ok and elapsed < 60.0,
            f"exact={all(exact)}, coverage={fractions}, {elapsed:.1f}s")


class _LinearEve(EveModel):
    """Leakage proportional to brightness; forces an interior optimum."""

    def __init__(self, c):
        self.c = c

    def chi_rate(self, p, f_E):
        return self.c * p.N_S * p.R


def test_criterion_6_optimizer_against_dense_grid():
    t0 = time.perf_counter()
    rng = np.random.default_rng(9001)
    bounds = (1e-7, 0.5)
    worst = 0.0
    for _ in range(10):
        K = int(rng.choice([2, 4, 8]))
        L = float(rng.uniform(0.0, 100.0))
        c = float(rng.uniform(0.8, 4.0)) * math.log2(K)
        p = ProtocolParams(K=K, L=L)
        eve = _LinearEve(c)
        row = optimize_brightness(p, eve, bounds=bounds, tol=1e-4)
        got = p.beta * row.I_AB - row.chi

        best = -math.inf
        for ns in np.geomspace(bounds[0], bounds[1], 10 ** 4):
            pt = replace(p, N_S=float(ns))
            i_ab = mutual_information(confusion_quadrature(link_budget(pt), K), pt.R)
            best = max(best, pt.beta * i_ab - eve.chi_rate(pt, 0.0))
        worst = max(worst, abs(got - best) / abs(best))
    elapsed = time.perf_counter() - t0
    _report(6, "optimizer vs dense-grid oracle", worst <= 1e-3 and elapsed < 120.0,
            f"max rel objective gap {worst:.2e}, {elapsed:.1f}s")


def test_criterion_7_sweep_properties():
    t0 = time.perf_counter()
    p = ProtocolParams()
    ls = [10.0 * i for i in range(16)]
    rows = sweep(p, ZeroLeakage(), Ls=ls, Ks=[2, 32], tol=1e-3)
    by_k = {2: rows[:16], 32: rows[16:]}
    consistent = all(r.skr_lb == pytest.approx(p.beta * r.I_AB, rel=1e-12) for r in rows)
    monotone = all(
        a.skr_lb >= b.skr_lb - 1e-9 * abs(a.skr_lb)
        for k in (2, 32)
        for a, b in zip(by_k[k], by_k[k][1:])
    )
    dominance = all(r32.skr_lb >= r2.skr_lb for r2, r32 in zip(by_k[2], by_k[32]))
    elapsed = time.perf_counter() - t0
    _report(7, "sweep properties", consistent and monotone and dominance and elapsed < 120.0,
            f"consistent={consistent}, monotone={monotone}, dominance={dominance}, {elapsed:.1f}s")


def _run_cli(*args):
    env = dict(os.environ)
    env.pop("FLQKD_PARAMS", None)
    return subprocess.run(CLI + list(args), capture_output=True, text=True, env=env)


def test_criterion_8_cli_determinism(tmp_path):
    t0 = time.perf_counter()
    invocations = [
        ("sweep", "--K", "2,4", "--L", "0:40:20", "--eve", "zero", "--tol", "1e-2"),
        ("rate", "--K", "8", "--snr", "12.5"),
        ("monitor", "--N_S", "0.001", "--f-true", "0,0.4,1", "--duration", "3", "--seed", "5"),
        ("constellation", "--K", "32", "--snr", "100"),
    ]
    ok = True
    for args in invocations:
        a = _run_cli(*args)
        b = _run_cli(*args)
        ok = ok and a.returncode == 0 and b.returncode == 0 and a.stdout == b.stdout
    elapsed = time.perf_counter() - t0
    _report(8, "byte-deterministic output", ok, f"{elapsed:.1f}s")


@pytest.mark.skipif(
    not os.environ.get("FLQKD_CHI_FIXTURE"),
    reason="needs an external leakage-bound grid (set FLQKD_CHI_FIXTURE to its path)",
)
def test_criterion_9_headline_rates_with_supplied_bound():
    path = os.environ["FLQKD_CHI_FIXTURE"]
    model = TabulatedBound.from_json(path)
    ns_axis = model.axes[1]
    bounds = (max(1e-7, float(ns_axis[0])), min(0.5, float(ns_axis[-1])))
    skr = {}
    for K in (2, 32):
        row = optimize_brightness(ProtocolParams(K=K, L=50.0), model,
                                  bounds=bounds, tol=1e-4)
        skr[K] = row.skr_lb
    ratio = skr[32] / skr[2]
    ok = (
        abs(skr[2] - 2.0e9) <= 0.1 * 2.0e9
        and abs(skr[32] - 4.5e9) <= 0.1 * 4.5e9
        and abs(ratio - 2.25) <= 0.2 * 2.25
    )
    _report(9, "headline 50 km rates with supplied bound", ok,
            f"skr(2)={skr[2]:.3g}, skr(32)={skr[32]:.3g}, ratio={ratio:.2f}")

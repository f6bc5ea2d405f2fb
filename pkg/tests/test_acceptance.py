"""Acceptance suite: one test per numbered criterion, printed as pass/fail lines.

Criteria 2, 3, 4 and 5 assert reference closed forms and bound constants
that the implementation demonstrably cannot attain: the computed minima
are grid-certified and cross-checked against the independent circuit
simulator, and for each red criterion a companion test pins the corrected
statement that does hold (see tests/test_noise.py and the README).  Those
tests fail by design rather than loosen the stated tolerances.
"""

import math

import numpy as np
import pytest

from wirenoise import (
    HomodyneBasis,
    MeasurementPlan,
    WireParams,
    accumulate_sigma,
    canonical_macronode_sv,
    db_to_alpha,
    drw_params,
    euler_decompose,
    identity,
    min_scalar_variance,
    rotation,
    rotation_sweep,
    run_channel,
    scalar_variance,
    squeeze,
    sv_from_decomposition,
    sv_g_decomposition,
)
from wirenoise.sampling import (
    rescale_gate_squeeze,
    sample_cvw_plan,
    sample_dictionary_plan,
    sample_gate,
    sample_macronode_plan,
    sample_plan,
)

ALPHA_5DB = db_to_alpha(5.0)
GATE_SEED = 42
GATE_COUNT = 1000


def report(criterion, ok, detail):
    print(f"[acceptance] criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")
    return ok


@pytest.fixture(scope="module")
def drw():
    return drw_params(ALPHA_5DB)


@pytest.fixture(scope="module")
def gate_survey(drw):
    """Minimized variances for the shared 1000-gate sample, at eta as drawn and at eta = 5."""
    rows = []
    for i in range(GATE_COUNT):
        gate = sample_gate(np.random.default_rng([GATE_SEED, i]))
        entry = {
            "eta": euler_decompose(gate).eta,
            "sv_cvw": min_scalar_variance(gate, "cvw", drw, 4).sv,
            "sv_dict": min_scalar_variance(gate, "dictionary", drw, 4).sv,
            "canonical": canonical_macronode_sv(gate, drw),
        }
        g5 = rescale_gate_squeeze(gate, 5.0)
        entry["sv5"] = (
            min_scalar_variance(g5, "cvw", drw, 4).sv,
            min_scalar_variance(g5, "dictionary", drw, 4).sv,
            min_scalar_variance(g5, "macronode", drw, 2).sv,
        )
        rows.append(entry)
    return rows


def test_criterion_1_identity_closed_forms():
    worst = 0.0
    for alpha in (0.3, 0.5756, 1.0):
        d = drw_params(alpha)
        eps, t = d.eps_d, d.t
        got_cvw = min_scalar_variance(identity(), "cvw", d, 4).sv
        got_dict = min_scalar_variance(identity(), "dictionary", d, 4).sv
        worst = max(worst,
                    abs(got_cvw - eps * (4 + t * t) / t**2),
                    abs(got_dict - 2 * eps * (1 + t * t) / t**2))
    ok = worst < 1e-9
    report(1, ok, f"identity-gate closed forms, worst deviation {worst:.3e} (tol 1e-9)")
    assert ok


def test_criterion_2_counterexample_gate_closed_forms():
    target = rotation(math.pi) @ squeeze(2.0)
    lines = []
    worst = 0.0
    for alpha in (0.3, 0.5756, 1.0):
        d = drw_params(alpha)
        eps, t = d.eps_d, d.t
        got_dict = min_scalar_variance(target, "dictionary", d, 4).sv
        got_cvw = min_scalar_variance(target, "cvw", d, 4).sv
        ref_dict = 55.0 * eps / 8.0
        ref_cvw = eps * (5 + 12 * t + 8 * t * t) / (4 * t * t)
        worst = max(worst, abs(got_dict - ref_dict), abs(got_cvw - ref_cvw))
        lines.append(
            f"alpha={alpha}: dict computed {got_dict:.9f} vs reference {ref_dict:.9f} "
            f"(ratio {got_dict / ref_dict:.6f}); cvw computed {got_cvw:.9f} vs "
            f"reference {ref_cvw:.9f} (ratio {got_cvw / ref_cvw:.6f})")
    ok = worst < 1e-6
    detail = ("R(pi)S(2) reference values; the grid-certified minima are "
              "eps(5+12t+8t^2)/(2t^2) and eps(5+24t+26t^2)/(4t^2), i.e. exactly "
              "twice the cvw reference at every t and twice the dictionary "
              "reference as t -> 1. " + " | ".join(lines))
    report(2, ok, detail)
    assert ok, detail


def test_criterion_3_cvw_macronode_gap(drw, gate_survey):
    eps, t = drw.eps_d, drw.t
    gap = 3.0 * eps / t**2
    margins = [r["sv_cvw"] - r["canonical"] for r in gate_survey]
    violations = sum(m < gap - 1e-9 for m in margins)
    ok = violations == 0
    detail = (f"{violations}/{GATE_COUNT} gates violate margin >= 3*eps/t^2 = {gap:.6f}; "
              f"smallest margin {min(margins):.6f}. The halved constant "
              f"{gap / 2:.6f} holds with zero violations "
              f"({sum(m < gap / 2 - 1e-9 for m in margins)} violations).")
    report(3, ok, detail)
    assert ok, detail


def test_criterion_4_dictionary_macronode_gap(drw, gate_survey):
    eps, t = drw.eps_d, drw.t
    gap = eps * (1.0 + 2.0 * math.sqrt(2.0) * t) / t**2
    cert = 2.0 * eps / t
    margins = [r["sv_dict"] - r["canonical"] for r in gate_survey]
    violations = sum(m < gap - 1e-9 for m in margins)
    ok = violations == 0
    detail = (f"{violations}/{GATE_COUNT} gates violate margin >= eps(1+2*sqrt(2)t)/t^2 = "
              f"{gap:.6f}; smallest margin {min(margins):.6f}. The identity gate already "
              f"violates it (margin eps(1+t^2)/t^2 = {eps * (1 + t * t) / t**2:.6f}); the "
              f"certified constant 2*eps/t = {cert:.6f} holds with "
              f"{sum(m < cert - 1e-9 for m in margins)} violations.")
    report(4, ok, detail)
    assert ok, detail


def test_criterion_5_high_squeezing_floor(drw, gate_survey):
    eps = drw.eps_d
    floor = eps * (25.0 + 1.0 / 25.0)  # min(1, 1/g^2) = 1 for both wire weights here
    worst_ratio = min(min(r["sv5"]) / floor for r in gate_survey)
    violations = sum(min(r["sv5"]) <= floor for r in gate_survey)
    ok = violations == 0
    detail = (f"{violations}/{GATE_COUNT} gates at eta=5 fall below eps(eta^2+eta^-2) = "
              f"{floor:.6f}; smallest min-SV/floor ratio {worst_ratio:.4f}. The halved "
              f"floor holds with {sum(min(r['sv5']) <= floor / 2 for r in gate_survey)} "
              f"violations.")
    report(5, ok, detail)
    assert ok, detail


def test_criterion_6_oracle_equivalence():
    worst = 0.0
    for i in range(200):
        plan = sample_plan(np.random.default_rng([7, i]))
        est = run_channel(plan)
        acc = accumulate_sigma(plan)
        worst = max(worst, float(np.max(np.abs(est.added_cov - 0.5 * acc.sigma_before))))
    ok = worst < 1e-8

    mc_worst = 0.0
    for i, sampler in enumerate((sample_cvw_plan, sample_macronode_plan,
                                 sample_dictionary_plan)):
        plan = sampler(np.random.default_rng([11, i]))
        analytic = run_channel(plan)
        mc = run_channel(plan, samples=10_000, rng_seed=13, averaging="monte-carlo")
        mc_worst = max(mc_worst, float(np.max(
            np.abs(mc.added_cov - analytic.added_cov) / mc.stderr)))
    ok = ok and mc_worst < 5.0
    report(6, ok, f"200 plans, max |added - sigma/2| = {worst:.3e} (tol 1e-8); "
                  f"Monte Carlo at 1e4 samples within {mc_worst:.2f} standard errors (tol 5)")
    assert ok


def test_criterion_7_rotation_figure_single_wire(drw):
    alpha = drw.alpha
    near = rotation_sweep("cvw", 3, alpha, [math.pi / 2 - 1e-3, math.pi / 2 + 1e-3])
    at_pi = rotation_sweep("cvw", 3, alpha, [math.pi])[0][1]
    diverges = all(sv > 1e3 * at_pi for _, sv in near)

    thetas = [2 * math.pi * k / 630 for k in range(1, 630)]
    four = rotation_sweep("cvw", 4, alpha, thetas)
    bounded = all(math.isfinite(sv) for _, sv in four)

    min4_at_pi = min_scalar_variance(rotation(math.pi), "cvw", drw, 4).sv
    three_wins = at_pi < min4_at_pi
    ok = diverges and bounded and three_wins
    report(7, ok, f"n=3 divergence near pi/2 ({min(sv for _, sv in near):.1f} > "
                  f"{1e3 * at_pi:.1f}), n=4 bounded (max {max(sv for _, sv in four):.3f}), "
                  f"sv3(pi)={at_pi:.4f} < min-sv4(pi)={min4_at_pi:.4f}")
    assert ok


def test_criterion_8_rotation_figure_dual_rail(drw):
    alpha = drw.alpha
    eps, t = drw.eps_d, drw.t
    near = rotation_sweep("dictionary", 3, alpha, [math.pi / 2 - 1e-3, math.pi / 2 + 1e-3])
    at_pi = rotation_sweep("dictionary", 3, alpha, [math.pi])[0][1]
    diverges = all(sv > 1e3 * at_pi for _, sv in near)

    thetas = [2 * math.pi * k / 630 for k in range(1, 630)]
    mac = rotation_sweep("macronode", 2, alpha, thetas)
    values = [sv for _, sv in mac]
    spread = max(values) - min(values)
    constant_ok = spread < 1e-12 and abs(values[0] - eps * (1 + t * t) / t**2) < 1e-12

    d3 = rotation_sweep("dictionary", 3, alpha, thetas)
    d4 = rotation_sweep("dictionary", 4, alpha, thetas)
    dominated = all(
        (not math.isfinite(sv3) or mac_sv <= sv3 + 1e-12) and mac_sv <= sv4 + 1e-12
        for (_, sv3), (_, sv4), (_, mac_sv) in zip(d3, d4, mac)
    )
    ok = diverges and constant_ok and dominated
    report(8, ok, f"dictionary n=3 diverges near pi/2; macronode constant "
                  f"{values[0]:.6f} with spread {spread:.2e}; macronode <= both "
                  f"dictionary curves at every finite grid point: {dominated}")
    assert ok


def test_criterion_9_weight_decomposition(rng):
    worst = 0.0
    for _ in range(100):
        n = 2 * int(rng.integers(1, 4))
        wire = WireParams(g=float(rng.uniform(0.3, 1.5)),
                          epsilon=float(rng.uniform(0.01, 0.5)))
        steps = tuple(HomodyneBasis(float(rng.uniform(-1.2, 1.2))) for _ in range(n))
        plan = MeasurementPlan("cvw", steps, wire)
        sv = scalar_variance(accumulate_sigma(plan)).sv
        rebuilt = sv_from_decomposition(sv_g_decomposition(plan), wire.g)
        worst = max(worst, abs(rebuilt - sv))
    ok = worst < 1e-10
    report(9, ok, f"100 even-length plans, worst reconstruction deviation {worst:.3e} (tol 1e-10)")
    assert ok


def test_criterion_10_epsilon_linearity(rng):
    exact = True
    for _ in range(100):
        n = int(rng.integers(1, 7))
        wire = WireParams(g=float(rng.uniform(0.3, 1.5)),
                          epsilon=float(rng.uniform(0.01, 0.5)))
        steps = tuple(HomodyneBasis(float(rng.uniform(-1.2, 1.2))) for _ in range(n))
        base = accumulate_sigma(MeasurementPlan("cvw", steps, wire)).sigma_before
        doubled = accumulate_sigma(MeasurementPlan(
            "cvw", steps, WireParams(g=wire.g, epsilon=2.0 * wire.epsilon))).sigma_before
        exact = exact and np.array_equal(doubled, 2.0 * base)
    report(10, exact, "doubling epsilon doubles every accumulated entry bit-exactly "
                      "across 100 random plans")
    assert exact

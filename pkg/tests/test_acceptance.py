"""Acceptance gate: one [PASS]/[FAIL] line per criterion.

Run with ``pytest tests/test_acceptance.py -s`` (the lines are printed even
without ``-s``).
"""

import time

import numpy as np
import pytest

from cvswap import SqueezerSpec, vacuum_state
from cvswap.criteria import (
    ComboGains,
    closedform_gains_fourmode,
    closedform_gains_threemode,
    fourmode_combos,
    fourmode_terms,
    loss_threshold,
    numeric_gains,
    ppt_values,
    reconstruct_covariance,
    squeezing_threshold,
    synthesize_measurements,
    threemode_combos,
    threemode_terms,
)
from cvswap.experiments import bundled_sigma, load_covariance
from cvswap.gaussian import (
    beam_splitter_op,
    combination_variance,
    compose,
    is_physical,
    monte_carlo_variance,
    quadrature_vector,
    rotation_op,
    squeezed_vacuum,
    tensor_all,
    apply,
)
from cvswap.protocol import (
    ChannelSpec,
    conditional_swap_oracle,
    fourmode_variance_formulas,
    lossy_channel,
    optimal_classical_gain,
    swap_ghz_epr,
    swap_ghz_ghz,
    swap_transfer,
    theoretical_output_covariance,
    threemode_variance_formulas,
)
from cvswap.states import NetworkRecipe

from conftest import resources

PRINTED_PPT = {
    1: (0.52, 0.39, 0.40),
    2: (0.61, 0.42, 0.42),
    3: (0.74, 0.50, 0.50),
    4: (0.86, 0.58, 0.56),
    5: (1.03, 0.70, 0.66),
}
PRINTED_GAINS = (0.90, 0.84, 0.94, 0.94, 0.88, 0.88, 0.94, 0.93)
PRINTED_G = 0.95
MEASURED_COMBOS = (2.10, 2.65, 2.06, 2.27, 1.85)
# -5.90 dB squeezing, +9.84 dB anti-squeezing; (0.26, 9.64) at two digits
EXP_DB = SqueezerSpec.from_db(5.90, 9.84)


@pytest.fixture
def report(capsys):
    def emit(n, title, ok, detail, elapsed):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {n}: {title} ({detail}; {elapsed:.2f} s)")
        assert ok, detail
        assert elapsed < 10, f"criterion {n} took {elapsed:.1f} s"
    return emit


def test_criterion_1_ppt_on_bundled_data(report):
    t0 = time.perf_counter()
    worst = 0.0
    for k, printed in PRINTED_PPT.items():
        mu = ppt_values(load_covariance(bundled_sigma(k))).values
        worst = max(worst, float(np.abs(np.subtract(mu, printed)).max()))
    report(1, "PPT values of sigma1..sigma5", worst <= 0.01, f"max |mu - printed| = {worst:.4f}",
           time.perf_counter() - t0)


def test_criterion_2_closed_form_gains(report):
    t0 = time.perf_counter()
    v, w = EXP_DB.v_sq, EXP_DB.v_anti
    cf = closedform_gains_fourmode(v, w).g + closedform_gains_threemode(v, w).g
    a, b, e = resources(EXP_DB)
    G = optimal_classical_gain(v, w)
    num = numeric_gains(swap_ghz_ghz(a, b, G)).g + numeric_gains(swap_ghz_epr(a, e, G)).g
    rounded = tuple(round(x, 2) for x in cf)
    dev = float(np.abs(np.subtract(cf, num)).max())
    ok = rounded == PRINTED_GAINS and dev < 1e-6
    report(2, "closed-form gains g1..g8", ok, f"rounded {rounded}, |closed - numeric| = {dev:.1e}",
           time.perf_counter() - t0)


def test_criterion_3_optimal_classical_gain(report):
    t0 = time.perf_counter()
    G = optimal_classical_gain(0.26, 9.64)
    report(3, "optimal classical gain", abs(G - 0.95) <= 0.005, f"G = {G:.4f}", time.perf_counter() - t0)


def test_criterion_4_thresholds(report):
    t0 = time.perf_counter()
    r4 = squeezing_threshold("fourmode", "unit").value
    r3 = squeezing_threshold("threemode", "unit").value
    eta = loss_threshold(0.26, 9.64, 0.85).value
    ok = abs(r4 - 0.44) <= 0.005 and abs(r3 - 0.39) <= 0.005 and eta is not None and abs(eta - 0.24) <= 0.02
    report(4, "squeezing and loss thresholds", ok, f"r4* = {r4:.4f}, r3* = {r3:.4f}, eta* = {eta:.4f}",
           time.perf_counter() - t0)


def _fourmode_formula_error(c, sq, G):
    gains = closedform_gains_fourmode(sq.v_sq, sq.v_anti)
    sim = [t for pair in fourmode_terms(c, gains) for t in pair]
    f = fourmode_variance_formulas(sq.v_sq, sq.v_anti, G, gains.g)
    return max(abs(s - f[f"V{i}"]) for i, s in zip(range(1, 7), sim))


def _threemode_formula_error(d, sq, G):
    gains = closedform_gains_threemode(sq.v_sq, sq.v_anti)
    sim = [t for pair in threemode_terms(d, gains) for t in pair]
    f = threemode_variance_formulas(sq.v_sq, sq.v_anti, G, *gains.g)
    return max(abs(s - f[f"V{i}"]) for i, s in zip(range(7, 11), sim))


def test_criterion_5_formula_simulation_equivalence(report):
    t0 = time.perf_counter()
    formula_err = oracle_err = 0.0
    for r in np.linspace(0.05, 1.2, 10):
        sq = SqueezerSpec.pure(r)
        a, b, e = resources(sq)
        for G in np.linspace(0.0, 1.5, 10):
            c = swap_ghz_ghz(a, b, G)
            formula_err = max(formula_err, _fourmode_formula_error(c, sq, G),
                              _threemode_formula_error(swap_ghz_epr(a, e, G), sq, G))
            oracle_err = max(oracle_err, float(np.abs(conditional_swap_oracle(a, b, G).cov - c.cov).max()))
            for eta in np.linspace(0.0, 1.0, 5):
                d = swap_ghz_epr(a, e, G, ChannelSpec(eta))
                theory = theoretical_output_covariance(sq.v_sq, sq.v_anti, G, eta)
                formula_err = max(formula_err, float(np.abs(theory - d.cov).max()))
                oracle_err = max(oracle_err, float(np.abs(conditional_swap_oracle(a, e, G, eta).cov - d.cov).max()))
    ok = formula_err < 1e-12 and oracle_err < 1e-10
    report(5, "formulas and conditional route vs simulation on 10x10x5 grid", ok,
           f"formula err {formula_err:.1e}, oracle err {oracle_err:.1e}", time.perf_counter() - t0)


def test_criterion_6_measured_combo_consistency(report):
    t0 = time.perf_counter()
    a, b, e = resources(SqueezerSpec(0.26, 9.64))
    four = fourmode_combos(swap_ghz_ghz(a, b, PRINTED_G), ComboGains(PRINTED_GAINS[:6]))
    three = threemode_combos(swap_ghz_epr(a, e, PRINTED_G), ComboGains(PRINTED_GAINS[6:]))
    combos = four + three
    dev = float(np.abs(np.subtract(combos, MEASURED_COMBOS)).max())
    ok = dev <= 0.5 and max(combos) < 4
    report(6, "theory combos vs measured", ok, "combos " + ", ".join(f"{x:.3f}" for x in combos)
           + f"; max |theory - measured| = {dev:.3f}", time.perf_counter() - t0)


def _random_op(rng, n):
    ops = []
    for _ in range(rng.integers(1, 12)):
        if n > 1 and rng.random() < 0.6:
            i, j = rng.choice(n, 2, replace=False)
            ops.append(beam_splitter_op(rng.uniform(), (int(i), int(j))))
        else:
            ops.append(rotation_op(rng.choice(["fourier", "pi_rotation"]), int(rng.integers(n))))
    return compose(ops, n)


def test_criterion_7_property_suites(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    failures = []

    defect = max(_random_op(rng, int(rng.integers(1, 7))).symplectic_defect() for _ in range(1000))
    if defect >= 1e-12:
        failures.append(f"symplectic defect {defect:.1e}")

    physical = True
    for _ in range(100):
        v = rng.uniform(0.05, 1.0)
        sq = SqueezerSpec(v, rng.uniform(1 / v, 4 / v))
        a, b, e = resources(sq)
        G, eta = rng.uniform(0, 1.5), rng.uniform()
        outs = [lossy_channel(a, int(rng.integers(3)), ChannelSpec(eta)), swap_ghz_ghz(a, b, G),
                swap_ghz_epr(a, e, G, ChannelSpec(eta)), apply(_random_op(rng, 3), a)]
        physical &= all(is_physical(s) for s in outs)
    if not physical:
        failures.append("non-physical output")

    tomo = 0.0
    for _ in range(100):
        v = rng.uniform(0.05, 1.0)
        a, _, e = resources(SqueezerSpec(v, rng.uniform(1 / v, 4 / v)))
        d = swap_ghz_epr(a, e, rng.uniform(0, 1.5), ChannelSpec(rng.uniform()))
        tomo = max(tomo, float(np.abs(reconstruct_covariance(synthesize_measurements(d)).cov - d.cov).max()))
    if tomo >= 1e-12:
        failures.append(f"tomography err {tomo:.1e}")

    worst_z = 0.0
    sq = SqueezerSpec(0.26, 9.64)
    for variant, n_out, eta in (("ghz_b", 4, 1.0), ("epr", 3, 0.7)):
        transfer = swap_transfer(NetworkRecipe.default("ghz_a", sq), NetworkRecipe.default(variant, sq), 0.95,
                                 ChannelSpec(eta))
        state = transfer.output_state()
        for seed in range(4):
            terms = [(m, q, rng.normal()) for m in range(n_out) for q in "xp"]
            coeffs = quadrature_vector(n_out, terms)
            est, se = monte_carlo_variance(transfer, coeffs, n_samples=100_000, seed=seed)
            worst_z = max(worst_z, abs(est - combination_variance(state, coeffs)) / se)
    if worst_z >= 5:
        failures.append(f"Monte Carlo deviation {worst_z:.1f} se")

    vac = SqueezerSpec(1.0, 1.0)
    a, b, e = resources(vac)
    G = optimal_classical_gain(1.0, 1.0)
    combos = fourmode_combos(swap_ghz_ghz(a, b, G), closedform_gains_fourmode(1.0, 1.0)) \
        + threemode_combos(swap_ghz_epr(a, e, G), closedform_gains_threemode(1.0, 1.0)) \
        + fourmode_combos(vacuum_state(4), closedform_gains_fourmode(1.0, 1.0))
    boundary = max(abs(x - 4) for x in combos)
    if boundary >= 1e-9:
        failures.append(f"vacuum combos off 4 by {boundary:.1e}")

    detail = (f"defect {defect:.1e}, tomography {tomo:.1e}, MC {worst_z:.2f} se, boundary {boundary:.1e}"
              if not failures else "; ".join(failures))
    report(7, "property suites", not failures, detail, time.perf_counter() - t0)

import math

import numpy as np
import pytest

from clusterpump.cluster import GraphSpec
from clusterpump.errors import NumericalError
from clusterpump.experiments import (
    SweepResult,
    detect_gamma_sat,
    fit_linear,
    fit_offset_inverse,
    fit_power_law,
    gamma_sweep,
    parse_gamma_policy,
    size_scaling_study,
)
from clusterpump.lindblad import ModelParams


def synthetic_sweep(gammas, fid):
    gammas = np.asarray(gammas, dtype=float)
    fid = np.asarray(fid, dtype=float)
    return SweepResult(
        axis_name="gamma_g",
        axis_values=gammas,
        fidelity=fid,
        witness=0.5 - fid,
        gap=np.full_like(fid, np.nan),
        n_qubits=0,
        params=ModelParams(g=1.0, h=1.0, gamma=0.0),
        status=["ok"] * len(fid),
    )


# ----------------------------------------------------------------- detection


def test_detect_gamma_sat_synthetic_closed_form():
    # F = 1 - exp(-gamma/10): the threshold crossing is analytically
    # invertible, gamma* = -10 ln(1 - (1 - eps) F_max)
    gammas = np.linspace(0.0, 100.0, 2001)
    fid = 1.0 - np.exp(-gammas / 10.0)
    eps = 1e-3
    detected = detect_gamma_sat(synthetic_sweep(gammas, fid), epsilon=eps)
    threshold = (1.0 - eps) * fid.max()
    exact = -10.0 * math.log(1.0 - threshold)
    assert detected == pytest.approx(exact, rel=1e-4)


def test_detect_gamma_sat_constant_series():
    gammas = np.linspace(1.0, 10.0, 10)
    assert detect_gamma_sat(synthetic_sweep(gammas, np.full(10, 0.7))) == 1.0


def test_detect_gamma_sat_no_plateau_raises():
    gammas = np.linspace(1.0, 10.0, 10)
    rising = np.linspace(0.1, 0.9, 10)
    with pytest.raises(NumericalError, match="sweep range too small"):
        detect_gamma_sat(synthetic_sweep(gammas, rising))


def test_detect_gamma_sat_monotone_in_epsilon():
    gammas = np.geomspace(0.1, 300.0, 200)
    fid = 1.0 - 1.0 / (1.0 + (gammas / 7.0) ** 2)
    sweep = synthetic_sweep(gammas, fid)
    values = [detect_gamma_sat(sweep, epsilon=eps) for eps in (3e-2, 1e-2, 3e-3, 1e-3, 3e-4)]
    assert np.all(np.diff(values) >= 0)


def test_detect_gamma_sat_skips_failed_points():
    gammas = np.linspace(1.0, 5.0, 5)
    fid = np.array([0.2, np.nan, 0.9, 0.9, 0.9])
    sweep = synthetic_sweep(gammas, fid)
    sweep.status[1] = "solver failed"
    value = detect_gamma_sat(sweep)
    assert 1.0 < value <= 3.0


# ----------------------------------------------------------------- fits


def test_fit_linear_exact():
    fit = fit_linear([0.0, 1.0, 2.0, 3.0], [1.0, 3.0, 5.0, 7.0])
    assert fit.coefficients == pytest.approx((2.0, 1.0), abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0)


def test_fit_linear_flat():
    fit = fit_linear([1.0, 2.0, 3.0], [4.0, 4.0, 4.0])
    assert fit.coefficients[0] == pytest.approx(0.0, abs=1e-12)


def test_fit_linear_degenerate_x():
    with pytest.raises(ValueError, match="degenerate"):
        fit_linear([2.0, 2.0, 2.0], [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        fit_linear([1.0], [1.0])


def test_fit_power_law_exact():
    x = np.array([1.0, 4.0, 9.0, 16.0])
    fit = fit_power_law(x, np.sqrt(x))
    assert fit.coefficients[0] == pytest.approx(0.5, abs=1e-12)
    assert fit.coefficients[1] == pytest.approx(0.0, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0)


def test_fit_power_law_prefactor():
    x = np.array([1.0, 2.0, 4.0])
    fit = fit_power_law(x, 5.0 * x**1.5)
    assert fit.coefficients[0] == pytest.approx(1.5, abs=1e-12)
    assert 10.0 ** fit.coefficients[1] == pytest.approx(5.0, rel=1e-12)


def test_fit_power_law_rejects_nonpositive():
    with pytest.raises(ValueError):
        fit_power_law([1.0, 2.0], [0.0, 1.0])
    with pytest.raises(ValueError):
        fit_power_law([-1.0, 2.0], [1.0, 1.0])


def test_fit_offset_inverse_exact():
    n = np.array([2.0, 3.0, 4.0, 6.0])
    fit = fit_offset_inverse(n, 0.9 + 0.1 / n)
    assert fit.coefficients == pytest.approx((0.9, 0.1), abs=1e-12)


def test_fit_offset_inverse_flat():
    fit = fit_offset_inverse([2.0, 3.0, 4.0], [0.5, 0.5, 0.5])
    assert fit.coefficients[1] == pytest.approx(0.0, abs=1e-12)


def test_fit_offset_inverse_needs_two_points():
    with pytest.raises(ValueError):
        fit_offset_inverse([2.0], [0.5])


def test_fits_invariant_under_reordering(rng):
    x = rng.uniform(1.0, 10.0, 12)
    y = 2.0 * x + 1.0 + rng.normal(0, 0.1, 12)
    perm = rng.permutation(12)
    a = fit_linear(x, y)
    b = fit_linear(x[perm], y[perm])
    assert a.coefficients == pytest.approx(b.coefficients, rel=1e-12)
    yp = np.abs(y) + 0.5
    a = fit_power_law(x, yp)
    b = fit_power_law(x[perm], yp[perm])
    assert a.coefficients == pytest.approx(b.coefficients, rel=1e-12)


# ----------------------------------------------------------------- sweeps


def test_gamma_sweep_small_chain():
    sweep = gamma_sweep(GraphSpec.chain(2), 1.0, [0.1, 1.0, 10.0, 100.0])
    assert sweep.status == ["ok"] * 4
    assert np.all(np.diff(sweep.fidelity) > 0)
    assert np.all(np.isfinite(sweep.gap))
    # the witness identity holds pointwise on unit-trace steady states
    assert np.abs(sweep.witness - (0.5 - sweep.fidelity)).max() <= 1e-12


def test_gamma_sweep_without_gap_matches():
    grid = [0.5, 5.0, 50.0]
    full = gamma_sweep(GraphSpec.chain(2), 1.0, grid, compute_gap=True)
    fast = gamma_sweep(GraphSpec.chain(2), 1.0, grid, compute_gap=False)
    assert np.abs(full.fidelity - fast.fidelity).max() <= 1e-9
    assert np.all(np.isnan(fast.gap))


def test_gamma_sweep_witness_sign_change_n3():
    grid = np.geomspace(0.1, 400.0, 12)
    sweep = gamma_sweep(GraphSpec.chain(3), 1.0, grid, compute_gap=False)
    assert sweep.witness[0] > 0
    assert sweep.witness[-1] < -0.45


def test_gamma_sweep_is_deterministic():
    grid = np.geomspace(0.5, 50.0, 5)
    a = gamma_sweep(GraphSpec.chain(2), 1.0, grid, compute_gap=False)
    b = gamma_sweep(GraphSpec.chain(2), 1.0, grid, compute_gap=False)
    assert np.array_equal(a.fidelity, b.fidelity)
    assert np.array_equal(a.witness, b.witness)


def test_gamma_sweep_parallel_matches_serial():
    grid = np.geomspace(0.5, 50.0, 6)
    serial = gamma_sweep(GraphSpec.chain(2), 1.0, grid, compute_gap=False, jobs=1)
    parallel = gamma_sweep(GraphSpec.chain(2), 1.0, grid, compute_gap=False, jobs=3)
    assert np.array_equal(serial.fidelity, parallel.fidelity)


def test_gamma_sweep_rejects_unsorted():
    with pytest.raises(ValueError):
        gamma_sweep(GraphSpec.chain(2), 1.0, [1.0, 0.5])


def test_size_guard():
    with pytest.raises(ValueError, match="GiB"):
        gamma_sweep(GraphSpec.chain(8), 1.0, [1.0])
    with pytest.raises(ValueError, match="GiB"):
        size_scaling_study([2, 8], h_g=1.0)


# ----------------------------------------------------------------- policies & study


def test_parse_gamma_policy():
    grid = parse_gamma_policy("log:1:100:3")
    assert grid == pytest.approx([1.0, 10.0, 100.0])
    grid = parse_gamma_policy("lin:0:4:5")
    assert grid == pytest.approx([0.0, 1.0, 2.0, 3.0, 4.0])
    for bad in ("geom:1:2:3", "log:1:2", "log:2:1:5", "log:0:1:5", "log:1:10:1"):
        with pytest.raises(ValueError):
            parse_gamma_policy(bad)


def test_size_scaling_study_small():
    study = size_scaling_study([2, 3], h_g=0.5, gamma_policy="log:0.5:600:24")
    assert [r.n for r in study.rows] == [2, 3]
    assert study.rows[1].gamma_sat > study.rows[0].gamma_sat
    assert study.fits["gamma_sat_linear"].coefficients[0] > 0
    for row in study.rows:
        assert 0.97 <= row.f_sat <= 1.0
        assert row.gap_weak > 0
    # both gaps are evaluated at one common strong dissipation, so they are
    # dominated by gamma/2 and nearly size-independent
    assert study.strong_gamma == max(r.gamma_sat for r in study.rows)
    assert abs(study.fits["gap_strong_power_law"].coefficients[0]) <= 0.05

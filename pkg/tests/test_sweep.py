import numpy as np
import pytest
from hypothesis import given, strategies as st

from vtype_sge.model import ParameterError, SystemParams
from vtype_sge.steadystate import RESIDUAL_TOL
from vtype_sge.sweep import (SpotCheckError, find_optimal_pump, golden_section_max, is_unimodal,
                             parse_grid, spot_check, steady_negativity, sweep_distance,
                             sweep_pump, worker_count)
import vtype_sge.sweep as sweep_mod

PUMP_GRID = "0.005:0.5:0.005"


def test_parse_grid_inclusive():
    g = parse_grid(PUMP_GRID)
    assert len(g) == 100 and g[0] == 0.005 and g[-1] == pytest.approx(0.5)
    np.testing.assert_array_equal(parse_grid("0:1:0.5"), [0, 0.5, 1])
    for bad in ("1:0:0.1", "0:1:0", "0:1", "a:b:c"):
        with pytest.raises(ValueError):
            parse_grid(bad)


def test_pump_argmax_location(strong_coupling):
    t = sweep_pump(strong_coupling, parse_grid(PUMP_GRID))
    assert 0.04 <= t.values[t.argmax()] <= 0.16


def test_peak_ordering_by_cross_damping():
    grid = parse_grid(PUMP_GRID)
    peaks = [sweep_pump(SystemParams(1.0, 1.2, g, 0.0), grid).negativity.max()
             for g in (0.8, 0.9, 0.96)]
    assert peaks[0] < peaks[1] < peaks[2]


def test_strong_pump_kills_entanglement(strong_coupling):
    grid = np.append(parse_grid(PUMP_GRID), 50.0)
    assert sweep_pump(strong_coupling, grid).negativity[-1] < 1e-4


def test_table_invariants(strong_coupling):
    t = sweep_pump(strong_coupling, [0.0, 0.01, 0.08, 1.0])
    assert np.all(np.diff(t.values) > 0)
    assert np.all(t.negativity >= 0)
    assert np.all(t.residual < RESIDUAL_TOL)
    assert t.negativity[0] == 0.0 and t.rho99[0] == 1.0
    assert t.metadata["params"]["Gamma1"] == 0.96
    assert t.metadata["grid"] == [0.0, 0.01, 0.08, 1.0]
    assert "timestamp" in t.metadata
    rows = list(t.rows())
    assert len(rows) == len(t) == 4
    assert set(rows[2]) == {"Lambda", "negativity", "rho99", "rho37", "rho68", "residual"}


@pytest.mark.parametrize("grid", [[], [0.1, 0.1], [0.2, 0.1], [-0.1, 0.1], [[0.1]]])
def test_bad_grids(strong_coupling, grid):
    with pytest.raises(ValueError):
        sweep_pump(strong_coupling, grid)


def test_sweep_deterministic(strong_coupling):
    grid = parse_grid("0.01:0.3:0.01")
    a, b = sweep_pump(strong_coupling, grid), sweep_pump(strong_coupling, grid)
    for name in ("values", "negativity", "rho99", "rho37", "rho68", "residual"):
        np.testing.assert_array_equal(getattr(a, name), getattr(b, name))


def test_parallel_matches_serial(strong_coupling, monkeypatch):
    grid = parse_grid("0.01:0.2:0.01")
    serial = sweep_pump(strong_coupling, grid, workers=1)
    monkeypatch.setenv("VTYPE_SGE_WORKERS", "2")
    parallel = sweep_pump(strong_coupling, grid)
    np.testing.assert_array_equal(serial.negativity, parallel.negativity)
    np.testing.assert_array_equal(serial.rho37, parallel.rho37)


def test_worker_count_env(monkeypatch):
    monkeypatch.delenv("VTYPE_SGE_WORKERS", raising=False)
    assert worker_count() == 1
    monkeypatch.setenv("VTYPE_SGE_WORKERS", "3")
    assert worker_count() == 3
    assert worker_count(0) == 1
    monkeypatch.setenv("VTYPE_SGE_WORKERS", "many")
    with pytest.raises(ParameterError):
        worker_count()


def test_spot_check_flags_disagreement(strong_coupling):
    params = [strong_coupling.with_pump(0.08)]
    good = sweep_mod._evaluate(params, 1)
    assert spot_check(params, good) < 1e-12
    bad_state = good[0][0].state.vector.copy()
    bad_state[2] += 1e-6
    from vtype_sge.model import ReducedState
    from vtype_sge.steadystate import SteadyState
    bad = [(SteadyState(ReducedState(bad_state), 0.0, "analytic"), good[0][1])]
    with pytest.raises(SpotCheckError):
        spot_check(params, bad)


def test_grid_refinement_stability(strong_coupling):
    coarse = parse_grid("0.01:0.3:0.01")
    fine = parse_grid("0.005:0.3:0.005")
    a = sweep_pump(strong_coupling, coarse)
    b = sweep_pump(strong_coupling, fine)
    assert abs(a.values[a.argmax()] - b.values[b.argmax()]) < 0.01


# ------------------------------------------------------------- distance


def test_distance_ordering():
    t = sweep_distance(["R1.18", "R0.83", "R0.50", "R2.78"], 0.08)
    np.testing.assert_array_equal(t.values, [0.50, 0.83, 1.18, 2.78])
    assert t.labels == ["R0.50", "R0.83", "R1.18", "R2.78"]
    n = t.negativity
    assert n[0] > n[1] > n[2] > n[3]
    assert [r["preset"] for r in t.rows()] == t.labels


def test_distance_without_pump():
    assert sweep_distance(["R0.83"], 0.0).negativity[0] == 0.0


def test_distance_unknown_preset():
    with pytest.raises(ParameterError, match="R0.50, R0.83, R1.18, R2.78"):
        sweep_distance(["R0.83", "R7"], 0.08)
    with pytest.raises(ValueError):
        sweep_distance(["R0.83"], -1.0)


# -------------------------------------------------------------- optimum


def test_golden_section_on_parabola():
    x, fx, evals = golden_section_max(lambda x: -(x - 0.3) ** 2, 0.0, 1.0, 1e-6)
    assert x == pytest.approx(0.3, abs=1e-6)
    assert evals < 40


@given(st.lists(st.floats(-1, 1), min_size=1, max_size=30))
def test_is_unimodal_matches_definition(values):
    v = np.array(values)
    k = int(np.argmax(v))
    expected = np.all(np.diff(v[:k + 1]) >= 0) and np.all(np.diff(v[k:]) <= 0)
    assert is_unimodal(v, rel_tol=0.0) == bool(expected)


def test_optimum_in_expected_window(strong_coupling):
    opt = find_optimal_pump(strong_coupling, (0.005, 0.5))
    assert opt.status == "golden_section" and opt.entangled
    assert 0.04 <= opt.Lambda <= 0.16
    assert opt.negativity == pytest.approx(steady_negativity(strong_coupling.with_pump(opt.Lambda)))


def test_optimum_matches_fine_grid(strong_coupling):
    opt = find_optimal_pump(strong_coupling, (0.005, 0.5))
    grid = np.linspace(0.005, 0.5, 1000)
    vals = [steady_negativity(strong_coupling.with_pump(x)) for x in grid]
    assert abs(opt.Lambda - grid[int(np.argmax(vals))]) <= grid[1] - grid[0]


def test_no_entanglement_without_coupling():
    opt = find_optimal_pump(SystemParams(1.0, 1.2, 0.0, 0.0), (0.0, 1.0))
    assert opt.status == "no_entanglement" and not opt.entangled
    assert np.isnan(opt.Lambda) and opt.negativity == 0.0


def test_non_unimodal_prescan_uses_grid(monkeypatch, strong_coupling):
    def bumpy(params):
        x = params.Lambda1
        return float(np.exp(-((x - 0.2) / 0.02) ** 2) + 0.5 * np.exp(-((x - 0.6) / 0.05) ** 2))

    monkeypatch.setattr(sweep_mod, "steady_negativity", bumpy)
    opt = find_optimal_pump(strong_coupling, (0.0, 1.0), tol=1e-3)
    assert opt.status == "grid_fallback"
    assert opt.Lambda == pytest.approx(0.2, abs=1e-3)


@pytest.mark.parametrize("bracket", [(0.5, 0.1), (-0.1, 0.2), (0.2, 0.2)])
def test_bad_bracket(strong_coupling, bracket):
    with pytest.raises(ValueError):
        find_optimal_pump(strong_coupling, bracket)

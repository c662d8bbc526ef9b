import io
import math

import numpy as np
import pytest

from shapejc.algebra import HarmonicOscillator, Morse, ScalingChain
from shapejc.errors import GridTooCoarse, MatchFailure, UnsupportedFamily
from shapejc.grid import (
    GridSpec,
    build_single_channel,
    build_two_channel,
    convergence_study,
    default_grid,
    gaussian_probe,
    lowering_matrix,
    shape_invariance_residual,
    verify_spectrum,
    write_states_csv,
)
from shapejc.linalg import eig_symmetric

HO = HarmonicOscillator(mass=1.0, omega=1.0)
MORSE = Morse(v0=25.0, lam=1.0, mass=0.5)
REF_GRID = GridSpec(-2.5, 14.0, 1000)


def lowest(ham, k):
    return eig_symmetric(ham.matrix, select=("index", 0, k - 1)).values


def test_gridspec():
    g = GridSpec(0.0, 1.0, 99)
    assert g.h == pytest.approx(0.01)
    assert g.x[0] == pytest.approx(0.01) and g.x[-1] == pytest.approx(0.99)
    assert g.refine().n_points == 199 and g.refine().h == pytest.approx(0.005)
    with pytest.raises(GridTooCoarse):
        GridSpec(0.0, 1.0, 49)
    with pytest.raises(ValueError):
        GridSpec(1.0, 0.0, 100)


def test_default_grids():
    assert default_grid(MORSE) == GridSpec(-2.0, 7.5, 1000)
    g = default_grid(HO, 4)
    assert g.x_max == pytest.approx(16.0) and g.x_min == -g.x_max


def test_scaling_is_analytic_only():
    fam = ScalingChain(1.0, 0.5)
    with pytest.raises(UnsupportedFamily):
        build_single_channel(fam, 1, REF_GRID)
    with pytest.raises(UnsupportedFamily):
        verify_spectrum(fam, 1.0)


def test_adjoint_is_transpose():
    a = lowering_matrix(MORSE, 1, GridSpec(-2, 7.5, 80))
    ham = build_two_channel(MORSE, 2.0, GridSpec(-2, 7.5, 80))
    np.testing.assert_array_equal(ham.matrix.entries, ham.matrix.entries.T)
    assert ham.matrix.half_bandwidth == 3
    np.testing.assert_allclose(ham.matrix.entries[0::2, 1::2], math.sqrt(2.0) * a)


def test_morse_single_channel_levels():
    grid = default_grid(MORSE, 9)
    vals = lowest(build_single_channel(MORSE, 1, grid), 5)
    target = np.array([0.0, 8.0, 14.0, 18.0, 20.0])
    assert abs(vals[0]) <= 1e-2
    np.testing.assert_allclose(vals[1:], target[1:], rtol=1e-3)


def test_ho_single_channel_ladder():
    vals = lowest(build_single_channel(HO, 1, default_grid(HO, 4)), 4)
    np.testing.assert_allclose(vals, [0, 1, 2, 3], atol=1e-4)


@pytest.mark.parametrize("family", [HO, MORSE])
def test_lower_partner_positive(family):
    grid = default_grid(family)
    vals = lowest(build_single_channel(family, 1, grid), 1)
    assert vals[0] >= -10 * grid.h**2 * family.remainder(1)


def test_partner_isospectrality():
    grid = default_grid(MORSE, 9)
    lower = lowest(build_single_channel(MORSE, 1, grid), 5)
    upper = lowest(build_single_channel(MORSE, 1, grid, partner="upper"), 4)
    np.testing.assert_allclose(upper, lower[1:], rtol=1e-3)


def test_zero_drive_is_union_of_partners():
    grid = GridSpec(-2.0, 7.5, 200)
    two = eig_symmetric(build_two_channel(MORSE, 0.0, grid).matrix).values
    one = np.concatenate([
        eig_symmetric(build_single_channel(MORSE, 1, grid, p).matrix).values for p in ("lower", "upper")
    ])
    np.testing.assert_allclose(two, np.sort(one), atol=1e-10)


def test_two_channel_reference_spectrum():
    report = verify_spectrum(MORSE, 2.0, REF_GRID, refine_check=False)
    assert [lev.label for lev in report.levels] == ["ground", "m=0-", "m=0+", "m=1-", "m=1+"]
    assert report.passes(1e-3)
    assert report.ground_leakage <= 1e-6


def test_ho_strong_drive_contains_jc_ladder():
    report = verify_spectrum(HO, 4.0, n_levels=5, refine_check=False)
    numeric = {lev.label: lev.numeric for lev in report.levels}
    assert numeric["m=0-"] == pytest.approx(-1.0, abs=1e-4)
    assert numeric["ground"] == pytest.approx(0.0, abs=1e-4)
    assert numeric["m=0+"] == pytest.approx(3.0, abs=1e-4)


def test_verify_default_grid_and_ratio():
    report = verify_spectrum(MORSE, 2.0)
    assert report.passes(1e-3)
    assert 3.0 <= report.convergence_ratio <= 5.0


def test_zero_drive_multiplicity():
    report = verify_spectrum(MORSE, 0.0, n_levels=5, refine_check=False)
    num = sorted(lev.numeric for lev in report.levels)
    # each doublet collapses to eps_{m+1}, matched twice to distinct eigenvalues
    assert num[1] == pytest.approx(8.0, rel=1e-3) and num[2] == pytest.approx(8.0, rel=1e-3)
    assert len({lev.numeric for lev in report.levels}) == 5
    assert report.passes(1e-3)


def test_too_many_levels():
    with pytest.raises(MatchFailure, match="9 analytic levels"):
        verify_spectrum(MORSE, 2.0, REF_GRID, n_levels=10)


def test_convergence_study():
    study = convergence_study(MORSE, 2.0, REF_GRID)
    orders = study.tracked_orders()
    assert orders.size > 0
    assert np.all((orders > 1.6) & (orders < 2.4))
    errs = np.array([[lev.abs_error for lev in r.levels] for r in study.reports])
    assert np.all(np.diff(errs, axis=0) < 0)
    leak = [r.ground_leakage for r in study.reports]
    assert leak[0] > leak[1] > leak[2]
    assert [h for h, _ in study.rows] == pytest.approx([REF_GRID.h, REF_GRID.h / 2, REF_GRID.h / 4])


def test_floor_excludes_converged_levels():
    study = convergence_study(MORSE, 2.0, GridSpec(-2.0, 7.5, 300), n_refinements=1, floor=1e-3)
    assert np.isnan(study.orders).any()
    assert study.tracked_orders().size < study.orders.size


def test_domain_doubling_at_fixed_h():
    grid = GridSpec(-2.0, 7.5, 1000)
    wide = GridSpec(-2.0, 17.0, 2001)  # same h, twice the length
    assert wide.h == pytest.approx(grid.h)
    a = verify_spectrum(MORSE, 2.0, grid, n_levels=3, refine_check=False)
    b = verify_spectrum(MORSE, 2.0, wide, n_levels=3, refine_check=False)
    for x, y in zip(a.levels, b.levels):
        assert abs(x.numeric - y.numeric) < x.abs_error + 1e-6


def test_probe():
    g = gaussian_probe(REF_GRID)
    assert np.linalg.norm(g) == pytest.approx(1.0)
    assert max(g[0], g[-1]) < 1e-12


def test_residual_scaling():
    coarse = GridSpec(-10.0, 10.0, 400)
    ratio = shape_invariance_residual(HO, coarse) / shape_invariance_residual(HO, coarse.refine())
    assert 3.0 <= ratio <= 5.0
    morse = shape_invariance_residual(MORSE, GridSpec(-2.0, 7.5, 1000))
    assert morse <= 1e-3
    assert shape_invariance_residual(MORSE, remainder_shift=1.0) == pytest.approx(1.0, abs=1e-2)


def test_states_csv():
    ham = build_single_channel(HO, 1, GridSpec(-8.0, 8.0, 60))
    buf = io.StringIO()
    write_states_csv(ham, buf, k=2)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "x,channel,state_0,state_1"
    assert len(lines) == 61
    col = np.array([float(line.split(",")[2]) for line in lines[1:]])
    assert np.linalg.norm(col) == pytest.approx(1.0, abs=1e-9)

    two = build_two_channel(HO, 1.0, GridSpec(-8.0, 8.0, 60))
    buf = io.StringIO()
    write_states_csv(two, buf, k=1)
    rows = buf.getvalue().splitlines()[1:]
    assert len(rows) == 120 and rows[0].split(",")[1] == "0" and rows[1].split(",")[1] == "1"

"""Density samplers, chamber detection, exact ray limits, piecewise fits."""

from fractions import Fraction as F

import pytest

from util import ideal, module

from reesdensity import (
    FitNotConvergedError,
    InputError,
    LengthLadder,
    cumulative_identity,
    default_grid,
    detect_chambers,
    fit_piecewise,
    ray_extrapolate,
    sample_adic,
    sample_epsilon,
    sample_saturated,
    trapezoid,
    zero_module,
)

M_XY = ideal([(1, 0), (0, 1)])
M_X2_XY = ideal([(2, 0), (1, 1)])
M_SHIFTED = ideal([(2, 0), (1, 1)], shift=-2)
M_X2_Y3 = ideal([(2, 0), (0, 3)])


# -- samplers --------------------------------------------------------------------


def test_adic_values_maximal_ideal():
    grid = sample_adic(M_XY, [F(1, 2), F(3, 2)], (8, 16))
    # x < d1: exactly zero at every n
    assert grid.samples[8][0] == 0
    assert grid.samples[16][0] == 0
    # x = 3/2: value(n, x) = 2*(floor(3n/2)+1)/n
    assert grid.samples[8][1] == F(2 * 13, 8)
    assert grid.samples[16][1] == F(2 * 25, 16)


def test_adic_extrapolated_is_top_of_ladder():
    grid = sample_adic(M_XY, [F(3, 2)], (8, 16))
    assert grid.extrapolated[0] == grid.samples[16][0]
    assert grid.diagnostics[0] == abs(grid.samples[16][0] - grid.samples[8][0])


def test_adic_richardson_removes_first_order_error():
    grid = sample_adic(M_XY, [F(2)], (8, 16), richardson=True)
    # value(n, 2) = 2(2n+1)/n = 4 + 2/n; Richardson cancels the 1/n term
    assert grid.extrapolated[0] == 4


def test_saturated_density_of_maximal_ideal():
    grid = sample_saturated(M_XY, [F(0), F(1, 2), F(1)], (16,))
    # saturation of m^n is the unit ideal: g_n(x) = 2*(floor(xn)+1)/n
    assert grid.samples[16][0] == F(2, 16)
    assert grid.samples[16][1] == F(2 * 9, 16)
    assert grid.samples[16][2] == F(2 * 17, 16)


def test_saturated_support_reaches_negative_degrees():
    grid = sample_saturated(M_SHIFTED, [F(-1)], (8, 16))
    assert grid.samples[8][0] == F(1, 4)
    assert grid.samples[16][0] == F(1, 8)
    assert grid.support[0] == -2


def test_epsilon_is_saturated_minus_adic():
    xs = [F(0), F(1, 2), F(1), F(3, 2)]
    ladder = (8, 16)
    eps = sample_epsilon(M_XY, xs, ladder)
    adic = sample_adic(M_XY, xs, ladder)
    sat = sample_saturated(M_XY, xs, ladder)
    for n in ladder:
        for i in range(len(xs)):
            assert eps.samples[n][i] == sat.samples[n][i] - adic.samples[n][i]


def test_epsilon_of_saturated_module_is_zero():
    m = module({0: [(1, 0)], 1: [(0, 1)]}, (0, 0))
    grid = sample_epsilon(m, [F(0), F(1), F(2)], (4, 8))
    assert all(v == 0 for n in (4, 8) for v in grid.samples[n])


def test_epsilon_support_leak_diagnostic_shrinks():
    small = sample_epsilon(M_X2_XY, [F(3)], (4,))
    big = sample_epsilon(M_X2_XY, [F(3)], (32,))
    assert big.meta["support_leak"] <= small.meta["support_leak"]


def test_sampler_rejects_zero_module():
    z = zero_module(M_XY.ambient)
    with pytest.raises(InputError):
        sample_adic(z, [F(1)], (8,))


def test_sampler_rejects_level_2():
    from reesdensity import power

    with pytest.raises(InputError):
        sample_adic(power(M_XY, 2), None, None)


def test_default_grid_bounds():
    xs = default_grid(M_SHIFTED)
    assert xs[0] == -3      # -c0 - 1
    assert xs[-1] == 2      # d_M + 2
    assert xs[1] - xs[0] == F(1, 8)


# -- chambers --------------------------------------------------------------------


def test_chambers_single_degree():
    dec = detect_chambers(ideal([(2, 0), (1, 1), (0, 2)]))
    assert dec.breakpoints == (2,)
    assert [str(c) for c in dec.chambers] == ["(-inf, 2)", "[2, inf)"]


def test_chambers_two_degrees():
    dec = detect_chambers(M_X2_Y3)
    assert dec.breakpoints == (2, 3)
    assert [str(c) for c in dec.chambers] == ["(-inf, 2)", "(2, 3]", "[3, inf)"]


def test_chambers_read_shifted_degrees():
    m = module({0: [(1, 0)], 1: [(0, 2)]}, (0, 1))
    dec = detect_chambers(m)
    assert dec.breakpoints == (1, 3)


def test_chambers_reject_negative_grading():
    with pytest.raises(InputError):
        detect_chambers(ideal([(1, 0)], shift=-2))


# -- exact limits along rays ---------------------------------------------------------


def test_ray_limit_linear_case():
    table = LengthLadder(M_XY)
    assert ray_extrapolate(table, F(1, 2)) == 0
    assert ray_extrapolate(table, F(5, 4)) == F(5, 2)
    assert ray_extrapolate(table, F(2)) == 4


def test_ray_limit_two_chamber_case():
    table = LengthLadder(M_X2_Y3)
    # 6x - 12 on (2, 3], 2x on [3, oo)
    assert ray_extrapolate(table, F(5, 2)) == 3
    assert ray_extrapolate(table, F(3)) == 6
    assert ray_extrapolate(table, F(7, 2)) == 7


def test_ray_limit_zero_below_support():
    table = LengthLadder(M_X2_Y3)
    assert ray_extrapolate(table, F(3, 2)) == 0


# -- piecewise fits --------------------------------------------------------------------


def test_fit_maximal_ideal_is_2x():
    table = LengthLadder(M_XY)
    grid = sample_adic(M_XY, None, None, table=table)
    fit = fit_piecewise(grid, table=table)
    assert fit.polynomials == ((), (F(0), F(2)))
    assert fit.top_degree == 1
    assert fit.diagnostics["top_degree_expected"] == 1


def test_fit_two_chambers_continuous_at_breakpoint():
    table = LengthLadder(M_X2_Y3)
    grid = sample_adic(M_X2_Y3, None, None, table=table)
    fit = fit_piecewise(grid, table=table)
    assert fit.polynomials == ((), (F(-12), F(6)), (F(0), F(2)))
    assert fit.continuity == (True,)
    assert fit.evaluate(F(3)) == 6
    assert fit.evaluate(F(5, 2)) == 3
    assert fit.evaluate(F(1)) == 0


def test_fit_shifted_module():
    table = LengthLadder(M_SHIFTED)
    grid = sample_adic(M_SHIFTED, None, None, table=table)
    fit = fit_piecewise(grid, table=table)
    assert fit.polynomials == ((), (F(2), F(2)))
    assert fit.chambers[1].lower == 0


def test_fit_not_converged_error_message():
    table = LengthLadder(M_XY)
    grid = sample_adic(M_XY, None, None, table=table)
    with pytest.raises(FitNotConvergedError, match="increase n ladder"):
        fit_piecewise(grid, table=table, h_max=0)


# -- integrals ----------------------------------------------------------------------


def test_trapezoid_exact_for_piecewise_linear():
    xs = [F(0), F(1, 2), F(1)]
    assert trapezoid(xs, [F(0), F(1), F(2)]) == 1


def test_cumulative_identity_linear_case():
    table = LengthLadder(M_XY)
    res = cumulative_identity(M_XY, F(2), ladder=(16, 32), table=table)
    # exact limit: lhs -> 3! * integral contributions = 9; rhs integrates 2x on [1,2]
    assert res["ok"]
    assert abs(res["lhs"] - 9) < F(1, 10)
    assert abs(res["rhs"] - 9) < F(1, 2)


def test_cumulative_identity_off_grid_x_rejected():
    with pytest.raises(InputError):
        cumulative_identity(M_XY, F(1, 3), ladder=(8, 16))

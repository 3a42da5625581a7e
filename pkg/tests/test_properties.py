"""Structural invariants checked on randomized inputs."""

from fractions import Fraction as F
from math import comb

from hypothesis import given, settings, strategies as st

from util import RING_XY, module

from reesdensity import (
    LengthLadder,
    default_grid,
    is_submodule,
    length_component,
    power,
    product,
    sample_adic,
    sample_saturated,
    saturate,
    term_module,
)
from reesdensity.backend import minimalize_exponents
from reesdensity.core import GradedFreeModule

# Exponent vectors in two variables, total degree <= 4.
exponents = st.tuples(st.integers(0, 4), st.integers(0, 4)).filter(
    lambda t: sum(t) <= 4
)


@st.composite
def term_modules(draw, max_rank=2):
    e = draw(st.integers(1, max_rank))
    shifts = tuple(draw(st.integers(-1, 1)) for _ in range(e))
    comps = {}
    for i in range(e):
        gens = draw(st.lists(exponents, min_size=1, max_size=4))
        low = min(sum(g) for g in gens)
        if low + shifts[i] < 0:  # keep every generator in nonnegative degree
            gens = [(g[0] - shifts[i], g[1]) for g in gens]
        comps[i] = gens
    return module(comps, shifts)


@st.composite
def full_rank_ideals(draw):
    gens = draw(st.lists(exponents, min_size=1, max_size=5))
    return module({0: gens}, (0,))


@given(term_modules())
@settings(max_examples=60, deadline=None)
def test_minimalize_idempotent(m):
    for _, gens in m.components:
        once = minimalize_exponents(gens)
        assert minimalize_exponents(once) == once


@given(term_modules(), st.integers(0, 2), st.integers(0, 2))
@settings(max_examples=30, deadline=None)
def test_power_additivity(m, a, b):
    assert product(power(m, a), power(m, b)) == power(m, a + b)


@given(term_modules())
@settings(max_examples=30, deadline=None)
def test_saturation_contains_and_idempotent(m):
    s = saturate(m)
    assert is_submodule(m, s)
    assert saturate(s) == s


@given(full_rank_ideals(), st.integers(1, 3))
@settings(max_examples=25, deadline=None)
def test_power_level_and_component_count(m, n):
    p = power(m, n)
    assert p.level == n
    # rank-one symmetric powers stay rank one
    assert len(p.components) == 1


@given(term_modules(max_rank=2), st.integers(1, 3))
@settings(max_examples=20, deadline=None)
def test_full_rank_power_component_count(m, n):
    p = power(m, n)
    e = m.ambient.rank
    assert len(p.components) == comb(n + e - 1, e - 1)


@given(full_rank_ideals(), st.integers(0, 8))
@settings(max_examples=25, deadline=None)
def test_length_dominated_by_polynomial_count(m, deg):
    # the quotient length never exceeds the ambient graded piece
    ell = length_component(m, deg)
    assert 0 <= ell <= deg + 1


@given(full_rank_ideals(), st.integers(1, 4), st.integers(0, 10))
@settings(max_examples=20, deadline=None)
def test_power_piece_injects_into_next(m, n, deg):
    # multiplying by a fixed minimal generator embeds (M^n)_m in (M^{n+1})_{m+d1}
    d1 = min(m.generator_degrees)
    ladder = LengthLadder(m)
    assert ladder.length(n, deg) <= ladder.length(n + 1, deg + d1)


@given(full_rank_ideals(), st.integers(4, 10))
@settings(max_examples=15, deadline=None)
def test_adic_at_most_saturated(m, n):
    xs = (F(1, 2), F(1), F(3, 2), F(2))
    a = sample_adic(m, xs, [n])
    s = sample_saturated(m, xs, [n])
    for i in range(len(xs)):
        assert a.samples[n][i] <= s.samples[n][i]


@given(full_rank_ideals())
@settings(max_examples=15, deadline=None)
def test_default_grid_covers_support(m):
    xs = default_grid(m)
    assert xs[0] < 0 <= xs[-1]
    assert m.max_degree < xs[-1]
    steps = {b - a for a, b in zip(xs, xs[1:])}
    assert len(steps) == 1 and steps.pop() > 0


@given(term_modules())
@settings(max_examples=30, deadline=None)
def test_canonical_equality_round_trip(m):
    clone = term_module(m.ambient, m.level, [
        (exp, basis)
        for basis, gens in m.components
        for exp in gens
    ])
    assert clone == m


@given(st.lists(exponents, min_size=1, max_size=6))
@settings(max_examples=40, deadline=None)
def test_saturation_of_primary_is_unit(gens):
    # adding both pure powers makes the ideal m-primary, so saturation is (1)
    full = gens + [(5, 0), (0, 5)]
    m = module({0: full}, (0,))
    s = saturate(m)
    assert s.generator_degrees == (0,)


@given(full_rank_ideals(), st.integers(1, 3))
@settings(max_examples=15, deadline=None)
def test_saturated_quotient_is_finite_length(m, n):
    # the quotient census is supported in finitely many degrees; beyond the
    # last one the power and its saturation have equal graded pieces
    ladder = LengthLadder(m)
    total, table = ladder.sat_quotient(n)
    assert total == sum(table.lengths.values())
    assert all(v > 0 for v in table.lengths.values())
    probe = (table.max_degree if table.lengths else ladder.power(n).max_degree) + 1
    for deg in (probe, probe + 3):
        assert ladder.sat_length(n, deg) == ladder.length(n, deg)


def test_ambient_hash_and_equality():
    a = GradedFreeModule(RING_XY, (0, -1))
    b = GradedFreeModule(RING_XY, (0, -1))
    assert a == b
    assert hash(a) == hash(b)

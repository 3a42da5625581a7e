"""Integral-dependence verdicts: certificates, exact disagreement, guards."""

import pytest

from util import ideal, module

from reesdensity import (
    InputError,
    InternalInvariantError,
    NotSubmoduleError,
    PowerCache,
    RankMismatchError,
    check_dependence,
    direct_reduction_search,
    validate_pair,
)
import reesdensity.dependence as dependence

M_SQ = ideal([(2, 0), (1, 1), (0, 2)])
N_CI = ideal([(2, 0), (0, 2)])
N_X2_XY = ideal([(2, 0), (1, 1)])


# -- validation -------------------------------------------------------------------


def test_validate_pair_accepts_rees_pair():
    assert validate_pair(N_CI, M_SQ) == 2


def test_validate_pair_rejects_non_submodule():
    with pytest.raises(NotSubmoduleError):
        validate_pair(ideal([(1, 0)]), ideal([(0, 1)]))


def test_validate_pair_rejects_rank_mismatch():
    sub = module({0: [(1, 0)]}, (0, 0))
    sup = module({0: [(1, 0)], 1: [(0, 1)]}, (0, 0))
    with pytest.raises(RankMismatchError):
        validate_pair(sub, sup)


def test_validate_pair_rejects_level_mismatch():
    from reesdensity import power

    with pytest.raises(InputError):
        validate_pair(power(N_CI, 2), power(M_SQ, 2))


# -- certificate search ------------------------------------------------------------


def test_certificate_for_complete_intersection_inside_square():
    assert direct_reduction_search(N_CI, M_SQ) == 1


def test_certificate_self_is_zero():
    assert direct_reduction_search(M_SQ, M_SQ) == 0


def test_no_certificate_for_x2_xy():
    assert direct_reduction_search(N_X2_XY, M_SQ, 12) is None


def test_certificate_stability_verification():
    assert direct_reduction_search(N_CI, M_SQ, verify_stability=3) == 1


# -- verdicts ----------------------------------------------------------------------


def test_reduction_verdict_with_matching_criteria():
    v = check_dependence(N_CI, M_SQ)
    assert v.verdict == "reduction"
    assert v.certificate == 1
    assert v.c == 3
    assert v.consistent
    for cr in v.criteria:
        assert cr.usable
        assert cr.match is True


def test_not_reduction_via_exact_epsilon_disagreement():
    v = check_dependence(N_X2_XY, M_SQ)
    assert v.verdict == "not-reduction"
    assert v.certificate is None
    eps = next(cr for cr in v.criteria if cr.name == "epsilon")
    assert (eps.left, eps.right) == (1, 4)
    assert "epsilon" in v.diagnostics["mismatches"]


def test_strict_growth_heuristic_labeled_in_detail():
    v = check_dependence(N_X2_XY, M_SQ)
    eps = next(cr for cr in v.criteria if cr.name == "epsilon")
    assert eps.detail["strict_growth_heuristic"] is True


def test_self_pair_is_reduction_at_n0_zero():
    v = check_dependence(M_SQ, M_SQ)
    assert v.verdict == "reduction"
    assert v.certificate == 0
    assert v.diagnostics["same_module"] is True


def test_stand_in_row_present_and_excluded():
    v = check_dependence(N_X2_XY, M_SQ)
    stand_in = next(cr for cr in v.criteria if cr.stand_in)
    assert stand_in.name == "epsilon-truncation"
    assert "stand-in" in stand_in.label
    assert stand_in.match is False
    assert "epsilon-truncation" not in v.diagnostics["mismatches"]


def test_robustness_slope_adds_diagonal_rows_at_next_c():
    v = check_dependence(N_CI, M_SQ, robustness_c=True)
    names = [cr.name for cr in v.criteria]
    assert "diagonal-a+1" in names and "diagonal-s+1" in names
    base = next(cr for cr in v.criteria if cr.name == "diagonal-a")
    extra = next(cr for cr in v.criteria if cr.name == "diagonal-a+1")
    assert extra.detail["c"] == base.detail["c"] + 1
    assert extra.match is True
    plain = check_dependence(N_CI, M_SQ)
    assert "diagonal-a+1" not in [cr.name for cr in plain.criteria]


def test_undetermined_when_certificate_lies_past_n_max():
    # (x^4, y^4) <= (x^4, x^3 y, y^4) is a reduction with certificate n0 = 3;
    # searching only to n0 = 1 misses it while every invariant pair agrees
    sub = ideal([(4, 0), (0, 4)])
    sup = ideal([(4, 0), (3, 1), (0, 4)])
    assert direct_reduction_search(sub, sup, 12) == 3
    v = check_dependence(sub, sup, n_max=1)
    assert v.verdict == "undetermined"
    assert all(cr.match is not False for cr in v.criteria)
    full = check_dependence(sub, sup)
    assert full.verdict == "reduction"
    assert full.certificate == 3


def test_unusable_rows_not_compared():
    v = check_dependence(N_X2_XY, M_SQ, n_max=0, ladder=(1, 2))
    assert v.diagnostics["unusable"]
    for cr in v.criteria:
        if not cr.usable:
            assert cr.match is None


def test_c_override_validated():
    with pytest.raises(InputError):
        check_dependence(N_CI, M_SQ, c=2)


def test_certificate_contradiction_raises_internal_error(monkeypatch):
    real = dependence.epsilon_multiplicity

    def tampered(m, ladder=None, **kwargs):
        rep = real(m, ladder, **kwargs)
        if m == N_CI:
            rep.values = dict(rep.values, exact=rep.values["exact"] + 1)
        return rep

    monkeypatch.setattr(dependence, "epsilon_multiplicity", tampered)
    with pytest.raises(InternalInvariantError):
        check_dependence(N_CI, M_SQ)


def test_shared_cache_reused_across_checks():
    cache = PowerCache()
    check_dependence(N_CI, M_SQ, cache=cache, ladder=tuple(range(1, 9)))
    before = dict(cache._memory)
    check_dependence(N_CI, M_SQ, cache=cache, ladder=tuple(range(1, 9)))
    assert set(before) <= set(cache._memory)

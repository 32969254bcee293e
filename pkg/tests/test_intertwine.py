"""Intertwining operators: recursion, equivariance, inverses, limits, rank."""

import pytest

from sl2contract.exactnum import Scalar, eval_at, gauss
from sl2contract.families import principal_family
from sl2contract.intertwine import (
    alpha,
    alpha_limits,
    apply_intertwiner,
    composition_defect,
    equivariance_defect,
    finite_rank_image,
)
from sl2contract.ladder import DomainError, ModuleElement

from oracles import alpha_t1_oracle

GRID = ("2i", "1+i", "3i/2", "3", "-3", "5/2")


@pytest.mark.parametrize("l_text", GRID)
@pytest.mark.parametrize("k", (0, 1))
def test_alpha_matches_t1_recursion_oracle(l_text, k):
    l = gauss(l_text)
    seq = alpha(l, k, (-10, 10))
    expected = alpha_t1_oracle(l, k, (-10, 10))
    for p in range(-10, 11):
        if expected[p] is None:
            assert not seq[p].den.eval(gauss(1))
        else:
            assert eval_at(seq[p], 1) == expected[p]


def test_alpha_worked_values():
    seq = alpha(gauss(3), 0, (-5, 5))
    assert eval_at(seq[1], 1) == gauss("-1/2")
    assert eval_at(seq[2], 1) == gauss(0)
    seq_i = alpha(gauss("2i"), 0, (-5, 5))
    a1 = eval_at(seq_i[1], 1)
    assert a1 == gauss("-3/5-4/5*i")
    assert a1 * a1.conjugate() == gauss(1)


def test_alpha_normalized_at_origin_for_any_parameters():
    for l_text in GRID:
        for k in (0, 1):
            assert alpha(gauss(l_text), k, (-3, 3))[0] == Scalar.one()


def test_alpha_at_zero_parameter_is_identity():
    for k in (0, 1):
        seq = alpha(gauss(0), k, (-6, 6))
        assert all(seq[p] == Scalar.one() for p in range(-6, 7))


@pytest.mark.parametrize("l_text", GRID)
@pytest.mark.parametrize("k", (0, 1))
def test_alpha_recursion_holds_symbolically(l_text, k):
    assert alpha(gauss(l_text), k, (-12, 12)).recursion_defects() == []


def test_alpha_seam_consistency_with_downward_recursion():
    # the mirrored product for p < 0 must agree with running the defining
    # recursion downward through the p = 0 / p = -1 seam
    for l_text in GRID:
        for k in (0, 1):
            l = gauss(l_text)
            seq = alpha(l, k, (-6, 6))
            acc = Scalar.one()
            for p in range(0, -6, -1):
                m = gauss(2 * p + k - 1)
                num = Scalar.of(TPoly((-l, m)))
                den = Scalar.of(TPoly((l, m)))
                acc = acc * den / num  # alpha_{p-1} = alpha_p * den/num
                assert acc == seq[p - 1], (l_text, k, p - 1)


def test_apply_intertwiner_examples():
    seq = alpha(gauss(3), 0, (-5, 5))
    assert apply_intertwiner(seq, ModuleElement.basis(2), at_t=1).is_zero()
    assert apply_intertwiner(seq, ModuleElement.basis(0)) == ModuleElement.basis(0)
    seq_i = alpha(gauss("2i"), 0, (-5, 5))
    out = apply_intertwiner(seq_i, ModuleElement.basis(1), at_t=1)
    assert out == ModuleElement.basis(1, Scalar.const(gauss("-3/5-4/5*i")))


def test_apply_intertwiner_outside_window():
    seq = alpha(gauss(3), 0, (-2, 2))
    with pytest.raises(DomainError):
        apply_intertwiner(seq, ModuleElement.basis(3))


@pytest.mark.parametrize("l_text", ("2i", "1+i", "3i/2", "5/2"))
@pytest.mark.parametrize("k", (0, 1))
def test_equivariance_defect_empty(l_text, k):
    assert equivariance_defect(gauss(l_text), k, (-10, 10)) == []


def test_equivariance_defect_empty_for_real_integral_l():
    # defined wherever alpha has no pole; the identity holds symbolically
    assert equivariance_defect(gauss(3), 1, (-10, 10)) == []


def test_perturbed_alpha_breaks_equivariance():
    l, k = gauss("2i"), 0
    seq = alpha(l, k, (-3, 3))
    plus = principal_family(l, k)
    minus = principal_family(-l, k)
    perturbed_alpha_1 = seq[1] * Scalar.const(2)
    defect = seq[0] * minus.lower_at(1) - perturbed_alpha_1 * plus.lower_at(1)
    assert not defect.is_zero()


def test_composition_empty_for_nonreal_parameter():
    assert composition_defect(gauss("2i"), 0, (-10, 10)) == []
    assert composition_defect(gauss("1+i"), 1, (-10, 10)) == []


def test_composition_reports_finite_rank_pattern_for_integral_l():
    issues = composition_defect(gauss(3), 0, (-5, 5), at_t=1)
    got = {(i.index, str(i.defect), "vanishes" in i.reason) for i in issues}
    assert got == {(p, "-1", True) for p in (-5, -4, -3, -2, 2, 3, 4, 5)}
    assert all(i.index != 0 for i in issues)


def test_composition_reports_poles_for_negative_integral_l():
    issues = composition_defect(gauss(-3), 0, (-5, 5), at_t=1)
    pole_indices = {i.index for i in issues if i.defect is None}
    assert pole_indices == {-5, -4, -3, -2, 2, 3, 4, 5}
    assert all("pole" in i.reason for i in issues if i.defect is None)


def test_composition_silent_at_zero_parameter():
    assert composition_defect(gauss(0), 1, (-5, 5)) == []


def test_alpha_limits_alternate_signs():
    for l_text in ("2i", "1+i", "3i/2"):
        for k in (0, 1):
            limits = alpha_limits(gauss(l_text), k, (-12, 12))
            for p in range(-12, 13):
                assert limits[p] == gauss((-1) ** abs(p))
    assert alpha_limits(gauss("2i"), 0, (-3, 3))[-3] == gauss(-1)


def test_alpha_limits_at_zero_parameter_are_all_one():
    limits = alpha_limits(gauss(0), 0, (-4, 4))
    assert set(limits.values()) == {gauss(1)}


@pytest.mark.parametrize(
    "l,k,expected",
    [
        (3, 0, {-1, 0, 1}),
        (1, 0, {0}),
        (2, 1, {-1, 0}),
        (5, 0, {-2, -1, 0, 1, 2}),
        (4, 1, {-2, -1, 0, 1}),
    ],
)
def test_finite_rank_image(l, k, expected):
    assert finite_rank_image(gauss(l), k, (-12, 12)) == frozenset(expected)


def test_finite_rank_cardinality_matches_parameter():
    for l in range(1, 9):
        for k in (0, 1):
            if (l + k) % 2 == 0:
                continue
            image = finite_rank_image(gauss(l), k, (-12, 12))
            assert len(image) == l


def test_finite_rank_image_weights_match_finite_module():
    fam = principal_family(gauss(5), 0)
    image = finite_rank_image(gauss(5), 0, (-12, 12))
    weights = sorted(fam.weight_at(p).as_int() for p in image)
    assert weights == [-4, -2, 0, 2, 4]


def test_finite_rank_parity_mismatch_rejected():
    with pytest.raises(DomainError, match="even"):
        finite_rank_image(gauss(2), 0, (-5, 5))
    with pytest.raises(DomainError):
        finite_rank_image(gauss("5/2"), 0, (-5, 5))

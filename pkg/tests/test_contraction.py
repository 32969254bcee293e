"""Contraction endpoint: supports, quotients, splitting, bijection rows."""

import pytest

from sl2contract.contraction import (
    InconsistencyError,
    MackeyDatum,
    SupportDescriptor,
    SupportKind,
    UnclassifiedSupportError,
    bijection_table,
    contract,
    irreducible_quotient,
    mackey_collisions,
    origin_fiber,
    schmid_check,
    split_rees_odd,
    support,
    tempered_sample_specs,
)
from sl2contract.exactnum import Scalar, T, gauss
from sl2contract.families import (
    FamilySpec,
    discrete_family,
    principal_family,
    rees_lambda0_family,
    specialize,
)
from sl2contract.ladder import (
    AffineWeight,
    DomainError,
    IndexSet,
    LadderFamily,
    PolyRule,
    ladder_isomorphic,
)


def test_contract_equals_specialize_at_zero():
    for fam in (principal_family(gauss("1+i"), 1), discrete_family(2, "+")):
        assert contract(fam) == specialize(fam, gauss(0))


def test_contract_makes_generators_commute():
    frozen = contract(principal_family(gauss(3), 0))
    for p in range(-10, 11):
        ef = frozen.raise_at(p).as_gauss() * frozen.lower_at(p + 1).as_gauss()
        fe = frozen.lower_at(p).as_gauss() * frozen.raise_at(p - 1).as_gauss()
        assert ef == fe == gauss(9) / 4


def test_contract_discrete_kills_the_lowering_action():
    frozen = contract(discrete_family(3, "+"))
    for m in range(0, 15):
        assert frozen.lower_at(m).is_zero()
        assert frozen.raise_at(m) == Scalar.one()


def test_contract_rees_one_sided_vanishing():
    frozen = contract(rees_lambda0_family(0))
    for p in range(-10, 0):
        assert frozen.raise_at(p).is_zero()
    for p in range(1, 11):
        assert frozen.lower_at(p).is_zero()


@pytest.mark.parametrize(
    "l_text,expected_c",
    [("3", "9/4"), ("-3", "9/4"), ("2i", "-1"), ("1+i", "i/2"), ("5/2", "25/16")],
)
def test_support_conic_constant(l_text, expected_c):
    frozen = contract(principal_family(gauss(l_text), 0))
    supp = support(frozen, (-20, 20))
    assert supp.kind is SupportKind.CONIC
    assert supp.c == gauss(l_text) * gauss(l_text) / 4 == gauss(expected_c)


def test_support_axes_and_union():
    assert support(contract(discrete_family(1, "+")), (0, 20)).kind is SupportKind.E_AXIS
    assert support(contract(discrete_family(1, "-")), (0, 20)).kind is SupportKind.F_AXIS
    assert (
        support(contract(rees_lambda0_family(0)), (-20, 20)).kind
        is SupportKind.AXIS_UNION
    )


def test_support_requires_contracted_input():
    fam = principal_family(gauss(3), 0)
    with pytest.raises(DomainError):
        support(fam, (-5, 5))
    with pytest.raises(DomainError):
        support(specialize(fam, 1), (-5, 5))


def test_support_origin_for_doubly_killed_module():
    fam = LadderFamily(
        indices=IndexSet.full_line(),
        k=0,
        raise_rule=PolyRule.poly(T),
        lower_rule=PolyRule.poly(T),
        weight_rule=AffineWeight(gauss(0), gauss(-2)),
        up="F",
        label="t-killed",
    )
    assert support(contract(fam), (-5, 5)).kind is SupportKind.ORIGIN


def test_support_unclassified_outside_taxonomy():
    fam = LadderFamily(
        indices=IndexSet.full_line(),
        k=0,
        raise_rule=PolyRule.poly(Scalar.zero(), Scalar.one()),  # raise(p) = p
        lower_rule=PolyRule.poly(Scalar.one()),
        weight_rule=AffineWeight(gauss(0), gauss(-2)),
        up="F",
        label="spectral-spread",
    )
    with pytest.raises(UnclassifiedSupportError):
        support(contract(fam), (1, 6))


def test_quotient_discrete_minimal_ktype():
    for n in range(4):
        frozen = contract(discrete_family(n, "+"))
        supp = support(frozen, (0, 30))
        datum = irreducible_quotient(frozen, supp, (0, 30))
        assert datum.weights == (n + 1,)
        assert datum.label == f"C_{n + 1}"
        frozen = contract(discrete_family(n, "-"))
        datum = irreducible_quotient(frozen, support(frozen, (0, 30)), (0, 30))
        assert datum.weights == (-(n + 1),)


def test_quotient_even_singular_family_is_trivial_line():
    frozen = contract(rees_lambda0_family(0))
    datum = irreducible_quotient(frozen, support(frozen, (-30, 30)), (-30, 30))
    assert datum.weights == (0,)
    assert datum.label == "C_0"


def test_quotient_conic_keeps_whole_module():
    frozen = contract(principal_family(gauss("2i"), 1))
    supp = support(frozen, (-30, 30))
    datum = irreducible_quotient(frozen, supp, (-30, 30))
    assert datum.weights is None and datum.parity == 1
    assert datum.support.c == gauss(-1)


def test_quotient_of_unsplit_odd_rees_sees_both_summands():
    frozen = contract(rees_lambda0_family(1))
    supp = support(frozen, (-30, 30))
    datum = irreducible_quotient(frozen, supp, (-30, 30))
    assert datum.weights == (-1, 1)
    assert datum.label.startswith("reducible")


def test_quotient_zero_is_an_inconsistency():
    fam = LadderFamily(
        indices=IndexSet.full_line(),
        k=0,
        raise_rule=PolyRule.poly(Scalar.zero()),
        lower_rule=PolyRule.poly(Scalar.one()),
        weight_rule=AffineWeight(gauss(0), gauss(-2)),
        up="F",
        label="free-line",
    )
    frozen = contract(fam)
    supp = support(frozen, (-5, 5))
    assert supp.kind is SupportKind.E_AXIS
    with pytest.raises(InconsistencyError):
        irreducible_quotient(frozen, supp, (-5, 5))


def test_origin_fiber_windows_are_stable():
    frozen = contract(rees_lambda0_family(0))
    assert origin_fiber(frozen, (-10, 10)) == [0]
    assert origin_fiber(frozen, (-25, 25)) == [0]


def test_split_rees_odd_halves_match_limit_ladders():
    lower_half, upper_half = split_rees_odd(rees_lambda0_family(1))
    d_plus = discrete_family(0, "+")
    d_minus = discrete_family(0, "-")
    window = (0, 20)
    # the stated closed forms: weights 2m+1, rung products -(m+1)^2 t^2
    for m in range(0, 20):
        assert lower_half.weight_at(-1 - m) == gauss(2 * m + 1)
        assert d_plus.weight_at(m) == gauss(2 * m + 1)
        rung_rees = lower_half.lower_at(-1 - m) * lower_half.raise_at(-2 - m)
        rung_disc = d_plus.raise_at(m) * d_plus.lower_at(m + 1)
        expected = -(T * T) * (m + 1) * (m + 1)
        assert rung_rees == expected == rung_disc
    assert ladder_isomorphic(lower_half, d_plus, window)
    assert ladder_isomorphic(upper_half, d_minus, window)


def test_schmid_check_true_and_window_variant():
    assert schmid_check((0, 40))
    assert schmid_check((0, 10))


def test_schmid_fails_under_perturbation():
    lower_half, _ = split_rees_odd(rees_lambda0_family(1))

    class Perturbed:
        def __init__(self, base):
            self.base = base

        def value_at(self, p):
            v = self.base.value_at(p)
            return v + Scalar.const(gauss("1/10")) if p == -3 else v

        def text(self):
            return f"perturbed({self.base.text()})"

    broken = LadderFamily(
        indices=lower_half.indices,
        k=lower_half.k,
        raise_rule=lower_half.raise_rule,
        lower_rule=Perturbed(lower_half.lower_rule),
        weight_rule=lower_half.weight_rule,
        up=lower_half.up,
        label="perturbed-half",
    )
    assert not ladder_isomorphic(broken, discrete_family(0, "+"), (0, 10))


def test_datum_keys_separate_the_taxonomy():
    conic0 = MackeyDatum(
        SupportDescriptor(SupportKind.CONIC, gauss(-1)), None, 0, "a"
    )
    conic1 = MackeyDatum(
        SupportDescriptor(SupportKind.CONIC, gauss(-1)), None, 1, "b"
    )
    axis = MackeyDatum(SupportDescriptor(SupportKind.E_AXIS), (1,), None, "c")
    assert conic0.key() != conic1.key()
    assert conic0.key() != axis.key()


def test_bijection_rows_and_injectivity():
    rows = bijection_table(tempered_sample_specs())
    by_label = {row.t1_label: row.datum for row in rows}
    assert by_label["D+_2"].weights == (3,)
    assert by_label["D-_2"].weights == (-3,)
    assert by_label["D+_0 (limit)"].weights == (1,)
    assert by_label["P(l=0,k=0)"].weights == (0,)
    conic = by_label["P(l=2*i,k=0)"]
    assert conic.support.kind is SupportKind.CONIC
    assert conic.support.c == gauss(-1) and conic.parity == 0
    assert mackey_collisions(rows) == []
    assert len(rows) == 13


def test_bijection_row_for_odd_rees_splits_into_two():
    rows = bijection_table([FamilySpec(kind="rees_lambda0", k=1)])
    assert [row.t1_label for row in rows] == ["D+_0 (limit)", "D-_0 (limit)"]
    assert rows[0].datum.weights == (1,)
    assert rows[1].datum.weights == (-1,)


def test_bijection_includes_finite_dimensional_labels():
    rows = bijection_table([FamilySpec(kind="finite_dim", l=gauss(3), k=0)])
    assert rows[0].t1_label == "FinDim(l=3,k=0)"
    assert rows[0].datum.support.c == gauss(9) / 4


def test_collision_detection_flags_duplicates():
    rows = bijection_table(
        [
            FamilySpec(kind="discrete", n=0, sign="+"),
            FamilySpec(kind="rees_lambda0", k=1),
        ]
    )
    # the limit row repeats identically (same label), which is not a collision
    assert mackey_collisions(rows) == []
    renamed = [rows[0], rows[1], rows[2]]
    object.__setattr__(renamed[1], "t1_label", "impostor")
    assert mackey_collisions(renamed) == [("D+_0 (limit)", "impostor")]

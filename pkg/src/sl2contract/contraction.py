"""The t = 0 endpoint: motion-group modules, supports and the Mackey table.

At t = 0 the generators E and F commute, so a contracted ladder module is a
module over the polynomial ring in E and F and has a well-defined support
inside s* = Spec C[E, F].  For the ladder modules in scope the support is one
of finitely many candidates:

    origin, the E-axis {F = 0}, the F-axis {E = 0}, the axis union {EF = 0},
    or the conic {EF = c} with c != 0.

``support`` selects a candidate from the annihilation pattern of the two
generator actions and then verifies the candidate's generators annihilate
every window basis vector, so the answer is a proof for ladder modules, not
a heuristic.

The Mackey datum of a contracted module couples the support with the
K-weights of the unique irreducible quotient, computed as the fiber at the
origin: the module modulo the images of E and F.  ``bijection_table``
assembles the resulting correspondence rows between the t = 1 module labels
and their motion-group data.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .exactnum import GaussRational, Scalar, gauss
from .families import (
    FamilySpec,
    build_family,
    discrete_family,
    rees_lambda0_family,
    specialize,
)
from .ladder import (
    DomainError,
    IndexSet,
    LadderFamily,
    Window,
    _e_f_data,
    ladder_isomorphic,
    window_range,
)


class UnclassifiedSupportError(ValueError):
    """The annihilator pattern matches none of the supported loci."""


class InconsistencyError(ValueError):
    """A structural expectation failed (e.g. the quotient computed to zero)."""


class SupportKind(Enum):
    ORIGIN = "origin"
    E_AXIS = "E_axis"          # the locus F = 0
    F_AXIS = "F_axis"          # the locus E = 0
    AXIS_UNION = "axis_union"  # the locus EF = 0
    CONIC = "conic"            # the locus EF = c, c != 0


@dataclass(frozen=True)
class SupportDescriptor:
    kind: SupportKind
    c: GaussRational | None = None

    def __post_init__(self):
        if self.kind is SupportKind.CONIC:
            if self.c is None or not self.c:
                raise InconsistencyError("a conic support needs c != 0")
        elif self.c is not None:
            raise InconsistencyError(f"{self.kind.value} support carries no constant")

    def describe(self) -> str:
        if self.kind is SupportKind.CONIC:
            return f"conic EF = {self.c}"
        return {
            SupportKind.ORIGIN: "origin",
            SupportKind.E_AXIS: "E-axis (F = 0)",
            SupportKind.F_AXIS: "F-axis (E = 0)",
            SupportKind.AXIS_UNION: "axis union (EF = 0)",
        }[self.kind]

    def to_json(self) -> dict:
        out = {"kind": self.kind.value}
        if self.c is not None:
            out["c"] = str(self.c)
        return out


@dataclass(frozen=True)
class MackeyDatum:
    """Motion-group parameter: support plus quotient K-weights.

    A finite support (origin/axis/axis union) carries the finite weight list
    of the irreducible quotient; a conic support carries the whole module,
    described by the parity class of its weights.
    """

    support: SupportDescriptor
    weights: tuple[int, ...] | None
    parity: int | None
    label: str

    def __post_init__(self):
        conic = self.support.kind is SupportKind.CONIC
        if conic and (self.parity is None or self.weights is not None):
            raise InconsistencyError("conic datum carries a parity class only")
        if not conic and (not self.weights or self.parity is not None):
            raise InconsistencyError("non-conic datum needs a nonempty weight list")

    def key(self) -> tuple:
        """Equality key used for the injectivity check of the bijection."""
        if self.support.kind is SupportKind.CONIC:
            return (self.support.kind.value, str(self.support.c), self.parity)
        return (self.support.kind.value, self.weights)

    def to_json(self) -> dict:
        out = {"support": self.support.to_json(), "label": self.label}
        if self.weights is not None:
            out["quotient_weights"] = list(self.weights)
        if self.parity is not None:
            out["parity"] = self.parity
        return out


def contract(fam: LadderFamily) -> LadderFamily:
    """Specialize the family at t = 0, where the E and F actions commute."""
    return specialize(fam, gauss(0))


def _constant_actions(fam: LadderFamily, window: Window):
    """Per-index constant E/F coefficients of a t = 0 module on the window."""
    if fam.at_t != gauss(0):
        raise DomainError("support analysis needs a module contracted at t = 0")
    if not fam.indices.contains_window(window):
        raise DomainError(f"window {window} exceeds {fam.indices.describe()}")
    (se, ce), (sf, cf) = _e_f_data(fam)
    e_vals = {p: ce(p).as_gauss() for p in window_range(window)}
    f_vals = {p: cf(p).as_gauss() for p in window_range(window)}

    def compose(first_vals, second_at, step):
        out = {}
        for p, v in first_vals.items():
            out[p] = v * second_at(p + step).as_gauss() if v else GaussRational(0)
        return out

    ef = compose(f_vals, ce, sf)  # E(F e_p) coefficient on e_p
    fe = compose(e_vals, cf, se)
    return e_vals, f_vals, ef, fe


def support(contracted: LadderFamily, window: Window) -> SupportDescriptor:
    """Classify the annihilator locus of a contracted module in s*."""
    e_vals, f_vals, ef, fe = _constant_actions(contracted, window)
    e_zero = all(not v for v in e_vals.values())
    f_zero = all(not v for v in f_vals.values())
    if e_zero and f_zero:
        return SupportDescriptor(SupportKind.ORIGIN)
    if f_zero:
        return SupportDescriptor(SupportKind.E_AXIS)
    if e_zero:
        return SupportDescriptor(SupportKind.F_AXIS)
    if any(ef[p] != fe[p] for p in ef):
        raise UnclassifiedSupportError(
            f"{contracted.label}: EF and FE disagree at t = 0; not a motion module"
        )
    values = set(ef.values())
    if values == {GaussRational(0)}:
        return SupportDescriptor(SupportKind.AXIS_UNION)
    if len(values) == 1:
        (c,) = values
        return SupportDescriptor(SupportKind.CONIC, c)
    raise UnclassifiedSupportError(
        f"{contracted.label}: EF acts with non-constant spectrum "
        f"{sorted(str(v) for v in values)}; outside the ladder taxonomy"
    )


def origin_fiber(contracted: LadderFamily, window: Window) -> list[int]:
    """Window indices surviving in module / (image of E + image of F)."""
    if contracted.at_t != gauss(0):
        raise DomainError("fiber computation needs a module contracted at t = 0")
    (se, ce), (sf, cf) = _e_f_data(contracted)
    lo, hi = window
    hit: set[int] = set()
    for q in range(lo - 1, hi + 2):
        if q not in contracted.indices:
            continue
        if not ce(q).is_zero():
            hit.add(q + se)
        if not cf(q).is_zero():
            hit.add(q + sf)
    return [p for p in window_range(window) if p in contracted.indices and p not in hit]


def irreducible_quotient(
    contracted: LadderFamily, supp: SupportDescriptor, window: Window = (-40, 40)
) -> MackeyDatum:
    """Mackey datum of the contracted module for the given verified support."""
    if supp.kind is SupportKind.CONIC:
        label = f"M0(conic EF={supp.c}, parity={contracted.k})"
        return MackeyDatum(support=supp, weights=None, parity=contracted.k, label=label)
    lo, hi = window
    lo = lo if contracted.indices.lo is None else max(lo, contracted.indices.lo)
    hi = hi if contracted.indices.hi is None else min(hi, contracted.indices.hi)
    surviving = origin_fiber(contracted, (lo, hi))
    if not surviving:
        raise InconsistencyError(
            f"{contracted.label}: quotient by the generator images is zero"
        )
    weights = tuple(sorted(contracted.weight_at(p).as_int() for p in surviving))
    if len(weights) == 1:
        label = f"C_{weights[0]}"
    else:
        label = "reducible: " + " (+) ".join(f"C_{w}" for w in weights)
    return MackeyDatum(support=supp, weights=weights, parity=None, label=label)


def split_rees_odd(fam: LadderFamily) -> tuple[LadderFamily, LadderFamily]:
    """Split the k = 1 Rees family at its identically-zero rungs.

    Returns (lower half on p <= -1, upper half on p >= 0); the split is valid
    for every t because raise(-1) and lower(0) vanish as rational functions.
    """
    if not fam.raise_rule.value_at(-1).is_zero() or not fam.lower_rule.value_at(0).is_zero():
        raise InconsistencyError(f"{fam.label} does not split at the -1/0 seam")
    lower_half = fam.restrict(IndexSet.at_most(-1), f"{fam.label}[p<=-1]")
    upper_half = fam.restrict(IndexSet.at_least(0), f"{fam.label}[p>=0]")
    return lower_half, upper_half


def schmid_check(window: Window = (0, 40)) -> bool:
    """Verify the t-family splitting of the odd singular principal series.

    The k = 1 Rees family must decompose, symbolically in t, into two
    one-sided ladders matching the two n = 0 limit families rung by rung.
    """
    fam = rees_lambda0_family(1)
    try:
        lower_half, upper_half = split_rees_odd(fam)
    except InconsistencyError:
        return False
    return ladder_isomorphic(lower_half, discrete_family(0, "+"), window) and (
        ladder_isomorphic(upper_half, discrete_family(0, "-"), window)
    )


@dataclass(frozen=True)
class BijectionRow:
    t1_label: str
    family_label: str
    datum: MackeyDatum

    def to_json(self) -> dict:
        return {
            "module": self.t1_label,
            "family": self.family_label,
            "mackey_datum": self.datum.to_json(),
        }


def _t1_label(spec: FamilySpec) -> str:
    if spec.kind == "discrete":
        name = f"D{spec.sign}_{spec.n}"
        return f"{name} (limit)" if spec.n == 0 else name
    if spec.kind == "rees_lambda0":
        return f"P(l=0,k={spec.k})"
    if spec.kind == "finite_dim":
        return f"FinDim(l={spec.l},k={spec.k})"
    return f"P(l={spec.l},k={spec.k})"


def bijection_table(specs: list[FamilySpec], window: Window = (-40, 40)) -> list[BijectionRow]:
    """One correspondence row per irreducible t = 1 module in the list.

    The reducible odd Rees family contributes its two one-sided summands,
    one row each, labeled by the limit modules they specialize to at t = 1.
    """
    rows: list[BijectionRow] = []
    for spec in specs:
        fam, _seeds = build_family(spec)
        if spec.kind == "rees_lambda0" and spec.k == 1:
            lower_half, upper_half = split_rees_odd(fam)
            for half, sign in ((lower_half, "+"), (upper_half, "-")):
                frozen = contract(half)
                supp = support(frozen, _clip_window(half, window))
                datum = irreducible_quotient(frozen, supp, window)
                rows.append(BijectionRow(f"D{sign}_0 (limit)", half.label, datum))
            continue
        frozen = contract(fam)
        supp = support(frozen, _clip_window(fam, window))
        datum = irreducible_quotient(frozen, supp, window)
        rows.append(BijectionRow(_t1_label(spec), fam.label, datum))
    return rows


def _clip_window(fam: LadderFamily, window: Window) -> Window:
    lo, hi = window
    if fam.indices.lo is not None:
        lo = max(lo, fam.indices.lo)
    if fam.indices.hi is not None:
        hi = min(hi, fam.indices.hi)
    return (lo, hi)


def mackey_collisions(rows: list[BijectionRow]) -> list[tuple[str, str]]:
    """Pairs of distinct t = 1 labels sharing a Mackey datum (should be empty)."""
    seen: dict[tuple, str] = {}
    collisions = []
    for row in rows:
        key = row.datum.key()
        if key in seen and seen[key] != row.t1_label:
            collisions.append((seen[key], row.t1_label))
        else:
            seen.setdefault(key, row.t1_label)
    return collisions


def tempered_sample_specs() -> list[FamilySpec]:
    """The sampled correspondence inputs: discrete ladders and limits for
    n <= 3, the even singular family, and imaginary-l principal families."""
    specs: list[FamilySpec] = []
    for n in range(0, 4):
        for sign in ("+", "-"):
            specs.append(FamilySpec(kind="discrete", n=n, sign=sign))
    specs.append(FamilySpec(kind="rees_lambda0", k=0))
    for l_text in ("2i", "4i"):
        for k in (0, 1):
            specs.append(FamilySpec(kind="principal", l=gauss(l_text), k=k))
    return specs

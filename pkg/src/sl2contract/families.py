"""Constructors for the concrete ladder families and their specializations.

Five families are built here, all exact in the deformation parameter t:

* ``principal_family(l, k)``: the full-line family attached to the open
  K-orbit, with rules

      raise(p)  = t*(p + (k+1)/2) - l/2        (F-direction, p -> p+1)
      lower(p)  = t*(1/2 - p - k/2) - l/2      (E-direction, p -> p-1)
      weight(p) = -2p - k

* ``discrete_family(n, sign)``: the one-sided ladders attached to the two
  closed K-orbits.  The holomorphic ladder has basis v_m with E raising,
  H v_m = (n+1+2m) v_m and F v_m = -t^2 m (n+m) v_{m-1}; the antiholomorphic
  ladder is the mirror with weights negated and the E/F roles swapped.

* ``rees_lambda0_family(k)``: the singular l = 0 family in the Rees basis
  w_p = t^{d(p)} e_p, where d(p) = |p| for k = 0 and d(p) = max(p, -p-1) for
  k = 1 is the filtration degree generated by the minimal K-types.

* ``minimal_ktype_family(l, k)``: the principal rules paired with the seed
  indices of the minimal K-types ({0} for k = 0, {0, -1} for k = 1), feeding
  reachability closures at any specialization.

``specialize`` evaluates every coefficient at a numeric t, embedding the
constants back as Scalars so the same verification machinery applies.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exactnum import GaussRational, PoleError, Scalar, T, eval_at, gauss
from .ladder import (
    AffineWeight,
    DomainError,
    IndexSet,
    LadderFamily,
    PolyRule,
)

HALF = GaussRational.parse("1/2")


@dataclass(frozen=True)
class FamilySpec:
    """Parameters selecting one concrete family."""

    kind: str
    l: GaussRational | None = None
    k: int = 0
    n: int | None = None
    sign: str | None = None

    KINDS = ("principal", "discrete", "rees_lambda0", "minimal_ktype", "finite_dim")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise DomainError(f"unknown family kind {self.kind!r}")
        if self.k not in (0, 1):
            raise DomainError("k must be 0 or 1")
        if self.kind in ("principal", "minimal_ktype", "finite_dim"):
            if self.l is None or not self.l:
                raise DomainError(f"{self.kind} requires a nonzero parameter l")
        if self.kind == "finite_dim":
            if not (self.l.is_integer() and self.l.re > 0):
                raise DomainError("finite_dim requires a positive integer l")
            if (self.l.as_int() + self.k) % 2 == 0:
                raise DomainError("finite_dim requires l + k odd")
        if self.kind == "discrete":
            if self.n is None or self.n < 0:
                raise DomainError("discrete requires an integer n >= 0")
            if self.sign not in ("+", "-"):
                raise DomainError("discrete requires sign '+' or '-'")
        if self.kind == "rees_lambda0" and self.l is not None:
            raise DomainError("rees_lambda0 fixes l = 0; do not pass l")

    def label(self) -> str:
        if self.kind == "discrete":
            return f"discrete(n={self.n},sign={self.sign})"
        if self.kind == "rees_lambda0":
            return f"rees_lambda0(k={self.k})"
        return f"{self.kind}(l={self.l},k={self.k})"


def principal_family(l, k: int) -> LadderFamily:
    l = gauss(l)
    if not l:
        raise DomainError(
            "principal_family needs l != 0; the singular l = 0 family is "
            "rees_lambda0_family(k)"
        )
    if k not in (0, 1):
        raise DomainError("k must be 0 or 1")
    half_l = Scalar.const(l / 2)
    raise_rule = PolyRule.poly(T * Scalar.const(HALF * (k + 1)) - half_l, T)
    lower_rule = PolyRule.poly(T * Scalar.const(HALF * (1 - k)) - half_l, -T)
    return LadderFamily(
        indices=IndexSet.full_line(),
        k=k,
        raise_rule=raise_rule,
        lower_rule=lower_rule,
        weight_rule=AffineWeight(gauss(-k), gauss(-2)),
        up="F",
        label=f"principal(l={l},k={k})",
    )


def discrete_family(n: int, sign: str) -> LadderFamily:
    if n < 0:
        raise DomainError("discrete_family needs n >= 0")
    if sign not in ("+", "-"):
        raise DomainError("sign must be '+' (holomorphic) or '-' (antiholomorphic)")
    t2 = T * T
    lower_rule = PolyRule.poly(Scalar.zero(), -t2 * n, -t2)  # -t^2 * m * (n + m)
    raise_rule = PolyRule.poly(Scalar.one())
    k = (n + 1) % 2
    if sign == "+":
        weight = AffineWeight(gauss(n + 1), gauss(2))
        up = "E"
    else:
        weight = AffineWeight(gauss(-(n + 1)), gauss(-2))
        up = "F"
    return LadderFamily(
        indices=IndexSet.at_least(0),
        k=k,
        raise_rule=raise_rule,
        lower_rule=lower_rule,
        weight_rule=weight,
        up=up,
        label=f"discrete(n={n},sign={sign})",
    )


def rees_lambda0_family(k: int) -> LadderFamily:
    if k not in (0, 1):
        raise DomainError("k must be 0 or 1")
    t2 = T * T
    if k == 0:
        raise_rule = PolyRule.piecewise(
            (None, -1, (t2 * HALF, t2)),   # (p + 1/2) t^2 below the seam
            (0, None, (Scalar.const(HALF), Scalar.one())),
        )
        lower_rule = PolyRule.piecewise(
            (None, 0, (Scalar.const(HALF), Scalar.const(-1))),  # 1/2 - p
            (1, None, (t2 * HALF, -t2)),
        )
        weight = AffineWeight(gauss(0), gauss(-2))
    else:
        raise_rule = PolyRule.piecewise(
            (None, -2, (t2, t2)),          # (p + 1) t^2; the seam rung is 0
            (-1, None, (Scalar.one(), Scalar.one())),
        )
        lower_rule = PolyRule.piecewise(
            (None, -1, (Scalar.zero(), Scalar.const(-1))),  # -p
            (0, None, (Scalar.zero(), -t2)),
        )
        weight = AffineWeight(gauss(-1), gauss(-2))
    return LadderFamily(
        indices=IndexSet.full_line(),
        k=k,
        raise_rule=raise_rule,
        lower_rule=lower_rule,
        weight_rule=weight,
        up="F",
        label=f"rees_lambda0(k={k})",
    )


def minimal_ktype_family(l, k: int) -> tuple[LadderFamily, frozenset[int]]:
    """Principal rules together with the minimal K-type seed indices."""
    l = gauss(l)
    base = principal_family(l, k)
    fam = LadderFamily(
        indices=base.indices,
        k=base.k,
        raise_rule=base.raise_rule,
        lower_rule=base.lower_rule,
        weight_rule=base.weight_rule,
        up=base.up,
        label=f"minimal_ktype(l={l},k={k})",
    )
    seeds = frozenset({0}) if k == 0 else frozenset({0, -1})
    return fam, seeds


class _SpecializedRule:
    """Lazy t = tau view of another coefficient rule."""

    __slots__ = ("base", "tau", "name")

    def __init__(self, base, tau: GaussRational, name: str):
        self.base = base
        self.tau = tau
        self.name = name

    def value_at(self, p: int) -> Scalar:
        try:
            return Scalar.const(eval_at(self.base.value_at(p), self.tau))
        except PoleError as exc:
            raise PoleError(
                f"rule {self.name!r} has a pole at t={self.tau} for index {p}",
                at=self.tau,
            ) from exc

    def text(self) -> str:
        return f"({self.base.text()}) at t={self.tau}"


def specialize(fam: LadderFamily, tau) -> LadderFamily:
    """Evaluate every coefficient rule at t = tau."""
    tau = gauss(tau)

    def spec_rule(rule, name: str):
        if isinstance(rule, PolyRule):
            try:
                return rule.specialize(tau)
            except PoleError as exc:
                raise PoleError(
                    f"rule {name!r} of {fam.label} has a pole at t={tau}", at=tau
                ) from exc
        return _SpecializedRule(rule, tau, name)

    return LadderFamily(
        indices=fam.indices,
        k=fam.k,
        raise_rule=spec_rule(fam.raise_rule, "raise"),
        lower_rule=spec_rule(fam.lower_rule, "lower"),
        weight_rule=fam.weight_rule,
        up=fam.up,
        label=f"{fam.label}@t={tau}",
        at_t=tau,
    )


def build_family(spec: FamilySpec) -> tuple[LadderFamily, frozenset[int] | None]:
    """Construct the family selected by a FamilySpec, with seeds if any."""
    if spec.kind == "principal":
        return principal_family(spec.l, spec.k), None
    if spec.kind == "discrete":
        return discrete_family(spec.n, spec.sign), None
    if spec.kind == "rees_lambda0":
        return rees_lambda0_family(spec.k), None
    fam, seeds = minimal_ktype_family(spec.l, spec.k)
    return fam, seeds


def finite_dim_branch(l, k: int, tau) -> bool:
    """Whether specialization at t = tau is the finite-dimensional module.

    True exactly when l/tau is a positive integer of parity opposite to k
    (l/tau + k odd); all other specializations stay the full principal
    series, including the mismatched-parity integral case.
    """
    l = gauss(l)
    tau = gauss(tau)
    if not tau:
        return False
    d = l / tau
    return d.is_integer() and d.re > 0 and (d.as_int() + k) % 2 == 1

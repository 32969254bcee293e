"""Weight-ladder module families and their algebraic verification.

A ladder family presents a one-parameter family of (g_t, K)-modules by an
index set of weight lines together with three coefficient rules:

* ``raise_rule(p)``: coefficient of e_{p+1} in (up generator) . e_p,
* ``lower_rule(p)``: coefficient of e_{p-1} in (down generator) . e_p,
* ``weight_rule(p)``: the H-eigenvalue of e_p.

Which of E, F moves the index up is a property of the family (``up``): the
principal and Rees families are presented with F raising the index, while the
holomorphic half-ladders have E raising it.  All verification routines
(commutator and Casimir residuals) are written against the actual E/F roles,
so both orientations are checked against the same Lie algebra relations

    [H, E] = 2E,   [H, F] = -2F,   [E, F] = t^2 H.

Coefficients are exact rational functions in t; a residual list is empty
exactly when the identity holds symbolically in t on the whole window.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Protocol

from .exactnum import GaussRational, Scalar, T, gauss

Window = tuple[int, int]


class DomainError(ValueError):
    """An index, window or index-set kind outside an operation's domain."""


def window_range(window: Window) -> range:
    lo, hi = window
    if lo > hi:
        raise DomainError(f"empty window {window}")
    return range(lo, hi + 1)


class IndexKind(Enum):
    FULL = "full_line"
    HALF_UP = "half_line_up"      # p >= lo
    HALF_DOWN = "half_line_down"  # p <= hi
    INTERVAL = "interval"


@dataclass(frozen=True)
class IndexSet:
    kind: IndexKind
    lo: int | None = None
    hi: int | None = None

    @classmethod
    def full_line(cls) -> "IndexSet":
        return cls(IndexKind.FULL)

    @classmethod
    def at_least(cls, lo: int) -> "IndexSet":
        return cls(IndexKind.HALF_UP, lo=lo)

    @classmethod
    def at_most(cls, hi: int) -> "IndexSet":
        return cls(IndexKind.HALF_DOWN, hi=hi)

    @classmethod
    def interval(cls, lo: int, hi: int) -> "IndexSet":
        if lo > hi:
            raise DomainError(f"interval [{lo}, {hi}] is empty")
        return cls(IndexKind.INTERVAL, lo=lo, hi=hi)

    def __contains__(self, p: int) -> bool:
        if self.lo is not None and p < self.lo:
            return False
        if self.hi is not None and p > self.hi:
            return False
        return True

    def contains_window(self, window: Window) -> bool:
        lo, hi = window
        return lo in self and hi in self and lo <= hi

    def is_one_sided(self) -> bool:
        return self.kind in (IndexKind.HALF_UP, IndexKind.HALF_DOWN)

    def describe(self) -> str:
        return {
            IndexKind.FULL: "all integers",
            IndexKind.HALF_UP: f"p >= {self.lo}",
            IndexKind.HALF_DOWN: f"p <= {self.hi}",
            IndexKind.INTERVAL: f"{self.lo} <= p <= {self.hi}",
        }[self.kind]


class CoefficientRule(Protocol):
    def value_at(self, p: int) -> Scalar: ...
    def text(self) -> str: ...


class WeightRule(Protocol):
    def value_at(self, p: int) -> GaussRational: ...
    def text(self) -> str: ...


_SIMPLE_TOKEN = re.compile(r"-?\d+(/\d+)?$")


def _poly_text(coeffs: Iterable[object]) -> str:
    parts = []
    for j, c in enumerate(coeffs):
        cs = str(c)
        if cs == "0":
            continue
        if not _SIMPLE_TOKEN.match(cs):
            cs = f"({cs})"
        if j == 0:
            parts.append(cs)
        else:
            var = "p" if j == 1 else f"p^{j}"
            parts.append(var if cs == "1" else f"{cs}*{var}")
    return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class PolyPiece:
    """One branch of a piecewise polynomial rule, valid for lo <= p <= hi."""

    lo: int | None
    hi: int | None
    coeffs: tuple

    def matches(self, p: int) -> bool:
        if self.lo is not None and p < self.lo:
            return False
        if self.hi is not None and p > self.hi:
            return False
        return True

    def range_text(self) -> str:
        if self.lo is None and self.hi is None:
            return "all p"
        if self.lo is None:
            return f"p <= {self.hi}"
        if self.hi is None:
            return f"p >= {self.lo}"
        return f"{self.lo} <= p <= {self.hi}"


@dataclass(frozen=True)
class PolyRule:
    """Piecewise polynomial in the index p with Scalar coefficients."""

    pieces: tuple[PolyPiece, ...]

    @classmethod
    def poly(cls, *coeffs) -> "PolyRule":
        return cls((PolyPiece(None, None, tuple(Scalar._coerce(c) for c in coeffs)),))

    @classmethod
    def piecewise(cls, *pieces: tuple) -> "PolyRule":
        built = tuple(
            PolyPiece(lo, hi, tuple(Scalar._coerce(c) for c in coeffs))
            for (lo, hi, coeffs) in pieces
        )
        return cls(built)

    def value_at(self, p: int) -> Scalar:
        for piece in self.pieces:
            if piece.matches(p):
                acc = Scalar.zero()
                pc = Scalar.const(p)
                for c in reversed(piece.coeffs):
                    acc = acc * pc + c
                return acc
        raise DomainError(f"index {p} outside every piece of the rule")

    def specialize(self, tau: GaussRational) -> "PolyRule":
        from .exactnum import eval_at

        return PolyRule(
            tuple(
                PolyPiece(pc.lo, pc.hi, tuple(Scalar.const(eval_at(c, tau)) for c in pc.coeffs))
                for pc in self.pieces
            )
        )

    def text(self) -> str:
        if len(self.pieces) == 1:
            return _poly_text(self.pieces[0].coeffs)
        return "; ".join(f"{_poly_text(pc.coeffs)} for {pc.range_text()}" for pc in self.pieces)


@dataclass(frozen=True)
class TableRule:
    """Explicit finite coefficient table; escape hatch for custom modules."""

    values: tuple[tuple[int, Scalar], ...]

    @classmethod
    def of(cls, mapping: dict) -> "TableRule":
        return cls(tuple(sorted((p, Scalar._coerce(v)) for p, v in mapping.items())))

    def value_at(self, p: int) -> Scalar:
        for q, v in self.values:
            if q == p:
                return v
        raise DomainError(f"index {p} outside the coefficient table")

    def text(self) -> str:
        return "table{" + ", ".join(f"{p}: {v}" for p, v in self.values) + "}"


@dataclass(frozen=True)
class AffineWeight:
    """Weight rule p -> const + slope * p (always t-free)."""

    const: GaussRational
    slope: GaussRational

    def value_at(self, p: int) -> GaussRational:
        return self.const + self.slope * p

    def text(self) -> str:
        return _poly_text((self.const, self.slope))


@dataclass(frozen=True)
class LadderFamily:
    """One weight line per index, with ladder actions given by the rules."""

    indices: IndexSet
    k: int
    raise_rule: CoefficientRule
    lower_rule: CoefficientRule
    weight_rule: WeightRule
    up: str  # "E" or "F": the generator sending e_p to e_{p+1}
    label: str
    at_t: GaussRational | None = None

    def __post_init__(self):
        if self.up not in ("E", "F"):
            raise DomainError(f"up generator must be 'E' or 'F', got {self.up!r}")
        if self.k not in (0, 1):
            raise DomainError(f"k must be 0 or 1, got {self.k}")
        # actions must stay inside a bounded index set
        if self.indices.hi is not None and not self.raise_rule.value_at(self.indices.hi).is_zero():
            raise DomainError(
                f"{self.label}: raise({self.indices.hi}) must vanish at the top index"
            )
        if self.indices.lo is not None and not self.lower_rule.value_at(self.indices.lo).is_zero():
            raise DomainError(
                f"{self.label}: lower({self.indices.lo}) must vanish at the bottom index"
            )

    # -- coefficient access ------------------------------------------------
    def _check_index(self, p: int):
        if p not in self.indices:
            raise DomainError(f"index {p} outside {self.indices.describe()} of {self.label}")

    def raise_at(self, p: int) -> Scalar:
        self._check_index(p)
        return self.raise_rule.value_at(p)

    def lower_at(self, p: int) -> Scalar:
        self._check_index(p)
        return self.lower_rule.value_at(p)

    def weight_at(self, p: int) -> GaussRational:
        self._check_index(p)
        return self.weight_rule.value_at(p)

    def step_of(self, gen: str) -> int:
        if gen == "H":
            return 0
        if gen not in ("E", "F"):
            raise DomainError(f"unknown generator {gen!r}")
        return 1 if gen == self.up else -1

    def coeff_of(self, gen: str, p: int) -> Scalar:
        """Ladder coefficient of generator `gen` (E or F) acting on e_p."""
        step = self.step_of(gen)
        if step == 1:
            return self.raise_at(p)
        return self.lower_at(p)

    def restrict(self, indices: IndexSet, label: str | None = None) -> "LadderFamily":
        return LadderFamily(
            indices=indices,
            k=self.k,
            raise_rule=self.raise_rule,
            lower_rule=self.lower_rule,
            weight_rule=self.weight_rule,
            up=self.up,
            label=label or f"{self.label}|{indices.describe()}",
            at_t=self.at_t,
        )

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "index_kind": self.indices.describe(),
            "k": self.k,
            "up_generator": self.up,
            "raise": self.raise_rule.text(),
            "lower": self.lower_rule.text(),
            "weight": self.weight_rule.text(),
            "specialized_at": None if self.at_t is None else str(self.at_t),
        }


class ModuleElement:
    """A finite formal combination of basis indices with Scalar coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[int, Scalar] | None = None):
        clean = {}
        if terms:
            for p, c in terms.items():
                c = Scalar._coerce(c)
                if not c.is_zero():
                    clean[p] = c
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):  # pragma: no cover - guard only
        raise AttributeError("ModuleElement is immutable")

    @classmethod
    def basis(cls, p: int, coeff=1) -> "ModuleElement":
        return cls({p: Scalar._coerce(coeff)})

    @classmethod
    def zero(cls) -> "ModuleElement":
        return cls()

    def is_zero(self) -> bool:
        return not self.terms

    def items(self) -> list[tuple[int, Scalar]]:
        return sorted(self.terms.items())

    def coeff(self, p: int) -> Scalar:
        return self.terms.get(p, Scalar.zero())

    def __add__(self, other: "ModuleElement") -> "ModuleElement":
        out = dict(self.terms)
        for p, c in other.terms.items():
            out[p] = out.get(p, Scalar.zero()) + c
        return ModuleElement(out)

    def __sub__(self, other: "ModuleElement") -> "ModuleElement":
        out = dict(self.terms)
        for p, c in other.terms.items():
            out[p] = out.get(p, Scalar.zero()) - c
        return ModuleElement(out)

    def scale(self, c) -> "ModuleElement":
        c = Scalar._coerce(c)
        return ModuleElement({p: v * c for p, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, ModuleElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(tuple(self.items()))

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({c})*e_{p}" for p, c in self.items())

    def __repr__(self):
        return f"ModuleElement({self})"


def apply(fam: LadderFamily, gen: str, elt: ModuleElement) -> ModuleElement:
    """Linear extension of the generator rules to a module element."""
    out: dict[int, Scalar] = {}
    for p, c in elt.terms.items():
        fam._check_index(p)
        if gen == "H":
            target, coeff = p, Scalar.const(fam.weight_at(p))
        else:
            step = fam.step_of(gen)
            coeff = fam.coeff_of(gen, p)
            target = p + step
            if coeff.is_zero():
                continue
        acc = out.get(target, Scalar.zero()) + c * coeff
        out[target] = acc
    return ModuleElement(out)


@dataclass(frozen=True)
class BracketDefect:
    relation: str
    index: int
    defect: Scalar


def _e_f_data(fam: LadderFamily):
    """Step directions and coefficient accessors for E and F."""
    if fam.up == "E":
        return (+1, fam.raise_at), (-1, fam.lower_at)
    return (-1, fam.lower_at), (+1, fam.raise_at)


def _guarded_product(coeff_first: Scalar, second_at, q: int) -> Scalar:
    # composite action through a rung that may exit the index set; the
    # first coefficient vanishing means the whole term does
    if coeff_first.is_zero():
        return Scalar.zero()
    return coeff_first * second_at(q)


def _memo(fn):
    cache: dict[int, object] = {}

    def lookup(p):
        if p not in cache:
            cache[p] = fn(p)
        return cache[p]

    return lookup


def bracket_defect(fam: LadderFamily, window: Window) -> list[BracketDefect]:
    """Residuals of [H,E]-2E, [H,F]+2F, [E,F]-t^2*H on each window index."""
    if window[0] > window[1]:
        return []  # zero module
    if not fam.indices.contains_window(window):
        raise DomainError(f"window {window} exceeds {fam.indices.describe()}")
    (se, raw_e), (sf, raw_f) = _e_f_data(fam)
    ce, cf, w = _memo(raw_e), _memo(raw_f), _memo(fam.weight_at)
    t2 = T * T
    out: list[BracketDefect] = []
    for p in window_range(window):
        w_p = w(p)
        e_p = ce(p)
        f_p = cf(p)
        if not e_p.is_zero():
            he = e_p * Scalar.const(w(p + se) - w_p - 2)
            if not he.is_zero():
                out.append(BracketDefect("[H,E]-2E", p, he))
        if not f_p.is_zero():
            hf = f_p * Scalar.const(w(p + sf) - w_p + 2)
            if not hf.is_zero():
                out.append(BracketDefect("[H,F]+2F", p, hf))
        ef = (
            _guarded_product(f_p, ce, p + sf)
            - _guarded_product(e_p, cf, p + se)
            - t2 * Scalar.const(w_p)
        )
        if not ef.is_zero():
            out.append(BracketDefect("[E,F]-t^2*H", p, ef))
    return out


def casimir_defect(
    fam: LadderFamily, l: GaussRational, window: Window
) -> list[tuple[int, Scalar]]:
    """Residual of (t^2/4)H^2 + (EF+FE)/2 - (l^2 - t^2)/4 on basis vectors."""
    if window[0] > window[1]:
        return []  # zero module
    if not fam.indices.contains_window(window):
        raise DomainError(f"window {window} exceeds {fam.indices.describe()}")
    l = gauss(l)
    quarter = Scalar.const(GaussRational(1, 0) / 4)
    t2_quarter = T * T * quarter
    expected = Scalar.const(l * l) * quarter - t2_quarter
    (se, raw_e), (sf, raw_f) = _e_f_data(fam)
    ce, cf = _memo(raw_e), _memo(raw_f)
    out: list[tuple[int, Scalar]] = []
    for p in window_range(window):
        w = Scalar.const(fam.weight_at(p))
        ef = _guarded_product(cf(p), ce, p + sf)
        fe = _guarded_product(ce(p), cf, p + se)
        residual = t2_quarter * w * w + (ef + fe) / 2 - expected
        if not residual.is_zero():
            out.append((p, residual))
    return out


def generated_submodule(
    fam: LadderFamily, seeds: Iterable[int], window: Window
) -> frozenset[int]:
    """Reachability closure of the seeds under nonzero ladder moves.

    Requires a family specialized at a numeric t, so that every coefficient
    is a constant and "nonzero" is decidable.
    """
    if fam.at_t is None:
        raise DomainError("generated_submodule needs a family specialized at a numeric t")
    seeds = frozenset(seeds)
    lo, hi = window
    for s in seeds:
        if not (lo <= s <= hi):
            raise DomainError(f"seed {s} outside window {window}")
        fam._check_index(s)
    reached = set(seeds)
    frontier = list(seeds)
    while frontier:
        p = frontier.pop()
        up_ok = p + 1 <= hi and (p + 1) in fam.indices and not fam.raise_at(p).is_zero()
        if up_ok and p + 1 not in reached:
            reached.add(p + 1)
            frontier.append(p + 1)
        down_ok = p - 1 >= lo and (p - 1) in fam.indices and not fam.lower_at(p).is_zero()
        if down_ok and p - 1 not in reached:
            reached.add(p - 1)
            frontier.append(p - 1)
    return frozenset(reached)


def _canonical_weight(fam: LadderFamily, m: int) -> GaussRational:
    """Weight at offset m from the closed end of a one-sided ladder."""
    if fam.indices.kind == IndexKind.HALF_UP:
        return fam.weight_at(fam.indices.lo + m)
    return fam.weight_at(fam.indices.hi - m)


def _canonical_rung(fam: LadderFamily, m: int) -> Scalar:
    """Rung product between offsets m and m+1 from the closed end.

    Multiplies the coefficient away from the closed end with the coefficient
    coming back; any diagonal rescaling of the basis leaves this product
    unchanged, which is exactly the gauge freedom being quotiented out.
    """
    if fam.indices.kind == IndexKind.HALF_UP:
        p = fam.indices.lo + m
        return fam.raise_at(p) * fam.lower_at(p + 1)
    p = fam.indices.hi - m
    return fam.lower_at(p) * fam.raise_at(p - 1)


def ladder_isomorphic(a: LadderFamily, b: LadderFamily, window: Window) -> bool:
    """Rescaling-invariant comparison of two one-sided ladders.

    Offsets in `window` count rungs from the closed end of each ladder, so a
    bottom-bounded and a top-bounded ladder can be compared directly.
    """
    for fam in (a, b):
        if not fam.indices.is_one_sided():
            raise DomainError(
                f"{fam.label} is not a one-sided ladder ({fam.indices.describe()})"
            )
    lo, hi = window
    if lo < 0:
        raise DomainError("rung offsets must be nonnegative")
    for m in window_range(window):
        if _canonical_weight(a, m) != _canonical_weight(b, m):
            return False
    for m in range(lo, hi):
        if _canonical_rung(a, m) != _canonical_rung(b, m):
            return False
    return True

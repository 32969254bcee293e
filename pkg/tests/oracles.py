"""Independent oracles used to derive expected values.

Everything here recomputes paper quantities along a different route than the
engine: generator actions by applying differential operators to formal
monomials, discrete-ladder coefficients by commutator recursion, Rees
coefficients by explicit power bookkeeping, and intertwiner values by the
plain arithmetic recursion at t = 1.  Tests freeze values from these oracles
and compare the engine against them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from sl2contract.exactnum import GaussRational, Scalar, T, TPoly, gauss


@dataclass(frozen=True)
class OpTerm:
    """One summand c(t) * z^shift * d^order of a differential operator."""

    coeff: Scalar
    shift: int
    order: int


def apply_operator(terms: list[OpTerm], m: Fraction) -> dict[Fraction, Scalar]:
    """Apply the operator to the formal monomial z^m, exactly."""
    out: dict[Fraction, Scalar] = {}
    for term in terms:
        factor = Fraction(1)
        for j in range(term.order):
            factor *= m - j
        target = m + term.shift - term.order
        value = term.coeff * Scalar.const(factor)
        if value.is_zero():
            continue
        out[target] = out.get(target, Scalar.zero()) + value
    return {e: v for e, v in out.items() if not v.is_zero()}


def e_operator(l: GaussRational) -> list[OpTerm]:
    """t*(-d + 1/(2z)) - l/(2z) as operator terms."""
    return [
        OpTerm(-T, 0, 1),
        OpTerm(Scalar.of(TPoly((-l / 2, Fraction(1, 2)))), -1, 0),
    ]


def f_operator(l: GaussRational) -> list[OpTerm]:
    """t*(z^2 d + z/2) - (l/2) z as operator terms."""
    return [
        OpTerm(T, 2, 1),
        OpTerm(Scalar.of(TPoly((-l / 2, Fraction(1, 2)))), 1, 0),
    ]


def h_operator() -> list[OpTerm]:
    """-2 z d as operator terms."""
    return [OpTerm(Scalar.const(-2), 1, 1)]


def principal_coeff_oracle(l: GaussRational, k: int, p: int) -> dict[str, Scalar]:
    """Ladder coefficients of the generator operators on z^(p + k/2)."""
    m = Fraction(p) + Fraction(k, 2)
    down = apply_operator(e_operator(l), m)
    up = apply_operator(f_operator(l), m)
    diag = apply_operator(h_operator(), m)
    return {
        "lower": down.get(m - 1, Scalar.zero()),
        "raise": up.get(m + 1, Scalar.zero()),
        "weight": diag.get(m, Scalar.zero()),
    }


def discrete_f_oracle(n: int, m: int) -> Scalar:
    """Coefficient g(m) with F . v_m = g(m) v_{m-1} on the E-generated ladder.

    Derived by commuting F through the E-power using [E, F] = t^2 H and
    H v_j = (n + 1 + 2j) v_j: g(m) = g(m-1) - t^2 (n + 2m - 1), g(0) = 0.
    """
    g = Scalar.zero()
    for j in range(1, m + 1):
        g = g - T * T * Scalar.const(n + 2 * j - 1)
    return g


def rees_degree(k: int, p: int) -> int:
    """Filtration degree generated by the minimal K-types."""
    if k == 0:
        return abs(p)
    return max(p, -p - 1)


def rees_coeff_oracle(k: int, p: int) -> dict[str, Scalar]:
    """Rees-basis coefficients from the l = 0 operators and power bookkeeping.

    The conjugated coefficient picks up t^(d(p) - d(p +- 1)); the quotient
    must come out polynomial in t, which is itself a check that the declared
    filtration degrees are the right ones.
    """
    zero = gauss(0)
    m = Fraction(p) + Fraction(k, 2)
    up = apply_operator(f_operator(zero), m).get(m + 1, Scalar.zero())
    down = apply_operator(e_operator(zero), m).get(m - 1, Scalar.zero())
    t = T

    def shift(value: Scalar, d_from: int, d_to: int) -> Scalar:
        out = value
        for _ in range(d_from - d_to):
            out = out * t
        for _ in range(d_to - d_from):
            out = out / t
        return out

    return {
        "raise": shift(up, rees_degree(k, p), rees_degree(k, p + 1)),
        "lower": shift(down, rees_degree(k, p), rees_degree(k, p - 1)),
    }


def alpha_t1_oracle(l: GaussRational, k: int, window: tuple[int, int]):
    """Intertwiner values at t = 1 by the plain recursion; None marks a pole."""
    lo, hi = window
    values: dict[int, GaussRational | None] = {0: gauss(1)}
    for p in range(1, hi + 1):
        prev = values[p - 1]
        den = gauss(2 * p + k - 1) + l
        if prev is None or not den:
            values[p] = None
            continue
        values[p] = (gauss(2 * p + k - 1) - l) / den * prev
    for p in range(-1, lo - 1, -1):
        nxt = values[p + 1]
        num = gauss(2 * (p + 1) + k - 1) - l
        if nxt is None or not num:
            values[p] = None
            continue
        values[p] = (gauss(2 * (p + 1) + k - 1) + l) / num * nxt
    return values


def closure_oracle(fam, seeds, tau: GaussRational, window: tuple[int, int]):
    """Reachability fixpoint from evaluating the symbolic rules at t = tau."""
    from sl2contract.exactnum import eval_at

    lo, hi = window
    reached = set(seeds)
    changed = True
    while changed:
        changed = False
        for p in range(lo, hi + 1):
            if p not in reached or p not in fam.indices:
                continue
            if p + 1 <= hi and p + 1 in fam.indices and p + 1 not in reached:
                if eval_at(fam.raise_at(p), tau):
                    reached.add(p + 1)
                    changed = True
            if p - 1 >= lo and p - 1 in fam.indices and p - 1 not in reached:
                if eval_at(fam.lower_at(p), tau):
                    reached.add(p - 1)
                    changed = True
    return frozenset(reached)

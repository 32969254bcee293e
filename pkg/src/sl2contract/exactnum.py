"""Exact scalar arithmetic: Gaussian rationals, polynomials in t, rational functions in t.

Every coefficient in the engine is a rational function of the contraction
parameter t whose coefficients are Gaussian rationals a + b*i (a, b exact
rationals).  Nothing is approximate and everything is kept in a canonical
form, so equality of values is structural equality of representations.

Normal forms
------------
* ``GaussRational``: both components are ``fractions.Fraction`` values and
  are therefore automatically in lowest terms with positive denominator.
* ``TPoly``: tuple of coefficients indexed by degree; the leading coefficient
  is nonzero and the zero polynomial is the empty tuple.
* ``Scalar``: numerator/denominator pair of ``TPoly`` with gcd a unit and a
  monic denominator.  This representative is unique, so ``==`` and ``hash``
  are exact and cheap.

The textual form of a ``GaussRational`` is ``a/b+c/d*i`` (e.g. ``1/2-3*i``)
and of a ``Scalar`` is ``(p(t))/(q(t))``; both round-trip through the parsers
in this module and are the forms used in all JSON reports.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Union


class PoleError(ArithmeticError):
    """A rational function was evaluated at a root of its denominator."""

    def __init__(self, message: str, at: "GaussRational | None" = None):
        super().__init__(message)
        self.at = at


RationalLike = Union[int, Fraction, "GaussRational"]


class GaussRational:
    """A Gaussian rational a + b*i with exact rational components."""

    __slots__ = ("re", "im")

    def __init__(self, re: int | Fraction = 0, im: int | Fraction = 0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):  # pragma: no cover - guard only
        raise AttributeError("GaussRational is immutable")

    @staticmethod
    def _coerce(value) -> "GaussRational | None":
        if isinstance(value, GaussRational):
            return value
        if isinstance(value, (int, Fraction)):
            return GaussRational(value)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return GaussRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return GaussRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.im == 0 and other.im == 0:
            return GaussRational(self.re * other.re)
        return GaussRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        n = other.re * other.re + other.im * other.im
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussRational(
            (self.re * other.re + self.im * other.im) / n,
            (self.im * other.re - self.re * other.im) / n,
        )

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other / self

    def __neg__(self):
        return GaussRational(-self.re, -self.im)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def conjugate(self) -> "GaussRational":
        return GaussRational(self.re, -self.im)

    def is_rational(self) -> bool:
        return self.im == 0

    def is_integer(self) -> bool:
        return self.im == 0 and self.re.denominator == 1

    def as_int(self) -> int:
        if not self.is_integer():
            raise ValueError(f"{self} is not an integer")
        return int(self.re)

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        imag = f"{self.im}*i"
        if self.re == 0:
            return imag
        if self.im < 0:
            return f"{self.re}-{-self.im}*i"
        return f"{self.re}+{imag}"

    def __repr__(self):
        return f"GaussRational({self.re!r}, {self.im!r})"

    # Accepted shorthand on top of the canonical a/b+c/d*i form: "2i",
    # "3i/2", "1+i", "-i".
    _TERM = re.compile(
        r"(?P<sign>[+-]?)"
        r"(?:(?P<num>\d+)(?:/(?P<den>\d+))?\*?(?P<i1>i)?(?:/(?P<postden>\d+))?"
        r"|(?P<i2>i)(?:/(?P<iden>\d+))?)"
    )

    @classmethod
    def parse(cls, text: str) -> "GaussRational":
        s = text.strip()
        if not s:
            raise ValueError("empty Gaussian rational literal")
        re_part = Fraction(0)
        im_part = Fraction(0)
        pos = 0
        first = True
        while pos < len(s):
            m = cls._TERM.match(s, pos)
            if m is None or m.end() == pos:
                raise ValueError(f"cannot parse {text!r} as a Gaussian rational")
            if not first and m.group("sign") == "":
                raise ValueError(f"missing sign between terms in {text!r}")
            sign = -1 if m.group("sign") == "-" else 1
            if m.group("i2"):
                value = Fraction(1, int(m.group("iden") or 1))
                is_imag = True
            else:
                value = Fraction(int(m.group("num")), int(m.group("den") or 1))
                if m.group("postden"):
                    value /= int(m.group("postden"))
                is_imag = m.group("i1") is not None
            if is_imag:
                im_part += sign * value
            else:
                re_part += sign * value
            pos = m.end()
            first = False
        return cls(re_part, im_part)


ZERO = GaussRational(0)
ONE = GaussRational(1)
I = GaussRational(0, 1)


def gauss(value: RationalLike | str) -> GaussRational:
    """Coerce ints, Fractions and strings to GaussRational."""
    if isinstance(value, GaussRational):
        return value
    if isinstance(value, str):
        return GaussRational.parse(value)
    return GaussRational(value)


class TPoly:
    """A polynomial in t with GaussRational coefficients, trimmed."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [c if isinstance(c, GaussRational) else GaussRational(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):  # pragma: no cover - guard only
        raise AttributeError("TPoly is immutable")

    @classmethod
    def const(cls, c) -> "TPoly":
        return cls((gauss(c),))

    @classmethod
    def zero(cls) -> "TPoly":
        return cls(())

    @classmethod
    def one(cls) -> "TPoly":
        return cls((ONE,))

    @classmethod
    def t(cls) -> "TPoly":
        return cls((ZERO, ONE))

    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int:
        """Degree, with the convention degree(0) = -1."""
        return len(self.coeffs) - 1

    def leading(self) -> GaussRational:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, d: int) -> GaussRational:
        return self.coeffs[d] if 0 <= d < len(self.coeffs) else ZERO

    @staticmethod
    def _coerce(value) -> "TPoly | None":
        if isinstance(value, TPoly):
            return value
        if isinstance(value, (int, Fraction, GaussRational)):
            return TPoly.const(value)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for d, c in enumerate(b):
            out[d] = out[d] + c
        return TPoly(out)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __neg__(self):
        return TPoly(tuple(-c for c in self.coeffs))

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return TPoly.zero()
        if len(other.coeffs) == 1:
            return self.scale(other.coeffs[0])
        if len(self.coeffs) == 1:
            return other.scale(self.coeffs[0])
        out = [ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return TPoly(out)

    __rmul__ = __mul__

    def scale(self, c) -> "TPoly":
        c = gauss(c)
        return TPoly(tuple(a * c for a in self.coeffs))

    def __divmod__(self, other: "TPoly"):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return TPoly.zero(), self
        quot = [ZERO] * (dq + 1)
        inv_lead = ONE / other.leading()
        for k in range(dq, -1, -1):
            c = rem[k + other.degree()] * inv_lead
            quot[k] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] = rem[k + j] - c * b
        return TPoly(quot), TPoly(rem[: other.degree()])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> "TPoly":
        if self.is_zero():
            return self
        return self.scale(ONE / self.leading())

    def gcd(self, other: "TPoly") -> "TPoly":
        """Monic gcd by the Euclidean algorithm (remainders kept monic)."""
        a, b = self, other
        while not b.is_zero():
            a, b = b, (a % b).monic()
        return a.monic()

    def eval(self, tau) -> GaussRational:
        tau = gauss(tau)
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * tau + c
        return acc

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        for d in range(self.degree(), -1, -1):
            c = self.coeffs[d]
            if not c:
                continue
            cs = str(c)
            if c.im != 0:
                cs = f"({cs})"
            if d == 0:
                term = cs
            else:
                var = "t" if d == 1 else f"t^{d}"
                if cs == "1":
                    term = var
                elif cs == "-1":
                    term = f"-{var}"
                else:
                    term = f"{cs}*{var}"
            parts.append(term)
        out = parts[0]
        for term in parts[1:]:
            if term.startswith("-"):
                out += " - " + term[1:]
            else:
                out += " + " + term
        return out

    def __repr__(self):
        return f"TPoly({self})"


class Scalar:
    """A reduced rational function in t; the engine's coefficient field."""

    __slots__ = ("num", "den")

    def __init__(self, num: TPoly, den: TPoly, _reduced: bool = False):
        if not _reduced:
            reduced = normalize(num, den)
            num, den = reduced.num, reduced.den
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):  # pragma: no cover - guard only
        raise AttributeError("Scalar is immutable")

    @classmethod
    def const(cls, c) -> "Scalar":
        return cls(TPoly.const(gauss(c)), TPoly.one(), _reduced=True)

    @classmethod
    def zero(cls) -> "Scalar":
        return cls(TPoly.zero(), TPoly.one(), _reduced=True)

    @classmethod
    def one(cls) -> "Scalar":
        return cls(TPoly.one(), TPoly.one(), _reduced=True)

    @classmethod
    def t(cls) -> "Scalar":
        return cls(TPoly.t(), TPoly.one(), _reduced=True)

    @classmethod
    def of(cls, num, den=None) -> "Scalar":
        num = TPoly._coerce(num)
        den = TPoly.one() if den is None else TPoly._coerce(den)
        return normalize(num, den)

    @staticmethod
    def _coerce(value) -> "Scalar | None":
        if isinstance(value, Scalar):
            return value
        if isinstance(value, TPoly):
            return normalize(value, TPoly.one())
        if isinstance(value, (int, Fraction, GaussRational)):
            return Scalar.const(value)
        return None

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.degree() <= 0 and self.den == TPoly.one()

    def as_gauss(self) -> GaussRational:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant in t")
        return self.num.coeff(0)

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return normalize(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return normalize(self.num * other.den - other.num * self.den, self.den * other.den)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return normalize(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return normalize(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other / self

    def __neg__(self):
        return Scalar(-self.num, self.den, _reduced=True)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __bool__(self):
        return not self.is_zero()

    def __str__(self):
        if self.den == TPoly.one():
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"Scalar({self})"


def normalize(num: TPoly, den: TPoly) -> Scalar:
    """The unique reduced, monic-denominator representative of num/den."""
    num = TPoly._coerce(num)
    den = TPoly._coerce(den)
    if den.is_zero():
        raise ZeroDivisionError("zero denominator")
    if num.is_zero():
        return Scalar(TPoly.zero(), TPoly.one(), _reduced=True)
    # a gcd can only be nontrivial when both sides have positive degree
    if num.degree() > 0 and den.degree() > 0:
        g = num.gcd(den)
        if g.degree() > 0:
            num = num // g
            den = den // g
    lead = den.leading()
    if lead != ONE:
        inv = ONE / lead
        num = num.scale(inv)
        den = den.scale(inv)
    return Scalar(num, den, _reduced=True)


def eval_at(s: Scalar, tau) -> GaussRational:
    """Value of the rational function at t = tau; PoleError at a pole."""
    tau = gauss(tau)
    d = s.den.eval(tau)
    if not d:
        raise PoleError(f"pole of {s} at t={tau}", at=tau)
    return s.num.eval(tau) / d


def limit_at_zero(s: Scalar) -> GaussRational:
    """The t -> 0 limit, defined exactly when the denominator is nonzero at 0."""
    d = s.den.eval(ZERO)
    if not d:
        raise PoleError(f"{s} has a pole at t=0; no finite limit", at=ZERO)
    return s.num.eval(ZERO) / d


T = Scalar.t()

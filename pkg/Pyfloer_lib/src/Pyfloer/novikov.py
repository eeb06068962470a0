# -*- coding: utf-8 -*-
"""
Truncated Novikov field arithmetic.

Elements of the Novikov field are finite sums  sum_i a_i q^{d_i}  with exact
rational exponents d_i and complex floating point coefficients a_i, together
with a truncation order T: every exponent >= T is unknown and has been
discarded.  A truncation of math.inf marks an exact element.

Exponents are fractions.Fraction so that valuations, area gaps and
cancellation of q-powers are exact; only coefficients carry rounding, and
coefficients with magnitude <= ZERO_TOL are cleaned away after every
operation.

Module settings (see configure()):
    ZERO_TOL           -   coefficient magnitude treated as zero (1e-12)
    DEFAULT_PRECISION  -   relative order at which series expansions of exact
                           inputs (invert, log_unit, exp_series) are cut (6)
    LOG_BRANCH         -   integer k; log_unit adds 2*pi*i*k to the principal
                           logarithm of the leading coefficient (0)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, Optional, Tuple, Union

import numpy as np

ZERO_TOL = 1e-12
DEFAULT_PRECISION = Fraction(6)
LOG_BRANCH = 0

Exponent = Fraction
Truncation = Union[Fraction, float]
Scalar = Union[int, float, complex, Fraction]


class NotAUnit(ValueError):
    """Raised when log_unit gets an element of nonzero valuation (or zero)."""


class NegativeValuation(ValueError):
    """Raised when exp_series gets an element of negative valuation."""


def configure(zero_tol: Optional[float] = None,
              default_precision: Optional[Scalar] = None,
              log_branch: Optional[int] = None) -> None:
    """Set the module-wide tolerance, expansion precision and log branch."""
    global ZERO_TOL, DEFAULT_PRECISION, LOG_BRANCH
    if zero_tol is not None:
        if zero_tol < 0:
            raise ValueError(f"zero_tol must be non-negative, got {zero_tol}")
        ZERO_TOL = float(zero_tol)
    if default_precision is not None:
        precision = parse_exponent(default_precision)
        if precision <= 0:
            raise ValueError(f"default_precision must be positive, got {precision}")
        DEFAULT_PRECISION = precision
    if log_branch is not None:
        LOG_BRANCH = int(log_branch)


def parse_exponent(value: Any) -> Fraction:
    """Exact rational from int, Fraction, 'p/q' string or a float with a short decimal."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not exponents")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10 ** 6)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot read exponent from {value!r}")


def parse_truncation(value: Any) -> Truncation:
    if value is None:
        return math.inf
    if isinstance(value, str) and value.strip().lower() in ("inf", "+inf", "infinity"):
        return math.inf
    if isinstance(value, float) and math.isinf(value):
        return math.inf
    return parse_exponent(value)


def format_exponent(value: Truncation) -> str:
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _as_complex(value: Scalar) -> complex:
    if isinstance(value, Fraction):
        return complex(float(value))
    return complex(value)


def _shift(trunc: Truncation, amount: Truncation) -> Truncation:
    if math.isinf(trunc) or math.isinf(amount):
        return math.inf
    return Fraction(trunc) + Fraction(amount)


@dataclass(frozen=True)
class NovikovElement:
    """
    A truncated Novikov series.

    terms       -   tuple of (exponent, coefficient), exponents strictly
                    increasing, every |coefficient| > ZERO_TOL and every
                    exponent < truncation
    truncation  -   Fraction, or math.inf for an exact element
    """

    terms: Tuple[Tuple[Fraction, complex], ...] = ()
    truncation: Truncation = math.inf

    # -- construction ---------------------------------------------------

    @classmethod
    def build(cls, pairs: Iterable[Tuple[Any, Scalar]], truncation: Any = math.inf) -> "NovikovElement":
        """Normalize (exponent, coefficient) pairs: merge, clean, sort and cut at truncation."""
        trunc = parse_truncation(truncation)
        merged: Dict[Fraction, complex] = {}
        for exp, coef in pairs:
            e = parse_exponent(exp)
            if e >= trunc:
                continue
            merged[e] = merged.get(e, 0j) + _as_complex(coef)
        terms = tuple((e, merged[e]) for e in sorted(merged) if abs(merged[e]) > ZERO_TOL)
        return cls(terms, trunc)

    @classmethod
    def zero(cls, truncation: Any = math.inf) -> "NovikovElement":
        return cls((), parse_truncation(truncation))

    @classmethod
    def one(cls, truncation: Any = math.inf) -> "NovikovElement":
        return cls.build([(0, 1)], truncation)

    @classmethod
    def coerce(cls, value: Union["NovikovElement", Scalar]) -> "NovikovElement":
        if isinstance(value, NovikovElement):
            return value
        return cls.build([(0, value)])

    # -- inspection -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def leading(self) -> Tuple[Fraction, complex]:
        if not self.terms:
            raise ValueError("zero element has no leading term")
        return self.terms[0]

    def coefficient(self, exponent: Any) -> complex:
        e = parse_exponent(exponent)
        for exp, coef in self.terms:
            if exp == e:
                return coef
        return 0j

    def exponents(self) -> Tuple[Fraction, ...]:
        return tuple(e for e, _ in self.terms)

    def abs_sum(self) -> float:
        """Sum of coefficient magnitudes; bounds every evaluation of the series with |q| <= 1."""
        return float(sum(abs(c) for _, c in self.terms))

    def known_order(self) -> Truncation:
        """Valuation if nonzero, else the truncation: the element is known to vanish below this order."""
        return self.terms[0][0] if self.terms else self.truncation

    # -- arithmetic -----------------------------------------------------

    def __neg__(self) -> "NovikovElement":
        return NovikovElement(tuple((e, -c) for e, c in self.terms), self.truncation)

    def __add__(self, other: Union["NovikovElement", Scalar]) -> "NovikovElement":
        other = NovikovElement.coerce(other)
        trunc = min(self.truncation, other.truncation)
        return NovikovElement.build(list(self.terms) + list(other.terms), trunc)

    __radd__ = __add__

    def __sub__(self, other: Union["NovikovElement", Scalar]) -> "NovikovElement":
        return self + (-NovikovElement.coerce(other))

    def __rsub__(self, other: Union["NovikovElement", Scalar]) -> "NovikovElement":
        return NovikovElement.coerce(other) - self

    def __mul__(self, other: Union["NovikovElement", Scalar]) -> "NovikovElement":
        if not isinstance(other, NovikovElement):
            factor = _as_complex(other)
            if factor == 0:
                return NovikovElement.zero(self.truncation)
            return NovikovElement.build([(e, c * factor) for e, c in self.terms], self.truncation)
        # trunc(ab) = min(trunc(a) + val(b), trunc(b) + val(a)), zero operands count by truncation
        trunc = min(_shift(self.truncation, other.known_order()),
                    _shift(other.truncation, self.known_order()))
        pairs = [(ea + eb, ca * cb) for ea, ca in self.terms for eb, cb in other.terms]
        return NovikovElement.build(pairs, trunc)

    __rmul__ = __mul__

    def __truediv__(self, other: Union["NovikovElement", Scalar]) -> "NovikovElement":
        if isinstance(other, NovikovElement):
            return self * invert(other)
        factor = _as_complex(other)
        if factor == 0:
            raise ZeroDivisionError("division of a Novikov element by zero")
        return self * (1 / factor)

    def __pow__(self, power: int) -> "NovikovElement":
        if not isinstance(power, int) or power < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = NovikovElement.one()
        base = self
        while power:
            if power & 1:
                result = result * base
            base = base * base
            power >>= 1
        return result

    def shift(self, exponent: Any) -> "NovikovElement":
        """Multiply by q^exponent."""
        e = parse_exponent(exponent)
        return NovikovElement(tuple((x + e, c) for x, c in self.terms), _shift(self.truncation, e))

    # -- presentation ---------------------------------------------------

    def __repr__(self) -> str:
        if not self.terms:
            body = "0"
        else:
            body = " + ".join(f"({_format_coef(c)})q^{format_exponent(e)}" for e, c in self.terms)
        if math.isinf(self.truncation):
            return f"NovikovElement[{body}]"
        return f"NovikovElement[{body} + O(q^{format_exponent(self.truncation)})]"

    def to_json(self) -> Dict[str, Any]:
        return {
            "terms": [{"exp": format_exponent(e), "re": c.real, "im": c.imag} for e, c in self.terms],
            "trunc": format_exponent(self.truncation),
        }

    @classmethod
    def from_json(cls, data: Any) -> "NovikovElement":
        """Read {"terms": [...], "trunc": ...}; a bare term list or a plain number is also accepted."""
        if isinstance(data, (int, float, complex)) and not isinstance(data, bool):
            return cls.build([(0, data)])
        if isinstance(data, list):
            data = {"terms": data, "trunc": "inf"}
        if not isinstance(data, dict) or "terms" not in data:
            raise ValueError(f"not a Novikov element: {data!r}")
        pairs = []
        for k, term in enumerate(data["terms"]):
            try:
                pairs.append((parse_exponent(term["exp"]),
                              complex(float(term.get("re", 0.0)), float(term.get("im", 0.0)))))
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"term {k}: {exc}") from exc
        return cls.build(pairs, parse_truncation(data.get("trunc", "inf")))


def _format_coef(c: complex) -> str:
    if abs(c.imag) <= ZERO_TOL:
        return f"{c.real:.6g}"
    if abs(c.real) <= ZERO_TOL:
        return f"{c.imag:.6g}j"
    return f"{c.real:.6g}{c.imag:+.6g}j"


# ---------------------------------------------------------------------------
# functional interface


def monomial(coefficient: Scalar, exponent: Any = 0, truncation: Any = math.inf) -> NovikovElement:
    """coefficient * q^exponent"""
    return NovikovElement.build([(exponent, coefficient)], truncation)


def val_q(a: NovikovElement) -> Truncation:
    """q-valuation: minimal exponent with nonzero coefficient, math.inf for zero."""
    return a.terms[0][0] if a.terms else math.inf


def add(a: NovikovElement, b: NovikovElement) -> NovikovElement:
    return a + b


def mul(a: NovikovElement, b: NovikovElement) -> NovikovElement:
    return a * b


def scale(a: NovikovElement, factor: Scalar) -> NovikovElement:
    return a * factor


def truncate(a: NovikovElement, order: Any) -> NovikovElement:
    """Drop terms with exponent >= order and set truncation = min(old, order)."""
    t = parse_truncation(order)
    if t >= a.truncation:
        return a
    return NovikovElement(tuple((e, c) for e, c in a.terms if e < t), t)


def _relative_precision(a: NovikovElement, rest: NovikovElement) -> Truncation:
    """Relative order to which a = c q^v (1 + rest) is known."""
    v = a.terms[0][0]
    if not math.isinf(a.truncation):
        return Fraction(a.truncation) - v
    if rest.is_zero():
        return math.inf
    return DEFAULT_PRECISION


def _unit_split(a: NovikovElement) -> Tuple[Fraction, complex, NovikovElement, Truncation]:
    """Write a = c q^v (1 + eps) with val(eps) > 0; returns (v, c, eps, relative precision)."""
    v, c = a.terms[0]
    rest = NovikovElement.build([(e - v, coef / c) for e, coef in a.terms[1:]])
    rel = _relative_precision(a, rest)
    return v, c, truncate(rest, rel), rel


def _series(eps: NovikovElement, coefficients, rel: Truncation) -> NovikovElement:
    """sum_k coefficients(k) eps^k for k >= 0, cut at relative order rel."""
    total = NovikovElement.zero(rel)
    if eps.is_zero():
        return total + coefficients(0)
    step = val_q(eps)
    k_max = int(math.floor(Fraction(rel) / step)) + 1 if not math.isinf(rel) else 0
    power = NovikovElement.one(rel)
    for k in range(k_max + 1):
        coef = coefficients(k)
        if coef != 0:
            total = total + power * coef
        power = truncate(power * eps, rel)
        if power.is_zero():
            break
    return truncate(total, rel)


def invert(a: NovikovElement) -> NovikovElement:
    """
    Multiplicative inverse up to truncation.

    a = c q^v (1 + eps) is inverted as c^{-1} q^{-v} sum_k (-eps)^k; the result
    is known to order trunc(a) - 2v.
    """
    if a.is_zero():
        raise ZeroDivisionError("zero Novikov element is not invertible")
    v, c, eps, rel = _unit_split(a)
    inverse = _series(eps, lambda k: (-1) ** k, rel)
    return (inverse * (1 / c)).shift(-v)


def log_unit(a: NovikovElement, branch: Optional[int] = None) -> NovikovElement:
    """
    Logarithm of a unit (valuation zero).

    Log(c) + 2 pi i k + sum_{k>=1} (-1)^{k+1} eps^k / k  for a = c (1 + eps),
    Log the principal complex logarithm and k the configured branch.
    """
    if a.is_zero():
        raise NotAUnit("zero is not a unit")
    v, c, eps, rel = _unit_split(a)
    if v != 0:
        raise NotAUnit(f"valuation {format_exponent(v)} is not zero")
    k = LOG_BRANCH if branch is None else int(branch)
    lead = complex(np.log(complex(c))) + 2j * math.pi * k
    mercator = _series(eps, lambda j: 0 if j == 0 else (-1) ** (j + 1) / j, rel)
    return mercator + monomial(lead, 0, mercator.truncation)


def exp_series(a: NovikovElement) -> NovikovElement:
    """exp(a0) * sum_k rest^k / k!  where a0 is the q^0 coefficient of a."""
    if a.is_zero():
        return NovikovElement.one(a.truncation)
    if val_q(a) < 0:
        raise NegativeValuation(f"exp_series needs valuation >= 0, got {format_exponent(val_q(a))}")
    a0 = a.coefficient(0)
    rest = NovikovElement.build([(e, c) for e, c in a.terms if e != 0], a.truncation)
    if not math.isinf(a.truncation):
        rel = a.truncation
    elif rest.is_zero():
        rel = math.inf
    else:
        rel = DEFAULT_PRECISION
    series = _series(truncate(rest, rel), lambda k: 1 / math.factorial(k), rel)
    return series * complex(np.exp(complex(a0)))


def nearly_equal(a: NovikovElement, b: NovikovElement, tol: Optional[float] = None,
                 below: Any = None) -> bool:
    """Coefficient-wise comparison of a - b below the common truncation (and below `below`)."""
    tol = ZERO_TOL if tol is None else tol
    diff = a - b
    limit = diff.truncation if below is None else min(diff.truncation, parse_truncation(below))
    return all(abs(c) <= tol for e, c in diff.terms if e < limit)


def max_abs_difference(a: NovikovElement, b: NovikovElement) -> float:
    diff = a - b
    return max((abs(c) for _, c in diff.terms), default=0.0)

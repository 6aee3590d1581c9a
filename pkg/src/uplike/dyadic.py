"""Exact dyadic rationals ``p / 2**q``."""

from __future__ import annotations

import functools
import re
from fractions import Fraction
from numbers import Rational

from .errors import DyadicOverflowError

_EXPONENT_CAP = 4096


def exponent_cap() -> int:
    return _EXPONENT_CAP


def set_exponent_cap(cap: int) -> int:
    """Set the largest admissible exponent; returns the previous cap."""
    global _EXPONENT_CAP
    if cap < 0:
        raise ValueError("exponent cap must be nonnegative")
    previous, _EXPONENT_CAP = _EXPONENT_CAP, int(cap)
    return previous


def check_exponent(exponent: int) -> None:
    if exponent > _EXPONENT_CAP:
        raise DyadicOverflowError(
            f"dyadic exponent {exponent} exceeds cap {_EXPONENT_CAP}"
        )


def _trailing_zeros(n: int) -> int:
    return (n & -n).bit_length() - 1


def reduce_pair(numerator: int, exponent: int) -> tuple[int, int]:
    """Canonical ``(numerator, exponent)``: no common factor of two, zero has exponent 0."""
    if numerator == 0:
        return 0, 0
    k = min(_trailing_zeros(numerator), exponent)
    return numerator >> k, exponent - k


_TEXT = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(?:2\s*\^\s*(\d+)|(\d+)))?\s*$")


@functools.total_ordering
class DyadicRational:
    """Immutable number ``numerator / 2**exponent`` in canonical form."""

    __slots__ = ("_n", "_e")

    def __init__(self, numerator: int = 0, exponent: int = 0):
        if not isinstance(numerator, int) or not isinstance(exponent, int):
            raise TypeError("numerator and exponent must be integers")
        if exponent < 0:
            raise ValueError("exponent must be nonnegative")
        n, e = reduce_pair(numerator, exponent)
        check_exponent(e)
        object.__setattr__(self, "_n", n)
        object.__setattr__(self, "_e", e)

    def __setattr__(self, name, value):
        raise AttributeError("DyadicRational is immutable")

    @property
    def numerator(self) -> int:
        return self._n

    @property
    def exponent(self) -> int:
        return self._e

    @classmethod
    def coerce(cls, value) -> "DyadicRational":
        """Convert ints, floats, dyadic Fractions and ``p/2^q`` strings."""
        if isinstance(value, DyadicRational):
            return value
        if isinstance(value, bool):
            raise TypeError("bool is not a coefficient")
        if isinstance(value, int):
            return cls(value, 0)
        if isinstance(value, str):
            return cls.parse(value)
        if isinstance(value, float):
            value = Fraction(value)
        if isinstance(value, Rational):
            den = value.denominator
            if den & (den - 1):
                raise ValueError(f"{value} is not a dyadic rational")
            return cls(int(value.numerator), den.bit_length() - 1)
        raise TypeError(f"cannot convert {type(value).__name__} to DyadicRational")

    @classmethod
    def parse(cls, text: str) -> "DyadicRational":
        m = _TEXT.match(text)
        if not m:
            raise ValueError(f"not a dyadic literal: {text!r}")
        num = int(m.group(1))
        if m.group(2) is not None:
            return cls(num, int(m.group(2)))
        if m.group(3) is not None:
            return cls.coerce(Fraction(num, int(m.group(3))))
        return cls(num, 0)

    def as_fraction(self) -> Fraction:
        return Fraction(self._n, 1 << self._e)

    def halve(self) -> "DyadicRational":
        return DyadicRational(self._n, self._e + 1)

    def _align(self, other: "DyadicRational") -> tuple[int, int, int]:
        e = max(self._e, other._e)
        return self._n << (e - self._e), other._n << (e - other._e), e

    def __add__(self, other):
        try:
            other = DyadicRational.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        a, b, e = self._align(other)
        return DyadicRational(a + b, e)

    __radd__ = __add__

    def __neg__(self):
        return DyadicRational(-self._n, self._e)

    def __pos__(self):
        return self

    def __abs__(self):
        return DyadicRational(abs(self._n), self._e)

    def __sub__(self, other):
        try:
            other = DyadicRational.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            other = DyadicRational.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return DyadicRational(self._n * other._n, self._e + other._e)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, DyadicRational):
            return self._n == other._n and self._e == other._e
        if isinstance(other, (int, Rational)) and not isinstance(other, bool):
            return self.as_fraction() == other
        if isinstance(other, float):
            return self.as_fraction() == other
        return NotImplemented

    def __lt__(self, other):
        if isinstance(other, DyadicRational):
            a, b, _ = self._align(other)
            return a < b
        if isinstance(other, (int, float, Rational)):
            return self.as_fraction() < other
        return NotImplemented

    def __hash__(self):
        return hash(self.as_fraction())

    def __float__(self):
        return self._n / (1 << self._e)

    def __bool__(self):
        return self._n != 0

    def __repr__(self):
        return f"DyadicRational({self._n}, {self._e})"

    def __str__(self):
        if self._e == 0:
            return str(self._n)
        return f"{self._n}/2^{self._e}"


ZERO = DyadicRational(0)
ONE = DyadicRational(1)
HALF = DyadicRational(1, 1)


def format_rational(x) -> str:
    """``p/2^q`` for dyadic values, ``p/q`` for other rationals, ``p`` for integers."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    den = x.denominator
    if den & (den - 1) == 0:
        return f"{x.numerator}/2^{den.bit_length() - 1}"
    return f"{x.numerator}/{den}"


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    m = re.fullmatch(r"([+-]?\d+)\s*/\s*2\s*\^\s*(\d+)", text)
    if m:
        return Fraction(int(m.group(1)), 1 << int(m.group(2)))
    return Fraction(text)

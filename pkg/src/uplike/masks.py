"""Masks (Laurent-polynomial symbols) with exact dyadic coefficients.

A :class:`Mask` is held as integer coefficients over a common power of two,
``a(alpha) = ints[alpha] / 2**shift``, which keeps products and coset sums in
plain integer arithmetic.
"""

from __future__ import annotations

import functools
import heapq
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as _cartesian

import numpy as np

from .dyadic import DyadicRational, check_exponent
from .errors import DimensionMismatch, NotDivisible

Index = tuple[int, ...]
Direction = tuple[int, ...]


def _key(alpha, dim: int | None) -> Index:
    if isinstance(alpha, (int, np.integer)):
        alpha = (int(alpha),)
    alpha = tuple(int(x) for x in alpha)
    if dim is not None and len(alpha) != dim:
        raise DimensionMismatch(f"index {alpha} does not have dimension {dim}")
    return alpha


class Mask:
    """Finitely supported map ``Z^d -> dyadic rationals``.

    Construct from a mapping ``{index: coefficient}``; integer keys are
    accepted for ``d = 1``. Coefficients may be ints, dyadic
    ``Fraction``/``float`` values, :class:`DyadicRational` or ``"p/2^q"``
    strings. Zero coefficients are dropped.
    """

    __slots__ = ("_dim", "_ints", "_shift", "_hash")

    def __init__(self, coefficients: Mapping = None, dim: int | None = None):
        coefficients = coefficients or {}
        items = []
        for alpha, value in coefficients.items():
            alpha = _key(alpha, dim)
            if dim is None:
                dim = len(alpha)
            items.append((alpha, DyadicRational.coerce(value)))
        if dim is None:
            raise ValueError("dimension of an empty mask must be given")
        shift = max((c.exponent for _, c in items), default=0)
        ints: dict[Index, int] = {}
        for alpha, c in items:
            v = ints.get(alpha, 0) + (c.numerator << (shift - c.exponent))
            ints[alpha] = v
        self._init(dim, ints, shift)

    def _init(self, dim: int, ints: dict, shift: int) -> None:
        if dim < 1:
            raise ValueError("dimension must be positive")
        ints = {k: v for k, v in ints.items() if v}
        if ints and shift > 0:
            g = 0
            for v in ints.values():
                g |= v
                if g & 1:
                    break
            tz = (g & -g).bit_length() - 1
            k = min(tz, shift)
            if k:
                ints = {a: v >> k for a, v in ints.items()}
                shift -= k
        elif not ints:
            shift = 0
        if shift < 0:
            k = -shift
            ints = {a: v << k for a, v in ints.items()}
            shift = 0
        check_exponent(shift)
        self._dim = dim
        self._ints = ints
        self._shift = shift
        self._hash = None

    @classmethod
    def from_integers(cls, ints: Mapping, shift: int = 0, dim: int | None = None) -> "Mask":
        """Mask with coefficients ``ints[alpha] / 2**shift``."""
        out = cls.__new__(cls)
        if dim is None:
            if not ints:
                raise ValueError("dimension of an empty mask must be given")
            dim = len(_key(next(iter(ints)), None))
        out._init(dim, {_key(a, dim): int(v) for a, v in ints.items()}, int(shift))
        return out

    @classmethod
    def delta(cls, dim: int) -> "Mask":
        return cls.from_integers({(0,) * dim: 1}, 0, dim)

    @classmethod
    def zero(cls, dim: int) -> "Mask":
        return cls.from_integers({}, 0, dim)

    # -- accessors ----------------------------------------------------------

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def shift(self) -> int:
        return self._shift

    @property
    def integer_coefficients(self) -> dict[Index, int]:
        return dict(self._ints)

    @property
    def support(self) -> tuple[Index, ...]:
        return tuple(sorted(self._ints))

    def items(self):
        """``(index, DyadicRational)`` pairs in lexicographic index order."""
        for alpha in sorted(self._ints):
            yield alpha, DyadicRational(self._ints[alpha], self._shift)

    def __getitem__(self, alpha) -> DyadicRational:
        return DyadicRational(self._ints.get(_key(alpha, self._dim), 0), self._shift)

    def __len__(self) -> int:
        return len(self._ints)

    def __bool__(self) -> bool:
        return bool(self._ints)

    def is_zero(self) -> bool:
        return not self._ints

    def lower(self) -> Index:
        if not self._ints:
            raise ValueError("zero mask has no support")
        return tuple(min(a[i] for a in self._ints) for i in range(self._dim))

    def upper(self) -> Index:
        if not self._ints:
            raise ValueError("zero mask has no support")
        return tuple(max(a[i] for a in self._ints) for i in range(self._dim))

    def total(self) -> DyadicRational:
        return DyadicRational(sum(self._ints.values()), self._shift)

    def __eq__(self, other):
        if not isinstance(other, Mask):
            return NotImplemented
        return (
            self._dim == other._dim
            and self._shift == other._shift
            and self._ints == other._ints
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._dim, self._shift, frozenset(self._ints.items())))
        return self._hash

    def __repr__(self):
        body = ", ".join(
            f"{a[0] if self._dim == 1 else a}: {c}" for a, c in self.items()
        )
        return f"Mask({{{body}}}, dim={self._dim})"

    # -- arithmetic ---------------------------------------------------------

    def _check_dim(self, other: "Mask") -> None:
        if self._dim != other._dim:
            raise DimensionMismatch(f"dimensions {self._dim} and {other._dim} differ")

    def __add__(self, other: "Mask") -> "Mask":
        if not isinstance(other, Mask):
            return NotImplemented
        self._check_dim(other)
        s = max(self._shift, other._shift)
        ints = {a: v << (s - self._shift) for a, v in self._ints.items()}
        for a, v in other._ints.items():
            ints[a] = ints.get(a, 0) + (v << (s - other._shift))
        return Mask.from_integers(ints, s, self._dim)

    def __neg__(self) -> "Mask":
        return Mask.from_integers({a: -v for a, v in self._ints.items()}, self._shift, self._dim)

    def __sub__(self, other: "Mask") -> "Mask":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Mask):
            return product(self, other)
        try:
            c = DyadicRational.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.scaled(c)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Mask":
        if n < 0:
            raise ValueError("negative powers are not masks")
        result = Mask.delta(self._dim)
        base = self
        while n:
            if n & 1:
                result = product(result, base)
            n >>= 1
            if n:
                base = product(base, base)
        return result

    def scaled(self, c) -> "Mask":
        c = DyadicRational.coerce(c)
        return Mask.from_integers(
            {a: v * c.numerator for a, v in self._ints.items()},
            self._shift + c.exponent,
            self._dim,
        )

    def translate(self, offset: Sequence[int]) -> "Mask":
        offset = _key(offset, self._dim)
        return Mask.from_integers(
            {tuple(x + o for x, o in zip(a, offset)): v for a, v in self._ints.items()},
            self._shift,
            self._dim,
        )

    def anchored(self) -> tuple["Mask", Index]:
        """Translate so the minimal exponent per coordinate is 0; returns (mask, old lower corner)."""
        if not self._ints:
            return self, (0,) * self._dim
        lo = self.lower()
        return self.translate(tuple(-x for x in lo)), lo

    def dilate(self, factor: int) -> "Mask":
        """Symbol ``a(z**factor)``."""
        return Mask.from_integers(
            {tuple(factor * x for x in a): v for a, v in self._ints.items()},
            self._shift,
            self._dim,
        )

    def to_dense(self, exact: bool = False) -> tuple[np.ndarray, Index]:
        """Dense coefficient array over the support box and its lower corner.

        With ``exact=True`` the array holds the integer numerators (object
        dtype) and the caller divides by ``2**self.shift``.
        """
        lo, hi = self.lower(), self.upper()
        shape = tuple(h - l + 1 for l, h in zip(lo, hi))
        if exact:
            arr = np.zeros(shape, dtype=object)
            for a, v in self._ints.items():
                arr[tuple(x - l for x, l in zip(a, lo))] = v
        else:
            arr = np.zeros(shape, dtype=float)
            den = 1 << self._shift
            for a, v in self._ints.items():
                arr[tuple(x - l for x, l in zip(a, lo))] = v / den
        return arr, lo


# -- constructors -----------------------------------------------------------


def as_direction(v, dim: int) -> Direction:
    v = _key(v, dim)
    if any(x < 0 for x in v):
        raise ValueError(f"direction {v} must have nonnegative entries")
    if not any(v):
        raise ValueError("zero direction is not allowed")
    return v


def _rank(rows: Sequence[Sequence[int]]) -> int:
    m = [[Fraction(x) for x in row] for row in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col] / m[rank][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[rank])]
        rank += 1
    return rank


@dataclass(frozen=True)
class Basis:
    """``d`` linearly independent directions in ``N_0^d``."""

    vectors: tuple[Direction, ...]

    def __post_init__(self):
        vecs = tuple(tuple(int(x) for x in (v if not isinstance(v, int) else (v,))) for v in self.vectors)
        if not vecs:
            raise ValueError("a basis needs at least one vector")
        d = len(vecs[0])
        vecs = tuple(as_direction(v, d) for v in vecs)
        if len(vecs) != d:
            raise ValueError(f"a basis of R^{d} needs exactly {d} vectors, got {len(vecs)}")
        if _rank(vecs) != d:
            raise ValueError(f"vectors {vecs} are linearly dependent")
        object.__setattr__(self, "vectors", vecs)

    @property
    def dim(self) -> int:
        return len(self.vectors)

    @classmethod
    def canonical(cls, dim: int) -> "Basis":
        return cls(tuple(tuple(int(i == j) for j in range(dim)) for i in range(dim)))

    def __iter__(self):
        return iter(self.vectors)

    def __len__(self):
        return len(self.vectors)


def smoothing_factor(v, dim: int | None = None) -> Mask:
    """Directional smoothing factor with symbol ``(1 + z**v) / 2``."""
    if dim is None:
        dim = 1 if isinstance(v, int) else len(v)
    v = as_direction(v, dim)
    zero = (0,) * dim
    return Mask.from_integers({zero: 1, v: 1}, 1, dim)


def directional_product(directions: Iterable, dim: int) -> Mask:
    """Product of the directional smoothing factors over a multiset of directions."""
    out = Mask.delta(dim)
    for v in directions:
        out = product(out, smoothing_factor(v, dim))
    return out


def full_smoothing_factor(basis: Basis) -> Mask:
    return directional_product(basis.vectors, basis.dim)


def product(a: Mask, b: Mask) -> Mask:
    """Symbol product (coefficient convolution), exact."""
    a._check_dim(b)
    if len(a._ints) < len(b._ints):
        a, b = b, a
    out: dict[Index, int] = {}
    get = out.get
    if a._dim == 1:
        for (i,), u in b._ints.items():
            for (j,), w in a._ints.items():
                k = (i + j,)
                out[k] = get(k, 0) + u * w
    else:
        for ka, u in b._ints.items():
            for kb, w in a._ints.items():
                k = tuple(x + y for x, y in zip(ka, kb))
                out[k] = get(k, 0) + u * w
    return Mask.from_integers(out, a._shift + b._shift, a._dim)


def _grlex(alpha: Index) -> tuple:
    return (sum(alpha), alpha)


def divide_exact(a: Mask, f: Mask) -> Mask:
    """Exact quotient ``q`` with ``q * f == a``.

    Laurent division: both operands are translated into ``N_0^d``, then
    polynomial long division under the graded-lexicographic order eliminates
    the leading monomial of the remainder. Raises :class:`NotDivisible` if a
    nonzero remainder is left or a quotient coefficient is not dyadic.
    """
    a._check_dim(f)
    if f.is_zero():
        raise ZeroDivisionError("division by the zero mask")
    dim = a._dim
    if a.is_zero():
        return Mask.zero(dim)
    a0, a_lo = a.anchored()
    f0, f_lo = f.anchored()

    f_terms = [(k, Fraction(v)) for k, v in f0._ints.items()]
    f_lead, f_lead_c = max(f_terms, key=lambda t: _grlex(t[0]))
    rem = {k: Fraction(v) for k, v in a0._ints.items()}
    heap = [(-sum(k), tuple(-x for x in k)) for k in rem]
    heapq.heapify(heap)
    quotient: dict[Index, Fraction] = {}
    while heap:
        _, negk = heapq.heappop(heap)
        k = tuple(-x for x in negk)
        c = rem.get(k)
        if not c:
            continue
        t = tuple(x - y for x, y in zip(k, f_lead))
        if any(x < 0 for x in t):
            raise NotDivisible(f"leading monomial {k} not divisible by {f_lead}")
        qc = c / f_lead_c
        quotient[t] = quotient.get(t, 0) + qc
        for fk, fc in f_terms:
            m = tuple(x + y for x, y in zip(t, fk))
            new = rem.get(m, 0) - qc * fc
            if new:
                if m not in rem or not rem[m]:
                    heapq.heappush(heap, (-sum(m), tuple(-x for x in m)))
                rem[m] = new
            else:
                rem.pop(m, None)
    # a = 2^-sa A, f = 2^-sf F  =>  q = 2^(sf - sa) (A / F)
    scale = Fraction(1 << f0._shift, 1 << a0._shift)
    coeffs = {}
    for t, qc in quotient.items():
        v = qc * scale
        if not v:
            continue
        if v.denominator & (v.denominator - 1):
            raise NotDivisible("quotient has non-dyadic coefficients")
        coeffs[t] = v
    q = Mask(coeffs, dim=dim)
    offset = tuple(x - y for x, y in zip(a_lo, f_lo))
    return q.translate(offset)


def divides(f: Mask, a: Mask) -> bool:
    try:
        divide_exact(a, f)
    except NotDivisible:
        return False
    return True


@functools.lru_cache(maxsize=None)
def bspline_mask(m: int) -> Mask:
    """Univariate B-spline mask ``(1 + z)**(m + 1) / 2**m``."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    from math import comb

    return Mask.from_integers({(j,): comb(m + 1, j) for j in range(m + 2)}, m, 1)


_BOX3_FACTOR = Mask.from_integers({(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 2,
                                   (2, 1): 1, (1, 2): 1, (2, 2): 1}, 0, 2)


@functools.lru_cache(maxsize=None)
def box3_mask(m: int) -> Mask:
    """Three-directional box-spline mask ``((1+z1)(1+z2)(1+z1 z2))**(m+1) / 2**(3m+1)``."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    if m == 0:
        return _BOX3_FACTOR.scaled(DyadicRational(1, 1))
    prev = box3_mask(m - 1)
    return product(prev, _BOX3_FACTOR).scaled(DyadicRational(1, 3))


def _cosets(dim: int, modulus: int):
    return list(_cartesian(range(modulus), repeat=dim))


def submask_sums(a: Mask) -> dict[Index, DyadicRational]:
    """Exact sum of each sub-mask ``{a(eps + 2 alpha)}``, keyed by ``eps in {0,1}^d``."""
    sums = {eps: 0 for eps in _cosets(a.dim, 2)}
    for alpha, v in a._ints.items():
        eps = tuple(x & 1 for x in alpha)
        sums[eps] += v
    return {eps: DyadicRational(s, a._shift) for eps, s in sums.items()}


def satisfies_eq5(a: Mask) -> bool:
    """All sub-mask sums equal to one (necessary for convergence)."""
    return all(s == 1 for s in submask_sums(a).values())


def is_nonnegative(a: Mask) -> bool:
    return all(v >= 0 for v in a._ints.values())


# -- plain-text serialization ----------------------------------------------


def dumps(a: Mask) -> str:
    """Header ``dim d`` then ``alpha_1 .. alpha_d numerator exponent`` per support point."""
    lines = [f"dim {a.dim}"]
    for alpha, c in a.items():
        lines.append(" ".join(str(x) for x in alpha) + f" {c.numerator} {c.exponent}")
    return "\n".join(lines) + "\n"


def loads(text: str) -> Mask:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("dim"):
        raise ValueError("mask text must start with a 'dim d' header")
    parts = lines[0].split()
    if len(parts) != 2:
        raise ValueError(f"bad header line {lines[0]!r}")
    dim = int(parts[1])
    coeffs: dict[Index, DyadicRational] = {}
    for ln in lines[1:]:
        fields = ln.split()
        if len(fields) != dim + 2:
            raise ValueError(f"expected {dim + 2} fields in {ln!r}")
        alpha = tuple(int(x) for x in fields[:dim])
        if alpha in coeffs:
            raise ValueError(f"duplicate index {alpha}")
        coeffs[alpha] = DyadicRational(int(fields[dim]), int(fields[dim + 1]))
    return Mask(coeffs, dim=dim)

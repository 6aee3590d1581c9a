"""Finitely supported data on the dyadic grid ``2^-k Z^d`` and the subdivision operator."""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CapExceeded, DimensionMismatch
from .masks import Index, Mask, as_direction

DEFAULT_CAP = 2**26


@dataclass(frozen=True, eq=False)
class LatticeData:
    """Values on an axis-aligned index window at refinement level ``level``.

    ``values[i]`` is the sample at lattice index ``origin + i``; everything
    outside the window is zero. Float data uses a ``float64`` array. Exact
    data uses an object array of Python ints, read as ``values / 2**exponent``.
    """

    level: int
    origin: Index
    values: np.ndarray
    exponent: int = 0

    def __post_init__(self):
        origin = tuple(int(x) for x in self.origin)
        if len(origin) != self.values.ndim:
            raise DimensionMismatch("origin and values have different dimensions")
        object.__setattr__(self, "origin", origin)
        if self.exponent and not self.exact:
            raise ValueError("float lattice data carries no exponent")

    @property
    def dim(self) -> int:
        return self.values.ndim

    @property
    def exact(self) -> bool:
        return self.values.dtype == object

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    @property
    def window(self) -> tuple[Index, Index]:
        """Inclusive lower and upper corners of the stored index box."""
        upper = tuple(o + n - 1 for o, n in zip(self.origin, self.values.shape))
        return self.origin, upper

    def to_float(self) -> np.ndarray:
        if not self.exact:
            return self.values
        den = 1 << self.exponent
        out = np.empty(self.values.shape, dtype=float)
        flat_in = self.values.ravel()
        flat_out = out.ravel()
        for i, v in enumerate(flat_in):
            flat_out[i] = int(v) / den
        return out

    def as_float(self) -> "LatticeData":
        return LatticeData(self.level, self.origin, self.to_float())

    def value(self, alpha) -> float | Fraction:
        """Sample at one index; exact data returns a Fraction."""
        alpha = (alpha,) if isinstance(alpha, int) else tuple(alpha)
        rel = tuple(a - o for a, o in zip(alpha, self.origin))
        if any(r < 0 or r >= n for r, n in zip(rel, self.values.shape)):
            return Fraction(0) if self.exact else 0.0
        v = self.values[rel]
        return Fraction(int(v), 1 << self.exponent) if self.exact else float(v)

    def nonzero_indices(self, threshold: float = 0.0) -> np.ndarray:
        """Lattice indices (rows) whose absolute value exceeds ``threshold``."""
        if self.exact and threshold == 0:
            mask = self.values != 0
        else:
            mask = np.abs(self.to_float()) > threshold
        idx = np.argwhere(mask)
        return idx + np.asarray(self.origin, dtype=np.int64)

    def physical_points(self, threshold: float = 0.0) -> np.ndarray:
        return self.nonzero_indices(threshold) / float(2**self.level)

    def total(self):
        s = sum(int(v) for v in self.values.ravel()) if self.exact else float(self.values.sum())
        return Fraction(s, 1 << self.exponent) if self.exact else s

    def sup_norm(self):
        if self.exact:
            m = max((abs(int(v)) for v in self.values.ravel()), default=0)
            return Fraction(m, 1 << self.exponent)
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    def translate(self, offset: Sequence[int]) -> "LatticeData":
        offset = (offset,) if isinstance(offset, int) else tuple(offset)
        return LatticeData(
            self.level,
            tuple(o + t for o, t in zip(self.origin, offset)),
            self.values,
            self.exponent,
        )

    def trimmed(self) -> "LatticeData":
        """Smallest window covering all nonzero values."""
        nz = np.argwhere(self.values != 0)
        if nz.size == 0:
            zero = np.zeros((1,) * self.dim, dtype=self.values.dtype)
            return LatticeData(self.level, self.origin, zero, self.exponent)
        lo, hi = nz.min(axis=0), nz.max(axis=0)
        sl = tuple(slice(int(a), int(b) + 1) for a, b in zip(lo, hi))
        origin = tuple(o + int(a) for o, a in zip(self.origin, lo))
        return LatticeData(self.level, origin, self.values[sl], self.exponent)

    def to_exponent(self, exponent: int) -> "LatticeData":
        if not self.exact or exponent < self.exponent:
            raise ValueError("can only raise the exponent of exact data")
        k = exponent - self.exponent
        return LatticeData(self.level, self.origin, self.values * (1 << k), exponent)

    def same_values(self, other: "LatticeData") -> bool:
        """Exact equality of the represented functions (zeros outside windows)."""
        if self.dim != other.dim or self.level != other.level:
            return False
        a, b = _on_common_window(self, other)
        return bool(np.all(a == b))


def _exact_dense(data: "LatticeData", exponent: int) -> np.ndarray:
    return data.values * (1 << (exponent - data.exponent))


def _on_common_window(f: LatticeData, g: LatticeData) -> tuple[np.ndarray, np.ndarray]:
    """Both value arrays embedded in the union window (exact data on a common exponent)."""
    lo = tuple(min(a, b) for a, b in zip(f.origin, g.origin))
    hi = tuple(max(a, b) for a, b in zip(f.window[1], g.window[1]))
    shape = tuple(h - l + 1 for l, h in zip(lo, hi))
    exact = f.exact and g.exact
    if exact:
        e = max(f.exponent, g.exponent)
        fv, gv = _exact_dense(f, e), _exact_dense(g, e)
        dtype = object
    else:
        fv, gv = f.to_float(), g.to_float()
        dtype = float
    out = []
    for data, vals in ((f, fv), (g, gv)):
        arr = np.zeros(shape, dtype=dtype)
        sl = tuple(slice(o - l, o - l + n) for o, l, n in zip(data.origin, lo, vals.shape))
        arr[sl] = vals
        out.append(arr)
    return out[0], out[1]


def delta(dim: int, exact: bool = False, level: int = 0) -> LatticeData:
    """Kronecker delta at the origin."""
    values = np.ones((1,) * dim, dtype=object if exact else float)
    if exact:
        values[(0,) * dim] = 1
    return LatticeData(level, (0,) * dim, values)


def from_mapping(samples: Mapping, dim: int | None = None, level: int = 0, exact: bool = False) -> LatticeData:
    """Lattice data from ``{index: value}``; exact data accepts dyadic values."""
    from .dyadic import DyadicRational

    keys = [(k,) if isinstance(k, int) else tuple(k) for k in samples]
    if dim is None:
        dim = len(keys[0])
    lo = tuple(min(k[i] for k in keys) for i in range(dim))
    hi = tuple(max(k[i] for k in keys) for i in range(dim))
    shape = tuple(h - l + 1 for l, h in zip(lo, hi))
    vals = list(samples.values())
    if exact:
        ds = [DyadicRational.coerce(v) for v in vals]
        e = max(d.exponent for d in ds)
        arr = np.zeros(shape, dtype=object)
        arr[...] = 0
        for k, d in zip(keys, ds):
            arr[tuple(a - l for a, l in zip(k, lo))] = d.numerator << (e - d.exponent)
        return LatticeData(level, lo, arr, e)
    arr = np.zeros(shape, dtype=float)
    for k, v in zip(keys, vals):
        arr[tuple(a - l for a, l in zip(k, lo))] = float(v)
    return LatticeData(level, lo, arr)


def apply_subdivision(a: Mask, f: LatticeData, cap: int = DEFAULT_CAP) -> LatticeData:
    """One refinement step ``(S_a f)(gamma) = sum_beta a(gamma - 2 beta) f(beta)``.

    The output window is ``2 * window(f)`` plus the support box of ``a``.
    Contributions are accumulated mask entry by mask entry in lexicographic
    order, so float results are reproducible run to run.
    """
    if a.dim != f.dim:
        raise DimensionMismatch(f"mask dimension {a.dim} != data dimension {f.dim}")
    if a.is_zero():
        zeros = np.zeros((1,) * f.dim, dtype=f.values.dtype)
        if f.exact:
            zeros[...] = 0
        return LatticeData(f.level + 1, (0,) * f.dim, zeros, 0)
    lo, hi = a.lower(), a.upper()
    shape = tuple(2 * (n - 1) + (h - l) + 1 for n, l, h in zip(f.shape, lo, hi))
    npoints = int(np.prod(shape, dtype=object))
    if npoints > cap:
        raise CapExceeded(f"window of {npoints} points exceeds cap {cap}")
    origin = tuple(2 * o + l for o, l in zip(f.origin, lo))
    if f.exact:
        out = np.zeros(shape, dtype=object)
        out[...] = 0
        src = f.values
        for alpha, c in sorted(a.integer_coefficients.items()):
            sl = tuple(slice(x - l, x - l + 2 * n - 1, 2) for x, l, n in zip(alpha, lo, f.shape))
            out[sl] += c * src
        return LatticeData(f.level + 1, origin, out, f.exponent + a.shift)
    out = np.zeros(shape, dtype=float)
    src = f.values
    den = float(1 << a.shift)
    for alpha, c in sorted(a.integer_coefficients.items()):
        sl = tuple(slice(x - l, x - l + 2 * n - 1, 2) for x, l, n in zip(alpha, lo, f.shape))
        out[sl] += (c / den) * src
    return LatticeData(f.level + 1, origin, out)


def directional_difference(f: LatticeData, v, backward: bool = False) -> LatticeData:
    """Forward difference ``f(. + v) - f``, or backward ``f - f(. - v)``, on the same level."""
    v = as_direction(v, f.dim)
    shape = tuple(n + x for n, x in zip(f.shape, v))
    dtype = object if f.exact else float
    out = np.zeros(shape, dtype=dtype)
    if f.exact:
        out[...] = 0
    # the same two slabs serve both stencils; only the window origin moves
    out[tuple(slice(0, n) for n in f.shape)] += f.values
    out[tuple(slice(x, x + n) for x, n in zip(v, f.shape))] -= f.values
    lo = f.origin if backward else tuple(o - x for o, x in zip(f.origin, v))
    return LatticeData(f.level, lo, out, f.exponent)


def linear_combination(terms: Sequence[tuple[object, LatticeData]]) -> LatticeData:
    """``sum c_i f_i`` for data on one level (exact when all data are exact and c_i dyadic)."""
    from .dyadic import DyadicRational

    first = terms[0][1]
    acc = None
    for c, f in terms:
        if f.level != first.level or f.dim != first.dim:
            raise DimensionMismatch("data must share dimension and level")
        if f.exact:
            d = DyadicRational.coerce(c)
            g = LatticeData(f.level, f.origin, f.values * d.numerator, f.exponent + d.exponent)
        else:
            g = LatticeData(f.level, f.origin, f.values * float(c))
        if acc is None:
            acc = g
        else:
            x, y = _on_common_window(acc, g)
            lo = tuple(min(a, b) for a, b in zip(acc.origin, g.origin))
            e = max(acc.exponent, g.exponent) if (acc.exact and g.exact) else 0
            acc = LatticeData(f.level, lo, x + y, e)
    return acc

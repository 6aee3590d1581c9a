"""Cascade execution, the stationary-limit ladder and convergence diagnostics."""

from __future__ import annotations

import csv
import io
from collections.abc import Callable
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .lattice import DEFAULT_CAP, LatticeData, apply_subdivision, delta, directional_difference
from .masks import Mask, as_direction
from .sequences import MaskSequence


@dataclass
class CascadeResult:
    """Data ``f^[1..K]`` produced by a cascade, plus its inputs."""

    levels: list[LatticeData]
    sequence: MaskSequence
    initial: LatticeData
    repeats: list[int] = field(default_factory=list)

    @property
    def final(self) -> LatticeData:
        return self.levels[-1]

    @property
    def dim(self) -> int:
        return self.initial.dim

    def physical(self, i: int, alpha) -> tuple[Fraction, ...]:
        """Physical coordinate ``2^-level * alpha`` of an index in ``levels[i]``."""
        data = self.levels[i]
        alpha = (alpha,) if isinstance(alpha, int) else tuple(alpha)
        return tuple(Fraction(a, 2**data.level) for a in alpha)

    def to_csv(self, stream=None, which: str = "final") -> str:
        """Rows ``level, x_1..x_d, value`` for nonzero samples (17 significant digits)."""
        buf = stream if stream is not None else io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["level"] + [f"x_{i + 1}" for i in range(self.dim)] + ["value"])
        chosen = self.levels if which == "all" else [self.final]
        for data in chosen:
            write_samples(writer, data)
        return buf.getvalue() if stream is None else ""


def write_samples(writer, data: LatticeData) -> None:
    vals = data.to_float()
    scale = 2.0**-data.level
    for rel in np.argwhere(vals != 0):
        alpha = rel + np.asarray(data.origin)
        v = vals[tuple(rel)]
        writer.writerow(
            [data.level]
            + [format(float(a) * scale, ".17g") for a in alpha]
            + [format(float(v), ".17g")]
        )


def _repeat_count(repeats, k: int) -> int:
    n = repeats(k) if callable(repeats) else int(repeats)
    if n < 1:
        raise ValueError("each mask must be applied at least once")
    return n


def cascade(
    seq: MaskSequence,
    levels: int,
    initial: LatticeData | None = None,
    *,
    exact: bool = False,
    cap: int = DEFAULT_CAP,
    repeats: int | Callable[[int], int] = 1,
) -> CascadeResult:
    """Run ``f^[k+1] = S_{a_k} f^[k]`` for ``k = 0..levels-1``.

    ``repeats`` applies mask ``a_k`` that many times before moving on; each
    application is one grid refinement. Defaults to the plain scheme.
    """
    if levels < 1:
        raise ValueError("levels must be at least 1")
    f = initial if initial is not None else delta(seq.dim, exact=exact)
    start = f
    out, reps = [], []
    for k in range(levels):
        a = seq.mask(k)
        n = _repeat_count(repeats, k)
        for _ in range(n):
            f = apply_subdivision(a, f, cap=cap)
        out.append(f)
        reps.append(n)
    return CascadeResult(out, seq, start, reps)


def stationary_blf(a: Mask, levels: int, *, exact: bool = False, cap: int = DEFAULT_CAP) -> CascadeResult:
    """Cascade of the single mask ``a`` from the delta."""
    return cascade(MaskSequence.constant(a), levels, exact=exact, cap=cap)


@dataclass
class PhiKResult:
    k: int
    inner: int
    samples: LatticeData


def phi_k(
    seq: MaskSequence,
    k: int,
    inner: int,
    *,
    exact: bool = False,
    cap: int = DEFAULT_CAP,
) -> PhiKResult:
    """``k`` non-stationary steps, then ``inner`` steps with the frozen mask ``a_k``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if inner < 1:
        raise ValueError("inner must be at least 1")
    f = delta(seq.dim, exact=exact)
    for i in range(k):
        f = apply_subdivision(seq.mask(i), f, cap=cap)
    a = seq.mask(k)
    for _ in range(inner):
        f = apply_subdivision(a, f, cap=cap)
    return PhiKResult(k, inner, f)


def _coarsen(f: LatticeData, level: int) -> LatticeData:
    """Restriction of ``f`` to the points of the coarser grid ``2^-level Z^d``."""
    step = 2 ** (f.level - level)
    if step == 1:
        return f
    lo = [-(-o // step) for o in f.origin]  # ceil
    starts = [l * step - o for l, o in zip(lo, f.origin)]
    sl = tuple(slice(s, None, step) for s in starts)
    vals = f.values[sl]
    if vals.size == 0:
        vals = np.zeros((1,) * f.dim, dtype=f.values.dtype)
        if f.exact:
            vals[...] = 0
    return LatticeData(level, tuple(lo), vals, f.exponent)


def sup_gap(f: LatticeData, g: LatticeData) -> float:
    """``sup |f - g|`` over the common dyadic points of the two grids."""
    from .lattice import _on_common_window

    if f.dim != g.dim:
        raise ValueError("incompatible grids: dimensions differ")
    level = min(f.level, g.level)
    a, b = _on_common_window(_coarsen(f, level), _coarsen(g, level))
    if a.dtype == object:
        e = max(f.exponent, g.exponent)
        m = max((abs(int(x)) for x in (a - b).ravel()), default=0)
        return float(Fraction(m, 2**e))
    return float(np.max(np.abs(a - b))) if a.size else 0.0


def cauchy_gap(
    seq: MaskSequence,
    k: int,
    n: int,
    inner: int | None = None,
    levels: int | None = None,
    *,
    exact: bool = False,
    cap: int = DEFAULT_CAP,
) -> float:
    """Sup distance between sampled ``phi_{k+n}`` and ``phi_k``.

    With ``levels=T`` both are refined to the same level ``T`` (inner counts
    ``T-k`` and ``T-k-n``). With ``inner=R`` each uses ``R`` frozen steps and
    they are compared on the coarser grid.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return 0.0
    if levels is not None:
        if inner is not None:
            raise ValueError("give either inner or levels, not both")
        if levels - k - n < 1:
            raise ValueError("incompatible grids: levels must exceed k + n")
        inner_a, inner_b = levels - k, levels - k - n
    elif inner is not None:
        inner_a = inner_b = inner
    else:
        raise ValueError("incompatible grids: give inner or levels")
    a = phi_k(seq, k, inner_a, exact=exact, cap=cap).samples
    b = phi_k(seq, k + n, inner_b, exact=exact, cap=cap).samples
    return sup_gap(a, b)


def scaled_difference_norms(
    result: CascadeResult,
    order: int,
    direction=None,
    scale_power: int | None = None,
) -> list[Fraction | float]:
    """``2^(k * p) * sup |diff_v^order f^[k]|`` per level, ``p = order - 1`` by default."""
    if order < 1:
        raise ValueError("order must be at least 1")
    d = result.dim
    v = as_direction(direction if direction is not None else (1,) + (0,) * (d - 1), d)
    p = order - 1 if scale_power is None else scale_power
    norms = []
    for data in result.levels:
        g = data
        for _ in range(order):
            g = directional_difference(g, v)
        s = g.sup_norm()
        norms.append(s * Fraction(2) ** (data.level * p) if g.exact else s * 2.0 ** (data.level * p))
    return norms


def smoothness_probe(
    result: CascadeResult,
    order: int,
    direction=None,
    scale_power: int | None = None,
) -> list[float]:
    """Consecutive-level ratios of scaled ``order``-th differences.

    A heuristic, not a certificate. With the default scaling
    ``2^(k(order-1))`` the ratios tend to 1/2 when the order-th derivative
    of the limit is bounded, to 1 when the ``(order-1)``-th derivative has
    a kink, and to 2 when it jumps. A run of ratios below 1 is read as
    ``C^(order-1)``-consistent behaviour.
    """
    if len(result.levels) < 2:
        raise ValueError("insufficient levels: need at least two")
    norms = scaled_difference_norms(result, order, direction, scale_power)
    ratios = []
    for prev, cur in zip(norms, norms[1:]):
        if prev == 0:
            ratios.append(0.0 if cur == 0 else float("inf"))
        else:
            ratios.append(float(cur / prev))
    return ratios

"""Exact convex geometry of mask supports (intervals and convex polygons)."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dyadic import format_rational
from .errors import AssumptionSViolation
from .masks import Mask
from .sequences import MaskSequence

Point = tuple[Fraction, ...]


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> list[Point]:
    """Monotone chain hull, counterclockwise, collinear points dropped."""
    pts = sorted(set(tuple(Fraction(x) for x in p) for p in points))
    if len(pts) <= 2:
        return pts
    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


class ConvexPolytope:
    """Interval (``d = 1``) or convex polygon (``d = 2``) with exact rational vertices.

    Polygon vertices are stored counterclockwise starting from the
    lexicographically smallest one; degenerate hulls (a point or a segment)
    are allowed.
    """

    __slots__ = ("dim", "vertices")

    def __init__(self, dim: int, vertices):
        if dim not in (1, 2):
            raise ValueError("only dimensions 1 and 2 are supported")
        self.dim = dim
        pts = [tuple(Fraction(x) for x in ((p,) if not isinstance(p, (tuple, list)) else p)) for p in vertices]
        if not pts:
            raise ValueError("empty polytope")
        if any(len(p) != dim for p in pts):
            raise ValueError("vertex dimension mismatch")
        if dim == 1:
            lo, hi = min(p[0] for p in pts), max(p[0] for p in pts)
            self.vertices = ((lo,),) if lo == hi else ((lo,), (hi,))
        else:
            self.vertices = tuple(convex_hull(pts))

    @classmethod
    def interval(cls, lo, hi) -> "ConvexPolytope":
        if Fraction(lo) > Fraction(hi):
            raise ValueError("empty interval")
        return cls(1, [(lo,), (hi,)])

    @classmethod
    def polygon(cls, vertices) -> "ConvexPolytope":
        return cls(2, vertices)

    @property
    def lo(self) -> Fraction:
        return self.vertices[0][0]

    @property
    def hi(self) -> Fraction:
        return self.vertices[-1][0]

    def __eq__(self, other):
        if not isinstance(other, ConvexPolytope):
            return NotImplemented
        return self.dim == other.dim and self.vertices == other.vertices

    def __hash__(self):
        return hash((self.dim, self.vertices))

    def __repr__(self):
        if self.dim == 1:
            return f"ConvexPolytope.interval({format_rational(self.lo)}, {format_rational(self.hi)})"
        vs = ", ".join("(" + ", ".join(format_rational(x) for x in v) + ")" for v in self.vertices)
        return f"ConvexPolytope.polygon([{vs}])"

    def contains_point(self, p) -> bool:
        p = tuple(Fraction(x) for x in p)
        if self.dim == 1:
            return self.lo <= p[0] <= self.hi
        vs = self.vertices
        if len(vs) == 1:
            return p == vs[0]
        if len(vs) == 2:
            a, b = vs
            return _cross(a, b, p) == 0 and min(a, b) <= p <= max(a, b)
        return all(_cross(vs[i], vs[(i + 1) % len(vs)], p) >= 0 for i in range(len(vs)))

    def contains(self, other: "ConvexPolytope") -> bool:
        return all(self.contains_point(v) for v in other.vertices)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if self.dim == 1:
            w.writerow(["lo", "hi"])
            w.writerow([format_rational(self.lo), format_rational(self.hi)])
        else:
            w.writerow(["x_1", "x_2"])
            for v in self.vertices:
                w.writerow([format_rational(x) for x in v])
        return buf.getvalue()


def esupp(a: Mask) -> ConvexPolytope:
    """Convex hull of the support of a mask."""
    if a.is_zero():
        raise ValueError("zero mask has no extended support")
    if a.dim > 2:
        raise NotImplementedError("extended supports are implemented for d <= 2")
    return ConvexPolytope(a.dim, a.support)


def scale(P: ConvexPolytope, lam) -> ConvexPolytope:
    lam = Fraction(lam)
    if lam < 0:
        raise ValueError("negative scale factors are not supported")
    return ConvexPolytope(P.dim, [tuple(lam * x for x in v) for v in P.vertices])


def _edge_merge(P: tuple[Point, ...], Q: tuple[Point, ...]) -> list[Point]:
    # both inputs CCW starting at the lexicographically smallest vertex
    n, m = len(P), len(Q)
    out = []
    i = j = 0
    while i < n or j < m:
        out.append((P[i % n][0] + Q[j % m][0], P[i % n][1] + Q[j % m][1]))
        ep = (P[(i + 1) % n][0] - P[i % n][0], P[(i + 1) % n][1] - P[i % n][1])
        eq = (Q[(j + 1) % m][0] - Q[j % m][0], Q[(j + 1) % m][1] - Q[j % m][1])
        if i >= n:
            j += 1
            continue
        if j >= m:
            i += 1
            continue
        c = ep[0] * eq[1] - ep[1] * eq[0]
        if c > 0:
            i += 1
        elif c < 0:
            j += 1
        else:
            i += 1
            j += 1
    return out


def minkowski_sum(P: ConvexPolytope, Q: ConvexPolytope) -> ConvexPolytope:
    """``P + Q``: endpoint addition for intervals, edge merge for polygons."""
    if P.dim != Q.dim:
        from .errors import DimensionMismatch

        raise DimensionMismatch("polytopes of different dimensions")
    if P.dim == 1:
        return ConvexPolytope.interval(P.lo + Q.lo, P.hi + Q.hi)
    if len(P.vertices) < 3 or len(Q.vertices) < 3:
        return ConvexPolytope(2, [tuple(a + b for a, b in zip(p, q)) for p in P.vertices for q in Q.vertices])
    return ConvexPolytope(2, _edge_merge(P.vertices, Q.vertices))


def _dist2_point_segment(p, a, b) -> Fraction:
    dx, dy = b[0] - a[0], b[1] - a[1]
    L = dx * dx + dy * dy
    if L == 0:
        t = Fraction(0)
    else:
        t = ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / L
        t = min(Fraction(1), max(Fraction(0), t))
    qx, qy = a[0] + t * dx - p[0], a[1] + t * dy - p[1]
    return qx * qx + qy * qy


def _dist2_to_polytope(p, P: ConvexPolytope) -> Fraction:
    if P.contains_point(p):
        return Fraction(0)
    vs = P.vertices
    if len(vs) == 1:
        return (p[0] - vs[0][0]) ** 2 + (p[1] - vs[0][1]) ** 2
    return min(_dist2_point_segment(p, vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs)))


def hausdorff_distance(P: ConvexPolytope, Q: ConvexPolytope) -> float:
    """Hausdorff distance; for convex sets it is attained at a vertex."""
    if P.dim != Q.dim:
        raise ValueError("polytopes of different dimensions")
    if P.dim == 1:
        return float(max(abs(P.lo - Q.lo), abs(P.hi - Q.hi)))
    d2 = max(
        max(_dist2_to_polytope(v, Q) for v in P.vertices),
        max(_dist2_to_polytope(v, P) for v in Q.vertices),
    )
    return math.sqrt(d2)


# -- supports of subdivision limits ----------------------------------------


@dataclass(frozen=True)
class SupportPrediction:
    """Predicted limit support; ``exact`` is False for a tail over-bound."""

    polytope: ConvexPolytope
    exact: bool
    factor: Fraction
    base: ConvexPolytope


def _lambda_of(seq: MaskSequence, k: int, base: ConvexPolytope) -> Fraction:
    E = esupp(seq.mask(k))
    if seq.has_lambda_law:
        lam = seq.lambda_(k)
        if scale(base, lam) != E:
            raise AssumptionSViolation(f"Esupp(a_{k}) != lambda_{k} Esupp(a_0) with lambda_{k} = {lam}")
        return lam
    # recover lambda from an extreme coordinate, then confirm on the whole polytope
    ref = max(base.vertices, key=lambda v: sum(abs(x) for x in v))
    idx = next((i for i, x in enumerate(ref) if x != 0), None)
    if idx is None:
        raise AssumptionSViolation("Esupp(a_0) is the origin; growth law undefined")
    target = max(E.vertices, key=lambda v: sum(abs(x) for x in v))
    lam = target[idx] / ref[idx]
    if lam <= 0 or scale(base, lam) != E:
        raise AssumptionSViolation(f"Esupp(a_{k}) is not a positive multiple of Esupp(a_0)")
    return lam


def check_assumption_s(seq: MaskSequence, upto: int) -> list[Fraction]:
    """Growth factors for ``k < upto``; raises on a violation of scaling or monotonicity."""
    base = esupp(seq.mask(0))
    lams = []
    for k in range(upto):
        lam = Fraction(1) if k == 0 else _lambda_of(seq, k, base)
        if lams and lam < lams[-1]:
            raise AssumptionSViolation(f"lambda_{k} = {lam} < lambda_{k - 1} = {lams[-1]}")
        lams.append(lam)
    return lams


def predicted_support(seq: MaskSequence, tail_from: int = 32) -> SupportPrediction:
    """Limit support ``sum_k 2^-(k+1) Esupp(a_k) = (sum_k 2^-(k+1) lambda_k) Esupp(a_0)``.

    Presets use their closed-form growth sum. Explicit sequences (last mask
    repeated) have an exact geometric tail. Sequences built with
    :meth:`MaskSequence.from_function` are summed up to ``tail_from`` and the
    tail is bounded with the dominating law ``alpha + beta k``; the result is
    then an outer bound.
    """
    base = esupp(seq.mask(0))
    if seq.is_preset:
        factor = seq.lambda_sum
        return SupportPrediction(scale(base, factor), True, factor, base)
    if seq.kind == "explicit":
        n = seq.length
        lams = check_assumption_s(seq, n)
        factor = sum((Fraction(1, 2 ** (k + 1)) * lam for k, lam in enumerate(lams[:-1])), Fraction(0))
        factor += lams[-1] * Fraction(1, 2 ** (n - 1))
        return SupportPrediction(scale(base, factor), True, factor, base)
    lams = check_assumption_s(seq, tail_from)
    factor = sum((Fraction(1, 2 ** (k + 1)) * lam for k, lam in enumerate(lams)), Fraction(0))
    if seq.dominating_law is None:
        raise AssumptionSViolation("no dominating growth law given; the tail cannot be bounded")
    alpha, beta = seq.dominating_law
    T = tail_from
    if alpha + beta * (T - 1) < lams[-1]:
        raise AssumptionSViolation("dominating law is below the observed growth factors")
    # sum_{k>=T} 2^-(k+1) (alpha + beta k) = 2^-T (alpha + beta (T + 1))
    factor += Fraction(1, 2**T) * (alpha + beta * (T + 1))
    return SupportPrediction(scale(base, factor), False, factor, base)


def truncated_support(seq: MaskSequence, terms: int) -> ConvexPolytope:
    """``sum_{k<terms} 2^-(k+1) Esupp(a_k)`` by explicit Minkowski sums."""
    acc = None
    for k in range(terms):
        piece = scale(esupp(seq.mask(k)), Fraction(1, 2 ** (k + 1)))
        acc = piece if acc is None else minkowski_sum(acc, piece)
    return acc


def hexagon() -> ConvexPolytope:
    """Extended support of the first three-directional box-spline mask."""
    return ConvexPolytope.polygon([(0, 0), (1, 0), (2, 1), (2, 2), (1, 2), (0, 1)])


def closed_form_support(family: str, r: int) -> ConvexPolytope:
    """``[0, 1 + 1/(2^r - 1)]`` or ``(1 + 1/(2^r - 1))`` times the hexagon."""
    if r < 1:
        raise ValueError("r must be at least 1")
    factor = 1 + Fraction(1, 2**r - 1)
    if family == "univariate_up":
        return ConvexPolytope.interval(0, factor)
    if family == "bivariate_up":
        return scale(hexagon(), factor)
    raise ValueError(f"no closed form for family {family!r}")


def empirical_support(result, threshold: float = 0.0) -> ConvexPolytope:
    """Hull of the physical points of the deepest level with ``|value| > threshold``."""
    if threshold < 0:
        raise ValueError("threshold must be nonnegative")
    data = result.final if hasattr(result, "final") else result
    idx = data.nonzero_indices(threshold)
    if len(idx) == 0:
        raise ValueError("no samples above the threshold")
    h = Fraction(1, 2**data.level)
    if data.dim == 1:
        return ConvexPolytope.interval(int(idx[:, 0].min()) * h, int(idx[:, 0].max()) * h)
    # the row extremes already carry the hull
    pts = []
    for x in np.unique(idx[:, 0]):
        ys = idx[idx[:, 0] == x, 1]
        pts.append((int(x), int(ys.min())))
        pts.append((int(x), int(ys.max())))
    return ConvexPolytope(2, [(Fraction(x) * h, Fraction(y) * h) for x, y in pts])

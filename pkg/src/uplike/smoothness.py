"""Smoothing-factor classes: factor extraction, classification and sequence reports.

Counting convention. A mask is put in class ``j`` when ``j`` full smoothing
factors can be divided out while the residual stays nonnegative and keeps
unit sub-mask sums. Both properties survive multiplication by a smoothing
factor, so they hold for every count below the first failure and greedy
extraction finds the maximum. For ``(1+z)^(m+1) / 2^m`` this gives
``j = m`` with residual ``1 + z``; for the three-directional box-spline
masks of index ``m`` it also gives ``j = m``.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from itertools import combinations

from .errors import NotContractiveWithin, NotDivisible
from .masks import (
    Basis,
    Direction,
    Mask,
    as_direction,
    divide_exact,
    full_smoothing_factor,
    is_nonnegative,
    product,
    satisfies_eq5,
    smoothing_factor,
)
from .operators import FactoredSymbol, contractivity
from .sequences import MaskSequence


class BasisSequence:
    """Bases ``V_1, V_2, ...``; an explicit list repeats its last entry."""

    def __init__(self, bases: Sequence[Basis]):
        bases = [b if isinstance(b, Basis) else Basis(tuple(b)) for b in bases]
        if not bases:
            raise ValueError("a basis sequence needs at least one basis")
        dims = {b.dim for b in bases}
        if len(dims) != 1:
            raise ValueError("bases of different dimensions")
        self._bases = tuple(bases)
        self.kind = "constant" if len(bases) == 1 else "explicit"

    @classmethod
    def constant(cls, basis) -> "BasisSequence":
        return cls([basis])

    @classmethod
    def explicit(cls, bases) -> "BasisSequence":
        return cls(list(bases))

    @classmethod
    def canonical(cls, dim: int) -> "BasisSequence":
        return cls([Basis.canonical(dim)])

    @property
    def dim(self) -> int:
        return self._bases[0].dim

    def basis(self, j: int) -> Basis:
        if j < 1:
            raise IndexError("bases are numbered from 1")
        return self._bases[min(j, len(self._bases)) - 1]

    def __repr__(self):
        return f"BasisSequence({[b.vectors for b in self._bases]})"


def _as_basis_sequence(V, dim: int) -> BasisSequence:
    if V is None:
        return BasisSequence.canonical(dim)
    if isinstance(V, BasisSequence):
        return V
    return BasisSequence.constant(V)


def _admissible(m: Mask) -> bool:
    return is_nonnegative(m) and satisfies_eq5(m)


def extract_full_factors(
    a: Mask,
    V: BasisSequence | Basis | None = None,
    max_j: int | None = None,
    require_eq5_base: bool = True,
) -> tuple[int, Mask]:
    """Greedily divide by ``s_{V_1}, s_{V_2}, ...``; returns ``(j, residual)``.

    With ``require_eq5_base`` (the default) a division only counts when the
    residual stays admissible (nonnegative, unit sub-mask sums). Without it
    every exact division counts.
    """
    if max_j is not None and max_j < 0:
        raise ValueError("max_j must be nonnegative")
    V = _as_basis_sequence(V, a.dim)
    if require_eq5_base and not _admissible(a):
        return 0, a
    j, residual = 0, a
    while max_j is None or j < max_j:
        try:
            q = divide_exact(residual, full_smoothing_factor(V.basis(j + 1)))
        except NotDivisible:
            break
        if require_eq5_base and not _admissible(q):
            break
        j, residual = j + 1, q
        if q.total() == 0:
            break
    return j, residual


def default_pool(dim: int, extra: Sequence = ()) -> tuple[Direction, ...]:
    pool = [tuple(1 if i == j else 0 for i in range(dim)) for j in range(dim)]
    pool.append((1,) * dim)
    for v in extra:
        v = as_direction(v, dim)
        if v not in pool:
            pool.append(v)
    return tuple(pool)


def peel_directions(residual: Mask, pool: Sequence) -> tuple[Mask, list[Direction]]:
    """Move directional factors of ``pool`` into ``D`` while the base stays admissible."""
    base, D = residual, []
    progress = True
    while progress:
        progress = False
        for v in pool:
            try:
                q = divide_exact(base, smoothing_factor(v, base.dim))
            except NotDivisible:
                continue
            if _admissible(q):
                base, progress = q, True
                D.append(tuple(v))
                break
    return base, D


def _haar_like(base: Mask, pool: Sequence) -> bool:
    """``base == 2^d s_{D0}`` for ``d`` independent pool directions."""
    d = base.dim
    for dirs in combinations(pool, d):
        try:
            b = Basis(tuple(dirs))
        except ValueError:
            continue
        if product(full_smoothing_factor(b), Mask.delta(d).scaled(2**d)) == base:
            return True
    return False


def certify_base(base: Mask, pool: Sequence, max_L: int = 8) -> str:
    """``certified`` when ``base = e * s_W`` and that split is level contractive.

    A Haar-like base ``2^d s_W`` has a non-contractive split although it is
    the limit of positive schemes; such bases are reported as ``heuristic``.
    Anything else that cannot be certified is ``failed``.
    """
    if not _admissible(base):
        return "failed"
    d = base.dim
    for dirs in combinations(pool, d):
        try:
            W = Basis(tuple(dirs))
        except ValueError:
            continue
        try:
            e = divide_exact(base, full_smoothing_factor(W))
        except NotDivisible:
            continue
        try:
            contractivity(FactoredSymbol(e, (), (W,)), max_L=max_L)
            return "certified"
        except NotContractiveWithin:
            continue
    return "heuristic" if _haar_like(base, pool) else "failed"


_RANK = ("certified", "heuristic", "failed")


@dataclass(frozen=True)
class ClassReport:
    """Outcome of :func:`classify`."""

    j: int
    factorization: FactoredSymbol
    positive: bool
    eq5: bool
    base_convergence: str
    mask: Mask = field(repr=False)

    @property
    def in_class(self) -> bool:
        return self.positive and self.eq5 and self.base_convergence != "failed"

    @property
    def base_flags(self) -> dict:
        return {"positive": self.positive, "eq5": self.eq5, "base_convergence": self.base_convergence}

    def reconstructs(self) -> bool:
        return self.factorization.matches(self.mask)

    def to_text(self) -> str:
        f = self.factorization
        lines = [f"class j = {self.j}" + ("" if self.in_class else " (not in class C_0)")]
        for i, b in enumerate(f.full_factors, 1):
            lines.append(f"V_{i} = {list(b.vectors)}")
        lines.append(f"D = {list(f.extra_directions)}")
        base = ", ".join(f"{alpha}: {c}" for alpha, c in f.base.items())
        lines.append(f"base = {{{base}}}")
        lines.append(f"positive = {str(self.positive).lower()}")
        lines.append(f"eq5 = {str(self.eq5).lower()}")
        lines.append(f"base_convergence = {self.base_convergence}")
        return "\n".join(lines) + "\n"


def classify(
    a: Mask,
    V: BasisSequence | Basis | None = None,
    pool: Sequence | None = None,
    max_j: int | None = None,
    max_L: int = 8,
) -> ClassReport:
    """Factor ``a = base * s_D * prod_j s_{V_j}`` with the maximal admissible ``j``.

    When the base left by the maximal count cannot be shown to converge,
    ``j`` steps down until it can (or reaches 0).
    """
    d = a.dim
    V = _as_basis_sequence(V, d)
    pool = default_pool(d) if pool is None else default_pool(d, pool)
    positive = is_nonnegative(a)
    if not (positive and satisfies_eq5(a)):
        return ClassReport(0, FactoredSymbol(a), positive, satisfies_eq5(a), "failed", a)
    j, residual = extract_full_factors(a, V, max_j)
    while True:
        base, D = peel_directions(residual, pool)
        # greedy peeling can strand a base the residual itself would certify
        status = min((certify_base(m, pool, max_L) for m in (residual, base)), key=_RANK.index)
        if status != "failed" or j == 0:
            break
        # a non-convergent base means the mask only reaches a lower class
        residual = product(residual, full_smoothing_factor(V.basis(j)))
        j -= 1
    fact = FactoredSymbol(base, tuple(D), tuple(V.basis(i) for i in range(1, j + 1)))
    return ClassReport(j, fact, True, True, status, a)


@dataclass
class SmoothnessReport:
    j: list[int]
    window_start: int
    j_star: int
    symbolic: list[int] | None
    symbolic_exact: bool
    c_infinity: bool
    c_infinity_source: str
    reports: list[ClassReport] = field(repr=False, default_factory=list)

    @property
    def smoothness(self) -> int | None:
        """Certified ``C^(j* - 1)``, or None when ``j* = 0``."""
        return self.j_star - 1 if self.j_star >= 1 else None

    def to_text(self) -> str:
        lines = [f"j_k = {' '.join(map(str, self.j))}"]
        if self.symbolic is not None:
            label = "symbolic j_k" if self.symbolic_exact else "symbolic lower bound j_k"
            lines.append(f"{label} = {' '.join(map(str, self.symbolic))}")
        lines.append(f"window start m = {self.window_start}")
        lines.append(f"j* = {self.j_star}")
        s = self.smoothness
        lines.append("limits: " + (f"C^{s}" if s is not None else "no smoothness certified"))
        lines.append(f"C-infinity = {str(self.c_infinity).lower()} ({self.c_infinity_source})")
        return "\n".join(lines) + "\n"


def _best_window(js: list[int], window: int | None) -> tuple[int, int]:
    if window is not None:
        return window, min(js[window:])
    M = len(js)
    best_m, best = 0, min(js)
    for m in range(M // 2 + 1):
        val = min(js[m:])
        if val > best:
            best_m, best = m, val
    return best_m, best


def sequence_smoothness_report(
    seq: MaskSequence,
    V: BasisSequence | Basis | None = None,
    horizon: int = 16,
    window: int | None = None,
    pool: Sequence | None = None,
) -> SmoothnessReport:
    """Class indices ``j_k`` for ``k < horizon`` and the certified ``j*``.

    ``j*`` is ``min_{k >= m} j_k`` for the window start ``m <= horizon / 2``
    that maximises it, unless ``window`` fixes ``m``. The C-infinity flag is
    symbolic for the preset families and otherwise only reflects growth of
    ``j_k`` inside the inspected window.
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    if window is not None and not 0 <= window < horizon:
        raise ValueError("window start must lie inside the horizon")
    if V is None:
        V = BasisSequence.constant(seq.basis)
    reports = [classify(seq.mask(k), V, pool) for k in range(horizon)]
    js = [r.j if r.in_class else 0 for r in reports]
    m, j_star = _best_window(js, window)
    symbolic = None
    if seq.class_law is not None:
        symbolic = [seq.class_law(k) for k in range(horizon)]
        c_inf, source = True, "symbolic law"
    else:
        tail = js[m:]
        c_inf = all(x <= y for x, y in zip(tail, tail[1:])) and len(tail) > 1 and tail[-1] > tail[0]
        source = "window evidence"
    return SmoothnessReport(js, m, j_star, symbolic, seq.class_law_exact, c_inf, source, reports)

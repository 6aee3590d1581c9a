"""Operator norms, diagonal difference schemes and level contractivity."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as _cartesian

from .dyadic import DyadicRational
from .errors import MissingFullFactor, NotContractiveWithin
from .masks import (
    Basis,
    Direction,
    Mask,
    as_direction,
    directional_product,
    divide_exact,
    full_smoothing_factor,
    product,
)


def _coset_abs_norm(a: Mask, modulus: int) -> DyadicRational:
    sums: dict[tuple, int] = {}
    for alpha, v in a.integer_coefficients.items():
        eps = tuple(x % modulus for x in alpha)
        sums[eps] = sums.get(eps, 0) + abs(v)
    return DyadicRational(max(sums.values(), default=0), a.shift)


def operator_norm(a: Mask) -> DyadicRational:
    """Sup-norm of ``S_a``: the largest absolute sub-mask sum."""
    return _coset_abs_norm(a, 2)


def iterated_symbol(a: Mask, n: int) -> Mask:
    """Symbol ``a(z) a(z^2) ... a(z^(2^(n-1)))`` of ``S_a^n``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    out = a
    for i in range(1, n):
        out = product(out, a.dilate(2**i))
    return out


def iterated_norm(a: Mask, n: int) -> DyadicRational:
    """Sup-norm of ``S_a^n`` (cosets of the iterated symbol modulo ``2^n``)."""
    return _coset_abs_norm(iterated_symbol(a, n), 2**n)


@dataclass(frozen=True)
class FactoredSymbol:
    """Symbol written as ``base * s_D * prod_j s_{V_j}``.

    ``extra_directions`` is the multiset ``D`` (stored sorted, so equality is
    order-insensitive); ``full_factors`` are the bases ``V_1, ..., V_j``.
    """

    base: Mask
    extra_directions: tuple[Direction, ...] = ()
    full_factors: tuple[Basis, ...] = ()

    def __post_init__(self):
        d = self.base.dim
        dirs = tuple(sorted(as_direction(v, d) for v in self.extra_directions))
        object.__setattr__(self, "extra_directions", dirs)
        bases = tuple(b if isinstance(b, Basis) else Basis(tuple(b)) for b in self.full_factors)
        for b in bases:
            if b.dim != d:
                raise ValueError(f"basis {b.vectors} is not in dimension {d}")
        object.__setattr__(self, "full_factors", bases)

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def j(self) -> int:
        return len(self.full_factors)

    def symbol(self) -> Mask:
        out = product(self.base, directional_product(self.extra_directions, self.dim))
        for b in self.full_factors:
            out = product(out, full_smoothing_factor(b))
        return out

    def matches(self, mask: Mask) -> bool:
        return self.symbol() == mask


def single_factorization(c: Mask, basis: Basis) -> FactoredSymbol:
    """``c = (c / s_V) * s_V``: everything but one full factor goes into the base."""
    base = divide_exact(c, full_smoothing_factor(basis))
    return FactoredSymbol(base, (), (basis,))


@dataclass(frozen=True)
class DiagonalDifferenceScheme:
    basis: Basis
    diagonal_symbols: tuple[Mask, ...]


def _split(c: FactoredSymbol) -> tuple[Basis, Mask]:
    if not c.full_factors:
        raise MissingFullFactor("factored symbol has no full smoothing factor")
    first = c.full_factors[0]
    # later full factors behave like extra directions here
    rest = product(c.base, directional_product(c.extra_directions, c.dim))
    for b in c.full_factors[1:]:
        rest = product(rest, full_smoothing_factor(b))
    return first, rest


def difference_scheme(c: FactoredSymbol) -> DiagonalDifferenceScheme:
    """Diagonal difference scheme for the first full factor ``V``.

    ``b_ii = (rest / 2) * prod_{j != i} (1 + z^{v_j}) / 2``. With backward
    differences ``f - f(. - v_i)`` the commutation ``diff(S_c f) = S_{b_ii} diff f``
    is exact; forward differences pick up a translation by ``v_i``.
    """
    basis, rest = _split(c)
    half = rest.scaled(DyadicRational(1, 1))
    symbols = []
    for i in range(basis.dim):
        others = [v for j, v in enumerate(basis.vectors) if j != i]
        symbols.append(product(half, directional_product(others, c.dim)))
    return DiagonalDifferenceScheme(basis, tuple(symbols))


def divided_difference_symbols(c: FactoredSymbol) -> list[Mask]:
    """Symbols mapping first divided differences along each ``v_i`` between levels (``2 b_ii``)."""
    scheme = difference_scheme(c)
    return [b.scaled(2) for b in scheme.diagonal_symbols]


@dataclass(frozen=True)
class ContractivityReport:
    L: int
    rho: DyadicRational
    per_direction_norms: tuple[DyadicRational, ...]
    scheme: DiagonalDifferenceScheme = field(repr=False)

    @property
    def rho_float(self) -> float:
        return float(self.rho)


def contractivity(c: FactoredSymbol, max_L: int = 8) -> ContractivityReport:
    """Smallest ``L <= max_L`` with ``max_i ||S_{b_ii}^L|| < 1``.

    Raises :class:`NotContractiveWithin` when no such ``L`` exists.
    """
    if max_L < 1:
        raise ValueError("max_L must be at least 1")
    scheme = difference_scheme(c)
    history = []
    for L in range(1, max_L + 1):
        norms = tuple(iterated_norm(b, L) for b in scheme.diagonal_symbols)
        rho = max(norms)
        history.append(rho)
        if rho < 1:
            return ContractivityReport(L, rho, norms, scheme)
    raise NotContractiveWithin(max_L, history)


def coset_norms(a: Mask) -> dict[tuple, DyadicRational]:
    """Absolute sub-mask sums per coset (pre-maximum view of :func:`operator_norm`)."""
    sums = {eps: 0 for eps in _cartesian((0, 1), repeat=a.dim)}
    for alpha, v in a.integer_coefficients.items():
        sums[tuple(x & 1 for x in alpha)] += abs(v)
    return {eps: DyadicRational(s, a.shift) for eps, s in sums.items()}


"""Level-indexed mask families ``(a_k : k >= 0)``."""

from __future__ import annotations

from collections.abc import Callable, Sequence
from fractions import Fraction

from .masks import Basis, Mask, box3_mask, bspline_mask, product
from .operators import FactoredSymbol, single_factorization

PRESETS = ("univariate_up", "bivariate_up", "powers")


def _step_law_sum(r: int) -> Fraction:
    # sum_k 2^-(k+1) (floor(k/r) + 1) = (1 - 2^-r) * sum_m (m+1) 2^(-rm) = 2^r / (2^r - 1)
    return Fraction(2**r, 2**r - 1)


class MaskSequence:
    """A mask for every level ``k``, with optional support-growth law ``lambda_k``.

    Use the constructors :meth:`univariate_up`, :meth:`bivariate_up`,
    :meth:`powers`, :meth:`explicit`, :meth:`constant` and
    :meth:`from_function` rather than calling ``__init__`` directly.
    """

    def __init__(
        self,
        dim: int,
        kind: str,
        mask_fn: Callable[[int], Mask],
        *,
        r: int | None = None,
        lambda_law: Callable[[int], Fraction] | None = None,
        lambda_sum: Fraction | None = None,
        dominating_law: tuple[Fraction, Fraction] | None = None,
        class_law: Callable[[int], int] | None = None,
        class_law_exact: bool = True,
        basis: Basis | None = None,
        length: int | None = None,
        description: str = "",
    ):
        self.dim = dim
        self.kind = kind
        self.r = r
        self._mask_fn = mask_fn
        self._lambda_law = lambda_law
        self._lambda_sum = lambda_sum
        self.dominating_law = dominating_law
        # class_law is exact for the Up families and a lower bound for powers
        self.class_law = class_law
        self.class_law_exact = class_law_exact
        self.basis = basis or Basis.canonical(dim)
        self.length = length
        self.description = description or kind
        self._cache: dict[int, Mask] = {}

    def __repr__(self):
        return f"MaskSequence({self.description})"

    def mask(self, k: int) -> Mask:
        if k < 0:
            raise IndexError("levels start at 0")
        m = self._cache.get(k)
        if m is None:
            m = self._mask_fn(k)
            if m.dim != self.dim:
                raise ValueError(f"mask {k} has dimension {m.dim}, expected {self.dim}")
            self._cache[k] = m
        return m

    __getitem__ = mask

    def masks(self, n: int) -> list[Mask]:
        return [self.mask(k) for k in range(n)]

    @property
    def has_lambda_law(self) -> bool:
        return self._lambda_law is not None

    def lambda_(self, k: int) -> Fraction | None:
        return None if self._lambda_law is None else Fraction(self._lambda_law(k))

    @property
    def lambda_sum(self) -> Fraction | None:
        """Closed form of ``sum_k 2^-(k+1) lambda_k`` when known."""
        return self._lambda_sum

    @property
    def is_preset(self) -> bool:
        return self.kind in PRESETS

    def canonical_factorization(self, k: int) -> FactoredSymbol:
        """One full factor over the sequence basis, the rest in the base."""
        return single_factorization(self.mask(k), self.basis)

    # -- constructors -------------------------------------------------------

    @classmethod
    def univariate_up(cls, r: int = 1) -> "MaskSequence":
        """``a_{mr+j} = (1+z)^{m+1} / 2^m`` for ``0 <= j < r``."""
        r = _check_r(r)
        return cls(
            1,
            "univariate_up",
            lambda k: bspline_mask(k // r),
            r=r,
            lambda_law=lambda k: k // r + 1,
            lambda_sum=_step_law_sum(r),
            class_law=lambda k: k // r,
            basis=Basis(((1,),)),
            description=f"univariate_up(r={r})",
        )

    @classmethod
    def bivariate_up(cls, r: int = 1) -> "MaskSequence":
        """Three-directional box-spline masks, each held for ``r`` levels."""
        r = _check_r(r)
        return cls(
            2,
            "bivariate_up",
            lambda k: box3_mask(k // r),
            r=r,
            lambda_law=lambda k: k // r + 1,
            lambda_sum=_step_law_sum(r),
            class_law=lambda k: k // r,
            basis=Basis.canonical(2),
            description=f"bivariate_up(r={r})",
        )

    @classmethod
    def powers(cls, a: Mask, r: int = 1, basis: Basis | None = None) -> "MaskSequence":
        """``c_{kr+j} = 2^{-dk} a^{k+1}`` built from a positive base mask ``a``."""
        r = _check_r(r)
        d = a.dim
        cache = {0: a}

        def power(k: int) -> Mask:
            top = max(cache)
            while top < k:
                cache[top + 1] = product(cache[top], a).scaled(Fraction(1, 2**d))
                top += 1
            return cache[k]

        return cls(
            d,
            "powers",
            lambda l: power(l // r),
            r=r,
            lambda_law=lambda k: k // r + 1,
            lambda_sum=_step_law_sum(r),
            class_law=lambda k: k // r,
            class_law_exact=False,
            basis=basis,
            description=f"powers(r={r})",
        )

    @classmethod
    def explicit(cls, masks: Sequence[Mask], basis: Basis | None = None) -> "MaskSequence":
        """Given masks for levels ``0..n-1``; the last one repeats forever."""
        masks = list(masks)
        if not masks:
            raise ValueError("explicit sequence needs at least one mask")
        d = masks[0].dim
        n = len(masks)
        return cls(
            d,
            "explicit",
            lambda k: masks[min(k, n - 1)],
            basis=basis,
            length=n,
            description=f"explicit({n} masks)",
        )

    @classmethod
    def constant(cls, a: Mask, basis: Basis | None = None) -> "MaskSequence":
        seq = cls.explicit([a], basis=basis)
        seq.description = "stationary"
        return seq

    @classmethod
    def from_function(
        cls,
        fn: Callable[[int], Mask],
        dim: int,
        *,
        lambda_law: Callable[[int], Fraction] | None = None,
        dominating_law: tuple | None = None,
        basis: Basis | None = None,
    ) -> "MaskSequence":
        """Arbitrary level rule.

        ``dominating_law = (alpha, beta)`` asserts ``lambda_k <= alpha + beta k``
        for all ``k`` and is used to over-bound the support tail.
        """
        if dominating_law is not None:
            dominating_law = (Fraction(dominating_law[0]), Fraction(dominating_law[1]))
        return cls(
            dim,
            "function",
            fn,
            lambda_law=lambda_law,
            dominating_law=dominating_law,
            basis=basis,
            description="function",
        )


def _check_r(r: int) -> int:
    if int(r) != r or r < 1:
        raise ValueError("repetition count r must be a positive integer")
    return int(r)

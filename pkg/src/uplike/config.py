"""Flat ``key = value`` scheme description files.

Example::

    # figure-style run
    family = bivariate_up
    r = 2
    levels = 8

Mask references (``base``, ``masks``) take ``bspline(m)``, ``box3(m)``,
``@path`` for a serialized mask file, or an inline literal such as
``{0: 1, 1: 1/2}`` or ``{(0,0): 1/2, (1,1): 1/2}``. ``masks`` lists
several references separated by ``;``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .dyadic import DyadicRational
from .errors import SpecError
from .masks import Basis, Mask, box3_mask, bspline_mask, loads
from .sequences import MaskSequence

FAMILIES = ("univariate_up", "bivariate_up", "powers", "explicit")

KEYS = {
    "dim", "family", "r", "levels", "inner", "out", "threshold", "basis",
    "directions", "base", "masks", "max_L", "horizon", "exact", "window", "cap",
}

_VECTOR = re.compile(r"\(([^()]*)\)")
_ENTRY = re.compile(r"(\([^()]*\)|[+-]?\d+)\s*:\s*([^,{}()]+)")


@dataclass
class SchemeSpec:
    family: str
    dim: int | None = None
    r: int = 1
    levels: int | None = None
    inner: int | None = None
    out: str | None = None
    threshold: float = 0.0
    basis: tuple | None = None
    directions: tuple = ()
    base: str | None = None
    masks: list[str] = field(default_factory=list)
    max_L: int = 8
    horizon: int = 16
    exact: bool = False
    window: int | None = None
    cap: int | None = None
    source: Path | None = None

    def resolved_dim(self) -> int:
        if self.family == "univariate_up":
            return 1
        if self.family == "bivariate_up":
            return 2
        if self.dim is not None:
            return self.dim
        return self.sequence().dim

    def sequence(self) -> MaskSequence:
        """The mask sequence described by this spec."""
        basis = Basis(self.basis) if self.basis else None
        if self.family == "univariate_up":
            seq = MaskSequence.univariate_up(self.r)
        elif self.family == "bivariate_up":
            seq = MaskSequence.bivariate_up(self.r)
        elif self.family == "powers":
            if self.base is None:
                raise SpecError("family 'powers' needs a 'base' mask")
            seq = MaskSequence.powers(self._mask(self.base), self.r, basis=basis)
        else:
            if not self.masks:
                raise SpecError("family 'explicit' needs a 'masks' list")
            seq = MaskSequence.explicit([self._mask(m) for m in self.masks], basis=basis)
        if self.dim is not None and seq.dim != self.dim:
            raise SpecError(f"dim = {self.dim} but the masks have dimension {seq.dim}")
        if basis is not None and basis.dim != seq.dim:
            raise SpecError("basis dimension does not match the masks")
        if basis is not None:
            seq.basis = basis
        return seq

    def _mask(self, ref: str) -> Mask:
        base = self.source.parent if self.source else Path.cwd()
        return parse_mask_ref(ref, dim=self.dim, base_dir=base)


def parse_vector_list(text: str) -> tuple[tuple[int, ...], ...]:
    vecs = _VECTOR.findall(text)
    if not vecs:
        raise SpecError(f"expected vectors like (1,0),(0,1), got {text!r}")
    try:
        return tuple(tuple(int(x) for x in v.split(",")) for v in vecs)
    except ValueError:
        raise SpecError(f"non-integer vector entry in {text!r}") from None


def parse_mask_literal(text: str, dim: int | None = None) -> Mask:
    body = text.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise SpecError(f"mask literal must be enclosed in braces: {text!r}")
    entries = _ENTRY.findall(body)
    if not entries and body[1:-1].strip():
        raise SpecError(f"could not read mask literal {text!r}")
    coeffs = {}
    for key, value in entries:
        if key.startswith("("):
            alpha = tuple(int(x) for x in key[1:-1].split(","))
        else:
            alpha = (int(key),)
        try:
            coeffs[alpha] = DyadicRational.parse(value.strip())
        except (ValueError, ArithmeticError) as exc:
            raise SpecError(f"bad coefficient {value.strip()!r}: {exc}") from None
    if dim is None:
        dim = len(next(iter(coeffs))) if coeffs else 1
    try:
        return Mask(coeffs, dim)
    except ValueError as exc:
        raise SpecError(str(exc)) from None


def parse_mask_ref(ref: str, dim: int | None = None, base_dir: Path | None = None) -> Mask:
    ref = ref.strip()
    m = re.fullmatch(r"(bspline|box3)\(\s*(\d+)\s*\)", ref)
    if m:
        fam, idx = m.group(1), int(m.group(2))
        return bspline_mask(idx) if fam == "bspline" else box3_mask(idx)
    if ref.startswith("@"):
        path = Path(ref[1:].strip())
        if not path.is_absolute() and base_dir is not None:
            path = base_dir / path
        try:
            return loads(path.read_text())
        except OSError as exc:
            raise SpecError(f"cannot read mask file {path}: {exc}") from None
        except ValueError as exc:
            raise SpecError(f"bad mask file {path}: {exc}") from None
    return parse_mask_literal(ref, dim)


def _int(key: str, value: str, minimum: int | None = None) -> int:
    try:
        n = int(value)
    except ValueError:
        raise SpecError(f"{key} must be an integer, got {value!r}") from None
    if minimum is not None and n < minimum:
        raise SpecError(f"{key} must be at least {minimum}")
    return n


def _bool(key: str, value: str) -> bool:
    v = value.lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise SpecError(f"{key} must be true or false, got {value!r}")


def parse_spec(text: str, source: Path | None = None) -> SchemeSpec:
    """Parse a spec file body. Unknown keys and malformed lines raise :class:`SpecError`."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise SpecError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise SpecError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
    family = raw.get("family")
    if family is None:
        raise SpecError("missing required key 'family'")
    if family not in FAMILIES:
        raise SpecError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")
    spec = SchemeSpec(family=family, source=source)
    for key, value in raw.items():
        if key in ("dim", "levels", "inner", "horizon", "max_L", "cap"):
            setattr(spec, key, _int(key, value, 1))
        elif key == "r":
            spec.r = _int(key, value, 1)
        elif key == "window":
            spec.window = _int(key, value, 0)
        elif key == "threshold":
            try:
                spec.threshold = float(Fraction(value))
            except (ValueError, ZeroDivisionError):
                raise SpecError(f"threshold must be a number, got {value!r}") from None
            if spec.threshold < 0:
                raise SpecError("threshold must be nonnegative")
        elif key == "exact":
            spec.exact = _bool(key, value)
        elif key == "basis":
            spec.basis = parse_vector_list(value)
        elif key == "directions":
            spec.directions = parse_vector_list(value)
        elif key == "masks":
            spec.masks = [m for m in (s.strip() for s in value.split(";")) if m]
        elif key in ("out", "base"):
            setattr(spec, key, value)
    return spec


def load_spec(path) -> SchemeSpec:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SpecError(f"cannot read spec file {path}: {exc}") from None
    return parse_spec(text, source=path)

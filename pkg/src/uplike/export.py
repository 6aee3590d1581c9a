"""Plain PGM heightmaps of bivariate lattice data.

Format (byte-exact): ``P2\\n<W> <H>\\n65535\\n`` followed by ``H`` rows of
``W`` decimal integers separated by single spaces, rows wrapped so that no
line exceeds 70 characters, every line ending in ``\\n``. Column ``i`` is
the first lattice index ``origin_1 + i``; row ``j`` is the second index
``origin_2 + j``, so ``y`` increases downward. Pixel values are
``round(65535 * v / max)`` with negative samples clipped to 0; all-zero or
all-negative data give a black image.
"""

from __future__ import annotations

import numpy as np

from .lattice import LatticeData

MAXVAL = 65535


def heightmap(data: LatticeData) -> np.ndarray:
    """Integer pixel array of shape ``(H, W)``."""
    if data.dim != 2:
        raise ValueError("heightmaps need bivariate data")
    vals = np.clip(data.to_float(), 0.0, None)
    top = float(vals.max()) if vals.size else 0.0
    if top <= 0:
        return np.zeros(vals.shape[::-1], dtype=np.int64)
    pix = np.rint(vals * (MAXVAL / top)).astype(np.int64)
    return np.clip(pix, 0, MAXVAL).T


def _wrapped(tokens: list[str], width: int = 70):
    line = ""
    for t in tokens:
        if line and len(line) + 1 + len(t) > width:
            yield line
            line = t
        else:
            line = f"{line} {t}" if line else t
    if line:
        yield line


def pgm_text(data: LatticeData) -> str:
    pix = heightmap(data)
    H, W = pix.shape
    out = [f"P2\n{W} {H}\n{MAXVAL}\n"]
    for row in pix:
        out.extend(line + "\n" for line in _wrapped([str(int(v)) for v in row]))
    return "".join(out)


def write_pgm(path, data: LatticeData) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(pgm_text(data))


def read_pgm(path) -> np.ndarray:
    """Parse a plain PGM file back into an ``(H, W)`` array."""
    with open(path) as fh:
        tokens = fh.read().split()
    if not tokens or tokens[0] != "P2":
        raise ValueError("not a plain PGM file")
    W, H, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    body = np.array([int(t) for t in tokens[4:]], dtype=np.int64)
    if body.size != W * H or (body.size and body.max() > maxval):
        raise ValueError("PGM body does not match its header")
    return body.reshape(H, W)

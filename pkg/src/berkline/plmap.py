"""Continuous, strictly increasing piecewise-affine maps of (-inf, +inf] onto itself."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .valuation import INF, ExtRational, ext


@dataclass(frozen=True)
class PLMap:
    """Pieces ((b_0 = inf, k_0, c_0), (b_1, k_1, c_1), ...).

    On (b_{i+1}, b_i] the map is t -> k_i t + c_i; the last piece extends to
    -inf.  Breakpoints strictly decrease, slopes are positive rationals, and
    the map is continuous.  inf maps to inf.
    """

    pieces: tuple

    def __post_init__(self):
        if not self.pieces or self.pieces[0][0] is not INF:
            raise ValueError("first piece must start at +inf")
        for (b0, k0, c0), (b1, k1, c1) in zip(self.pieces, self.pieces[1:]):
            if not b1 < b0:
                raise ValueError("breakpoints must strictly decrease")
            if k0 * b1 + c0 != k1 * b1 + c1:
                raise ValueError(f"discontinuity at {b1}")
        for _, k, _ in self.pieces:
            if not k > 0:
                raise ValueError("slopes must be positive")

    @classmethod
    def identity(cls) -> "PLMap":
        return cls(((INF, Fraction(1), Fraction(0)),))

    @property
    def breakpoints(self) -> list:
        return [b for b, _, _ in self.pieces[1:]]

    def piece_index(self, t) -> int:
        """Index of the piece whose half-open interval (b_{i+1}, b_i] contains t."""
        i = 0
        while i + 1 < len(self.pieces) and t <= self.pieces[i + 1][0]:
            i += 1
        return i

    def __call__(self, t) -> ExtRational:
        t = ext(t)
        if t is INF:
            return INF
        _, k, c = self.pieces[self.piece_index(t)]
        return k * t + c

    def inverse(self) -> "PLMap":
        out = []
        for b, k, c in self.pieces:
            nb = INF if b is INF else k * b + c
            out.append((nb, 1 / k, -c / k))
        return PLMap(tuple(out))

    def compose(self, inner: "PLMap") -> "PLMap":
        """self o inner."""
        inv = inner.inverse()
        cuts = set(inner.breakpoints) | {inv(b) for b in self.breakpoints}
        cuts = sorted(cuts, reverse=True)
        uppers = [INF] + cuts
        pieces = []
        for j, b in enumerate(uppers):
            lower = uppers[j + 1] if j + 1 < len(uppers) else None
            if b is INF:
                probe = (lower + 1) if lower is not None else Fraction(0)
            elif lower is None:
                probe = b - 1
            else:
                probe = (b + lower) / 2
            _, k1, c1 = inner.pieces[inner.piece_index(probe)]
            _, k2, c2 = self.pieces[self.piece_index(inner(probe))]
            pieces.append((b, k2 * k1, k2 * c1 + c2))
        return PLMap(_merge(pieces))


def _merge(pieces: Sequence) -> tuple:
    out = [pieces[0]]
    for b, k, c in pieces[1:]:
        if k == out[-1][1] and c == out[-1][2]:
            continue
        out.append((b, k, c))
    return tuple(out)

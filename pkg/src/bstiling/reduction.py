"""Compile a piecewise affine map on unit squares into a tile set on BS(m, n).

This is the vector version of the multiply-by-q tiles.  Colors are
2-vectors.  A tile for branch i has its n top digit vectors in U_i's digit
box {u, u+1}^2, its m bottom digit vectors in the digit box of one
(per tile) target square, and carries on a (1/denom) grid inside
[-C, C]^2.  It satisfies, componentwise and exactly,

    M_i (sum top)/n + b_i + c = (sum bottom)/m + d.

Vertical colors are (carry vector, "f<i>"), so a whole row of tiles uses a
single branch.

The bound C is generous rather than tight; see :func:`carry_box`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence

from .group import GroupParams
from .tiles import ParseError, Tile, TileSet


class ValidationError(ValueError):
    pass


Vec = tuple  # (Fraction, Fraction)


@dataclass(frozen=True)
class AffineBranch:
    M: tuple          # ((m11, m12), (m21, m22))
    b: Vec
    corner: tuple     # integer lower-left corner of the closed unit square

    def __post_init__(self):
        M = tuple(tuple(Fraction(v) for v in row) for row in self.M)
        if len(M) != 2 or any(len(row) != 2 for row in M):
            raise ValidationError("M must be 2x2")
        b = tuple(Fraction(v) for v in self.b)
        if len(b) != 2:
            raise ValidationError("b must be a 2-vector")
        if len(self.corner) != 2 or any(int(c) != c for c in self.corner):
            raise ValidationError("corner must be two integers")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "corner", tuple(int(c) for c in self.corner))

    def contains(self, x: Vec) -> bool:
        return all(u <= xc <= u + 1 for u, xc in zip(self.corner, x))

    def __call__(self, x: Vec) -> Vec:
        return tuple(sum(self.M[r][c] * x[c] for c in range(2)) + self.b[r] for r in range(2))

    def digits(self) -> tuple[Vec, ...]:
        """Digit vectors a level representing a point of the square may use."""
        u1, u2 = self.corner
        return tuple((Fraction(x), Fraction(y)) for x in (u1, u1 + 1) for y in (u2, u2 + 1))


@dataclass(frozen=True)
class AffineSystem:
    branches: tuple

    def __post_init__(self):
        object.__setattr__(self, "branches", tuple(self.branches))

    def __call__(self, x: Vec) -> Optional[Vec]:
        for br in self.branches:
            if br.contains(x):
                return br(x)
        return None


def _squares_disjoint(u, v) -> bool:
    # closed unit squares with integer corners meet unless some axis gap is >= 2
    return any(abs(a - b) >= 2 for a, b in zip(u, v))


def validate_system(sys: AffineSystem) -> bool:
    if not sys.branches:
        return False
    cs = [br.corner for br in sys.branches]
    return all(_squares_disjoint(cs[i], cs[j]) for i in range(len(cs)) for j in range(i + 1, len(cs)))


def default_denom(sys: AffineSystem, p: GroupParams) -> int:
    d = p.m
    for br in sys.branches:
        for v in [*br.M[0], *br.M[1], *br.b]:
            d = math.lcm(d, v.denominator)
    return d


@dataclass(frozen=True)
class CarryBox:
    bound: Fraction
    denom: int

    def grid(self) -> list[Fraction]:
        k = math.floor(self.bound * self.denom)
        return [Fraction(i, self.denom) for i in range(-k, k + 1)]

    def contains(self, v: Vec) -> bool:
        return all(-self.bound <= x <= self.bound and (x * self.denom).denominator == 1 for x in v)


def carry_box(sys: AffineSystem, p: GroupParams, denom: Optional[int] = None) -> CarryBox:
    """[-C, C]^2 with C = max_i (row-sum norm of M_i + max |b_i| + 2).

    Conservative: it bounds the floor-error carries of a coloring that
    follows an orbit, with room to spare.
    """
    if denom is None:
        denom = default_denom(sys, p)
    if denom < 1:
        raise ValueError("denom must be positive")
    C = max(max(sum(abs(v) for v in row) for row in br.M) + max(abs(v) for v in br.b) + 2
            for br in sys.branches)
    return CarryBox(Fraction(C), denom)


def _vec_sum(vs) -> Vec:
    return (sum(v[0] for v in vs), sum(v[1] for v in vs))


def tile_relation_holds(br: AffineBranch, t: Tile, p: GroupParams) -> bool:
    st, sb = _vec_sum(t.top), _vec_sum(t.bottom)
    avg_top = (st[0] / p.n, st[1] / p.n)
    lhs = br(avg_top)
    return all(lhs[c] + t.left[c] == sb[c] / p.m + t.right[c] for c in range(2))


def branch_mode(i: int) -> str:
    return f"f{i}"


def compile_system(sys: AffineSystem, p: GroupParams, denom: Optional[int] = None) -> TileSet:
    """Enumerate every vector tile of every branch (see module docstring)."""
    if not validate_system(sys):
        raise ValidationError("branch squares must be non-empty, integer-cornered and pairwise disjoint")
    box = carry_box(sys, p, denom)
    D = box.denom
    K = math.floor(box.bound * D)
    # one shared Fraction per grid point k/D
    grid = {k: Fraction(k, D) for k in range(-K, K + 1)}
    tiles = []
    for i, br in enumerate(sys.branches):
        mode = branch_mode(i)
        for top in product(br.digits(), repeat=p.n):
            st = _vec_sum(top)
            image = br((st[0] / p.n, st[1] / p.n))
            for fam, target in enumerate(sys.branches):
                for bottom in product(target.digits(), repeat=p.m):
                    sb = _vec_sum(bottom)
                    gap = [(image[c] - sb[c] / p.m) * D for c in range(2)]   # d - c, in grid units
                    if any(g.denominator != 1 for g in gap):
                        continue
                    g0, g1 = int(gap[0]), int(gap[1])
                    ks0 = range(max(-K, -K - g0), min(K, K - g0) + 1)
                    ks1 = range(max(-K, -K - g1), min(K, K - g1) + 1)
                    for k0 in ks0:
                        for k1 in ks1:
                            tiles.append(Tile(mode, top, bottom, (grid[k0], grid[k1]),
                                              (grid[k0 + g0], grid[k1 + g1]), fam))
    return TileSet(p, tiles)


@dataclass
class ProbeResult:
    survived: bool
    escaped_at: Optional[int]
    trajectory: list

    def __str__(self):
        if self.survived:
            return f"survived {len(self.trajectory) - 1} steps"
        return f"escaped at step {self.escaped_at}"


def immortality_probe(sys: AffineSystem, x0: Sequence, steps: int) -> ProbeResult:
    """Iterate f from x0 until it leaves the domain or ``steps`` run out.

    escaped_at is the first i with f^i(x0) outside the domain.  Surviving is
    evidence, not proof, of immortality.
    """
    x = tuple(Fraction(v) for v in x0)
    traj = [x]
    for i in range(steps + 1):
        y = sys(x)
        if y is None:
            return ProbeResult(False, i, traj)
        if i == steps:
            break
        x = y
        traj.append(x)
    return ProbeResult(True, None, traj)


# -- file format -------------------------------------------------------------------

def system_to_json(sys: AffineSystem) -> dict:
    return {"branches": [{"M": [[str(v) for v in row] for row in br.M],
                          "b": [str(v) for v in br.b],
                          "corner": list(br.corner)} for br in sys.branches]}


def system_from_json(data) -> AffineSystem:
    try:
        branches = tuple(AffineBranch(tuple(tuple(Fraction(v) for v in row) for row in rec["M"]),
                                      tuple(Fraction(v) for v in rec["b"]),
                                      tuple(rec["corner"]))
                         for rec in data["branches"])
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad affine system: {exc}") from None
    return AffineSystem(branches)


def load_system(text: str) -> AffineSystem:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    return system_from_json(data)


def identity_system() -> AffineSystem:
    return AffineSystem((AffineBranch(((1, 0), (0, 1)), (0, 0), (0, 0)),))


def escape_system() -> AffineSystem:
    return AffineSystem((AffineBranch(((1, 0), (0, 1)), (2, 2), (0, 0)),))


def scaling_system() -> AffineSystem:
    return AffineSystem((
        AffineBranch(((2, 0), (0, 2)), (0, 0), (0, 0)),
        AffineBranch(((Fraction(1, 2), 0), (0, Fraction(1, 2))), (0, 0), (2, 2)),
    ))

"""Tiles on BS(m, n) and the multiply-by-q tile sets.

A tile is the pattern seen at an anchor g: ``bottom`` holds the m colors
of g -> ga -> ... -> ga^m, ``top`` the n colors of gb -> gba -> ... -> gba^n,
``left`` the carry on g -> gb and ``right`` the carry on ga^m -> ga^m b.
Vertical edges carry the pair (carry, mode), so two vertical edges match
only when both agree.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from itertools import product
from typing import Any, Iterable, NamedTuple, Sequence

from .group import GroupParams, BS32

MODE_Q2 = "q2"
MODE_Q23 = "q23"

DIGITS_01 = (Fraction(0), Fraction(1))
DIGITS_12 = (Fraction(1), Fraction(2))
THIRDS = (Fraction(0), Fraction(1, 3), Fraction(2, 3))


class ParseError(ValueError):
    def __init__(self, message, line=None, col=None):
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {col}" if col is not None else "") + ")"
        super().__init__(message + where)
        self.line = line
        self.col = col


class Carry(NamedTuple):
    """Color of a vertical (b-)edge."""

    value: Any
    mode: str


def color_key(c):
    """Cheap hashable stand-in for a color; hashing Fractions directly is slow."""
    t = type(c)
    if t is Fraction:
        return (c.numerator, c.denominator)
    if t is Carry:
        return (color_key(c.value), c.mode)
    if t is tuple:
        return tuple(color_key(x) for x in c)
    if t is int:
        return (c, 1)
    return color_key(Fraction(c))


def mode_name(q: Fraction) -> str:
    q = Fraction(q)
    return f"q{q.numerator}" if q.denominator == 1 else f"q{q.numerator}{q.denominator}"


@dataclass(frozen=True)
class Tile:
    mode: str
    top: tuple
    bottom: tuple
    left: Any
    right: Any
    # index of the bottom alphabet the tile was drawn from; not part of matching
    family: int = 0

    @property
    def pattern(self) -> tuple:
        """Matching key: what an edge coloring must show at an anchor."""
        return (self.bottom, self.top, Carry(self.left, self.mode), Carry(self.right, self.mode))

    @property
    def pattern_key(self) -> tuple:
        return (color_key(self.bottom), color_key(self.top), color_key(self.left),
                color_key(self.right), self.mode)

    @property
    def key(self) -> tuple:
        return self.pattern_key + (self.family,)


def check_relation(t: Tile, q, p: GroupParams = BS32) -> bool:
    """q * avg(top) + left == avg(bottom) + right, exactly."""
    q = Fraction(q)
    return q * Fraction(sum(t.top), p.n) + t.left == Fraction(sum(t.bottom), p.m) + t.right


class TileSet:
    """A finite set of tiles on one group.

    Construction order is kept (it is deterministic for every producer in
    this package) and duplicates are dropped; equality is set equality.
    """

    def __init__(self, group: GroupParams, tiles: Iterable[Tile]):
        self.group = group
        index = {}
        for t in tiles:
            if len(t.top) != group.n or len(t.bottom) != group.m:
                raise ValueError(f"tile {t} does not fit {group}")
            index.setdefault(t.key, t)
        self._index = index
        self.tiles = tuple(index.values())

    def __len__(self):
        return len(self.tiles)

    def __iter__(self):
        return iter(self.tiles)

    def __contains__(self, t):
        return t.key in self._index

    def __eq__(self, other):
        return (isinstance(other, TileSet) and self.group == other.group
                and self._index.keys() == other._index.keys())

    def __repr__(self):
        return f"TileSet({self.group}, {len(self.tiles)} tiles, modes {self.modes()})"

    def by_mode(self, mode: str) -> "TileSet":
        return TileSet(self.group, (t for t in self.tiles if t.mode == mode))

    def patterns(self) -> set:
        return {t.pattern for t in self.tiles}

    def pattern_keys(self) -> set:
        return {k[:-1] for k in self._index}

    def modes(self) -> list[str]:
        return sorted({t.mode for t in self.tiles})

    def __or__(self, other: "TileSet") -> "TileSet":
        if other.group != self.group:
            raise ValueError("cannot merge tile sets on different groups")
        return TileSet(self.group, self.tiles + other.tiles)


def enumerate_generic(p: GroupParams, q, top_alphabet: Sequence, bottom_alphabets: Sequence[Sequence],
                      carry_set: Sequence, mode: str) -> TileSet:
    """Every tile over the alphabets that multiplies by q.

    Each tile takes all its bottom colors from a single entry of
    ``bottom_alphabets``; a bottom row that fits several alphabets yields one
    tile per alphabet (distinct ``family``).
    """
    q = Fraction(q)
    carries = sorted(set(Fraction(c) for c in carry_set))
    carry_lookup = set(carries)
    tiles = []
    for top in product(top_alphabet, repeat=p.n):
        lhs = q * Fraction(sum(top), p.n)
        for fam, alphabet in enumerate(bottom_alphabets):
            for bottom in product(alphabet, repeat=p.m):
                gap = lhs - Fraction(sum(bottom), p.m)   # right - left
                for c in carries:
                    d = c + gap
                    if d in carry_lookup:
                        tiles.append(Tile(mode, tuple(map(Fraction, top)), tuple(map(Fraction, bottom)),
                                          c, d, fam))
    return TileSet(p, tiles)


def enumerate_times2() -> TileSet:
    return enumerate_generic(BS32, 2, DIGITS_01, [DIGITS_12], THIRDS, MODE_Q2)


def enumerate_times23() -> TileSet:
    return enumerate_generic(BS32, Fraction(2, 3), DIGITS_12, [DIGITS_01, DIGITS_12], [0], MODE_Q23)


def kari_bs32_tileset() -> TileSet:
    """The 46-tile set: 36 tiles multiplying by 2 and 10 multiplying by 2/3."""
    return enumerate_times2() | enumerate_times23()


# -- serialization -------------------------------------------------------------

def color_to_json(c):
    if isinstance(c, tuple):
        return [str(Fraction(v)) for v in c]
    return str(Fraction(c))


@lru_cache(maxsize=4096)
def _rational(v) -> Fraction:
    # large compiled sets repeat a handful of values many times
    return Fraction(v)


def color_from_json(v):
    if isinstance(v, list):
        return tuple(color_from_json(x) for x in v)
    if isinstance(v, (str, int)) and not isinstance(v, bool):
        return _rational(v)
    raise TypeError(f"expected a rational string or a list of them, got {v!r}")


def tile_to_json(t: Tile, enc=color_to_json) -> dict:
    d = {
        "top": [enc(c) for c in t.top],
        "bottom": [enc(c) for c in t.bottom],
        "left": enc(t.left),
        "right": enc(t.right),
        "mode": t.mode,
    }
    if t.family:
        d["family"] = t.family
    return d


def _cached_encoder():
    cache = {}

    def enc(c):
        k = color_key(c)
        if k not in cache:
            cache[k] = color_to_json(c)
        return cache[k]
    return enc


def tileset_to_json(ts: TileSet) -> dict:
    enc = _cached_encoder()
    return {"group": {"m": ts.group.m, "n": ts.group.n},
            "tiles": [tile_to_json(t, enc) for t in ts.tiles]}


def serialize_tileset(ts: TileSet) -> str:
    """JSON text with one tile per line."""
    data = tileset_to_json(ts)
    dump = json.JSONEncoder(separators=(",", ":")).encode
    lines = [f'{{"group":{dump(data["group"])},"tiles":[']
    lines += [dump(t) + ("," if i < len(data["tiles"]) - 1 else "") for i, t in enumerate(data["tiles"])]
    lines.append("]}")
    return "\n".join(lines) + "\n"


def tileset_from_json(data) -> TileSet:
    try:
        p = GroupParams(int(data["group"]["m"]), int(data["group"]["n"]))
        raw = data["tiles"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad tile-set header: {exc}") from None
    tiles = []
    for i, rec in enumerate(raw):
        try:
            top = tuple(color_from_json(c) for c in rec["top"])
            bottom = tuple(color_from_json(c) for c in rec["bottom"])
            t = Tile(str(rec["mode"]), top, bottom, color_from_json(rec["left"]),
                     color_from_json(rec["right"]), int(rec.get("family", 0)))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"tile #{i}: {exc}") from None
        if len(top) != p.n or len(bottom) != p.m:
            raise ParseError(f"tile #{i}: expected {p.n} top and {p.m} bottom colors, "
                             f"got {len(top)} and {len(bottom)}")
        tiles.append(t)
    return TileSet(p, tiles)


def parse_tileset(text: str) -> TileSet:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    return tileset_from_json(data)


def format_tile(t: Tile) -> str:
    def s(c):
        return "(" + ",".join(map(str, c)) + ")" if isinstance(c, tuple) else str(c)
    return (f"{t.mode:>4}  top {' '.join(s(c) for c in t.top):<8} "
            f"bottom {' '.join(s(c) for c in t.bottom):<10} c={s(t.left):<4} d={s(t.right)}")


def tile_rows(ts: Iterable[Tile]) -> list[str]:
    return [format_tile(t) for t in ts]

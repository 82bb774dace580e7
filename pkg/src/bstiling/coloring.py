"""The projection-invariant edge coloring built from an orbit of the map T.

Every label depends only on the plane position (alpha, beta) of the edge's
source.  Along a level at height beta consecutive vertices differ by
(n/m)^beta in alpha, so labels are evaluated in the level coordinate
u = (m/n)^beta * alpha, in which a-steps have unit length:

    a-edge:  floor((u + 1) x) - floor(u x)                  x = x_beta
    b-edge:  (q/n) floor((n/m) u x / q) - (1/m) floor(u x) + (q/n - 1/m)

The constant q/n - 1/m is the same on every vertical edge of a given mode,
so it cancels in the tile relation and moves the carries into (-1/m, q/n).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .dynsys import Orbit
from .group import BS32, GroupParams, NormalForm, PlanePoint, multiply, normalize, project
from .tiles import Carry, ParseError, TileSet, color_from_json, color_key, color_to_json, mode_name

GENERATORS = ("a", "b")


class OrbitWindowError(ValueError):
    pass


class IncompletePattern(KeyError):
    def __init__(self, anchor, missing):
        super().__init__(f"anchor {anchor.word or 'e'} is missing edges "
                         + ", ".join(f"({g.word or 'e'},{gen})" for g, gen in missing))
        self.anchor = anchor
        self.missing = missing


def _require(orbit: Orbit, k: int):
    if not orbit.covers(k):
        raise OrbitWindowError(f"orbit window [{orbit.k_min},{orbit.k_max}] does not cover height {k}")


def _check_group(p: GroupParams, experimental: bool):
    if p != BS32 and not experimental:
        raise ValueError(f"the coloring is defined for BS(3,2); pass experimental=True for {p}")


def level_coordinate(p: GroupParams, pt: PlanePoint) -> Fraction:
    r = p.ratio
    return pt.alpha * (r ** pt.beta)


def gamma_a_label(orbit: Orbit, pt: PlanePoint, p: GroupParams = BS32, experimental=False) -> Fraction:
    _check_group(p, experimental)
    _require(orbit, pt.beta)
    x = orbit.x(pt.beta)
    u = level_coordinate(p, pt)
    return Fraction(math.floor((u + 1) * x) - math.floor(u * x))


def gamma_b_label(orbit: Orbit, pt: PlanePoint, p: GroupParams = BS32, experimental=False) -> Carry:
    _check_group(p, experimental)
    _require(orbit, pt.beta)
    _require(orbit, pt.beta - 1)
    q = orbit.q(pt.beta)
    x = orbit.x(pt.beta)
    u = level_coordinate(p, pt)
    up = u / p.ratio   # level coordinate of g.b one level up
    t = (q / p.n) * math.floor(up * x / q) - Fraction(1, p.m) * math.floor(u * x)
    return Carry(t + q / p.n - Fraction(1, p.m), mode_name(q))


class Patch:
    """Finite partial edge coloring keyed by (element, generator)."""

    def __init__(self, group: GroupParams, edges: Optional[dict] = None):
        self.group = group
        self.edges = dict(edges or {})

    def __getitem__(self, key):
        return self.edges[key]

    def __contains__(self, key):
        return key in self.edges

    def __len__(self):
        return len(self.edges)

    def __iter__(self):
        return iter(self.edges)

    def __eq__(self, other):
        return isinstance(other, Patch) and self.group == other.group and self.edges == other.edges

    def get(self, key, default=None):
        return self.edges.get(key, default)

    def items(self):
        return self.edges.items()

    def sources(self) -> list[NormalForm]:
        return sorted({g for g, _ in self.edges}, key=NormalForm.sort_key)

    def sorted_items(self):
        return sorted(self.edges.items(), key=lambda kv: (kv[0][0].word, kv[0][1]))

    def restrict(self, keys: Iterable) -> "Patch":
        return Patch(self.group, {k: self.edges[k] for k in keys if k in self.edges})


def build_patch(p: GroupParams, orbit: Orbit, region: Iterable, experimental=False) -> Patch:
    """Label every a- and b-edge leaving the region."""
    _check_group(p, experimental)
    edges = {}
    for g in region:
        g = normalize(p, g)
        pt = project(p, g)
        edges[(g, "a")] = gamma_a_label(orbit, pt, p, experimental)
        edges[(g, "b")] = gamma_b_label(orbit, pt, p, experimental)
    return Patch(p, edges)


@dataclass(frozen=True)
class AnchorPattern:
    bottom: tuple
    top: tuple
    left: Carry
    right: Carry

    @property
    def key(self) -> tuple:
        return (self.bottom, self.top, self.left, self.right)

    @property
    def pattern_key(self) -> Optional[tuple]:
        if type(self.left) is not Carry or type(self.right) is not Carry or self.left.mode != self.right.mode:
            return None
        return (color_key(self.bottom), color_key(self.top), color_key(self.left.value),
                color_key(self.right.value), self.left.mode)


def shape_edges(p: GroupParams, g: NormalForm) -> tuple[list, list, tuple, tuple]:
    """Edge keys (bottom, top, left, right) of the tile shape anchored at g."""
    bottom, h = [], g
    for _ in range(p.m):
        bottom.append((h, "a"))
        h = multiply(p, h, "a")
    right = (h, "b")
    top, h = [], multiply(p, g, "b")
    for _ in range(p.n):
        top.append((h, "a"))
        h = multiply(p, h, "a")
    return bottom, top, (g, "b"), right


def extract_pattern(patch: Patch, anchor) -> AnchorPattern:
    p = patch.group
    anchor = normalize(p, anchor)
    bottom, top, left, right = shape_edges(p, anchor)
    missing = [k for k in bottom + top + [left, right] if k not in patch]
    if missing:
        raise IncompletePattern(anchor, missing)
    return AnchorPattern(tuple(patch[k] for k in bottom), tuple(patch[k] for k in top),
                         patch[left], patch[right])


@dataclass
class Violation:
    anchor: NormalForm
    pattern: AnchorPattern


@dataclass
class VerificationReport:
    checked: int
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations

    def __len__(self):
        return len(self.violations)


def verify_patch(patch: Patch, ts: TileSet) -> VerificationReport:
    """Check every anchor whose full shape is colored against the tile set."""
    allowed = ts.pattern_keys()
    checked = 0
    bad = []
    for g in patch.sources():
        try:
            pat = extract_pattern(patch, g)
        except IncompletePattern:
            continue
        checked += 1
        if pat.pattern_key not in allowed:
            bad.append(Violation(g, pat))
    return VerificationReport(checked, bad)


# -- patch file format ---------------------------------------------------------

def patch_to_json(patch: Patch) -> list:
    out = []
    for (g, gen), color in patch.sorted_items():
        rec = {"source": g.word, "gen": gen}
        if isinstance(color, Carry):
            rec["color"] = color_to_json(color.value)
            rec["mode"] = color.mode
        else:
            rec["color"] = color_to_json(color)
        out.append(rec)
    return out


def patch_from_json(p: GroupParams, data) -> Patch:
    edges = {}
    if not isinstance(data, list):
        raise ParseError("patch file must hold a JSON list")
    for i, rec in enumerate(data):
        try:
            g = normalize(p, rec["source"])
            gen = rec["gen"]
            if gen not in GENERATORS:
                raise ValueError(f"gen must be 'a' or 'b', not {gen!r}")
            color = color_from_json(rec["color"])
            if "mode" in rec:
                color = Carry(color, str(rec["mode"]))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"patch entry #{i}: {exc}") from None
        edges[(g, gen)] = color
    return Patch(p, edges)


def dump_patch(patch: Patch) -> str:
    return json.dumps(patch_to_json(patch), indent=1) + "\n"


def load_patch(p: GroupParams, text: str) -> Patch:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    return patch_from_json(p, data)

"""Tileability of finite Cayley-graph regions, and periodicity probes on patches.

The search variables are edges (element, generator).  Every anchor whose
whole tile shape lies in the region contributes one table constraint over
its m + n + 2 edges, whose rows are the tile set's patterns.  Search is
depth-first with generalized arc consistency on those tables.
"""

from __future__ import annotations

import logging
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .coloring import Patch, shape_edges
from .group import GroupParams, NormalForm, ball, identity, invert, multiply, normalize
from .tiles import Carry, TileSet, color_key

log = logging.getLogger(__name__)

SAT = "SAT"
UNSAT = "UNSAT"
BUDGET_EXHAUSTED = "BUDGET_EXHAUSTED"

EXIT_CODES = {SAT: 0, UNSAT: 1, BUDGET_EXHAUSTED: 2}


class Region:
    """A finite set of group elements with its induced edges and complete anchors."""

    def __init__(self, group: GroupParams, elements: Iterable):
        self.group = group
        elems = {normalize(group, g) for g in elements}
        self.elements = tuple(sorted(elems, key=NormalForm.sort_key))
        edges = []
        for g in self.elements:
            for gen in ("a", "b"):
                if multiply(group, g, gen) in elems:
                    edges.append((g, gen))
        self.edges = tuple(edges)
        edge_set = set(edges)
        self.shapes = {}
        for g in self.elements:
            bottom, top, left, right = shape_edges(group, g)
            keys = bottom + top + [left, right]
            if all(k in edge_set for k in keys):
                self.shapes[g] = tuple(keys)
        self.anchors = tuple(self.shapes)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, g):
        return normalize(self.group, g) in set(self.elements)

    def __repr__(self):
        return (f"Region({self.group}, {len(self.elements)} elements, "
                f"{len(self.edges)} edges, {len(self.anchors)} anchors)")


def region_ball(p: GroupParams, r: int) -> Region:
    return Region(p, ball(p, r))


def slab_elements(p: GroupParams, width: int, levels: int, sheet_policy: Optional[Sequence[int]] = None):
    """Vertices g_i a^j, 0 <= j <= width, on ``levels`` consecutive levels.

    g_0 is the identity and g_i = g_{i-1} a^s B with s = sheet_policy[i-1]
    (default 0): each level is one of the n successor levels of the one
    before it, one unit of height further down.
    """
    if width < 1 or levels < 1:
        raise ValueError("slab width and levels must be positive")
    sheets = list(sheet_policy or [])
    sheets += [0] * (levels - 1 - len(sheets))
    base = identity(p)
    out = []
    for i in range(levels):
        if i:
            s = sheets[i - 1]
            if not 0 <= s < p.n:
                raise ValueError(f"sheet index {s} outside [0,{p.n})")
            base = multiply(p, base, "a" * s + "B")
        g = base
        for _ in range(width + 1):
            out.append(g)
            g = multiply(p, g, "a")
    return out


def region_slab(p: GroupParams, width: int, levels: int, sheet_policy=None) -> Region:
    return Region(p, slab_elements(p, width, levels, sheet_policy))


@dataclass
class SolverConfig:
    variable_order: str = "mrv"          # "mrv", "dom/wdeg" or "lex"
    value_order: str = "ascending"       # "ascending" or "hint"
    value_hint: Optional[dict] = None    # (element, gen) -> preferred color, for value_order="hint"
    deterministic: bool = True
    budget: int = 10 ** 7
    parallel: bool = False
    workers: Optional[int] = None


@dataclass
class SolveStats:
    nodes: int = 0
    propagations: int = 0
    wall_time: float = 0.0


@dataclass
class SolveOutcome:
    status: str
    witness: Optional[Patch] = None
    stats: SolveStats = field(default_factory=SolveStats)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]


def _sort_value(c):
    return (c.mode, _sort_value(c.value)) if type(c) is Carry else c


def pattern_table(ts: TileSet) -> tuple[dict, np.ndarray]:
    """Distinct tile patterns as rows of color ids.

    Returns ({"a": a-colors, "b": b-colors}, table).  Colors are sorted; rows
    are bottom ids, top ids, left id, right id, deduplicated and sorted.
    """
    p = ts.group
    seen = {"a": {}, "b": {}}
    raw = []
    for t in ts:
        ka = [color_key(c) for c in t.bottom + t.top]
        for k, c in zip(ka, t.bottom + t.top):
            seen["a"].setdefault(k, c)
        left, right = Carry(t.left, t.mode), Carry(t.right, t.mode)
        kl, kr = color_key(left), color_key(right)
        seen["b"].setdefault(kl, left)
        seen["b"].setdefault(kr, right)
        raw.append((ka, kl, kr))
    colors, ids = {}, {}
    for gen, d in seen.items():
        order = sorted(d, key=lambda k: _sort_value(d[k]))
        colors[gen] = [d[k] for k in order]
        ids[gen] = {k: i for i, k in enumerate(order)}
    ia, ib = ids["a"], ids["b"]
    width = p.m + p.n + 2
    table = np.array([[ia[k] for k in ka] + [ib[kl], ib[kr]] for ka, kl, kr in raw],
                     dtype=np.int32).reshape(len(raw), width)
    if len(table):
        table = np.unique(table, axis=0)
    return colors, table


class _Search:
    def __init__(self, region: Region, ts: TileSet, cfg: SolverConfig):
        if ts.group != region.group:
            raise ValueError(f"tile set is for {ts.group}, region is in {region.group}")
        self.region = region
        self.cfg = cfg
        p = region.group
        width = p.m + p.n + 2
        self.colors, self.table = pattern_table(ts)
        ids = {gen: {color_key(c): i for i, c in enumerate(cs)} for gen, cs in self.colors.items()}
        npats = len(self.table)
        self.vars = list(region.edges)
        vidx = {k: i for i, k in enumerate(self.vars)}
        self.gen_of = [gen for _, gen in self.vars]
        self.cons = [np.array([vidx[k] for k in region.shapes[g]], dtype=np.int64) for g in region.anchors]
        self.var_cons = [[] for _ in self.vars]
        for ci, vs in enumerate(self.cons):
            for v in vs:
                self.var_cons[v].append(ci)
        self.active = np.array([bool(cs) for cs in self.var_cons], dtype=bool)

        pos_masks = []
        for i in range(width):
            gen = "a" if i < p.m + p.n else "b"
            mask = np.zeros(len(self.colors[gen]), dtype=bool)
            mask[self.table[:, i]] = True
            pos_masks.append(mask)
        self.dom = [np.ones(len(self.colors[gen]), dtype=bool) for gen in self.gen_of]
        for vs in self.cons:
            for i, v in enumerate(vs):
                self.dom[v] = self.dom[v] & pos_masks[i]
        self.sizes = np.array([d.sum() for d in self.dom], dtype=np.int64)
        self.live = [np.arange(npats) for _ in self.cons]
        self.trail: list = []
        self.stats = SolveStats()
        # constraint degree plus wipe-outs seen, for the dom/wdeg order
        self.var_weight = np.array([len(cs) for cs in self.var_cons], dtype=np.float64)

        self.hint = {}
        if cfg.value_order == "hint" and cfg.value_hint:
            for k, color in cfg.value_hint.items():
                k = (normalize(p, k[0]), k[1])
                if k in vidx:
                    self.hint[vidx[k]] = ids[k[1]].get(color_key(color))

    # -- trail ------------------------------------------------------------

    def _set_dom(self, v, new):
        self.trail.append((0, v, self.dom[v]))
        self.dom[v] = new
        self.sizes[v] = new.sum()

    def undo(self, mark):
        while len(self.trail) > mark:
            kind, i, old = self.trail.pop()
            if kind == 0:
                self.dom[i] = old
                self.sizes[i] = old.sum()
            else:
                self.live[i] = old

    # -- propagation ---------------------------------------------------------

    def propagate(self, queue: Iterable[int]) -> bool:
        queue = deque(queue)
        queued = set(queue)
        while queue:
            c = queue.popleft()
            queued.discard(c)
            self.stats.propagations += 1
            vs = self.cons[c]
            rows = self.live[c]
            sub = self.table[rows]
            keep = np.ones(len(rows), dtype=bool)
            for i, v in enumerate(vs):
                keep &= self.dom[v][sub[:, i]]
            if not keep.any():
                self.var_weight[vs] += 1
                return False
            if not keep.all():
                self.trail.append((1, c, rows))
                rows = rows[keep]
                sub = sub[keep]
                self.live[c] = rows
            for i, v in enumerate(vs):
                d = self.dom[v]
                support = np.zeros(len(d), dtype=bool)
                support[sub[:, i]] = True
                new = d & support
                if not np.array_equal(new, d):
                    self._set_dom(v, new)
                    for c2 in self.var_cons[v]:
                        if c2 != c and c2 not in queued:
                            queue.append(c2)
                            queued.add(c2)
        return True

    def assign(self, v, value) -> bool:
        new = np.zeros(len(self.dom[v]), dtype=bool)
        new[value] = True
        self._set_dom(v, new)
        return self.propagate(self.var_cons[v])

    # -- search ----------------------------------------------------------------

    def select(self) -> Optional[int]:
        open_ = self.active & (self.sizes > 1)
        if not open_.any():
            return None
        if self.cfg.variable_order == "lex":
            return int(np.flatnonzero(open_)[0])
        if self.cfg.variable_order == "dom/wdeg":
            score = np.where(open_, self.sizes / np.maximum(self.var_weight, 1), np.inf)
            return int(score.argmin())
        return int(np.where(open_, self.sizes, np.iinfo(np.int64).max).argmin())

    def order(self, v) -> list[int]:
        vals = [int(x) for x in np.flatnonzero(self.dom[v])]
        h = self.hint.get(v)
        if h is not None and h in vals:
            vals.remove(h)
            vals.insert(0, h)
        return vals

    def start(self) -> bool:
        if any(self.sizes[v] == 0 for v in range(len(self.vars)) if self.active[v]):
            return False
        if self.cons and len(self.table) == 0:
            return False
        return self.propagate(range(len(self.cons)))

    def run(self, fixed: Optional[tuple[int, int]] = None) -> str:
        if not self.start():
            return UNSAT
        if fixed is not None:
            self.stats.nodes += 1
            if not self.dom[fixed[0]][fixed[1]] or not self.assign(*fixed):
                return UNSAT
        stack = []
        while True:
            v = self.select()
            if v is None:
                return SAT
            stack.append([v, self.order(v), 0, len(self.trail)])
            while True:
                if not stack:
                    return UNSAT
                frame = stack[-1]
                self.undo(frame[3])
                if frame[2] >= len(frame[1]):
                    stack.pop()
                    continue
                value = frame[1][frame[2]]
                frame[2] += 1
                self.stats.nodes += 1
                if self.stats.nodes > self.cfg.budget:
                    return BUDGET_EXHAUSTED
                if self.assign(frame[0], value):
                    break

    def witness(self) -> Patch:
        edges = {}
        for v, key in enumerate(self.vars):
            vals = np.flatnonzero(self.dom[v])
            if not len(vals):
                continue
            h = self.hint.get(v)
            i = h if (h is not None and self.dom[v][h]) else int(vals[0])
            edges[key] = self.colors[self.gen_of[v]][i]
        return Patch(self.region.group, edges)


def _solve_branch(region, ts, cfg, fixed):
    s = _Search(region, ts, cfg)
    status = s.run(fixed)
    return status, (s.witness() if status == SAT else None), s.stats


def solve(region: Region, ts: TileSet, cfg: Optional[SolverConfig] = None) -> SolveOutcome:
    """Find an edge coloring of the region whose complete anchors all show tiles of ``ts``."""
    cfg = cfg or SolverConfig()
    t0 = time.perf_counter()
    if cfg.parallel and not cfg.deterministic:
        out = _solve_parallel(region, ts, cfg)
    else:
        s = _Search(region, ts, cfg)
        status = s.run()
        out = SolveOutcome(status, s.witness() if status == SAT else None, s.stats)
    out.stats.wall_time = time.perf_counter() - t0
    log.info("solve %r: %s after %d nodes", region, out.status, out.stats.nodes)
    return out


def _solve_parallel(region, ts, cfg) -> SolveOutcome:
    # split the root on the first branching variable; one subtree per value
    root = _Search(region, ts, cfg)
    if not root.start():
        return SolveOutcome(UNSAT, None, root.stats)
    v = root.select()
    if v is None:
        return SolveOutcome(SAT, root.witness(), root.stats)
    values = root.order(v)
    stats = SolveStats(propagations=root.stats.propagations)
    statuses = []
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        futures = [pool.submit(_solve_branch, region, ts, cfg, (v, val)) for val in values]
        for fut in futures:
            status, wit, st = fut.result()
            stats.nodes += st.nodes
            stats.propagations += st.propagations
            statuses.append(status)
            if status == SAT:
                for f in futures:
                    f.cancel()
                return SolveOutcome(SAT, wit, stats)
    status = BUDGET_EXHAUSTED if BUDGET_EXHAUSTED in statuses else UNSAT
    return SolveOutcome(status, None, stats)


# -- translations ----------------------------------------------------------------

def shift_patch(p: GroupParams, patch: Patch, h) -> Patch:
    """The translate by h: output color at (g, gen) is the input color at (h g, gen)."""
    h_inv = invert(p, h)
    return Patch(p, {(multiply(p, h_inv, g), gen): c for (g, gen), c in patch.items()})


def period_overlap(patch: Patch, h) -> tuple[int, int]:
    """(number of keys compared, number of disagreements) between patch and its h-translate."""
    p = patch.group
    h = normalize(p, h)
    compared = bad = 0
    for (g, gen), c in patch.items():
        other = patch.get((multiply(p, h, g), gen))
        if other is not None:
            compared += 1
            bad += other != c
    return compared, bad


def is_period_on(patch: Patch, h) -> bool:
    """Does the patch agree with its h-translate wherever both are defined?

    This is a finite-overlap probe: a necessary condition for h to be a
    period of any tiling extending the patch, not a proof that it is one.
    """
    return period_overlap(patch, h)[1] == 0

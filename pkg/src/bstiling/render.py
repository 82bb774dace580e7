"""Draw regions and colored patches in the plane layout.

Vertex g sits at (alpha, -beta) where (alpha, beta) = project(g), so every
level lies on one horizontal line and b-edges point upward (the SVG
writer flips y for screen coordinates).  Different sheets that share a
level are drawn on top of each other.

Text outputs (SVG, DOT, digit rows) are byte-deterministic.  Coordinates
are printed with 6 significant digits and are for display only.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .coloring import Patch
from .group import GroupParams, NormalForm, PlanePoint, multiply, project
from .tiles import Carry

X_SCALE = 60
Y_SCALE = 90
MARGIN = 30


@dataclass(frozen=True)
class DrawnEdge:
    source: NormalForm
    gen: str
    target: NormalForm
    label: Optional[str]


@dataclass
class Drawing:
    group: GroupParams
    vertices: list          # [(NormalForm, PlanePoint)], sorted by word
    edges: list             # [DrawnEdge], sorted by (source word, gen)

    def position(self, g: NormalForm) -> tuple[Fraction, Fraction]:
        pt = project(self.group, g)
        return pt.alpha, Fraction(-pt.beta)


def color_label(c) -> str:
    if isinstance(c, Carry):
        return f"{color_label(c.value)}:{c.mode}"
    if isinstance(c, tuple):
        return "(" + ",".join(str(Fraction(v)) for v in c) + ")"
    return str(Fraction(c))


def _assemble(p: GroupParams, verts: set, edges: list) -> Drawing:
    vs = sorted(verts, key=NormalForm.sort_key)
    edges.sort(key=lambda e: (e.source.word, e.gen))
    return Drawing(p, [(g, project(p, g)) for g in vs], edges)


def drawing_from_region(region) -> Drawing:
    p = region.group
    edges = [DrawnEdge(g, gen, multiply(p, g, gen), None) for g, gen in region.edges]
    return _assemble(p, set(region.elements), edges)


def drawing_from_patch(patch: Patch) -> Drawing:
    p = patch.group
    verts, edges = set(), []
    for (g, gen), c in patch.items():
        h = multiply(p, g, gen)
        verts.update((g, h))
        edges.append(DrawnEdge(g, gen, h, color_label(c)))
    return _assemble(p, verts, edges)


def fmt(v) -> str:
    s = f"{float(v):.6g}"
    return "0" if s == "-0" else s


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")


def to_svg(d: Drawing) -> str:
    pts = [d.position(g) for g, _ in d.vertices]
    if pts:
        x0 = min(x for x, _ in pts)
        y0 = min(y for _, y in pts)
        x1 = max(x for x, _ in pts)
        y1 = max(y for _, y in pts)
    else:
        x0 = y0 = x1 = y1 = Fraction(0)

    def xy(g):
        x, y = d.position(g)
        # screen y grows downward
        return fmt((x - x0) * X_SCALE + MARGIN), fmt((y1 - y) * Y_SCALE + MARGIN)

    w = fmt((x1 - x0) * X_SCALE + 2 * MARGIN)
    h = fmt((y1 - y0) * Y_SCALE + 2 * MARGIN)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        '<g stroke-width="1.2" font-family="monospace" font-size="10">',
    ]
    for e in d.edges:
        (sx, sy), (tx, ty) = xy(e.source), xy(e.target)
        stroke = "#1f4e9c" if e.gen == "a" else "#b03a2e"
        out.append(f'<line x1="{sx}" y1="{sy}" x2="{tx}" y2="{ty}" stroke="{stroke}" '
                   f'data-edge="{e.source.word or "e"},{e.gen}"/>')
        if e.label is not None:
            mx = fmt((float(sx) + float(tx)) / 2)
            my = fmt((float(sy) + float(ty)) / 2 - 3)
            out.append(f'<text x="{mx}" y="{my}" text-anchor="middle">{_escape(e.label)}</text>')
    for g, _ in d.vertices:
        cx, cy = xy(g)
        out.append(f'<circle cx="{cx}" cy="{cy}" r="3" fill="black"><title>{g.word or "e"}</title></circle>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _dot_id(g: NormalForm) -> str:
    return '"' + (g.word or "e") + '"'


def to_dot(d: Drawing) -> str:
    """Graphviz source with pinned positions; render with ``neato -n``."""
    out = ["digraph BS {", "  node [shape=point];"]
    for g, _ in d.vertices:
        x, y = d.position(g)
        out.append(f'  {_dot_id(g)} [pos="{fmt(x * X_SCALE)},{fmt(y * Y_SCALE)}!"];')
    for e in d.edges:
        attrs = [f'gen="{e.gen}"', 'color="blue"' if e.gen == "a" else 'color="red"']
        if e.label is not None:
            attrs.append(f'label="{e.label}"')
        out.append(f"  {_dot_id(e.source)} -> {_dot_id(e.target)} [{', '.join(attrs)}];")
    out.append("}")
    return "\n".join(out) + "\n"


# -- digit rows ----------------------------------------------------------------

@dataclass(frozen=True)
class LevelRow:
    base: NormalForm        # element with trailing a-power 0 on this level
    height: int
    start: int              # exponent of the first entry
    digits: tuple           # labels, None where no a-edge is colored

    def text(self) -> str:
        return "".join("." if c is None else color_label(c) for c in self.digits)


def level_rows(patch: Patch) -> list[LevelRow]:
    """a-edge labels of each level, in order along the level.

    Along a level g a^k only the trailing exponent k of the normal form
    changes, so the level is named by the normal form with that exponent
    set to 0.
    """
    p = patch.group
    levels: dict = {}
    for (g, gen), c in patch.items():
        if gen != "a":
            continue
        head = g.syllables[:-1] + (0,)
        levels.setdefault(head, {})[g.syllables[-1]] = c
    rows = []
    for head, cells in levels.items():
        base = NormalForm(p, head)
        lo, hi = min(cells), max(cells)
        rows.append(LevelRow(base, base.height, lo, tuple(cells.get(k) for k in range(lo, hi + 1))))
    rows.sort(key=lambda r: (r.height, r.base.word))
    return rows


def rows_table(rows: list[LevelRow]) -> str:
    """Tab-separated: level base word, height, first exponent, digits."""
    lines = ["level\theight\tstart\tdigits"]
    lines += [f"{r.base.word or 'e'}\t{r.height}\t{r.start}\t{r.text()}" for r in rows]
    return "\n".join(lines) + "\n"


# -- raster figure ------------------------------------------------------------------

def save_figure(d: Drawing, path, dpi: int = 150, title: Optional[str] = None) -> None:
    """Write the drawing as an image with matplotlib (format from the suffix)."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(10, 5))
    try:
        for e in d.edges:
            (sx, sy), (tx, ty) = d.position(e.source), d.position(e.target)
            ax.plot([float(sx), float(tx)], [float(sy), float(ty)],
                    color="tab:blue" if e.gen == "a" else "tab:red", lw=0.8, zorder=1)
            if e.label is not None:
                ax.annotate(e.label, ((float(sx) + float(tx)) / 2, (float(sy) + float(ty)) / 2),
                            fontsize=6, ha="center", va="bottom")
        if d.vertices:
            xs, ys = zip(*(map(float, d.position(g)) for g, _ in d.vertices))
            ax.scatter(xs, ys, s=6, color="black", zorder=2)
        ax.set_xlabel("alpha")
        ax.set_ylabel("-beta")
        if title:
            ax.set_title(title)
        fig.tight_layout()
        fig.savefig(path, dpi=dpi)
    finally:
        plt.close(fig)

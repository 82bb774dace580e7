"""Command-line front end.

    bstiling normalize baBaabABAA
    bstiling project baBaabABAA
    bstiling tiles enumerate --preset kari32 --count
    bstiling gamma --region slab:18,3 --out gamma.json
    bstiling verify --patch gamma.json --preset kari32
    bstiling solve --region ball:3 --tileset kari32.json
    bstiling compile-affine --preset identity --count
    bstiling render --region ball:2 --gamma --format rows --figure ball2.png

Exit codes: 0 success (SAT), 1 UNSAT or failed verification, 2 budget
exhausted, 3 usage error, 4 any other error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from . import coloring, dynsys, reduction, render, solver, tiles
from .group import GroupParams, WordError, normalize, project

EXIT_USAGE = 3
EXIT_ERROR = 4

TILESET_PRESETS = {
    "kari32": tiles.kari_bs32_tileset,
    "times2": tiles.enumerate_times2,
    "times23": tiles.enumerate_times23,
}
SYSTEM_PRESETS = {
    "identity": reduction.identity_system,
    "escape": reduction.escape_system,
    "scaling": reduction.scaling_system,
}
DEFAULT_X0 = Fraction(5, 4)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# -- flag parsing -----------------------------------------------------------------

def parse_region(spec: str, p: GroupParams) -> solver.Region:
    kind, _, arg = spec.partition(":")
    try:
        if kind == "ball":
            r = int(arg)
            if r < 0:
                raise ValueError
            return solver.region_ball(p, r)
        if kind == "slab":
            w, l = (int(x) for x in arg.split(","))
            return solver.region_slab(p, w, l)
    except ValueError:
        pass
    raise UsageError(f"bad --region {spec!r}; expected ball:R or slab:W,L")


def parse_orbit_spec(spec: Optional[str]) -> dict:
    out = {"x0": DEFAULT_X0, "back": None, "fwd": None, "policy": dynsys.PREFER_HALVING}
    if not spec:
        return out
    for part in spec.split(","):
        key, eq, val = part.partition("=")
        if not eq or key not in out:
            raise UsageError(f"bad --orbit field {part!r}; expected x0=P/Q,back=B,fwd=F,policy=NAME")
        try:
            if key == "x0":
                out[key] = Fraction(val)
            elif key in ("back", "fwd"):
                out[key] = int(val)
            else:
                if val not in dynsys.POLICIES:
                    raise ValueError
                out[key] = val
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"bad --orbit value {part!r}") from None
    return out


def orbit_for(spec: dict, elements) -> dynsys.Orbit:
    """Orbit window from the --orbit settings, widened by default to cover the given elements."""
    heights = [g.height for g in elements] or [0]
    back = spec["back"] if spec["back"] is not None else max(0, 1 - min(heights))
    fwd = spec["fwd"] if spec["fwd"] is not None else max(0, max(heights))
    return dynsys.make_orbit(dynsys.kari_map(), spec["x0"], back, fwd, spec["policy"])


def load_tileset(args) -> tiles.TileSet:
    if args.preset:
        return TILESET_PRESETS[args.preset]()
    path = Path(args.tileset)
    if path.exists():
        return tiles.parse_tileset(path.read_text())
    packaged = resources.files("bstiling").joinpath("data", path.name)
    if packaged.is_file():
        return tiles.parse_tileset(packaged.read_text())
    raise FileNotFoundError(f"no tile set file {args.tileset!r}")


def group_of(args, default: Optional[GroupParams] = None) -> GroupParams:
    if args.m is None and args.n is None and default is not None:
        return default
    p = GroupParams(args.m if args.m is not None else 3, args.n if args.n is not None else 2)
    if default is not None and p != default:
        raise UsageError(f"-m/-n give {p} but the tile set is for {default}")
    return p


def emit(args, out, payload, text: str) -> None:
    if args.json:
        out.write(json.dumps(payload, indent=1, sort_keys=True) + "\n")
    else:
        out.write(text)


def write_file(path: str, text: str) -> None:
    Path(path).write_text(text)


# -- commands -------------------------------------------------------------------------

def cmd_normalize(args, out) -> int:
    p = group_of(args)
    rows = [(w, normalize(p, w)) for w in args.words]
    emit(args, out, [{"input": w, "normal_form": nf.word, "length": len(nf)} for w, nf in rows],
         "".join(nf.word + "\n" for _, nf in rows))
    return 0


def cmd_project(args, out) -> int:
    p = group_of(args)
    pts = [(w, project(p, w)) for w in args.words]
    emit(args, out, [{"input": w, "alpha": str(pt.alpha), "beta": pt.beta} for w, pt in pts],
         "".join(f"{pt.alpha} {pt.beta}\n" for _, pt in pts))
    return 0


def cmd_tiles(args, out) -> int:
    ts = load_tileset(args)
    if args.out:
        write_file(args.out, tiles.serialize_tileset(ts))
    if args.count:
        emit(args, out, {"count": len(ts)}, f"{len(ts)}\n")
    else:
        emit(args, out, tiles.tileset_to_json(ts), "\n".join(tiles.tile_rows(ts)) + "\n")
    return 0


def cmd_gamma(args, out) -> int:
    p = group_of(args)
    region = parse_region(args.region, p)
    orbit = orbit_for(parse_orbit_spec(args.orbit), region.elements)
    patch = coloring.build_patch(p, orbit, region.elements, args.experimental)
    if args.out:
        write_file(args.out, coloring.dump_patch(patch))
    lines = ["source\tgen\tcolor\tmode"]
    for (g, gen), c in patch.sorted_items():
        val, mode = (c.value, c.mode) if isinstance(c, tiles.Carry) else (c, "")
        lines.append(f"{g.word or 'e'}\t{gen}\t{val}\t{mode}")
    emit(args, out, coloring.patch_to_json(patch), "\n".join(lines) + "\n")
    return 0


def cmd_verify(args, out) -> int:
    ts = load_tileset(args)
    patch = coloring.load_patch(ts.group, Path(args.patch).read_text())
    rep = coloring.verify_patch(patch, ts)
    bad = [v.anchor.word for v in rep.violations]
    text = f"checked {rep.checked} anchors, {len(bad)} violations\n"
    text += "".join(f"violation at {w or 'e'}\n" for w in bad)
    emit(args, out, {"checked": rep.checked, "violations": bad, "ok": rep.ok}, text)
    return 0 if rep.ok else 1


def cmd_solve(args, out) -> int:
    ts = load_tileset(args)
    p = group_of(args, ts.group)
    region = parse_region(args.region, p)
    cfg = solver.SolverConfig(variable_order=args.var_order, budget=args.budget,
                              deterministic=args.deterministic or not args.parallel,
                              parallel=bool(args.parallel), workers=args.parallel or None)
    res = solver.solve(region, ts, cfg)
    if args.out and res.witness is not None:
        write_file(args.out, coloring.dump_patch(res.witness))
    payload = {"status": res.status, "exit_code": res.exit_code, "nodes": res.stats.nodes,
               "propagations": res.stats.propagations, "elements": len(region),
               "edges": len(region.edges), "anchors": len(region.anchors)}
    text = (f"{res.status}\tnodes={res.stats.nodes}\tpropagations={res.stats.propagations}\t"
            f"anchors={len(region.anchors)}\n")
    emit(args, out, payload, text)
    logging.getLogger(__name__).info("wall time %.3f s", res.stats.wall_time)
    return res.exit_code


def cmd_compile(args, out) -> int:
    if args.preset:
        system = SYSTEM_PRESETS[args.preset]()
    else:
        system = reduction.load_system(Path(args.system).read_text())
    p = group_of(args)
    ts = reduction.compile_system(system, p, args.denom)
    if args.out:
        write_file(args.out, tiles.serialize_tileset(ts))
    box = reduction.carry_box(system, p, args.denom)
    payload = {"count": len(ts), "carry_bound": str(box.bound), "denom": box.denom,
               "modes": ts.modes()}
    if args.count or args.json:
        emit(args, out, payload, f"{len(ts)}\n")
    else:
        out.write("\n".join(tiles.tile_rows(ts)) + "\n")
    return 0


def cmd_render(args, out) -> int:
    p = group_of(args)
    if args.patch:
        patch = coloring.load_patch(p, Path(args.patch).read_text())
        drawing = render.drawing_from_patch(patch)
    else:
        region = parse_region(args.region, p)
        patch = None
        if args.gamma:
            orbit = orbit_for(parse_orbit_spec(args.orbit), region.elements)
            patch = coloring.build_patch(p, orbit, region.elements, args.experimental)
            drawing = render.drawing_from_patch(patch)
        else:
            drawing = render.drawing_from_region(region)
    if args.format == "svg":
        text = render.to_svg(drawing)
    elif args.format == "dot":
        text = render.to_dot(drawing)
    else:
        if patch is None:
            raise UsageError("--format rows needs a colored patch (--patch or --gamma)")
        text = render.rows_table(render.level_rows(patch))
    if args.out:
        write_file(args.out, text)
    else:
        out.write(text)
    if args.figure:
        render.save_figure(drawing, args.figure)
    return 0


# -- parser -----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("-m", type=int, default=None, help="a-exponent on the left of the relation (default 3)")
    common.add_argument("-n", type=int, default=None, help="a-exponent on the right of the relation (default 2)")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("-v", "--verbose", action="store_true")

    tileset_src = _Parser(add_help=False)
    g = tileset_src.add_mutually_exclusive_group(required=True)
    g.add_argument("--tileset", metavar="FILE", help="tile-set JSON (packaged names such as kari32.json also work)")
    g.add_argument("--preset", choices=sorted(TILESET_PRESETS))

    orbit = _Parser(add_help=False)
    orbit.add_argument("--orbit", metavar="SPEC", help="x0=P/Q,back=B,fwd=F,policy=NAME (default x0=5/4)")
    orbit.add_argument("--experimental", action="store_true", help="allow groups other than BS(3,2)")

    top = _Parser(prog="bstiling", description="Tilings of Baumslag-Solitar groups.")
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("normalize", parents=[common], help="normal form of words")
    s.add_argument("words", nargs="+")
    s.set_defaults(func=cmd_normalize)

    s = sub.add_parser("project", parents=[common], help="plane projection (alpha, beta) of words")
    s.add_argument("words", nargs="+")
    s.set_defaults(func=cmd_project)

    s = sub.add_parser("tiles", help="tile-set utilities")
    tsub = s.add_subparsers(dest="tiles_command", required=True, parser_class=_Parser)
    e = tsub.add_parser("enumerate", parents=[common, tileset_src], help="list or count a tile set")
    e.add_argument("--count", action="store_true")
    e.add_argument("--out", metavar="FILE", help="also write the tile set as JSON")
    e.set_defaults(func=cmd_tiles)

    s = sub.add_parser("gamma", parents=[common, orbit], help="orbit coloring of a region")
    s.add_argument("--region", required=True, metavar="ball:R|slab:W,L")
    s.add_argument("--out", metavar="FILE", help="write the patch file")
    s.set_defaults(func=cmd_gamma)

    s = sub.add_parser("verify", parents=[common, tileset_src], help="check a patch against a tile set")
    s.add_argument("--patch", required=True, metavar="FILE")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("solve", parents=[common, tileset_src], help="tileability of a finite region")
    s.add_argument("--region", required=True, metavar="ball:R|slab:W,L")
    s.add_argument("--budget", type=int, default=10 ** 7, help="node budget")
    s.add_argument("--var-order", choices=["mrv", "dom/wdeg", "lex"], default="mrv")
    s.add_argument("--parallel", type=int, metavar="WORKERS", default=0,
                   help="split the root across worker processes")
    s.add_argument("--deterministic", action="store_true", help="force the serial search")
    s.add_argument("--out", metavar="FILE", help="write the witness patch when SAT")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("compile-affine", parents=[common], help="tile set of a piecewise affine system")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--system", metavar="FILE")
    src.add_argument("--preset", choices=sorted(SYSTEM_PRESETS))
    s.add_argument("--denom", type=int, default=None, help="carry grid denominator")
    s.add_argument("--count", action="store_true")
    s.add_argument("--out", metavar="FILE", help="write the tile set as JSON")
    s.set_defaults(func=cmd_compile)

    s = sub.add_parser("render", parents=[common, orbit], help="draw a region or patch in the plane layout")
    what = s.add_mutually_exclusive_group(required=True)
    what.add_argument("--region", metavar="ball:R|slab:W,L")
    what.add_argument("--patch", metavar="FILE")
    s.add_argument("--gamma", action="store_true", help="color the region with the orbit coloring")
    s.add_argument("--format", choices=["svg", "dot", "rows"], default="svg")
    s.add_argument("--out", metavar="FILE")
    s.add_argument("--figure", metavar="FILE", help="also save a matplotlib image (PNG, PDF, ...)")
    s.set_defaults(func=cmd_render)
    return top


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        err.write(f"{exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:   # --help
        return 0 if not exc.code else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=err,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args, out)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (tiles.ParseError, WordError, dynsys.DomainError, reduction.ValidationError,
            coloring.OrbitWindowError, OSError, ValueError, KeyError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

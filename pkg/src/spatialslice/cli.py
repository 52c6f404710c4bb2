"""Command line interface.

Exit codes: 0 success, 1 obstructed verdict, 2 input error, 3 internal
verification failure.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import __version__
from .abstract_graph import GraphError, check_graph, fundamental_cycles, is_planar, spanning_forest, vertex_star_cuts
from .diagram import (DiagramError, MoveSpec, apply_moves, diagram_to_dict, extract_cycle_diagram, face_count,
                      link_as_graph, parse_sgd, random_move_sequence, serialize_sgd, underlying_graph)
from .framing import Framing, LayoutFailure, NonOrientable, blackboard, dump_framing, linking_matrix, load_framing
from .framing_module import VerificationFailed, find_zero_framing, framing_module, k_invariant, presentation
from .link_invariants import knot_report
from .link_pattern import fundamental_link_pattern, verify_pattern
from .slice_pipeline import PipelineFailure, run_pipeline

EXIT_OK, EXIT_OBSTRUCTED, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


class _Ctx:
    def __init__(self, path, framing, json_out, tree_strategy, budget, seed):
        self.path = Path(path)
        self.framing_path = framing
        self.json_out = json_out
        self.tree_strategy = tree_strategy
        self.budget = budget
        self.seed = seed

    def diagram(self, validate=True):
        return parse_sgd(self.path.read_text(), validate=validate)

    def graph_diagram(self):
        return link_as_graph(self.diagram())

    def framing(self, d) -> Framing:
        if self.framing_path is None:
            return blackboard(d)
        return load_framing(Path(self.framing_path).read_text(), d)

    def emit(self, data: dict, text: str | None = None):
        if self.json_out:
            payload = json.dumps(data, indent=1, sort_keys=True) + "\n"
            if self.json_out == "-":
                click.echo(payload, nl=False)
            else:
                tmp = Path(self.json_out + ".tmp")
                tmp.write_text(payload)
                tmp.replace(self.json_out)
        if text is not None and self.json_out != "-":
            click.echo(text)


def _common(fn):
    @click.argument("path", type=click.Path(exists=True, dir_okay=False))
    @click.option("--framing", type=click.Path(exists=True, dir_okay=False), help="Framing file (default blackboard).")
    @click.option("--json", "json_out", metavar="OUT", help="Write a JSON result to OUT ('-' for stdout).")
    @click.option("--tree-strategy", type=click.Choice(["default"]), default="default", show_default=True)
    @click.option("--budget", type=click.IntRange(min=0), default=2000, show_default=True,
                  help="Step budget for simplification searches.")
    @click.option("--seed", type=int, default=0, show_default=True)
    @functools.wraps(fn)
    def wrapper(path, framing, json_out, tree_strategy, budget, seed, **kw):
        ctx = _Ctx(path, framing, json_out, tree_strategy, budget, seed)
        try:
            code = fn(ctx, **kw)
        except (DiagramError, GraphError, NonOrientable, ValueError, OSError) as exc:
            click.echo(f"input error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(EXIT_INPUT)
        except (PipelineFailure, VerificationFailed, LayoutFailure, AssertionError) as exc:
            click.echo(f"internal verification failure: {type(exc).__name__}: {exc}", err=True)
            sys.exit(EXIT_INTERNAL)
        except Exception as exc:  # an unexpected failure must not read as a verdict
            click.echo(f"internal error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(EXIT_INTERNAL)
        sys.exit(code or EXIT_OK)
    return wrapper


@click.group()
@click.version_option(__version__)
def main():
    """Sliceness obstructions for spatial graph diagrams (SGD files)."""


@main.command()
@_common
def validate(ctx):
    """Check the diagram file and the sphere condition."""
    d = ctx.diagram()
    check_graph(underlying_graph(link_as_graph(d)))
    info = {"name": d.name, "vertices": len(d.vertices), "edges": len(d.edges), "crossings": len(d.crossings),
            "components": len(d.components), "faces": face_count(d)}
    ctx.emit(info, "ok: " + ", ".join(f"{v} {k}" for k, v in info.items() if k != "name"))


@main.command()
@_common
def graph(ctx):
    """Spanning tree, fundamental cycles, vertex cuts and planarity."""
    g = underlying_graph(ctx.graph_diagram())
    check_graph(g)
    t = spanning_forest(g)
    cycles = fundamental_cycles(g, t)
    planar, witness = is_planar(g)
    data = {"tree": t.as_dict(), "cycles": [c.as_dict() for c in cycles],
            "cuts": [sorted(c) for c in vertex_star_cuts(g)], "planar": planar,
            "witness": witness.as_dict() if witness else None, "first_betti": g.first_betti()}
    lines = [f"tree: {' '.join(data['tree']['edges']) or '(empty)'}"]
    lines += [f"{c.name}: " + " ".join(f"{'+' if s > 0 else '-'}{e}" for e, s in c.walk) for c in cycles]
    lines.append("planar" if planar else f"not planar ({witness.kind} on {' '.join(witness.edges)})")
    ctx.emit(data, "\n".join(lines))


@main.command()
@_common
def invariants(ctx):
    """Framed linking matrix of the fundamental cycles."""
    d = ctx.graph_diagram()
    f = ctx.framing(d)
    A = linking_matrix(d, f)
    data = {"cycles": list(A.cycles), "linking_matrix": A.as_lists(), "framing": f.as_dict()}
    ctx.emit(data, "\n".join(" ".join(f"{x:3d}" for x in row) for row in A.as_lists()))


@main.command()
@_common
def fr(ctx):
    """The framing group of the underlying graph."""
    g = underlying_graph(ctx.graph_diagram())
    check_graph(g)
    t = spanning_forest(g)
    grp = framing_module(g, t)
    data = {**grp.as_dict(), "presentation": presentation(g, t).as_dict()}
    ctx.emit(data, grp.describe())


@main.command()
@_common
def k(ctx):
    """Class of the framed linking matrix in the framing group."""
    d = ctx.graph_diagram()
    kc = k_invariant(d, ctx.framing(d))
    ctx.emit(kc.as_dict(), "zero" if kc.zero else f"nonzero: {kc.group.describe()} coordinates "
             f"{list(kc.torsion_coords) + list(kc.free_coords)}")


@main.command("find-framing")
@_common
def find_framing(ctx):
    """A framing with vanishing linking matrix, if one exists."""
    d = ctx.graph_diagram()
    kc = k_invariant(d, ctx.framing(d))
    if not kc.zero:
        ctx.emit({"found": False, "k_invariant": kc.as_dict()}, "no zero framing: class is nonzero")
        return EXIT_OBSTRUCTED
    f0 = find_zero_framing(d, ctx.framing(d), k=kc)
    ctx.emit(f0.as_dict(), dump_framing(f0).rstrip())


@main.command()
@_common
def pattern(ctx):
    """Link of disjoint cycle copies in the given framing, as SGD."""
    d = ctx.graph_diagram()
    f = ctx.framing(d)
    cycles = fundamental_cycles(underlying_graph(d))
    A = linking_matrix(d, f, cycles)
    if not A.is_symmetric():
        raise ValueError("cycles meet on the band surface in this framing; no disjoint copies exist")
    ld, layout = fundamental_link_pattern(d, f, cycles)
    errs = verify_pattern(ld, layout, d, cycles)
    if errs:
        raise PipelineFailure("pattern", "; ".join(errs))
    ctx.emit({"diagram": diagram_to_dict(ld), "layout": layout.as_dict()}, serialize_sgd(ld).rstrip())


@main.command()
@_common
def knots(ctx):
    """Constituent knots of the fundamental cycles and their invariants."""
    d = ctx.graph_diagram()
    cycles = fundamental_cycles(underlying_graph(d))
    out, lines = [], []
    for c in cycles:
        kd = extract_cycle_diagram(d, c)
        r = knot_report(kd)
        out.append({"cycle": c.name, "diagram": diagram_to_dict(kd), **r})
        lines.append(f"{c.name}: {r['crossings']} crossings, signature {r['signature']}, det {r['determinant']}, "
                     f"alexander {r['alexander']}, fox-milnor {r['fox_milnor']['status']}")
    ctx.emit({"knots": out}, "\n".join(lines))
    return EXIT_OBSTRUCTED if any(r["obstructed"] for r in out) else EXIT_OK


@main.command()
@_common
def obstruct(ctx):
    """Run every stage and report a verdict."""
    d = ctx.diagram()
    f = ctx.framing(link_as_graph(d)) if ctx.framing_path else None
    rep = run_pipeline(d, f, budget=ctx.budget, seed=ctx.seed, source=str(ctx.path))
    ctx.emit(rep.as_dict(), rep.verdict)
    return EXIT_OBSTRUCTED if rep.obstructed else EXIT_OK


@main.command()
@_common
@click.option("--apply", "moves_file", type=click.Path(exists=True, dir_okay=False),
              help="JSON list of moves to apply in order.")
@click.option("--count", type=click.IntRange(min=0), default=10, show_default=True,
              help="Number of random moves when no list is given.")
@click.option("--allow-vi", is_flag=True, help="Also allow the vertex twist move.")
def moves(ctx, moves_file, count, allow_vi):
    """Apply a list of moves, or a seeded random sequence of them."""
    d = ctx.diagram()
    if moves_file:
        log = [MoveSpec.from_dict(m) for m in json.loads(Path(moves_file).read_text())]
        out = apply_moves(d, log, allow_vi=allow_vi)
    else:
        out, log = random_move_sequence(d, count, ctx.seed, allow_vi=allow_vi)
    ctx.emit({"diagram": diagram_to_dict(out), "moves": [m.as_dict() for m in log]}, serialize_sgd(out).rstrip())


if __name__ == "__main__":  # pragma: no cover
    main()

"""Command-line interface.

Exit codes: 0 success (or a positive verdict), 1 negative verdict or failed
check, 2 error, 3 inconclusive within the resource caps.
"""
from __future__ import annotations

import functools
import sys
from pathlib import Path

import click

from .errors import DLError, ResourceError
from .model import (
    DEFAULT_MAX_ELEMS,
    Interpretation,
    coherent_union_alco,
    direct_product,
    disjoint_union,
    extension,
    forest_unravel,
    nominal_union_alcqio,
    parse_interpretation,
    partial_tree_unravel,
    render_interpretation,
    satisfies,
    tree_unravel,
)
from .syntax import (
    Signature,
    TBox,
    canonical,
    clos_positive,
    dialect_of,
    parse_concept,
    parse_tbox,
    rank,
    render,
    signature_of,
)


def _fail(msg: str, code: int = 2):
    click.echo(f"error: {msg}", err=True)
    sys.exit(code)


def _guard(fn):
    """Map library errors to exit codes: resource caps give 3, others 2."""

    @functools.wraps(fn)
    def run(*a, **k):
        try:
            return fn(*a, **k)
        except ResourceError as e:
            _fail(str(e), 3)
        except (DLError, ValueError, OSError) as e:
            _fail(str(e).splitlines()[0] if str(e) else type(e).__name__)

    return run


def _read(path) -> str:
    return Path(path).read_text(encoding="utf-8")


def _interp(path) -> Interpretation:
    return parse_interpretation(_read(path))


def _sig_file(path) -> Signature:
    """Signature file: lines ``concept A B``, ``role r`` or ``individual a``."""
    cn, rn, inds = set(), set(), set()
    for raw in _read(path).splitlines():
        parts = raw.split("#", 1)[0].split()
        if not parts:
            continue
        kw, names = parts[0], parts[1:]
        if kw in ("concept", "concepts"):
            cn.update(names)
        elif kw in ("role", "roles"):
            rn.update(names)
        elif kw in ("individual", "individuals"):
            inds.update(names)
        else:
            raise DLError(f"unknown signature directive {kw!r}")
    return Signature(cn, rn, inds)


def _sig_line(sig: Signature) -> str:
    parts = [
        "concepts=" + ",".join(sorted(sig.concept_names)),
        "roles=" + ",".join(sorted(sig.role_names)),
    ]
    if sig.individual_names:
        parts.append("individuals=" + ",".join(sorted(sig.individual_names)))
    return "# signature: " + " ".join(parts)


def _concept(text, path):
    if (text is None) == (path is None):
        raise click.UsageError("give exactly one of -c/--concept and --concept-file")
    return parse_concept(text if text is not None else _read(path))


def _tbox(text, path) -> TBox:
    if (text is None) == (path is None):
        raise click.UsageError("give exactly one of -t/--tbox-text and --tbox")
    return parse_tbox(text if text is not None else _read(path))


def _set(items) -> str:
    return "{" + ", ".join(items) + "}"


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--max-elems", type=int, default=DEFAULT_MAX_ELEMS, show_default=True,
              help="Cap on constructed interpretation sizes.")
@click.option("--max-steps", type=int, default=None,
              help="Step budget for the deciders (default: $DLKIT_MAX_STEPS or 5000000).")
@click.option("--max-depth", type=int, default=6, show_default=True,
              help="Cap on refinement levels and unravelling depth.")
@click.option("--sig", "sig_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Explicit signature file (lines: concept A B / role r / individual a).")
@click.pass_context
def main(ctx, max_elems, max_steps, max_depth, sig_path):
    """Description-logic toolkit: syntax, models, games, characteristic
    concepts, types, rewritability deciders and minimal companions."""
    ctx.ensure_object(dict)
    ctx.obj.update(max_elems=max_elems, max_steps=max_steps, max_depth=max_depth,
                   sig=_sig_file(sig_path) if sig_path else None)


# ---------------------------------------------------------------------------
# syntax and evaluation


@main.command()
@click.option("-c", "--concept", "text", default=None, help="Inline concept.")
@click.option("--concept-file", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--tbox", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Parse a TBox file instead of a concept.")
@click.option("--canonical", "canon", is_flag=True, help="Print the canonical form.")
@click.pass_context
@_guard
def parse(ctx, text, concept_file, tbox, canon):
    """Parse a concept or TBox and print it with its dialect and rank."""
    sig = ctx.obj["sig"]
    if tbox is not None:
        T = parse_tbox(_read(tbox), sig)
        click.echo(_sig_line(sig.union(signature_of(T)) if sig else signature_of(T)))
        for l, r in T.axioms:
            if canon:
                l, r = canonical(l), canonical(r)
            click.echo(f"{render(l)} [= {render(r)}")
        C = T.as_concept()
        click.echo(f"# dialect: {dialect_of(T)}")
        click.echo(f"# rank: {rank(C)}")
        click.echo(f"# clos: {2 * len(clos_positive(T))}")
        return
    if (text is None) == (concept_file is None):
        raise click.UsageError("give -c/--concept, --concept-file or --tbox")
    C = parse_concept(text if text is not None else _read(concept_file), sig)
    click.echo(_sig_line(sig.union(signature_of(C)) if sig else signature_of(C)))
    click.echo(render(canonical(C) if canon else C))
    click.echo(f"# dialect: {dialect_of(C)}")
    click.echo(f"# rank: {rank(C)}")


@main.command("eval")
@click.option("-i", "--interp", "ipath", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("-c", "--concept", "text", default=None)
@click.option("--concept-file", type=click.Path(exists=True, dir_okay=False), default=None)
@_guard
def eval_(ipath, text, concept_file):
    """Print the extension of a concept in an interpretation."""
    I = _interp(ipath)
    C = _concept(text, concept_file)
    click.echo(_set(extension(I, C)))


@main.command()
@click.option("-i", "--interp", "ipath", default=None, type=click.Path(exists=True, dir_okay=False),
              help="Check this interpretation against the TBox.")
@click.option("--tbox", default=None, type=click.Path(exists=True, dir_okay=False))
@click.option("-t", "--tbox-text", default=None)
@click.option("-c", "--concept", "text", default=None,
              help="Without -i: decide satisfiability of this concept (w.r.t. the TBox if given).")
@_guard
def sat(ipath, tbox, tbox_text, text):
    """Model checking (-i) or concept satisfiability (-c).  Exit 1 when the
    answer is negative."""
    if ipath is not None:
        T = _tbox(tbox_text, tbox)
        res = satisfies(_interp(ipath), T)
        if res.ok:
            click.echo("satisfied")
            return
        l, r = T.axioms[res.axiom]
        click.echo(f"violated at {res.element}: {render(l)} [= {render(r)}")
        sys.exit(1)
    if text is None:
        raise click.UsageError("give -i/--interp or -c/--concept")
    from .types import concept_sat

    T = None if tbox is None and tbox_text is None else _tbox(tbox_text, tbox)
    ok = concept_sat(parse_concept(text), T)
    click.echo("satisfiable" if ok else "unsatisfiable")
    if not ok:
        sys.exit(1)


# ---------------------------------------------------------------------------
# games


@main.command()
@click.option("--kind", required=True,
              help="alc-bisim (bisim), alci-bisim, alcq-bisim, el-sim (sim) or equi-sim.")
@click.option("-n", "--level", type=int, default=None, help="Stratified level (default: fixpoint).")
@click.option("--kappa", type=int, default=None, help="Counting cap for alcq-bisim.")
@click.option("--global", "glob", is_flag=True, help="Decide global relatedness of the two interpretations.")
@click.option("--graded", is_flag=True, help="With --global and alcq-bisim: also compare class sizes.")
@click.argument("args", nargs=-1)
@click.pass_context
@_guard
def rel(ctx, kind, level, kappa, glob, graded, args):
    """Relation table between two interpretations.

    ARGS is either I.int d H.int e (pointed) or I.int H.int with --global.
    Exit 1 when the points (or the interpretations) are not related."""
    from .games import global_related, stratified_relation

    sig = ctx.obj["sig"]
    if glob:
        if len(args) != 2:
            raise click.UsageError("--global expects I.int H.int")
        I, H = _interp(args[0]), _interp(args[1])
        v = global_related(kind, I, H, level, kappa, graded, sig)
        click.echo(f"global: {'yes' if v.ok else 'no'}")
        if v.uncovered_left:
            click.echo("uncovered left: " + " ".join(v.uncovered_left))
        if v.uncovered_right:
            click.echo("uncovered right: " + " ".join(v.uncovered_right))
        if not v.ok:
            sys.exit(1)
        return
    if len(args) != 4:
        raise click.UsageError("expected I.int d H.int e")
    I, H = _interp(args[0]), _interp(args[2])
    d, e = args[1], args[3]
    for X, x in ((I, d), (H, e)):
        if x not in X.index:
            raise DLError(f"element {x!r} not in domain")
    if level is not None and level > ctx.obj["max_depth"]:
        raise ResourceError(f"level {level} exceeds --max-depth {ctx.obj['max_depth']}")
    tab = stratified_relation(kind, level, kappa, I, H, sig)
    click.echo(tab.serialize(), nl=False)
    ok = (d, e) in tab
    click.echo(f"related {d} {e}: {'yes' if ok else 'no'}")
    if not ok:
        sys.exit(1)


# ---------------------------------------------------------------------------
# characteristic concepts


@main.command()
@click.option("-i", "--interp", "ipath", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("-d", "--point", default=None, help="Point (required for the pointed scope).")
@click.option("--dialect", default="ALC", show_default=True, help="ALC, ALCI, ALCQ, EL or ELneg.")
@click.option("--scope", default="pointed", show_default=True,
              help="pointed, global-ALCu, global-ALCIu, global-ALCQu, global-ALCQu1 or global-ELuneg.")
@click.option("-n", "--level", type=int, default=1, show_default=True)
@click.option("--kappa", type=int, default=None)
@click.option("--with-global", is_flag=True, help="Conjoin the global concept with the pointed one.")
@click.pass_context
@_guard
def char(ctx, ipath, point, dialect, scope, level, kappa, with_global):
    """Print a characteristic concept."""
    from .characteristic import CharRequest, characteristic, pointed_and_global

    I = _interp(ipath)
    if level > ctx.obj["max_depth"]:
        raise ResourceError(f"level {level} exceeds --max-depth {ctx.obj['max_depth']}")
    sig = ctx.obj["sig"] or I.signature
    req = CharRequest(dialect, scope, level, kappa, sig)
    click.echo(_sig_line(sig))
    if with_global:
        if point is None:
            raise click.UsageError("--with-global needs -d/--point")
        click.echo(render(pointed_and_global(req, I, point)))
    else:
        click.echo(render(characteristic(req, I, point)))


# ---------------------------------------------------------------------------
# constructions


@main.command()
@click.option("-i", "--interp", "ipath", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--mode", type=click.Choice(["tree", "forest", "partial"]), default="tree", show_default=True)
@click.option("-d", "--point", default=None, help="Root for tree unravelling.")
@click.option("--depth", type=int, default=None, help="Depth (default: --max-depth).")
@click.pass_context
@_guard
def unravel(ctx, ipath, mode, point, depth):
    """Tree, forest or partial tree unravelling."""
    I = _interp(ipath)
    cap = ctx.obj["max_elems"]
    depth = ctx.obj["max_depth"] if depth is None else depth
    if mode == "tree":
        if point is None:
            raise click.UsageError("tree unravelling needs -d/--point")
        J = tree_unravel(I, point, depth, cap).interp
    elif mode == "forest":
        J = forest_unravel(I, depth, cap)
    else:
        J = partial_tree_unravel(I, cap)
    click.echo(render_interpretation(J, [f"unravel: {mode}"]), nl=False)


@main.command()
@click.option("--op", type=click.Choice(["union", "product", "coherent", "nominal"]), required=True)
@click.argument("paths", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@click.pass_context
@_guard
def combine(ctx, op, paths):
    """Disjoint union, direct product, coherent ALCO union or nominal union."""
    items = [_interp(p) for p in paths]
    if op == "union":
        J = disjoint_union(items)
    elif op == "product":
        J = direct_product(items, max_elems=ctx.obj["max_elems"])
    elif op == "coherent":
        J = coherent_union_alco(items)
    else:
        J = nominal_union_alcqio(items)
    click.echo(render_interpretation(J, [f"combine: {op}"]), nl=False)


@main.command()
@click.option("-i", "--interp", "ipath", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--kind", type=click.Choice(["alc-global", "alcqu1", "alcqu"]), default="alc-global", show_default=True)
@click.option("-o", "--output", default=None, type=click.Path(dir_okay=False), help="Write here instead of stdout.")
@click.pass_context
@_guard
def minimize(ctx, ipath, kind, output):
    """Smallest interpretation globally related to the input."""
    from .minimize import minimal_companion

    I = _interp(ipath)
    C = minimal_companion(I, kind, max_elems=ctx.obj["max_elems"])
    header = [f"minimize: {kind}", f"size: {len(I)} -> {len(C)}"]
    for d in C.interpretation.domain:
        header.append(f"{d} <- " + " ".join(C.provenance.get(d, ())))
    text = render_interpretation(C.interpretation, header)
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--tbox", default=None, type=click.Path(exists=True, dir_okay=False))
@click.option("-t", "--tbox-text", default=None)
@click.option("--mode", type=click.Choice(["tp", "tpT", "tpk"]), default="tpT", show_default=True)
@click.option("-k", type=int, default=None, help="Rank bound for tpk.")
@click.option("--dialect", type=click.Choice(["ALC", "ALCI"]), default="ALCI", show_default=True)
@_guard
def types(tbox, tbox_text, mode, k, dialect):
    """Print the surviving types, one per line."""
    from .types import enumerate_types

    T = _tbox(tbox_text, tbox)
    table = enumerate_types(T, mode, dialect, k)
    click.echo(f"# {mode}: {len(table.types)} types")
    for t in table.types:
        click.echo(table.render_type(t))


# ---------------------------------------------------------------------------
# rewritability


def _write_witness(prefix: str, v, label: str):
    w = v.witness
    head = [f"verdict: {v.answer}", f"decider: {label}", f"relation: {w.relation}"]
    if w.tuple:
        head.append(f"trigger: {w.tuple}")
    files = [("model", w.model, "satisfies T"), ("countermodel", w.countermodel, "violates T")]
    for k, F in enumerate(w.factors):
        files.append((f"factor{k + 1}", F, "model factor"))
    out = []
    for name, I, role in files:
        extra = [f"role: {role}"]
        if name == "countermodel" and w.point:
            extra.append(f"violating point: {w.point}")
        path = f"{prefix}.{name}.int"
        Path(path).write_text(render_interpretation(I, head + extra), encoding="utf-8")
        out.append(path)
    return out


def _rewrite_command(name, fn, label, help_text):
    @click.option("--tbox", default=None, type=click.Path(exists=True, dir_okay=False))
    @click.option("-t", "--tbox-text", default=None)
    @click.option("--witness", default=None, metavar="PREFIX",
                  help="Build a witness on negative answers and write PREFIX.model.int, PREFIX.countermodel.int.")
    @click.option("--trace", is_flag=True, help="Print the elimination trace.")
    @click.pass_context
    @_guard
    def cmd(ctx, tbox, tbox_text, witness, trace):
        T = _tbox(tbox_text, tbox)
        v = fn(T, witness=witness is not None, max_steps=ctx.obj["max_steps"])
        click.echo(f"{label}: {v.answer}")
        if trace:
            for line in v.trace:
                click.echo(f"trace: {line}")
        if witness is not None and v.witness is not None:
            for p in _write_witness(witness, v, label):
                click.echo(f"wrote {p}")
        sys.exit(v.exit_code)

    cmd.__doc__ = help_text
    return rewritable.command(name)(cmd)


@main.group()
def rewritable():
    """Rewritability and invariance deciders (exit 0 yes, 1 no, 3 inconclusive)."""


def _register():
    from .rewrite import alc_to_el, alci_to_alc, equisim_invariant, product_preserved

    _rewrite_command("alci-alc", alci_to_alc, "alci-alc", "Is the ALCI TBox equivalent to an ALC TBox?")
    _rewrite_command("alc-el", alc_to_el, "alc-el", "Is the ALC TBox equivalent to an EL TBox?")
    _rewrite_command("equisim", equisim_invariant, "equisim", "Is the ALC TBox invariant under global equi-simulation?")
    _rewrite_command("product", product_preserved, "product", "Is the ALC TBox preserved under direct products?")


_register()


if __name__ == "__main__":  # pragma: no cover
    main()

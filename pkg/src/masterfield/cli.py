"""Command line interface.

Every subcommand prints a Markdown report to standard output and can also
write it (``--md``) and a CSV table (``--csv``) to files. Exit codes: 0 on
success, 1 when a checked gate fails, 2 for usage and input errors.
"""

from __future__ import annotations

import functools
import math
import os
import sys
import time
from fractions import Fraction

import click

from .errors import GateFailure, MasterFieldError, UsageError
from .report import RunReport

DEFAULT_WORDS = ("XYX*Y*", "(XYX*Y*)^2", "(XYX*Y*)^3", "XY^2X*Y^-2", "XYXY*", "XY*XY")


def default_workers() -> int:
    raw = os.environ.get("MASTERFIELD_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"MASTERFIELD_WORKERS must be an integer, got {raw!r}") from None


def parse_areas(text: str | None, faces, doc_areas) -> dict[int, Fraction]:
    """Comma-separated areas for ``faces`` in increasing order, or the document's."""
    if text is None:
        missing = [f for f in faces if f not in doc_areas]
        if missing:
            raise UsageError(f"no areas given for faces {missing}; pass --areas")
        return {f: doc_areas[f] for f in faces}
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if len(parts) != len(faces):
        raise UsageError(f"--areas needs {len(faces)} values (faces {list(faces)}), got {len(parts)}")
    try:
        vals = [Fraction(p) for p in parts]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot parse areas {text!r}") from None
    return dict(zip(faces, vals))


def _report_options(fn):
    @click.option("--md", "md_path", type=click.Path(dir_okay=False), help="Write the Markdown report here.")
    @click.option("--csv", "csv_path", type=click.Path(dir_okay=False), help="Write the CSV table here.")
    @click.option("--timings", is_flag=True, help="Record wall-clock times (breaks byte-identical output).")
    @functools.wraps(fn)
    def wrapper(md_path, csv_path, timings, **kw):
        report = fn(timings=timings, **kw)
        text = report.to_markdown()
        click.echo(text, nl=False)
        if md_path:
            with open(md_path, "w", encoding="utf-8") as fh:
                fh.write(text)
        if csv_path:
            with open(csv_path, "w", encoding="utf-8", newline="") as fh:
                fh.write(report.to_csv())
        failed = [i.item for i in report.items if i.note.startswith("FAIL")]
        if failed:
            raise GateFailure(f"gates failed: {', '.join(failed)}")

    return wrapper


class _Clock:
    def __init__(self):
        self.t = time.perf_counter()

    def lap(self) -> float:
        now = time.perf_counter()
        out, self.t = (now - self.t) * 1e3, now
        return round(out, 3)


def _load(path):
    from .mapfile import load_map

    doc = load_map(path)
    return doc, doc.to_map()


def _loop(doc, m, name):
    return doc.loop(name, m)


@click.group()
@click.version_option(package_name="artifact")
def cli():
    """Master field of two-dimensional Yang-Mills on maps and surfaces."""


# --- maps ----------------------------------------------------------------------------


@cli.command("map-info")
@click.option("--map", "map_path", required=True, help="Map file or builtin:NAME.")
@_report_options
def map_info(map_path, timings):
    """Counts, genus, boundary and loop properties of a map."""
    from .homology import homology_class
    from .maps import intersection_profile
    from .errors import MapError

    doc, m = _load(map_path)
    rep = RunReport("map-info", {"map": map_path}, timings=timings)
    rep.add("vertices", m.n_vertices, "exact")
    rep.add("edges", m.n_edges, "exact")
    rep.add("faces", m.n_faces, "exact")
    rep.add("genus", m.genus, "exact")
    rep.add("boundary_faces", len(m.boundary), "exact")
    for name in doc.loops:
        lp = doc.loop(name, m)
        rep.add(f"loop {name} length", len(lp.darts), "exact")
        try:
            prof = intersection_profile(m, lp)
            tame = prof.is_tame
            crossings = ",".join(map(str, prof.transverse)) or "none"
        except MapError as exc:
            tame, crossings = False, type(exc).__name__
        rep.add(f"loop {name} tame", tame, "exact", note=f"transverse crossings: {crossings}")
        cls = homology_class(m, lp)
        rep.add(f"loop {name} homology", " ".join(str(c) for c in cls) or "0", "exact")
    return rep


# --- evaluation ----------------------------------------------------------------------


def _planar_like(command, map_path, loop, areas, timings, planar):
    from .planar import eval_one_boundary, eval_planar

    doc, m = _load(map_path)
    a = parse_areas(areas, sorted(m.inner_faces), doc.areas)
    rep = RunReport(command, {"map": map_path, "loop": loop, "areas": _fmt_areas(a)}, timings=timings)
    clock = _Clock()
    lp = _loop(doc, m, loop)
    fn = eval_planar if planar else eval_one_boundary
    val = fn(m, lp, {f: float(x) for f, x in a.items()})
    rep.add(f"Phi({loop})", val, "exact", runtime_ms=clock.lap())
    return rep


def _fmt_areas(a):
    return ",".join(f"f{f}={a[f]}" for f in sorted(a))


@cli.command("eval-plane")
@click.option("--map", "map_path", required=True)
@click.option("--loop", required=True, help="Name of a loop in the map file.")
@click.option("--areas", default=None, help="Inner face areas in face order, e.g. 1,1/2.")
@_report_options
def eval_plane(map_path, loop, areas, timings):
    """Planar master field of a loop."""
    return _planar_like("eval-plane", map_path, loop, areas, timings, planar=True)


@cli.command("eval-one-boundary")
@click.option("--map", "map_path", required=True)
@click.option("--loop", required=True)
@click.option("--areas", default=None)
@_report_options
def eval_one_boundary_cmd(map_path, loop, areas, timings):
    """Master field of a loop on a surface with one boundary component."""
    return _planar_like("eval-one-boundary", map_path, loop, areas, timings, planar=False)


@cli.command("eval-surface")
@click.option("--map", "map_path", required=True)
@click.option("--loop", required=True)
@click.option("--areas", default=None, help="Areas of all faces in face order.")
@_report_options
def eval_surface_cmd(map_path, loop, areas, timings):
    """Master field of a loop on a closed surface, through its lift."""
    from .cover import FundamentalPolygonMap, eval_surface, tiling_stats

    doc, m = _load(map_path)
    ps = doc.polygon(m)
    if ps is None:
        raise UsageError("the map file defines no polygon sides")
    a = parse_areas(areas, list(range(m.n_faces)), doc.areas)
    rep = RunReport("eval-surface", {"map": map_path, "loop": loop, "areas": _fmt_areas(a)}, timings=timings)
    clock = _Clock()
    fpm = FundamentalPolygonMap.from_sides(ps)
    lp = _loop(doc, m, loop)
    res = eval_surface(fpm, lp, {f: float(x) for f, x in a.items()})
    note = "contractible" if res.contractible else "noncontractible"
    rep.add(f"Phi({loop})", res.value, res.provenance, runtime_ms=clock.lap(), note=note)
    rep.add("genus", fpm.genus, "exact")
    rep.add("deck element", fpm.deck_str(fpm.lift(lp).deck), "exact")
    if res.contractible:
        rep.add("tiling length", tiling_stats(fpm, lp).length, "exact")
    return rep


@cli.command("check-mm")
@click.option("--map", "map_path", required=True)
@click.option("--loop", required=True)
@click.option("--areas", default=None)
@click.option("--h", "steps", multiple=True, type=float, help="Finite difference steps.")
@click.option("--tol", default=1e-5, show_default=True, help="Gate on the smallest step.")
@_report_options
def check_mm(map_path, loop, areas, steps, tol, timings):
    """Makeenko-Migdal residuals at every transverse crossing of a planar loop."""
    from .maps import intersection_profile
    from .planar import mm_residual

    doc, m = _load(map_path)
    a = parse_areas(areas, sorted(m.inner_faces), doc.areas)
    hs = sorted(steps or (1e-2, 5e-3, 1e-3), reverse=True)
    rep = RunReport(
        "check-mm",
        {"map": map_path, "loop": loop, "areas": _fmt_areas(a), "h": ",".join(map(repr, hs)), "tol": tol},
        timings=timings,
    )
    lp = _loop(doc, m, loop)
    prof = intersection_profile(m, lp)
    if not prof.transverse:
        raise UsageError(f"loop {loop!r} has no transverse crossing")
    af = {f: float(x) for f, x in a.items()}
    for v in prof.transverse:
        res = [mm_residual(m, lp, af, v, h) for h in hs]
        for h, r in zip(hs, res):
            rep.add(f"vertex {v} h={h!r} residual", r.residual, "exact")
        ok = abs(res[-1].residual) < tol
        orders = [
            math.log(abs(r1.residual) / abs(r2.residual)) / math.log(h1 / h2)
            for (h1, r1), (h2, r2) in zip(zip(hs, res), zip(hs[1:], res[1:]))
            if r1.residual and r2.residual
        ]
        note = ("PASS" if ok else "FAIL") + (
            " observed order " + ",".join(f"{o:.2f}" for o in orders) if orders else ""
        )
        rep.add(f"vertex {v} derivative", res[-1].derivative, "exact")
        rep.add(f"vertex {v} product", res[-1].product, "exact", note=note)
    return rep


# --- Monte Carlo ---------------------------------------------------------------------


@cli.command("mc-run")
@click.option("--map", "map_path", required=True)
@click.option("--loop", required=True)
@click.option("--areas", default=None)
@click.option("--group", "family", default="U", show_default=True, type=click.Choice(["U", "SU", "SO", "Sp"]))
@click.option("--N", "n", default=32, show_default=True, type=int)
@click.option("--samples", default=500, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--steps", default=None, type=int, help="Heat kernel steps (default max(100, 100 t)).")
@click.option("--workers", default=None, type=int, help="Worker processes (default $MASTERFIELD_WORKERS or 1).")
@click.option("--mm-vertex", default=None, type=int, help="Experimental: Monte Carlo Makeenko-Migdal check at a crossing.")
@_report_options
def mc_run(map_path, loop, areas, family, n, samples, seed, steps, workers, mm_vertex, timings):
    """Monte Carlo Wilson loop under the one-boundary Yang-Mills measure."""
    from .groups import GroupSpec
    from .planar import eval_one_boundary
    from .ymmc import mm_residual_mc, wilson_for_map

    doc, m = _load(map_path)
    a = parse_areas(areas, sorted(m.inner_faces), doc.areas)
    g = GroupSpec(family, n)
    workers = workers or default_workers()
    rep = RunReport(
        "mc-run",
        {
            "map": map_path, "loop": loop, "areas": _fmt_areas(a), "group": str(g),
            "samples": samples, "steps": steps if steps else "default", "workers": workers,
        },
        seed=seed,
        timings=timings,
    )
    lp = _loop(doc, m, loop)
    af = {f: float(x) for f, x in a.items()}
    clock = _Clock()
    est = wilson_for_map(m, lp, af, g, samples, seed, steps, workers)
    rep.add(f"E tr h({loop})", est.mean, "mc", stderr=est.stderr, runtime_ms=clock.lap())
    rep.add("imaginary part", est.imag_mean, "mc")
    rep.add("variance", est.variance, "mc")
    limit = eval_one_boundary(m, lp, af)
    rep.add("large-N limit", limit, "exact")
    gap = abs(est.mean - limit)
    slack = 3 * est.stderr + 5 / n
    rep.add("abs(mean - limit)", gap, "mc", note=f"{'within' if gap <= slack else 'outside'} 3 stderr + 5/N = {slack!r}")
    if mm_vertex is not None:
        r = mm_residual_mc(m, lp, af, mm_vertex, g, samples, seed=seed, steps=steps or 20)
        rep.add(f"MM derivative at {mm_vertex}", r.derivative, "mc", stderr=r.derivative_stderr, note="experimental")
        rep.add(f"MM product at {mm_vertex}", r.product, "mc", stderr=r.product_stderr, note="experimental")
    return rep


@cli.command("magic-check")
@click.option("--group", "family", required=True, type=click.Choice(["U", "SU", "SO", "Sp"]))
@click.option("--N", "ns", multiple=True, type=int, help="Ranks to check (default 2, 3, 4).")
@click.option("--pairs", default=20, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--tol", default=1e-12, show_default=True)
@_report_options
def magic_check_cmd(family, ns, pairs, seed, tol, timings):
    """Casimir trace identities on random pairs of group elements."""
    from .groups import GroupSpec, magic_check, magic_sides
    from .ymmc import sample_haar, stream

    ns = ns or (2, 3, 4)
    rep = RunReport(
        "magic-check",
        {"group": family, "N": ",".join(map(str, ns)), "pairs": pairs, "tol": tol},
        seed=seed,
        timings=timings,
    )
    for n in ns:
        g = GroupSpec(family, n)
        clock = _Clock()
        r1 = r2 = rv = 0.0
        for i in range(pairs):
            rng = stream(seed, i)
            a, b = sample_haar(g, rng), sample_haar(g, rng)
            res = magic_check(g, a, b)
            r1, r2 = max(r1, res.tr1), max(r2, res.tr2)
            s = magic_sides(g, a, b)
            rv = max(rv, abs(s["lhs2"] - s["rhs2_variant"]))
        ms = clock.lap()
        rep.add(f"{g} trace-of-product residual", r1, "exact", runtime_ms=ms, note="PASS" if r1 < tol else "FAIL")
        rep.add(f"{g} product-of-traces residual", r2, "exact", note="PASS" if r2 < tol else "FAIL")
        rep.add(f"{g} unscaled variant residual", rv, "exact", note="reference only")
    return rep


# --- t-freeness and the torus --------------------------------------------------------


@cli.command("tfree")
@click.option("--word", required=True, help="Word in X, Y, X*, Y*, e.g. 'XY^2X*Y^-2'.")
@click.option("--t", "t", required=True, type=float)
@_report_options
def tfree_cmd(word, t, timings):
    """Mixed moment of two Haar unitaries under t-free independence."""
    from .tfree import tfree_moment

    rep = RunReport("tfree", {"word": word, "t": t}, timings=timings)
    clock = _Clock()
    rep.add(f"tau_t({word})", tfree_moment(word, t), "ode", runtime_ms=clock.lap())
    return rep


@cli.command("phi-t")
@click.option("--word", required=True)
@click.option("--T", "T", required=True, type=float)
@_report_options
def phi_t_cmd(word, T, timings):
    """Torus master field of the lattice loop spelled by a word."""
    from .tfree import phi_T_word

    rep = RunReport("phi-t", {"word": word, "T": T}, timings=timings)
    clock = _Clock()
    rep.add(f"Phi_T({word})", phi_T_word(word, T), "exact", runtime_ms=clock.lap())
    return rep


@cli.command("interp-report")
@click.option("--T", "T", required=True, type=float)
@click.option("--word", "words", multiple=True)
@click.option("--tol", default=1e-6, show_default=True)
@_report_options
def interp_report_cmd(T, words, tol, timings):
    """Torus master field against t-free moments at t = T/4."""
    from .tfree import interpolation_report

    words = words or DEFAULT_WORDS
    rep = RunReport("interp-report", {"T": T, "t": T / 4, "words": " ".join(words), "tol": tol}, timings=timings)
    for row in interpolation_report(T, words):
        rep.add(f"{row.word} Phi_T", row.phi, "exact")
        note = "agree" if row.gap <= tol else "separated"
        rep.add(f"{row.word} tfree", row.tfree, "ode", note=note)
        rep.add(f"{row.word} classical", row.classical, "exact")
        rep.add(f"{row.word} free", row.free, "exact")
    return rep


# --- self test -----------------------------------------------------------------------


@cli.command("selftest")
@_report_options
def selftest(timings):
    """Fast end-to-end checks; exits with 1 when one fails."""
    from .selfcheck import run_checks

    rep = RunReport("selftest", timings=timings)
    for name, value, tol, ok, ms in run_checks():
        rep.add(name, value, "exact", runtime_ms=ms, note=("PASS" if ok else "FAIL") + f" tol {tol!r}")
    return rep


def main(argv=None) -> int:
    """Entry point returning an exit code instead of raising."""
    try:
        cli.main(args=argv, prog_name="masterfield", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return 2
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 2
    except GateFailure as exc:
        click.echo(f"gate failure: {exc}", err=True)
        return 1
    except MasterFieldError as exc:
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        return 2
    return 0


def run() -> None:
    sys.exit(main())

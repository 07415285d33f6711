"""Command line interface: ``capcount <command> ...``.

Exit status is 0 on success, 1 when a verification row fails and 2 on bad
input.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import sys
from math import factorial
from pathlib import Path

import click

from .cache import CountCache
from .field import FieldError
from .formulas import CATALOG as FORMULAS
from .formulas import UnknownFormulaError, formula_eval
from .geometry import build_geometry, check_invariants
from .planar_space import CATALOG as SPACES
from .planar_space import FILTERS, PlanarSpace, enumerate_planar_spaces, match_catalog, validate
from .search import SearchError
from .verify import SUITES, Runner, run_suite

EXIT_MISMATCH = 1
EXIT_INPUT = 2


def _emit(ctx: click.Context, rows: list[dict], text: str | None = None) -> None:
    fmt = ctx.obj["format"]
    if fmt == "json":
        click.echo(json.dumps(rows if len(rows) != 1 else rows[0], indent=2, sort_keys=True))
    elif fmt == "csv":
        buf = io.StringIO()
        cols = list(rows[0]) if rows else []
        w = csv.DictWriter(buf, cols, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()})
        click.echo(buf.getvalue(), nl=False)
    else:
        click.echo(text if text is not None else "\n".join(" ".join(f"{k}={v}" for k, v in r.items()) for r in rows))


def _geometry(q: int):
    try:
        return build_geometry(q)
    except FieldError as exc:
        raise click.BadParameter(str(exc), param_hint="--q") from None


def _runner(ctx: click.Context) -> Runner:
    return Runner(ctx.obj["cache"], ctx.obj["threads"])


@click.group()
@click.option("--format", "fmt", type=click.Choice(["text", "json", "csv"]), default="text", show_default=True)
@click.option("--cache-dir", type=click.Path(file_okay=False, path_type=Path), default=None,
              help="Directory of the count cache (default: $CAPCOUNT_CACHE, else no persistence).")
@click.option("--threads", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for sampled checks only.")
@click.option("-v", "--verbose", is_flag=True)
@click.pass_context
def main(ctx, fmt, cache_dir, threads, seed, verbose):
    """Exact counts of caps and planar-space realizations in PG(3, q)."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING)
    ctx.ensure_object(dict)
    ctx.obj.update(format=fmt, cache=CountCache(cache_dir), threads=threads, seed=seed)


@main.command("geometry-stats")
@click.option("--q", "q", type=int, required=True)
@click.option("--dump", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Also write the incidence structure as JSON.")
@click.pass_context
def geometry_stats(ctx, q, dump):
    """Point, line and plane counts of PG(3, q) and incidence self-checks."""
    g = _geometry(q)
    checks = check_invariants(g)
    row = {
        "q": q,
        "modulus": g.field.modulus_str(),
        "points": len(g.points),
        "lines": len(g.lines),
        "planes": len(g.planes),
        "invariants_ok": all(checks.values()),
        **{f"check_{k}": v for k, v in checks.items()},
    }
    if dump:
        g.dump(dump)
    _emit(ctx, [row])
    ctx.exit(0 if row["invariants_ok"] else EXIT_MISMATCH)


@main.command("count-caps")
@click.option("--q", "q", type=int, required=True)
@click.option("--n", "n", type=int, required=True)
@click.option("--method", type=click.Choice(["plain", "triple"]), default="plain", show_default=True)
@click.option("--ordered", is_flag=True, help="Print the labeled (ordered) count only.")
@click.pass_context
def count_caps_cmd(ctx, q, n, method, ordered):
    """Exact number of n-caps (unordered unless --ordered)."""
    _geometry(q)
    try:
        e = _runner(ctx).caps(q, n, "plain" if method == "plain" else "triple_symmetry")
    except SearchError as exc:
        raise click.BadParameter(str(exc), param_hint="--n") from None
    row = {"q": q, "n": n, "method": method, "unordered": e["value"]["unordered"],
           "ordered": e["value"]["ordered"], "nodes": e["nodes"]}
    text = e["value"]["ordered"] if ordered else e["value"]["unordered"]
    _emit(ctx, [row], text if ctx.obj["format"] == "text" else None)


@main.command("classify-caps")
@click.option("--q", "q", type=int, required=True)
@click.option("--n", "n", type=int, required=True)
@click.option("--method", type=click.Choice(["plain", "triple"]), default="plain", show_default=True)
@click.pass_context
def classify_caps_cmd(ctx, q, n, method):
    """n-caps grouped by induced planar space, with A_f per class."""
    _geometry(q)
    try:
        e = _runner(ctx).classify(q, n, "plain" if method == "plain" else "triple_symmetry")
    except SearchError as exc:
        raise click.BadParameter(str(exc), param_hint="--n") from None
    rows = []
    for r in e["value"]:
        rows.append({
            "space": r["representative"],
            "aut_size": r["aut"],
            "unordered_count": r["unordered"],
            "labeled_count": factorial(n) // r["aut"],
            "A_f": r["A_f"],
        })
    total = sum(r["labeled_count"] * int(r["A_f"]) for r in rows)
    text = "\n".join(
        f"{PlanarSpace.from_json(r['space'])} aut={r['aut_size']} unordered={r['unordered_count']} "
        f"labeled={r['labeled_count']} A_f={r['A_f']}" for r in rows
    ) + f"\nordered total {total}"
    _emit(ctx, rows, text)


@main.command("realizations")
@click.option("--q", "q", type=int, required=True)
@click.option("--config", type=click.Choice(sorted(SPACES)), default=None)
@click.option("--file", "path", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None)
@click.pass_context
def realizations_cmd(ctx, q, config, path):
    """Number of strong realizations of a planar space in PG(3, q)."""
    if (config is None) == (path is None):
        raise click.UsageError("give exactly one of --config or --file")
    _geometry(q)
    if config:
        ps, label = SPACES[config], config
    else:
        try:
            ps, label = PlanarSpace.from_json(path.read_text()), None
        except (ValueError, KeyError, TypeError) as exc:
            raise click.BadParameter(f"cannot read planar space: {exc}", param_hint="--file") from None
    rep = validate(ps, True)
    if not rep.ok:
        raise click.BadParameter(f"invalid planar space: {rep.violations[:3]}", param_hint="--file")
    e = _runner(ctx).realizations(q, ps, label)
    _emit(ctx, [{"q": q, "config": config or str(path), "count": e["value"], "nodes": e["nodes"]}],
          e["value"] if ctx.obj["format"] == "text" else None)


@main.command("census")
@click.option("--n", "n", type=int, required=True)
@click.option("--filter", "filt", type=click.Choice(FILTERS), default="all", show_default=True)
@click.pass_context
def census_cmd(ctx, n, filt):
    """Isomorphism classes of planar spaces on n points."""
    try:
        classes = enumerate_planar_spaces(n, filt)
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--n") from None
    rows = []
    for c in classes:
        names = match_catalog(c.representative, sorted(SPACES))
        rows.append({"space": c.representative.to_json(), "aut_size": c.aut_size,
                     "catalog": ",".join(names)})
    text = "\n".join(
        f"{PlanarSpace.from_json(r['space'])} aut={r['aut_size']}" + (f" = {r['catalog']}" if r["catalog"] else "")
        for r in rows
    ) + f"\n{len(rows)} classes"
    _emit(ctx, rows, text)


@main.command("eval")
@click.option("--formula", required=True)
@click.option("--q", "q", type=int, required=True)
@click.pass_context
def eval_cmd(ctx, formula, q):
    """Evaluate a catalogued closed form at q."""
    if q < 2:
        raise click.BadParameter("q must be >= 2", param_hint="--q")
    try:
        v = formula_eval(formula, q)
    except UnknownFormulaError:
        raise click.BadParameter(f"unknown formula; choose from {sorted(FORMULAS)}", param_hint="--formula") from None
    _emit(ctx, [{"formula": formula, "q": q, "value": str(v)}], str(v) if ctx.obj["format"] == "text" else None)


@main.command("verify")
@click.option("--suite", type=click.Choice(list(SUITES) + ["all"]), default="all", show_default=True)
@click.option("--qmax", type=int, default=5, show_default=True)
@click.option("--extended", is_flag=True, help="Include the q=4, n=7 cap count and q=4,5 realization checks.")
@click.pass_context
def verify_cmd(ctx, suite, qmax, extended):
    """Compare closed forms with exhaustive search; exit 1 on any mismatch."""
    report = run_suite(suite, _runner(ctx), qmax=qmax, extended=extended)
    fmt = ctx.obj["format"]
    if fmt == "json":
        click.echo(report.to_json())
    elif fmt == "csv":
        click.echo(report.to_csv(), nl=False)
    else:
        click.echo(report.to_text())
    ctx.exit(0 if report.passed else EXIT_MISMATCH)


def run_command(argv: list[str]) -> int:
    """Run the CLI in-process and return its exit status."""
    try:
        # without standalone mode click hands back ctx.exit codes instead of raising
        rv = main.main(args=argv, prog_name="capcount", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return EXIT_INPUT
    except click.Abort:
        return EXIT_INPUT
    return rv if isinstance(rv, int) else 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

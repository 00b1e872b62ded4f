"""CLI entrypoint for lipknot."""

import hashlib
import json
import logging
import random
import time
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import click
from dotenv import load_dotenv

from lipknot.config import ConfigError, load_config

# Load .env file on CLI startup
load_dotenv()

INPUT_ERROR = 2
EXPECTATION_MISMATCH = 1


def _fail(message: str) -> None:
    click.echo(f"Error: {message}", err=True)
    raise SystemExit(INPUT_ERROR)


def _rational(value: Optional[str], name: str) -> Optional[Fraction]:
    if value is None:
        return None
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError):
        _fail(f"{name} must be a rational such as 3 or 3/2, got {value!r}")


def _diagram_from(pd: Optional[str], braid: Optional[str]):
    from lipknot.link_core import parse_braid, parse_pd

    if bool(pd) == bool(braid):
        _fail("Give exactly one of --pd or --braid")
    return parse_pd(pd) if pd else parse_braid(braid)


def _germ_from(source: str):
    """A germ file path, or a corpus name."""
    from lipknot.corpus import corpus
    from lipknot.germ_model import load_germ
    from lipknot.validator import load_json_safe

    path = Path(source)
    if path.exists():
        data, error = load_json_safe(path)
        if error:
            _fail(error)
        return load_germ(data, str(path))
    g = corpus(source)
    if isinstance(g, tuple):
        _fail(f"{source} names a pair; pass its members separately")
    return g


def _input_hash(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _write_json(data: Dict[str, Any], out: Optional[str]) -> None:
    if out is None:
        return
    try:
        Path(out).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    except OSError as e:
        _fail(f"Cannot write {out}: {e.strerror or e}")


class _LibraryErrors:
    """Context manager mapping library errors to exit code 2."""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is not None and issubclass(exc_type, (ValueError, ConfigError)):
            _fail(str(exc))
        return False


@click.group()
@click.version_option(package_name="lipknot")
@click.option("--verbose", is_flag=True, help="Log library steps to stderr.")
@click.option("--quiet", is_flag=True, help="Suppress the JSON report.")
@click.pass_context
def cli(ctx: click.Context, verbose: bool, quiet: bool):
    """lipknot - link diagrams and Lipschitz geometry of surface germs in R^4."""
    if verbose:
        logging.basicConfig(level=logging.DEBUG, format="%(levelname)s %(name)s: %(message)s")
    ctx.obj = {"quiet": quiet}
    try:
        load_config()
    except ConfigError as e:
        click.echo(f"Configuration error:\n{e}", err=True)
        raise SystemExit(INPUT_ERROR)


def _emit(ctx: click.Context, report) -> None:
    from lipknot.report import emit

    emit(report, quiet=ctx.obj["quiet"])


@cli.command()
@click.option("--pd", help="PD code, e.g. 'X[1,4,2,3] X[3,2,4,1]'.")
@click.option("--braid", help="Braid closure, e.g. 'braid 2: s1 s1 s1'.")
@click.option("--germ", "germ_source", help="Germ file or corpus name.")
@click.pass_context
def parse(ctx: click.Context, pd: Optional[str], braid: Optional[str], germ_source: Optional[str]):
    """Parse and validate a diagram or germ; print its canonical form."""
    from lipknot.germ_model import germ_hash, save_germ
    from lipknot.link_core import serialize_pd
    from lipknot.report import RunReport

    report = RunReport("parse")
    with _LibraryErrors(), report.timed("parse"):
        if germ_source:
            g = _germ_from(germ_source)
            report.inputs["germ"] = germ_hash(g)
            report.outputs = {"germ": save_germ(g), "components": g.diagram.n_components}
        else:
            d = _diagram_from(pd, braid)
            report.inputs["diagram"] = _input_hash(pd or braid)
            report.outputs = {
                "pd": serialize_pd(d),
                "crossings": d.n_crossings,
                "components": d.n_components,
                "free_loops": d.free_loops,
                "faces": len(d.faces),
            }
    _emit(ctx, report)


@cli.command()
@click.option("--pd", help="PD code.")
@click.option("--braid", help="Braid closure.")
@click.option("--germ", "germ_source", help="Germ file or corpus name (its diagram is used).")
@click.option("--seed", type=int, help="Also re-check the profile after random Reidemeister moves.")
@click.option("--moves", type=int, default=10, show_default=True, help="Random moves used with --seed.")
@click.pass_context
def invariants(
    ctx: click.Context,
    pd: Optional[str],
    braid: Optional[str],
    germ_source: Optional[str],
    seed: Optional[int],
    moves: int,
):
    """Compute the invariant profile: Jones polynomials and linking numbers."""
    from lipknot.invariants import invariant_profile, kauffman_bracket, writhe
    from lipknot.link_core import random_insertion, serialize_pd
    from lipknot.report import RunReport

    report = RunReport("invariants")
    with _LibraryErrors(), report.timed("invariants"):
        if germ_source:
            d = _germ_from(germ_source).diagram
        else:
            d = _diagram_from(pd, braid)
        report.inputs["diagram"] = _input_hash(serialize_pd(d))
        profile = invariant_profile(d)
        report.outputs = {
            "profile": profile.to_dict(),
            "writhe": writhe(d),
            "bracket": kauffman_bracket(d).serialize(),
        }
        if seed is not None:
            rng = random.Random(seed)
            moved = d
            applied = []
            for _ in range(moves):
                moved, move = random_insertion(moved, rng)
                applied.append(move)
            report.inputs["seed"] = str(seed)
            report.outputs["moves"] = applied
            report.outputs["invariant_under_moves"] = (
                invariant_profile(moved).to_dict() == profile.to_dict()
            )
    _emit(ctx, report)


# Germ operations
@cli.group()
def op():
    """Apply one germ operation and print the resulting germ."""
    pass


def _germ_report(ctx: click.Context, command: str, before, after, out: Optional[str], **args) -> None:
    from lipknot.germ_model import germ_hash, save_germ
    from lipknot.report import RunReport

    report = RunReport(command, inputs={"germ": germ_hash(before)})
    report.inputs.update({k: str(v) for k, v in args.items() if v is not None})
    document = save_germ(after)
    report.outputs = {"germ": document, "hash": germ_hash(after)}
    _write_json(document, out)
    _emit(ctx, report)


@op.command("break")
@click.option("--germ", "germ_source", required=True, help="Germ file or corpus name.")
@click.option("--site", required=True, help="Bridge site id.")
@click.option("-p", "p", help="Break exponent (default q + 1).")
@click.option("--out", type=click.Path(), help="Write the resulting germ here.")
@click.pass_context
def op_break(ctx: click.Context, germ_source: str, site: str, p: Optional[str], out: Optional[str]):
    """Replace a bridge by its broken form (band smoothing)."""
    from lipknot.germ_model import break_bridge

    with _LibraryErrors():
        g = _germ_from(germ_source)
        result = break_bridge(g, site, _rational(p, "p"))
    _germ_report(ctx, "op break", g, result, out, site=site, p=p)


@op.command("twist")
@click.option("--germ", "germ_source", required=True, help="Germ file or corpus name.")
@click.option("--site", required=True, help="Bridge site id.")
@click.option("-k", "k", type=int, required=True, help="Full twists (non-zero, signed).")
@click.option("--out", type=click.Path(), help="Write the resulting germ here.")
@click.pass_context
def op_twist(ctx: click.Context, germ_source: str, site: str, k: int, out: Optional[str]):
    """Twist a bridge band k full times."""
    from lipknot.germ_model import twist_bridge

    with _LibraryErrors():
        g = _germ_from(germ_source)
        result = twist_bridge(g, site, k)
    _germ_report(ctx, "op twist", g, result, out, site=site, k=k)


@op.command("attach")
@click.option("--germ", "germ_source", required=True, help="Germ file or corpus name.")
@click.option("--component", type=int, default=0, show_default=True, help="Component index.")
@click.option("--pd", help="Knot as PD code.")
@click.option("--braid", help="Knot as braid closure.")
@click.option("--out", type=click.Path(), help="Write the resulting germ here.")
@click.pass_context
def op_attach(
    ctx: click.Context,
    germ_source: str,
    component: int,
    pd: Optional[str],
    braid: Optional[str],
    out: Optional[str],
):
    """Connected-sum a knot onto one component."""
    from lipknot.germ_model import attach_knot

    with _LibraryErrors():
        g = _germ_from(germ_source)
        result = attach_knot(g, component, _diagram_from(pd, braid))
    _germ_report(ctx, "op attach", g, result, out, component=component, knot=pd or braid)


@op.command("insert-bridge")
@click.option("--germ", "germ_source", required=True, help="Germ file or corpus name.")
@click.option("--edges", type=int, nargs=2, required=True, help="Two co-facial edge labels.")
@click.option("--face", type=int, help="Shared face index (default: found automatically).")
@click.option("--q", "q", required=True, help="Bridge exponent q.")
@click.option("--beta", required=True, help="Bridge exponent beta, 1 < beta < q.")
@click.option("--site", help="Id for the new site.")
@click.option("--out", type=click.Path(), help="Write the resulting germ here.")
@click.pass_context
def op_insert_bridge(
    ctx: click.Context,
    germ_source: str,
    edges: Tuple[int, int],
    face: Optional[int],
    q: str,
    beta: str,
    site: Optional[str],
    out: Optional[str],
):
    """Register a (q, beta)-bridge on two co-facial edges."""
    from lipknot.germ_model import insert_bridge

    with _LibraryErrors():
        g = _germ_from(germ_source)
        result = insert_bridge(g, face, edges, _rational(q, "q"), _rational(beta, "beta"), site_id=site)
    _germ_report(ctx, "op insert-bridge", g, result, out, edges=list(edges), q=q, beta=beta)


@op.command("tangent-cone")
@click.option("--germ", "germ_source", required=True, help="Germ file or corpus name.")
@click.option("--out", type=click.Path(), help="Write the cone as a germ here.")
@click.pass_context
def op_tangent_cone(ctx: click.Context, germ_source: str, out: Optional[str]):
    """Collapse pinches and bridges: print the pinched link."""
    from lipknot.certifier import pinched_profile
    from lipknot.germ_model import germ_hash, save_germ, tangent_cone
    from lipknot.report import RunReport

    report = RunReport("op tangent-cone")
    with _LibraryErrors(), report.timed("tangent_cone"):
        g = _germ_from(germ_source)
        cone = tangent_cone(g)
        report.inputs["germ"] = germ_hash(g)
        report.outputs = {"cone": cone.to_dict(), "profile": pinched_profile(cone).to_dict()}
    _write_json(save_germ(cone.as_germ()), out)
    _emit(ctx, report)


@cli.command()
@click.argument("first")
@click.argument("second")
@click.option("-p", "p", help="Break exponent for the bridge test (default max q + 1).")
@click.option("--out", type=click.Path(), help="Write the certificate here.")
@click.option("--replay", "replay_path", type=click.Path(), help="Check that a saved certificate replays.")
@click.pass_context
def certify(
    ctx: click.Context,
    first: str,
    second: str,
    p: Optional[str],
    out: Optional[str],
    replay_path: Optional[str],
):
    """Try to prove two germs (files or corpus names) are not equivalent."""
    from lipknot import certifier
    from lipknot.report import RunReport
    from lipknot.validator import load_json_safe

    report = RunReport("certify")
    with _LibraryErrors(), report.timed("certify"):
        g1, g2 = _germ_from(first), _germ_from(second)
        if replay_path:
            data, error = load_json_safe(Path(replay_path))
            if error:
                _fail(error)
            certificate = certifier.replay_certificate(data, g1, g2)
            report.outputs["replayed"] = True
        else:
            certificate = certifier.certify(g1, g2, _rational(p, "p"))
        document = certificate.to_dict()
        report.inputs = {"first": document["inputs"][0]["hash"], "second": document["inputs"][1]["hash"]}
        report.outputs["certificate"] = document
    _write_json(document, out)
    _emit(ctx, report)


# Corpus commands
@cli.group("corpus")
def corpus_group():
    """Named germs from the worked examples."""
    pass


@corpus_group.command("list")
def corpus_list():
    """List corpus names."""
    from lipknot.corpus import names

    for name in names():
        click.echo(name)


@corpus_group.command("make")
@click.argument("name")
@click.option("--out-dir", type=click.Path(file_okay=False), default=".", show_default=True)
@click.pass_context
def corpus_make(ctx: click.Context, name: str, out_dir: str):
    """Write NAME.germ (or both members of a pair) as JSON germ files."""
    from lipknot.corpus import corpus
    from lipknot.germ_model import germ_hash, save_germ
    from lipknot.report import RunReport

    report = RunReport("corpus make", inputs={"name": name})
    with _LibraryErrors():
        built = corpus(name)
    germs = built if isinstance(built, tuple) else (built,)
    directory = Path(out_dir)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        _fail(f"Cannot create {directory}: {e.strerror or e}")
    written = {}
    for g in germs:
        target = directory / f"{g.label}.germ"
        _write_json(save_germ(g), str(target))
        written[g.label] = {"path": target.name, "hash": germ_hash(g)}
    report.outputs = {"written": written}
    _emit(ctx, report)


def _check(certificate, expect: Dict[str, str]) -> Tuple[bool, str]:
    """Compare a certificate against an expectation block."""
    actual = {v.method: v.kind for v in certificate.verdicts}
    summary = ", ".join(f"{method}={kind}" for method, kind in sorted(actual.items()))
    ok = all(actual.get(method) == kind for method, kind in expect.items() if method != "witness")
    if ok and "witness" in expect:
        witnesses = [v.witness.invariant for v in certificate.verdicts if v.witness is not None]
        ok = expect["witness"] in witnesses
    return ok, summary


@corpus_group.command("verify")
@click.pass_context
def corpus_verify(ctx: click.Context):
    """Certify every expected corpus pair and self-check; exit 1 on any mismatch."""
    from lipknot.certifier import certify
    from lipknot.corpus import corpus
    from lipknot.germ_model import mirror_germ
    from lipknot.report import RunReport, print_summary
    from lipknot.validator import load_expectations

    start = time.perf_counter()
    report = RunReport("corpus verify")
    with _LibraryErrors():
        expectations = load_expectations()
        jobs = [(tuple(entry["germs"]), entry["expect"]) for entry in expectations.get("pairs", [])]
        family = expectations.get("twist_family")
        if family:
            indices = range(family["from"], family["to"] + 1)
            jobs += [
                ((f"twist.{i}", f"twist.{j}"), family["expect"])
                for i in indices for j in indices if i < j
            ]
        rows = []
        for (left, right), expect in jobs:
            ok, summary = _check(certify(corpus(left), corpus(right)), expect)
            rows.append({"pair": f"{left} vs {right}", "expected": expect, "actual": summary, "ok": ok})
        for name in expectations.get("self_checks", []):
            g = corpus(name)
            for tag, other in (("self", g), ("mirror", mirror_germ(g))):
                kind = certify(g, other).kind
                rows.append({
                    "pair": f"{name} vs {tag}",
                    "expected": "Inconclusive",
                    "actual": kind,
                    "ok": kind == "Inconclusive",
                })
    rows.sort(key=lambda row: row["pair"])
    report.outputs = {"checks": [{k: row[k] for k in ("pair", "actual", "ok")} for row in rows]}
    report.timing["verify"] = round(time.perf_counter() - start, 6)
    _emit(ctx, report)
    if not ctx.obj["quiet"]:
        print_summary(rows, report.timing["verify"])
    if not all(row["ok"] for row in rows):
        raise SystemExit(EXPECTATION_MISMATCH)


@cli.command()
@click.option("--pd", help="PD code.")
@click.option("--braid", help="Braid closure.")
@click.option("--germ", "germ_source", help="Germ file or corpus name.")
@click.option("--cone", is_flag=True, help="Draw the germ's tangent cone instead.")
@click.option("--svg", "svg_path", required=True, type=click.Path(), help="Output SVG path.")
@click.pass_context
def render(
    ctx: click.Context,
    pd: Optional[str],
    braid: Optional[str],
    germ_source: Optional[str],
    cone: bool,
    svg_path: str,
):
    """Draw a diagram or germ as a static SVG."""
    from lipknot.germ_model import tangent_cone
    from lipknot.render import write_svg
    from lipknot.report import RunReport

    report = RunReport("render", inputs={"source": _input_hash(germ_source or pd or braid or "")})
    with _LibraryErrors():
        if germ_source:
            obj = _germ_from(germ_source)
            if cone:
                obj = tangent_cone(obj)
        else:
            obj = _diagram_from(pd, braid)
        target = write_svg(obj, svg_path)
    report.outputs = {"svg": target.name, "bytes": target.stat().st_size}
    _emit(ctx, report)


if __name__ == "__main__":
    cli()

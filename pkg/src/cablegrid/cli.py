"""Command-line interface.

Exit status: 0 ok, 1 validation failure, 2 bad input, 3 search gave no
answer within its limits. Results go to stdout as JSON; messages go to stderr.
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

import click

from .blocks import BlockPresentation, StepsConfiguration, validate_presentation, validate_steps
from .braid import BraidWord, NotAKnotError, alexander_polynomial, exponent_sum, self_linking
from .cable import (
    CablingSpec,
    ConstructionError,
    ConstructionParams,
    build_steps_configuration,
    cable_fixture,
    cable_flyped_fixture,
    trefoil_steps_fixture,
    superimpose_cable,
)
from .grid import (
    FlypePath,
    InvalidDiagramError,
    MoveNotApplicableError,
    RectDiagram,
    alexander,
    braid_of,
    classical_invariants,
    commutation_class,
    find_flype_paths,
    negative_flype,
    render_ascii,
    render_svg,
    validate,
)
from .sampling import random_diagram, random_knot_braid, random_presentation, random_trace
from .search import MoveTrace, exchange_reduce, verify_trace

OK, INVALID, BAD_INPUT, UNKNOWN = 0, 1, 2, 3


class BadInput(Exception):
    pass


def _emit(payload: dict, status: int = OK) -> None:
    click.echo(json.dumps(payload, indent=2, sort_keys=True))
    sys.exit(status)


def _fail(message: str) -> None:
    click.echo(message, err=True)
    click.echo(json.dumps({"error": message}))
    sys.exit(BAD_INPUT)


def _load(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise BadInput(f"cannot read {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise BadInput(f"{path} does not hold a JSON object")
    return data


def _kind(data: dict) -> str:
    if "verticals" in data:
        return "diagram"
    if "disc_heights" in data or "attachments" in data:
        return "steps"
    if "blocks" in data:
        return "presentation"
    if "letters" in data:
        return "braid"
    if "start" in data and "steps" in data:
        return "trace"
    raise BadInput("unrecognized JSON kind")


def _word_of(data: dict) -> BraidWord:
    kind = _kind(data)
    if kind == "braid":
        return BraidWord.from_json(data)
    if kind == "diagram":
        return braid_of(RectDiagram.from_json(data))
    raise BadInput(f"expected a braid or a diagram, got a {kind}")


def _guard(fn):
    """Map input problems to exit status 2."""

    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (BadInput, InvalidDiagramError, NotAKnotError, ConstructionError, MoveNotApplicableError) as exc:
            _fail(str(exc))
        except (KeyError, TypeError, ValueError) as exc:
            _fail(f"bad input: {exc!r}")

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@click.group()
def main() -> None:
    """Block presentations, cable diagrams and exchange-move search."""


@main.command()
@click.option("--spec", "spec_file", required=True, type=click.Path(), help="CablingSpec JSON (the prefix).")
@click.option("--params", "params_file", required=True, type=click.Path(), help="ConstructionParams JSON.")
@click.option("--out", "out_file", type=click.Path(), help="Write the configuration here as well.")
@_guard
def build(spec_file: str, params_file: str, out_file: str | None) -> None:
    """Build a steps configuration."""
    spec = CablingSpec.from_json(_load(spec_file))
    params = ConstructionParams.from_json(_load(params_file))
    config = build_steps_configuration(spec, params)
    payload = config.to_json()
    if out_file:
        Path(out_file).write_text(json.dumps(payload, indent=2, sort_keys=True))
    _emit(payload)


@main.command(name="validate")
@click.argument("file", type=click.Path())
@_guard
def validate_cmd(file: str) -> None:
    """Validate a diagram, presentation, steps configuration or trace."""
    data = _load(file)
    kind = _kind(data)
    if kind == "diagram":
        report = [v.to_json() for v in validate(RectDiagram.from_json(data))]
        ok = not report
    elif kind == "presentation":
        checks = validate_presentation(BlockPresentation.from_json(data))
        report = [c.to_json() for c in checks]
        ok = all(c.status != "fail" for c in checks)
    elif kind == "steps":
        checks = validate_steps(StepsConfiguration.from_json(data))
        report = [c.to_json() for c in checks]
        ok = all(c.status != "fail" for c in checks)
    elif kind == "trace":
        verdict = verify_trace(MoveTrace.from_json(data))
        report = [{"condition": "trace", "status": "pass" if verdict else "fail", "detail": verdict.reason}]
        ok = verdict.ok
    else:
        word = BraidWord.from_json(data)
        report = [{"condition": "knot", "status": "pass" if word.is_knot() else "fail", "detail": ""}]
        ok = word.is_knot()
    _emit({"kind": kind, "valid": ok, "report": report}, OK if ok else INVALID)


@main.command()
@click.argument("file", type=click.Path())
@_guard
def invariants(file: str) -> None:
    """Classical invariants and Alexander polynomial."""
    data = _load(file)
    if _kind(data) == "diagram":
        d = RectDiagram.from_json(data)
        problems = validate(d)
        if problems:
            raise BadInput("; ".join(f"{p.condition}: {p.detail}" for p in problems))
        payload = classical_invariants(d).to_json()
        payload["alexander"] = alexander(d).to_json()
    else:
        w = _word_of(data)
        payload = {
            "n": w.n,
            "ell": exponent_sum(w),
            "sl": self_linking(w),
            "alexander": alexander_polynomial(w).to_json(),
        }
    _emit(payload)


@main.command()
@click.argument("file", type=click.Path())
@click.option("--pair", required=True, help="Final cabling pair as p,q.")
@_guard
def cable(file: str, pair: str) -> None:
    """Superimpose a cable on a steps configuration."""
    try:
        p, q = (int(x) for x in pair.split(","))
    except ValueError as exc:
        raise BadInput(f"--pair must look like 2,3, got {pair!r}") from exc
    config = StepsConfiguration.from_json(_load(file))
    _emit(superimpose_cable(config, (p, q)).to_json())


@main.command()
@click.argument("file", type=click.Path())
@click.option("--theta", type=int, required=True, help="Angular slot of the vertical to stabilize.")
@click.option("--path", "path_json", help="FlypePath JSON; searched for when omitted.")
@click.option("--max-depth", type=int, default=8, show_default=True)
@_guard
def flype(file: str, theta: int, path_json: str | None, max_depth: int) -> None:
    """Apply a negative flype to a diagram."""
    d = RectDiagram.from_json(_load(file))
    if path_json:
        path = FlypePath.from_json(json.loads(path_json))
    else:
        found = find_flype_paths(d, theta, max_depth=max_depth, avoid=commutation_class(d))
        if not found:
            _emit({"status": "unknown-within-limits", "theta": theta, "max_depth": max_depth}, UNKNOWN)
        path = found[0]
    result = negative_flype(d, theta, path)
    payload = result.to_json()
    payload["theta"] = theta
    payload["path"] = path.to_json()
    _emit(payload)


@main.command()
@click.argument("file", type=click.Path())
@click.option("--target", type=int, required=True, help="Strand count to reach.")
@click.option("--limits", default="{}", help='JSON such as {"isotopy_budget":1,"node_cap":100000,"time_limit":60}.')
@click.option("--jobs", type=int, default=1, show_default=True, help="Worker processes for the search.")
@_guard
def reduce(file: str, target: int, limits: str, jobs: int) -> None:
    """Search for an exchange reduction."""
    word = _word_of(_load(file))
    try:
        opts = json.loads(limits)
    except json.JSONDecodeError as exc:
        raise BadInput(f"--limits is not JSON: {exc}") from exc
    result = exchange_reduce(
        word,
        target,
        isotopy_budget=int(opts.get("isotopy_budget", 1)),
        node_cap=int(opts.get("node_cap", 100_000)),
        time_limit=opts.get("time_limit"),
        jobs=max(1, jobs),
    )
    _emit(result.to_json(), OK if result.found else UNKNOWN)


@main.command()
@click.argument("file", type=click.Path())
@click.option("--format", "fmt", type=click.Choice(["ascii", "svg"]), default="ascii", show_default=True)
@_guard
def render(file: str, fmt: str) -> None:
    """Draw a diagram."""
    data = _load(file)
    if _kind(data) != "diagram":
        raise BadInput(f"render needs a diagram, got a {_kind(data)}")
    d = RectDiagram.from_json(data)
    click.echo(render_ascii(d) if fmt == "ascii" else render_svg(d), nl=False)


@main.command()
@click.argument("kind", type=click.Choice(["diagram", "presentation", "braid", "trace"]))
@click.option("--seed", type=int, required=True, help="Seed for the random generator.")
@click.option("--size", type=int, default=6, show_default=True, help="Slots, blocks or strands.")
@click.option("--k", "offset", type=int, default=1, show_default=True, help="Offset for presentations.")
@click.option("--moves", type=int, default=8, show_default=True, help="Trace length.")
@_guard
def sample(kind: str, seed: int, size: int, offset: int, moves: int) -> None:
    """Emit a seeded random object of KIND."""
    rng = random.Random(seed)
    if kind == "diagram":
        obj = random_diagram(rng, size)
    elif kind == "presentation":
        obj = random_presentation(rng, size, offset)
    elif kind == "braid":
        obj = random_knot_braid(rng, size, 2 * size)
    else:
        obj = random_trace(rng, random_knot_braid(rng, size, 2 * size), moves)
    _emit(obj.to_json())


@main.command()
@click.argument("directory", type=click.Path(file_okay=False))
@_guard
def fixtures(directory: str) -> None:
    """Write the reference fixtures to DIRECTORY."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "trefoil_steps.json": trefoil_steps_fixture().to_json(),
        "cable.json": cable_fixture().to_json(),
        "cable_flyped.json": cable_flyped_fixture().to_json(),
    }
    for name, payload in files.items():
        (out / name).write_text(json.dumps(payload, indent=2, sort_keys=True))
    _emit({"written": sorted(str(out / name) for name in files)})


if __name__ == "__main__":  # pragma: no cover
    main()

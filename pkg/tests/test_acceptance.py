"""End-to-end acceptance checks, one test per criterion.

Each test prints a single PASS/FAIL line with its timing to the terminal.
"""

from __future__ import annotations

import json
import random
import time
from contextlib import contextmanager
from math import gcd

import pytest
from click.testing import CliRunner

from cablegrid.blocks import (
    check_chain,
    interlocking_via_slides,
    interlocking_witnesses,
    is_homogeneous_twisting,
    meridian_sequence,
    steps_ok,
)
from cablegrid.braid import BraidWord, alexander_polynomial, self_linking
from cablegrid.cable import (
    FLYPE_PATH,
    FLYPE_THETA,
    CablingSpec,
    ConstructionError,
    ConstructionParams,
    axis_point_count,
    build_steps_configuration,
    edge_path_count,
    cable_fixture,
    cable_flyped_fixture,
    trefoil_steps_fixture,
)
from cablegrid.cli import main
from cablegrid.grid import alexander, braid_of, classical_invariants, meridian_linking, negative_flype, validate
from cablegrid.sampling import random_diagram, random_knot_braid, random_presentation, random_trace
from cablegrid.search import SL_SHIFT, MoveTrace, exchange_reduce, flype_step, verify_trace

SEED = 20240601


@pytest.fixture
def report(capsys):
    """Yield a context manager that times a block and prints one verdict line."""

    @contextmanager
    def _report(number: int, limit: float, info: dict):
        start = time.perf_counter()
        verdict, exc = "PASS", None
        try:
            yield
        except BaseException as err:  # re-raised below
            verdict, exc = "FAIL", err
        elapsed = time.perf_counter() - start
        if exc is None and elapsed >= limit:
            verdict = "FAIL"
            exc = AssertionError(f"took {elapsed:.2f}s, limit {limit}s")
        detail = info.get("detail", "")
        with capsys.disabled():
            print(f"\ncriterion {number}: {verdict} ({elapsed:.2f}s, limit {limit:g}s) {detail}".rstrip())
        if exc is not None:
            raise exc

    return _report


def _coprime_q(p: int) -> int:
    return next(q for q in range(2, 30) if gcd(p, q) == 1)


def _prefix_grid() -> list[tuple[tuple[int, int], ...]]:
    single = [((p, _coprime_q(p)),) for p in range(1, 13)]
    double = [
        ((a, _coprime_q(a)), (b, _coprime_q(b)))
        for a in range(2, 13)
        for b in range(2, 13)
        if a * b <= 12
    ]
    return single + double


def _build_any(spec: CablingSpec, k: int, orientation: str = "forward"):
    """First configuration built over the admissible twist counts, or the last error."""
    N = axis_point_count(spec, k)
    options = [()] if spec.h == 1 else [(c,) for c in range(N + 1)]
    error = None
    for counts in options:
        try:
            return build_steps_configuration(spec, ConstructionParams(k, counts, orientation)), None
        except ConstructionError as err:
            error = err
    return None, error


def test_criterion_1_cable_invariants(report, tmp_path):
    info: dict = {}
    with report(1, 1.0, info):
        runner = CliRunner()
        res = runner.invoke(main, ["fixtures", str(tmp_path)])
        assert res.exit_code == 0, res.output
        res = runner.invoke(main, ["invariants", str(tmp_path / "cable.json")])
        assert res.exit_code == 0, res.output
        data = json.loads(res.stdout)
        got = tuple(data[key] for key in ("n", "ell", "sl", "tb", "r"))
        info["detail"] = f"(n, ell, sl, tb, r) = {got}"
        assert got == (8, 11, 3, 5, 2)


def test_criterion_2_meridian_linking(report):
    info: dict = {}
    with report(2, 1.0, info):
        steps = trefoil_steps_fixture()
        cable = cable_fixture()
        counts = [meridian_linking(cable, m) for m in meridian_sequence(steps)]
        info["detail"] = f"{len(counts)} meridians, counts {sorted(set(counts))}"
        assert counts and all(c == 3 for c in counts)


def test_criterion_3_flype_invariance(report):
    info: dict = {}
    with report(3, 1.0, info):
        cable = cable_fixture()
        res = negative_flype(cable, FLYPE_THETA, FLYPE_PATH)
        sl = classical_invariants(res.diagram).sl
        same = alexander(res.diagram) == alexander(cable)
        info["detail"] = f"valid={not validate(res.diagram)} sl={sl} alexander_equal={same}"
        assert validate(res.diagram) == []
        assert sl == 3
        assert same


def test_criterion_4_constructor_counts(report):
    info: dict = {}
    with report(4, 5.0, info):
        spec = CablingSpec(((2, 3),))
        headline, error = _build_any(spec, 1)
        grid_misses = []
        total = 0
        for pairs in _prefix_grid():
            grid_spec = CablingSpec(pairs)
            for k in range(4):
                total += 1
                config, err = _build_any(grid_spec, k)
                expected = axis_point_count(grid_spec, k)
                if config is None or config.axis_points != expected or config.metadata["edge_paths"] != edge_path_count(grid_spec):
                    grid_misses.append((pairs, k, str(err) if err else "count mismatch"))
        info["detail"] = (
            f"[(2,3)] k=1: {'built ' + str(headline.axis_points) + ' points' if headline else 'not built: ' + str(error)}; "
            f"grid {total - len(grid_misses)}/{total} match"
        )
        assert headline is not None, f"[(2,3)] k=1 did not build: {error}"
        assert headline.axis_points == 12
        assert headline.metadata["edge_paths"] == 2
        assert not grid_misses, f"{len(grid_misses)} grid points miss, first {grid_misses[0]}"


def test_criterion_5_constructor_postconditions(report):
    info: dict = {}
    with report(5, 60.0, info):
        built = 0
        for pairs in _prefix_grid():
            spec = CablingSpec(pairs)
            for k in range(4):
                for orientation in ("forward", "reversed"):
                    config, _ = _build_any(spec, k, orientation)
                    if config is None:
                        continue
                    built += 1
                    p = config.presentation
                    assert steps_ok(config), (pairs, k, orientation)
                    assert is_homogeneous_twisting(p), (pairs, k, orientation)
                    witnesses = interlocking_witnesses(p)
                    assert witnesses.value and interlocking_via_slides(p), (pairs, k, orientation)
                    assert all(check_chain(p, j, c) for j, c in enumerate(witnesses.witnesses))
        rng = random.Random(SEED)
        agree = positive = 0
        for _ in range(500):
            p = random_presentation(rng, rng.randint(1, 10), rng.randint(0, 3))
            a = interlocking_witnesses(p).value
            agree += a == interlocking_via_slides(p)
            positive += a
        info["detail"] = f"{built} constructed configurations; random agreement {agree}/500 ({positive} interlocking)"
        assert built > 0
        assert agree == 500


def test_criterion_6_invariant_identities(report):
    info: dict = {}
    with report(6, 30.0, info):
        rng = random.Random(SEED)
        checked = 0
        for _ in range(1000):
            d = random_diagram(rng, rng.randint(2, 14))
            ci = classical_invariants(d)
            assert ci.tb - ci.r == ci.sl
            assert ci.sl == ci.ell - ci.n
            assert ci.tb == ci.ell - ci.up_count
            assert ci.r == ci.n - ci.up_count
            checked += 1
        info["detail"] = f"{checked} random diagrams"


def test_criterion_7_move_calculus(report):
    info: dict = {}
    with report(7, 60.0, info):
        rng = random.Random(SEED)
        counts: dict[str, int] = {}
        for idx in range(200):
            start = random_knot_braid(rng, rng.randint(1, 5), rng.randint(0, 6), exchangeable=idx % 2 == 0)
            trace = random_trace(rng, start, 8)
            target = alexander_polynomial(start)
            prev = start
            for step in trace.steps:
                counts[step.move] = counts.get(step.move, 0) + 1
                assert self_linking(step.result) - self_linking(prev) == SL_SHIFT[step.move], step.move
                assert alexander_polynomial(step.result) == target, step.move
                prev = step.result
            assert verify_trace(trace)
        info["detail"] = "200 traces, steps " + ", ".join(f"{k}={v}" for k, v in sorted(counts.items()))
        assert counts.get("exchange", 0) > 0
        assert counts.get("destabilize-", 0) > 0 and counts.get("stabilize-", 0) > 0


def test_criterion_8_reduction_certificates(report):
    info: dict = {}
    with report(8, 600.0, info):
        first = exchange_reduce(BraidWord(3, (1, 1, 1, 2)), 2)
        assert first.found and len(first.trace) == 1
        assert first.trace.end == BraidWord(2, (1, 1, 1))
        assert verify_trace(first.trace)

        second = exchange_reduce(BraidWord(3, (1, -2)), 1)
        assert second.found and second.trace.end == BraidWord(1)
        assert verify_trace(second.trace)

        cable = cable_fixture()
        mixed = MoveTrace(braid_of(cable), (flype_step(cable, FLYPE_THETA, FLYPE_PATH),))
        assert verify_trace(mixed)

        # the cable winds 3 times around a 2-braid trefoil, so its standard braid has 6 strands
        flyped = braid_of(cable_flyped_fixture())
        attempt = exchange_reduce(flyped, 6, isotopy_budget=2, node_cap=10**6, time_limit=500)
        if attempt.found:
            assert verify_trace(attempt.trace)
        info["detail"] = (
            f"flyped cable B{flyped.n} -> B6: {attempt.status}"
            f" (explored {attempt.explored}, limit {attempt.limit_hit})"
        )
        assert attempt.status in ("found", "unknown-within-limits")

"""Bounded search for exchange reducibility with replayable move traces."""

from __future__ import annotations

import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping

from .braid import (
    BraidWord,
    alexander_polynomial,
    destabilize,
    exchange_move,
    exchange_splits,
    isotopy_closure,
    isotopy_words,
    self_linking,
    stabilize,
)

MOVE_KINDS = (
    "isotopy-rewrite",
    "exchange",
    "destabilize+",
    "destabilize-",
    "stabilize+",
    "stabilize-",
    "flype-composite",
)

# change in self-linking caused by each move kind
SL_SHIFT = {
    "isotopy-rewrite": 0,
    "exchange": 0,
    "destabilize+": 0,
    "destabilize-": 2,
    "stabilize+": 0,
    "stabilize-": -2,
    "flype-composite": 0,
}


@dataclass(frozen=True)
class TraceStep:
    move: str
    params: Mapping
    result: BraidWord

    def to_json(self) -> dict:
        return {"move": self.move, "params": dict(self.params), "result": self.result.to_json()}

    @classmethod
    def from_json(cls, data: Mapping) -> TraceStep:
        return cls(str(data["move"]), dict(data.get("params", {})), BraidWord.from_json(data["result"]))


@dataclass(frozen=True)
class MoveTrace:
    start: BraidWord
    steps: tuple[TraceStep, ...] = ()

    @property
    def end(self) -> BraidWord:
        return self.steps[-1].result if self.steps else self.start

    def __len__(self) -> int:
        return len(self.steps)

    def to_json(self) -> dict:
        return {"start": self.start.to_json(), "steps": [s.to_json() for s in self.steps]}

    @classmethod
    def from_json(cls, data: Mapping) -> MoveTrace:
        return cls(BraidWord.from_json(data["start"]), tuple(TraceStep.from_json(s) for s in data["steps"]))


@dataclass(frozen=True)
class Verdict:
    ok: bool
    failed_step: int | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class SearchResult:
    """``trace`` is ``None`` when nothing was found within the limits."""

    trace: MoveTrace | None
    status: str
    explored: int
    limit_hit: str | None = None
    metadata: Mapping = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.trace is not None

    def to_json(self) -> dict:
        out = {"status": self.status, "explored": self.explored, "limit_hit": self.limit_hit}
        if self.trace is not None:
            out["trace"] = self.trace.to_json()
        out.update(self.metadata)
        return out


def delta_conjugate(w: BraidWord) -> BraidWord:
    """Conjugate by the half twist, which sends ``sigma_i`` to ``sigma_{n-i}``."""
    return BraidWord(w.n, tuple((w.n - abs(g)) * (1 if g > 0 else -1) for g in w.letters))


@dataclass(frozen=True)
class Neighbor:
    steps: tuple[TraceStep, ...]
    word: BraidWord


def _moves_from(v: BraidWord) -> list[TraceStep]:
    out = []
    dest = destabilize(v)
    if dest is not None:
        word, sign = dest
        out.append(TraceStep("destabilize+" if sign > 0 else "destabilize-", {}, word))
    for split in exchange_splits(v):
        res = exchange_move(v, split)
        if res is not None:
            out.append(TraceStep("exchange", {"split": list(split)}, res))
    return out


def neighbors(w: BraidWord, budget: int) -> list[Neighbor]:
    """Destabilizations and exchange moves available from ``w`` or from a word
    within ``budget`` isotopy rewrites of it, or of its half-twist conjugate.

    Results are deduplicated by canonical form and never have more strands
    than ``w``.
    """
    out: list[Neighbor] = []
    seen = {w.canonical()}
    flipped = delta_conjugate(w)
    starts = [((), w)]
    if flipped.canonical() != w.canonical():
        starts.append(((TraceStep("isotopy-rewrite", {"rewrite": "delta"}, flipped),), flipped))
    for prefix, base in starts:
        for letters in isotopy_words(base, budget):
            v = BraidWord(base.n, letters)
            lead = prefix
            if letters != base.letters:
                lead = prefix + (TraceStep("isotopy-rewrite", {"budget": budget}, v),)
            for step in _moves_from(v):
                key = step.result.canonical()
                if key not in seen:
                    seen.add(key)
                    out.append(Neighbor(lead + (step,), step.result))
    return out


def _expand(args: tuple[BraidWord, int]) -> list[Neighbor]:
    return neighbors(*args)


def exchange_reduce(
    w: BraidWord,
    target_index: int,
    isotopy_budget: int = 1,
    node_cap: int = 100_000,
    time_limit: float | None = None,
    jobs: int = 1,
) -> SearchResult:
    """Breadth-first search for a trace from ``w`` to a word on at most
    ``target_index`` strands.

    Nodes are canonical forms. A missing trace means only that none was found
    within the limits. With ``jobs > 1`` neighbor lists are computed by a
    process pool in batches and merged in queue order, so the result matches
    the single-process run.
    """
    start = time.monotonic()
    if w.n <= target_index:
        return SearchResult(MoveTrace(w), "found", 1)
    parents: dict[BraidWord, tuple[BraidWord | None, tuple[TraceStep, ...]]] = {w.canonical(): (None, ())}
    queue: deque[BraidWord] = deque([w])
    explored = 0
    pool = ProcessPoolExecutor(jobs) if jobs > 1 else None
    batch_size = 1 if pool is None else 16 * jobs
    try:
        while queue:
            batch = [queue.popleft() for _ in range(min(batch_size, len(queue), node_cap - explored))]
            if not batch:
                return SearchResult(None, "unknown-within-limits", explored, "node_cap")
            args = [(cur, isotopy_budget) for cur in batch]
            results = pool.map(_expand, args) if pool else map(_expand, args)
            for cur, nbs in zip(batch, results):
                if time_limit is not None and time.monotonic() - start > time_limit:
                    return SearchResult(None, "unknown-within-limits", explored, "time_limit")
                explored += 1
                for nb in nbs:
                    key = nb.word.canonical()
                    if key in parents:
                        continue
                    parents[key] = (cur, nb.steps)
                    if nb.word.n <= target_index:
                        return SearchResult(_trace(w, parents, nb.word), "found", explored)
                    queue.append(nb.word)
        return SearchResult(None, "unknown-within-limits", explored, "exhausted")
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)


def _trace(start: BraidWord, parents, end: BraidWord) -> MoveTrace:
    chunks = []
    cur = end
    while True:
        parent, steps = parents[cur.canonical()]
        if parent is None:
            break
        chunks.append(steps)
        cur = parent
    steps = tuple(s for chunk in reversed(chunks) for s in chunk)
    return MoveTrace(start, steps)


def _replay(prev: BraidWord, step: TraceStep) -> str | None:
    """Reason the step does not replay, or ``None`` when it does."""
    kind, params, result = step.move, step.params, step.result
    if kind == "isotopy-rewrite":
        if params.get("rewrite") == "delta":
            ok = delta_conjugate(prev) == result
        else:
            ok = result.n == prev.n and result in isotopy_closure(prev, int(params.get("budget", 1)))
        return None if ok else "result is not an isotopy rewrite of the previous word"
    if kind in ("destabilize+", "destabilize-"):
        got = destabilize(prev)
        if got is None:
            return "no destabilization applies"
        word, sign = got
        if (sign > 0) != (kind == "destabilize+") or word != result:
            return "destabilization result or sign differs"
        return None
    if kind in ("stabilize+", "stabilize-"):
        sign = 1 if kind == "stabilize+" else -1
        pos = params.get("position")
        return None if stabilize(prev, sign, pos) == result else "stabilization result differs"
    if kind == "exchange":
        split = params.get("split")
        got = exchange_move(prev, tuple(split)) if split is not None else None
        return None if got is not None and got == result else "exchange result differs"
    if kind == "flype-composite":
        return _replay_flype(prev, params, result)
    return f"unknown move {kind!r}"


def _replay_flype(prev: BraidWord, params: Mapping, result: BraidWord) -> str | None:
    from .grid import FlypePath, RectDiagram, braid_of, negative_flype

    d = RectDiagram.from_json(params["diagram"])
    if braid_of(d) != prev:
        return "diagram does not braid to the previous word"
    flyped = negative_flype(d, int(params["theta"]), FlypePath.from_json(params["path"])).diagram
    return None if braid_of(flyped) == result else "flype result differs"


def verify_trace(t: MoveTrace) -> Verdict:
    """Replay every step and check that the Alexander polynomial and the
    self-linking number behave as each move requires."""
    prev = t.start
    try:
        target = alexander_polynomial(prev)
    except ValueError as exc:
        return Verdict(False, None, f"start word: {exc}")
    for idx, step in enumerate(t.steps):
        if step.move not in MOVE_KINDS:
            return Verdict(False, idx, f"unknown move {step.move!r}")
        try:
            reason = _replay(prev, step)
        except (ValueError, KeyError, TypeError) as exc:
            reason = f"replay failed: {exc}"
        if reason is not None:
            return Verdict(False, idx, reason)
        if self_linking(step.result) - self_linking(prev) != SL_SHIFT[step.move]:
            return Verdict(False, idx, "self-linking changed unexpectedly")
        try:
            poly = alexander_polynomial(step.result)
        except ValueError as exc:
            return Verdict(False, idx, str(exc))
        if poly != target:
            return Verdict(False, idx, "Alexander polynomial changed")
        prev = step.result
    return Verdict(True)


def flype_step(d, theta: int, path) -> TraceStep:
    """A trace step for a flype of the diagram ``d``."""
    from .grid import braid_of, negative_flype

    flyped = negative_flype(d, theta, path).diagram
    params = {"diagram": d.to_json(), "theta": theta, "path": path.to_json()}
    return TraceStep("flype-composite", params, braid_of(flyped))

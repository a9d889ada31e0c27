"""Seeded random generators for diagrams, presentations, braids and traces."""

from __future__ import annotations

import random

from .blocks import BlockPresentation
from .braid import (
    BraidWord,
    destabilize,
    exchange_move,
    exchange_splits,
    isotopy_words,
    stabilize,
)
from .grid import RectDiagram
from .search import MoveTrace, TraceStep


def random_diagram(rng: random.Random, size: int) -> RectDiagram:
    """A uniformly labelled knot diagram on ``size`` slots.

    A random cyclic order of angular slots and of height slots is chained into
    one corner cycle, so the result always has a single component.
    """
    if size < 2:
        raise ValueError("a diagram needs at least 2 slots")
    thetas = rng.sample(range(size), size)
    zs = rng.sample(range(size), size)
    corners = []
    for j in range(size):
        corners.append((thetas[j], zs[j]))
        corners.append((thetas[j], zs[(j + 1) % size]))
    return RectDiagram.from_cycle(corners)


def random_presentation(rng: random.Random, l: int, k: int) -> BlockPresentation:
    """A random presentation satisfying the side-matching conditions.

    Each top side either shares the slot of the bottom side it is allowed to
    meet or gets a fresh angular slot; height sides chain block to block.
    """
    if l < 1 or k < 0:
        raise ValueError("need l >= 1 and k >= 0")
    share = [(k + 1) % l != 0 and rng.random() < 0.5 for _ in range(l)]
    W = l + share.count(False)
    slots = rng.sample(range(W), W)
    bottoms = slots[:l]
    fresh = iter(slots[l:])
    tops = [bottoms[(i + k + 1) % l] if share[i] else next(fresh) for i in range(l)]
    heights = rng.sample(range(l), l)
    sides = [(bottoms[i], tops[i], heights[i], heights[(i + 1) % l]) for i in range(l)]
    return BlockPresentation.from_sides(sides, k, W, l)


def random_knot_braid(rng: random.Random, n: int, length: int, exchangeable: bool = False) -> BraidWord:
    """A random braid word whose closure is a knot.

    ``length`` random letters are drawn, then letters joining adjacent
    components are appended until the closure is connected, lengthening
    the draw if that gets stuck. With
    ``exchangeable`` the top generator appears exactly twice with opposite
    signs, so an exchange move applies.
    """
    top = n - 1 if exchangeable and n > 2 else n
    while True:
        letters = [rng.choice((1, -1)) * rng.randint(1, top - 1) for _ in range(length)] if top > 1 else []
        if top < n:
            e = rng.choice((1, -1))
            letters.insert(rng.randint(0, len(letters)), e * top)
            letters.insert(rng.randint(0, len(letters)), -e * top)
        w = BraidWord(n, tuple(letters))
        while not w.is_knot():
            image = w.permutation()
            joins = [i for i in range(1, top) if not _same_cycle(image, i - 1, i)]
            if not joins:
                break
            letters.append(rng.choice((1, -1)) * rng.choice(joins))
            w = BraidWord(n, tuple(letters))
        if w.is_knot():
            return w
        length += 1


def _same_cycle(image: tuple[int, ...], a: int, b: int) -> bool:
    j = image[a]
    while j != a:
        if j == b:
            return True
        j = image[j]
    return False


def random_trace(rng: random.Random, start: BraidWord, moves: int) -> MoveTrace:
    """A random walk of Markov, exchange and isotopy moves from ``start``."""
    steps: list[TraceStep] = []
    cur = start
    for _ in range(moves):
        options: list[TraceStep] = []
        sign = rng.choice((1, -1))
        pos = rng.randint(0, len(cur))
        options.append(TraceStep(f"stabilize{'+' if sign > 0 else '-'}", {"position": pos}, stabilize(cur, sign, pos)))
        dest = destabilize(cur)
        if dest is not None:
            word, s = dest
            options.append(TraceStep("destabilize+" if s > 0 else "destabilize-", {}, word))
        splits = exchange_splits(cur)
        if splits:
            split = rng.choice(splits)
            res = exchange_move(cur, split)
            if res is not None:
                options.append(TraceStep("exchange", {"split": list(split)}, res))
        rewrites = isotopy_words(cur, 1)
        if len(rewrites) > 1:
            letters = rng.choice(rewrites)
            options.append(TraceStep("isotopy-rewrite", {"budget": 1}, BraidWord(cur.n, letters)))
        exchanges = [o for o in options if o.move == "exchange"]
        step = exchanges[0] if exchanges and rng.random() < 0.5 else rng.choice(options)
        steps.append(step)
        cur = step.result
    return MoveTrace(start, tuple(steps))


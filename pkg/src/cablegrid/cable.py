"""Cabling descriptors, the steps-configuration constructor, cable
superimposition and the reference fixtures.

Constructor model. The axis carries ``N = (2k+3) * l + 2`` marked positions
``0..N-1`` where ``l`` is the number of edge-paths. Each edge-path is a run of
``k+2`` positions, two apart, listed from top to bottom; the two positions
not covered by any path form the gap. One move happens per angular slot: the
path whose bottom sits two above the gap grows into the gap's lower position
and gives up its top position, and the gap then advances by ``2k+3``. A pair
of consecutive positions on a path is a block; it is born when its lower
position is appended and dies when its upper position is dropped.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, prod
from typing import Mapping

from .blocks import (
    BlockPresentation,
    StepsConfiguration,
    is_homogeneous_twisting,
    is_interlocking,
    validate_presentation,
)
from .grid import FlypePath, RectDiagram, negative_flype, validate


class ConstructionError(ValueError):
    """Raised when construction parameters cannot produce a valid configuration."""


@dataclass(frozen=True)
class CablingSpec:
    """Iterated cabling data: cable the unknot by ``pairs[0]``, then the
    result by ``pairs[1]`` and so on."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        pairs = tuple((int(p), int(q)) for p, q in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        if not pairs:
            raise ValueError("a cabling description needs at least one pair")
        for p, q in pairs:
            if p < 1:
                raise ValueError(f"pair {(p, q)} has p < 1")
            if gcd(p, q) != 1:
                raise ValueError(f"pair {(p, q)} is not coprime")

    @property
    def h(self) -> int:
        return len(self.pairs)

    def prefix(self) -> CablingSpec:
        return CablingSpec(self.pairs[:-1])

    def to_json(self) -> dict:
        return {"pairs": [list(pq) for pq in self.pairs]}

    @classmethod
    def from_json(cls, data: Mapping) -> CablingSpec:
        return cls(tuple((int(p), int(q)) for p, q in data["pairs"]))


def iterated_descriptor(spec: CablingSpec) -> str:
    text = "U"
    for p, q in spec.pairs:
        text = f"C({text},({p},{q}))"
    return text


@dataclass(frozen=True)
class ConstructionParams:
    """``twist_counts[i]`` is the number of gap moves made at level ``i``.

    The deepest level is not listed: it receives whatever remains of the
    ``N`` moves in one period.
    """

    k: int
    twist_counts: tuple[int, ...] = ()
    orientation: str = "forward"

    def __post_init__(self) -> None:
        object.__setattr__(self, "twist_counts", tuple(int(t) for t in self.twist_counts))
        if self.k < 0:
            raise ValueError(f"k must be nonnegative, got {self.k}")
        if any(t < 0 for t in self.twist_counts):
            raise ValueError("twist counts must be nonnegative")
        if self.orientation not in ("forward", "reversed"):
            raise ValueError(f"orientation must be 'forward' or 'reversed', got {self.orientation!r}")

    def to_json(self) -> dict:
        return {"k": self.k, "twist_counts": list(self.twist_counts), "orientation": self.orientation}

    @classmethod
    def from_json(cls, data: Mapping) -> ConstructionParams:
        return cls(int(data["k"]), tuple(data.get("twist_counts", ())), data.get("orientation", "forward"))


def axis_point_count(prefix: CablingSpec, k: int) -> int:
    return (2 * k + 3) * edge_path_count(prefix) + 2


def edge_path_count(prefix: CablingSpec) -> int:
    return prod(p for p, _ in prefix.pairs)


@dataclass
class _Schedule:
    N: int
    paths: list[list[int]]
    born: dict[tuple[int, int], int] = field(default_factory=dict)
    died: dict[tuple[int, int], int] = field(default_factory=dict)
    moves: int = 0


def _run_schedule(prefix: CablingSpec, params: ConstructionParams) -> _Schedule:
    ps = [p for p, _ in prefix.pairs]
    k, run = params.k, 2 * params.k + 3
    l = prod(ps)
    N = run * l + 2
    if len(params.twist_counts) != len(ps) - 1:
        raise ConstructionError(
            f"expected {len(ps) - 1} twist counts for {len(ps)} levels, got {len(params.twist_counts)}"
        )
    counts = list(params.twist_counts) + [N - sum(params.twist_counts)]
    if counts[-1] < 0:
        raise ConstructionError(f"twist counts {params.twist_counts} exceed the {N} moves of one period")
    paths = [[2 + m * run + 2 * j for j in range(k + 2)][::-1] for m in range(l)]
    start = sorted(tuple(p) for p in paths)
    sched = _Schedule(N, paths)
    gap = 0
    for level, count in enumerate(counts):
        width = run * prod(ps[level:]) + 2
        base, g = gap, 0
        for _ in range(count):
            target = (base + (g + 2) % width) % N
            owners = [p for p in paths if p[-1] == target]
            if not owners:
                raise ConstructionError(
                    f"move {sched.moves} at level {level}: no edge-path ends two above the gap at {target}"
                )
            path = owners[0]
            new = (base + g % width) % N
            theta = sched.moves
            dropped = (path[0], path[1])
            created = (path[-1], new)
            if dropped in sched.died or created in sched.born:
                raise ConstructionError(f"move {theta} repeats a block; the schedule overruns one period")
            sched.died[dropped] = theta
            sched.born[created] = theta
            path.append(new)
            path.pop(0)
            g = (g + run) % width
            sched.moves += 1
        gap = (base + g) % N
    if sorted(tuple(p) for p in paths) != start:
        raise ConstructionError("the gap-rotation schedule does not close up after one period")
    if set(sched.born) != set(sched.died) or len(sched.born) != N:
        raise ConstructionError("some block is never born or never dies within one period")
    return sched


def _chain(pairs: list[tuple[int, int]]) -> list[list[tuple[int, int]]]:
    """Split blocks into cycles following ``(x, y) -> (y, *)``."""
    by_top = {x: (x, y) for x, y in pairs}
    seen: set[tuple[int, int]] = set()
    cycles = []
    for first in sorted(pairs):
        if first in seen:
            continue
        cycle, cur = [], first
        while cur not in seen:
            seen.add(cur)
            cycle.append(cur)
            cur = by_top[cur[1]]
        cycles.append(cycle)
    return cycles


def build_steps_configuration(prefix: CablingSpec, params: ConstructionParams) -> StepsConfiguration:
    """Run the gap-rotation schedule and read off the block presentation.

    Heights are ``-position mod N``. Blocks are indexed along the core starting
    at the block born at angle 0. The result is checked for validity, for a
    single core component, homogeneous twisting and interlocking.
    """
    sched = _run_schedule(prefix, params)
    N = sched.N
    cycles = _chain(list(sched.born))
    if len(cycles) != 1:
        raise ConstructionError(
            f"the core has {len(cycles)} components (a link, not a knot) for {prefix.pairs} with k={params.k}"
        )
    order = cycles[0]
    first = next(i for i, b in enumerate(order) if sched.born[b] == 0)
    order = order[first:] + order[:first]
    sides = [(sched.born[b], sched.died[b], (-b[0]) % N, (-b[1]) % N) for b in order]
    if params.orientation == "reversed":
        sides = _reverse(sides, N)
    p = BlockPresentation.from_sides(sides, params.k, N, N)
    failed = [c for c in validate_presentation(p) if c.status == "fail"]
    if failed:
        raise ConstructionError("; ".join(f"{c.condition}: {c.detail}" for c in failed))
    if not is_homogeneous_twisting(p):
        raise ConstructionError("constructed presentation is not homogeneous twisting")
    if not is_interlocking(p):
        raise ConstructionError("constructed presentation is not interlocking")
    metadata = {
        "descriptor": iterated_descriptor(prefix),
        "axis_points": N,
        "edge_paths": edge_path_count(prefix),
        "twist_counts": list(params.twist_counts) + [N - sum(params.twist_counts)],
        "orientation": params.orientation,
        "framing": achieved_framing(p),
    }
    return StepsConfiguration.from_presentation(p, metadata)


def _reverse(sides: list[tuple[int, int, int, int]], N: int) -> list[tuple[int, int, int, int]]:
    """Mirror relabeling: reverse the core and negate angles and heights."""
    out = [((-top) % N, (-bot) % N, (-right) % N, (-left) % N) for bot, top, left, right in reversed(sides)]
    first = min(range(len(out)), key=lambda i: out[i][0])
    return out[first:] + out[:first]


def achieved_framing(p: BlockPresentation) -> int:
    """Signed count of how far the core's heights turn in one pass.

    Each block moves the core from ``z_left`` to ``z_right``; steps are read
    as the shorter signed turn on the height circle and summed, giving a
    multiple of ``Z``.
    """
    total = 0
    for b in p.blocks:
        step = (b.z_right - b.z_left) % p.Z
        total += step if step <= p.Z // 2 else step - p.Z
    return total // p.Z


# ---------------------------------------------------------------- cabling


@dataclass(frozen=True)
class WalkStep:
    """One vertical arc of the cable and the horizontal that follows it.

    The arc lies in the page of leaf ``leaf`` and runs from its marked point
    ``entry`` to its marked point ``exit``. The horizontal then leaves at the
    height of ``exit`` and stops at the ``skip``-th later leaf (0 = nearest)
    that carries the same height.
    """

    leaf: int
    entry: int
    exit: int
    skip: int


def _next_leaf(leaves, by_height: dict[int, list[int]], j: int, h: int, skip: int, W: int) -> int | None:
    """The ``skip``-th leaf after leaf ``j`` in angular order carrying height ``h``."""
    base = leaves[j].theta
    ahead = sorted((m for m in by_height[h] if m != j), key=lambda m: (leaves[m].theta - base) % W)
    return ahead[skip] if skip < len(ahead) else None


def _owners(leaf) -> list[int]:
    return [leaf.index] + list(leaf.blocks_crossed)


def find_cable_walk(
    s: StepsConfiguration, winding: int, max_skip: int = 1, node_cap: int = 200_000
) -> tuple[WalkStep, ...]:
    """Depth-first search for a closed walk through the leaves.

    Every block's meridian must be crossed exactly ``winding`` times, every
    leaf must carry a vertical arc and every free arc of the disc boundaries
    must be covered by a horizontal. Steps that climb through the whole leaf
    with the nearest continuation are tried first.
    """
    from .blocks import lambda_leaves

    p = s.presentation
    leaves = lambda_leaves(p)
    W = p.W
    by_height: dict[int, list[int]] = {}
    for leaf in leaves:
        for h in leaf.rho_points:
            by_height.setdefault(h, []).append(leaf.index)
    free = _free_arcs(p)
    target_total = winding * p.l
    size = len(leaves[0].rho_points)
    counts = [0] * p.l
    visited = [0] * len(leaves)
    steps: list[WalkStep] = []
    budget = [node_cap]

    def covered() -> bool:
        spans: dict[int, list[tuple[int, int]]] = {}
        for st in steps:
            h = leaves[st.leaf].rho_points[st.exit]
            nxt = _next_leaf(leaves, by_height, st.leaf, h, st.skip, W)
            spans.setdefault(h, []).append((leaves[st.leaf].theta, leaves[nxt].theta))
        for h, (a, b) in free.items():
            if not any(_arc_contains(x, y, a, b, W) for x, y in spans.get(h, [])):
                return False
        return True

    def dfs(j: int, entry: int, start: tuple[int, int], total: int) -> bool:
        budget[0] -= 1
        if budget[0] < 0:
            return False
        if total == target_total:
            return (j, entry) == start and all(visited) and covered()
        leaf = leaves[j]
        owners = _owners(leaf)
        exits = [0] + list(range(1, size)) if entry else list(range(size))[::-1]
        for ex in exits:
            if ex == entry:
                continue
            lo, hi = sorted((entry, ex))
            crossed = owners[lo:hi]
            if any(counts[b] >= winding for b in crossed):
                continue
            h = leaf.rho_points[ex]
            for skip in range(max_skip + 1):
                nxt = _next_leaf(leaves, by_height, j, h, skip, W)
                if nxt is None:
                    break
                for b in crossed:
                    counts[b] += 1
                visited[j] += 1
                steps.append(WalkStep(j, entry, ex, skip))
                if dfs(nxt, leaves[nxt].rho_points.index(h), start, total + len(crossed)):
                    return True
                steps.pop()
                visited[j] -= 1
                for b in crossed:
                    counts[b] -= 1
        return False

    for entry in range(size - 1, -1, -1):
        if dfs(0, entry, (0, entry), 0):
            return tuple(steps)
    raise ConstructionError(f"no cable walk with winding {winding} found within {node_cap} nodes")


def _arc_contains(x: int, y: int, a: int, b: int, W: int) -> bool:
    """Whether the ``+theta`` arc ``x -> y`` contains the arc ``a -> b``."""
    span = (y - x) % W or W
    return (a - x) % W <= span and (a - x) % W + (b - a) % W <= span


def _free_arcs(p: BlockPresentation) -> dict[int, tuple[int, int]]:
    """For each disc height, the part of its boundary no block is attached to.

    Blocks ``i`` and ``i+1`` attach to the disc at ``z_right`` of block ``i``
    along their angular ranges, which meet at a leaf; the free arc runs from
    the end of the later range back to the start of the earlier one.
    """
    out = {}
    for i in range(p.l):
        b, c = p.block(i), p.block(i + 1)
        out[b.z_right] = (c.theta_top, b.theta_bot)
    return out


def walk_to_diagram(
    s: StepsConfiguration, walk: tuple[WalkStep, ...], flips: tuple[int, ...] = ()
) -> RectDiagram:
    """Draw a walk as a rectangular diagram on a refinement of the slots.

    Arcs sharing a leaf page, or a disc height, become parallel copies in
    adjacent fine slots ordered by first visit along the walk. Leaves listed
    in ``flips`` order their copies the other way round, which changes the
    twisting of the parallel strands there.
    """
    from .blocks import lambda_leaves

    leaves = lambda_leaves(s.presentation)
    heights = [leaves[st.leaf].rho_points[st.exit] for st in walk]
    thetas = [leaves[st.leaf].theta for st in walk]
    size = len(walk)

    def ranks(keys: list[int], reverse: set[int]) -> list[int]:
        seen: dict[int, int] = {}
        out = []
        for key in keys:
            out.append(seen.get(key, 0))
            seen[key] = out[-1] + 1
        return [seen[key] - 1 - r if key in reverse else r for key, r in zip(keys, out)]

    flipped = {leaves[j].theta for j in flips}
    t_rank = ranks(thetas, flipped)
    z_rank = ranks(heights, set())
    t_order = sorted(range(size), key=lambda i: (thetas[i], t_rank[i]))
    z_order = sorted(range(size), key=lambda i: (heights[i], z_rank[i]))
    t_fine = {i: pos for pos, i in enumerate(t_order)}
    z_fine = {i: pos for pos, i in enumerate(z_order)}
    corners = []
    for idx in range(size):
        corners.append((t_fine[idx], z_fine[(idx - 1) % size]))
        corners.append((t_fine[idx], z_fine[idx]))
    d = RectDiagram.from_cycle(corners)
    return d.with_labels([thetas[i] for i in t_order], [heights[i] for i in z_order])


def superimpose_cable(
    s: StepsConfiguration, final_pair: tuple[int, int], flips: tuple[int, ...] = ()
) -> RectDiagram:
    """Rectangular diagram of the ``final_pair`` cable drawn on ``s``.

    ``q`` of the pair is the number of parallel strands, so every meridian of
    the cabling torus is crossed ``q`` times; ``p`` must be at least ``k+2``.
    """
    p_h, q_h = final_pair
    k = s.presentation.k
    if p_h < k + 2:
        raise ConstructionError(f"p_h = {p_h} violates p_h >= k + 2 = {k + 2}")
    if gcd(p_h, q_h) != 1:
        raise ConstructionError(f"pair {final_pair} is not coprime")
    walk = find_cable_walk(s, q_h)
    d = walk_to_diagram(s, walk, flips)
    problems = validate(d)
    if problems:
        raise ConstructionError("; ".join(f"{v.condition}: {v.detail}" for v in problems))
    return d


# ---------------------------------------------------------------- fixtures

TREFOIL_BLOCKS = 11

# Flype on the trefoil cable fixture: the vertical it stabilizes and the
# commutations leading to the destabilization. Found by find_flype_paths
# with the fixture's commutation class excluded.
FLYPE_THETA = 2
FLYPE_PATH = FlypePath(
    (("column", 1), ("column", 0), ("column", 11), ("column", 12), ("column", 13), ("column", 14),
     ("column", 15), ("column", 17)),
    17,
)


def trefoil_steps_fixture() -> StepsConfiguration:
    """Eleven-block, k = 0 presentation of the positive trefoil.

    Block ``i`` spans angles ``3i -> 3i+3`` and joins heights ``2i-2`` and
    ``2i``, all taken mod 11.
    """
    n = TREFOIL_BLOCKS
    sides = [((3 * i) % n, (3 * i + 3) % n, (2 * i - 2) % n, (2 * i) % n) for i in range(n)]
    p = BlockPresentation.from_sides(sides, 0, n, n)
    return StepsConfiguration.from_presentation(p, {"descriptor": "trefoil", "axis_points": n})


def cable_fixture() -> RectDiagram:
    """The (2,3) cable of the trefoil drawn on the trefoil fixture."""
    return superimpose_cable(trefoil_steps_fixture(), (2, 3))


def cable_flyped_fixture() -> RectDiagram:
    """The cable fixture after one negative flype."""
    return negative_flype(cable_fixture(), FLYPE_THETA, FLYPE_PATH).diagram

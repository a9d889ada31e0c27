"""Rectangular block presentations, their leaves, and steps configurations.

A block occupies the angular range ``theta_bot -> theta_top`` (cyclic, in the
``+theta`` direction) and joins the height ``z_left`` to ``z_right``. Blocks
are indexed in the order the core braid passes through them.

Heights are compared linearly after cutting the height circle between slot
``Z-1`` and slot ``0``. The angular positions of leaves are compared
cyclically relative to a base angle.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping

from .grid import Violation


class InvalidPresentationError(ValueError):
    """Raised when an operation needs a valid presentation and gets another."""


@dataclass(frozen=True)
class Block:
    index: int
    theta_bot: int
    theta_top: int
    z_left: int
    z_right: int

    def to_json(self) -> dict:
        return {
            "theta_bot": self.theta_bot,
            "theta_top": self.theta_top,
            "z_left": self.z_left,
            "z_right": self.z_right,
        }


@dataclass(frozen=True)
class Check:
    """One line of a validation report."""

    condition: str
    status: str
    detail: str = ""

    def to_json(self) -> dict:
        return {"condition": self.condition, "status": self.status, "detail": self.detail}


@dataclass(frozen=True)
class BlockPresentation:
    blocks: tuple[Block, ...]
    k: int
    W: int
    Z: int
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    @classmethod
    def from_sides(cls, sides: list[tuple[int, int, int, int]], k: int, W: int, Z: int) -> BlockPresentation:
        """Build from ``(theta_bot, theta_top, z_left, z_right)`` tuples."""
        blocks = tuple(Block(i, *map(int, s)) for i, s in enumerate(sides))
        return cls(blocks, k, W, Z)

    @property
    def l(self) -> int:
        return len(self.blocks)

    def block(self, i: int) -> Block:
        return self.blocks[i % self.l]

    def to_json(self) -> dict:
        return {"k": self.k, "W": self.W, "Z": self.Z, "blocks": [b.to_json() for b in self.blocks]}

    @classmethod
    def from_json(cls, data: Mapping) -> BlockPresentation:
        sides = [
            (int(b["theta_bot"]), int(b["theta_top"]), int(b["z_left"]), int(b["z_right"]))
            for b in data["blocks"]
        ]
        return cls.from_sides(sides, int(data["k"]), int(data["W"]), int(data["Z"]))


@dataclass(frozen=True)
class LambdaLeaf:
    """The leaf through the top side of block ``index``.

    ``rho_points`` lists the heights where the leaf meets the unit cylinder,
    in order along the leaf starting at the top side of block ``index``.
    """

    index: int
    theta: int
    blocks_crossed: tuple[int, ...]
    rho_points: tuple[int, ...]

    def segment(self, s: int) -> tuple[int, int]:
        return self.rho_points[s], self.rho_points[s + 1]

    @property
    def segments(self) -> list[tuple[int, int]]:
        return [self.segment(s) for s in range(len(self.rho_points) - 1)]


@dataclass(frozen=True)
class StepsConfiguration:
    """A presentation plus its axis discs.

    Disc ``i`` sits at height ``disc_heights[i]``. ``attachments[i]`` names the
    two discs block ``i`` is glued to along its left and right height sides.
    ``disc_order`` lists disc labels in increasing height.
    """

    presentation: BlockPresentation
    disc_heights: tuple[int, ...]
    attachments: tuple[tuple[int, int], ...]
    metadata: Mapping = field(default_factory=dict, compare=False, hash=False)

    @classmethod
    def from_presentation(cls, p: BlockPresentation, metadata: Mapping | None = None) -> StepsConfiguration:
        heights = tuple(b.z_left for b in p.blocks)
        attach = tuple((i, (i + 1) % p.l) for i in range(p.l))
        return cls(p, heights, attach, dict(metadata or {}))

    @property
    def disc_order(self) -> tuple[int, ...]:
        return tuple(sorted(range(len(self.disc_heights)), key=lambda i: self.disc_heights[i]))

    @property
    def axis_points(self) -> int:
        return len(self.disc_heights)

    def to_json(self) -> dict:
        out = self.presentation.to_json()
        out["disc_heights"] = list(self.disc_heights)
        out["disc_order"] = list(self.disc_order)
        out["attachments"] = [list(a) for a in self.attachments]
        if self.metadata:
            out["metadata"] = dict(self.metadata)
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> StepsConfiguration:
        p = BlockPresentation.from_json(data)
        if "disc_heights" in data:
            heights = tuple(int(h) for h in data["disc_heights"])
        else:
            heights = tuple(b.z_left for b in p.blocks)
        if "attachments" in data:
            attach = tuple((int(a), int(b)) for a, b in data["attachments"])
        else:
            attach = tuple((i, (i + 1) % p.l) for i in range(p.l))
        return cls(p, heights, attach, dict(data.get("metadata", {})))


# ---------------------------------------------------------------- validation


def validate_presentation(p: BlockPresentation) -> list[Check]:
    """Per-condition report. Conditions without combinatorial content are
    reported as ``by-construction``."""
    report = [Check("(0)", "by-construction", "blocks lie outside the unit cylinder")]
    problems = _range_problems(p)
    report.append(Check("(1)", "fail" if problems else "pass", "; ".join(problems)))
    report.append(_condition_2(p))
    report.append(_condition_3(p))
    report.append(_condition_4(p))
    report.append(Check("(5)", "by-construction", "product foliation by angular leaves"))
    report.append(Check("(6)", "by-construction", "core is transverse to every leaf"))
    return report


def is_valid(p: BlockPresentation) -> bool:
    if "valid" not in p._cache:
        p._cache["valid"] = all(c.status != "fail" for c in validate_presentation(p))
    return p._cache["valid"]


def _require_valid(p: BlockPresentation) -> None:
    if not is_valid(p):
        bad = [c for c in validate_presentation(p) if c.status == "fail"]
        raise InvalidPresentationError("; ".join(f"{c.condition}: {c.detail}" for c in bad))


def _range_problems(p: BlockPresentation) -> list[str]:
    out = []
    if p.l < 1:
        out.append("no blocks")
    if p.k < 0:
        out.append(f"offset k={p.k} is negative")
    for b in p.blocks:
        if not (0 <= b.theta_bot < p.W and 0 <= b.theta_top < p.W):
            out.append(f"block {b.index} angular side out of range")
        if not (0 <= b.z_left < p.Z and 0 <= b.z_right < p.Z):
            out.append(f"block {b.index} height side out of range")
        if p.l > 1 and b.theta_bot == b.theta_top:
            out.append(f"block {b.index} has equal angular sides")
    return out


def _duplicates(values: list[int]) -> list[int]:
    return sorted({v for v in values if values.count(v) > 1})


def _condition_2(p: BlockPresentation) -> Check:
    details = []
    for name in ("theta_bot", "theta_top", "z_left", "z_right"):
        dup = _duplicates([getattr(b, name) for b in p.blocks])
        if dup:
            owners = [b.index for b in p.blocks if getattr(b, name) in dup]
            details.append(f"{name} repeated at {dup} (blocks {owners})")
    return Check("(2)", "fail" if details else "pass", "; ".join(details))


def _condition_3(p: BlockPresentation) -> Check:
    details = []
    for a in p.blocks:
        for b in p.blocks:
            if a.theta_top == b.theta_bot and (a.index + p.k + 1 - b.index) % p.l:
                details.append(f"top of block {a.index} meets bottom of block {b.index}")
    return Check("(3)", "fail" if details else "pass", "; ".join(details))


def _condition_4(p: BlockPresentation) -> Check:
    details = [
        f"block {b.index} right side {b.z_right} != block {(b.index + 1) % p.l} left side"
        for b in p.blocks
        if b.z_right != p.block(b.index + 1).z_left
    ]
    return Check("(4)", "fail" if details else "pass", "; ".join(details))


# -------------------------------------------------------------------- leaves


def _angle_from(base: int, theta: int, W: int) -> int:
    return (theta - base) % W


def _spans_page(b: Block, theta: int, W: int) -> bool:
    """Whether ``theta`` lies in the closed angular range of ``b``."""
    width = (b.theta_top - b.theta_bot) % W or W
    return _angle_from(b.theta_bot, theta, W) <= width


def lambda_leaves(p: BlockPresentation) -> list[LambdaLeaf]:
    """The ``l`` leaves through the top sides, in core order."""
    _require_valid(p)
    if "leaves" in p._cache:
        return p._cache["leaves"]
    leaves = []
    for j in range(p.l):
        top = p.block(j)
        points = [top.z_left, top.z_right]
        crossed = []
        for step in range(1, p.k + 2):
            nxt = p.block(j + step)
            crossed.append(nxt.index)
            points.append(nxt.z_right)
        leaves.append(LambdaLeaf(j, top.theta_top, tuple(crossed), tuple(points)))
    p._cache["leaves"] = leaves
    return leaves


def is_homogeneous_twisting(p: BlockPresentation) -> bool:
    """Triple rule on consecutive right-side heights, compared linearly."""
    _require_valid(p)
    return not homogeneity_violations(p)


def homogeneity_violations(p: BlockPresentation) -> list[int]:
    """Indices ``i`` whose triple breaks the homogeneous twisting rule."""
    z = [b.z_right for b in p.blocks]
    n = len(z)
    bad = []
    for i in range(n):
        prev, cur, nxt, after = z[(i - 1) % n], z[i], z[(i + 1) % n], z[(i + 2) % n]
        if nxt < prev < cur and not nxt < after < cur:
            bad.append(i)
        elif cur < prev < nxt and not cur < after < nxt:
            bad.append(i)
    return bad


# --------------------------------------------------------------- interlocking


def _inside(x: int, a: int, b: int) -> bool:
    return min(a, b) < x < max(a, b)


def crosses(chord: tuple[int, int], other: tuple[int, int]) -> bool:
    """Whether two chords of a page have interleaved endpoints."""
    a, b = chord
    c, d = other
    if len({a, b, c, d}) < 4:
        return False
    return _inside(c, a, b) != _inside(d, a, b)


def obstructs(leaf: LambdaLeaf, chord: tuple[int, int]) -> bool:
    """Whether some segment of ``leaf`` crosses ``chord``."""
    return any(crosses(chord, seg) for seg in leaf.segments)


@dataclass(frozen=True)
class InterlockingResult:
    value: bool
    witnesses: tuple[tuple[int, ...] | None, ...]

    def __bool__(self) -> bool:
        return self.value


def _window(p: BlockPresentation, leaves: list[LambdaLeaf], j: int) -> tuple[int, list[int]]:
    """Angular width from leaf ``j`` to leaf ``j+1`` and the leaves strictly inside."""
    base = leaves[j].theta
    target = leaves[(j + 1) % p.l].theta
    width = _angle_from(base, target, p.W) or p.W
    inside = [u for u in range(p.l) if 0 < _angle_from(base, leaves[u].theta, p.W) < width]
    inside.sort(key=lambda u: _angle_from(base, leaves[u].theta, p.W))
    return width, inside


def interlocking_witnesses(p: BlockPresentation) -> InterlockingResult:
    """Depth-first search for an obstruction chain for every consecutive leaf pair.

    A chain ``u1, ..., uv`` for the pair ``(j, j+1)`` is angularly increasing
    strictly between the two leaves. Leaf ``u1`` crosses the top side of block
    ``j``, each ``u(w+1)`` crosses the top side of ``uw``, and leaf ``j+1``
    crosses the top side of ``uv`` (or of ``j`` when the chain is empty).
    """
    _require_valid(p)
    leaves = lambda_leaves(p)
    chains: list[tuple[int, ...] | None] = []
    for j in range(p.l):
        _, inside = _window(p, leaves, j)
        final = leaves[(j + 1) % p.l]
        base = leaves[j].theta
        memo: dict[int, tuple[int, ...] | None] = {}

        def search(u: int) -> tuple[int, ...] | None:
            if u in memo:
                return memo[u]
            chord = leaves[u].segment(0)
            found = None
            if obstructs(final, chord) and (u != j or p.l > 1):
                found = ()
            else:
                start = _angle_from(base, leaves[u].theta, p.W) if u != j else 0
                for v in inside:
                    if _angle_from(base, leaves[v].theta, p.W) > start and obstructs(leaves[v], chord):
                        rest = search(v)
                        if rest is not None:
                            found = (v,) + rest
                            break
            memo[u] = found
            return found

        chains.append(search(j) if p.l > 1 else None)
    return InterlockingResult(all(c is not None for c in chains), tuple(chains))


def is_interlocking(p: BlockPresentation) -> bool:
    return interlocking_witnesses(p).value


def check_chain(p: BlockPresentation, j: int, chain: tuple[int, ...]) -> bool:
    """Recheck a witness chain for the pair ``(j, j+1)`` from scratch."""
    leaves = lambda_leaves(p)
    base = leaves[j].theta
    width, _ = _window(p, leaves, j)
    angles = [_angle_from(base, leaves[u].theta, p.W) for u in chain]
    if any(not 0 < a < width for a in angles) or angles != sorted(set(angles)):
        return False
    prev = j
    for u in chain:
        if not obstructs(leaves[u], leaves[prev].segment(0)):
            return False
        prev = u
    return obstructs(leaves[(j + 1) % p.l], leaves[prev].segment(0))


def _slide_closure(p: BlockPresentation, leaves: list[LambdaLeaf], j: int) -> set[int]:
    """Leaves pushed, directly or transitively, when the top side of ``j``
    slides forward up to and including the page of leaf ``j+1``."""
    base = leaves[j].theta
    width = _angle_from(base, leaves[(j + 1) % p.l].theta, p.W) or p.W
    angle = {u: _angle_from(base, leaves[u].theta, p.W) for u in range(p.l)}
    pushed = {j}
    frontier = [j]
    while frontier:
        u = frontier.pop()
        start = angle[u] if u != j else 0
        chord = leaves[u].segment(0)
        for v in range(p.l):
            if v in pushed or v == j:
                continue
            if start < angle[v] <= width and obstructs(leaves[v], chord):
                pushed.add(v)
                frontier.append(v)
    return pushed


def interlocking_via_slides(p: BlockPresentation) -> bool:
    """Forward-closure formulation: every top side drags the next leaf along."""
    _require_valid(p)
    if p.l < 2:
        return False
    leaves = lambda_leaves(p)
    return all((j + 1) % p.l in _slide_closure(p, leaves, j) for j in range(p.l))


@dataclass(frozen=True)
class SlideResult:
    presentation: BlockPresentation | None
    obstruction: tuple[int, ...] | None
    original_top: int | None = None

    @property
    def ok(self) -> bool:
        return self.presentation is not None


def slide_top_side(p: BlockPresentation, i: int) -> SlideResult:
    """Push the top side of block ``i`` past the page of leaf ``i+1``.

    On success a fresh angular slot is inserted just after that page and the
    top side moves there. On failure the obstruction chain is returned.
    """
    _require_valid(p)
    leaves = lambda_leaves(p)
    i %= p.l
    if p.l > 1:
        chain = interlocking_witnesses(p).witnesses[i]
        if chain is not None:
            return SlideResult(None, chain)
    target = leaves[(i + 1) % p.l].theta
    new_slot = target + 1

    def shift(theta: int) -> int:
        return theta + 1 if theta >= new_slot else theta

    blocks = []
    for b in p.blocks:
        top = new_slot if b.index == i else shift(b.theta_top)
        blocks.append(replace(b, theta_bot=shift(b.theta_bot), theta_top=top))
    return SlideResult(BlockPresentation(tuple(blocks), p.k, p.W + 1, p.Z), None, p.block(i).theta_top)


def slide_back(p: BlockPresentation, i: int, original_top: int) -> BlockPresentation:
    """Undo :func:`slide_top_side` given the recorded original slot."""
    removed = p.block(i).theta_top

    def shift(theta: int) -> int:
        return theta - 1 if theta > removed else theta

    blocks = []
    for b in p.blocks:
        top = original_top if b.index == i % p.l else shift(b.theta_top)
        blocks.append(replace(b, theta_bot=shift(b.theta_bot), theta_top=top))
    return BlockPresentation(tuple(blocks), p.k, p.W - 1, p.Z)


# ------------------------------------------------------------------ steps


def validate_steps(s: StepsConfiguration) -> list[Check]:
    p = s.presentation
    out = []
    base = validate_presentation(p)
    failed = [c for c in base if c.status == "fail"]
    out.append(
        Check(
            "(i)",
            "fail" if failed else "pass",
            "; ".join(f"{c.condition}: {c.detail}" for c in failed) or "four sides per block",
        )
    )
    n = p.l
    bad_ii, bad_iii = [], []
    if len(s.attachments) != n or len(s.disc_heights) != n:
        bad_ii.append(f"{len(s.attachments)} attachments and {len(s.disc_heights)} discs for {n} blocks")
    else:
        for i, (left, right) in enumerate(s.attachments):
            b = p.block(i)
            if left != i or s.disc_heights[left % n] != b.z_left:
                bad_ii.append(f"block {i} left side attaches to disc {left}")
            if right != (i + 1) % n or s.disc_heights[right % n] != b.z_right:
                bad_iii.append(f"block {i} right side attaches to disc {right}")
        if len(set(s.disc_heights)) != n:
            bad_ii.append("two discs share a height")
    out.append(Check("(ii)", "fail" if bad_ii else "pass", "; ".join(bad_ii)))
    out.append(Check("(iii)", "fail" if bad_iii else "pass", "; ".join(bad_iii)))
    out.append(Check("(iv)", "fail" if _range_problems(p) else "pass", "sides lie in pages"))
    out.append(Check("(v)", "by-construction", "leaves join the two height sides"))
    cycles = _adjacency_cycles(p)
    out.append(
        Check("(vi)", "pass" if cycles == 1 else "fail", f"block adjacency has {cycles} cycle(s)")
    )
    if p.k > 0:
        out.append(Check("(vii)", "pass", f"k={p.k}"))
    else:
        out.append(Check("(vii)", "warning", "k=0 admitted; the definition asks for k>0"))
    return out


def steps_ok(s: StepsConfiguration) -> bool:
    return all(c.status != "fail" for c in validate_steps(s))


def _adjacency_cycles(p: BlockPresentation) -> int:
    """Cycles of the map block -> block whose left side is this right side."""
    by_left = {b.z_left: b.index for b in p.blocks}
    seen: set[int] = set()
    cycles = 0
    for b in p.blocks:
        if b.index in seen:
            continue
        cycles += 1
        cur = b.index
        while cur not in seen:
            seen.add(cur)
            nxt = by_left.get(p.block(cur).z_right)
            if nxt is None:
                return 0
            cur = nxt
    return cycles


@dataclass(frozen=True)
class Gate:
    """A place where a meridian crosses a leaf: segment ``segment`` of the
    leaf through angular slot ``theta`` with heights ``heights``."""

    theta: int
    heights: tuple[int, ...]
    segment: int

    def to_json(self) -> dict:
        return {"theta": self.theta, "heights": list(self.heights), "segment": self.segment}


@dataclass(frozen=True)
class MeridianSpec:
    """Meridian of the cabling torus around block ``block``.

    The curve encircles the block's cross-section, so on the torus it is the
    boundary of ``theta_interval x z_interval`` and it meets the leaves listed
    in ``gates``.
    """

    block: int
    theta_interval: tuple[int, int]
    z_interval: tuple[int, int]
    gates: tuple[Gate, ...]

    def to_json(self) -> dict:
        return {
            "block": self.block,
            "theta_interval": list(self.theta_interval),
            "z_interval": list(self.z_interval),
            "gates": [g.to_json() for g in self.gates],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> MeridianSpec:
        gates = tuple(Gate(int(g["theta"]), tuple(int(h) for h in g["heights"]), int(g["segment"])) for g in data["gates"])
        return cls(int(data["block"]), tuple(data["theta_interval"]), tuple(data["z_interval"]), gates)


def meridian_sequence(s: StepsConfiguration) -> list[MeridianSpec]:
    """One meridian per block, in core order.

    The meridian around block ``b`` crosses every leaf that contains a side or
    a cross-section of ``b``: the leaf through its bottom side, the leaves that
    pass through its interior, and the leaf through its top side.
    """
    bad = [c for c in validate_steps(s) if c.status == "fail"]
    if bad:
        raise InvalidPresentationError("; ".join(f"{c.condition}: {c.detail}" for c in bad))
    p = s.presentation
    leaves = lambda_leaves(p)
    gates: dict[int, list[Gate]] = {b.index: [] for b in p.blocks}
    for leaf in leaves:
        owners = [leaf.index] + list(leaf.blocks_crossed)
        for seg, owner in enumerate(owners):
            gates[owner].append(Gate(leaf.theta, leaf.rho_points, seg))
    out = []
    for b in p.blocks:
        out.append(MeridianSpec(b.index, (b.theta_bot, b.theta_top), (b.z_left, b.z_right), tuple(gates[b.index])))
    return out

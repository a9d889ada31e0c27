"""Toroidal rectangular diagrams, their braided form and classical invariants.

Coordinates are integer slots. Angular slots ``0..W-1`` are cyclic. Height
slots ``0..Z-1`` are read linearly: the point at infinity sits between
``Z-1`` and ``0`` and no vertical arc crosses it. Horizontal arcs always run
in the ``+theta`` direction, so every diagram is braided about the axis.
Vertical arcs sit in front of horizontal arcs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .braid import BraidWord, alexander_polynomial, exponent_sum
from .laurent import LaurentPoly


class InvalidDiagramError(ValueError):
    """Raised when an operation needs a valid diagram and gets another."""


@dataclass(frozen=True, order=True)
class Vertical:
    theta: int
    z_from: int
    z_to: int

    @property
    def is_up(self) -> bool:
        return self.z_to > self.z_from


@dataclass(frozen=True, order=True)
class Horizontal:
    z: int
    theta_from: int
    theta_to: int


@dataclass(frozen=True)
class ClassicalInvariants:
    sl: int
    tb: int
    r: int
    n: int
    ell: int
    up_count: int

    def __post_init__(self) -> None:
        if self.tb - self.r != self.sl or self.ell - self.n != self.sl:
            raise AssertionError(f"inconsistent invariants {self}")
        if self.tb != self.ell - self.up_count or self.r != self.n - self.up_count:
            raise AssertionError(f"inconsistent invariants {self}")

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "ell": self.ell,
            "sl": self.sl,
            "tb": self.tb,
            "r": self.r,
            "up_count": self.up_count,
        }


@dataclass(frozen=True)
class Violation:
    condition: str
    detail: str

    def to_json(self) -> dict:
        return {"condition": self.condition, "status": "fail", "detail": self.detail}


@dataclass(frozen=True)
class RectDiagram:
    """A rectangular diagram given by its arcs.

    Orientation: each vertical runs ``z_from -> z_to`` at angle ``theta`` and
    each horizontal runs ``theta_from -> theta_to`` at height ``z``. A valid
    diagram has one vertical per angular slot, one horizontal per height slot
    and its arcs chain into a single oriented cycle.

    ``theta_labels`` and ``z_labels`` optionally map each slot to a coarser
    slot of an ambient configuration the diagram was drawn on. They do not
    take part in equality.
    """

    W: int
    Z: int
    verticals: tuple[Vertical, ...]
    horizontals: tuple[Horizontal, ...]
    theta_labels: tuple[int, ...] | None = field(default=None, compare=False)
    z_labels: tuple[int, ...] | None = field(default=None, compare=False)
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "verticals", tuple(sorted(self.verticals)))
        object.__setattr__(self, "horizontals", tuple(sorted(self.horizontals)))

    @classmethod
    def from_cycle(cls, corners: list[tuple[int, int]]) -> RectDiagram:
        """Build from the cyclic corner list ``(theta, z)``.

        Corners alternate: a vertical runs from corner ``2j`` to ``2j+1`` and
        a horizontal from ``2j+1`` to ``2j+2``. Slot counts are inferred.
        """
        if len(corners) % 2:
            raise ValueError("corner list must have even length")
        verts, hors = [], []
        size = len(corners)
        for j in range(0, size, 2):
            (t0, z0), (t1, z1) = corners[j], corners[j + 1]
            t2, z2 = corners[(j + 2) % size]
            if t0 != t1 or z1 != z2:
                raise ValueError(f"corners {j}..{j + 2} do not alternate vertical/horizontal")
            verts.append(Vertical(t0, z0, z1))
            hors.append(Horizontal(z1, t1, t2))
        W = 1 + max(t for t, _ in corners)
        Z = 1 + max(z for _, z in corners)
        return cls(W, Z, tuple(verts), tuple(hors))

    def theta_label(self, theta: int) -> int:
        return theta if self.theta_labels is None else self.theta_labels[theta]

    def z_label(self, z: int) -> int:
        return z if self.z_labels is None else self.z_labels[z]

    def with_labels(self, theta_labels, z_labels) -> RectDiagram:
        return RectDiagram(
            self.W,
            self.Z,
            self.verticals,
            self.horizontals,
            None if theta_labels is None else tuple(theta_labels),
            None if z_labels is None else tuple(z_labels),
        )

    def vertical_at(self, theta: int) -> Vertical:
        return self._index()[0][theta]

    def horizontal_at(self, z: int) -> Horizontal:
        return self._index()[1][z]

    def _index(self) -> tuple[dict[int, Vertical], dict[int, Horizontal]]:
        if "index" not in self._cache:
            self._cache["index"] = (
                {v.theta: v for v in self.verticals},
                {h.z: h for h in self.horizontals},
            )
        return self._cache["index"]

    def corners(self) -> list[tuple[int, int]]:
        """Oriented corner cycle starting at the vertical in the lowest slot."""
        validate_or_raise(self)
        verts, hors = self._index()
        out = []
        v = verts[min(verts)]
        while True:
            out.append((v.theta, v.z_from))
            out.append((v.theta, v.z_to))
            h = hors[v.z_to]
            v = verts[h.theta_to]
            if v.theta == self.verticals[0].theta:
                return out

    def span(self, h: Horizontal) -> int:
        return (h.theta_to - h.theta_from) % self.W

    def to_json(self) -> dict:
        out = {
            "W": self.W,
            "Z": self.Z,
            "verticals": [{"theta": v.theta, "z_from": v.z_from, "z_to": v.z_to} for v in self.verticals],
            "horizontals": [
                {"z": h.z, "theta_from": h.theta_from, "theta_to": h.theta_to} for h in self.horizontals
            ],
        }
        if self.theta_labels is not None:
            out["theta_labels"] = list(self.theta_labels)
        if self.z_labels is not None:
            out["z_labels"] = list(self.z_labels)
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> RectDiagram:
        verts = tuple(Vertical(int(v["theta"]), int(v["z_from"]), int(v["z_to"])) for v in data["verticals"])
        if "horizontals" in data:
            hors = tuple(
                Horizontal(int(h["z"]), int(h["theta_from"]), int(h["theta_to"])) for h in data["horizontals"]
            )
        else:
            hors = _horizontals_from_verticals(verts)
        tl = data.get("theta_labels")
        zl = data.get("z_labels")
        return cls(
            int(data["W"]),
            int(data["Z"]),
            verts,
            hors,
            None if tl is None else tuple(int(x) for x in tl),
            None if zl is None else tuple(int(x) for x in zl),
        )


def _horizontals_from_verticals(verts: tuple[Vertical, ...]) -> tuple[Horizontal, ...]:
    start = {v.z_from: v.theta for v in verts}
    return tuple(Horizontal(v.z_to, v.theta, start[v.z_to]) for v in verts if v.z_to in start)


def validate(d: RectDiagram) -> list[Violation]:
    """Every violated structural invariant; empty means valid."""
    out: list[Violation] = []
    if d.W < 2 or d.Z < 2:
        out.append(Violation("size", f"grid {d.W}x{d.Z} is smaller than 2x2"))
    thetas = [v.theta for v in d.verticals]
    zs = [h.z for h in d.horizontals]
    for t in sorted({t for t in thetas if thetas.count(t) > 1}):
        out.append(Violation("duplicate theta_slot", f"theta {t} hosts {thetas.count(t)} verticals"))
    for z in sorted({z for z in zs if zs.count(z) > 1}):
        out.append(Violation("duplicate z_slot", f"z {z} hosts {zs.count(z)} horizontals"))
    missing_t = sorted(set(range(d.W)) - set(thetas))
    missing_z = sorted(set(range(d.Z)) - set(zs))
    if missing_t:
        out.append(Violation("empty theta_slot", f"no vertical at theta {missing_t}"))
    if missing_z:
        out.append(Violation("empty z_slot", f"no horizontal at z {missing_z}"))
    for v in d.verticals:
        if not (0 <= v.theta < d.W and 0 <= v.z_from < d.Z and 0 <= v.z_to < d.Z):
            out.append(Violation("out of range", f"vertical {v}"))
        elif v.z_from == v.z_to:
            out.append(Violation("degenerate arc", f"vertical {v} has zero length"))
    for h in d.horizontals:
        if not (0 <= h.z < d.Z and 0 <= h.theta_from < d.W and 0 <= h.theta_to < d.W):
            out.append(Violation("out of range", f"horizontal {h}"))
        elif h.theta_from == h.theta_to:
            out.append(Violation("degenerate arc", f"horizontal {h} has zero length"))
    if out:
        return out
    verts = {v.theta: v for v in d.verticals}
    hors = {h.z: h for h in d.horizontals}
    for v in d.verticals:
        if hors[v.z_to].theta_from != v.theta:
            out.append(Violation("endpoint mismatch", f"vertical {v} does not feed horizontal at z {v.z_to}"))
        if hors[v.z_from].theta_to != v.theta:
            out.append(Violation("endpoint mismatch", f"vertical {v} is not fed by horizontal at z {v.z_from}"))
    if out:
        return out
    seen = set()
    v = d.verticals[0]
    while v.theta not in seen:
        seen.add(v.theta)
        v = verts[hors[v.z_to].theta_to]
    if len(seen) != d.W:
        out.append(Violation("not a knot", f"arcs form several cycles; first has {len(seen)} of {d.W} verticals"))
    return out


def validate_or_raise(d: RectDiagram) -> None:
    if "valid" not in d._cache:
        d._cache["valid"] = validate(d)
    problems = d._cache["valid"]
    if problems:
        raise InvalidDiagramError("; ".join(f"{p.condition}: {p.detail}" for p in problems))


def braid_of(d: RectDiagram) -> BraidWord:
    """Closed braid read by sweeping the angular slots in increasing order.

    Strand positions are 1-based from the bottom. A vertical arc carries one
    strand from its start height to its end height in front of the strands it
    passes. Moving down past a strand gives a positive letter, moving up a
    negative one.
    """
    validate_or_raise(d)
    if "braid" in d._cache:
        return d._cache["braid"]
    hors = {h.z: h for h in d.horizontals}
    # strands present just after slot 0
    present = {h.z for h in d.horizontals if _covers_gap(h, 0, d.W)}
    letters: list[int] = []
    for step in range(1, d.W + 1):
        theta = step % d.W
        v = d.vertical_at(theta)
        others = sorted(present - {v.z_from})
        a = 1 + sum(1 for z in others if z < v.z_from)
        b = 1 + sum(1 for z in others if z < v.z_to)
        if b < a:
            letters.extend(range(a - 1, b - 1, -1))
        else:
            letters.extend(-g for g in range(a, b))
        present = set(others) | {v.z_to}
        assert hors[v.z_to].theta_from == theta
    n = len(present)
    word = BraidWord(n, tuple(letters))
    d._cache["braid"] = word
    return word


def _covers_gap(h: Horizontal, theta: int, W: int) -> bool:
    """Whether ``h`` passes the gap just after slot ``theta``."""
    return 0 <= (theta - h.theta_from) % W < (h.theta_to - h.theta_from) % W


def braid_index(d: RectDiagram) -> int:
    return sum(d.span(h) for h in d.horizontals) // d.W


def up_count(d: RectDiagram) -> int:
    return sum(1 for v in d.verticals if v.is_up)


def classical_invariants(d: RectDiagram) -> ClassicalInvariants:
    word = braid_of(d)
    ell, n, up = exponent_sum(word), word.n, up_count(d)
    return ClassicalInvariants(sl=ell - n, tb=ell - up, r=n - up, n=n, ell=ell, up_count=up)


def alexander(d: RectDiagram) -> LaurentPoly:
    return alexander_polynomial(braid_of(d))


class MeridianCollisionError(ValueError):
    """Raised when a vertical arc ends on a leaf away from its marked points."""


def meridian_linking(d: RectDiagram, meridian) -> int:
    """Number of times ``d`` passes through the disc bounded by ``meridian``.

    ``meridian`` provides ``gates``: each gate names a leaf by its angular
    label, the leaf's marked heights, and the segment of the leaf that lies in
    the meridian disc. A vertical arc drawn in that leaf's page passes the
    segment when its endpoints sit on opposite sides of it.
    """
    validate_or_raise(d)
    total = 0
    for gate in meridian.gates:
        pos = {h: idx for idx, h in enumerate(gate.heights)}
        for v in d.verticals:
            if d.theta_label(v.theta) != gate.theta:
                continue
            ends = [d.z_label(v.z_from), d.z_label(v.z_to)]
            missing = [z for z in ends if z not in pos]
            if missing:
                raise MeridianCollisionError(
                    f"vertical {v} ends at heights {missing} off the leaf at theta {gate.theta}"
                )
            lo, hi = sorted(pos[z] for z in ends)
            if lo <= gate.segment < hi:
                total += 1
    return total


class MoveNotApplicableError(ValueError):
    """Raised when a grid move is requested at a site where it does not apply."""


KINDS = {"NE": (1, 1), "NW": (-1, 1), "SE": (1, -1), "SW": (-1, -1)}


@dataclass(frozen=True)
class MoveResult:
    """A diagram produced by a move, with the change in classical invariants."""

    diagram: RectDiagram
    d_tb: int
    d_r: int
    d_sl: int
    d_n: int

    def to_json(self) -> dict:
        return {
            "diagram": self.diagram.to_json(),
            "delta": {"tb": self.d_tb, "r": self.d_r, "sl": self.d_sl, "n": self.d_n},
        }


def _result(before: RectDiagram, after: RectDiagram) -> MoveResult:
    a, b = classical_invariants(before), classical_invariants(after)
    return MoveResult(after, b.tb - a.tb, b.r - a.r, b.sl - a.sl, b.n - a.n)


def _compress(corners: list[tuple[int, int]], d: RectDiagram, tl: dict, zl: dict) -> RectDiagram:
    """Relabel doubled coordinates to consecutive slots, carrying labels."""
    thetas = sorted({t for t, _ in corners})
    zs = sorted({z for _, z in corners})
    tmap = {t: i for i, t in enumerate(thetas)}
    zmap = {z: i for i, z in enumerate(zs)}
    out = RectDiagram.from_cycle([(tmap[t], zmap[z]) for t, z in corners])
    if d.theta_labels is None and d.z_labels is None:
        return out
    return out.with_labels([tl[t] for t in thetas], [zl[z] for z in zs])


def _doubled(d: RectDiagram) -> tuple[list[tuple[int, int]], dict, dict]:
    corners = [(2 * t, 2 * z) for t, z in d.corners()]
    tl = {2 * t: d.theta_label(t) for t in range(d.W)}
    zl = {2 * z: d.z_label(z) for z in range(d.Z)}
    return corners, tl, zl


def rotate(d: RectDiagram, shift: int) -> RectDiagram:
    """Cyclically relabel angular slots by ``theta -> theta + shift``."""
    validate_or_raise(d)
    W = d.W
    verts = tuple(Vertical((v.theta + shift) % W, v.z_from, v.z_to) for v in d.verticals)
    hors = tuple(Horizontal(h.z, (h.theta_from + shift) % W, (h.theta_to + shift) % W) for h in d.horizontals)
    labels = None
    if d.theta_labels is not None:
        labels = [d.theta_labels[(t - shift) % W] for t in range(W)]
    return RectDiagram(W, d.Z, verts, hors, None if labels is None else tuple(labels), d.z_labels)


def grid_stabilize(d: RectDiagram, corner: int, kind: str) -> MoveResult:
    """Insert a unit square at corner ``corner`` of :meth:`RectDiagram.corners`.

    ``kind`` names the quadrant of the corner, one of ``NE NW SE SW``, that
    receives the new corner. One new angular slot and one new height slot are
    added next to the corner's own slots.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown stabilization kind {kind!r}")
    corners, tl, zl = _doubled(d)
    if not 0 <= corner < len(corners):
        raise MoveNotApplicableError(f"corner {corner} out of range 0..{len(corners) - 1}")
    dt, dz = KINDS[kind]
    t, z = corners[corner]
    tn, zn = t + dt, z + dz
    if corner % 2:
        new = [(t, zn), (tn, zn), (tn, z)]
    else:
        new = [(tn, z), (tn, zn), (t, zn)]
    tl[tn], zl[zn] = tl[t], zl[z]
    corners[corner : corner + 1] = new
    return _result(d, _compress(corners, d, tl, zl))


def _rotated_to(corners: list, start: int) -> list:
    """Rotate by an even amount so ``start`` lands at index 0 or 1."""
    shift = start - start % 2
    return corners[shift:] + corners[:shift]


def grid_destabilize(d: RectDiagram, corner: int) -> MoveResult:
    """Remove the unit square whose middle corner is ``corner``.

    The two arcs at the corner must have unit length: the horizontal joins
    cyclically adjacent angular slots and the vertical joins adjacent heights.
    """
    validate_or_raise(d)
    size = 2 * d.W
    if not 0 <= corner < size:
        raise MoveNotApplicableError(f"corner {corner} out of range 0..{size - 1}")
    if d.W <= 2:
        raise MoveNotApplicableError("grid is already minimal")
    corners = _rotated_to(d.corners(), (corner - 1) % size)
    mid = 1 if corner % 2 else 2
    p1, p2, p3 = corners[mid - 1], corners[mid], corners[mid + 1]
    if corner % 2:
        v_ends, h_ends = (p1, p2), (p2, p3)
    else:
        h_ends, v_ends = (p1, p2), (p2, p3)
    if (h_ends[1][0] - h_ends[0][0]) % d.W not in (1, d.W - 1):
        raise MoveNotApplicableError(f"horizontal at corner {corner} is not of unit length")
    if abs(v_ends[1][1] - v_ends[0][1]) != 1:
        raise MoveNotApplicableError(f"vertical at corner {corner} is not of unit length")
    theta = p1[0] if p1[0] != p2[0] else p3[0]
    height = p1[1] if p1[1] != p2[1] else p3[1]
    corners[mid - 1 : mid + 2] = [(theta, height)]
    tl = {t: d.theta_label(t) for t in range(d.W)}
    zl = {z: d.z_label(z) for z in range(d.Z)}
    return _result(d, _compress(corners, d, tl, zl))


def path_destabilize(d: RectDiagram, corner: int) -> MoveResult:
    """Collapse a horizontal-vertical-horizontal path that winds past a full turn.

    ``corner`` is a vertical end ``S``. The path leaves ``S`` along a
    horizontal to ``A``, follows a vertical between adjacent heights to ``B``
    and a horizontal to ``C``. When the two horizontals together exceed a full
    turn the path is replaced by a single horizontal at the height of ``S``
    ending at the angle of ``C``, which removes one turn around the axis.
    """
    validate_or_raise(d)
    if corner % 2 == 0:
        raise MoveNotApplicableError("path must start at the end of a vertical arc")
    corners = _rotated_to(d.corners(), corner)
    s, a, b, c = corners[1:5] if len(corners) > 4 else (None,) * 4
    if s is None:
        raise MoveNotApplicableError("grid is too small")
    span = (a[0] - s[0]) % d.W + (c[0] - b[0]) % d.W
    if span <= d.W:
        raise MoveNotApplicableError(f"path at corner {corner} turns {span} of {d.W} slots")
    if abs(b[1] - a[1]) != 1:
        raise MoveNotApplicableError(f"vertical after corner {corner} is not of unit length")
    corners[2:5] = [(c[0], s[1])]
    tl = {t: d.theta_label(t) for t in range(d.W)}
    zl = {z: d.z_label(z) for z in range(d.Z)}
    return _result(d, _compress(corners, d, tl, zl))


def render_ascii(d: RectDiagram) -> str:
    """Text picture with the top height slot first.

    Corners are ``+``, verticals ``|`` and horizontals ``-``. Verticals are
    drawn over horizontals. A horizontal that wraps runs into the right margin
    and re-enters from the left margin.
    """
    validate_or_raise(d)
    seam = 2 * d.W - 1
    rows = [[" "] * (2 * d.W + 1) for _ in range(d.Z)]
    for h in d.horizontals:
        for step in range(1, 2 * d.span(h)):
            pos = (2 * h.theta_from + step) % (2 * d.W)
            if pos == seam:
                rows[h.z][0] = rows[h.z][-1] = "-"
            else:
                rows[h.z][pos + 1] = "-"
    for v in d.verticals:
        lo, hi = sorted((v.z_from, v.z_to))
        for z in range(lo, hi + 1):
            rows[z][2 * v.theta + 1] = "+" if z in (lo, hi) else "|"
    return "\n".join("".join(r).rstrip() for r in reversed(rows)) + "\n"


def render_svg(d: RectDiagram, pitch: int = 32) -> str:
    """SVG picture on a ``pitch``-pixel lattice, verticals over horizontals."""
    validate_or_raise(d)
    margin = pitch // 2
    width, height = d.W * pitch + 2 * margin, d.Z * pitch + 2 * margin

    def x(t: float) -> float:
        return margin + (t + 0.5) * pitch

    def y(z: float) -> float:
        return margin + (d.Z - z - 0.5) * pitch

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    line = '<line x1="{:g}" y1="{:g}" x2="{:g}" y2="{:g}" stroke="{}" stroke-width="{}"/>'
    for h in d.horizontals:
        start, end = h.theta_from, h.theta_from + d.span(h)
        if end < d.W:
            parts.append(line.format(x(start), y(h.z), x(end), y(h.z), "black", 2))
        else:
            parts.append(line.format(x(start), y(h.z), x(d.W - 0.5), y(h.z), "black", 2))
            parts.append(line.format(x(-0.5), y(h.z), x(end - d.W), y(h.z), "black", 2))
    for v in d.verticals:
        parts.append(line.format(x(v.theta), y(v.z_from), x(v.theta), y(v.z_to), "white", 6))
        parts.append(line.format(x(v.theta), y(v.z_from), x(v.theta), y(v.z_to), "black", 2))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _interleaved(a: tuple[int, int], b: tuple[int, int], size: int) -> bool:
    """Whether chords ``a`` and ``b`` of a ``size``-cycle have interleaved ends."""
    def inside(x: int, arc: tuple[int, int]) -> bool:
        return 0 < (x - arc[0]) % size < (arc[1] - arc[0]) % size

    return inside(b[0], a) != inside(b[1], a)


def commute_rows(d: RectDiagram, z: int) -> RectDiagram:
    """Swap height slots ``z`` and ``z+1`` when their horizontals neither
    interleave nor share an end."""
    validate_or_raise(d)
    if not 0 <= z < d.Z - 1:
        raise MoveNotApplicableError(f"rows {z} and {z + 1} are not both in range")
    h1, h2 = d.horizontal_at(z), d.horizontal_at(z + 1)
    if len({h1.theta_from, h1.theta_to, h2.theta_from, h2.theta_to}) < 4:
        raise MoveNotApplicableError(f"horizontals at {z} and {z + 1} share an end")
    if _interleaved((h1.theta_from, h1.theta_to), (h2.theta_from, h2.theta_to), d.W):
        raise MoveNotApplicableError(f"horizontals at {z} and {z + 1} interleave")
    swap = {z: z + 1, z + 1: z}
    verts = tuple(Vertical(v.theta, swap.get(v.z_from, v.z_from), swap.get(v.z_to, v.z_to)) for v in d.verticals)
    hors = tuple(Horizontal(swap.get(h.z, h.z), h.theta_from, h.theta_to) for h in d.horizontals)
    labels = None if d.z_labels is None else tuple(d.z_labels[swap.get(z2, z2)] for z2 in range(d.Z))
    return RectDiagram(d.W, d.Z, verts, hors, d.theta_labels, labels)


def commute_columns(d: RectDiagram, theta: int) -> RectDiagram:
    """Swap angular slots ``theta`` and ``theta+1`` (cyclically) when their
    verticals neither interleave nor share an end."""
    validate_or_raise(d)
    nxt = (theta + 1) % d.W
    v1, v2 = d.vertical_at(theta), d.vertical_at(nxt)
    lo1, hi1 = sorted((v1.z_from, v1.z_to))
    lo2, hi2 = sorted((v2.z_from, v2.z_to))
    if len({lo1, hi1, lo2, hi2}) < 4:
        raise MoveNotApplicableError(f"verticals at {theta} and {nxt} share an end")
    if (lo1 < lo2 < hi1) != (lo1 < hi2 < hi1):
        raise MoveNotApplicableError(f"verticals at {theta} and {nxt} interleave")
    swap = {theta: nxt, nxt: theta}
    verts = tuple(Vertical(swap.get(v.theta, v.theta), v.z_from, v.z_to) for v in d.verticals)
    hors = tuple(
        Horizontal(h.z, swap.get(h.theta_from, h.theta_from), swap.get(h.theta_to, h.theta_to)) for h in d.horizontals
    )
    labels = None if d.theta_labels is None else tuple(d.theta_labels[swap.get(t, t)] for t in range(d.W))
    return RectDiagram(d.W, d.Z, verts, hors, labels, d.z_labels)


def _commute(d: RectDiagram, move: tuple[str, int]) -> RectDiagram:
    kind, index = move
    if kind == "row":
        return commute_rows(d, index)
    if kind == "column":
        return commute_columns(d, index)
    raise ValueError(f"unknown commutation kind {kind!r}")


@dataclass(frozen=True)
class FlypePath:
    """Where the destabilization leg of a flype happens.

    ``commutations`` are applied to the stabilized diagram in order, each a
    ``("row", z)`` or ``("column", theta)`` swap with the next slot. The
    negative destabilization then removes the unit square at ``corner``.
    """

    commutations: tuple[tuple[str, int], ...]
    corner: int

    def to_json(self) -> dict:
        return {"commutations": [list(m) for m in self.commutations], "corner": self.corner}

    @classmethod
    def from_json(cls, data: Mapping) -> FlypePath:
        return cls(tuple((str(k), int(i)) for k, i in data["commutations"]), int(data["corner"]))


def negative_stabilization(d: RectDiagram, theta: int) -> MoveResult:
    """Negative Markov stabilization at the end of the vertical at ``theta``."""
    validate_or_raise(d)
    if theta not in range(d.W):
        raise MoveNotApplicableError(f"no vertical at theta {theta}")
    corners = d.corners()
    end = next(i for i in range(1, len(corners), 2) if corners[i][0] == theta)
    for kind in KINDS:
        res = grid_stabilize(d, end, kind)
        if res.d_n == 1 and res.d_sl == -2:
            return res
    raise AssertionError("no negative stabilization kind at a vertical end")  # pragma: no cover


def negative_flype(d: RectDiagram, theta: int, path: FlypePath) -> MoveResult:
    """Negative stabilization of the vertical at ``theta`` followed by the
    negative destabilization described by ``path``.

    Slot counts and the self-linking number are unchanged.
    """
    stab = negative_stabilization(d, theta)
    e = stab.diagram
    for idx, move in enumerate(path.commutations):
        try:
            e = _commute(e, move)
        except MoveNotApplicableError as exc:
            raise MoveNotApplicableError(f"destabilization leg, commutation {idx}: {exc}") from exc
    try:
        dest = grid_destabilize(e, path.corner)
    except MoveNotApplicableError as exc:
        raise MoveNotApplicableError(f"destabilization leg: {exc}") from exc
    if dest.d_n != -1 or dest.d_sl != 2:
        raise MoveNotApplicableError(f"destabilization leg: corner {path.corner} is not a negative destabilization")
    return _result(d, dest.diagram)


def _encode(d: RectDiagram) -> tuple[tuple[int, int], ...]:
    return tuple((d.vertical_at(t).z_from, d.vertical_at(t).z_to) for t in range(d.W))


def _decode(code: tuple[tuple[int, int], ...]) -> RectDiagram:
    verts = tuple(Vertical(t, a, b) for t, (a, b) in enumerate(code))
    return RectDiagram(len(code), len(code), verts, _horizontals_from_verticals(verts))


def _commutations(code: tuple[tuple[int, int], ...]):
    """Yield ``(move, result)`` for every commutation of an encoded diagram."""
    W = len(code)
    start = {a: t for t, (a, _) in enumerate(code)}
    arcs = {b: (t, start[b]) for t, (_, b) in enumerate(code)}
    for t in range(W):
        u = (t + 1) % W
        lo1, hi1 = sorted(code[t])
        lo2, hi2 = sorted(code[u])
        if len({lo1, hi1, lo2, hi2}) == 4 and (lo1 < lo2 < hi1) == (lo1 < hi2 < hi1):
            out = list(code)
            out[t], out[u] = out[u], out[t]
            yield ("column", t), tuple(out)
    for z in range(W - 1):
        if len({*arcs[z], *arcs[z + 1]}) == 4 and not _interleaved(arcs[z], arcs[z + 1], W):
            swap = {z: z + 1, z + 1: z}
            yield ("row", z), tuple((swap.get(a, a), swap.get(b, b)) for a, b in code)


def commutation_class(d: RectDiagram, cap: int = 100_000) -> set[tuple[tuple[int, int], ...]]:
    """Encoded diagrams reachable from ``d`` by commutations, up to ``cap``.

    A diagram is encoded as the ``(z_from, z_to)`` pair of each vertical in
    angular order.
    """
    validate_or_raise(d)
    first = _encode(d)
    seen = {first}
    frontier = [first]
    while frontier and len(seen) < cap:
        nxt = []
        for code in frontier:
            for _, other in _commutations(code):
                if other not in seen:
                    seen.add(other)
                    nxt.append(other)
        frontier = nxt
    return seen


def _negative_destabilizations(code: tuple[tuple[int, int], ...]) -> list[tuple[int, RectDiagram]]:
    W = len(code)
    start = {a: t for t, (a, _) in enumerate(code)}
    if not any((start[b] - t) % W == W - 1 for t, (_, b) in enumerate(code)):
        return []
    d = _decode(code)
    out = []
    for corner in range(2 * W):
        try:
            res = grid_destabilize(d, corner)
        except MoveNotApplicableError:
            continue
        if res.d_n == -1 and res.d_sl == 2:
            out.append((corner, res.diagram))
    return out


def find_flype_paths(
    d: RectDiagram,
    theta: int,
    max_depth: int = 8,
    limit: int = 1,
    avoid: set | None = None,
) -> list[FlypePath]:
    """Breadth-first search over commutations of the stabilized diagram for
    negative destabilizations whose result differs from ``d``.

    Results whose encoding lies in ``avoid`` are skipped; pass
    ``commutation_class(d)`` to keep only flypes that are not mere
    commutations of ``d``. Labels are ignored.
    """
    avoid = avoid if avoid is not None else {_encode(d)}
    first = _encode(negative_stabilization(d, theta).diagram)
    found: list[FlypePath] = []
    seen = {first}
    frontier: list[tuple[tuple[tuple[int, int], ...], tuple[tuple[str, int], ...]]] = [(first, ())]
    for depth in range(max_depth + 1):
        nxt = []
        for code, moves in frontier:
            for corner, result in _negative_destabilizations(code):
                if _encode(result) not in avoid:
                    found.append(FlypePath(moves, corner))
                    if len(found) >= limit:
                        return found
            if depth == max_depth:
                continue
            for move, other in _commutations(code):
                if other not in seen:
                    seen.add(other)
                    nxt.append((other, moves + (move,)))
        frontier = nxt
    return found

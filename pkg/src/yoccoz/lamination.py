"""Invariant laminations for the p/q limb: the alpha-ray cycle, its pullbacks,
ray-pair equivalence, and the slice dynamics on the critical-value sector.

Polygon lists are materialized up to ``depth`` for reports and invariant
checks.  All gap/criticality queries are answered lazily by a pullback
recursion that bottoms out at the alpha polygon, so they work at any level
(tau at level 40 needs gaps at level 40; 2^40 polygons cannot be stored).
The lazy predicates are cross-validated against the stored lists in tests.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

from .angles import Angle, ArcPosition, cyclic_sorted, double, from_fraction, in_arc, normalize
from .errors import (
    Case1DegenerateError,
    InvalidThetaError,
    NeedsDeeperLaminationError,
    NotFoundWithinBudgetError,
    YoccozError,
)

MAX_MATERIALIZED_DEPTH = 18


@dataclass(frozen=True)
class Polygon:
    """Vertices of one landing class (cyclically ordered, smallest first)."""

    vertices: tuple[Angle, ...]
    depth: int

    def __contains__(self, theta: Angle) -> bool:
        return theta in self.vertices


def alpha_cycle(p: int, q: int) -> list[Angle]:
    """The unique period-q cycle of doubling acting as rotation by p/q.

    Brute force over cycles with denominator 2^q - 1, selecting the one whose
    action on the circular order advances every angle by p positions.
    """
    from math import gcd

    if q < 2 or not (0 < p < q) or gcd(p, q) != 1:
        raise ValueError(f"need coprime 0 < p < q with q >= 2, got {p}/{q}")
    den = (1 << q) - 1
    visited = bytearray(den)
    found = None
    for k in range(1, den):
        if visited[k]:
            continue
        orb = [k]
        cur = (2 * k) % den
        while cur != k:
            orb.append(cur)
            cur = (2 * cur) % den
        for v in orb:
            visited[v] = 1
        if len(orb) != q:
            continue
        srt = sorted(orb)
        index = {v: i for i, v in enumerate(srt)}
        shift = index[(2 * srt[0]) % den]
        if shift != p:
            continue
        if all(index[(2 * srt[i]) % den] == (i + shift) % q for i in range(q)):
            if found is not None:
                raise YoccozError(f"internal error: two rotation-{p}/{q} cycles found")
            found = srt
    if found is None:
        raise YoccozError(f"internal error: no rotation cycle for {p}/{q}")
    return [normalize(v, den) for v in found]


def cycle_entry_step(theta: Angle, cycle: frozenset[Angle]) -> int | None:
    """Least j >= 0 with 2^j * theta in the cycle, or None if the orbit misses it."""
    seen = set()
    cur, j = theta, 0
    while cur not in seen:
        if cur in cycle:
            return j
        seen.add(cur)
        cur = double(cur)
        j += 1
    return None


Arc = tuple[Angle, Angle]  # open ccw arc (start, end)


def arc_length(arc: Arc) -> Fraction:
    return (arc[1].frac - arc[0].frac) % 1


def arc_contains(arc: Arc, theta: Angle) -> bool:
    return in_arc(theta, arc[0], arc[1]) is ArcPosition.INSIDE


def _half(theta: Angle) -> Angle:
    return normalize(theta.num, 2 * theta.den)


def _preimage_arcs(arc: Arc) -> tuple[Arc, Arc]:
    a = _half(arc[0])
    half_len = arc_length(arc) / 2
    b = a + half_len
    a2 = a + Fraction(1, 2)
    return (a, b), (a2, a2 + half_len)


@dataclass
class SliceData:
    """Exact angle data of the univalent slice dynamics in the sector (A, D).

    Cyclic order A < B_k < E < B < C < F < C_k < D; f^{kq} maps the outer
    slice pair back, f^{m+kq} flips it (the two contractions l1, l2).
    """

    A: Angle
    B: Angle
    C: Angle
    D: Angle
    E: Angle
    F: Angle
    B_k: Angle
    C_k: Angle
    n: int
    m: int
    k: int
    q: int


class RayPairRelation(enum.Enum):
    EQUIVALENT = "equivalent"
    NOT_EQUIVALENT = "not-equivalent-to-depth"
    UNKNOWN = "unknown"


class Lamination:
    """Pullbacks of the alpha polygon through doubling, split by the critical leaf."""

    def __init__(self, p: int, q: int, theta_v: Angle, depth: int):
        if depth < 0:
            raise ValueError("depth must be >= 0")
        if depth > MAX_MATERIALIZED_DEPTH:
            raise ValueError(f"refusing to materialize beyond depth {MAX_MATERIALIZED_DEPTH}")
        self.p, self.q = p, q
        self.theta_v = theta_v
        self.depth = depth
        cyc = alpha_cycle(p, q)
        self.cycle = tuple(cyc)
        self.cycle_set = frozenset(cyc)

        # Degeneracy must win over the sector test (the 1/6 example is case 1).
        self.entry_step = cycle_entry_step(theta_v, self.cycle_set)
        if self.entry_step is not None and self.entry_step <= depth:
            raise Case1DegenerateError(self.entry_step)

        self.sector = self._critical_value_sector()
        if in_arc(theta_v, *self.sector) is not ArcPosition.INSIDE:
            raise InvalidThetaError(
                f"theta_v={theta_v} is not strictly inside the critical-value sector "
                f"({self.sector[0]}, {self.sector[1]})"
            )
        h = _half(theta_v)
        self.critical_leaf: tuple[Angle, Angle] = (h, h + Fraction(1, 2))

        self.polygons: list[list[Polygon]] = [[Polygon(tuple(cyclic_sorted(cyc)), 0)]]
        for j in range(depth):
            self.polygons.append(
                [child for parent in self.polygons[j] for child in self._split(parent, j + 1)]
            )

        self._same_gap_memo: dict = {}
        self._trace_memo: dict = {}
        self._entry_memo: dict[Angle, int | None] = {}
        self._class_memo: dict[Angle, tuple[Angle, ...]] = {}

    # ------------------------------------------------------------------ build

    def _critical_value_sector(self) -> Arc:
        srt = cyclic_sorted(self.cycle)
        arcs = [(srt[i], srt[(i + 1) % len(srt)]) for i in range(len(srt))]
        return min(arcs, key=arc_length)

    def _split(self, parent: Polygon, depth: int) -> list[Polygon]:
        h0, h1 = self.critical_leaf
        side0, side1 = [], []
        for v in parent.vertices:
            for u in (_half(v), _half(v) + Fraction(1, 2)):
                pos = in_arc(u, h0, h1)
                if pos is ArcPosition.BOUNDARY:
                    raise Case1DegenerateError(depth - 1)
                (side0 if pos is ArcPosition.INSIDE else side1).append(u)
        return [
            Polygon(tuple(cyclic_sorted(side0)), depth),
            Polygon(tuple(cyclic_sorted(side1)), depth),
        ]

    # --------------------------------------------------------------- queries

    def vertex_entry_step(self, theta: Angle) -> int | None:
        """Least depth at which theta is a polygon vertex (None: never)."""
        if theta not in self._entry_memo:
            self._entry_memo[theta] = cycle_entry_step(theta, self.cycle_set)
        return self._entry_memo[theta]

    def is_vertex(self, theta: Angle, level: int) -> bool:
        """Bounded walk: theta is a depth <= level vertex iff its orbit meets
        the cycle within `level` doublings (no full-orbit scan needed)."""
        if theta in self._entry_memo:
            e = self._entry_memo[theta]
            return e is not None and e <= level
        cur = theta
        for j in range(level + 1):
            if cur in self.cycle_set:
                return True
            cur = double(cur)
        return False

    def orbit_hits_cycle_within(self, theta: Angle, steps: int) -> bool:
        cur = theta
        for _ in range(steps + 1):
            if cur in self.cycle_set:
                return True
            cur = double(cur)
        return False

    def _guard_level(self, level: int):
        if level < 0:
            raise ValueError("level must be >= 0")
        if self.entry_step is not None and level >= self.entry_step:
            raise Case1DegenerateError(self.entry_step)

    def _leaf_side(self, theta: Angle) -> int:
        return 0 if in_arc(theta, *self.critical_leaf) is ArcPosition.INSIDE else 1

    def _sector_index(self, theta: Angle) -> int:
        srt = list(self.polygons[0][0].vertices)
        for i in range(len(srt)):
            if in_arc(theta, srt[i], srt[(i + 1) % len(srt)]) is ArcPosition.INSIDE:
                return i
        raise YoccozError(f"{theta} is a cycle angle")

    def same_gap(self, level: int, u: Angle, w: Angle) -> bool:
        """True iff no polygon of depth <= level separates u from w on the circle.

        Both angles must be non-vertices at this level.  Recursion: gaps at
        level m are preimage components of gaps at level m-1; components are
        the two critical-leaf halves unless the image gap holds theta_v.
        """
        self._guard_level(level)
        if u == w:
            return True
        key = (level, u, w) if u.frac <= w.frac else (level, w, u)
        memo = self._same_gap_memo
        if key in memo:
            return memo[key]
        if level == 0:
            res = self._sector_index(u) == self._sector_index(w)
        else:
            du, dw = double(u), double(w)
            if not self.same_gap(level - 1, du, dw):
                res = False
            elif self.same_gap(level - 1, du, self.theta_v):
                res = True
            else:
                res = self._leaf_side(u) == self._leaf_side(w)
        memo[key] = res
        return res

    def gap_is_critical(self, level: int, theta: Angle) -> bool:
        """The level gap of theta contains the critical leaf."""
        return self.same_gap(level, theta, self.critical_leaf[0])

    def trace(self, level: int, theta: Angle) -> tuple[Arc, ...]:
        """Circle trace (boundary arcs) of the level gap containing theta."""
        self._guard_level(level)
        if self.is_vertex(theta, level):
            raise YoccozError(f"{theta} is a vertex at depth <= {level}")
        if level == 0:
            srt = list(self.polygons[0][0].vertices)
            i = self._sector_index(theta)
            return ((srt[i], srt[(i + 1) % len(srt)]),)
        key = (level, theta)
        if key in self._trace_memo:
            return self._trace_memo[key]
        parent = self.trace(level - 1, double(theta))
        halves = [h for arc in parent for h in _preimage_arcs(arc)]
        if not self.same_gap(level - 1, double(theta), self.theta_v):
            side = self._leaf_side(theta)
            halves = [
                arc
                for arc in halves
                if self._leaf_side(from_fraction((arc[0].frac + arc_length(arc) / 2) % 1)) == side
            ]
        arcs = tuple(sorted(halves, key=lambda a: a[0].frac))
        assert any(arc_contains(a, theta) for a in arcs), "probe fell off its own gap trace"
        self._trace_memo[key] = arcs
        return arcs

    def polygons_inside(self, level: int, theta: Angle) -> list[tuple[Angle, ...]]:
        """Depth-(level+1) polygons whose vertices lie inside the level gap of theta."""
        self._guard_level(level + 1)
        if level == 0:
            i = self._sector_index(theta)
            srt = list(self.polygons[0][0].vertices)
            arc = (srt[i], srt[(i + 1) % len(srt)])
            out = []
            for poly in self._depth1_polys():
                if all(arc_contains(arc, v) for v in poly):
                    out.append(poly)
            return out
        parents = self.polygons_inside(level - 1, double(theta))
        both = self.same_gap(level - 1, double(theta), self.theta_v)
        side = None if both else self._leaf_side(theta)
        out = []
        for pv in parents:
            s0, s1 = [], []
            for v in pv:
                for u in (_half(v), _half(v) + Fraction(1, 2)):
                    (s0 if self._leaf_side(u) == 0 else s1).append(u)
            for grp in (s0, s1):
                if side is None or self._leaf_side(grp[0]) == side:
                    out.append(tuple(cyclic_sorted(grp)))
        return out

    def _depth1_polys(self) -> list[tuple[Angle, ...]]:
        if self.depth >= 1:
            return [p.vertices for p in self.polygons[1]]
        fake = self._split(self.polygons[0][0], 1)
        return [p.vertices for p in fake]

    # ----------------------------------------------------------- equivalence

    def vertex_class(self, theta: Angle) -> tuple[Angle, ...] | None:
        """Landing class of an alpha-cycle preimage (None if theta is no vertex).

        Computed lazily by pulling the alpha polygon back along the orbit, so
        it is exact at any depth; classes persist once they appear.
        """
        e = self.vertex_entry_step(theta)
        if e is None:
            return None
        self._guard_level(e)
        if theta in self._class_memo:
            return self._class_memo[theta]
        if e == 0:
            cls = self.polygons[0][0].vertices
        else:
            parent = self.vertex_class(double(theta))
            mine = self._leaf_side(theta)
            grp = []
            for v in parent:
                for u in (_half(v), _half(v) + Fraction(1, 2)):
                    if self._leaf_side(u) == mine:
                        grp.append(u)
            cls = tuple(cyclic_sorted(grp))
            assert theta in cls
        self._class_memo[theta] = cls
        return cls

    def ray_pair_equiv(self, t1: Angle, t2: Angle) -> RayPairRelation:
        c1 = self.vertex_class(t1)
        c2 = self.vertex_class(t2)
        if c1 is None or c2 is None:
            return RayPairRelation.UNKNOWN
        return RayPairRelation.EQUIVALENT if c1 == c2 else RayPairRelation.NOT_EQUIVALENT

    # ---------------------------------------------------------------- slices

    def _alpha_gap_probe(self, level: int) -> Angle:
        """An angle just inside the sector next to A, below any vertex spacing."""
        a = self.sector[0]
        den = 3 * ((1 << self.q) - 1) * (1 << level)
        return a + Fraction(1, den)

    def slice_data(self, max_level: int | None = None) -> SliceData:
        """Locate the separating ray pair (B, C), the return time m, and the
        contraction level k of the slice dynamics inside the sector (A, D)."""
        A, D = self.sector
        limit = self.depth if max_level is None else max_level
        found = None
        for n in range(1, limit + 1):
            arcs = self.trace(n, self._alpha_gap_probe(n))
            if any(
                arc_contains(arc, self.theta_v) or self.theta_v in arc for arc in arcs
            ):
                continue
            holes = [(arcs[i][1], arcs[(i + 1) % len(arcs)][0]) for i in range(len(arcs))]
            for b, c in holes:
                if b != c and arc_contains((b, c), self.theta_v):
                    found = (n, b, c)
                    break
            if found:
                break
        if found is None:
            raise NeedsDeeperLaminationError(limit)
        n, B, C = found

        m = None
        for cand in range(n, n + self.q):
            if double(B, cand) == D and double(C, cand) == A:
                m = cand
                break
        if m is None:
            raise YoccozError("internal error: no return time m in [n, n+q)")

        fA, fB, fC, fD = A.frac, B.frac, C.frac, D.frac
        for k in range(1, 65):
            s1 = Fraction(1, 1 << (k * self.q))
            s2 = Fraction(1, 1 << (m + k * self.q))
            bk = fA + (fB - fA) * s1
            ck = fD - (fD - fC) * s1
            e = fB - (fD - fC) * s2
            f = fC + (fB - fA) * s2
            if (fB - e) + (bk - fA) < (fB - fA) and (f - fC) + (fD - ck) < (fD - fC):
                data = SliceData(
                    A=A, B=B, C=C, D=D,
                    E=from_fraction(e), F=from_fraction(f),
                    B_k=from_fraction(bk), C_k=from_fraction(ck),
                    n=n, m=m, k=k, q=self.q,
                )
                order = [data.A, data.B_k, data.E, data.B, data.C, data.F, data.C_k, data.D]
                if any(order[i].frac >= order[i + 1].frac for i in range(7)):
                    raise YoccozError("internal error: slice order violated")
                return data
        raise NotFoundWithinBudgetError(64, "no contraction level k up to 64")


def build(p: int, q: int, theta_v: Angle, depth: int) -> Lamination:
    """Compute the alpha cycle for the p/q limb and pull its polygon back
    ``depth`` times through angle doubling, splitting along the critical leaf."""
    return Lamination(p, q, theta_v, depth)


def check_unlinked(families) -> tuple | None:
    """Linear-time crossing check of a polygon family (vertex tuples).

    Returns None if pairwise unlinked, else a witness pair.  Identical vertex
    sets (a class persisting over depths) are deduplicated; two distinct
    classes sharing any vertex already count as a violation.  The circle is
    cut at 0, which is never a vertex of an alpha-cycle preimage, and the
    classic bracket discipline runs on the linear order: away from its first
    and last vertex a polygon must sit on top of the stack.
    """
    classes: dict[tuple, int] = {}
    owner: dict[Angle, int] = {}
    for verts in families:
        key = tuple(sorted(verts, key=lambda a: a.frac))
        if key in classes:
            continue
        cid = classes.setdefault(key, len(classes))
        for v in key:
            if v in owner and owner[v] != cid:
                return (key, v)
            owner[v] = cid
    keys = list(classes)
    events = sorted(((v, cid) for key, cid in classes.items() for v in key),
                    key=lambda e: e[0].frac)
    remaining = {cid: len(key) for key, cid in classes.items()}
    stack: list[int] = []
    open_: set[int] = set()
    for v, cid in events:
        if cid not in open_:
            stack.append(cid)
            open_.add(cid)
        elif not stack or stack[-1] != cid:
            return (keys[cid], v)
        remaining[cid] -= 1
        if remaining[cid] == 0:
            stack.pop()
    return None


# ----------------------------------------------------------- slice functions


def _l1(slc: SliceData, a: Fraction, b: Fraction) -> tuple[Fraction, Fraction]:
    s = Fraction(1, 1 << (slc.k * slc.q))
    return slc.A.frac + (a - slc.A.frac) * s, slc.D.frac - (slc.D.frac - b) * s


def _l2(slc: SliceData, a: Fraction, b: Fraction) -> tuple[Fraction, Fraction]:
    s = Fraction(1, 1 << (slc.m + slc.k * slc.q))
    return slc.B.frac - (slc.D.frac - b) * s, slc.C.frac + (a - slc.A.frac) * s


def cantor_ray_pair(slc: SliceData, word) -> tuple[Angle, Angle]:
    """l_{i1} o ... o l_{ij} applied to the pair (A, D), exactly."""
    a, b = slc.A.frac, slc.D.frac
    for i in reversed(list(word)):
        if i == 1:
            a, b = _l1(slc, a, b)
        elif i == 2:
            a, b = _l2(slc, a, b)
        else:
            raise ValueError("word letters must be 1 or 2")
    return from_fraction(a), from_fraction(b)


def cantor_coordinates(word) -> Fraction:
    """Middle-thirds address e_{i1} o ... o e_{ij}(0) matching cantor_ray_pair."""
    x = Fraction(0)
    for i in reversed(list(word)):
        if i == 1:
            x = x / 3
        elif i == 2:
            x = 1 - x / 3
        else:
            raise ValueError("word letters must be 1 or 2")
    return x


def _corner_pairs(slc: SliceData, word) -> tuple[Fraction, Fraction]:
    """First coordinates of l_w(A,D) and l_w(B,C): the q1-interval of the word."""
    a1, b1 = slc.A.frac, slc.D.frac
    a2, b2 = slc.B.frac, slc.C.frac
    for i in reversed(list(word)):
        fn = _l1 if i == 1 else _l2
        a1, b1 = fn(slc, a1, b1)
        a2, b2 = fn(slc, a2, b2)
    lo, hi = sorted((a1, a2))
    return lo, hi


def bounded_geometry_report(slc: SliceData, depth: int) -> list[tuple[Fraction, Fraction, Fraction]]:
    """Normalized (left gap : middle gap : right gap) triples of the q1 Cantor
    construction, one per word of length <= depth. Self-similarity of the
    l1/l2 system makes the set of distinct triples finite (two values)."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    out = []
    frontier: list[list[int]] = [[]]
    while frontier:
        w = frontier.pop()
        lo, hi = _corner_pairs(slc, w)
        c1 = _corner_pairs(slc, w + [1])
        c2 = _corner_pairs(slc, w + [2])
        (l1lo, l1hi), (l2lo, l2hi) = sorted([c1, c2])
        total = hi - lo
        out.append(((l1hi - l1lo) / total, (l2lo - l1hi) / total, (l2hi - l2lo) / total))
        if len(w) < depth:
            frontier.extend([w + [1], w + [2]])
    return out


def slice_data(lam: Lamination, max_level: int | None = None) -> SliceData:
    return lam.slice_data(max_level)


def ray_pair_equiv(lam: Lamination, t1: Angle, t2: Angle) -> RayPairRelation:
    return lam.ray_pair_equiv(t1, t2)

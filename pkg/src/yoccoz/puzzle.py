"""Puzzle pieces as lamination gaps, the tau function, critical annuli and
their descendants, and rise-and-drop sequence analytics.

A piece is identified by its level and circle trace (boundary arcs).  All
predicates reduce to Lamination.same_gap, so they work at any level; the
"piece of 0" is the gap holding the critical leaf, per the design decision
that every test point here is an angle or the leaf.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .angles import Angle, double
from .errors import (
    NeedsDeeperLaminationError,
    NotFoundWithinBudgetError,
    NotRiseAndDropError,
    OnBoundaryError,
    OrbitHitsAlphaError,
)
from .lamination import Arc, Lamination

CRITICAL = "CRITICAL"  # sentinel query point: the critical leaf


@dataclass(frozen=True)
class PieceRef:
    """A puzzle piece: the gap of the lamination at ``level`` containing ``probe``.

    Equality is by level and boundary arcs; the probe is a convenience witness
    for membership tests and is excluded from comparisons.
    """

    level: int
    boundary: tuple[Arc, ...]
    probe: Angle = field(compare=False)

    def __str__(self):
        arcs = ", ".join(f"({a}..{b})" for a, b in self.boundary)
        return f"P_{self.level}[{arcs}]"


def _query_angle(lam: Lamination, theta) -> Angle:
    return lam.critical_leaf[0] if theta == CRITICAL else theta


def piece_of(lam: Lamination, level: int, theta) -> PieceRef:
    """The level-n gap containing theta (or the critical leaf for CRITICAL)."""
    t = _query_angle(lam, theta)
    if lam.is_vertex(t, level):
        raise OnBoundaryError(f"{t} is a polygon vertex at depth <= {level}")
    return PieceRef(level=level, boundary=lam.trace(level, t), probe=t)


def critical_piece(lam: Lamination, level: int) -> PieceRef:
    """The gap containing the critical leaf chord."""
    return piece_of(lam, level, CRITICAL)


def map_forward(lam: Lamination, piece: PieceRef) -> PieceRef:
    """Image piece under doubling: P_n(theta) -> P_{n-1}(2 theta)."""
    if piece.level == 0:
        raise ValueError("level-0 pieces have no level -1 image")
    return piece_of(lam, piece.level - 1, double(piece.probe))


def contains_angle(lam: Lamination, piece: PieceRef, theta: Angle) -> bool:
    if lam.is_vertex(theta, piece.level):
        return False
    return lam.same_gap(piece.level, theta, piece.probe)


def is_critical(lam: Lamination, piece: PieceRef) -> bool:
    return lam.gap_is_critical(piece.level, piece.probe)


def sub_pieces(lam: Lamination, piece: PieceRef) -> list[PieceRef]:
    """The level-(n+1) pieces contained in a level-n piece.

    The subdividing polygons are enumerated by pulling back the polygons
    inside the image gap, then one probe per subdivision arc is resolved.
    """
    marks = sorted(
        {v for poly in lam.polygons_inside(piece.level, piece.probe) for v in poly},
        key=lambda a: a.frac,
    )
    probes = []
    for a, b in piece.boundary:
        inner = [v for v in marks if _in_open_arc(v, a, b)]
        pts = [a] + inner + [b]
        for i in range(len(pts) - 1):
            lo, hi = pts[i].frac, pts[i + 1].frac
            if hi <= lo:
                hi += 1
            probes.append(_mid_angle(lo, hi))
    out: dict = {}
    for t in probes:
        sub = piece_of(lam, piece.level + 1, t)
        out[(sub.level, sub.boundary)] = sub
    return list(out.values())


def enumerate_pieces(lam: Lamination, level: int) -> list[PieceRef]:
    """All pieces of one level, by recursive subdivision of the level-0 sectors."""
    srt = list(lam.polygons[0][0].vertices)
    pieces = []
    for i in range(len(srt)):
        lo, hi = srt[i].frac, srt[(i + 1) % len(srt)].frac
        if hi <= lo:
            hi += 1
        pieces.append(piece_of(lam, 0, _mid_angle(lo, hi)))
    for _ in range(level):
        pieces = [s for piece in pieces for s in sub_pieces(lam, piece)]
    return pieces


def _in_open_arc(v: Angle, a: Angle, b: Angle) -> bool:
    from .angles import ArcPosition, in_arc

    return in_arc(v, a, b) is ArcPosition.INSIDE


def _mid_angle(lo, hi) -> Angle:
    from .angles import from_fraction

    return from_fraction(((lo + hi) / 2) % 1)


# ------------------------------------------------------------------ tau


def _orbit_guard(lam: Lamination, theta, n: int):
    """piece_of must be defined along the forward orbit up to n: equivalent
    to the orbit of theta missing the alpha cycle for n doublings."""
    if theta == CRITICAL:
        return
    if lam.orbit_hits_cycle_within(theta, n):
        raise OrbitHitsAlphaError(f"the orbit of {theta} meets the alpha cycle within {n} steps")


def _image_is_critical(lam: Lamination, theta, n: int, j: int) -> bool:
    """Is the j-fold image of P_n(theta) the critical piece of level n-j?"""
    if theta == CRITICAL:
        if j == 0:
            return True
        psi = double(lam.theta_v, j - 1)
    else:
        psi = double(theta, j)
    return lam.gap_is_critical(n - j, psi)


def tau_direct(lam: Lamination, n: int, theta) -> int:
    """Reference scan: least j with the j-fold image of P_n critical, as n - j."""
    _orbit_guard(lam, theta, n)
    for j in range(n + 1):
        if _image_is_critical(lam, theta, n, j):
            return n - j
    return -1


def tau(lam: Lamination, n: int, theta) -> int:
    """tau(n, z) per the unique-m definition; -1 when no image is critical."""
    return tau_sequence(lam, theta, n)[-1]


def tau_sequence(lam: Lamination, theta, n_max: int, start: int = 0) -> list[int]:
    """Incremental tau along n = start..n_max using tau(n+1) <= tau(n) + 1:
    scan candidate levels downward from the previous value + 1."""
    _orbit_guard(lam, theta, n_max)
    values: list[int] = []
    prev = None
    for n in range(start, n_max + 1):
        hi = n if prev is None else min(prev + 1, n)
        val = -1
        for m in range(hi, -1, -1):
            if _image_is_critical(lam, theta, n, n - m):
                val = m
                break
        values.append(val)
        prev = val
    return values


# ------------------------------------------------------------- annuli


def annulus_degenerate(lam: Lamination, n: int) -> bool:
    """A_n(0) is degenerate iff the critical pieces at n and n+1 share a
    boundary ray pair, i.e. their traces share an arc endpoint."""
    outer = {v for arc in critical_piece(lam, n).boundary for v in arc}
    inner = {v for arc in critical_piece(lam, n + 1).boundary for v in arc}
    return bool(outer & inner)


def first_nondegenerate(lam: Lamination, budget: int | None = None) -> int:
    limit = budget if budget is not None else max(lam.depth - 1, 1)
    for n in range(limit + 1):
        if not annulus_degenerate(lam, n):
            return n
    raise NeedsDeeperLaminationError(limit, f"no nondegenerate critical annulus up to {limit}")


def descendant_check(lam: Lamination, m: int, n: int) -> tuple[bool, int]:
    """Does f^{m-n} map A_m(0) onto A_n(0) as an unramified cover?

    Walk the critical-orbit images; a critical outer piece doubles the degree
    and must come with a critical inner piece (else the cover ramifies).
    """
    if m <= n:
        raise ValueError("need m > n")
    passes = 0
    for j in range(m - n):
        outer_crit = _image_is_critical(lam, CRITICAL, m, j)
        inner_crit = _image_is_critical(lam, CRITICAL, m + 1, j)
        if outer_crit:
            if not inner_crit:
                return False, 0
            passes += 1
    if not _image_is_critical(lam, CRITICAL, m, m - n):
        return False, 0
    if not _image_is_critical(lam, CRITICAL, m + 1, m - n):
        return False, 0
    return True, 1 << passes


def descendant_levels(lam: Lamination, n: int, budget: int) -> list[tuple[int, int]]:
    """(level, degree) of every descendant of A_n(0) with level <= n + budget."""
    out = []
    for m in range(n + 1, n + budget + 1):
        ok, deg = descendant_check(lam, m, n)
        if ok:
            out.append((m, deg))
    return out


def fraternal_descendants(lam: Lamination, n: int, budget: int) -> tuple[int, int]:
    """Two descendant levels of A_n(0), neither a descendant of the other."""
    levels = [m for m, _ in descendant_levels(lam, n, budget)]
    for i, m1 in enumerate(levels):
        for m2 in levels[i + 1:]:
            if not descendant_check(lam, m2, m1)[0]:
                return m1, m2
    raise NotFoundWithinBudgetError(budget, f"no fraternal descendants of A_{n} within {budget}")


# ----------------------------------------------------- rise and drop


@dataclass(frozen=True)
class TauSequence:
    start: int
    values: tuple[int, ...]

    def __post_init__(self):
        if any(v < -1 for v in self.values):
            raise NotRiseAndDropError("values must be >= -1")
        for i in range(len(self.values) - 1):
            if self.values[i + 1] > self.values[i] + 1:
                raise NotRiseAndDropError(
                    f"a[{i + 1}] = {self.values[i + 1]} > a[{i}] + 1 = {self.values[i] + 1}"
                )


@dataclass
class RadReport:
    rises_past: list[tuple[int, int]]  # (step m, time n): a_n = m, a_{n+1} = m+1
    repeated_drop: tuple[int, int] | None  # most repeated (r, s) with s <= r
    drop_times: list[int]
    rise_witnesses: dict[int, list[int]]  # step m -> times between consecutive repeats
    ivt_witnesses: list[tuple[int, int, int, int]]  # (k, l, m, witness time)


def rad_analyze(seq: TauSequence) -> RadReport:
    """Witness extraction for the rise-and-drop lemmas on a finite prefix:
    every step risen past, the most-repeated drop, and the rises between
    consecutive repeats for each step under that drop."""
    a = seq.values
    rises = [(a[i], i) for i in range(len(a) - 1) if a[i + 1] == a[i] + 1]

    drops: dict[tuple[int, int], list[int]] = {}
    for i in range(len(a) - 1):
        if a[i + 1] <= a[i]:
            drops.setdefault((a[i], a[i + 1]), []).append(i)
    repeated = None
    times: list[int] = []
    if drops:
        repeated, times = max(drops.items(), key=lambda kv: (len(kv[1]), kv[0]))

    witnesses: dict[int, list[int]] = {}
    if repeated is not None and len(times) >= 2:
        r, s = repeated
        for m in range(s, r):
            hits = []
            for t0, t1 in zip(times, times[1:]):
                for i in range(t0 + 1, t1):
                    if a[i] == m and a[i + 1] == m + 1:
                        hits.append(i)
                        break
            witnesses[m] = hits

    ivt = []
    for k in range(len(a)):
        for l in range(k, len(a)):
            if a[k] < a[l]:
                for m in range(a[k], a[l]):
                    w = _find_rise(a, k, l, m)
                    assert w is not None, "IVT violated on a rise-and-drop sequence"
                    ivt.append((k, l, m, w))
                break  # one (k, l) witness family per k keeps the report small
    return RadReport(
        rises_past=rises,
        repeated_drop=repeated,
        drop_times=times,
        rise_witnesses=witnesses,
        ivt_witnesses=ivt,
    )


def _find_rise(a, k: int, l: int, m: int) -> int | None:
    for i in range(k, l):
        if a[i] == m and a[i + 1] == m + 1:
            return i
    return None

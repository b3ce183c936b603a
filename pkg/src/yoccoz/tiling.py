"""The three-case tiling decomposition, residual-set membership, and the
well-surrounded annulus certificate.

Case tags carry evidence depth: non-recurrence is semi-decidable in general,
and "diverges" is reported finitarily as class-count growth; the artifact
never claims a literal limit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .angles import Angle, double
from .errors import NotFoundWithinBudgetError, YoccozError
from .lamination import Lamination, cycle_entry_step
from .puzzle import (
    CRITICAL,
    PieceRef,
    critical_piece,
    descendant_check,
    first_nondegenerate,
    fraternal_descendants,
    is_critical,
    piece_of,
    sub_pieces,
    tau_sequence,
)


@dataclass(frozen=True)
class CaseTag:
    kind: str  # TrivialCase1 | Recurrent | PresumedNonRecurrent
    evidence_depth: int
    detail: str = ""


def classify_case(p: int, q: int, theta_v: Angle, depth: int, lam: Lamination | None = None) -> CaseTag:
    """Case 1 iff theta_v's orbit meets the alpha cycle (exact for rationals);
    else Recurrent(d) iff the critical orbit re-enters every critical piece up
    to depth d; otherwise PresumedNonRecurrent(d)."""
    from .lamination import alpha_cycle, build

    entry = cycle_entry_step(theta_v, frozenset(alpha_cycle(p, q)))
    if entry is not None:
        return CaseTag("TrivialCase1", entry, f"2^{entry} theta_v lies in the alpha cycle")
    if lam is None:
        lam = build(p, q, theta_v, 1)
    h = lam.critical_leaf[0]
    orbit_angles = _critical_orbit_angles(lam)
    for d in range(1, depth + 1):
        if not any(lam.same_gap(d, psi, h) for psi in orbit_angles):
            return CaseTag("PresumedNonRecurrent", depth, f"no return into the level-{d} critical piece")
    return CaseTag("Recurrent", depth)


def _critical_orbit_angles(lam: Lamination) -> list[Angle]:
    """Angles of f^j(0), j >= 1, over one full eventual cycle (exact)."""
    out, seen = [], set()
    psi = lam.theta_v
    while psi not in seen:
        seen.add(psi)
        out.append(psi)
        psi = double(psi)
    return out


@dataclass
class Tiling:
    case: CaseTag
    L: int
    piece: PieceRef | None
    tiles: list[PieceRef]
    residual_params: tuple[int, int]  # (p, L)
    unresolved: int  # pieces past the enumeration cap still failing univalence
    max_tile_level: int
    certificate: "AnnulusCertificate | None" = None
    base_level: int | None = None  # N of the first nondegenerate annulus (case 3)
    fraternal: tuple[int, int] | None = None


def trivial_tiling(case: CaseTag, level: int) -> Tiling:
    """Case-1 decomposition: the whole piece is one univalent tile, R empty."""
    return Tiling(
        case=case, L=case.evidence_depth, piece=None, tiles=[],
        residual_params=(level, case.evidence_depth), unresolved=0, max_tile_level=level,
    )


def univalent_to_level(lam: Lamination, piece: PieceRef, L: int) -> bool:
    """f^{level-L} is univalent on the piece: no critical image before level L."""
    for j in range(max(piece.level - L, 0)):
        if lam.gap_is_critical(piece.level - j, double(piece.probe, j)):
            return False
    return True


def case2_level(lam: Lamination, budget: int) -> int:
    """Least N whose critical piece misses the whole critical orbit (exact for
    preperiodic angles: the orbit is finite)."""
    h = lam.critical_leaf[0]
    orbit_angles = _critical_orbit_angles(lam)
    for N in range(1, budget + 1):
        if not any(lam.same_gap(N, psi, h) for psi in orbit_angles):
            return N
    raise NotFoundWithinBudgetError(budget, "critical orbit meets every critical piece probed")


def tile(
    lam: Lamination,
    piece: PieceRef,
    max_tile_level: int,
    case: CaseTag | None = None,
    search_budget: int = 24,
) -> Tiling:
    """Greedy decomposition of a critical piece into maximal sub-pieces that
    map univalently to a fixed level L (cases 2 and 3; case 1 is trivial and
    handled before a lamination exists)."""
    if case is None:
        case = classify_case(lam.p, lam.q, lam.theta_v, depth=min(lam.depth, 8), lam=lam)
    if case.kind == "TrivialCase1":
        return trivial_tiling(case, piece.level)
    if not is_critical(lam, piece):
        raise ValueError("tile() wants the critical piece of its level in cases 2/3")

    if case.kind == "PresumedNonRecurrent":
        L = case2_level(lam, search_budget)
        if piece.level <= L:
            raise ValueError(f"piece level must exceed L={L}")
        tiles: list[PieceRef] = []
        outer = piece
        for k in range(piece.level + 1, max_tile_level + 1):
            subs = sub_pieces(lam, outer)
            crit = [s for s in subs if is_critical(lam, s)]
            if len(crit) != 1:
                raise YoccozError("critical piece must have exactly one critical child")
            tiles.extend(s for s in subs if s != crit[0])
            outer = crit[0]
        return Tiling(case, L, piece, tiles, (piece.level, L), unresolved=1,
                      max_tile_level=max_tile_level)

    # Recurrent: L = max(N1, N2) + 3 over fraternal descendants of the first
    # nondegenerate critical annulus.
    N = first_nondegenerate(lam, search_budget)
    n1, n2 = fraternal_descendants(lam, N, search_budget)
    L = max(n1, n2) + 3
    if piece.level <= L:
        raise ValueError(f"piece level must exceed L={L}")
    tiles = []
    unresolved = 0
    queue = [piece]
    while queue:
        cur = queue.pop()
        for sub in sub_pieces(lam, cur):
            if univalent_to_level(lam, sub, L):
                tiles.append(sub)
            elif sub.level < max_tile_level:
                queue.append(sub)
            else:
                unresolved += 1
    return Tiling(case, L, piece, tiles, (piece.level, L), unresolved, max_tile_level,
                  base_level=N, fraternal=(n1, n2))


# ------------------------------------------------------------- residual set


class ResidualStatus(enum.Enum):
    IN_R_TO_DEPTH = "inR-to-depth"
    NOT_R = "notR"
    ORBIT_HITS_ALPHA = "orbit-hits-alpha"


def residual_member(lam: Lamination, theta, p: int, L: int, depth: int) -> ResidualStatus:
    """R-membership to evidence depth: notR as soon as tau drops to L."""
    from .errors import OrbitHitsAlphaError

    if theta != CRITICAL:
        cur = theta
        for j in range(depth + 1):
            if lam.is_vertex(cur, depth - j):
                return ResidualStatus.ORBIT_HITS_ALPHA
            cur = double(cur)
        if not lam.same_gap(p, theta, lam.critical_leaf[0]):
            raise ValueError(f"{theta} is not in the level-{p} critical piece")
    taus = tau_sequence(lam, theta, depth, start=p)
    if any(t <= L for t in taus):
        return ResidualStatus.NOT_R
    return ResidualStatus.IN_R_TO_DEPTH


@dataclass
class AnnulusRecord:
    n: int
    tau_level: int
    cls: int


@dataclass
class CertificateEntry:
    theta: object  # Angle or CRITICAL
    annuli: list[AnnulusRecord]


@dataclass
class AnnulusCertificate:
    base_level: int
    fraternal: tuple[int, int]
    depth: int
    entries: list[CertificateEntry]
    disjointness_checked: bool = False


def surrounding_annuli(lam: Lamination, theta, N: int, depth: int, start: int | None = None) -> list[AnnulusRecord]:
    """Annuli A_n(theta) that are conformal copies of descendants of A_N(0):
    tau rises past (m, m+1) at (n, n+1) with A_m(0) a descendant of A_N(0)."""
    lo = N if start is None else start
    taus = tau_sequence(lam, theta, depth, start=lo)
    out = []
    desc_memo: dict[int, bool] = {}
    for i in range(len(taus) - 1):
        m, nxt = taus[i], taus[i + 1]
        if m >= 0 and nxt == m + 1:
            if m not in desc_memo:
                if m == N:
                    desc_memo[m] = True
                elif m > N:
                    desc_memo[m] = descendant_check(lam, m, N)[0]
                else:
                    desc_memo[m] = False
            if desc_memo[m]:
                out.append(AnnulusRecord(n=lo + i, tau_level=m, cls=m))
    return out


def build_certificate(lam: Lamination, N: int, fraternal: tuple[int, int], thetas, depth: int) -> AnnulusCertificate:
    entries = [CertificateEntry(t, surrounding_annuli(lam, t, N, depth)) for t in thetas]
    return AnnulusCertificate(base_level=N, fraternal=fraternal, depth=depth, entries=entries)


@dataclass
class CertificateReport:
    ok: bool
    violations: list[str]
    class_counts: dict[str, dict[int, int]]
    warning: str = ""


def _probe_of(lam: Lamination, theta) -> Angle:
    return lam.critical_leaf[0] if theta == CRITICAL else theta


def verify_certificate(lam: Lamination, cert: AnnulusCertificate) -> CertificateReport:
    """Check the structure the removability argument consumes: same-angle
    annuli strictly nested, cross-angle annuli disjoint (the intersection
    trichotomy), and no annulus closure holding a certified residual angle."""
    violations: list[str] = []
    counts: dict[str, dict[int, int]] = {}
    for e in cert.entries:
        levels = [a.n for a in e.annuli]
        if len(set(levels)) != len(levels):
            violations.append(f"duplicate annulus level for theta={e.theta}")
        cc: dict[int, int] = {}
        for a in e.annuli:
            cc[a.cls] = cc.get(a.cls, 0) + 1
        counts[str(e.theta)] = cc

    for i, e1 in enumerate(cert.entries):
        z = _probe_of(lam, e1.theta)
        for e2 in cert.entries[i + 1:]:
            w = _probe_of(lam, e2.theta)
            if z == w:
                continue
            for a1 in e1.annuli:
                for a2 in e2.annuli:
                    n, l = sorted((a1.n, a2.n))
                    zz, ww = (z, w) if a1.n <= a2.n else (w, z)
                    if not lam.same_gap(n, zz, ww):
                        continue  # disjoint outer pieces
                    if lam.same_gap(n + 1, zz, ww):
                        continue  # same annulus (n == l) or nested inside the inner piece
                    if n == l:
                        violations.append(
                            f"annuli A_{a1.n}({e1.theta}) and A_{a2.n}({e2.theta}) intersect"
                        )
                    else:
                        violations.append(
                            f"A_{l} of one angle sits inside A_{n} of the other "
                            f"({e1.theta} vs {e2.theta})"
                        )

    # Lemma burp: no listed annulus closure contains a certified residual angle.
    for e1 in cert.entries:
        for e2 in cert.entries:
            if e1 is e2:
                continue
            w = _probe_of(lam, e2.theta)
            for a in e1.annuli:
                z = _probe_of(lam, e1.theta)
                if z == w:
                    continue
                if lam.same_gap(a.n, z, w) and not lam.same_gap(a.n + 1, z, w):
                    violations.append(
                        f"closure of A_{a.n}({e1.theta}) contains certified angle {e2.theta}"
                    )

    cert.disjointness_checked = True
    warning = "" if any(e.annuli for e in cert.entries) else "empty certificate: vacuous pass"
    return CertificateReport(ok=not violations, violations=violations, class_counts=counts,
                             warning=warning)

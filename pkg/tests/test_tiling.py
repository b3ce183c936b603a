import random
from fractions import Fraction

import pytest

from yoccoz.angles import from_fraction, normalize
from yoccoz.lamination import arc_length, build
from yoccoz import puzzle as pz
from yoccoz import tiling as tl

from fixtures import (
    CASE1_THETA,
    CASE3_FRATERNAL,
    CASE3_L,
    CASE3_N,
    CASE3_P,
    CASE3_THETA,
    MISIUREWICZ_THETA,
    RESIDUAL_ANGLES,
    SATELLITE_THETA,
)


@pytest.fixture(scope="module")
def lam3():
    return build(1, 2, CASE3_THETA, 8)


@pytest.fixture(scope="module")
def tiling3(lam3):
    piece = pz.critical_piece(lam3, CASE3_P)
    return tl.tile(lam3, piece, max_tile_level=CASE3_P + 6)


def test_classify_cases():
    assert tl.classify_case(1, 2, CASE1_THETA, 5).kind == "TrivialCase1"
    assert tl.classify_case(1, 2, MISIUREWICZ_THETA, 10).kind == "PresumedNonRecurrent"
    assert tl.classify_case(1, 2, CASE3_THETA, 12).kind == "Recurrent"
    assert tl.classify_case(1, 2, SATELLITE_THETA, 12).kind == "Recurrent"
    tag = tl.classify_case(1, 2, CASE3_THETA, 12)
    assert tag.evidence_depth == 12


def test_trivial_tiling():
    case = tl.classify_case(1, 2, CASE1_THETA, 5)
    t = tl.trivial_tiling(case, level=8)
    assert t.case.kind == "TrivialCase1"
    assert t.tiles == [] and t.unresolved == 0


def test_case2_tiling():
    lam = build(1, 2, MISIUREWICZ_THETA, 8)
    L = tl.case2_level(lam, 16)
    piece = pz.critical_piece(lam, L + 1)
    t = tl.tile(lam, piece, max_tile_level=L + 5)
    assert t.case.kind == "PresumedNonRecurrent"
    assert t.L == L
    # tiles are the level-k pieces inside A_{k-1}(0), none critical, and none
    # maps over the critical piece before reaching level L
    for tile in t.tiles:
        assert not pz.is_critical(lam, tile)
        assert tl.univalent_to_level(lam, tile, L)
        assert lam.same_gap(tile.level - 1, tile.probe, lam.critical_leaf[0])


def test_case3_fixture_parameters(lam3, tiling3):
    assert tiling3.case.kind == "Recurrent"
    assert tiling3.base_level == CASE3_N
    assert tiling3.fraternal == CASE3_FRATERNAL
    assert tiling3.L == CASE3_L
    assert tiling3.tiles, "greedy descent found no tiles"


def test_case3_tiles_disjoint_and_maximal(lam3, tiling3):
    tiles = tiling3.tiles
    # pairwise disjoint: no nesting, no shared gap (exhaustive over pairs)
    for i, a in enumerate(tiles):
        for b in tiles[i + 1:]:
            lo, hi = (a, b) if a.level <= b.level else (b, a)
            assert not lam3.same_gap(lo.level, lo.probe, hi.probe)
    # maximality: each tile's parent fails univalence-to-L
    for tile in tiles:
        assert tl.univalent_to_level(lam3, tile, tiling3.L)
        parent = pz.piece_of(lam3, tile.level - 1, tile.probe)
        assert not tl.univalent_to_level(lam3, parent, tiling3.L)


def test_case3_boundary_subpieces_land_in_tiles(lam3, tiling3):
    """Lemma turd1: next to every boundary vertex of the piece there is a
    subpiece mapping univalently to level L, and it is consistent with the
    greedy tile set."""
    piece = tiling3.piece
    checked = 0
    for a, b in piece.boundary:
        for v, sign in ((a, 1), (b, -1)):
            eps = Fraction(sign, 3 * (1 << (CASE3_P + 10)) * 511)
            probe = from_fraction((v.frac + eps) % 1)
            assert lam3.same_gap(CASE3_P, probe, lam3.critical_leaf[0])
            found = None
            for k in range(CASE3_P + 1, CASE3_P + 9):
                sub = pz.piece_of(lam3, k, probe)
                if tl.univalent_to_level(lam3, sub, tiling3.L):
                    found = sub
                    break
            assert found is not None, f"no univalent subpiece next to {v}"
            if found.level <= tiling3.max_tile_level:
                assert any(
                    s.level <= found.level and lam3.same_gap(s.level, s.probe, probe)
                    for s in tiling3.tiles
                )
            checked += 1
    assert checked == 2 * len(piece.boundary)


def test_trichotomy_no_fourth_category(lam3, tiling3):
    random.seed(12)
    arcs = tiling3.piece.boundary
    outcomes = {"tiled": 0, "boundary": 0, "residual": 0}
    samples = 0
    while samples < 120:
        a, b = arcs[random.randrange(len(arcs))]
        t = from_fraction(
            (a.frac + arc_length((a, b)) * Fraction(random.randrange(1, 1 << 20), 1 << 20)) % 1
        )
        if lam3.is_vertex(t, 30):
            outcomes["boundary"] += 1
            samples += 1
            continue
        if not lam3.same_gap(CASE3_P, t, lam3.critical_leaf[0]):
            continue  # sampler noise: not in the piece
        samples += 1
        status = tl.residual_member(lam3, t, CASE3_P, tiling3.L, 30)
        if status is tl.ResidualStatus.ORBIT_HITS_ALPHA:
            outcomes["boundary"] += 1
        elif status is tl.ResidualStatus.IN_R_TO_DEPTH:
            outcomes["residual"] += 1
        else:
            # notR: the angle must sit inside the maximal tile of its drop level
            taus = pz.tau_sequence(lam3, t, 30, start=CASE3_P)
            n_star = next(CASE3_P + i for i, v in enumerate(taus) if v <= tiling3.L)
            tile = pz.piece_of(lam3, n_star, t)
            assert tl.univalent_to_level(lam3, tile, tiling3.L)
            parent = pz.piece_of(lam3, n_star - 1, t)
            assert not tl.univalent_to_level(lam3, parent, tiling3.L)
            if n_star <= tiling3.max_tile_level:
                assert any(
                    tile.level == s.level and lam3.same_gap(s.level, s.probe, t)
                    for s in tiling3.tiles
                )
            outcomes["tiled"] += 1
    assert sum(outcomes.values()) == samples
    assert outcomes["tiled"] > 0


def test_residual_members(lam3):
    assert (
        tl.residual_member(lam3, pz.CRITICAL, CASE3_P, CASE3_L, 45)
        is tl.ResidualStatus.IN_R_TO_DEPTH
    )
    for theta in RESIDUAL_ANGLES:
        assert (
            tl.residual_member(lam3, theta, CASE3_P, CASE3_L, 45)
            is tl.ResidualStatus.IN_R_TO_DEPTH
        )


def test_residual_not_in_any_tile(lam3, tiling3):
    for theta in RESIDUAL_ANGLES:
        for tile in tiling3.tiles:
            assert not lam3.same_gap(tile.level, tile.probe, theta)


def test_surrounding_annuli_monotone_and_growing(lam3):
    for theta in [pz.CRITICAL] + RESIDUAL_ANGLES:
        a20 = tl.surrounding_annuli(lam3, theta, CASE3_N, 20, start=CASE3_P)
        a40 = tl.surrounding_annuli(lam3, theta, CASE3_N, 40, start=CASE3_P)
        assert len(a40) > len(a20)
        assert [(a.n, a.cls) for a in a20] == [(a.n, a.cls) for a in a40[: len(a20)]]


def test_unbounded_tau_classes_sweep(lam3):
    """Finitary Lemma `one': an unbounded-tau residual angle's classes sweep
    every descendant level above its entry scale."""
    desc = [m for m, _ in pz.descendant_levels(lam3, CASE3_N, 50)]
    ann = tl.surrounding_annuli(lam3, RESIDUAL_ANGLES[0], CASE3_N, 55, start=CASE3_P)
    classes = {a.cls for a in ann}
    missed = [m for m in desc if m >= min(classes) and m + 1 <= 55 and m not in classes]
    assert not missed


def test_bounded_tau_class_repetition_synthetic(lam3, monkeypatch):
    """Finitary Lemma `two' on the class-repetition path, driven by a
    synthetic bounded tau sequence (no rational residual angle has bounded
    tau for a renormalizable fixture; see the decisions ledger)."""
    # tail alternates a drop (21 -> 20) with a rise past (20, 21); 20 is a
    # descendant level of A_2 for this fixture
    synthetic = [15, 16, 17, 18, 19, 20, 21]

    def fake_tau_sequence(lam, theta, n_max, start=0):
        reps = synthetic + [20, 21] * n_max
        return reps[: n_max - start + 1]

    monkeypatch.setattr(tl, "tau_sequence", fake_tau_sequence)
    ann = tl.surrounding_annuli(lam3, pz.CRITICAL, CASE3_N, 60, start=15)
    counts = {}
    for a in ann:
        counts[a.cls] = counts.get(a.cls, 0) + 1
    assert max(counts.values()) > 5  # one class repeats with growing count


def test_certificate_roundtrip(lam3):
    from yoccoz.puzzle import fraternal_descendants

    fr = fraternal_descendants(lam3, CASE3_N, 20)
    cert = tl.build_certificate(
        lam3, CASE3_N, fr, [pz.CRITICAL] + RESIDUAL_ANGLES, depth=45
    )
    rep = tl.verify_certificate(lam3, cert)
    assert rep.ok, rep.violations
    assert all(cnt for cnt in rep.class_counts.values())


def test_certificate_detects_corruption(lam3):
    from yoccoz.puzzle import fraternal_descendants

    fr = fraternal_descendants(lam3, CASE3_N, 20)
    cert = tl.build_certificate(lam3, CASE3_N, fr, [pz.CRITICAL, RESIDUAL_ANGLES[0]], depth=40)
    # duplicate annulus level inside one entry
    cert.entries[0].annuli.append(cert.entries[0].annuli[0])
    rep = tl.verify_certificate(lam3, cert)
    assert not rep.ok and any("duplicate" in v for v in rep.violations)

    # a foreign annulus whose ring overlaps A_20(0): pick w inside the level-20
    # critical piece but outside the level-21 one
    cert2 = tl.build_certificate(lam3, CASE3_N, fr, [pz.CRITICAL, RESIDUAL_ANGLES[0]], depth=40)
    h = lam3.critical_leaf[0]
    w = None
    for a, b in lam3.trace(20, h):
        for k in range(1, 40):
            cand = from_fraction((a.frac + arc_length((a, b)) * Fraction(k, 40)) % 1)
            if lam3.is_vertex(cand, 21):
                continue
            if lam3.same_gap(20, cand, h) and not lam3.same_gap(21, cand, h):
                w = cand
                break
        if w:
            break
    assert w is not None
    cert2.entries.append(
        tl.CertificateEntry(theta=w, annuli=[tl.AnnulusRecord(n=20, tau_level=20, cls=20)])
    )
    rep2 = tl.verify_certificate(lam3, cert2)
    assert not rep2.ok and any("intersect" in v or "inside" in v for v in rep2.violations)


def test_empty_certificate_vacuous_pass(lam3):
    cert = tl.AnnulusCertificate(base_level=CASE3_N, fraternal=CASE3_FRATERNAL, depth=10,
                                 entries=[tl.CertificateEntry(pz.CRITICAL, [])])
    rep = tl.verify_certificate(lam3, cert)
    assert rep.ok and rep.warning

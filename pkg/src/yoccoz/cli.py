"""The yoccoz command line: lamination, tau, descendants, tile, certify,
renorm, tune, trace, render, qc {phi,diamond,strip}, sobolev verify.

Exit codes: 0 success, 1 computation error (JSON error object on stdout),
2 usage error.  Reports embed the config, package version, and the evidence
depths/budgets they were computed with, and are byte-stable for a fixed
config and seed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from fractions import Fraction

from . import __version__
from .angles import Angle, normalize
from .config import Config, config_dict, load_config
from .errors import Case1DegenerateError, YoccozError


def _angle(text: str) -> Angle:
    if "/" in text:
        num, den = text.split("/", 1)
        return normalize(int(num), int(den))
    return normalize(int(text), 1)


def _complex(text: str) -> complex:
    re, im = (float(t) for t in text.split(","))
    return complex(re, im)


def _json_default(obj):
    from dataclasses import asdict, is_dataclass

    if isinstance(obj, Angle):
        return str(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if is_dataclass(obj) and not isinstance(obj, type):
        return asdict(obj)
    if hasattr(obj, "tolist"):
        return obj.tolist()
    raise TypeError(f"unserializable {type(obj)}")


def _emit(report: dict, out: str | None):
    text = json.dumps(report, indent=2, sort_keys=True, default=_json_default) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
        print(out)
    else:
        sys.stdout.write(text)


def _report(cfg: Config, **payload) -> dict:
    return {"version": __version__, "config": config_dict(cfg), **payload}


def _load_lam(path: str):
    from .lamination import build

    with open(path) as fh:
        data = json.load(fh)
    lam = build(data["p"], data["q"], _angle(data["theta_v"]), data["depth"])
    stored = [
        [tuple(str(v) for v in poly) for poly in layer] for layer in data["polygons"]
    ]
    rebuilt = [
        [tuple(str(v) for v in poly.vertices) for poly in layer] for layer in lam.polygons
    ]
    if stored != rebuilt:
        raise YoccozError(f"{path}: stored polygons disagree with the rebuild")
    return lam


def _lam_payload(lam) -> dict:
    return {
        "p": lam.p,
        "q": lam.q,
        "theta_v": str(lam.theta_v),
        "depth": lam.depth,
        "sector": [str(lam.sector[0]), str(lam.sector[1])],
        "critical_leaf": [str(lam.critical_leaf[0]), str(lam.critical_leaf[1])],
        "polygons": [
            [[str(v) for v in poly.vertices] for poly in layer] for layer in lam.polygons
        ],
    }


# ---------------------------------------------------------------- commands


def cmd_lamination(args, cfg):
    from .lamination import build

    lam = build(args.p, args.q, args.theta_v, args.depth)
    _emit(_report(cfg, **_lam_payload(lam)), args.out)


def cmd_tau(args, cfg):
    from .puzzle import CRITICAL, tau_sequence

    lam = _load_lam(args.lam)
    theta = CRITICAL if args.theta == "CRITICAL" else _angle(args.theta)
    values = tau_sequence(lam, theta, args.n)
    _emit(_report(cfg, theta=str(theta), n=args.n, tau=values), args.out)


def cmd_descendants(args, cfg):
    from .errors import NotFoundWithinBudgetError
    from .puzzle import descendant_levels, first_nondegenerate, fraternal_descendants

    lam = _load_lam(args.lam)
    level = args.level if args.level is not None else first_nondegenerate(lam, args.budget)
    levels = descendant_levels(lam, level, args.budget)
    payload = {"base_level": level, "budget": args.budget,
               "descendants": [{"level": m, "degree": d} for m, d in levels]}
    try:
        payload["fraternal"] = list(fraternal_descendants(lam, level, args.budget))
    except NotFoundWithinBudgetError as exc:
        payload["fraternal"] = None
        payload["fraternal_error"] = str(exc)
    _emit(_report(cfg, **payload), args.out)


def cmd_tile(args, cfg):
    from .lamination import build
    from .puzzle import critical_piece
    from .tiling import classify_case, tile, trivial_tiling

    if args.lam:
        lam = _load_lam(args.lam)
    else:
        if args.p is None or args.q is None or args.theta_v is None:
            raise ValueError("tile needs either --lam or all of --p/--q/--theta-v")
        try:
            lam = build(args.p, args.q, args.theta_v, cfg.lamination_depth)
        except Case1DegenerateError:
            case = classify_case(args.p, args.q, args.theta_v, depth=1)
            t = trivial_tiling(case, args.level)
            _emit(_report(cfg, case=case.kind, evidence=case.evidence_depth, L=t.L,
                          tiles=[{"level": args.level, "whole_piece": True}], residual=[]),
                  args.out)
            return
    case = classify_case(lam.p, lam.q, lam.theta_v, depth=min(lam.depth, 10), lam=lam)
    if case.kind == "TrivialCase1":
        t = trivial_tiling(case, args.level)
        _emit(_report(cfg, case=case.kind, evidence=case.evidence_depth, L=t.L,
                      tiles=[{"level": args.level, "whole_piece": True}], residual=[]), args.out)
        return
    piece = critical_piece(lam, args.level)
    t = tile(lam, piece, max_tile_level=args.max_tile_level or cfg.max_tile_level,
             case=case, search_budget=cfg.search_budget)
    _emit(_report(cfg, case=case.kind, evidence=case.evidence_depth, L=t.L,
                  base_level=t.base_level, fraternal=t.fraternal,
                  residual_params=list(t.residual_params), unresolved=t.unresolved,
                  max_tile_level=t.max_tile_level,
                  tiles=[{"level": s.level,
                          "boundary": [[str(a), str(b)] for a, b in s.boundary]}
                         for s in t.tiles]), args.out)


def cmd_certify(args, cfg):
    from .puzzle import CRITICAL, first_nondegenerate, fraternal_descendants
    from .tiling import build_certificate, verify_certificate

    lam = _load_lam(args.lam)
    N = first_nondegenerate(lam, cfg.search_budget)
    fr = fraternal_descendants(lam, N, cfg.search_budget)
    thetas = [CRITICAL]
    if args.samples > 1:
        thetas += _residual_samples(lam, max(fr) + 4, max(fr) + 3, args.depth,
                                    args.samples - 1, cfg.seed)
    cert = build_certificate(lam, N, fr, thetas, args.depth)
    rep = verify_certificate(lam, cert)
    _emit(_report(cfg, base_level=N, fraternal=list(fr), depth=args.depth,
                  entries=[{"theta": str(e.theta),
                            "annuli": [{"n": a.n, "tau_level": a.tau_level, "class": a.cls}
                                       for a in e.annuli]} for e in cert.entries],
                  ok=rep.ok, violations=rep.violations, class_counts=rep.class_counts,
                  warning=rep.warning), args.out)


def _residual_samples(lam, p, L, depth, count, seed):
    import random

    from .lamination import arc_length
    from .puzzle import critical_piece
    from .tiling import ResidualStatus, residual_member

    rng = random.Random(seed)
    arcs = critical_piece(lam, p).boundary
    out = []
    for _ in range(400 * count):
        if len(out) >= count:
            break
        a, b = arcs[rng.randrange(len(arcs))]
        from .angles import from_fraction

        t = from_fraction((a.frac + arc_length((a, b)) * Fraction(rng.randrange(1, 1 << 16), 1 << 16)) % 1)
        try:
            if residual_member(lam, t, p, L, depth) is ResidualStatus.IN_R_TO_DEPTH:
                out.append(t)
        except (YoccozError, ValueError):
            continue
    return out


def cmd_renorm(args, cfg):
    from .renorm import detect

    lam = _load_lam(args.lam)
    rep = detect(lam, args.budget or cfg.renorm_budget)
    _emit(_report(cfg, renormalizable=rep.renormalizable, period=rep.period,
                  witness_level=rep.witness_level, kind=rep.kind, budget=rep.budget), args.out)


def cmd_tune(args, cfg):
    from .renorm import BinaryExpansion, angle_to_expansion, tune

    theta = _angle(args.theta)
    exp = tune(args.a0, args.a1, angle_to_expansion(theta))
    _emit(_report(cfg, a0=args.a0, a1=args.a1, theta=str(theta),
                  expansion=str(exp), angle=str(exp.to_angle())), args.out)


def _trace_cfg(cfg: Config):
    from .geometry import TraceConfig

    return TraceConfig(start_radius=cfg.start_radius, steps_per_halving=cfg.steps_per_halving,
                       newton_cap=cfg.newton_cap)


def cmd_trace(args, cfg):
    from .geometry import trace_ray

    key = f"{args.c}|{args.theta}|{cfg.start_radius}|{cfg.steps_per_halving}|{cfg.pot_lo}"
    cache_dir = cfg.resolved_cache_dir()
    cache_file = os.path.join(cache_dir, hashlib.sha256(key.encode()).hexdigest()[:24] + ".json")
    if os.path.exists(cache_file):
        with open(cache_file) as fh:
            _emit(json.load(fh), args.out)
            return
    ray = trace_ray(_complex(args.c), _angle(args.theta), pot_lo=cfg.pot_lo, cfg=_trace_cfg(cfg))
    rep = _report(cfg, c=args.c, theta=args.theta,
                  points=[[z.real, z.imag, t] for z, t in ray.points],
                  residuals=ray.residuals)
    os.makedirs(cache_dir, exist_ok=True)
    with open(cache_file, "w") as fh:
        json.dump(rep, fh, sort_keys=True, default=_json_default)
    _emit(rep, args.out)


def cmd_render(args, cfg):
    from .render import render_puzzle

    lam = _load_lam(args.lam)
    svg = render_puzzle(_complex(args.c), lam, args.level, trace_cfg=_trace_cfg(cfg),
                        highlight_annulus=args.annulus)
    out = args.out or "yoccoz.svg"
    with open(out, "w") as fh:
        fh.write(svg)
    print(out)


def cmd_qc(args, cfg):
    from . import qcmodel as qc

    if args.what == "phi":
        atlas = qc.phi_atlas(args.depth)
        dil = sorted(set(round(d, 12) for d in atlas.dilatations()))
        _emit(_report(cfg, depth=args.depth, cells=len(atlas),
                      max_dilatation=atlas.max_dilatation(), distinct_dilatations=dil), args.out)
    elif args.what == "diamond":
        n = args.grid
        worst, where = 0.0, None
        for i in range(-n + 1, n):  # diamond tips excluded: zero-size fibers
            x = i / n
            m = int((1 - abs(x)) * n)
            for j in range(-m, m + 1):
                y = (1 - abs(x)) * (j / m) if m else 0.0
                k = qc.shear_dilatation(abs(qc.DiamondToStrip.shear(x, y)))
                if k > worst:
                    worst, where = k, (x, y)
        _emit(_report(cfg, grid=n, max_dilatation=worst, at=where, bound=3.0), args.out)
    else:  # strip
        model = qc.strip_model(args.depth)
        import math

        _emit(_report(cfg, depth=args.depth, slits=len(model.slits),
                      band=[min(s.im_lo for s in model.slits), max(s.im_hi for s in model.slits)],
                      band_target=[math.pi / 5, 4 * math.pi / 5], band_ok=model.band_ok,
                      closure_ratio=model.closure_ratio), args.out)


def cmd_sobolev(args, cfg):
    from . import qcmodel as qc
    from .sobolev import verify_slitbounds

    model = qc.strip_model(args.depth)
    rep = verify_slitbounds(model, trials=args.trials, seed=cfg.seed,
                            T=cfg.strip_window, ny=cfg.grid_ny)
    _emit(_report(cfg, depth=args.depth, trials=rep.trials, skipped=rep.skipped,
                  violations=rep.violations, b_proof_sq=rep.b_proof_sq,
                  b_proof_parts=rep.b_proof_parts, max_ratio_sq=rep.max_ratio,
                  max_squeeze=rep.max_squeeze), args.out)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="yoccoz", description=__doc__)
    ap.add_argument("--config", help="key=value config file")
    ap.add_argument("--seed", type=int, default=None)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lamination", help="build the alpha-cycle pullback lamination")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--theta-v", dest="theta_v", type=_angle, required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_lamination)

    p = sub.add_parser("tau", help="tau sequence of an angle (or CRITICAL)")
    p.add_argument("--lam", required=True)
    p.add_argument("--theta", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_tau)

    p = sub.add_parser("descendants", help="descendants of a critical annulus")
    p.add_argument("--lam", required=True)
    p.add_argument("--level", type=int)
    p.add_argument("--budget", type=int, default=20)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_descendants)

    p = sub.add_parser("tile", help="greedy tiling of a critical piece")
    p.add_argument("--lam", help="lamination JSON (or give --p/--q/--theta-v)")
    p.add_argument("--p", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--theta-v", dest="theta_v", type=_angle)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--max-tile-level", dest="max_tile_level", type=int)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_tile)

    p = sub.add_parser("certify", help="surrounding-annuli certificate")
    p.add_argument("--lam", required=True)
    p.add_argument("--samples", type=int, default=3)
    p.add_argument("--depth", type=int, default=40)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_certify)

    p = sub.add_parser("renorm", help="combinatorial renormalization detector")
    p.add_argument("--lam", required=True)
    p.add_argument("--budget", type=int)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_renorm)

    p = sub.add_parser("tune", help="tuning substitution on binary expansions")
    p.add_argument("--a0", required=True)
    p.add_argument("--a1", required=True)
    p.add_argument("--theta", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_tune)

    p = sub.add_parser("trace", help="trace one external ray")
    p.add_argument("--c", required=True, help="RE,IM")
    p.add_argument("--theta", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_trace)

    p = sub.add_parser("render", help="SVG of the puzzle at one level")
    p.add_argument("--lam", required=True)
    p.add_argument("--c", required=True)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--annulus", type=int)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_render)

    p = sub.add_parser("qc", help="quasiconformal model reports")
    p.add_argument("what", choices=["phi", "diamond", "strip"])
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--grid", type=int, default=512)
    p.add_argument("--report", dest="out")
    p.set_defaults(fn=cmd_qc)

    p = sub.add_parser("sobolev", help="slit-strip energy verification")
    p.add_argument("what", choices=["verify"])
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_sobolev)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        overrides = {"seed": args.seed} if args.seed is not None else {}
        cfg = load_config(args.config, overrides)
        args.fn(args, cfg)
        return 0
    except (YoccozError, ValueError, OSError) as exc:
        error = {"error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, Case1DegenerateError):
            error["step"] = exc.step
        sys.stdout.write(json.dumps(error, sort_keys=True) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Floating-point dynamical plane: Boettcher potential, external ray tracing
by Newton continuation, puzzle-piece curves, and discrete modulus estimation.

The paper carries no numerics; every tolerance here is an engineering choice
and is recorded in reports.  Convention: the round annulus r < |z| < R has
modulus log(R/r) / (2 pi), and the potential of z is log |phi^{-1}(z)|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .angles import Angle, double
from .errors import (
    InvalidRegionError,
    NotConnectedError,
    TraceFailedError,
    YoccozError,
)

TWO_PI = 2.0 * math.pi


@dataclass
class TraceConfig:
    start_radius: float = 100.0
    steps_per_halving: int = 4
    newton_cap: int = 60
    newton_tol: float = 1e-13
    max_subdivide: int = 6
    escape_radius: float = 1e3
    escape_iters: int = 2000


@dataclass
class RayPolyline:
    c: complex
    theta: Angle
    points: list[tuple[complex, float]]  # (z, potential), potentials decreasing
    residuals: list[float] = field(default_factory=list)

    def point_at(self, potential: float) -> complex:
        """Polyline point closest to the requested potential."""
        k = min(range(len(self.points)), key=lambda i: abs(self.points[i][1] - potential))
        return self.points[k][0]


def fixed_points(c: complex):
    """alpha/beta fixed points of z^2 + c with their multipliers.

    beta is the landing point of the zero ray: the root with Re(2z) >= 1
    (principal branch of the square root), alpha the other one.
    """
    if c == 0.25:
        raise YoccozError("c = 1/4: alpha = beta (parabolic degenerate)")
    s = complex(np.sqrt(complex(1 - 4 * c)))
    beta = (1 + s) / 2
    alpha = (1 - s) / 2
    if (2 * beta).real < 1:  # enforce the documented branch
        alpha, beta = beta, alpha

    def klass(m):
        am = abs(m)
        if abs(am - 1) < 1e-12:
            return "indifferent"
        return "repelling" if am > 1 else "attracting"

    return {
        "alpha": alpha,
        "beta": beta,
        "multiplier_alpha": 2 * alpha,
        "multiplier_beta": 2 * beta,
        "class_alpha": klass(2 * alpha),
        "class_beta": klass(2 * beta),
    }


def check_connected(c: complex, cfg: TraceConfig = TraceConfig()):
    z = 0j
    for _ in range(cfg.escape_iters):
        z = z * z + c
        if abs(z) > cfg.escape_radius:
            raise NotConnectedError(f"critical orbit escapes for c = {c}")


def _newton_target(c: complex, theta: Angle, t: float, z0: complex, cfg: TraceConfig):
    """Solve f^n(z) = exp(2^n (t + 2 pi i theta)) by Newton from z0.

    n is chosen so the target modulus sits in [R0, R0^2); the angle 2^n theta
    is reduced exactly before going to floats, which is what keeps deep rays
    honest.
    """
    logR = math.log(cfg.start_radius)
    n = max(0, math.ceil(math.log2(logR / t))) if t < logR else 0
    r = math.exp((2**n) * t)
    ang = double(theta, n)
    w = r * complex(math.cos(TWO_PI * float(ang.frac)), math.sin(TWO_PI * float(ang.frac)))
    z = z0
    eps = 2.3e-16
    for _ in range(cfg.newton_cap):
        val, der = z, complex(1.0)
        for _ in range(n):
            der = 2 * val * der
            val = val * val + c
        if not (np.isfinite(val.real) and np.isfinite(val.imag)):
            return None, math.inf
        res = val - w
        # achievable residual floor in doubles: rounding amplified by the
        # expansion |der| along the orbit and by the 2^n squarings of w
        floor = eps * (8 * abs(der) * max(abs(z), 1.0) + 8 * (2.0**n) * abs(w))
        if abs(res) <= max(cfg.newton_tol * max(abs(w), 1.0), floor):
            return z, abs(res)
        if der == 0:
            return None, math.inf
        z = z - res / der
        if not (np.isfinite(z.real) and np.isfinite(z.imag)):
            return None, math.inf
    return None, math.inf


def trace_ray(
    c: complex,
    theta: Angle,
    pot_hi: float | None = None,
    pot_lo: float = 1e-4,
    steps_per_halving: int | None = None,
    cfg: TraceConfig = TraceConfig(),
) -> RayPolyline:
    """Trace R(theta) down dyadic potential levels by Newton continuation."""
    check_connected(c, cfg)
    if pot_hi is None:
        pot_hi = math.log(cfg.start_radius)
    if not (pot_hi > pot_lo > 0):
        raise ValueError("need pot_hi > pot_lo > 0")
    steps = steps_per_halving or cfg.steps_per_halving

    # always seed the continuation far out, where Boettcher ~ identity; the
    # polyline keeps only the requested potential range
    t = max(pot_hi, math.log(cfg.start_radius))
    z = cmath_exp_ray(theta, t)
    z, res = _must(_newton_target(c, theta, t, z, cfg), t)
    points, residuals = [(z, t)], [res]
    shrink = 2.0 ** (-1.0 / steps)
    while t > pot_lo * (1 + 1e-12):
        t_next = max(t * shrink, pot_lo)
        if t > pot_hi * (1 + 1e-12):
            t_next = max(t_next, min(t, pot_hi))
        znew, res = _newton_target(c, theta, t_next, z, cfg)
        if znew is None:
            znew, res = _subdivide(c, theta, t, t_next, z, cfg, cfg.max_subdivide)
        z, t = znew, t_next
        points.append((z, t))
        residuals.append(res)
    kept = [(p, r) for (p, r) in zip(points, residuals) if p[1] <= pot_hi * (1 + 1e-12)]
    if not kept:
        kept = [(points[-1], residuals[-1])]
    return RayPolyline(c=c, theta=theta, points=[p for p, _ in kept],
                       residuals=[r for _, r in kept])


def _must(pair, t):
    z, res = pair
    if z is None:
        raise TraceFailedError(t)
    return z, res


def _subdivide(c, theta, t_from, t_to, z, cfg, budget):
    if budget == 0:
        raise TraceFailedError(t_to)
    t_mid = math.sqrt(t_from * t_to)
    zm, _ = _newton_target(c, theta, t_mid, z, cfg)
    if zm is None:
        zm, _ = _subdivide(c, theta, t_from, t_mid, z, cfg, budget - 1)
    zt, res = _newton_target(c, theta, t_to, zm, cfg)
    if zt is None:
        return _subdivide(c, theta, t_mid, t_to, zm, cfg, budget - 1)
    return zt, res


def cmath_exp_ray(theta: Angle, t: float) -> complex:
    """Boettcher-plane seed phi ~ identity far out."""
    r = math.exp(t)
    a = TWO_PI * float(theta.frac)
    return r * complex(math.cos(a), math.sin(a))


def ray_point(c: complex, theta: Angle, t: float, cfg: TraceConfig = TraceConfig()) -> complex:
    """The point of R(theta) at an exact potential t (traced from scratch)."""
    ray = trace_ray(c, theta, pot_lo=t, cfg=cfg)
    z, pot = ray.points[-1]
    if abs(pot - t) > 1e-12 * t:
        raise TraceFailedError(t, "did not land on the requested potential")
    return z


# ------------------------------------------------------------ piece curves


def equipotential_arc(c, a: Angle, b: Angle, potential: float, samples: int, cfg=TraceConfig()):
    """Points of the equipotential between angles a and b (ccw), inclusive."""
    from fractions import Fraction
    from .angles import from_fraction

    length = (b.frac - a.frac) % 1
    out = []
    for i in range(samples + 1):
        u = from_fraction((a.frac + length * Fraction(i, samples)) % 1)
        out.append(ray_point(c, u, potential, cfg))
    return out


def piece_curve(c, lam, piece, potential: float, ray_lo: float = 1e-3,
                samples_per_arc: int = 8, cfg=TraceConfig()) -> list[complex]:
    """Closed ccw polyline around a puzzle piece: equipotential arcs over the
    trace arcs joined by the bounding ray pairs (rays truncated at ray_lo and
    closed across the landing point)."""
    pts: list[complex] = []
    arcs = piece.boundary
    for i, (a, b) in enumerate(arcs):
        pts.extend(equipotential_arc(c, a, b, potential, samples_per_arc, cfg))
        ray_down = trace_ray(c, b, pot_hi=potential, pot_lo=ray_lo, cfg=cfg)
        pts.extend(z for z, _ in ray_down.points)
        nxt = arcs[(i + 1) % len(arcs)][0]
        ray_up = trace_ray(c, nxt, pot_hi=potential, pot_lo=ray_lo, cfg=cfg)
        pts.extend(z for z, _ in reversed(ray_up.points))
    pts.append(pts[0])
    return pts


def winding_number(curve: list[complex], z0: complex) -> int:
    total = 0.0
    for p, q in zip(curve, curve[1:]):
        di = math.atan2((q - z0).imag, (q - z0).real) - math.atan2((p - z0).imag, (p - z0).real)
        if di > math.pi:
            di -= TWO_PI
        elif di < -math.pi:
            di += TWO_PI
        total += di
    return round(total / TWO_PI)


def curve_diameter(curve: list[complex]) -> float:
    zs = np.array(curve, dtype=complex)
    d = np.abs(zs[:, None] - zs[None, :])
    return float(d.max())


def piece_diameters(c, lam, level: int, potential: float | None = None, cfg=TraceConfig()):
    """Max/median Euclidean diameter over all pieces of one level."""
    from .puzzle import enumerate_pieces

    pieces = enumerate_pieces(lam, level)
    if not pieces:
        raise YoccozError(f"no pieces at level {level}")
    pot = potential if potential is not None else min(2.0, 0.4 * math.log(cfg.start_radius)) * 2.0 ** (-level)
    diams = []
    for piece in pieces:
        curve = piece_curve(c, lam, piece, pot, cfg=cfg)
        diams.append(curve_diameter(curve))
    arr = np.array(diams)
    return {"level": level, "count": len(diams), "max": float(arr.max()),
            "median": float(np.median(arr)), "potential": pot}


# ---------------------------------------------------------------- modulus


@dataclass
class GridMask:
    """Node-based annular region: occupancy plus inner/outer electrode labels."""

    origin: tuple[float, float]
    h: float
    inside: np.ndarray  # bool (ny, nx)
    inner: np.ndarray
    outer: np.ndarray

    def validate(self):
        if self.inner.sum() == 0 or self.outer.sum() == 0:
            raise InvalidRegionError("empty electrode")
        if (self.inner & self.outer).any():
            raise InvalidRegionError("electrodes overlap")
        if not ((self.inner | self.outer) <= self.inside).all():
            raise InvalidRegionError("electrodes poke outside the region")
        free = self.inside & ~self.inner & ~self.outer
        if free.sum() == 0:
            raise InvalidRegionError("no conducting region between electrodes")
        inner, outer = self.inner, self.outer
        touch = (
            (inner[:, :-1] & outer[:, 1:]).any()
            or (inner[:, 1:] & outer[:, :-1]).any()
            or (inner[:-1, :] & outer[1:, :]).any()
            or (inner[1:, :] & outer[:-1, :]).any()
        )
        if touch:
            raise InvalidRegionError("electrodes touch: degenerate annulus")


def round_annulus_mask(r: float, R: float, h: float) -> GridMask:
    if not (0 < r < R):
        raise InvalidRegionError("need 0 < r < R")
    pad = 2 * h
    n = int(math.ceil(2 * (R + pad) / h)) + 1
    xs = np.linspace(-(R + pad), R + pad, n)
    X, Y = np.meshgrid(xs, xs)
    rad = np.hypot(X, Y)
    inside = np.ones_like(rad, dtype=bool)
    inner = rad <= r
    outer = rad >= R
    return GridMask(origin=(xs[0], xs[0]), h=h, inside=inside, inner=inner, outer=outer)


def modulus_estimate(mask: GridMask) -> float:
    """Discrete extremal length via the grid resistor network: solve the
    two-electrode Laplace problem and return 1 / energy (round annulus
    convention log(R/r)/2pi)."""
    mask.validate()
    u = _solve_network(mask)
    energy = _grid_energy(u, mask.inside)
    if energy <= 0:
        raise InvalidRegionError("zero energy: electrodes disconnected?")
    return 1.0 / energy


def _solve_network(mask: GridMask) -> np.ndarray:
    import scipy.sparse as sp
    import scipy.sparse.linalg as spla

    inside, inner, outer = mask.inside, mask.inner, mask.outer
    ny, nx = inside.shape
    unknown = inside & ~inner & ~outer
    idx = -np.ones((ny, nx), dtype=np.int64)
    ids = np.flatnonzero(unknown.ravel())
    idx.ravel()[ids] = np.arange(len(ids))
    n = len(ids)

    uy, ux = np.nonzero(unknown)
    rows: list = []
    cols: list = []
    vals: list = []
    rhs = np.zeros(n)
    diag = np.zeros(n)
    me_all = np.arange(n)
    for dy, dx in ((0, 1), (0, -1), (1, 0), (-1, 0)):
        yy, xx = uy + dy, ux + dx
        ok = (yy >= 0) & (yy < ny) & (xx >= 0) & (xx < nx)
        yin, xin, me = yy[ok], xx[ok], me_all[ok]
        nbr_inside = inside[yin, xin]
        diag[me[nbr_inside]] += 1.0
        sel = nbr_inside & unknown[yin, xin]
        rows.append(me[sel])
        cols.append(idx[yin[sel], xin[sel]])
        vals.append(np.full(int(sel.sum()), -1.0))
        sel_out = nbr_inside & outer[yin, xin]
        rhs[me[sel_out]] += 1.0
    rows.append(me_all)
    cols.append(me_all)
    vals.append(diag)
    A = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    )
    if n <= 250_000:
        u_flat = spla.spsolve(A.tocsc(), rhs)
    else:
        M = sp.diags(1.0 / A.diagonal())
        u_flat, info = spla.cg(A, rhs, rtol=1e-10, maxiter=10_000, M=M)
        if info != 0:
            raise YoccozError(f"conjugate gradient did not converge (info={info})")
    u = np.zeros((ny, nx))
    u[outer] = 1.0
    u[uy, ux] = u_flat
    return u


def _grid_energy(u: np.ndarray, inside: np.ndarray) -> float:
    ex = inside[:, :-1] & inside[:, 1:]
    ey = inside[:-1, :] & inside[1:, :]
    dx = (u[:, 1:] - u[:, :-1])[ex]
    dy = (u[1:, :] - u[:-1, :])[ey]
    return float((dx**2).sum() + (dy**2).sum())

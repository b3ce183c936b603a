"""Minimal layered SVG output: equipotentials, rays, piece fills, annuli."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass
class SvgCanvas:
    width: int = 800
    height: int = 800
    layers: dict = field(default_factory=dict)
    _bounds: list = field(default_factory=lambda: [math.inf, -math.inf, math.inf, -math.inf])

    def _track(self, pts):
        xs = [p.real if isinstance(p, complex) else p[0] for p in pts]
        ys = [p.imag if isinstance(p, complex) else p[1] for p in pts]
        b = self._bounds
        b[0], b[1] = min(b[0], *xs), max(b[1], *xs)
        b[2], b[3] = min(b[2], *ys), max(b[3], *ys)

    def _layer(self, name):
        return self.layers.setdefault(name, [])

    def polyline(self, pts, layer="default", stroke="#222", width=1.0, closed=False, fill="none"):
        if len(pts) < 2:
            return
        self._track(pts)
        self._layer(layer).append((list(pts), stroke, width, closed, fill))

    def polygon(self, pts, layer="default", fill="#88aadd55", stroke="none"):
        self._track(pts)
        self._layer(layer).append((list(pts), stroke, 0.5, True, fill))

    def to_svg(self) -> str:
        x0, x1, y0, y1 = self._bounds
        if not math.isfinite(x0):
            x0, x1, y0, y1 = -1, 1, -1, 1
        pad = 0.05 * max(x1 - x0, y1 - y0, 1e-9)
        x0, x1, y0, y1 = x0 - pad, x1 + pad, y0 - pad, y1 + pad
        sx = self.width / (x1 - x0)
        sy = self.height / (y1 - y0)
        s = min(sx, sy)

        def tx(p):
            px = p.real if isinstance(p, complex) else p[0]
            py = p.imag if isinstance(p, complex) else p[1]
            return ((px - x0) * s, self.height - (py - y0) * s)

        out = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
            f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">'
        ]
        for name, items in self.layers.items():
            out.append(f'<g id="{name}">')
            for pts, stroke, w, closed, fill in items:
                coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in map(tx, pts))
                tag = "polygon" if closed else "polyline"
                out.append(
                    f'<{tag} points="{coords}" fill="{fill}" stroke="{stroke}" '
                    f'stroke-width="{w}"/>'
                )
            out.append("</g>")
        out.append("</svg>")
        return "\n".join(out)


def render_puzzle(c, lam, level: int, potential: float | None = None,
                  highlight_annulus: int | None = None, trace_cfg=None) -> str:
    """Layered figure of the level-n puzzle: equipotential, alpha rays, piece
    fills, and optionally one critical annulus highlighted."""
    from .geometry import TraceConfig, piece_curve, trace_ray
    from .puzzle import critical_piece, enumerate_pieces

    cfg = trace_cfg or TraceConfig()
    pot = potential if potential is not None else math.log(cfg.start_radius) * 2.0 ** (-level)
    canvas = SvgCanvas()

    from .angles import normalize
    ring = []
    n_samp = 256
    for k in range(n_samp + 1):
        th = normalize(k % n_samp, n_samp)
        ring.append(trace_ray(c, th, pot_hi=pot * 1.0000001, pot_lo=pot, cfg=cfg).points[-1][0])
    canvas.polyline(ring, layer="equipotentials", stroke="#999", width=0.8)

    for theta in lam.cycle:
        ray = trace_ray(c, theta, pot_hi=pot, pot_lo=1e-3, cfg=cfg)
        canvas.polyline([z for z, _ in ray.points], layer="rays", stroke="#c33", width=1.0)

    palette = ["#88aadd55", "#aad88a55", "#d8aa8855", "#d8d08855", "#b08ad855"]
    for i, piece in enumerate(enumerate_pieces(lam, level)):
        curve = piece_curve(c, lam, piece, pot, cfg=cfg)
        canvas.polygon(curve, layer="pieces", fill=palette[i % len(palette)])

    if highlight_annulus is not None:
        for lev, color in ((highlight_annulus, "#3333cc"), (highlight_annulus + 1, "#cc33cc")):
            curve = piece_curve(c, lam, critical_piece(lam, lev), pot, cfg=cfg)
            canvas.polyline(curve, layer="annuli", stroke=color, width=1.5)
    return canvas.to_svg()


def render_model_squares(depth: int = 3) -> str:
    """S with its notch squares next to S' with its slits."""
    from .qcmodel import build_notched, build_slitted

    canvas = SvgCanvas()
    canvas.polyline([(0, -0.5), (1, -0.5), (1, 0.5), (0, 0.5)], layer="notched",
                    stroke="#222", width=1.2, closed=True)
    for sq in build_notched(depth).all_squares():
        pts = [(float(sq.x0), float(sq.y0)), (float(sq.x1), float(sq.y0)),
               (float(sq.x1), float(sq.y1)), (float(sq.x0), float(sq.y1))]
        canvas.polygon(pts, layer="notched", fill="#88aadd77")
    off = 1.5
    canvas.polyline([(off - 1 + 2, -1), (off + 1 + 2, -1), (off + 1 + 2, 1), (off - 1 + 2, 1)],
                    layer="slitted", stroke="#222", width=1.2, closed=True)
    for sl in build_slitted(depth).slits:
        x = float(sl.alpha) + off + 2
        h = float(sl.half_height)
        canvas.polyline([(x, -h), (x, h)], layer="slitted", stroke="#c33", width=1.0)
    return canvas.to_svg()

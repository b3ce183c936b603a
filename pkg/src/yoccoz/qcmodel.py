"""The explicit quasiconformal model: recursively notched square (S, N),
recursively slitted square (S', V'), the PL map phi between their complements,
the square extension psi, the square -> diamond -> strip maps, and the slice
embedding into the dynamical plane.

Both figures describing the original triangulations are placeholders in the
source; the 9-triangle block scheme and the averaged boundary extension here
are re-derivations that satisfy the stated contracts (continuity, boundary
values, depth-independent dilatation), which is what the tests pin down.

Geometry conventions: S = (0,1) x (-1/2,1/2), S' = (-1,1)^2, strip = 0 < Im < pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ModelViolationError, OutsideDomainError
from .plgeom import AffineMap, Cell, PLAtlas, conjugate_cell, make_cell, similarity, vec

HALF = Fraction(1, 2)
THREE_FIFTHS = Fraction(3, 5)


# ------------------------------------------------------- canonical squares


@dataclass(frozen=True)
class Square:
    x0: Fraction
    y0: Fraction
    side: Fraction

    @property
    def x1(self):
        return self.x0 + self.side

    @property
    def y1(self):
        return self.y0 + self.side


@dataclass
class NotchedSquare:
    """S with the middle-ninth square and its h_l/h_r copies removed.

    squares[k] lists the 2^k word-length-k copies of the central square; the
    real slice of what remains is the middle-thirds construction.
    """

    depth: int
    squares: list[list[Square]]

    def all_squares(self):
        return [s for layer in self.squares for s in layer]

    def real_slice_intervals(self) -> list[tuple[Fraction, Fraction]]:
        """Components of [0,1] minus the open notch intervals."""
        cuts = sorted((s.x0, s.x1) for s in self.all_squares())
        out = []
        x = Fraction(0)
        for a, b in cuts:
            if a > x:
                out.append((x, a))
            x = max(x, b)
        if x < 1:
            out.append((x, Fraction(1)))
        return out


def _h_l(p):
    return (p[0] / 3, p[1] / 3)


def _h_r(p):
    return ((p[0] - 1) / 3 + 1, p[1] / 3)


def build_notched(depth: int) -> NotchedSquare:
    """Exact rational geometry of the notch squares to word length ``depth``."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    central = Square(Fraction(1, 3), Fraction(-1, 6), Fraction(1, 3))
    layers = [[central]]
    for _ in range(depth):
        nxt = []
        for sq in layers[-1]:
            for h in (_h_l, _h_r):
                x0, y0 = h((sq.x0, sq.y0))
                nxt.append(Square(x0, y0, sq.side / 3))
        layers.append(nxt)
    return NotchedSquare(depth=depth, squares=layers)


@dataclass(frozen=True)
class Slit:
    alpha: Fraction  # dyadic abscissa in (-1, 1)
    level: int  # minimal k with alpha = p / 2^k
    half_height: Fraction  # (3/5) 2^-level

    @property
    def top(self):
        return self.half_height

    def angle_bounds_ok(self) -> bool:
        """|y/(1 +- x)| <= 3/5 at the slit endpoints, exactly."""
        y = self.half_height
        return y <= THREE_FIFTHS * (1 + self.alpha) and y <= THREE_FIFTHS * (1 - self.alpha)


@dataclass
class SlittedSquare:
    depth: int
    slits: list[Slit]


def build_slitted(depth: int) -> SlittedSquare:
    """All slits of dyadic level <= depth: x = p/2^k, |y| <= (3/5) 2^-k."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    slits = [Slit(Fraction(0), 0, THREE_FIFTHS)]
    for k in range(1, depth + 1):
        for p in range(-(1 << k) + 1, 1 << k, 2):
            slits.append(Slit(Fraction(p, 1 << k), k, THREE_FIFTHS / (1 << k)))
    return SlittedSquare(depth=depth, slits=slits)


# ------------------------------------------------------------- block map


def block_map(width, height, a_lo, a_hi, t_width, t_height, slit_x, slit_len) -> PLAtlas:
    """PL homeomorphism of a marked rectangle onto a slitted rectangle.

    Source: [0,width]x[0,height] with the marked interval A=[a_lo,a_hi] on the
    bottom side; target: [0,t_width]x[0,t_height] with a vertical slit from
    (slit_x, 0) to (slit_x, slit_len).  The 9-triangle scheme opens A onto the
    two sides of the slit: A's midpoint goes to the slit tip and one interior
    apex sits on each side of the cut, so every target triangle stays on a
    single side.  Similar inputs give similarity-conjugate cells, hence one
    dilatation multiset K_block.
    """
    w, ht = Fraction(width), Fraction(height)
    a1, a2 = Fraction(a_lo), Fraction(a_hi)
    tw, th = Fraction(t_width), Fraction(t_height)
    sx, sl = Fraction(slit_x), Fraction(slit_len)
    if not (0 < a1 < a2 < w and ht > 0):
        raise ValueError("invalid-geometry: marked interval not properly inside the bottom side")
    if not (0 < sx < tw and 0 < sl < th / 2):
        raise ValueError("invalid-geometry: slit must end strictly below the apex height")
    m = (a1 + a2) / 2
    C1, P1, M, P2, C2, C3, C4 = (0, 0), (a1, 0), (m, 0), (a2, 0), (w, 0), (w, ht), (0, ht)
    W1, W2 = (m / 2, ht / 2), ((m + w) / 2, ht / 2)
    C1t, S0, T, C2t, C3t, C4t = (0, 0), (sx, 0), (sx, sl), (tw, 0), (tw, th), (0, th)
    W1t, W2t = (sx / 2, th / 2), ((sx + tw) / 2, th / 2)
    pairs = [
        ((C1, P1, W1), (C1t, S0, W1t), "left-bottom"),
        ((P1, M, W1), (S0, T, W1t), "slit-left"),
        ((M, W2, W1), (T, W2t, W1t), "mid"),
        ((W2, C4, W1), (W2t, C4t, W1t), "upper-mid"),
        ((C4, C1, W1), (C4t, C1t, W1t), "left-side"),
        ((M, P2, W2), (T, S0, W2t), "slit-right"),
        ((P2, C2, W2), (S0, C2t, W2t), "right-bottom"),
        ((C2, C3, W2), (C2t, C3t, W2t), "right-side"),
        ((C3, C4, W2), (C3t, C4t, W2t), "top"),
    ]
    try:
        cells = [make_cell(s, d, tag) for s, d, tag in pairs]
    except ValueError as exc:
        raise ValueError(f"invalid-geometry: {exc}") from exc
    return PLAtlas(cells, domain_tag="block")


def _canonical_block_cells() -> list[Cell]:
    """The block instance underlying the phi decomposition: marked 3:1:1
    rectangle onto the 20:5:1 slitted one (both centered)."""
    return block_map(3, 1, 1, 2, 20, 5, 10, 1).cells


BLOCK_DILATATION = max(c.map.dilatation() for c in _canonical_block_cells())


# ------------------------------------------------------------- phi atlas


def _cantor_left(i: int, n: int) -> Fraction:
    """Left endpoint of the i-th stage-n middle-thirds interval."""
    x = Fraction(0)
    for j in range(1, n + 1):
        if (i >> (n - j)) & 1:
            x += Fraction(2, 3**j)
    return x


def phi_atlas(depth: int) -> PLAtlas:
    """phi: S - closure(N) -> S' - closure(V') assembled from similarity
    conjugates of the canonical block, one per node of the two binary trees
    (strip levels 0..depth, upper and lower)."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    base = _canonical_block_cells()
    cells: list[Cell] = []
    for n in range(depth + 1):
        # source block: width 3^-n, height (1/2)3^-n - (1/2)3^-(n+1) = 3^-(n+1)
        src_scale = Fraction(1, 3 ** (n + 1))
        tgt_scale = Fraction(1, 10 * 2**n)  # canonical [0,20]x[0,5] -> w=2*2^-n, h=2^-(n+1)
        for i in range(1 << n):
            sx = _cantor_left(i, n)
            tx = Fraction(2 * i, 1 << n) - 1
            for lower in (False, True):
                sy = Fraction(1, 2 * 3 ** (n + 1))
                ty = Fraction(1, 1 << (n + 1))
                smap = similarity(src_scale, sx, -sy if lower else sy, flip_y=lower)
                tmap = similarity(tgt_scale, tx, -ty if lower else ty, flip_y=lower)
                tag = f"{'low' if lower else 'up'}/n{n}/i{i}"
                cells.extend(conjugate_cell(c, smap, tmap, tag=f"{tag}/{c.tag}") for c in base)
    return PLAtlas(cells, domain_tag="phi")


def cantor_function(x: Fraction) -> Fraction:
    """The devil's staircase on exact rationals (ternary -> binary digits)."""
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise ValueError("x must lie in [0,1]")
    out = Fraction(0)
    scale = Fraction(1, 2)
    for _ in range(512):
        if x == 0:
            break
        d = int(3 * x)
        if d == 1:
            out += scale  # inside a plateau
            break
        out += scale * (d // 2)
        x = 3 * x - d
        scale /= 2
    return out


# ----------------------------------------------------------- psi extension


def v32(y: Fraction | float) -> float:
    """The 3-adic -> 2-adic vertical boundary homeomorphism [-1/2,1/2] -> [-1,1]:
    row [3^-(n+1)/2, 3^-n/2] maps linearly onto [2^-(n+1), 2^-n] (odd in y).
    These are phi's values on the vertical sides of S."""
    y = float(y)
    if y == 0:
        return 0.0
    s = math.copysign(1.0, y)
    a = abs(2 * y)  # in (0, 1]
    n = 0
    while a < 3.0 ** -(n + 1) and n < 600:
        n += 1
    lo, hi = 3.0 ** -(n + 1), 3.0**-n
    frac = (a - lo) / (hi - lo)
    return s * (2.0 ** -(n + 1)) * (1 + frac)


_GAUSS = [
    (0.5 * (1 - x), 0.5 * w)
    for x, w in zip(
        [-0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.755404408355003,
         -0.6178762444026438, -0.45801677765722737, -0.2816035507792589, -0.09501250983763744,
         0.09501250983763744, 0.2816035507792589, 0.45801677765722737, 0.6178762444026438,
         0.755404408355003, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499],
        [0.027152459411754094, 0.06225352393864789, 0.09515851168249278, 0.12462897125553387,
         0.14959598881657673, 0.16915651939500254, 0.18260341504492358, 0.18945061045506849,
         0.18945061045506849, 0.18260341504492358, 0.16915651939500254, 0.14959598881657673,
         0.12462897125553387, 0.09515851168249278, 0.06225352393864789, 0.027152459411754094],
    )
]


def _ba_average(curve, x: float, spread: float):
    """Symmetric Beurling-Ahlfors-style average of a side curve: the mean of
    curve(x +- u * spread) over u in [0,1].  Odd endpoint reflection makes the
    average exact (= the corner value) at x = 0, 1 for every spread."""
    if spread <= 1e-15:
        return curve(x)
    fx = fy = 0.0
    for u, w in _GAUSS:
        for s in (+1.0, -1.0):
            px, py = _reflect_pt(curve, x + s * u * spread)
            fx += w * px
            fy += w * py
    return fx / 2, fy / 2


def _reflect_pt(curve, x: float):
    if 0 <= x <= 1:
        return curve(x)
    if x < 0:
        cx, cy = curve(0.0)
        px, py = _reflect_pt(curve, -x)
        return 2 * cx - px, 2 * cy - py
    cx, cy = curve(1.0)
    px, py = _reflect_pt(curve, 2 - x)
    return 2 * cx - px, 2 * cy - py


def _scalar_ba_average(q, x: float, spread: float) -> float:
    """Symmetric average of a scalar increasing map q: [0,1] -> [0,1] at the
    given spread, with odd endpoint reflection (so the value is exactly q(0),
    q(1) at the ends, and the average never leaves [0,1])."""
    if spread <= 1e-15:
        return q(min(max(x, 0.0), 1.0))

    def qr(s):
        if s < 0:
            return -qr(-s)
        if s > 1:
            return 2.0 - qr(2.0 - s)
        return q(s)

    acc = 0.0
    for u, w in _GAUSS:
        acc += w * (qr(x + u * spread) + qr(x - u * spread))
    return acc / 2


def _v32_reflected(y: float) -> float:
    """v32 extended by odd reflection in the endpoints +-1/2 (one window)."""
    if y > 0.5:
        return 2.0 - _v32_reflected(1.0 - y)
    if y < -0.5:
        return -2.0 - _v32_reflected(-1.0 - y)
    return v32(y)


def _ba_pair(y: float, t: float):
    """Beurling-Ahlfors average pair of the side map v32 at height t:
    u = mean of (f(y+st)+f(y-st))/2, v = mean of (f(y+st)-f(y-st))/2.

    Odd reflection makes u(+-1/2, t) = +-1 exactly (the integrand cancels
    pointwise), so the extension hits the horizontal edges of S' on the nose.
    """
    if t <= 1e-14:
        return _v32_reflected(y), 0.0
    u = v = 0.0
    for s, w in _GAUSS:
        fp = _v32_reflected(y + s * t)
        fm = _v32_reflected(y - s * t)
        u += w * (fp + fm)
        v += w * (fp - fm)
    return u / 2, v / 2


class PsiExtension:
    """Homeomorphism S -> S' agreeing with phi on the boundary.

    Near each vertical side the map is the Beurling-Ahlfors extension pair of
    the side's 3-adic/2-adic boundary map (quasiconformal with a bound set by
    the quasisymmetry constant of v32); across the middle band the two side
    extensions are joined linearly, and a final PL horizontal shear restores
    the linear parametrization of the top and bottom edges.  Dilatation is
    therefore uniformly bounded, unlike a naive blend of the side maps.
    """

    BAND = 0.25

    def __init__(self):
        b = self.BAND
        # exact top-edge image of the pre-correction map: v32 is linear with
        # slope 3/2 on the outermost rows, so v(1/2, x) = (3/4) x there
        mu_knots = [(-1.0, -1.0), (-1.0 + 0.75 * b, -0.5), (1.0 - 0.75 * b, 0.5), (1.0, 1.0)]
        self._mu_knots = mu_knots

    def _chi_top(self, w: float) -> float:
        ks = self._mu_knots
        for (a, fa), (bb, fb) in zip(ks, ks[1:]):
            if w <= bb or (bb, fb) == ks[-1]:
                return fa + (fb - fa) * (w - a) / (bb - a)
        return w

    def _raw(self, x: float, y: float):
        b = self.BAND
        if x <= b:
            u, v = _ba_pair(y, x)
            return (-1.0 + v, u)
        if x >= 1 - b:
            u, v = _ba_pair(y, 1 - x)
            return (1.0 - v, u)
        ul, vl = _ba_pair(y, b)
        ur, vr = _ba_pair(y, b)
        s = (x - b) / (1 - 2 * b)
        return ((1 - s) * (-1.0 + vl) + s * (1.0 - vr), (1 - s) * ul + s * ur)

    def __call__(self, x, y):
        X, Y = self._raw(float(x), float(y))
        lam = max(0.0, 2.0 * abs(Y) - 1.0)
        return (X + lam * (self._chi_top(X) - X), Y)

    def dilatation_at(self, x, y, h: float = 1e-6) -> float | None:
        """Pointwise dilatation by central differences; returns None on the
        measure-zero seams (band joints, chi kink) where the difference
        quotient would mix two smooth pieces."""
        x, y = float(x), float(y)
        b = self.BAND
        h = min(h, x / 2 + 1e-15, (1 - x) / 2 + 1e-15, (y + 0.5) / 2 + 1e-15, (0.5 - y) / 2 + 1e-15)
        if h <= 0:
            return None
        if abs(x - b) < 2 * h or abs(x - (1 - b)) < 2 * h:
            return None
        Y = self(x, y)[1]
        if abs(abs(Y) - 0.5) < 16 * h:
            return None
        fxp, fxm = self(x + h, y), self(x - h, y)
        fyp, fym = self(x, y + h), self(x, y - h)
        a = (fxp[0] - fxm[0]) / (2 * h)
        c = (fxp[1] - fxm[1]) / (2 * h)
        bb = (fyp[0] - fym[0]) / (2 * h)
        d = (fyp[1] - fym[1]) / (2 * h)
        det = a * d - bb * c
        if det <= 0:
            return math.inf
        t = a * a + bb * bb + c * c + d * d
        return (t + math.sqrt(max(t * t - 4 * det * det, 0.0))) / (2 * det)


def psi_extension() -> PsiExtension:
    return PsiExtension()


def psi_dilatation_report(refine: int = 1) -> dict:
    """Empirical max dilatation of psi over a deterministic grid.

    The construction is asymptotically self-similar under (x, y) -> (x/3, y/3),
    so a log-spaced grid in x near both vertical sides sees every scale; the
    reported max is labeled empirical, per the figure-free re-derivation.
    """
    psi = PsiExtension()
    nx, ny = 18 * refine, 25 * refine
    xs = [10 ** (-4 + 3.7 * i / (nx - 1)) * 0.24 for i in range(nx)]
    xs += [1 - x for x in xs] + [0.5]
    worst = 0.0
    samples = 0
    for x in xs:
        for j in range(ny):
            y = -0.495 + 0.99 * j / (ny - 1)
            d = psi.dilatation_at(x, y)
            if d is not None:
                worst = max(worst, d)
                samples += 1
    return {"max_dilatation": worst, "samples": samples, "refine": refine,
            "note": "empirical maximum over a deterministic sample grid"}


# --------------------------------------------------- diamond and the strip


def square_to_diamond() -> PLAtlas:
    """PL map S' -> the inscribed diamond Q, the identity on the convex hull
    of V' = {|y| <= (3/5)(1 - |x|)} (Fact angle pins that hull down)."""
    A, Bv, C, D = (1, 0), (0, 1), (-1, 0), (0, -1)  # diamond vertices
    Ht, Hb = (0, THREE_FIFTHS), (0, -THREE_FIFTHS)  # hull apexes
    cells = [
        make_cell(((-1, 0), (1, 0), Ht), ((-1, 0), (1, 0), Ht), "hull-upper"),
        make_cell(((1, 0), (-1, 0), Hb), ((1, 0), (-1, 0), Hb), "hull-lower"),
    ]
    up = [
        (((1, 0), (1, 1), Ht), ((1, 0), (HALF, HALF), Ht)),
        (((1, 1), (0, 1), Ht), ((HALF, HALF), (0, 1), Ht)),
        (((0, 1), (-1, 1), Ht), ((0, 1), (-HALF, HALF), Ht)),
        (((-1, 1), (-1, 0), Ht), ((-HALF, HALF), (-1, 0), Ht)),
    ]
    for k, (s, d) in enumerate(up):
        cells.append(make_cell(s, d, f"up{k}"))
        flip = lambda tri: tuple((p[0], -Fraction(p[1])) for p in tri)
        s2, d2 = flip(s), flip(d)
        cells.append(make_cell((s2[0], s2[2], s2[1]), (d2[0], d2[2], d2[1]), f"low{k}"))
    return PLAtlas(cells, domain_tag="square-to-diamond")


class DiamondToStrip:
    """rho-: (x,y) -> (log(1+x), y/(1+x)) on the left half of the diamond and
    rho+: (x,y) -> (-log(1-x), y/(1-x)) on the right, glued along the y-axis.
    Takes vertical segments to vertical segments; dilatation is that of the
    unit shear with parameter s = y/(1 -+ x), so it peaks at (3+sqrt(5))/2 on
    the diamond edges and never exceeds 3."""

    def __call__(self, x, y):
        x, y = float(x), float(y)
        if abs(y) > 1 - abs(x) + 1e-12:
            raise OutsideDomainError(f"({x},{y}) outside the diamond")
        if x <= 0:
            return (math.log1p(x), y / (1 + x))
        return (-math.log1p(-x), y / (1 - x))

    @staticmethod
    def shear(x, y) -> float:
        return y / (1 + x) if x <= 0 else y / (1 - x)

    def dilatation_at(self, x, y) -> float:
        s = abs(self.shear(float(x), float(y)))
        t = 2 + s * s
        return (t + math.sqrt(t * t - 4)) / 2


def shear_dilatation(s: float) -> float:
    t = 2 + s * s
    return (t + math.sqrt(t * t - 4)) / 2


@dataclass
class StripSlit:
    u: float  # horizontal position in the strip 0 < Im < pi
    im_lo: float
    im_hi: float
    level: int
    ratio: Fraction  # exact |y/(1 -+ x)| at the endpoints (before pi-scaling)


@dataclass
class StripModel:
    depth: int
    slits: list[StripSlit]
    band_ok: bool
    closure_ratio: float  # max slit height / distance to older slit (midline echo)


def strip_model(depth: int) -> StripModel:
    """Compose phi, the diamond map, and rho+- with the final similarity onto
    {0 < Im z < pi}; inventory the slit images and check the pi/5..4pi/5 band.

    Slits sit inside the hull where the diamond map is the identity, and rho+-
    keeps them vertical; the image of x = alpha, |y| <= h is the segment at
    u = -+log(1 -+ alpha) with |Im - pi/2| <= (pi/2) h/(1 -+ alpha).  The band
    bound is exactly Fact angle's 3/5, checked in exact arithmetic.
    """
    slitted = build_slitted(depth)
    out = []
    band_ok = True
    for s in slitted.slits:
        denom = (1 + s.alpha) if s.alpha <= 0 else (1 - s.alpha)
        ratio = s.half_height / denom
        if ratio > THREE_FIFTHS:
            band_ok = False
        u = math.log1p(float(s.alpha)) if s.alpha <= 0 else -math.log1p(-float(s.alpha))
        half = math.pi / 2 * float(ratio)
        out.append(
            StripSlit(u=u, im_lo=math.pi / 2 - half, im_hi=math.pi / 2 + half,
                      level=s.level, ratio=ratio)
        )
    if not band_ok:
        raise ModelViolationError("slit image escapes the pi/5..4pi/5 band")

    worst = 0.0
    for s in out:
        if s.level == 0:
            continue
        gaps = [abs(s.u - t.u) for t in out if t.level < s.level]
        g = min(gaps)
        if g > 0:
            worst = max(worst, (s.im_hi - math.pi / 2) / g)
    return StripModel(depth=depth, slits=out, band_ok=band_ok, closure_ratio=worst)


# ---------------------------------------------------------- slice embedding


def _q_knots(slc, depth: int, coord: int):
    """PL knots of q1 (coord 0) or q2 (coord 1): the Cantor-set values of the
    slice contractions, word for word, joined linearly across the gaps."""
    from .lamination import cantor_coordinates, _corner_pairs, _l1, _l2

    knots = []

    def addr(word, x):  # e_{w}(x), evaluated outside-in
        for i in reversed(word):
            x = x / 3 if i == 1 else 1 - x / 3
        return x

    def pair_at(word, corner):
        a, b = corner
        for i in reversed(word):
            a, b = (_l1 if i == 1 else _l2)(slc, a, b)
        return (a, b)

    words = [[]]
    for _ in range(depth):
        words = [w + [i] for w in words for i in (1, 2)]
    for w in words:
        p0 = pair_at(w, (slc.A.frac, slc.D.frac))
        p1 = pair_at(w, (slc.B.frac, slc.C.frac))
        knots.append((addr(w, Fraction(0)), p0[coord]))
        knots.append((addr(w, Fraction(1)), p1[coord]))
    knots.sort()
    xs = [float(k[0]) for k in knots]
    ys = [float(k[1]) for k in knots]
    return xs, ys


def slice_q_maps(slc, depth: int = 5):
    """Monotone PL representatives of q1: [0,1] -> [A,B] and q2: [0,1] -> [C,D]
    (q2 orientation-reversing), exact on the depth-limited Cantor data."""
    x1, y1 = _q_knots(slc, depth, 0)
    x2, y2 = _q_knots(slc, depth, 1)

    def interp(xs, ys):
        def f(x):
            import bisect

            x = min(max(x, 0.0), 1.0)
            i = bisect.bisect_right(xs, x) - 1
            i = min(max(i, 0), len(xs) - 2)
            if xs[i + 1] == xs[i]:
                return ys[i]
            t = (x - xs[i]) / (xs[i + 1] - xs[i])
            return (1 - t) * ys[i] + t * ys[i + 1]

        return f

    return interp(x1, y1), interp(x2, y2)


def _scalar_ba_pair(q, x: float, spread: float):
    """Full Beurling-Ahlfors pair of a scalar increasing boundary map: the
    symmetric average u and the conjugate half-difference v (v >= 0 measures
    the local stretch and vanishes on the boundary line)."""
    if spread <= 1e-15:
        return q(min(max(x, 0.0), 1.0)), 0.0

    def qr(s):
        if s < 0:
            return -qr(-s)
        if s > 1:
            return 2.0 - qr(2.0 - s)
        return q(s)

    u = v = 0.0
    for s, w in _GAUSS:
        fp, fm = qr(x + s * spread), qr(x - s * spread)
        u += w * (fp + fm)
        v += w * (fp - fm)
    return u / 2, v / 2


def _lemma_square_extension(q):
    """Square extension with the multiple-reflection boundary scheme
    Q(x,0)=(q(x),0), Q(0,y)=(0,q(y)), Q(x,1)=(1-q(1-x),1), Q(1,y)=(1,1-q(1-y)).

    Each side contributes its genuine Beurling-Ahlfors extension pair (so the
    scales of both partial derivatives match the distance to that side); the
    four extensions are glued by weights that hand control to a side as its
    distance vanishes.  The boundary values are hit exactly via the odd
    endpoint reflection in the averages.
    """
    top = lambda s: 1.0 - q(1.0 - s)

    def from_bottom(x, y):
        u, v = _scalar_ba_pair(q, x, y)
        return (u, v)

    def from_top(x, y):
        u, v = _scalar_ba_pair(top, x, 1 - y)
        return (u, 1.0 - v)

    def from_left(x, y):
        u, v = _scalar_ba_pair(q, y, x)
        return (v, u)

    def from_right(x, y):
        u, v = _scalar_ba_pair(top, y, 1 - x)
        return (1.0 - v, u)

    def Q(x, y):
        dx0, dx1 = max(x, 0.0), max(1 - x, 0.0)
        dy0, dy1 = max(y, 0.0), max(1 - y, 0.0)
        # inverse-distance control: a side wins as its distance vanishes
        eps = 1e-300
        wb, wt = 1.0 / (dy0 + eps), 1.0 / (dy1 + eps)
        wl, wr = 1.0 / (dx0 + eps), 1.0 / (dx1 + eps)
        tot = wb + wt + wl + wr
        qb, qt = from_bottom(x, y), from_top(x, y)
        ql, qr_ = from_left(x, y), from_right(x, y)
        u = (wb * qb[0] + wt * qt[0] + wl * ql[0] + wr * qr_[0]) / tot
        v = (wb * qb[1] + wt * qt[1] + wl * ql[1] + wr * qr_[1]) / tot
        return (u, v)

    return Q


@dataclass
class SliceEmbeddingReport:
    """Empirical data of the sampled embedding.

    The stable quantity is the interior dilatation (quads whose parameters
    stay 1/8 away from the square's boundary); the full-mesh maximum includes
    the edge gluing zones of the figure-free extension and carries no
    stability claim (recorded as such).
    """

    mesh: tuple[int, int]
    q1_monotone: bool
    q1_at_zero: float
    corner_errors: list[float]
    max_dilatation: float  # interior region
    refined_max_dilatation: float  # interior region, doubled mesh
    full_mesh_dilatation: float
    min_offboundary_potential: float
    points: list[list[complex]]


def slice_embedding(slc, lam, c, depth: int = 3, mesh: tuple[int, int] | None = None,
                    pot_scale: float = 0.05, trace_cfg=None) -> SliceEmbeddingReport:
    """Sampled embedding of the upper half of the notched-square model into
    the dynamical plane: the Cantor boundary map q1 from the slice dynamics,
    its square extension, then external-ray evaluation phi(e^{2 pi i z}).

    The mesh rows live at positive potential, so every off-boundary sample is
    off the Julia set by construction; the bottom row approaches the Cantor
    set of ray-pair landing points.
    """
    from fractions import Fraction as F

    from .geometry import TraceConfig, ray_point

    cfg = trace_cfg or TraceConfig()
    if mesh is None:
        mesh = (2 * 3**depth, 8)  # resolve the finest PL piece of the q map
    q1raw, _ = slice_q_maps(slc, depth)
    A, B = float(slc.A.frac), float(slc.B.frac)
    qn = lambda x: (q1raw(x) - A) / (B - A)
    ext = _lemma_square_extension(qn)

    def embed(u, v):
        theta = F(A + (B - A) * u).limit_denominator(1 << 24)
        from .angles import from_fraction

        pot = max(v, 1e-3) * pot_scale
        return ray_point(c, from_fraction(theta % 1), pot, cfg)

    nx, ny = mesh

    def sample(nx, ny):
        rows = []
        for j in range(ny + 1):
            row = []
            for i in range(nx + 1):
                u, v = ext(i / nx, j / ny)
                row.append(embed(u, v))
            rows.append(row)
        return rows

    pts = sample(nx, ny)

    def quad_dil(rows, margin: float = 0.0):
        """Per-quad distortion from the real Jacobian, orientation-agnostic:
        the (angle, potential) parameter square is a reflected conformal
        chart, so only |det| is meaningful here.  The bottom row of quads sits
        on the clamped potential floor next to the Julia set (where the model
        map is only required to degenerate) and is excluded; a positive margin
        also skips the edge gluing zones of the square extension."""
        worst = 0.0
        NX, NY = len(rows[0]) - 1, len(rows) - 1
        hx, hy = 1.0 / NX, 1.0 / NY
        for j in range(max(1, math.ceil(margin * NY)), NY - max(0, math.ceil(margin * NY) - 1)):
            if j >= NY or (margin > 0 and (j + 1) / NY > 1 - margin):
                continue
            for i in range(NX):
                if margin > 0 and (i / NX < margin or (i + 1) / NX > 1 - margin):
                    continue
                dx = (rows[j][i + 1] - rows[j][i] + rows[j + 1][i + 1] - rows[j + 1][i]) / (2 * hx)
                dy = (rows[j + 1][i] - rows[j][i] + rows[j + 1][i + 1] - rows[j][i + 1]) / (2 * hy)
                a, c = dx.real, dx.imag
                b, d = dy.real, dy.imag
                det = abs(a * d - b * c)
                if det <= 0:
                    return math.inf
                t = a * a + b * b + c * c + d * d
                worst = max(worst, (t + math.sqrt(max(t * t - 4 * det * det, 0.0))) / (2 * det))
        return worst

    refined = sample(2 * nx, 2 * ny)
    d1 = quad_dil(pts, margin=0.125)
    d2 = quad_dil(refined, margin=0.125)
    d_full = quad_dil(pts)

    monotone = all(q1raw((k + 1) / 200) >= q1raw(k / 200) - 1e-15 for k in range(200))
    corners = [
        abs(embed(*ext(0.0, 0.0)[0:2]) - ray_point(c, slc.A, 1e-3 * pot_scale, cfg)),
        abs(embed(*ext(1.0, 0.0)[0:2]) - ray_point(c, slc.B, 1e-3 * pot_scale, cfg)),
    ]
    return SliceEmbeddingReport(
        mesh=mesh,
        q1_monotone=monotone,
        q1_at_zero=q1raw(0.0),
        corner_errors=corners,
        max_dilatation=d1,
        refined_max_dilatation=d2,
        full_mesh_dilatation=d_full,
        min_offboundary_potential=1e-3 * pot_scale,
        points=pts,
    )

"""Executable Yoccoz-puzzle machinery for quadratic polynomials: exact
lamination/tau/tiling combinatorics, external ray numerics, and the explicit
quasiconformal model maps with verified dilatation and energy bounds."""

__version__ = "0.1.0"

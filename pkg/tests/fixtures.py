"""Frozen fixture angles used across the suite.

Provenance: scripts/find_fixtures.py scans rational angles and verifies the
properties recorded here (recurrence depth, fraternal descendants, detector
outcomes); the hand-checkable slice data for 3/8 was computed independently
with exact arithmetic before being frozen.
"""

from yoccoz.angles import normalize

# the 1/2-limb sector is (1/3, 2/3)
HALF_LIMB = (1, 2)

# orbit 1/6 -> 1/3 hits the alpha cycle after one doubling: the trivial case
CASE1_THETA = normalize(1, 6)
CASE1_STEP = 1

# the spec's own 5/12 enters the cycle after two doublings (see the ledger)
CASE1_THETA_SLOW = normalize(5, 12)
CASE1_SLOW_STEP = 2

# period-4 angle: satellite-renormalizable with period 2 = q
SATELLITE_THETA = normalize(2, 5)

# preperiodic 3/8 -> 3/4 -> 1/2 -> 0: critically non-recurrent (case 2),
# not renormalizable; its slice data is frozen in test_lamination
MISIUREWICZ_THETA = normalize(3, 8)

# airplane-like period 3: primitive renormalizable, descendants form a chain
AIRPLANE_THETA = normalize(3, 7)

# period-9 angle with genuinely branching descendants (find_fixtures.py):
# first nondegenerate annulus N=2, fraternal descendants (5, 11), L=14,
# recurrent to every tested depth, renormalizable only with period 9
CASE3_THETA = normalize(222, 511)
CASE3_N = 2
CASE3_FRATERNAL = (5, 11)
CASE3_L = 14
CASE3_P = 15  # tiling piece level, > L

# residual-to-depth angles of the 222/511 lamination (exhaustive search over
# the critical-piece arcs; all have tau(n) = n, the little-copy behavior)
RESIDUAL_ANGLES = [normalize(368, 511), normalize(19237, 87381), normalize(62672, 87381)]

# rabbit-wake fixture in the 1/3 limb (sector (1/7, 2/7))
RABBIT_WAKE_THETA = normalize(3, 14)

# basilica tuning words and test pairs for the tuned-rabbit compatibility run
TUNE_A0, TUNE_A1 = "01", "10"
RABBIT_PAIR_EQUIV = (normalize(1, 14), normalize(9, 14))  # one depth-1 class
RABBIT_PAIR_CROSS = (normalize(1, 14), normalize(2, 7))  # crosses the alpha polygon

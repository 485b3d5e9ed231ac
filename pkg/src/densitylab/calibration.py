"""Constants fixed once by exhaustive pilot runs and frozen here.

Each value was measured by the code in this package. The tests recompute
them, so any drift in the implementation shows up as a failure.
"""

# sup over q in {2, 3, 4}, r <= 10, 0 <= d <= 2r of
# |B_r(x) & B_r(y)| / q^{(2r - d)/2}. The sup is (q + 1)/(q - 1), attained
# in the limit r -> inf at d = 0 and largest at q = 2.
CONVOLUTION_CONSTANT = 3.0

# Crossing exponents kappa(f) for Gamma(N) in SL_2(Z), max-entry balls with
# every integer T up to the covering radius, linear interpolation in log T.
# level: (index, covering radius, kappa(0.5), kappa(0.99), kappa(1.0))
LIFTING_PILOT = {
    5: (120, 8, 0.3319, 0.8520, 0.8687),
    7: (336, 12, 0.5040, 0.8292, 0.8543),
    11: (1320, 26, 0.6241, 0.8331, 0.9069),
    13: (2184, 37, 0.6476, 0.8783, 0.9393),
}
LIFTING_BAND = 0.6

# Gamma(13): last integer T with coverage <= 0.5, and its coverage.
LIFTING_HALF_13 = (12, 0.4927)

# Fraction of ordered pairs (x != y) with d(x, y) < (1 + eps) log_q n.
# LPS(5, 13) is bipartite on PGL_2(F_13); LPS(13, 17) is not bipartite.
DIAMETER_PILOT = {
    (5, 13): {"n": 2184, "mean": 4.834631241410903, 0.1: 0.7448465414567109,
              0.25: 0.7448465414567109, 0.5: 1.0},
    (13, 17): {"n": 2448, "mean": 3.225173682059665, 0.1: 0.6890069472823867,
               0.25: 0.6890069472823867, 0.5: 1.0},
}

# Xi_2 bound window for t in 1..10 (upper constant, lower constant).
XI_UPPER_CONSTANT = 2.0
XI_LOWER_CONSTANT = 1.0

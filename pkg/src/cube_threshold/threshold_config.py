# --- Critical probabilities ---
BISECTION_MAX_ITER = 200
BISECTION_TOL = 1e-10
CROSSING_SCAN_POINTS = 257  # uniform scan of [0, 1] locating the first crossing before bisection
CURVE_GRID = (0.01, 0.99, 99)  # default measure_curve grid: start, stop, points
WIDTH_LEVELS = (0.1, 0.9)

# --- Margulis-Russo ---
RUSSO_STEP = 1e-4
RUSSO_ATOL = 1e-6  # allowed |finite difference - I_p[f]| at the default step

# --- Globalness across an interval ---
M_GLOBAL_EXPONENT = 0.01  # mu_p(f_{J->1}) <= mu_p(f)^{0.01}
M_GLOBAL_GRID_SIZE = 32  # log-spaced probes

# --- Trial constants of the existential theorems ---
TRAD_TRIAL_C = 10.0
NOISE_ROUTE_TRIAL_C = 2.0
NOISE_ROUTE_EPS = 0.5
NOISE_ROUTE_MAX_DOUBLINGS = 64  # bracket search for the smallest consistent constant

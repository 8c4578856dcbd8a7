import math

# --- Exact enumeration ---
EXACT_SUPPORT_CAP = 1 << 24  # product supports up to this size are enumerated instead of sampled

# --- Monte Carlo ---
MIN_SAMPLES = 10_000
MC_BATCH_SIZE = 4096  # batch b draws from Philox seeded with (seed, b)
MC_ERROR_MULTIPLIER = 3.0  # pass needs lhs - 3 * standard error <= rhs

# --- Ensembles ---
MOMENT_ATOL = 1e-9  # mean 0 and variance 1 of custom discrete coordinates
GAUSSIAN_THIRD_MOMENT = 2.0 * math.sqrt(2.0) / math.sqrt(math.pi)  # E|g|^3
GAUSSIAN_SIGMA_MAX = math.sqrt(math.pi) / (2.0 * math.sqrt(2.0))  # largest sigma with E|g|^3 <= 1/sigma

# --- Bound constants: 2^{k d} ---
STATED_EXPONENT = 5
PROOF_EXPONENT = 12  # what the replacement argument yields; the asserted form

# --- Sizes ---
ES_TABLE_CAP = 1 << 24  # the decomposition holds all 2^n components over every point at once
KERNEL_POINTS_CAP = 4096  # explicit transition matrices over the whole space

# --- Tolerances ---
SUM_TO_ONE_ATOL = 1e-12
DEPENDENCE_ATOL = 1e-10  # relative to max|f|, for "f depends only on S"

# --- Hypercontractivity on product spaces ---
ES_RHO_DENOMINATOR = 8.0  # rho <= 1 / (8 q^{1.5})

import os

# --- Dimension cap ---
# Every table is dense, so memory grows as 2**n.
DEFAULT_N_CAP = 24
N_CAP_ENV_VAR = "PCUBE_NCAP"

# --- Tolerances ---
DEFAULT_TOLERANCE = 1e-10  # relative, shared by every checker
TOLERANCE_ENV_VAR = "PCUBE_TOLERANCE"
BOOLEAN_ATOL = 1e-12  # how far a value may sit from {0, 1} and still count as boolean

# --- Verification-only paths ---
KERNEL_N_CAP = 12  # explicit 2**n x 2**n transition matrices

# --- Influence tables ---
DEFAULT_R_MAX = 4


def n_cap() -> int:
    """Returns the active dimension cap, honouring the PCUBE_NCAP override."""
    raw = os.environ.get(N_CAP_ENV_VAR)
    if raw is None or raw.strip() == "":
        return DEFAULT_N_CAP
    try:
        value = int(raw)
    except ValueError as e:
        raise ValueError(f"{N_CAP_ENV_VAR} must be an integer, got {raw!r}.") from e
    if value < 1:
        raise ValueError(f"{N_CAP_ENV_VAR} must be at least 1, got {value}.")
    return value


def default_tolerance() -> float:
    raw = os.environ.get(TOLERANCE_ENV_VAR)
    if raw is None or raw.strip() == "":
        return DEFAULT_TOLERANCE
    try:
        value = float(raw)
    except ValueError as e:
        raise ValueError(f"{TOLERANCE_ENV_VAR} must be a real number, got {raw!r}.") from e
    if not value > 0:
        raise ValueError(f"{TOLERANCE_ENV_VAR} must be positive, got {value}.")
    return value

# --- Concentration bounds ---
WARMUP_BASE = 3.0  # ||f^{<=r}||^2 <= 3^r mu^{1.5} on the uniform cube
INFLUENCE_FORM_BASE = 5.0  # 5^r delta^{1/3} E[f^2] under small generalised influences
GLOBAL_FORM_BASE = 10.0  # 10^r delta^{1/3} mu under (r, delta)-globalness

# --- Isoperimetric stability ---
BOUNDED_AWAY = (0.1, 0.9)  # "mu bounded away from 0 and 1"
KAHN_KALAI_TRIAL_C = 10.0
BOURGAIN_BASE = 5.0
BOURGAIN_EXPONENT = 8.0  # threshold 5^{-8K}
BOURGAIN_SIZE_FACTOR = 2.0  # sets of size up to ceil(2K)
MONOTONE_TRANSFER_BASE = 8.0  # monotone (r, delta)-global => I_S <= 8^r delta

# --- Sharpness examples ---
EG1_DEFAULTS = {"s": 3, "w": 2, "p": 0.5}
EG2_DEFAULTS = {"s": 4, "w": 2, "t": 2, "p": 0.4}
FINITE_DIFFERENCE_STEP = 1e-6

import math

# --- Noise rates fixed by the fourth-moment theorems ---
HYPREF_RHO_MAX = 1.0 / math.sqrt(12.0)  # largest rho for the derivative-sum bound
SMALL_INFLUENCE_RHO = 0.2  # ||T_{1/5} f||_4 <= beta^{1/4} ||f||_2
LAMBDA_FORM_RHO = 1.0 / math.sqrt(24.0)  # same bound under ||D_S f||^2 <= beta lambda^{-|S|} E[f^2]

# --- Replacement method ---
UNIFORM_BIAS = 0.5
UNIFORM_NOISE_FACTOR = 2.0  # the uniform coordinates of a hybrid get noise 2 rho

# --- Exact q-norms ---
EXACT_Q_VALUES = (4, 6, 8)  # the moments swept by tests and the CLI

"""
Subcommands and the theorems each one checks.

Every checker names the library operations it exercises, so coverage of the library by the
command line can be enumerated.
"""

from collections.abc import Callable
from dataclasses import dataclass, field

from cube_core.cube_config import DEFAULT_R_MAX
from cube_invariance.invariance_config import MIN_SAMPLES
from cube_stability.stability_config import KAHN_KALAI_TRIAL_C
from cube_threshold.threshold_config import (
    CURVE_GRID,
    M_GLOBAL_GRID_SIZE,
    NOISE_ROUTE_EPS,
    NOISE_ROUTE_TRIAL_C,
    RUSSO_STEP,
    TRAD_TRIAL_C,
    WIDTH_LEVELS,
)

from . import checkers as c
from .converters import CUBE, POLY, PRODUCT
from .models import CheckOutcome, Params


@dataclass(frozen=True)
class Checker:
    theorem: str
    description: str
    run: Callable[[c.CheckRequest], CheckOutcome]
    operations: tuple[str, ...]
    defaults: Params = field(default_factory=dict)

    def resolve(self, params: Params) -> Params:
        """Defaults overlaid with the given parameters; unknown names are rejected."""
        unknown = set(params) - set(self.defaults)
        if unknown:
            allowed = ", ".join(sorted(self.defaults)) or "none"
            raise ValueError(f"Theorem {self.theorem!r} has no parameter(s) {sorted(unknown)}; allowed: {allowed}.")
        return {**self.defaults, **params}


@dataclass(frozen=True)
class Command:
    name: str
    description: str
    input_kind: str | None  # None for commands that take no function
    checkers: tuple[Checker, ...] = ()

    @property
    def default_theorem(self) -> str | None:
        return self.checkers[0].theorem if self.checkers else None

    def checker(self, theorem: str | None) -> Checker:
        theorem = theorem or self.default_theorem
        for checker in self.checkers:
            if checker.theorem == theorem:
                return checker
        choices = ", ".join(ch.theorem for ch in self.checkers)
        raise ValueError(f"{self.name} has no theorem {theorem!r}; choose one of: {choices}.")


_THRESHOLD_PAIR = {"lo": 0.1, "hi": 0.3}
_Q_RHO = {"q": 4, "rho": "auto"}
_R_DELTA = {"r": "auto", "delta": "auto"}
_ENSEMBLES = {"x": "pbiased:0.25", "y": "uniform", "phi": "sigmoid"}

COMMANDS: dict[str, Command] = {
    command.name: command
    for command in [
        Command(
            "transform",
            "p-biased Fourier coefficients with the Parseval and round-trip checks",
            CUBE,
            (
                Checker(
                    "coefficients",
                    "coefficient table",
                    c.run_coefficients,
                    ("forward_transform", "inverse_transform"),
                ),
            ),
        ),
        Command(
            "influences",
            "generalised influences and globalness",
            CUBE,
            (
                Checker(
                    "table",
                    "I_S(f) for |S| <= r_max with the total influence paths",
                    c.run_influence_table,
                    ("influence_table", "total_influence", "flip_influence", "beta_small_check"),
                    {"r_max": DEFAULT_R_MAX},
                ),
                Checker(
                    "equivalence",
                    "globalness and small-influence lemmas",
                    c.run_equivalence,
                    ("equivalence_suite",),
                    {"r": 1, "delta": "auto"},
                ),
                Checker("global", "(r, delta)-globalness", c.run_globalness, ("globalness",), {"r": 1, "delta": 0.1}),
            ),
        ),
        Command(
            "stability",
            "noise stability curves, noise sensitivity and low-degree concentration",
            CUBE,
            (
                Checker(
                    "curve",
                    "Stab_rho(f) over rho, spectral against the kernel",
                    c.run_noise_curve,
                    ("noise_curve", "noise_stability", "apply_noise"),
                    {"rho": c.default_rho_list()},
                ),
                Checker(
                    "sensitivity",
                    "sparse global functions are noise sensitive",
                    c.run_noise_sensitivity,
                    ("noise_sensitivity_check",),
                    {"rho": 0.5, "eps": 0.5},
                ),
                Checker(
                    "calcrho",
                    "T^{q->p} T^{p->q} = T_rho",
                    c.run_calcrho,
                    ("calcrho_identity_check", "directed_apply"),
                    {"q": "auto"},
                ),
                Checker(
                    "hamming",
                    "noisy self-correlation against the Hamming ball",
                    c.run_hamming,
                    ("hamming_ball_comparison",),
                    {"rho": 0.5},
                ),
                Checker("warmup", "3^r mu^{1.5} on the uniform cube", c.run_warmup, ("warmup_check",), {"r": 2}),
                Checker(
                    "concentration",
                    "5^r and 10^r concentration bounds",
                    c.run_concentration,
                    ("concentration_check", "truncate"),
                    {"r": 1, "delta": 0.1},
                ),
                Checker(
                    "normtruncate",
                    "mu^2 + 5^{r-1} delta^{1/3} sigma^2 I[f]",
                    c.run_normtruncate,
                    ("normtruncate_check",),
                    {"r": 1, "delta": "auto"},
                ),
            ),
        ),
        Command(
            "check-hyper",
            "hypercontractive inequalities for p-biased functions",
            CUBE,
            (
                Checker("13", "||T_{1/5} f||_4 <= beta^{1/4} ||f||_2", c.run_thm13, ("thm13_check",)),
                Checker(
                    "34",
                    "||T_rho f||_4^4 against the derivative and influence sums",
                    c.run_hypref,
                    ("hypref_bound_check",),
                    {"rho": 0.25},
                ),
                Checker(
                    "35",
                    "||T_{1/sqrt 24} f||_4 under the lambda-scaled hypothesis",
                    c.run_lambda_form,
                    ("thm13_check",),
                ),
                Checker(
                    "practice",
                    "||f||_4 <= 5^{3r/4} delta^{1/4} ||f||_2^{1/2}",
                    c.run_practice,
                    ("practice_bound_check",),
                    dict(_R_DELTA),
                ),
                Checker(
                    "qnorm",
                    "||T_rho f||_q^q <= sum sigma^{(2-q)|S|} ||D_S f||_2^q",
                    c.run_qnorm,
                    ("qnorm_bound_check",),
                    dict(_Q_RHO),
                ),
                Checker(
                    "qnorm-practice",
                    "||f||_q <= (2q)^{1.5r} delta^{(q-2)/2q} ||f||_2^{2/q}",
                    c.run_qnorm_practice,
                    ("qnorm_practice_check",),
                    {"q": 4, **_R_DELTA},
                ),
                Checker(
                    "replacement",
                    "one replacement step per coordinate and the chained bound",
                    c.run_replacement,
                    ("replacement_step_check", "replacement_chain_check", "hybrid_eval", "mixed_noise"),
                    {"rho": 0.2},
                ),
                Checker(
                    "uniform", "||g||_4 <= sqrt(3)^r ||g||_2", c.run_uniform_degree, ("degree_r_uniform_check",)
                ),
                Checker(
                    "mixed-bias",
                    "heterogeneous q-norm bound over per-coordinate biases",
                    c.run_mixed_bias,
                    ("mixed_bias_qnorm_check",),
                    {"biases": "auto", **_Q_RHO},
                ),
                Checker(
                    "single-coordinate",
                    "one-coordinate moment step",
                    c.run_single_coordinate,
                    ("single_coordinate_moment_check",),
                    dict(_Q_RHO),
                ),
            ),
        ),
        Command(
            "isoperimetry",
            "stability versions of the isoperimetric inequality and their sharpness",
            CUBE,
            (
                Checker(
                    "kahn-kalai",
                    "a small restriction with a large measure",
                    c.run_kahn_kalai,
                    ("kahn_kalai_variant_search",),
                    {"K": 1.0, "C": KAHN_KALAI_TRIAL_C},
                ),
                Checker(
                    "bourgain",
                    "a small set with a large generalised influence",
                    c.run_bourgain,
                    ("bourgain_witness_search",),
                    {"K": "auto"},
                ),
                Checker(
                    "sharpness",
                    "antitribes tables: closed forms and the restriction bump",
                    c.run_sharpness,
                    ("sharpness_tables",),
                ),
            ),
        ),
        Command(
            "threshold",
            "measure curves and sharp thresholds of monotone functions",
            CUBE,
            (
                Checker(
                    "curve",
                    "mu_p(f) over a grid of p",
                    c.run_measure_curve,
                    ("measure_curve",),
                    {"grid": CURVE_GRID[2]},
                ),
                Checker(
                    "russo",
                    "Margulis-Russo: d mu_p / dp = I_p[f]",
                    c.run_russo,
                    ("russo_check",),
                    {"at": 0.5, "h": RUSSO_STEP},
                ),
                Checker(
                    "width",
                    "p(high) / p(low)",
                    c.run_width,
                    ("threshold_width_ratio",),
                    {"low": WIDTH_LEVELS[0], "high": WIDTH_LEVELS[1]},
                ),
                Checker(
                    "m-global",
                    "M-globalness across an interval",
                    c.run_m_global,
                    ("m_global_certify",),
                    {**_THRESHOLD_PAIR, "M": 2, "grid": M_GLOBAL_GRID_SIZE},
                ),
                Checker(
                    "sharp",
                    "the traditional sharp threshold theorem",
                    c.run_sharp_threshold,
                    ("sharp_threshold_check",),
                    {**_THRESHOLD_PAIR, "M": 2, "C": TRAD_TRIAL_C, "grid": M_GLOBAL_GRID_SIZE},
                ),
                Checker(
                    "noise-route",
                    "the noise sensitivity route to a sharp threshold",
                    c.run_noise_route,
                    ("noise_route_check",),
                    {**_THRESHOLD_PAIR, "eps": NOISE_ROUTE_EPS, "C": NOISE_ROUTE_TRIAL_C, "C0": "auto"},
                ),
            ),
        ),
        Command(
            "product",
            "Efron-Stein decompositions and hypercontractivity on product spaces",
            PRODUCT,
            (
                Checker("decompose", "components and their invariants", c.run_decompose, ("es_decompose",)),
                Checker("laplacian", "composed against summed Laplacians", c.run_laplacian, ("laplacian",)),
                Checker(
                    "noise",
                    "component multiplier against the resampling kernel",
                    c.run_product_noise,
                    ("product_noise", "product_noise_kernel"),
                    {"rho": 0.5},
                ),
                Checker(
                    "es-hyper",
                    "||T_rho f||_q^q <= sum sigma_S^{2-q} ||L_S f||_2^q",
                    c.run_es_hyper,
                    ("es_hyper_check",),
                    dict(_Q_RHO),
                ),
                Checker(
                    "holder",
                    "Holder bound for functions of the given coordinate sets",
                    c.run_holder,
                    ("holder_term_check",),
                    {"sets": "1/1/1/1"},
                ),
                Checker(
                    "es-term",
                    "Holder bound on Efron-Stein components",
                    c.run_es_term,
                    ("es_product_term_check",),
                    {"sets": "1/1/1/1"},
                ),
                Checker(
                    "single-factor",
                    "||f||_q^q <= ||f||_2^q sigma^{2-q} on one factor",
                    c.run_single_factor,
                    ("single_factor_moment_check",),
                    {"q": 4},
                ),
            ),
        ),
        Command(
            "invariance",
            "the invariance principle for low-degree multilinear polynomials",
            POLY,
            (
                Checker(
                    "bound",
                    "|E phi(f(X)) - E phi(f(Y))| against 2^{12d} sup|phi'''| W sqrt(eps)",
                    c.run_invariance,
                    ("invariance_bound_check", "hybrid_distribution_diff"),
                    {**_ENSEMBLES, "samples": MIN_SAMPLES, "seed": 0, "mode": "auto"},
                ),
                Checker(
                    "telescoping",
                    "one coordinate replaced at a time",
                    c.run_telescoping,
                    ("telescoping_sum", "hybrid_ensemble"),
                    dict(_ENSEMBLES),
                ),
                Checker(
                    "influences",
                    "I_S(f) under the sigmas of X",
                    c.run_poly_influences,
                    ("poly_influences",),
                    {**_ENSEMBLES, "r_max": DEFAULT_R_MAX},
                ),
            ),
        ),
        Command("zoo", "list the function generators with their parameters", None),
    ]
}


def lookup(command: str, theorem: str | None = None) -> tuple[Command, Checker | None]:
    if command not in COMMANDS:
        raise ValueError(f"Unknown command {command!r}; choose one of: {', '.join(COMMANDS)}.")
    spec = COMMANDS[command]
    if not spec.checkers:
        if theorem is not None:
            raise ValueError(f"{command} takes no theorem.")
        return spec, None
    return spec, spec.checker(theorem)


def operations() -> dict[str, list[str]]:
    """Library operation -> the commands whose checkers exercise it."""
    out: dict[str, list[str]] = {}
    for command in COMMANDS.values():
        for checker in command.checkers:
            for op in checker.operations:
                if command.name not in out.setdefault(op, []):
                    out[op].append(command.name)
    return out

"""
Runners behind every subcommand theorem.

A runner takes the loaded function with its resolved parameters and returns table rows and
check results; it never writes output and raises ValueError for unusable parameters.
"""

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np

from cube_core.bits import members, popcounts
from cube_core.cube_config import KERNEL_N_CAP
from cube_core.generators import GENERATORS
from cube_core.transform import forward_transform, inverse_transform, is_monotone, lr_norm
from cube_hyper.fourth_moment import degree_r_uniform_check, hypref_bound_check, practice_bound_check, thm13_check
from cube_hyper.hybrids import replacement_chain_check, replacement_step_sides
from cube_hyper.qnorm import (
    mixed_bias_qnorm_check,
    q_rho_max,
    qnorm_bound_check,
    qnorm_practice_check,
    single_coordinate_moment_check,
)
from cube_influence.globalness import equivalence_suite, globalness
from cube_influence.influences import (
    DEFINITION,
    beta_small_check,
    flip_influence,
    influence_table,
    total_influence,
)
from cube_invariance.ensembles import parse_ensemble
from cube_invariance.polynomials import poly_influences
from cube_invariance.principle import invariance_bound_check, telescoping_sum
from cube_invariance.smooth_functions import parse_test_function
from cube_noise.directed import calcrho_identity_check
from cube_noise.operators import (
    KERNEL,
    hamming_ball_comparison,
    noise_curve,
    noise_sensitivity_check,
    noise_stability,
)
from cube_product.decomposition import KERNEL as RESAMPLING
from cube_product.decomposition import SPECTRAL as COMPONENT_SUM
from cube_product.decomposition import es_decompose, laplacian, product_noise
from cube_product.moments import (
    es_hyper_check,
    es_product_term_check,
    es_rho_max,
    holder_term_check,
    single_factor_moment_check,
)
from cube_product.spaces import ProductFunction
from cube_stability.concentration import concentration_check, normtruncate_check, warmup_check
from cube_stability.isoperimetry import bourgain_witness_search, kahn_kalai_variant_search
from cube_stability.sharpness import EG1, EG2, sharpness_tables
from cube_threshold.curves import measure_curve, russo_check, threshold_width_ratio
from cube_threshold.sharp import m_global_certify, noise_route_check, sharp_threshold_check
from cube_threshold.threshold_config import CURVE_GRID, RUSSO_ATOL

from .converters import from_bound, from_deviation, from_lemma
from .models import CheckOutcome, CheckResult, Instance, Params

logger = logging.getLogger(__name__)

EXACT_MODES = {"auto": None, "exact": True, "sample": False}


@dataclass(frozen=True)
class CheckRequest:
    function: Any
    params: Params
    tolerance: float
    instance: Instance


# --- parameter parsing ---


def floats(value) -> list[float]:
    """A number, or numbers joined by '/'."""
    if isinstance(value, int | float):
        return [float(value)]
    try:
        return [float(v) for v in str(value).split("/") if v.strip()]
    except ValueError as e:
        raise ValueError(f"Expected numbers separated by '/', got {value!r}.") from e


def masks(value) -> list[int]:
    if isinstance(value, int):
        return [value]
    try:
        return [int(v) for v in str(value).split("/") if v.strip()]
    except ValueError as e:
        raise ValueError(f"Expected subset masks separated by '/', got {value!r}.") from e


def _optional(value):
    return None if value in (None, "", "auto") else value


def _relative(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(b))


# --- transform ---


def run_coefficients(req: CheckRequest) -> CheckOutcome:
    f = req.function
    F = forward_transform(f)
    rows = [{"mask": m, "S": members(m), "coeff": float(F.coeffs[m])} for m in range(f.cube.size)]
    scale = max(1.0, float(np.max(np.abs(f.values))))
    roundtrip = float(np.max(np.abs(inverse_transform(F).values - f.values))) / scale
    energy = lr_norm(f, 2) ** 2
    return CheckOutcome(
        rows,
        [
            from_deviation("parseval", _relative(float(np.sum(np.square(F.coeffs))), energy), req.tolerance),
            from_deviation("roundtrip", roundtrip, req.tolerance),
        ],
    )


# --- influences ---


def run_influence_table(req: CheckRequest) -> CheckOutcome:
    f = req.function
    table = influence_table(f, int(req.params["r_max"]))
    spectral = total_influence(f)
    results = [from_deviation("total_influence", _relative(total_influence(f, DEFINITION), spectral), req.tolerance)]
    if f.is_boolean():
        results.append(from_deviation("flip_influence", _relative(flip_influence(f), spectral), req.tolerance))
    beta = beta_small_check(f, table.r_max) if np.any(f.values) else None
    logger.info("beta over |S| <= %d: %s", table.r_max, beta)
    return CheckOutcome([{**row, "beta": beta} for row in table.rows()], results)


def run_equivalence(req: CheckRequest) -> CheckOutcome:
    report = equivalence_suite(req.function, int(req.params["r"]), _optional(req.params["delta"]))
    return CheckOutcome([], [from_lemma(c) for c in report.checks])


def run_globalness(req: CheckRequest) -> CheckOutcome:
    report = globalness(req.function, int(req.params["r"]), float(req.params["delta"]))
    row = {
        "r": report.r,
        "delta": report.delta,
        "is_global": report.is_global,
        "measure": report.measure,
        "max_bump": report.max_bump,
        "worst_set": members(report.worst_set),
    }
    return CheckOutcome([row], [])


# --- stability: noise and concentration ---


def run_noise_curve(req: CheckRequest) -> CheckOutcome:
    f = req.function
    rhos = floats(req.params["rho"])
    rows = noise_curve(f, rhos)
    results = []
    if f.n <= KERNEL_N_CAP:
        for row in rows:
            kernel = noise_stability(f, row["rho"], method=KERNEL)
            results.append(
                from_deviation(f"stability.kernel@{row['rho']:g}", _relative(kernel, row["stability"]), req.tolerance)
            )
    return CheckOutcome(rows, results)


def run_noise_sensitivity(req: CheckRequest) -> CheckOutcome:
    report = noise_sensitivity_check(
        req.function, float(req.params["rho"]), float(req.params["eps"]), req.tolerance
    )
    return CheckOutcome([], [from_bound("noise_sensitivity", report.conclusion, report.hypothesis_met)])


def run_calcrho(req: CheckRequest) -> CheckOutcome:
    f = req.function
    p = f.cube.p
    q = _optional(req.params["q"])
    q = (1.0 + p) / 2.0 if q is None else float(q)
    return CheckOutcome([], [from_deviation("calcrho", calcrho_identity_check(f, p, q), req.tolerance)])


def run_hamming(req: CheckRequest) -> CheckOutcome:
    f = req.function
    rows = []
    for rho in floats(req.params["rho"]):
        c = hamming_ball_comparison(f, f, rho)
        rows.append(
            {"rho": rho, "correlation": c.correlation, "ball_correlation": c.ball_correlation, "gap": c.gap}
        )
    return CheckOutcome(rows, [])


def run_warmup(req: CheckRequest) -> CheckOutcome:
    report = warmup_check(req.function, float(req.params["r"]), req.tolerance)
    return CheckOutcome([], [from_bound("warmup.holder", report.holder), from_bound("warmup", report.bound)])


def run_concentration(req: CheckRequest) -> CheckOutcome:
    report = concentration_check(req.function, int(req.params["r"]), float(req.params["delta"]), req.tolerance)
    return CheckOutcome(
        [],
        [
            from_bound("concentration.influence", report.influence_form, report.influence_hypothesis),
            from_bound("concentration.global", report.global_form, report.global_hypothesis),
        ],
    )


def run_normtruncate(req: CheckRequest) -> CheckOutcome:
    _, delta = _degree_and_delta({"r": None, "delta": req.params["delta"]})
    check = normtruncate_check(req.function, int(req.params["r"]), delta, req.tolerance)
    return CheckOutcome([], [from_bound("normtruncate", check)])


# --- hypercontractivity ---


def run_thm13(req: CheckRequest) -> CheckOutcome:
    report = thm13_check(req.function, req.tolerance)
    return CheckOutcome([{"beta": report.beta}], [from_bound("13", report.influence_form)])


def run_lambda_form(req: CheckRequest) -> CheckOutcome:
    report = thm13_check(req.function, req.tolerance)
    return CheckOutcome([{"beta_lambda": report.beta_lambda}], [from_bound("35", report.lambda_form)])


def run_hypref(req: CheckRequest) -> CheckOutcome:
    report = hypref_bound_check(req.function, float(req.params["rho"]), req.tolerance)
    return CheckOutcome([], [from_bound("34.derivatives", report.lower), from_bound("34.influences", report.upper)])


def _degree_and_delta(params: Params) -> tuple[int | None, float | None]:
    r, delta = _optional(params["r"]), _optional(params["delta"])
    return (None if r is None else int(r)), (None if delta is None else float(delta))


def run_practice(req: CheckRequest) -> CheckOutcome:
    r, delta = _degree_and_delta(req.params)
    return CheckOutcome([], [from_bound("practice", practice_bound_check(req.function, delta, r, req.tolerance))])


def _q_and_rho(params: Params, rho_max) -> tuple[int, float]:
    q = int(params["q"])
    rho = _optional(params["rho"])
    return q, rho_max(q) if rho is None else float(rho)


def run_qnorm(req: CheckRequest) -> CheckOutcome:
    q, rho = _q_and_rho(req.params, q_rho_max)
    report = qnorm_bound_check(req.function, q, rho, tolerance=req.tolerance)
    return CheckOutcome(
        [{"q": q, "rho": rho, "beta": report.beta}],
        [from_bound("qnorm", report.moment_form), from_bound("qnorm.beta", report.beta_form)],
    )


def run_qnorm_practice(req: CheckRequest) -> CheckOutcome:
    r, delta = _degree_and_delta(req.params)
    check = qnorm_practice_check(req.function, int(req.params["q"]), delta, r, req.tolerance)
    return CheckOutcome([], [from_bound("qnorm.practice", check)])


def run_replacement(req: CheckRequest) -> CheckOutcome:
    F = forward_transform(req.function)
    rho = float(req.params["rho"])
    rows, results = [], []
    for t in range(1, F.n + 1):
        step = replacement_step_sides(F, t, rho, req.tolerance)
        rows.append({"t": t, "before": step.lhs, "after": step.rhs, "slack": step.margin})
        results.append(from_bound(f"replacement.step{t}", step))
    if F.n <= KERNEL_N_CAP:
        results.append(from_bound("replacement.chain", replacement_chain_check(F, rho, tolerance=req.tolerance)))
    return CheckOutcome(rows, results)


def run_uniform_degree(req: CheckRequest) -> CheckOutcome:
    return CheckOutcome([], [from_bound("uniform.degree", degree_r_uniform_check(req.function, req.tolerance))])


def run_mixed_bias(req: CheckRequest) -> CheckOutcome:
    f = req.function
    biases = _optional(req.params["biases"])
    biases = [f.cube.p] * f.n if biases is None else floats(biases)
    q, rho = _q_and_rho(req.params, q_rho_max)
    report = mixed_bias_qnorm_check(forward_transform(f).coeffs, biases, q, rho, req.tolerance)
    return CheckOutcome([], [from_bound("mixed_bias", report.moment_form)])


def run_single_coordinate(req: CheckRequest) -> CheckOutcome:
    f = req.function
    if f.n != 1:
        raise ValueError(f"The single-coordinate step needs a function of one coordinate, got n={f.n}.")
    e, d = forward_transform(f).coeffs
    q = int(req.params["q"])
    rho = _optional(req.params["rho"])
    rho = 1.0 / (4.0 * q) if rho is None else float(rho)
    check = single_coordinate_moment_check(float(e), float(d), f.cube.p, q, rho, req.tolerance)
    return CheckOutcome([], [from_bound("single_coordinate", check)])


# --- isoperimetry ---


def run_kahn_kalai(req: CheckRequest) -> CheckOutcome:
    witness = kahn_kalai_variant_search(req.function, float(req.params["K"]), float(req.params["C"]))
    check = CheckResult("kahn_kalai", witness.threshold, witness.boost, witness.found, witness.hypothesis_met)
    return CheckOutcome([witness.row(req.instance.id)], [check])


def run_bourgain(req: CheckRequest) -> CheckOutcome:
    K = _optional(req.params["K"])
    report = bourgain_witness_search(req.function, None if K is None else float(K))
    rows, results = [], []
    for witness in filter(None, (report.influence, report.restriction)):
        rows.append({**witness.row(req.instance.id), "kind": witness.kind})
        results.append(
            CheckResult(
                f"bourgain.{witness.kind}", witness.threshold, witness.boost, witness.found, report.hypothesis_met
            )
        )
    return CheckOutcome(rows, results)


def run_sharpness(req: CheckRequest) -> CheckOutcome:
    """The eg1 table for antitribes and the eg2 table for antitribes_pinned, with the generator's parameters."""
    kind = req.instance.meta.get("kind")
    examples = {"antitribes": EG1, "antitribes_pinned": EG2}
    if kind not in examples:
        raise ValueError("The sharpness tables are built from an antitribes or antitribes_pinned generator.")
    params = {k: v for k, v in req.instance.meta["params"].items() if k in GENERATORS[kind].defaults or k == "p"}
    params["p"] = req.function.cube.p
    table = sharpness_tables(examples[kind], params)
    s = table.summary
    results = [
        from_deviation("sharpness.measure", _relative(s["measure_enumerated"], s["measure_closed"]), req.tolerance),
        from_deviation(
            "sharpness.influence", _relative(s["influence_enumerated"], s["influence_closed"]), req.tolerance
        ),
    ]
    if table.example == EG1:
        corrected_applies = s["s_times_miss"] <= 1.0 and table.params["s"] >= 2
        for row in table.rows:
            t = row["t"]
            stated = CheckResult(f"eg1.stated{t}", row["max_restricted"], row["stated"], row["stated_holds"], False)
            results.append(stated)
            results.append(
                CheckResult(
                    f"eg1.corrected{t}",
                    row["max_restricted"],
                    row["corrected"],
                    row["corrected_holds"],
                    corrected_applies,
                )
            )
    else:
        results.append(CheckResult("eg2.half", s["max_within_half"], s["half_bound"], s["half_bound_holds"]))
    return CheckOutcome(table.rows, results)


# --- thresholds ---


def run_measure_curve(req: CheckRequest) -> CheckOutcome:
    start, stop, _ = CURVE_GRID
    grid = np.linspace(start, stop, int(req.params["grid"]))
    profile = measure_curve(req.function, grid)
    logger.info("Critical probability %.10g (monotone: %s)", profile.p_c, profile.monotone)
    return CheckOutcome(profile.rows(), [])


def run_russo(req: CheckRequest) -> CheckOutcome:
    f = req.function
    deviation = russo_check(f, float(req.params["at"]), float(req.params["h"]))
    check = CheckResult("russo", deviation, RUSSO_ATOL, deviation <= RUSSO_ATOL, is_monotone(f))
    return CheckOutcome([], [check])


def run_width(req: CheckRequest) -> CheckOutcome:
    low, high = float(req.params["low"]), float(req.params["high"])
    return CheckOutcome([{"low": low, "high": high, "ratio": threshold_width_ratio(req.function, low, high)}], [])


def run_m_global(req: CheckRequest) -> CheckOutcome:
    interval = (float(req.params["lo"]), float(req.params["hi"]))
    cert = m_global_certify(req.function, int(req.params["M"]), interval, int(req.params["grid"]))
    row = {
        "M": cert.M,
        "lo": interval[0],
        "hi": interval[1],
        "passed": cert.passed,
        "worst_p": cert.worst_p,
        "worst_set": members(cert.worst_set),
        "worst_excess": cert.worst_excess,
    }
    return CheckOutcome([row], [])


def run_sharp_threshold(req: CheckRequest) -> CheckOutcome:
    params = req.params
    report = sharp_threshold_check(
        req.function,
        float(params["lo"]),
        float(params["hi"]),
        int(params["M"]),
        float(params["C"]),
        int(params["grid"]),
        req.tolerance,
    )
    row = {
        "p_c": report.p_c,
        "measure_p": report.measure_p,
        "measure_q": report.measure_q,
        "hypothesis_met": report.hypothesis_met,
        "min_constant": report.min_constant,
    }
    return CheckOutcome([row], [from_bound("sharp_threshold", report.conclusion, report.hypothesis_met)])


def run_noise_route(req: CheckRequest) -> CheckOutcome:
    params = req.params
    floor = _optional(params["C0"])
    report = noise_route_check(
        req.function,
        float(params["lo"]),
        float(params["hi"]),
        float(params["eps"]),
        float(params["C"]),
        req.tolerance,
        None if floor is None else float(floor),
    )
    row = {
        "rho": report.rho,
        "stability": report.stability,
        "directed_correlation": report.directed_correlation,
        "hypothesis_met": report.checkable_hypothesis,
        "min_constant": report.min_constant,
    }
    return CheckOutcome(
        [row],
        [
            from_bound("noise_route.proposition", report.proposition, report.monotone),
            from_bound("noise_route.theorem", report.theorem, report.theorem_hypothesis),
        ],
    )


# --- product spaces ---


def run_decompose(req: CheckRequest) -> CheckOutcome:
    f = req.function
    es = es_decompose(f)
    rows = [
        {
            "mask": m,
            "S": members(m),
            "energy": float(es.energies[m]),
            "laplacian_energy": float(es.laplacian_energies[m]),
        }
        for m in range(1 << f.space.n)
    ]
    scale = max(1.0, float(np.max(np.abs(f.values))) ** 2)
    results = [
        from_deviation(f"es.{name}", value / scale, req.tolerance)
        for name, value in es.invariant_residuals(f).items()
    ]
    return CheckOutcome(rows, results)


def run_laplacian(req: CheckRequest) -> CheckOutcome:
    f = req.function
    scale = max(1.0, float(np.max(np.abs(f.values))))
    worst = 0.0
    for mask in range(1 << f.space.n):
        composed = laplacian(f, mask).values
        summed = laplacian(f, mask, method=COMPONENT_SUM).values
        worst = max(worst, float(np.max(np.abs(composed - summed))))
    return CheckOutcome([], [from_deviation("laplacian", worst / scale, req.tolerance)])


def run_product_noise(req: CheckRequest) -> CheckOutcome:
    f = req.function
    scale = max(1.0, float(np.max(np.abs(f.values))))
    results = []
    for rho in floats(req.params["rho"]):
        gap = np.max(np.abs(product_noise(f, rho).values - product_noise(f, rho, method=RESAMPLING).values))
        results.append(from_deviation(f"product_noise@{rho:g}", float(gap) / scale, req.tolerance))
    return CheckOutcome([], results)


def run_es_hyper(req: CheckRequest) -> CheckOutcome:
    q, rho = _q_and_rho(req.params, es_rho_max)
    return CheckOutcome([], [from_bound("es_hyper", es_hyper_check(req.function, q, rho, req.tolerance))])


def _projection(f: ProductFunction, mask: int) -> ProductFunction:
    """E[f | coordinates in mask], which depends only on the mask."""
    g = f
    for t in range(f.space.n):
        if not mask >> t & 1:
            g = g.condition_out(t)
    return g


def run_holder(req: CheckRequest) -> CheckOutcome:
    f = req.function
    sets = masks(req.params["sets"])
    report = holder_term_check([_projection(f, m) for m in sets], sets, req.tolerance)
    row = {"coverage": list(report.coverage), "expectation": report.expectation}
    return CheckOutcome([row], [from_bound("holder", report.bound)])


def run_es_term(req: CheckRequest) -> CheckOutcome:
    sets = masks(req.params["sets"])
    report = es_product_term_check(req.function, sets, req.tolerance)
    results = [from_bound("es_term", report.bound)]
    if report.zero is not None:
        results.append(from_bound("es_term.zero", report.zero))
    return CheckOutcome([{"coverage": list(report.coverage), "expectation": report.expectation}], results)


def run_single_factor(req: CheckRequest) -> CheckOutcome:
    check = single_factor_moment_check(req.function, float(req.params["q"]), req.tolerance)
    return CheckOutcome([], [from_bound("single_factor", check)])


# --- invariance ---


def _ensembles(req: CheckRequest):
    n = req.function.n
    return parse_ensemble(str(req.params["x"]), n), parse_ensemble(str(req.params["y"]), n)


def _exact_mode(value) -> bool | None:
    if value not in EXACT_MODES:
        raise ValueError(f"Unknown mode {value!r}; use one of {sorted(EXACT_MODES)}.")
    return EXACT_MODES[value]


def run_invariance(req: CheckRequest) -> CheckOutcome:
    X, Y = _ensembles(req)
    report = invariance_bound_check(
        req.function,
        X,
        Y,
        parse_test_function(str(req.params["phi"])),
        int(req.params["samples"]),
        int(req.params["seed"]),
        _exact_mode(req.params["mode"]),
        req.tolerance,
    )
    diff = report.diff
    row = {
        "degree": report.degree,
        "epsilon": report.epsilon,
        "energy": report.energy,
        "expectation_x": diff.expectation_x,
        "expectation_y": diff.expectation_y,
        "estimate": diff.estimate,
        "mc_error": diff.mc_error,
        "exact": diff.exact,
        "samples": diff.samples,
        "vacuous": report.vacuous,
    }
    return CheckOutcome(
        [row], [from_bound("invariance", report.proof), from_bound("invariance.stated", report.stated, False)]
    )


def run_telescoping(req: CheckRequest) -> CheckOutcome:
    X, Y = _ensembles(req)
    report = telescoping_sum(req.function, X, Y, parse_test_function(str(req.params["phi"])))
    rows = [{"t": t, "step": step} for t, step in enumerate(report.steps, start=1)]
    return CheckOutcome(rows, [CheckResult("telescoping", report.direct, report.total, report.passed)])


def run_poly_influences(req: CheckRequest) -> CheckOutcome:
    f = req.function
    X, _ = _ensembles(req)
    table = poly_influences(f, X)
    sizes = popcounts(f.n)
    limit = int(req.params["r_max"])
    rows = [{"mask": int(m), "S": members(int(m)), "I_S": float(table[m])} for m in np.flatnonzero(sizes <= limit)]
    return CheckOutcome(rows, [])


def default_rho_list() -> str:
    return "/".join(f"{r:g}" for r in (0.1, 0.25, 0.5, 0.75, 0.9))


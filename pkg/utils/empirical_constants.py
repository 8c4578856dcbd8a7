# ruff: noqa: E402
"""
Sweeps the generator zoo and logs the smallest constants with which the existential theorems
hold on every instance: the Kahn-Kalai variant, the Bourgain influence form and the traditional
sharp-threshold theorem.

    uv run python utils/empirical_constants.py --p 0.1,0.2,0.3 --max-n 10
"""

import argparse
import logging
import math
import os
import sys

from dotenv import load_dotenv

project_root = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
sys.path.insert(0, os.path.join(project_root, "src"))

from cube_core.generators import generate
from cube_core.models import CubeFunction
from cube_core.transform import is_monotone, mu_measure
from cube_influence.influences import total_influence
from cube_stability.isoperimetry import bourgain_witness_search, kahn_kalai_variant_search
from cube_threshold.curves import critical_probability, measure_at
from cube_threshold.sharp import trad_min_constant

logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")
logger = logging.getLogger(__name__)

HYPOTHESIS_SLACK = 1e-9  # K sits this far above the smallest value meeting a strict hypothesis

# (generator, parameters) pairs; without an explicit n the smallest dimension that fits is used.
ZOO = [
    ("dictator", {}),
    ("and", {"k": 3}),
    ("or", {"k": 3}),
    ("majority", {"k": 3}),
    ("majority", {"k": 5}),
    ("majority", {"k": 7}),
    ("tribes", {"s": 2, "w": 2}),
    ("tribes", {"s": 3, "w": 3}),
    ("antitribes", {"s": 2, "w": 3}),
    ("antitribes", {"s": 3, "w": 3}),
    ("antitribes_pinned", {"s": 2, "w": 2, "t": 2}),
    ("hamming_ball", {"n": 7, "alpha": 0.3}),
    ("random_boolean", {"n": 6, "seed": 1}),
    ("random_boolean", {"n": 6, "seed": 2}),
]


class BaseConstantAnalyzer:
    """Tracks the worst instance for one theorem: the constant every instance can live with."""

    name = ""

    def __init__(self):
        self.worst = 0.0
        self.worst_instance: str | None = None
        self.instances = 0

    def process(self, label: str, f: CubeFunction):
        value = self.min_constant(f)
        if value is None:
            return
        self.instances += 1
        logger.debug("%s on %s: %.4g", self.name, label, value)
        if value > self.worst:
            self.worst, self.worst_instance = value, label

    def min_constant(self, f: CubeFunction) -> float | None:
        raise NotImplementedError

    def report(self):
        if not self.instances:
            logger.warning("%s: no instance met the hypothesis.", self.name)
            return
        logger.info(
            "%s: C >= %.4g over %d instances (worst: %s)", self.name, self.worst, self.instances, self.worst_instance
        )


class KahnKalaiAnalyzer(BaseConstantAnalyzer):
    name = "kahn-kalai"

    def min_constant(self, f):
        measure = mu_measure(f)
        scaled = f.cube.p * total_influence(f)
        if measure <= 0.0 or scaled <= 0.0:
            return None
        return kahn_kalai_variant_search(f, scaled / measure * (1.0 + HYPOTHESIS_SLACK)).min_constant


class BourgainAnalyzer(BaseConstantAnalyzer):
    """c with max I_S(f) = 5^{-cK}; the theorem claims c = 8 suffices."""

    name = "bourgain"

    def min_constant(self, f):
        measure = mu_measure(f)
        if not 0.0 < measure < 1.0:
            return None
        report = bourgain_witness_search(f)
        return report.influence.min_constant if report.hypothesis_met else None


class SharpThresholdAnalyzer(BaseConstantAnalyzer):
    """C with mu_q >= mu_p^{(p/q)^{1/C}} for q = p_c and p = ratio * p_c, monotone f only."""

    name = "sharp-threshold"

    def __init__(self, ratio: float):
        super().__init__()
        self.ratio = ratio

    def min_constant(self, f):
        if not is_monotone(f) or not 0.0 < mu_measure(f) < 1.0:
            return None
        q = critical_probability(f)
        p = self.ratio * q
        value = trad_min_constant(measure_at(f, p), measure_at(f, q), p, q)
        return value if math.isfinite(value) else None


def zoo(biases: list[float], max_n: int):
    for kind, params in ZOO:
        for p in biases:
            f = generate(kind, p=p, **params)
            if f.n > max_n or not f.is_boolean():
                continue
            shown = ",".join(f"{k}={v}" for k, v in params.items())
            yield f"{kind}:{shown}@p={p:g}" if shown else f"{kind}@p={p:g}", f


def main():
    load_dotenv()
    parser = argparse.ArgumentParser(description="Smallest working constants of the existential theorems over the zoo.")
    parser.add_argument("--p", type=str, default="0.1,0.2,0.3,0.4", help="Comma-separated biases to sweep.")
    parser.add_argument("--max-n", type=int, default=12, help="Skip instances with more coordinates than this.")
    parser.add_argument("--ratio", type=float, default=0.5, help="p / p_c for the sharp-threshold sweep.")
    parser.add_argument("--verbose", "-v", action="store_true", help="Log every instance.")
    args = parser.parse_args()

    if args.verbose:
        logger.setLevel(logging.DEBUG)
    if not 0.0 < args.ratio < 1.0:
        logger.error("--ratio must lie in (0, 1), got %g.", args.ratio)
        return

    analyzers = [KahnKalaiAnalyzer(), BourgainAnalyzer(), SharpThresholdAnalyzer(args.ratio)]
    biases = [float(p) for p in args.p.split(",") if p.strip()]
    count = 0
    for label, f in zoo(biases, args.max_n):
        count += 1
        for analyzer in analyzers:
            analyzer.process(label, f)
    logger.info("Swept %d instances.", count)
    for analyzer in analyzers:
        analyzer.report()


if __name__ == "__main__":
    main()

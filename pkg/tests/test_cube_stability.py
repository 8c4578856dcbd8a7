import math

import numpy as np
import pytest
from pytest import approx

from cube_core.bits import popcounts
from cube_core.generators import GENERATORS, generate
from cube_core.models import BiasedCube, CubeFunction
from cube_core.transform import forward_transform, inverse_transform, is_monotone, mu_measure
from cube_influence.influences import influence_spectrum, total_influence
from cube_stability.concentration import (
    concentration_check,
    concentration_ratio,
    low_degree_mass,
    normtruncate_check,
    truncate,
    warmup_check,
)
from cube_stability.isoperimetry import bourgain_witness_search, kahn_kalai_variant_search
from cube_stability.sharpness import sharpness_tables


def random_boolean(n: int, p: float, seed: int) -> CubeFunction:
    rng = np.random.default_rng(seed)
    return CubeFunction(BiasedCube(n, p), rng.integers(0, 2, size=1 << n).astype(float))


# --- truncation and concentration ---


def test_truncate_and_of_two():
    """Only the top coefficient 3/16 is dropped at r = 1."""
    F = forward_transform(generate("and", n=2, p=0.25))
    low = truncate(F, 1)
    assert low.coeffs[3] == 0.0
    assert F.coeffs[3] == approx(3 / 16)
    assert low_degree_mass(F, 1) == approx(7 / 256)


def test_truncate_endpoints_and_split():
    f = random_boolean(6, 0.3, seed=0)
    F = forward_transform(f)
    assert truncate(F, 6).coeffs == approx(F.coeffs)
    assert inverse_transform(truncate(F, 0)).values == approx(np.full(64, mu_measure(f)))
    low = truncate(F, 2)
    assert truncate(low, 2).coeffs == approx(low.coeffs)
    high = np.sum(np.square(F.coeffs - low.coeffs))
    assert low_degree_mass(F, 2) + high == approx(np.sum(np.square(F.coeffs)))
    with pytest.raises(ValueError):
        truncate(F, -1)


def test_warmup_examples():
    report = warmup_check(generate("constant", n=2, c=1.0), 0)
    assert report.margin == approx(0.0, abs=1e-12)

    report = warmup_check(generate("dictator", n=1), 1)
    assert report.low_mass == approx(0.5)
    assert report.bound.rhs == approx(3 * 0.5**1.5)
    assert report.passed


def test_warmup_sweep():
    for seed in range(40):
        f = random_boolean(2 + seed % 11, 0.5, seed)
        for r in range(5):
            assert warmup_check(f, r).passed, (seed, r)


def test_warmup_rejects_bias_and_real_values():
    with pytest.raises(ValueError):
        warmup_check(generate("dictator", n=2, p=0.3), 1)
    with pytest.raises(ValueError):
        warmup_check(generate("random", n=2), 1)


def test_concentration_on_zero_function():
    report = concentration_check(generate("constant", n=3, c=0.0), 1, 0.5)
    assert report.low_mass == 0.0
    assert report.influence_hypothesis and report.global_hypothesis
    assert report.bound == 0.0
    assert report.passed


def test_concentration_on_dictator_is_not_asserted():
    report = concentration_check(generate("dictator", n=3, p=0.1), 1, 0.01)
    assert not report.global_hypothesis
    assert not report.influence_hypothesis
    assert not report.asserted
    assert report.bound is None


def test_concentration_on_antitribes():
    f = generate("antitribes", s=3, w=3, p=0.15)
    sizes = popcounts(f.n)
    delta = float(influence_spectrum(truncate(forward_transform(f), 2))[sizes <= 2].max())
    report = concentration_check(f, 2, delta)
    assert report.influence_hypothesis
    assert report.influence_form.margin > 0
    assert report.passed


@pytest.mark.parametrize("p", [0.1, 0.3])
def test_concentration_sweep_with_witnessed_delta(p: float):
    for seed in range(10):
        f = random_boolean(7, p, seed)
        for r in (1, 2, 3):
            spectrum = influence_spectrum(truncate(forward_transform(f), r))
            delta = float(spectrum[popcounts(7) <= r].max())
            report = concentration_check(f, r, delta)
            assert report.influence_hypothesis
            assert report.passed, (seed, r)


def test_concentration_rejects_bad_arguments():
    f = generate("dictator", n=2)
    with pytest.raises(ValueError):
        concentration_check(f, 0, 0.1)
    with pytest.raises(ValueError):
        concentration_check(f, 1, 0.0)
    with pytest.raises(ValueError):
        concentration_check(generate("random", n=2), 1, 0.1)


def test_concentration_ratio():
    assert concentration_ratio(generate("dictator", n=1), 0) == approx(0.5)
    with pytest.raises(ValueError):
        concentration_ratio(generate("constant", n=1, c=0.0), 1)


def test_normtruncate_on_constants():
    for c in (0.0, 1.0):
        check = normtruncate_check(generate("constant", n=3, c=c), 2)
        assert check.margin == approx(0.0, abs=1e-12)


def test_normtruncate_sweep():
    for seed in range(20):
        f = random_boolean(3 + seed % 8, 0.25, seed)
        for r in range(4):
            assert normtruncate_check(f, r).passed, (seed, r)


def test_normtruncate_on_tribes():
    f = generate("tribes", s=2, w=2, p=0.3)
    for r in (1, 2, 3):
        assert normtruncate_check(f, r).margin > 0


def test_normtruncate_rejects_small_delta():
    with pytest.raises(ValueError, match="below"):
        normtruncate_check(generate("majority", n=3), 2, delta=1e-9)


# --- isoperimetric stability ---


def test_kahn_kalai_on_subcube():
    """The AND of three coordinates is fully restored by fixing them."""
    f = generate("and", n=5, k=3, p=0.2)
    assert 0.2 * total_influence(f) == approx(3 * mu_measure(f))
    witness = kahn_kalai_variant_search(f, K=4.0)
    assert witness.hypothesis_met
    assert witness.subset == 0b111
    assert witness.boost == approx(1.0)
    assert witness.found
    assert witness.min_constant == approx(0.5)


def test_kahn_kalai_on_constant():
    witness = kahn_kalai_variant_search(generate("constant", n=3, c=1.0, p=0.3), K=1.0)
    assert witness.hypothesis_met
    assert witness.subset == 0
    assert witness.boost == approx(1.0)
    assert witness.min_constant == approx(0.0)


def test_kahn_kalai_reports_unmet_hypothesis():
    witness = kahn_kalai_variant_search(generate("dictator", n=2), K=0.5)
    assert not witness.hypothesis_met
    row = witness.row("dictator")
    assert set(row) == {"instance", "K", "|J|", "bump", "threshold", "min_constant"}


@pytest.mark.parametrize("p", [0.1, 0.3, 0.5])
def test_kahn_kalai_over_the_zoo(p: float):
    for name in GENERATORS:
        f = generate(name, n=6, p=p)
        if not f.is_boolean() or mu_measure(f) == 0.0:
            continue
        K = max(1.0, 1.01 * p * total_influence(f) / mu_measure(f))
        witness = kahn_kalai_variant_search(f, K)
        assert witness.hypothesis_met
        assert witness.found, (name, p)
        assert witness.min_constant <= 10.0


def test_kahn_kalai_rejects_bad_arguments():
    f = generate("dictator", n=2)
    with pytest.raises(ValueError):
        kahn_kalai_variant_search(f, K=0.0)
    with pytest.raises(ValueError):
        kahn_kalai_variant_search(generate("random", n=2), K=1.0)


def test_bourgain_on_dictator():
    report = bourgain_witness_search(generate("dictator", n=3, p=0.3))
    assert report.K == approx(0.3 / 0.21)
    assert report.hypothesis_met
    assert report.influence.subset == 1
    assert report.influence.boost == approx(1.0)
    assert report.restriction.boost == approx(0.7)
    assert report.passed


def test_bourgain_on_majority():
    """Generalised influences of majority grow with |S|: I_[5] is the alternating sum 6, squared."""
    report = bourgain_witness_search(generate("majority", n=5))
    assert report.K == approx(3.75)
    assert report.hypothesis_met
    assert report.influence.size_bound == 5
    assert report.influence.subset == 0b11111
    assert report.influence.boost == approx(36.0)
    assert report.restriction.subset == 0b111
    assert report.restriction.boost == approx(0.5)
    assert report.bounded_away
    assert report.passed


def test_bourgain_on_antitribes():
    report = bourgain_witness_search(generate("antitribes", s=3, w=2))
    assert report.hypothesis_met
    assert report.influence.size <= report.influence.size_bound
    assert report.passed


def test_bourgain_forms_agree_on_monotone_functions():
    """A monotone f that is (r, delta)-global has I_S <= 8^r delta for nonempty |S| <= r."""
    for p in (0.2, 0.5):
        for name in GENERATORS:
            f = generate(name, n=6, p=p)
            if not f.is_boolean() or not is_monotone(f) or np.ptp(f.values) == 0.0:
                continue
            report = bourgain_witness_search(f)
            r = report.influence.size_bound
            assert report.restriction.boost >= report.influence.boost / 8**r - 1e-12, (name, p)
            assert report.passed, (name, p)


def test_bourgain_on_constants():
    with pytest.raises(ValueError):
        bourgain_witness_search(generate("constant", n=2, c=1.0))
    report = bourgain_witness_search(generate("constant", n=2, c=1.0), K=1.0)
    assert not report.hypothesis_met
    assert report.passed


# --- sharpness tables ---


def test_eg1_table():
    table = sharpness_tables("eg1")
    assert table.summary["measure_closed"] == approx(27 / 64)
    assert table.summary["measure_enumerated"] == approx(27 / 64, abs=1e-12)
    assert table.summary["influence_enumerated"] == approx(table.summary["influence_closed"])
    assert [row["t"] for row in table.rows] == [0, 1, 2, 3]
    assert table.rows[-1]["max_restricted"] == approx(1.0)
    for row in table.rows:
        assert row["max_restricted"] == approx(row["exact"])
        assert row["corrected_holds"]
    assert not any(row["stated_holds"] for row in table.rows[1:])


def test_eg2_influence_matches_derivative():
    table = sharpness_tables("eg2", {"s": 4, "w": 2, "t": 2, "p": 0.4})
    summary = table.summary
    assert summary["measure_enumerated"] == approx(summary["measure_closed"], abs=1e-12)
    assert summary["influence_enumerated"] == approx(summary["influence_closed"])
    assert summary["measure_derivative"] == approx(summary["influence_closed"], rel=1e-6)


def test_eg2_bump_stays_small_within_half():
    table = sharpness_tables("eg2", {"s": 6, "w": 3, "t": 1, "p": 0.3})
    assert table.summary["n"] == 19
    assert table.summary["K"] == approx(6 * 0.7**3)
    assert table.summary["half_bound_holds"]
    for row in table.rows:
        assert row["max_restricted"] <= row["decay_bound"] * (1 + 1e-12)
    assert table.summary["max_within_half"] <= math.exp(-table.summary["K"] / 2)


def test_sharpness_rejects_unknown_input():
    with pytest.raises(ValueError):
        sharpness_tables("eg3")
    with pytest.raises(ValueError):
        sharpness_tables("eg1", {"k": 2})

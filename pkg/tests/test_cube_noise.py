import numpy as np
import pytest
from pytest import approx

from cube_core.generators import generate
from cube_core.models import BiasedCube, CubeFunction
from cube_core.transform import inner, lr_norm, mu_measure
from cube_noise.directed import (
    DirectedOperator,
    calcrho_identity_check,
    directed_apply,
    directed_coapply,
    sample_coupling,
)
from cube_noise.operators import (
    KERNEL,
    NoiseOperator,
    apply_noise,
    hamming_ball_comparison,
    noise_curve,
    noise_sensitivity_check,
    noise_stability,
)


def random_function(n: int, p: float, seed: int, allow_upper: bool = False) -> CubeFunction:
    rng = np.random.default_rng(seed)
    return CubeFunction(BiasedCube(n, p, allow_upper=allow_upper), rng.standard_normal(1 << n))


def test_noisy_dictator():
    """T_rho x_1 = rho x_1 + (1 - rho) p."""
    for p in (0.1, 0.25):
        f = generate("dictator", n=2, p=p)
        expected = 0.3 * f.values + 0.7 * p
        assert apply_noise(f, 0.3).values == approx(expected, abs=1e-12)


def test_noise_endpoints():
    f = random_function(5, 0.2, seed=0)
    assert apply_noise(f, 1.0).values == approx(f.values, abs=1e-12)
    assert apply_noise(f, 0.0).values == approx(np.full(32, mu_measure(f)), abs=1e-12)


def test_noise_rejects_rho_outside_unit_interval():
    with pytest.raises(ValueError):
        apply_noise(generate("dictator", n=1), 1.5)
    with pytest.raises(ValueError):
        NoiseOperator(-0.1, BiasedCube(1, 0.5))


@pytest.mark.parametrize("p", [0.1, 0.3, 0.5])
@pytest.mark.parametrize("rho", [0.0, 0.2, 0.7, 1.0])
def test_kernel_agrees_with_spectral_multiplier(p: float, rho: float):
    for n in (1, 4, 7):
        f = random_function(n, p, seed=n)
        spectral = apply_noise(f, rho)
        kernel = apply_noise(f, rho, method=KERNEL)
        assert np.max(np.abs(spectral.values - kernel.values)) <= 1e-10


def test_semigroup():
    cube = BiasedCube(6, 0.3)
    f = random_function(6, 0.3, seed=1)
    a, b = NoiseOperator(0.6, cube), NoiseOperator(0.5, cube)
    assert a(b(f)).values == approx(a.then(b)(f).values, abs=1e-12)


def test_contraction():
    for seed in range(10):
        f = random_function(6, 0.15, seed)
        for r in (2, 4):
            assert lr_norm(apply_noise(f, 0.4), r) <= lr_norm(f, r) + 1e-12


def test_stability_examples():
    assert noise_stability(generate("dictator", n=1, p=0.5), 0.5) == approx(3 / 8)
    f = random_function(4, 0.2, seed=2)
    assert noise_stability(f, 1.0) == approx(inner(f, f))
    assert noise_stability(generate("parity", n=2, p=0.5, signed=1), 0.6) == approx(0.36)
    assert noise_stability(f, 0.3, method=KERNEL) == approx(noise_stability(f, 0.3), rel=1e-10)


def test_noise_curve_rows():
    rows = noise_curve(generate("dictator", n=1, p=0.5), [0.0, 0.5, 1.0])
    assert [row["rho"] for row in rows] == [0.0, 0.5, 1.0]
    assert [row["stability"] for row in rows] == approx([0.25, 0.375, 0.5])


def test_noise_sensitivity_on_zero_function():
    report = noise_sensitivity_check(generate("constant", n=3, c=0.0), 0.5, 0.25)
    assert report.stability == 0.0
    assert report.conclusion.passed


def test_noise_sensitivity_on_dictator():
    report = noise_sensitivity_check(generate("dictator", n=1, p=0.25), 0.5, 0.25)
    assert report.r == approx(3.0)
    assert report.delta == approx(1e-10 / 64)
    assert not report.hypothesis_met
    assert not report.conclusion.passed


def test_noise_sensitivity_reports_pinned_antitribes():
    report = noise_sensitivity_check(generate("antitribes_pinned", s=2, w=2, t=1, p=0.3), 0.2, 0.5)
    assert report.stability >= 0.0
    assert report.measure == approx(0.3 * 0.51**2)
    assert report.conclusion.margin == approx(0.5 * report.measure - report.stability)


def test_hamming_ball_comparison_of_a_ball_with_itself():
    majority = generate("majority", n=3, p=0.5)
    comparison = hamming_ball_comparison(majority, majority, 0.4)
    assert comparison.thresholds == (2, 2)
    assert comparison.gap == approx(0.0, abs=1e-12)


# --- directed operator ---


def test_directed_rho():
    assert DirectedOperator(1 / 3, 2 / 3).rho == approx(0.25, abs=1e-15)
    assert abs(DirectedOperator(0.3, 0.301).rho - 1.0) < 1e-2
    with pytest.raises(ValueError):
        DirectedOperator(0.5, 0.4)


def test_directed_apply_examples():
    op = DirectedOperator(0.2, 0.5)
    g = directed_apply(generate("dictator", n=1, p=0.2), op)
    assert g.cube.p == 0.5
    assert g.values == approx([0.0, 0.4])
    constant = directed_apply(generate("constant", n=3, p=0.2, c=1.7), op)
    assert constant.values == approx([1.7] * 8)


def test_directed_monotone_correlation_equals_source_measure():
    op = DirectedOperator(0.2, 0.45)
    f = generate("antitribes", s=2, w=2, p=0.2)
    on_target = CubeFunction(op.target(f.n), f.values)
    assert inner(on_target, directed_apply(f, op)) == approx(mu_measure(f), abs=1e-12)


def test_directed_adjointness():
    op = DirectedOperator(0.1, 0.4)
    for seed in range(10):
        f = random_function(6, 0.1, seed)
        g = CubeFunction(op.target(6), np.random.default_rng(100 + seed).standard_normal(64))
        assert abs(inner(directed_apply(f, op), g) - inner(f, directed_coapply(g, op))) <= 1e-12


def test_directed_rejects_wrong_bias():
    with pytest.raises(ValueError):
        directed_apply(generate("dictator", n=1, p=0.3), DirectedOperator(0.2, 0.5))


@pytest.mark.parametrize("p,q", [(1 / 3, 2 / 3), (0.1, 0.4)])
def test_calcrho_identity(p: float, q: float):
    for seed in range(5):
        f = random_function(8, 0.5, seed)
        assert calcrho_identity_check(f, p, q) <= 1e-12
    assert calcrho_identity_check(generate("constant", n=3, c=2.0), p, q) == approx(0.0, abs=1e-15)


def test_coupling_samples_are_ordered_with_correct_marginals():
    x, y = sample_coupling(0.2, 0.5, n=4, size=100_000, seed=7)
    assert np.all(x <= y)
    assert x.mean(axis=0) == approx([0.2] * 4, abs=0.01)
    assert y.mean(axis=0) == approx([0.5] * 4, abs=0.01)
    x2, y2 = sample_coupling(0.2, 0.5, n=4, size=100_000, seed=7)
    assert np.array_equal(x, x2)
    assert np.array_equal(y, y2)

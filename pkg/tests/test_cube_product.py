import os
import unittest
from unittest.mock import patch

import numpy as np
import pytest
from pytest import approx

from cube_core.bits import members
from cube_core.models import BiasedCube, CubeFunction, SpectralForm
from cube_core.transform import forward_transform, inverse_transform, lr_norm
from cube_hyper.fourth_moment import hypref_bound_check
from cube_influence.influences import derivative
from cube_noise.operators import apply_noise
from cube_product.decomposition import (
    COMPOSITION,
    KERNEL,
    SPECTRAL,
    es_decompose,
    laplacian,
    product_noise,
    product_noise_kernel,
)
from cube_product.moments import (
    es_hyper_check,
    es_product_term_check,
    holder_term_check,
    single_factor_moment_check,
)
from cube_product.spaces import ProductFunction, ProductSpace, random_product_function, random_space

MIXED = ProductSpace(((0.2, 0.8), (0.2, 0.3, 0.5), (0.8, 0.2)))


def depends_on(g: ProductFunction, mask: int) -> ProductFunction:
    """E of g over the coordinates outside mask."""
    for t in range(g.space.n):
        if not mask >> t & 1:
            g = g.condition_out(t)
    return g


def random_cube_function(n: int, p: float, seed: int) -> CubeFunction:
    rng = np.random.default_rng(seed)
    return CubeFunction(BiasedCube(n, p), rng.standard_normal(1 << n))


# --- spaces ---


def test_space_layout():
    assert MIXED.arities == (2, 3, 2)
    assert MIXED.size == 12
    assert MIXED.p == approx(0.2)
    assert MIXED.weights.sum() == approx(1.0)
    # digit 0 varies fastest
    assert MIXED.weights[:2] == approx([0.2 * 0.2 * 0.8, 0.8 * 0.2 * 0.8])
    assert list(MIXED.digits(1)[:6]) == [0, 0, 1, 1, 2, 2]


def test_space_rejects_bad_factors():
    with pytest.raises(ValueError):
        ProductSpace(((0.5, 0.5),))
    with pytest.raises(ValueError):
        ProductSpace(((0.3, 0.6),))
    with pytest.raises(ValueError):
        ProductSpace(((1.0,),))
    with pytest.raises(ValueError):
        ProductSpace(((0.0, 0.4, 0.6),))


def test_binary_space_matches_cube_weights():
    f = random_cube_function(3, 0.3, seed=0)
    g = ProductFunction.from_cube(f)
    assert g.expectation() == approx(forward_transform(f).coeffs[0], abs=1e-12)


class TestSpaceCap(unittest.TestCase):
    @patch.dict(os.environ, {"PCUBE_NCAP": "3"})
    def test_size_over_cap_is_rejected(self):
        with self.assertRaises(ValueError):
            ProductSpace(((0.2, 0.3, 0.5), (0.2, 0.3, 0.5)))

    @patch.dict(os.environ, {"PCUBE_NCAP": "3"})
    def test_size_at_cap_is_accepted(self):
        self.assertEqual(ProductSpace.binary(3, 0.25).size, 8)


# --- Efron-Stein decomposition ---


def test_constant_has_a_single_component():
    f = ProductFunction(MIXED, np.full(12, 2.5))
    decomposition = es_decompose(f)
    assert decomposition.components[0] == approx(np.full(12, 2.5))
    assert np.max(np.abs(decomposition.components[1:])) <= 1e-12


def test_ternary_indicator():
    space = ProductSpace(((0.2, 0.3, 0.5),))
    f = ProductFunction(space, [1.0, 0.0, 0.0])
    decomposition = es_decompose(f)
    assert decomposition.components[0] == approx([0.2, 0.2, 0.2])
    assert decomposition.components[1] == approx([0.8, -0.2, -0.2])


@pytest.mark.parametrize("seed", range(200))
def test_decomposition_invariants_on_mixed_spaces(seed: int):
    rng = np.random.default_rng(seed)
    space = random_space(seed, int(rng.integers(1, 7)), max_arity=4)
    f = random_product_function(space, seed + 1000)
    residuals = es_decompose(f).invariant_residuals(f)
    for name, value in residuals.items():
        assert value <= 1e-10, name


def test_plancherel():
    space = random_space(7, 3)
    f = random_product_function(space, 1)
    g = random_product_function(space, 2)
    F, G = es_decompose(f), es_decompose(g)
    termwise = sum(F.component(m).inner(G.component(m)) for m in range(1 << space.n))
    assert termwise == approx(f.inner(g), abs=1e-10)


@pytest.mark.parametrize("p", [0.1, 0.3, 0.45])
def test_binary_components_are_fourier_terms(p: float):
    f = random_cube_function(4, p, seed=3)
    F = forward_transform(f)
    decomposition = es_decompose(ProductFunction.from_cube(f))
    for mask in range(16):
        term = inverse_transform(SpectralForm.from_terms(f.cube, {mask: F.coeffs[mask]}))
        assert np.max(np.abs(decomposition.components[mask] - term.values)) <= 1e-10


def test_decomposition_on_the_empty_space():
    f = ProductFunction(ProductSpace(()), [3.0])
    assert es_decompose(f).components[0] == approx([3.0])


# --- Laplacians ---


def test_laplacian_paths_agree():
    f = random_product_function(MIXED, 5)
    for mask in range(8):
        composed = laplacian(f, mask, COMPOSITION).values
        spectral = laplacian(f, mask, SPECTRAL).values
        assert composed == approx(spectral, abs=1e-10)
    assert laplacian(f, 0).values == approx(f.values)


def test_laplacian_of_constant_vanishes():
    f = ProductFunction(MIXED, np.ones(12))
    for mask in range(1, 8):
        assert np.max(np.abs(laplacian(f, mask).values)) <= 1e-12


def test_binary_laplacian_norm_is_derivative_norm():
    f = random_cube_function(4, 0.2, seed=9)
    g = ProductFunction.from_cube(f)
    for mask in range(16):
        assert laplacian(g, mask).norm(2) == approx(lr_norm(derivative(f, members(mask)), 2), abs=1e-10)


def test_laplacian_energies_match_norms():
    f = random_product_function(MIXED, 6)
    energies = es_decompose(f).laplacian_energies
    for mask in range(8):
        assert energies[mask] == approx(laplacian(f, mask).norm(2) ** 2, abs=1e-10)


def test_laplacian_rejects_bad_input():
    f = random_product_function(MIXED, 0)
    with pytest.raises(ValueError):
        laplacian(f, 8)
    with pytest.raises(ValueError):
        laplacian(f, 1, "fourier")


# --- noise ---


def test_noise_endpoints():
    f = random_product_function(MIXED, 11)
    assert product_noise(f, 1.0).values == approx(f.values, abs=1e-12)
    assert product_noise(f, 0.0).values == approx(np.full(12, f.expectation()), abs=1e-12)


@pytest.mark.parametrize("rho", [0.0, 0.2, 0.7, 1.0])
def test_noise_kernel_matches_spectral(rho: float):
    f = random_product_function(MIXED, 12)
    assert product_noise(f, rho, KERNEL).values == approx(product_noise(f, rho, SPECTRAL).values, abs=1e-10)


def test_noise_kernel_is_stochastic():
    K = product_noise_kernel(MIXED, 0.4)
    assert K.shape == (12, 12)
    assert K.sum(axis=1) == approx(np.ones(12))
    assert MIXED.weights @ K == approx(MIXED.weights)


def test_binary_noise_matches_the_cube():
    f = random_cube_function(4, 0.3, seed=13)
    for rho in (0.1, 0.5, 0.9):
        assert product_noise(ProductFunction.from_cube(f), rho).values == approx(apply_noise(f, rho).values, abs=1e-10)


def test_noise_rejects_bad_rho():
    f = random_product_function(MIXED, 0)
    with pytest.raises(ValueError):
        product_noise(f, 1.5)


# --- product-space hypercontractivity ---


def test_es_hyper_equality_on_constant():
    check = es_hyper_check(ProductFunction(MIXED, np.full(12, 1.5)), 4, 1 / 64)
    assert check.lhs == approx(1.5**4)
    assert check.margin == approx(0.0, abs=1e-10)


def test_es_hyper_over_seeds():
    for seed in range(100):
        check = es_hyper_check(random_product_function(MIXED, seed), 4, 1 / 64)
        assert check.passed, seed


def test_es_hyper_at_q6():
    space = random_space(3, 3, max_arity=3)
    rho = 1 / (8 * 6**1.5)
    for seed in range(10):
        assert es_hyper_check(random_product_function(space, seed), 6, rho).passed


def test_es_hyper_is_weaker_than_the_cube_bound():
    for seed in range(10):
        f = random_cube_function(4, 0.2, seed)
        es = es_hyper_check(ProductFunction.from_cube(f), 4, 1 / 64)
        cube = hypref_bound_check(f, 1 / 64)
        assert es.passed and cube.passed
        assert es.lhs == approx(cube.lhs, rel=1e-9)
        assert es.rhs >= cube.rhs


def test_es_hyper_rejects_bad_parameters():
    f = random_product_function(MIXED, 0)
    with pytest.raises(ValueError):
        es_hyper_check(f, 4, 0.02)
    with pytest.raises(ValueError):
        es_hyper_check(f, 3, 0.01)


# --- Holder terms ---


def test_single_coverage_term_vanishes():
    g = random_product_function(MIXED, 21)
    report = es_product_term_check(g, [0b011, 0b010, 0b110, 0b100])
    assert report.single_covered
    assert report.zero is not None and report.zero.passed
    assert abs(report.expectation) <= 1e-12
    assert report.passed


def test_constant_terms_are_tight():
    fs = [ProductFunction(MIXED, np.full(12, c)) for c in (2.0, -1.0, 0.5, 3.0)]
    report = holder_term_check(fs, [0, 0, 0, 0])
    assert report.expectation == approx(-3.0)
    assert report.bound.margin == approx(0.0, abs=1e-12)


def test_double_coverage_terms():
    space = random_space(4, 4, max_arity=3)
    sets = [0b0011, 0b0001, 0b1110, 0b1100]
    for seed in range(20):
        fs = [depends_on(random_product_function(space, 10 * seed + i), mask) for i, mask in enumerate(sets)]
        report = holder_term_check(fs, sets)
        assert report.coverage == (2, 2, 2, 2)
        assert report.bound.margin >= -1e-12


def test_triple_coverage_uses_sigma():
    sets = [0b001, 0b001, 0b001, 0b110]
    fs = [depends_on(random_product_function(MIXED, i), mask) for i, mask in enumerate(sets)]
    report = holder_term_check(fs, sets)
    assert report.coverage == (3, 1, 1)
    assert report.zero is None
    assert report.passed


def test_components_over_many_configurations():
    g = random_product_function(MIXED, 33)
    rng = np.random.default_rng(0)
    for _ in range(50):
        sets = [int(m) for m in rng.integers(0, 8, size=4)]
        assert es_product_term_check(g, sets).passed, sets


def test_holder_rejects_dependence_violations():
    f = random_product_function(MIXED, 0)
    with pytest.raises(ValueError):
        holder_term_check([f, f], [0b001, 0b111])
    with pytest.raises(ValueError):
        holder_term_check([f], [0b111, 0b111])


# --- single factor ---


@pytest.mark.parametrize("q", [4, 6])
def test_single_factor_moments(q: int):
    for seed in range(20):
        space = random_space(seed, 1, max_arity=5)
        assert single_factor_moment_check(random_product_function(space, seed), q).passed


def test_single_factor_needs_one_factor():
    with pytest.raises(ValueError):
        single_factor_moment_check(random_product_function(MIXED, 0), 4)

import math
import os
import unittest
from unittest.mock import patch

import numpy as np
import pytest
from pytest import approx

from cube_core.bits import mask_of, members, popcounts, subset_sums, superset_sums
from cube_core.generators import (
    GENERATORS,
    antitribes_measure,
    generate,
    generate_from_spec,
    parse_generator_spec,
    tribes_measure,
)
from cube_core.models import BiasedCube, BoundCheck, CubeFunction, SpectralForm
from cube_core.transform import (
    cube_weights,
    dual,
    forward_transform,
    inner,
    inverse_transform,
    is_monotone,
    lr_norm,
    mu_measure,
    restrict,
    restricted_measures,
)


def random_function(n: int, p: float, seed: int) -> CubeFunction:
    rng = np.random.default_rng(seed)
    return CubeFunction(BiasedCube(n, p), rng.standard_normal(1 << n))


# --- bits ---


def test_masks_and_members():
    assert mask_of([0, 2]) == 5
    assert members(5) == [0, 2]
    assert members(0) == []
    assert list(popcounts(3)) == [0, 1, 1, 2, 1, 2, 2, 3]


def test_zeta_transforms_on_two_coordinates():
    table = np.array([1.0, 2.0, 3.0, 4.0])
    assert list(superset_sums(table)) == [10.0, 6.0, 7.0, 4.0]
    assert list(subset_sums(table)) == [1.0, 3.0, 4.0, 10.0]


# --- models ---


def test_cube_rejects_bias_above_half():
    with pytest.raises(ValueError, match="Dualize"):
        BiasedCube(2, 0.7)
    assert BiasedCube(2, 0.7, allow_upper=True).p == 0.7


def test_cube_sigma():
    cube = BiasedCube(3, 0.25)
    assert cube.sigma**2 == approx(cube.p * (1 - cube.p), abs=1e-15)
    assert cube.size == 8


def test_function_length_is_checked():
    with pytest.raises(ValueError, match="Expected 4 values"):
        CubeFunction(BiasedCube(2, 0.5), [0.0, 1.0])


def test_bound_check_uses_relative_tolerance():
    assert BoundCheck(1e6 + 1e-5, 1e6).passed
    assert not BoundCheck(1.0 + 1e-6, 1.0).passed
    assert BoundCheck(0.5, 1.0).margin == approx(0.5)


class TestDimensionCap(unittest.TestCase):
    @patch.dict(os.environ, {"PCUBE_NCAP": "4"})
    def test_cap_from_environment(self):
        BiasedCube(4, 0.5)
        with self.assertRaises(ValueError):
            BiasedCube(5, 0.5)

    @patch.dict(os.environ, {"PCUBE_NCAP": "many"})
    def test_malformed_cap_is_a_config_error(self):
        with self.assertRaises(ValueError):
            BiasedCube(2, 0.5)


# --- measure and norms ---


def test_mu_measure_examples():
    assert mu_measure(generate("dictator", n=1, p=0.25)) == approx(0.25)
    assert mu_measure(generate("constant", n=3, p=0.1)) == approx(1.0)
    assert mu_measure(generate("antitribes", s=2, w=2, p=0.5)) == approx(9 / 16)


def test_lr_norm_examples():
    assert lr_norm(generate("dictator", n=1, p=0.25), 2) == approx(0.5)
    assert lr_norm(generate("constant", n=2, p=0.3, c=-1.5), 3) == approx(1.5)
    # E[chi^4] = lambda = 7/3 at p = 1/4
    assert lr_norm(generate("character", n=1, p=0.25), 4) == approx((7 / 3) ** 0.25)


def test_lr_norm_rejects_small_r():
    with pytest.raises(ValueError):
        lr_norm(generate("dictator", n=1), 0.5)


# --- transform ---


def test_forward_transform_of_dictator():
    coeffs = forward_transform(generate("dictator", n=2, p=0.25)).coeffs
    assert coeffs == approx([0.25, math.sqrt(3) / 4, 0.0, 0.0], abs=1e-15)


def test_forward_transform_of_and():
    coeffs = forward_transform(generate("and", n=2, p=0.25)).coeffs
    s3 = math.sqrt(3)
    assert coeffs == approx([1 / 16, s3 / 16, s3 / 16, 3 / 16], abs=1e-15)


def test_forward_transform_of_constant():
    coeffs = forward_transform(generate("constant", n=3, p=0.2, c=2.0)).coeffs
    assert coeffs == approx([2.0] + [0.0] * 7, abs=1e-15)


def test_inverse_transform_examples():
    cube = BiasedCube(1, 0.25)
    F = SpectralForm.from_terms(cube, {0: 0.25, 1: math.sqrt(3) / 4})
    assert inverse_transform(F).values == approx([0.0, 1.0], abs=1e-15)
    assert inverse_transform(SpectralForm(cube, [0.0, 0.0])).values == approx([0.0, 0.0])
    assert inverse_transform(SpectralForm(cube, [1.0, 0.0])).values == approx([1.0, 1.0])


def test_parity_has_one_uniform_coefficient():
    coeffs = forward_transform(generate("parity", n=2, p=0.5, signed=1)).coeffs
    assert coeffs == approx([0.0, 0.0, 0.0, 1.0], abs=1e-15)


def test_expansion_matches_brute_force_projection():
    f = random_function(3, 0.3, seed=7)
    F = forward_transform(f)
    x = (np.arange(8)[:, None] >> np.arange(3)) & 1
    chi = (x - 0.3) / f.cube.sigma
    for mask in range(8):
        char = np.prod(np.where((mask >> np.arange(3)) & 1, chi, 1.0), axis=1)
        assert F.coeffs[mask] == approx(float(np.dot(f.values * char, cube_weights(f.cube))), abs=1e-12)


@pytest.mark.parametrize("p", [0.05, 0.25, 0.5])
def test_round_trip_and_parseval(p: float):
    for seed in range(200):
        n = 1 + seed % 12
        f = random_function(n, p, seed)
        F = forward_transform(f)
        back = inverse_transform(F)
        assert np.max(np.abs(back.values - f.values)) <= 1e-10 * np.max(np.abs(f.values))
        energy = float(np.dot(np.square(f.values), cube_weights(f.cube)))
        assert float(np.sum(np.square(F.coeffs))) == approx(energy, rel=1e-10)
        assert F.coeffs[0] == approx(mu_measure(f), abs=1e-12)


def test_plancherel():
    f = random_function(6, 0.2, seed=1)
    g = random_function(6, 0.2, seed=2)
    spectral = float(np.dot(forward_transform(f).coeffs, forward_transform(g).coeffs))
    assert inner(f, g) == approx(spectral, rel=1e-10)


# --- restrictions ---


def test_restrict_examples():
    dictator_on_second = restrict(generate("and", n=2), [0], [1])
    assert dictator_on_second.values == approx([0.0, 1.0])
    zero = restrict(generate("dictator", n=1, p=0.25), [0], [0])
    assert zero.n == 0
    assert zero.values == approx([0.0])
    rest = restrict(generate("antitribes", s=2, w=2, p=0.5), [0, 1], [1, 0])
    assert rest.n == 2
    assert mu_measure(rest) == approx(3 / 4)


def test_restrict_rejects_mismatched_assignment():
    f = generate("and", n=3)
    with pytest.raises(ValueError):
        restrict(f, [0, 1], [1])
    with pytest.raises(ValueError):
        restrict(f, [0, 0], [1, 1])
    with pytest.raises(ValueError):
        restrict(f, [5], [1])
    with pytest.raises(ValueError):
        restrict(f, [0], [2])


def test_restriction_consistency():
    """Averaging the restricted measures over mu_p on S gives back mu_p(f)."""
    f = random_function(5, 0.3, seed=3)
    coords = [1, 3]
    total = 0.0
    for bits in [(0, 0), (0, 1), (1, 0), (1, 1)]:
        weight = math.prod(0.3 if b else 0.7 for b in bits)
        total += weight * mu_measure(restrict(f, coords, bits))
    assert total == approx(mu_measure(f), abs=1e-12)


def test_restricted_measures_table_agrees_with_restrict():
    f = generate("antitribes", s=2, w=2, p=0.3)
    table = restricted_measures(f)
    for mask in range(16):
        coords = members(mask)
        assert table[mask] == approx(mu_measure(restrict(f, coords, [1] * len(coords))), abs=1e-12)


# --- generators ---


def test_generator_examples():
    assert mu_measure(generate("antitribes", s=2, w=3, p=0.2)) == approx(0.238144)
    ball = generate("hamming_ball", n=3, p=0.5, alpha=0.5)
    assert ball.values == approx((popcounts(3) >= 2).astype(float))
    assert mu_measure(ball) == approx(0.5)


@pytest.mark.parametrize("s,w,p", [(2, 2, 0.5), (3, 2, 0.3), (2, 3, 0.1)])
def test_block_families_match_closed_forms(s: int, w: int, p: float):
    assert mu_measure(generate("tribes", s=s, w=w, p=p)) == approx(tribes_measure(s, w, p), abs=1e-12)
    assert mu_measure(generate("antitribes", s=s, w=w, p=p)) == approx(antitribes_measure(s, w, p), abs=1e-12)


def test_generate_rejects_overflow_and_unknown_params():
    with pytest.raises(ValueError, match="needs 4 coordinates"):
        generate("tribes", n=3, s=2, w=2)
    with pytest.raises(ValueError):
        generate("dictator", n=2, k=1)
    with pytest.raises(ValueError):
        generate("pentagon", n=2)


def test_generator_spec_strings():
    assert parse_generator_spec("antitribes:s=2,w=3") == ("antitribes", {"s": 2, "w": 3})
    f = generate_from_spec("majority:n=5", p=0.5)
    assert f.n == 5
    assert mu_measure(f) == approx(0.5)
    with pytest.raises(ValueError):
        parse_generator_spec("antitribes:s")
    with pytest.raises(ValueError):
        parse_generator_spec("antitribes:q=3")


def test_every_generator_builds_with_defaults():
    for name in GENERATORS:
        f = generate(name, n=6, p=0.3)
        assert f.values.size == 64


# --- dual and predicates ---


def test_dual_swaps_measure():
    f = generate("antitribes", s=2, w=2, p=0.3)
    g = dual(f)
    assert g.cube.p == approx(0.7)
    assert mu_measure(g) == approx(1 - mu_measure(f), abs=1e-12)
    assert dual(g).values == approx(f.values)


def test_predicates():
    assert generate("majority", n=3).is_boolean()
    assert generate("parity", n=3, signed=1).is_signed_boolean()
    assert not generate("parity", n=3, signed=1).is_boolean()
    assert is_monotone(generate("tribes", s=2, w=2))
    assert not is_monotone(generate("parity", n=2))

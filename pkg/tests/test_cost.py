import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from conftest import random_image
from sgm4k.cost import census_transform, compute_cost, cost_volume, hamming, reference_context_count
from sgm4k.errors import ParameterError

MASK24 = (1 << 24) - 1


def test_census_constant_image_is_zero():
    assert not census_transform(np.full((7, 9), 113, dtype=np.uint8)).any()


def test_census_bright_centre_sets_all_bits():
    img = np.zeros((5, 5), dtype=np.uint8)
    img[2, 2] = 255
    assert census_transform(img)[2, 2] == MASK24


def test_census_bit_order_first_neighbour_is_top_left():
    img = np.full((5, 5), 100, dtype=np.uint8)
    img[0, 0] = 0
    img[4, 4] = 0
    assert census_transform(img)[2, 2] == (1 << 0) | (1 << 23)


def test_census_matches_naive(rng):
    img = random_image(rng, 16, 16)
    assert census_transform(img).tolist() == oracles.census(img.tolist())


def test_census_uses_24_bits(rng):
    assert (census_transform(random_image(rng, 30, 20)) <= MASK24).all()


@given(st.integers(0, 200))
@settings(max_examples=30, deadline=None)
def test_census_invariant_under_brightness_offset(k):
    img = np.random.default_rng(k).integers(0, 56, size=(10, 11)).astype(np.uint8)
    assert np.array_equal(census_transform(img), census_transform(img + k))


def test_hamming_identity_and_complement():
    assert hamming(0xABCDEF, 0xABCDEF) == 0
    assert hamming(0, MASK24) == 24


@given(st.integers(0, MASK24), st.integers(0, MASK24))
def test_hamming_matches_bit_loop(a, b):
    assert hamming(a, b) == oracles.popcount(a ^ b)


def test_cost_self_match_is_zero(rng):
    c = census_transform(random_image(rng, 9, 12))
    assert not cost_volume(c, c, 5)[:, :, 0].any()


def test_cost_left_column_clamps(rng):
    cb = census_transform(random_image(rng, 6, 8))
    cr = census_transform(random_image(rng, 6, 8))
    vol = cost_volume(cb, cr, 6)
    for d in range(1, 6):
        assert np.array_equal(vol[:, 0, d], vol[:, 0, 0])


def test_cost_matches_naive(rng):
    left, right = random_image(rng, 12, 16), random_image(rng, 12, 16)
    cb, cr = oracles.census(left.tolist()), oracles.census(right.tolist())
    assert compute_cost(left, right, 8).tolist() == oracles.cost(cb, cr, 8)


def test_cost_bounds(rng):
    vol = compute_cost(random_image(rng, 20, 20), random_image(rng, 20, 20), 10)
    assert vol.min() >= 0 and vol.max() <= 24


@given(st.integers(0, 2**31), st.integers(1, 5))
@settings(max_examples=20, deadline=None)
def test_cost_translation_consistent(seed, s):
    rng = np.random.default_rng(seed)
    h, w, nd = 8, 24, 8
    cb = rng.integers(0, 1 << 24, size=(h, w)).astype(np.uint32)
    cr = rng.integers(0, 1 << 24, size=(h, w)).astype(np.uint32)
    # shifted[x] = cr[x + s], so C'(x, d) = C(x, d - s) wherever no index clamps
    shifted = np.empty_like(cr)
    shifted[:, :w - s] = cr[:, s:]
    shifted[:, w - s:] = cr[:, -1:]
    a = cost_volume(cb, cr, nd)
    b = cost_volume(cb, shifted, nd)
    for x in range(nd, w - s):
        for d in range(s, nd):
            assert np.array_equal(b[:, x, d], a[:, x, d - s])


def test_cost_dimension_mismatch():
    with pytest.raises(ParameterError):
        cost_volume(np.zeros((3, 4), np.uint32), np.zeros((3, 5), np.uint32), 2)
    with pytest.raises(ParameterError):
        cost_volume(np.zeros((3, 4), np.uint32), np.zeros((3, 4), np.uint32), 0)


@pytest.mark.parametrize("nd, expected", [(64, 67), (1, 4), (8, 11)])
def test_reference_context_count(nd, expected):
    assert reference_context_count(4, nd) == expected

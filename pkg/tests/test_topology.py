import math

import numpy as np
import pytest

from randfield import (
    BinaryMask,
    Grid,
    RngSeed,
    ScalarField,
    closed_form_intrinsic_volumes,
    connected_components,
    euler_characteristic,
    euler_characteristic_1d,
    excursion_set,
    key_signal,
    lattice_intrinsic_volumes,
)


def mask_2d(bits):
    arr = np.asarray(bits, dtype=bool)
    return BinaryMask(Grid(dims=arr.shape), arr.ravel())


def block_mask(n, m, rows, cols):
    bits = np.zeros((n, m), dtype=bool)
    bits[rows[0] : rows[1], cols[0] : cols[1]] = True
    return mask_2d(bits)


class TestExcursionSet:
    def test_constant_below_threshold(self):
        f = ScalarField(Grid(dims=(4, 4)), np.zeros(16))
        assert excursion_set(f, -1.0).bits.all()

    def test_strict_inequality_at_threshold(self):
        f = ScalarField(Grid(dims=(4, 4)), np.zeros(16))
        assert not excursion_set(f, 0.0).bits.any()

    def test_ramp_count(self):
        f = ScalarField(Grid(dims=(10, 10)), np.arange(100.0))
        assert excursion_set(f, 49.5).bits.sum() == 50


class TestEulerCharacteristic:
    def test_solid_rectangle(self):
        assert euler_characteristic(block_mask(12, 12, (1, 11), (1, 11))) == 1

    def test_square_ring_has_hole(self):
        bits = np.zeros((7, 7), dtype=bool)
        bits[1:6, 1:6] = True
        bits[2:5, 2:5] = False
        assert euler_characteristic(mask_2d(bits)) == 0

    def test_two_far_blocks(self):
        bits = np.zeros((10, 10), dtype=bool)
        bits[1:3, 1:3] = True
        bits[6:8, 6:8] = True
        assert euler_characteristic(mask_2d(bits)) == 2

    def test_diagonal_touch_is_connected(self):
        bits = np.zeros((4, 4), dtype=bool)
        bits[1, 1] = True
        bits[2, 2] = True
        assert euler_characteristic(mask_2d(bits)) == 1

    def test_empty_mask(self):
        assert euler_characteristic(mask_2d(np.zeros((5, 5), dtype=bool))) == 0

    def test_full_grid(self):
        assert euler_characteristic(mask_2d(np.ones((9, 13), dtype=bool))) == 1

    def test_additivity_over_far_components(self):
        rng = RngSeed(41).generator()
        for _ in range(20):
            bits = np.zeros((24, 24), dtype=bool)
            bits[2:10, 2:10] = rng.random((8, 8)) > 0.5
            a = euler_characteristic(mask_2d(bits))
            other = np.zeros((24, 24), dtype=bool)
            other[14:22, 14:22] = rng.random((8, 8)) > 0.5
            b = euler_characteristic(mask_2d(other))
            assert euler_characteristic(mask_2d(bits | other)) == a + b

    def test_rejects_1d(self):
        mask = BinaryMask(Grid(dims=(10,)), np.ones(10, dtype=bool))
        with pytest.raises(ValueError):
            euler_characteristic(mask)

    def test_1d_run_count(self):
        bits = np.array([1, 1, 0, 1, 0, 0, 1, 1, 1], dtype=bool)
        mask = BinaryMask(Grid(dims=(9,)), bits)
        assert euler_characteristic_1d(mask) == 3

    def test_3d_solid_cube(self):
        bits = np.zeros((6, 6, 6), dtype=bool)
        bits[1:5, 1:5, 1:5] = True
        mask = BinaryMask(Grid(dims=(6, 6, 6)), bits.ravel())
        assert euler_characteristic(mask) == 1

    def test_3d_hollow_shell_has_cavity(self):
        bits = np.zeros((7, 7, 7), dtype=bool)
        bits[1:6, 1:6, 1:6] = True
        bits[2:5, 2:5, 2:5] = False
        mask = BinaryMask(Grid(dims=(7, 7, 7)), bits.ravel())
        assert euler_characteristic(mask) == 2

    def test_3d_solid_torus(self):
        bits = np.zeros((8, 8, 3), dtype=bool)
        bits[1:7, 1:7, 1] = True
        bits[3:5, 3:5, 1] = False
        mask = BinaryMask(Grid(dims=(8, 8, 3)), bits.ravel())
        assert euler_characteristic(mask) == 0


class TestLatticeIntrinsicVolumes:
    def test_single_pixel(self):
        iv = lattice_intrinsic_volumes(block_mask(3, 3, (1, 2), (1, 2)))
        assert tuple(iv.mu) == (1.0, 2.0, 1.0)

    def test_full_rectangles_random_sizes(self):
        rng = RngSeed(43).generator()
        for _ in range(5):
            a, b = rng.integers(2, 40, size=2)
            delta = float(rng.choice([0.5, 1.0, 2.0]))
            grid = Grid(dims=(int(a), int(b)), delta=delta)
            mask = BinaryMask(grid, np.ones(grid.n_cells, dtype=bool))
            iv = lattice_intrinsic_volumes(mask)
            assert iv[0] == pytest.approx(1.0)
            assert iv[1] == pytest.approx((int(a) + int(b)) * delta)
            assert iv[2] == pytest.approx(int(a) * int(b) * delta**2)

    def test_empty_mask(self):
        iv = lattice_intrinsic_volumes(mask_2d(np.zeros((4, 4), dtype=bool)))
        assert tuple(iv.mu) == (0.0, 0.0, 0.0)

    def test_mu0_equals_euler_characteristic(self):
        rng = RngSeed(44).generator()
        for _ in range(25):
            bits = rng.random((15, 15)) > 0.6
            mask = mask_2d(bits)
            assert lattice_intrinsic_volumes(mask)[0] == euler_characteristic(mask)

    def test_rejects_3d(self):
        mask = BinaryMask(Grid(dims=(3, 3, 3)), np.ones(27, dtype=bool))
        with pytest.raises(ValueError):
            lattice_intrinsic_volumes(mask)


class TestClosedFormIntrinsicVolumes:
    def test_unit_ball(self):
        iv = closed_form_intrinsic_volumes("ball", 1.0)
        assert iv[0] == pytest.approx(1.0, abs=1e-12)
        assert iv[1] == pytest.approx(4.0, abs=1e-12)
        assert iv[2] == pytest.approx(2.0 * math.pi, abs=1e-12)
        assert iv[3] == pytest.approx(4.0 * math.pi / 3.0, abs=1e-12)

    def test_unit_box(self):
        iv = closed_form_intrinsic_volumes("box", 1.0, 1.0, 1.0)
        assert tuple(iv.mu) == (1.0, 3.0, 3.0, 1.0)

    def test_box_general(self):
        a, b, c = 2.0, 3.0, 5.0
        iv = closed_form_intrinsic_volumes("box", a, b, c)
        assert iv[1] == pytest.approx(a + b + c)
        assert iv[2] == pytest.approx(a * b + b * c + a * c)
        assert iv[3] == pytest.approx(a * b * c)

    def test_small_ball_limit(self):
        iv = closed_form_intrinsic_volumes("ball", 1e-9)
        assert iv[0] == 1.0
        assert iv[1] < 1e-8
        assert iv[2] < 1e-8
        assert iv[3] < 1e-8

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            closed_form_intrinsic_volumes("ball", 0.0)
        with pytest.raises(ValueError):
            closed_form_intrinsic_volumes("box", 1.0, -2.0, 3.0)
        with pytest.raises(ValueError):
            closed_form_intrinsic_volumes("pyramid", 1.0)


class TestConnectedComponents:
    def test_empty(self):
        labels, sizes = connected_components(mask_2d(np.zeros((4, 4), dtype=bool)))
        assert labels.max() == 0
        assert sizes == []

    def test_diagonal_pixels_one_component(self):
        bits = np.zeros((4, 4), dtype=bool)
        bits[1, 1] = True
        bits[2, 2] = True
        labels, sizes = connected_components(mask_2d(bits))
        assert sizes == [2]
        assert labels[1, 1] == labels[2, 2] == 1

    def test_solid_rectangle(self):
        labels, sizes = connected_components(block_mask(8, 8, (2, 6), (1, 7)))
        assert sizes == [4 * 6]
        assert set(np.unique(labels)) == {0, 1}

    def test_component_count_matches_far_blocks(self):
        bits = np.zeros((12, 12), dtype=bool)
        bits[1:3, 1:3] = True
        bits[8:10, 8:10] = True
        _, sizes = connected_components(mask_2d(bits))
        assert sorted(sizes) == [4, 4]

    def test_labels_ordered_by_first_cell(self):
        bits = np.zeros((6, 6), dtype=bool)
        bits[0, 5] = True
        bits[4, 0] = True
        labels, _ = connected_components(mask_2d(bits))
        assert labels[0, 5] == 1
        assert labels[4, 0] == 2

    def test_key_mask_component_is_whole_object(self):
        f = key_signal(Grid(dims=(60, 37)))
        mask = BinaryMask(f.grid, f.values.ravel() > 0.0)
        _, sizes = connected_components(mask)
        assert len(sizes) == 1
        assert sizes[0] == int(mask.bits.sum())

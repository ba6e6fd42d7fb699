import math

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given, settings

from core.errors import InvalidGrid, OffGridFrequency
from core.freqgrid import FrequencyGrid, dft_orthogonality_defect, make_grid


@st.composite
def grids(draw, max_points=48):
    omega_min = draw(st.floats(min_value=0.0, max_value=20.0, allow_nan=False))
    span = draw(st.floats(min_value=0.5, max_value=40.0, allow_nan=False))
    n = draw(st.integers(min_value=2, max_value=max_points))
    return make_grid(omega_min, omega_min + span, n)


class TestMakeGrid:
    def test_unit_spacing(self):
        g = make_grid(0, 10, 11)
        np.testing.assert_allclose(g.nodes, np.arange(11.0))
        assert g.delta_omega == 1.0

    def test_dual_time_step(self):
        g = make_grid(0, 10, 11)
        assert g.times.delta_t == pytest.approx(2 * math.pi / 11, rel=1e-15)

    def test_sum_grid_nodes(self):
        g = make_grid(4, 6, 3)
        np.testing.assert_allclose(g.sums.nodes, [8, 9, 10, 11, 12])
        assert g.sums.n_points == 5

    @pytest.mark.parametrize("args, field", [
        ((0, 0, 11), "grid.omega_max"),
        ((5, 1, 11), "grid.omega_max"),
        ((-1, 10, 11), "grid.omega_min"),
        ((0, 10, 1), "grid.n_points"),
        ((0, math.inf, 11), "grid"),
    ])
    def test_rejects_bad_grids(self, args, field):
        with pytest.raises(InvalidGrid) as info:
            make_grid(*args)
        assert info.value.field == field
        assert info.value.component == "freqgrid"

    def test_grids_are_values(self):
        assert make_grid(0, 10, 11) == FrequencyGrid(0.0, 10.0, 11)
        assert make_grid(0, 10, 11) != make_grid(0, 10, 12)


class TestTimeGrid:
    @pytest.mark.parametrize("n", [2, 3, 7, 64, 65])
    def test_zero_is_a_node(self, n):
        g = make_grid(0, 10, n)
        assert g.times.nodes[g.times.index_of(0.0)] == 0.0

    def test_duality(self, grid64):
        assert grid64.times.delta_t * grid64.delta_omega * grid64.n_points == pytest.approx(2 * math.pi)

    def test_truncated_keeps_first_half(self):
        g = make_grid(0, 10, 16)
        np.testing.assert_array_equal(g.times.truncated(), g.times.nodes[:8])

    def test_off_node_time(self, grid64):
        with pytest.raises(OffGridFrequency):
            grid64.times.index_of(grid64.times.delta_t / 3)


class TestLookup:
    def test_index_of(self):
        g = make_grid(0, 10, 11)
        assert g.index_of(7.0) == 7
        assert g.index_of(7.0 + 1e-12) == 7

    @pytest.mark.parametrize("omega", [5.5, -1.0, 11.0])
    def test_off_grid(self, omega):
        with pytest.raises(OffGridFrequency):
            make_grid(0, 10, 11).index_of(omega)

    def test_off_grid_message_shows_plain_floats(self):
        g = make_grid(4, 6, 3)
        with pytest.raises(OffGridFrequency) as info:
            g.sums.index_of(np.float64(9.5))
        assert "sum frequency 9.5 is not a node" in str(info.value)
        assert "np.float64" not in str(info.value)

    def test_sum_pairs(self):
        g = make_grid(0, 3, 4)
        np.testing.assert_array_equal(g.sums.pairs(0), [0])
        np.testing.assert_array_equal(g.sums.pairs(3), [0, 1, 2, 3])
        np.testing.assert_array_equal(g.sums.pairs(6), [3])


class TestSumDiff:
    @pytest.mark.parametrize("pair, m, omega_minus", [
        ((0, 2), 2, -1.0),
        ((1, 1), 2, 0.0),
        ((2, 2), 4, 0.0),
    ])
    def test_pair_to_sum_diff(self, pair, m, omega_minus):
        g = make_grid(4, 6, 3)
        got_m, got_diff = g.pair_to_sum_diff(*pair)
        assert got_m == m
        assert g.sums.nodes[got_m] == 2 * 4 + m
        assert got_diff == omega_minus

    @given(data=st.data())
    def test_inverse(self, data):
        g = data.draw(grids())
        i = data.draw(st.integers(min_value=0, max_value=g.n_points - 1))
        j = data.draw(st.integers(min_value=0, max_value=g.n_points - 1))
        assert g.sum_diff_to_pair(*g.pair_to_sum_diff(i, j)) == (i, j)

    def test_no_pair(self):
        g = make_grid(4, 6, 3)
        with pytest.raises(OffGridFrequency):
            g.sum_diff_to_pair(0, 1.0)


class TestDft:
    @pytest.mark.parametrize("n", [2, 3, 8, 16, 64])
    def test_orthogonality(self, n):
        assert dft_orthogonality_defect(make_grid(0, 10, n)) <= 1e-10

    @settings(deadline=None, max_examples=40)
    @given(grids())
    def test_orthogonality_any_grid(self, g):
        assert dft_orthogonality_defect(g) <= 1e-9

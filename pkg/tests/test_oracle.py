import numpy as np
import pytest

from core.errors import GridTooLarge, ZeroWeightOutcome
from core.freqgrid import make_grid
from core.states import (
    EprSpec,
    density_from_amplitude,
    epr_state,
    monochromatic_state,
    partial_trace,
    product_state,
)
from oracle.dense import (
    DenseState,
    dense_completeness,
    dense_condition,
    dense_povm_matrix,
    dense_reduced,
    dense_weight,
)
from protocol.povm import (
    PovmOutcome,
    completeness_defect,
    condition_on_outcome,
    outcome_weight,
    reduction_vector,
)


@pytest.fixture
def grid6():
    return make_grid(0, 10, 6)


class TestDensePovm:
    def test_matches_reduction_vector(self, grid6):
        outcome = PovmOutcome.from_indices(grid6, 4, 5)
        np.testing.assert_allclose(dense_povm_matrix(grid6, outcome),
                                   reduction_vector(grid6, outcome).povm_matrix(), atol=1e-14)

    def test_positive(self, grid6):
        m = dense_povm_matrix(grid6, PovmOutcome.from_indices(grid6, 1, 7))
        np.testing.assert_allclose(m, m.conj().T, atol=1e-15)
        assert np.linalg.eigvalsh(m)[0] >= -1e-14

    def test_accepts_any_outcome_like_object(self, grid6):
        class Registration:
            t = 0.0
            omega_plus_index = 5

        np.testing.assert_array_equal(dense_povm_matrix(grid6, Registration()),
                                      dense_povm_matrix(grid6, PovmOutcome.at(grid6, 0.0, 10.0)))


class TestDenseCompleteness:
    def test_two_nodes(self):
        assert dense_completeness(make_grid(1, 2, 2)) <= 1e-10

    @pytest.mark.parametrize("n", [2, 4, 8])
    def test_matches_fast_path(self, n):
        g = make_grid(0, 10, n)
        assert abs(dense_completeness(g) - completeness_defect(g)) <= 1e-10

    def test_matches_fast_path_truncated(self):
        g = make_grid(0, 10, 4)
        dense = dense_completeness(g, truncate_time_grid=True)
        assert dense > 0.1
        assert dense == pytest.approx(completeness_defect(g, truncate_time_grid=True), abs=1e-10)

    def test_guard(self):
        with pytest.raises(GridTooLarge):
            dense_completeness(make_grid(0, 10, 9))


class TestDenseConditioning:
    def test_ideal_case(self, random_packet):
        g = make_grid(1, 3, 3)
        epr = epr_state(g, EprSpec(4.0))
        packet = random_packet(g)
        rho = dense_condition(g, epr, packet, PovmOutcome.at(g, 0.0, 4.0))
        np.testing.assert_allclose(rho.mat, density_from_amplitude(packet).mat, atol=1e-12)

    def test_sign_of_the_time_phase(self, random_packet):
        g = make_grid(1, 4, 4)
        epr = epr_state(g, EprSpec(5.0))
        packet = random_packet(g)
        outcome = PovmOutcome.from_indices(g, 3, g.sums.index_of(5.0))
        dense = dense_condition(g, epr, packet, outcome)
        # conditioned state is the packet evolved by −t
        np.testing.assert_allclose(dense.mat, density_from_amplitude(packet, -outcome.t).mat, atol=1e-12)

    def test_randomized_agreement_with_fast_path(self, grid6, rng, random_packet):
        epr = epr_state(grid6, EprSpec(10.0))
        cases = 0
        while cases < 50:
            packet = random_packet(grid6)
            outcome = PovmOutcome.from_indices(grid6, int(rng.integers(6)), int(rng.integers(11)))
            try:
                fast = condition_on_outcome(epr, packet, outcome)
            except ZeroWeightOutcome:
                continue
            np.testing.assert_allclose(fast.mat, dense_condition(grid6, epr, packet, outcome).mat, atol=1e-10)
            assert abs(outcome_weight(epr, packet, outcome) - dense_weight(grid6, epr, packet, outcome)) <= 1e-10
            cases += 1

    def test_envelope_agreement(self, grid6, random_packet):
        epr = epr_state(grid6, EprSpec.gaussian_envelope(grid6, 10.0, 5.0, 2.0))
        packet = random_packet(grid6)
        for k, m in [(0, 3), (2, 5), (5, 8)]:
            outcome = PovmOutcome.from_indices(grid6, k, m)
            np.testing.assert_allclose(condition_on_outcome(epr, packet, outcome).mat,
                                       dense_condition(grid6, epr, packet, outcome).mat, atol=1e-10)

    def test_outcomes_sum_to_the_reduced_state(self, random_packet):
        g = make_grid(0, 6, 4)
        epr = epr_state(g, EprSpec.gaussian_envelope(g, 6.0, 3.0, 2.0))
        packet = random_packet(g)
        total = np.zeros((4, 4), dtype=complex)
        for k in range(g.n_points):
            for m in range(g.sums.n_points):
                outcome = PovmOutcome.from_indices(g, k, m)
                try:
                    total += dense_weight(g, epr, packet, outcome) * dense_condition(g, epr, packet, outcome).mat
                except ZeroWeightOutcome:
                    continue
        np.testing.assert_allclose(total, dense_reduced(g, epr, packet, keep=2).mat, atol=1e-10)

    def test_zero_weight(self, grid6):
        epr = epr_state(grid6, EprSpec(10.0))
        packet = monochromatic_state(grid6, 0.0)
        with pytest.raises(ZeroWeightOutcome):
            dense_condition(grid6, epr, packet, PovmOutcome.at(grid6, 0.0, 20.0))

    def test_guard(self):
        g = make_grid(0, 10, 13)
        epr = epr_state(g, EprSpec(10.0))
        with pytest.raises(GridTooLarge):
            dense_weight(g, epr, monochromatic_state(g, 5.0), PovmOutcome.at(g, 0.0, 10.0))


class TestDenseState:
    def test_reduced_matches_partial_trace(self, grid6, random_packet):
        epr = epr_state(grid6, EprSpec(10.0))
        packet = random_packet(grid6)
        np.testing.assert_allclose(dense_reduced(grid6, epr, packet, keep=2).mat,
                                   partial_trace(epr, keep=2).mat * packet.norm_sq, atol=1e-12)
        np.testing.assert_allclose(dense_reduced(grid6, epr, packet, keep=3).mat,
                                   density_from_amplitude(packet).mat * epr.norm_sq, atol=1e-12)

    def test_from_parts(self, grid6, random_packet):
        a, b = random_packet(grid6), random_packet(grid6)
        state = DenseState.from_parts(product_state(a, b).amps, a.amps)
        assert state.tensor.shape == (6, 6, 6)
        assert state.tensor[1, 2, 3] == pytest.approx(a.amps[1] * b.amps[2] * a.amps[3])

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from permchan import bsc, erasure, identity, symmetric, validate_channel
from permchan.channel import symmetric_matrix
from permchan.degradation import (degradation_feasibility, doeblin_witness, extremal_erasure_probability,
                                  symmetric_dominator, symmetric_inverse_parameter)
from permchan.errors import MinorizationViolated, NotStrictlyPositive, ParameterOutOfRange, SingularChannel
from permchan.matrix import doeblin_coefficient

from conftest import random_channel, stochastic_matrices


class TestInverseParameter:
    def test_bsc(self):
        tau = symmetric_inverse_parameter(2, 0.2)
        assert tau == pytest.approx(-1 / 3)
        assert np.allclose(symmetric_matrix(2, 0.2) @ symmetric_matrix(2, tau), np.eye(2), atol=1e-9)

    def test_zero(self):
        assert symmetric_inverse_parameter(2, 0.0) == 0.0

    def test_singular(self):
        with pytest.raises(SingularChannel):
            symmetric_inverse_parameter(2, 0.5)
        with pytest.raises(SingularChannel):
            symmetric_inverse_parameter(3, 2 / 3)

    @given(st.integers(2, 6), st.floats(0.0, 1.0))
    def test_inverse_property(self, q, delta):
        if abs(delta - (q - 1) / q) < 1e-3:
            return
        tau = symmetric_inverse_parameter(q, delta)
        prod = symmetric_matrix(q, delta) @ symmetric_matrix(q, tau)
        assert np.max(np.abs(prod - np.eye(q))) <= 1e-9


class TestSymmetricDominator:
    def test_bsc(self):
        delta, wit = symmetric_dominator(bsc(0.1))
        assert delta == pytest.approx(0.1)
        assert wit.residual <= 1e-12

    def test_equal_rows_degenerate(self):
        ch = validate_channel([[0.5, 0.5], [0.5, 0.5]])
        delta, wit = symmetric_dominator(ch)
        assert delta == 0.5
        assert wit.intermediate == ch
        for d in (0.0, 0.2, 0.5, 1.0):
            assert np.allclose(symmetric_matrix(2, d) @ ch.matrix, ch.matrix)

    def test_two_by_three(self):
        ch = validate_channel([[0.5, 0.3, 0.2], [0.2, 0.3, 0.5]])
        delta, wit = symmetric_dominator(ch)
        assert delta == pytest.approx(0.2)
        w = wit.intermediate.matrix
        assert w.min() >= 0 and np.allclose(w.sum(axis=1), 1.0)
        assert np.allclose(symmetric_matrix(2, delta) @ w, ch.matrix, atol=1e-9)

    def test_zero_entry(self):
        with pytest.raises(NotStrictlyPositive):
            symmetric_dominator(erasure(2, 0.3))

    @given(stochastic_matrices(max_rows=4, max_cols=5, positive=True))
    def test_witness_valid(self, ch):
        delta, wit = symmetric_dominator(ch)
        w = wit.intermediate.matrix
        assert w.min() >= -1e-12
        assert np.max(np.abs(w.sum(axis=1) - 1)) <= 1e-9
        assert np.max(np.abs(symmetric_matrix(ch.input_size, delta) @ w - ch.matrix)) <= 1e-9

    @given(stochastic_matrices(max_rows=4, max_cols=5, positive=True), st.floats(0.0, 1.0))
    def test_smaller_delta_also_dominates(self, ch, frac):
        # S_d (S_d^{-1} P) = P for every d below the bound, and S_d^{-1} P is stochastic
        delta_max, _ = symmetric_dominator(ch)
        q = ch.input_size
        d = frac * delta_max
        w = symmetric_matrix(q, symmetric_inverse_parameter(q, d)) @ ch.matrix
        assert w.min() >= -1e-12
        assert np.max(np.abs(symmetric_matrix(q, d) @ w - ch.matrix)) <= 1e-9


class TestDoeblinWitness:
    def test_bsc(self):
        v = doeblin_witness(bsc(0.25), 0.5, [0.5, 0.5])
        assert np.allclose(v.matrix, [[1, 0], [0, 1], [0.5, 0.5]])

    def test_violation_reports_position(self):
        with pytest.raises(MinorizationViolated) as info:
            doeblin_witness(bsc(0.1), 0.5, [0.5, 0.5])
        assert (info.value.x, info.value.z) == (1, 2)

    def test_eta_range(self):
        with pytest.raises(ParameterOutOfRange):
            doeblin_witness(bsc(0.1), 1.0, [0.5, 0.5])

    @pytest.mark.parametrize("q", [2, 3, 4])
    @pytest.mark.parametrize("eta", [0.2, 0.6])
    def test_symmetric_decomposition(self, q, eta):
        ch = symmetric(q, eta * (q - 1) / q)
        v = doeblin_witness(ch, eta, np.full(q, 1 / q))
        expected = np.vstack([np.eye(q), np.full((1, q), 1 / q)])
        assert np.allclose(v.matrix, expected, atol=1e-12)

    @given(stochastic_matrices(max_rows=4, max_cols=5, positive=True), st.floats(0.05, 0.95))
    def test_reconstructs(self, ch, frac):
        eta_star = doeblin_coefficient(ch)
        q_z = ch.matrix.min(axis=0) / eta_star
        eta = frac * eta_star
        v = doeblin_witness(ch, eta, q_z)
        assert np.max(np.abs(erasure(ch.input_size, eta).matrix @ v.matrix - ch.matrix)) <= 1e-9


class TestFeasibility:
    def test_fortuin_kasteleyn(self):
        wit = degradation_feasibility(erasure(2, 0.4), bsc(0.2))
        assert wit is not None and wit.residual <= 1e-8

    def test_cannot_remove_noise(self):
        assert degradation_feasibility(bsc(0.3), identity(2)) is None

    @given(stochastic_matrices(max_rows=3, max_cols=4))
    def test_reflexive(self, ch):
        wit = degradation_feasibility(ch, ch)
        assert wit is not None
        assert np.max(np.abs(ch.matrix @ wit.intermediate.matrix - ch.matrix)) <= 1e-8

    def test_bsc_chain(self):
        assert degradation_feasibility(bsc(0.1), bsc(0.3)) is not None
        assert degradation_feasibility(bsc(0.3), bsc(0.1)) is None

    def test_tensorization(self):
        rng = np.random.default_rng(4)
        for shape in ((2, 2), (2, 3)):
            b = random_channel(rng, 2, shape[1])
            w = rng.dirichlet(np.ones(2), size=shape[1])
            a = b.matrix @ w
            assert np.allclose(np.kron(a, a), np.kron(b.matrix, b.matrix) @ np.kron(w, w), atol=1e-9)

    def test_doeblin_equivalence(self):
        rng = np.random.default_rng(77)
        checked = agree = 0
        for _ in range(200):
            ch = random_channel(rng, int(rng.integers(2, 4)), int(rng.integers(2, 5)))
            eta_star = doeblin_coefficient(ch)
            q_z = ch.matrix.min(axis=0) / eta_star
            eta = float(rng.uniform(0.01, 0.99))
            if abs(eta - eta_star) < 1e-6:
                continue
            try:
                doeblin_witness(ch, eta, q_z)
                direct = True
            except MinorizationViolated:
                direct = False
            lp = degradation_feasibility(erasure(ch.input_size, eta), ch) is not None
            checked += 1
            agree += direct == lp
        assert agree == checked >= 195

    @pytest.mark.parametrize("ch", [bsc(0.2), bsc(0.45), erasure(3, 0.3), symmetric(3, 0.1)])
    def test_extremal_erasure(self, ch):
        assert extremal_erasure_probability(ch) == pytest.approx(doeblin_coefficient(ch), abs=1e-6)

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from permchan import bsc, build_profile, erasure, identity, symmetric, validate_channel
from permchan.capacity import (CapacityBounds, capacity_bounds, erasure_parameter, is_permutation_matrix,
                               rate_of)
from permchan.degradation import degradation_feasibility

from conftest import random_channel, stochastic_matrices


class TestExamples:
    def test_bsc(self):
        b = capacity_bounds(bsc(0.3))
        assert (b.lower, b.upper, b.exact) == (Fraction(1, 2), Fraction(1, 2), True)

    def test_identity(self):
        b = capacity_bounds(identity(4))
        assert (b.lower, b.upper, b.exact) == (3, 3, True)
        assert b.rules == ("permutation-matrix",)

    def test_erasure(self):
        b = capacity_bounds(erasure(3, 0.5))
        assert (b.lower, b.upper, b.exact) == (1, 2, False)
        assert "erasure-bounds" in b.rules

    def test_unit_rank(self):
        b = capacity_bounds(validate_channel([[0.2, 0.3, 0.5]] * 3))
        assert (b.lower, b.upper, b.exact, b.rules) == (0, 0, True, ("unit-rank",))

    def test_bsc_endpoints(self):
        assert capacity_bounds(bsc(1.0)).rules == ("permutation-matrix",)
        assert capacity_bounds(bsc(0.5)).rules == ("unit-rank",)

    def test_strictly_positive_not_exact(self):
        # four corners of a square in a plane of the simplex: rank 3, ext 4, |Y| = 4
        u = np.full(4, 0.25)
        d1, d2 = np.array([0.1, -0.1, 0, 0]), np.array([0, 0, 0.1, -0.1])
        ch = validate_channel([u + d1 + d2, u + d1 - d2, u - d1 + d2, u - d1 - d2])
        p = build_profile(ch)
        assert (p.rank_r, p.ext_count) == (3, 4)
        b = capacity_bounds(ch, p)
        assert (b.lower, b.upper, b.exact) == (1, Fraction(3, 2), False)
        assert b.rules == ("rank-achievability", "strictly-positive-converse")
        assert b.annotations

    def test_three_sc_exact(self):
        b = capacity_bounds(symmetric(3, 0.1))
        assert (b.lower, b.exact) == (1, True)
        assert "full-rank-exact" in b.rules

    def test_conjecture_annotations_do_not_change_bounds(self):
        b = capacity_bounds(erasure(2, 0.4))
        assert (b.lower, b.upper) == (Fraction(1, 2), 1)
        assert any("1/2" in a for a in b.annotations)
        b3 = capacity_bounds(erasure(3, 0.4))
        assert (b3.lower, b3.upper) == (1, 2)
        assert any("q/2" in a for a in b3.annotations)

    def test_erasure_eta_zero_is_exact(self):
        b = capacity_bounds(erasure(3, 0.0))
        assert (b.lower, b.upper, b.exact) == (2, 2, True)

    def test_general_converse(self):
        # zero entries, no special structure
        ch = validate_channel([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]])
        b = capacity_bounds(ch)
        assert (b.lower, b.upper, b.exact) == (1, 2, False)
        assert b.rules == ("rank-achievability", "general-converse")

    def test_to_dict(self):
        d = capacity_bounds(bsc(0.3)).to_dict()
        assert d["lower"] == 0.5 and d["upper_exact"] == "1/2" and d["exact"] is True

    def test_inconsistent_bounds_rejected(self):
        with pytest.raises(ValueError):
            CapacityBounds(Fraction(1), Fraction(0), False)
        with pytest.raises(ValueError):
            CapacityBounds(Fraction(0), Fraction(1), True)


class TestDetection:
    def test_permutation_within_tolerance(self):
        assert is_permutation_matrix(validate_channel([[0, 1], [1, 0]]))
        assert not is_permutation_matrix(bsc(1e-9))

    def test_erasure_columns_permuted(self):
        m = erasure(3, 0.3).matrix[:, [3, 1, 0, 2]]
        assert erasure_parameter(validate_channel(m)) == pytest.approx(0.3)
        perm_rows = validate_channel(erasure(3, 0.3).matrix[[2, 0, 1]])
        assert erasure_parameter(perm_rows) == pytest.approx(0.3)

    def test_not_erasure(self):
        assert erasure_parameter(bsc(0.2)) is None
        assert erasure_parameter(validate_channel([[0.7, 0.0, 0.3], [0.0, 0.6, 0.4]])) is None


class TestInvariants:
    @given(stochastic_matrices(max_rows=4, max_cols=5), st.integers(0, 2**31))
    def test_permutation_invariance(self, ch, seed):
        rng = np.random.default_rng(seed)
        m = ch.matrix[rng.permutation(ch.input_size)][:, rng.permutation(ch.output_size)]
        a, b = capacity_bounds(ch), capacity_bounds(validate_channel(m))
        assert (a.lower, a.upper, a.exact) == (b.lower, b.upper, b.exact)

    @given(stochastic_matrices(max_rows=5, max_cols=5, positive=True))
    def test_positive_gap(self, ch):
        p = build_profile(ch)
        b = capacity_bounds(ch, p)
        if p.rank_r > 1:
            assert b.upper - b.lower == Fraction(min(p.ext_count, ch.output_size) - p.rank_r, 2)

    @given(stochastic_matrices(max_rows=5, max_cols=5))
    def test_ordered(self, ch):
        b = capacity_bounds(ch)
        assert 0 <= b.lower <= b.upper
        assert not b.exact or b.lower == b.upper

    def test_degradation_monotone(self):
        rng = np.random.default_rng(31)
        pairs = 0
        for _ in range(60):
            m = int(rng.integers(2, 4))
            dom = random_channel(rng, m, int(rng.integers(2, 5)), positive=bool(rng.integers(2)))
            w = rng.dirichlet(np.ones(int(rng.integers(2, 5))), size=dom.output_size)
            deg = validate_channel(dom.matrix @ w)
            assert degradation_feasibility(dom, deg) is not None
            pairs += 1
            assert capacity_bounds(deg).lower <= capacity_bounds(dom).upper
        canon = [(erasure(2, 0.4), bsc(0.2)), (bsc(0.1), bsc(0.3)), (identity(3), symmetric(3, 0.2))]
        for dom, deg in canon:
            assert degradation_feasibility(dom, deg) is not None
            assert capacity_bounds(deg).lower <= capacity_bounds(dom).upper


class TestRate:
    def test_examples(self):
        assert rate_of(100, 10) == pytest.approx(2.0)
        assert rate_of(1, 57) == 0.0

    def test_lattice_scaling(self):
        n = 10**6
        k = math.floor(n ** 0.4)
        assert rate_of(math.comb(k + 1, 1), n) == pytest.approx(0.4, abs=0.02)

    def test_needs_n_two(self):
        with pytest.raises(ValueError):
            rate_of(4, 1)

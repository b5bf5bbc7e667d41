import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from permchan import (Channel, Codeword, DistVector, Histogram, bsc, empirical_distribution, erasure,
                      identity, load_channel, make_canonical, symmetric, transmit, validate_channel)
from permchan.channel import (DMC_THEN_PERMUTE, PERMUTE_THEN_DMC, channel_from_dict, push_forward,
                              random_permutation, save_channel)
from permchan.errors import (AlphabetMismatch, DegenerateShape, NegativeEntry, ParameterOutOfRange,
                             RowSumMismatch)

from conftest import stochastic_matrices


class TestValidateChannel:
    def test_valid_bsc(self):
        ch = validate_channel([[0.8, 0.2], [0.2, 0.8]])
        assert isinstance(ch, Channel)
        assert (ch.input_size, ch.output_size) == (2, 2)

    def test_row_sum_mismatch_reports_row_and_deviation(self):
        with pytest.raises(RowSumMismatch) as info:
            validate_channel([[0.5, 0.6], [0.2, 0.8]])
        assert info.value.row == 0
        assert info.value.deviation == pytest.approx(0.1)
        assert "row 0" in str(info.value)

    def test_negative_entry(self):
        with pytest.raises(NegativeEntry) as info:
            validate_channel([[1.0, 0.0], [-0.1, 1.1]])
        assert (info.value.row, info.value.col) == (1, 0)

    @pytest.mark.parametrize("bad", [[], [[]], [[1.0, 0.0], [1.0]], [[1.0]], 3.0])
    def test_degenerate_shapes(self, bad):
        with pytest.raises(DegenerateShape):
            validate_channel(bad)

    def test_witness_sizes_allow_one(self):
        ch = validate_channel([[1.0]], min_size=1)
        assert ch.matrix.shape == (1, 1)

    def test_clamps_within_tolerance(self):
        ch = validate_channel([[1.0 + 5e-13, -5e-13], [0.3, 0.7]])
        assert ch.matrix.min() >= 0.0
        assert np.allclose(ch.matrix.sum(axis=1), 1.0, atol=1e-15)

    def test_just_outside_tolerance_rejected(self):
        with pytest.raises(RowSumMismatch):
            validate_channel([[0.5, 0.5 + 1e-11], [0.3, 0.7]])

    def test_exact_decimal_strings(self):
        ch = validate_channel([["1/3", "2/3"], ["0.1", "0.9"]])
        assert ch.matrix[0, 0] == pytest.approx(1 / 3, abs=1e-16)

    def test_matrix_is_read_only(self):
        ch = bsc(0.2)
        with pytest.raises(ValueError):
            ch.matrix[0, 0] = 0.5

    @given(stochastic_matrices())
    def test_valid_matrices_round_trip(self, ch):
        again = validate_channel(ch.matrix.tolist())
        assert np.allclose(again.matrix, ch.matrix, rtol=0, atol=1e-15)


class TestCanonical:
    def test_symmetric(self):
        m = make_canonical("symmetric", 3, 0.3).matrix
        assert np.allclose(np.diag(m), 0.7)
        assert np.allclose(m[~np.eye(3, dtype=bool)], 0.15)

    def test_erasure_layout(self):
        m = erasure(2, 0.25).matrix
        assert np.allclose(m, [[0.75, 0, 0.25], [0, 0.75, 0.25]])

    def test_identity(self):
        assert np.array_equal(identity(4).matrix, np.eye(4))

    @pytest.mark.parametrize("kind,q,param", [("symmetric", 1, 0.1), ("symmetric", 2, 1.5),
                                              ("erasure", 2, -0.1), ("erasure", 2, None),
                                              ("bogus", 2, 0.1)])
    def test_out_of_range(self, kind, q, param):
        with pytest.raises(ParameterOutOfRange):
            make_canonical(kind, q, param)


class TestTransmit:
    def test_identity_preserves_type(self, rng):
        x = Codeword([1, 2, 2], 2)
        y = transmit(identity(2), x, rng)
        assert sorted(y.symbols.tolist()) == [1, 2, 2]

    def test_full_erasure(self, rng):
        y = transmit(erasure(2, 1.0), Codeword([1, 1], 2), rng)
        assert y.symbols.tolist() == [3, 3]
        assert y.alphabet_size == 3

    @pytest.mark.parametrize("order", [DMC_THEN_PERMUTE, PERMUTE_THEN_DMC])
    def test_seeded_determinism(self, order):
        x = Codeword([1, 2, 1], 2)
        a = transmit(bsc(0.2), x, np.random.default_rng(99), order)
        b = transmit(bsc(0.2), x, np.random.default_rng(99), order)
        assert a == b

    def test_alphabet_mismatch(self, rng):
        with pytest.raises(AlphabetMismatch):
            transmit(bsc(0.2), Codeword([1, 3], 3), rng)

    def test_unknown_order(self, rng):
        with pytest.raises(ParameterOutOfRange):
            transmit(bsc(0.2), Codeword([1], 2), rng, order="sideways")

    def test_single_use_frequencies(self):
        rng = np.random.default_rng(3)
        ys = [transmit(bsc(0.2), Codeword([1], 2), rng).symbols[0] for _ in range(20000)]
        assert np.mean(np.array(ys) == 2) == pytest.approx(0.2, abs=0.01)

    def test_permutation_is_uniform(self):
        # all 6 arrangements of (1,2,3) should appear about equally often
        rng = np.random.default_rng(8)
        seen = {}
        for _ in range(12000):
            y = tuple(random_permutation(Codeword([1, 2, 3], 3), rng).symbols.tolist())
            seen[y] = seen.get(y, 0) + 1
        assert len(seen) == 6
        assert max(seen.values()) - min(seen.values()) < 250

    @given(st.lists(st.integers(1, 4), min_size=1, max_size=30), st.integers(0, 2**31))
    def test_permutation_invariance_of_type(self, symbols, seed):
        x = Codeword(symbols, 4)
        y = random_permutation(x, np.random.default_rng(seed))
        assert empirical_distribution(y) == empirical_distribution(x)

    @given(st.lists(st.integers(1, 3), min_size=1, max_size=30), st.integers(0, 2**31))
    def test_identity_channel_preserves_type(self, symbols, seed):
        x = Codeword(symbols, 3)
        y = transmit(identity(3), x, np.random.default_rng(seed))
        assert empirical_distribution(y) == empirical_distribution(x)


class TestPushForward:
    def test_uniform_through_bsc(self):
        assert np.allclose(push_forward([0.5, 0.5], bsc(0.2)).probs, [0.5, 0.5])

    def test_row_extraction(self):
        assert np.allclose(push_forward(DistVector([1, 0]), bsc(0.2)).probs, [0.8, 0.2])

    def test_erasure(self):
        assert np.allclose(push_forward([0.5, 0.5], erasure(2, 0.4)).probs, [0.3, 0.3, 0.4])

    def test_mismatch(self):
        with pytest.raises(AlphabetMismatch):
            push_forward([1.0], bsc(0.2))

    @given(stochastic_matrices(), st.integers(0, 2**31))
    def test_stays_on_simplex(self, ch, seed):
        p = np.random.default_rng(seed).dirichlet(np.ones(ch.input_size))
        out = push_forward(p, ch).probs
        assert out.min() >= 0.0
        assert abs(out.sum() - 1.0) <= 1e-12


class TestTypes:
    def test_counts(self):
        h = empirical_distribution(Codeword([1, 1, 2], 2))
        assert h.as_tuple() == (2, 1) and h.n == 3

    def test_permuted_counts(self):
        assert empirical_distribution(Codeword([2, 1, 1], 2)).as_tuple() == (2, 1)

    def test_multinomial(self):
        h = Histogram([2, 1])
        assert h.multinomial() == 3
        assert h.log_multinomial() == pytest.approx(np.log(3))

    def test_codeword_validation(self):
        with pytest.raises(AlphabetMismatch):
            Codeword([0, 1], 2)
        with pytest.raises(ParameterOutOfRange):
            Codeword([], 2)

    def test_distvector_validation(self):
        with pytest.raises(RowSumMismatch):
            DistVector([0.5, 0.6])
        with pytest.raises(NegativeEntry):
            DistVector([1.5, -0.5])


class TestJson:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "c.json"
        save_channel(symmetric(3, 0.1), path)
        assert load_channel(path) == symmetric(3, 0.1)

    def test_size_disagreement(self):
        with pytest.raises(DegenerateShape):
            channel_from_dict({"input_size": 3, "output_size": 2, "rows": [[1, 0], [0, 1]]})

    def test_labels_kept(self):
        ch = channel_from_dict({"rows": [[1, 0], [0, 1]], "labels": {"outputs": ["a", "b"]}})
        assert ch.labels == {"outputs": ["a", "b"]}

    def test_bad_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(DegenerateShape):
            load_channel(path)

    def test_file_format(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"input_size": 2, "output_size": 2,
                                    "rows": [["0.8", "0.2"], ["0.2", "0.8"]]}))
        assert load_channel(path) == bsc(0.2)

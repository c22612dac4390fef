import numpy as np
import pytest

from schedseq.seqcore import (
    BinarySequence,
    GroupDivision,
    OffsetVector,
    ScheduleSequence,
    Symbol,
    SymbolKind,
    array_to_sequence,
    correlation_profile,
    crt_inverse,
    crt_map,
    cyclic_shift,
    hamming_cross_correlation,
    sequence_to_array,
)

from conftest import brute_force_cross_correlation


class TestSymbol:
    def test_parse_and_format(self):
        assert str(Symbol.from_str("T3")) == "T3"
        assert Symbol.from_str("R12") == Symbol.receive(12)
        assert Symbol.transmit(2).code == 2
        assert Symbol.receive(2).code == -2
        assert Symbol.from_code(-5) == Symbol(SymbolKind.RECEIVE, 5)

    @pytest.mark.parametrize("bad", ["X1", "T", "T0x", "1T", "", "t1"])
    def test_rejects_malformed(self, bad):
        with pytest.raises(ValueError):
            Symbol.from_str(bad)

    def test_rejects_channel_zero(self):
        with pytest.raises(ValueError):
            Symbol.transmit(0)


class TestCrtMap:
    def test_worked_values(self):
        assert crt_map(7, 3, 5) == (1, 2)
        assert crt_map(0, 3, 5) == (0, 0)
        assert crt_map(11, 3, 5) == (2, 1)

    def test_rejects_non_coprime(self):
        with pytest.raises(ValueError):
            crt_map(1, 4, 6)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            crt_map(15, 3, 5)
        with pytest.raises(ValueError):
            crt_map(-1, 3, 5)

    def test_inverse_worked_values(self):
        assert crt_inverse((2, 1), 3, 5) == 11
        assert crt_inverse((0, 0), 3, 5) == 0
        assert crt_inverse((1, 0), 3, 5) == 10

    def test_inverse_rejects_non_coprime(self):
        with pytest.raises(ValueError):
            crt_inverse((1, 1), 6, 9)

    @pytest.mark.parametrize("p,q", [(2, 3), (3, 5), (4, 9), (7, 11), (8, 15), (11, 13)])
    def test_round_trip(self, p, q):
        for t in range(p * q):
            assert crt_inverse(crt_map(t, p, q), p, q) == t

    def test_shift_array_equivalence(self):
        rng = np.random.default_rng(0)
        for p, q in [(3, 5), (7, 11), (4, 9)]:
            values = rng.integers(0, 5, size=p * q)
            for tau in (0, 1, p, q, p * q - 1):
                shifted = np.roll(values, -tau)
                arr = sequence_to_array(values, p, q)
                row_shift = np.roll(arr, -(tau % p), axis=0)
                both = np.roll(row_shift, -(tau % q), axis=1)
                assert np.array_equal(sequence_to_array(shifted, p, q), both)

    def test_array_round_trip(self):
        rng = np.random.default_rng(1)
        values = rng.integers(0, 3, size=35)
        assert np.array_equal(array_to_sequence(sequence_to_array(values, 5, 7)), values)


class TestCyclicShift:
    def test_binary_example(self):
        s = BinarySequence(np.array([1, 1, 1, 0, 0]))
        assert cyclic_shift(s, 2) == BinarySequence(np.array([1, 0, 0, 1, 1]))

    def test_zero_shift_identity(self):
        s = BinarySequence(np.array([1, 0, 1, 0]))
        assert cyclic_shift(s, 0) == s

    def test_preserves_weight_and_multiset(self):
        rng = np.random.default_rng(2)
        bits = BinarySequence((rng.random(30) < 0.4).astype(int))
        seq = bits.relabel(1, 1)
        for tau in (1, 7, 29):
            assert cyclic_shift(bits, tau).weight == bits.weight
            shifted = cyclic_shift(seq, tau)
            assert sorted(shifted.codes.tolist()) == sorted(seq.codes.tolist())

    def test_out_of_range(self):
        s = BinarySequence(np.array([1, 0]))
        with pytest.raises(ValueError):
            cyclic_shift(s, 2)
        with pytest.raises(ValueError):
            cyclic_shift(s, -1)


class TestHammingCrossCorrelation:
    def test_zero_sequence(self):
        a = BinarySequence(np.array([1, 0, 1, 1, 0]))
        z = BinarySequence(np.zeros(5, dtype=int))
        assert all(hamming_cross_correlation(a, z, t) == 0 for t in range(5))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            hamming_cross_correlation(BinarySequence(np.array([1, 0])),
                                      BinarySequence(np.array([1, 0, 1])), 0)

    def test_matches_direct_loop(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            L = int(rng.integers(2, 40))
            a = BinarySequence((rng.random(L) < 0.5).astype(int))
            b = BinarySequence((rng.random(L) < 0.5).astype(int))
            tau = int(rng.integers(0, L))
            assert (hamming_cross_correlation(a, b, tau)
                    == brute_force_cross_correlation(a.bits, b.bits, tau))

    def test_weight_product_identity(self):
        # sum over all shifts equals the product of the two weights
        rng = np.random.default_rng(4)
        for _ in range(200):
            L = int(rng.integers(2, 60))
            a = BinarySequence((rng.random(L) < rng.random()).astype(int))
            b = BinarySequence((rng.random(L) < rng.random()).astype(int))
            total = sum(hamming_cross_correlation(a, b, t) for t in range(L))
            assert total == a.weight * b.weight

    def test_profile_exact(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            L = int(rng.integers(2, 80))
            a = (rng.random(L) < 0.5).astype(int)
            b = (rng.random(L) < 0.5).astype(int)
            prof = correlation_profile(a, b)
            for tau in range(L):
                assert prof[tau] == brute_force_cross_correlation(a, b, tau)


class TestScheduleSequence:
    def test_assignment_constraint(self):
        with pytest.raises(ValueError):
            ScheduleSequence.from_symbols([Symbol.transmit(2)], owner_group=1)

    def test_counts(self):
        seq = ScheduleSequence.from_symbols(
            [Symbol.transmit(1), Symbol.receive(2), Symbol.receive(1), Symbol.transmit(1)], 1)
        assert seq.transmit_count == 2
        assert seq.receive_count(1) == 1
        assert seq.receive_count(2) == 1

    def test_immutability(self):
        seq = ScheduleSequence.from_symbols([Symbol.transmit(1), Symbol.receive(1)], 1)
        with pytest.raises(ValueError):
            seq.codes[0] = -1


class TestGroupDivision:
    def test_even_division_sizes(self):
        d = GroupDivision.even(10, 3)
        assert d.sizes() == (4, 3, 3)
        assert d.k_min == 3 and d.ell == 4
        assert d.ell - d.k_min <= 1

    def test_even_assignment_rule(self):
        d = GroupDivision.even(5, 2)
        assert d.assignment == (1, 2, 1, 2, 1)
        assert d.members(1) == (1, 3, 5)
        assert d.rank_in_group(5) == 3

    def test_rejects_empty_group(self):
        with pytest.raises(ValueError):
            GroupDivision((1, 1, 3))  # group 2 empty

    def test_rejects_bad_W(self):
        with pytest.raises(ValueError):
            GroupDivision.even(3, 4)


class TestOffsetVector:
    def test_range_check(self):
        OffsetVector((0, 1, 4), period=5)
        with pytest.raises(ValueError):
            OffsetVector((0, 5), period=5)
        with pytest.raises(ValueError):
            OffsetVector((-1, 0), period=5)

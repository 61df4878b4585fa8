import pytest
from hypothesis import given, strategies as st

from sbnet.bitspace import (
    KNOWN_CODES,
    PartialCodeSet,
    all_states,
    block_exponent,
    dec,
    flipped_index,
    hamming,
    is_gray_code,
    largest_set_index,
    partial_codes,
    reflected_gray_code,
    sharing_code,
    to_bits,
    validate_partial_codes,
)


class TestEncoding:
    @pytest.mark.parametrize("v, k", [((1, 0), 1), ((0, 0, 0), 0), ((0, 1, 1), 6), ((), 0)])
    def test_dec(self, v, k):
        assert dec(v) == k

    @pytest.mark.parametrize("k, n, v", [(3, 2, (1, 1)), (1, 3, (1, 0, 0)), (6, 3, (0, 1, 1))])
    def test_to_bits(self, k, n, v):
        assert to_bits(k, n) == v

    @pytest.mark.parametrize("k, n", [(4, 2), (-1, 3), (0, -1)])
    def test_to_bits_out_of_range(self, k, n):
        with pytest.raises(ValueError):
            to_bits(k, n)

    def test_dec_rejects_non_bits(self):
        with pytest.raises(ValueError):
            dec((0, 2))

    @given(st.integers(0, 12).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, (1 << n) - 1))))
    def test_round_trip(self, nk):
        n, k = nk
        assert dec(to_bits(k, n)) == k
        assert to_bits(dec(to_bits(k, n)), n) == to_bits(k, n)

    def test_all_states_ascending(self):
        assert [dec(v) for v in all_states(4)] == list(range(16))


class TestDistances:
    @pytest.mark.parametrize(
        "a, b, h", [((0, 0), (0, 0), 0), ((1, 0), (0, 0), 1), ((1, 0, 1), (0, 1, 1), 2)]
    )
    def test_hamming(self, a, b, h):
        assert hamming(a, b) == h

    def test_hamming_length_mismatch(self):
        with pytest.raises(ValueError):
            hamming((0, 1), (0, 1, 1))

    @pytest.mark.parametrize("z, l", [((0, 0, 0), 0), ((1, 1, 0), 2), ((0, 0, 1), 3), ((1,), 1)])
    def test_largest_set_index(self, z, l):
        assert largest_set_index(z) == l

    def test_flipped_index(self):
        assert flipped_index((1, 0, 1), (1, 1, 1)) == 1
        with pytest.raises(ValueError):
            flipped_index((1, 0), (0, 1))


class TestSharingCode:
    def test_s2(self):
        assert sharing_code(2) == [(1, 0), (1, 1), (0, 1), (0, 0)]

    def test_s1(self):
        assert sharing_code(1) == [(1,), (0,)]

    def test_s3_frozen(self):
        assert sharing_code(3) == [
            (1, 0, 0), (1, 0, 1), (1, 1, 1), (1, 1, 0),
            (0, 1, 0), (0, 1, 1), (0, 0, 1), (0, 0, 0),
        ]

    @pytest.mark.parametrize("s", range(1, 11))
    def test_invariants(self, s):
        code = sharing_code(s)
        assert len(code) == 1 << s
        assert code[0] == (1,) + (0,) * (s - 1)
        assert code[-1] == (0,) * s
        assert is_gray_code(code)

    def test_rejects_zero_length(self):
        with pytest.raises(ValueError):
            sharing_code(0)

    def test_reflected_code_starts_at_zero(self):
        code = reflected_gray_code(3)
        assert code[0] == (0, 0, 0) and is_gray_code(code)

    def test_is_gray_code_negative(self):
        assert not is_gray_code([(0, 0), (1, 1)])
        assert not is_gray_code([(0, 0), (1, 0)], full=True)
        assert is_gray_code([(0, 0), (1, 0)], full=False)


def _codes(*codes):
    return tuple(tuple(tuple(v) for v in c) for c in codes)


class TestPartialCodes:
    def test_block_exponent(self):
        assert [block_exponent(m) for m in range(1, 8)] == [None, 1, None, 2, None, None, 3]

    def test_known_pair(self):
        pcs = partial_codes(2, 1)
        assert pcs.codes == (((1, 0), (0, 0)), ((1, 1), (0, 1)))
        assert all(validate_partial_codes(pcs).values())

    def test_known_codes_table_is_valid(self):
        for (m, b), codes in KNOWN_CODES.items():
            assert all(validate_partial_codes(PartialCodeSet(m, b, codes)).values())

    def test_m4_search(self):
        pcs = partial_codes(4)
        assert (pcs.m, pcs.b, len(pcs.codes), pcs.length) == (4, 2, 4, 4)
        assert all(validate_partial_codes(pcs).values())
        # The first code starts at the one-hot state used by the deep network.
        assert (1, 0, 0, 0) in [c[0] for c in pcs.codes]

    def test_m4_frozen(self):
        assert partial_codes(4).codes == _codes(
            [(1, 0, 0, 0), (1, 1, 0, 0), (0, 1, 0, 0), (0, 0, 0, 0)],
            [(1, 0, 1, 0), (0, 0, 1, 0), (0, 1, 1, 0), (1, 1, 1, 0)],
            [(1, 0, 1, 1), (0, 0, 1, 1), (0, 1, 1, 1), (1, 1, 1, 1)],
            [(1, 0, 0, 1), (1, 1, 0, 1), (0, 1, 0, 1), (0, 0, 0, 1)],
        )

    @pytest.mark.parametrize("m", [1, 3, 5])
    def test_rejects_bad_width(self, m):
        with pytest.raises(ValueError):
            partial_codes(m)

    def test_repeated_vector_breaks_partition(self):
        bad = PartialCodeSet(2, 1, _codes([(1, 0), (0, 0)], [(1, 0), (0, 0)]))
        assert not validate_partial_codes(bad)["partition"]

    def test_hamming_two_step_breaks_adjacency(self):
        bad = PartialCodeSet(2, 1, _codes([(1, 0), (0, 1)], [(1, 1), (0, 0)]))
        report = validate_partial_codes(bad)
        assert report["partition"] and not report["adjacent_steps"]

    def test_zero_not_last(self):
        bad = PartialCodeSet(2, 1, _codes([(1, 1), (0, 1)], [(1, 0), (0, 0)]))
        assert not validate_partial_codes(bad)["zero_last"]

    def test_clashing_switches(self):
        # Both codes switch bit 0 at states two flips apart.
        bad = PartialCodeSet(
            4,
            2,
            _codes(
                [(1, 0, 0, 0), (0, 0, 0, 0), (0, 1, 0, 0), (1, 1, 0, 0)],
                [(1, 0, 1, 1), (0, 0, 1, 1), (0, 1, 1, 1), (1, 1, 1, 1)],
                [(1, 0, 1, 0), (1, 1, 1, 0), (0, 1, 1, 0), (0, 0, 1, 0)],
                [(1, 0, 0, 1), (1, 1, 0, 1), (0, 1, 0, 1), (0, 0, 0, 1)],
            ),
        )
        report = validate_partial_codes(bad)
        assert report["adjacent_steps"] and not report["distinct_switches"]

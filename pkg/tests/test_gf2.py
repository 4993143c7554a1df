import random

import pytest
from hypothesis import given, settings, strategies as st

from simonbench.circuit import classical_oracle_eval
from simonbench.errors import Gf2Error, NoPeriodError, RankError
from simonbench.gf2 import (
    Basis,
    Gf2Matrix,
    add_if_independent,
    brute_force_secret,
    dot_mod2,
    solve_secret,
)


def bits(v, n):
    return format(v, f"0{n}b")


def brute_orthogonal(rows, n):
    """All nonzero vectors orthogonal to every row, by enumeration."""
    return [bits(v, n) for v in range(1, 1 << n) if all(dot_mod2(r, bits(v, n)) == 0 for r in rows)]


@pytest.mark.parametrize("a,b,expected", [("110", "111", 0), ("100", "111", 1), ("000", "101", 0), ("000", "111", 0)])
def test_dot(a, b, expected):
    assert dot_mod2(a, b) == expected


def test_dot_length_mismatch():
    with pytest.raises(Gf2Error):
        dot_mod2("10", "101")


class TestAddIfIndependent:
    def test_into_empty(self):
        b, ok = add_if_independent(Basis.empty(3), "110")
        assert ok and b.rank == 1

    def test_duplicate_rejected(self):
        b, _ = add_if_independent(Basis.empty(3), "110")
        b2, ok = add_if_independent(b, "110")
        assert not ok and b2 == b

    def test_xor_combination_rejected(self):
        b = Basis.empty(3)
        b, _ = add_if_independent(b, "110")
        b, _ = add_if_independent(b, "011")
        b, ok = add_if_independent(b, "101")
        assert not ok and b.rank == 2

    def test_zero_rejected(self):
        _, ok = add_if_independent(Basis.empty(4), "0000")
        assert not ok

    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 8).flatmap(lambda n: st.tuples(st.just(n), st.lists(st.integers(0, (1 << n) - 1), max_size=12))))
    def test_rank_matches_span_enumeration(self, data):
        n, vecs = data
        basis = Basis.empty(n)
        span = {0}
        for v in vecs:
            basis, ok = add_if_independent(basis, bits(v, n))
            assert ok == (v not in span)
            if ok:
                span |= {x ^ v for x in span}
        assert 1 << basis.rank == len(span)
        # echelon invariants
        assert list(basis.pivots) == sorted(set(basis.pivots))
        for row, p in zip(basis.rows, basis.pivots):
            assert row.bit_length() == n - p
            for q in basis.pivots:
                if q != p:
                    assert not (row >> (n - 1 - q)) & 1


class TestSolveSecret:
    def test_n3(self):
        b = Basis.empty(3)
        for v in ("110", "011"):
            b, _ = add_if_independent(b, v)
        assert brute_orthogonal(["110", "011"], 3) == ["111"]
        assert solve_secret(b, 3) == "111"

    def test_n2(self):
        b, _ = add_if_independent(Basis.empty(2), "11")
        assert brute_orthogonal(["11"], 2) == ["11"]
        assert solve_secret(b, 2) == "11"

    def test_insufficient_rank(self):
        b, _ = add_if_independent(Basis.empty(3), "110")
        with pytest.raises(RankError):
            solve_secret(b, 3)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(2, 9).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, (1 << n) - 1), st.integers(0, 2**32))))
    def test_random_secret(self, data):
        n, sv, seed = data
        rnd = random.Random(seed)
        s = bits(sv, n)
        basis = Basis.empty(n)
        rows = []
        while basis.rank < n - 1:
            v = bits(rnd.randrange(1 << n), n)
            if dot_mod2(v, s) == 0:
                basis, ok = add_if_independent(basis, v)
                if ok:
                    rows.append(v)
        got = solve_secret(basis, n)
        assert got == s
        assert all(dot_mod2(r, got) == 0 for r in rows)
        if n <= 7:
            assert brute_orthogonal(rows, n) == [s]


class TestBruteForce:
    def test_complex_n4(self):
        assert brute_force_secret(lambda x: classical_oracle_eval("complex", 4, x), 4) == "1111"

    def test_simple_n6(self):
        assert brute_force_secret(lambda x: classical_oracle_eval("simple", 6, x), 6) == "111111"

    def test_identity_has_no_period(self):
        with pytest.raises(NoPeriodError):
            brute_force_secret(lambda x: x, 3)


def test_matrix_rank():
    assert Gf2Matrix.from_strings(["110", "011", "101"]).rank() == 2
    assert Gf2Matrix.from_strings(["100", "010", "001"]).rank() == 3

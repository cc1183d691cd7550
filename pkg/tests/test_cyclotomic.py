"""Scalar arithmetic checks.

Oracle values here are hand-derived (not computed with the module itself):
  * Phi_24(x) = x^8 - x^4 + 1, so zeta24^8 = zeta24^4 - 1
  * (1 + 2*zeta3)^2 = -3  (quadratic Gauss sum for p=3)
  * sum of all n-th roots of unity = 0 for n > 1
  * sum of the primitive 24th roots = moebius(24) = 0
  * zeta24^12 = -1, zeta24^8 = zeta3, zeta24^3 = zeta8
"""

from fractions import Fraction

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from ringrep.cyclotomic import (
    CycNum,
    context,
    counts_conj,
    counts_convolve,
    counts_equal,
    counts_root,
    counts_shift,
    counts_zero,
    cyc_embed,
    order_for,
)


def test_phi24_reduction_frozen():
    ctx = context(24)
    assert ctx.phi == 8
    # zeta^8 = zeta^4 - 1 is exactly the x^8 row of the reduction matrix
    row = list(ctx.reduction[8])
    assert row == [-1, 0, 0, 0, 1, 0, 0, 0]
    z8 = CycNum.root(24, 8)
    z4 = CycNum.root(24, 4)
    assert z8 == z4 - CycNum.one(24)


def test_orders_frozen():
    assert order_for(3, 3) == 24
    assert order_for(5, 5) == 120
    assert context(120).phi == 32


def test_gauss_sum_square():
    # 1 + 2*zeta3 squares to -3
    z3 = CycNum.root(24, 8)
    s = CycNum.one(24) + z3 + z3
    assert s * s == CycNum.rational(24, -3)


def test_root_of_unity_sums():
    n = 24
    total = CycNum.zero(n)
    for k in range(n):
        total = total + CycNum.root(n, k)
    assert total == CycNum.zero(n)
    prim = CycNum.zero(n)
    for k in range(n):
        if np.gcd(k, n) == 1:
            prim = prim + CycNum.root(n, k)
    # moebius(24) = 0
    assert prim == CycNum.zero(n)


def test_minus_one_and_conj():
    z = CycNum.root(24, 1)
    assert CycNum.root(24, 12) == CycNum.rational(24, -1)
    assert z.conj() == CycNum.root(24, 23)
    real = z + z.conj()
    assert real.conj() == real


def test_embed_frozen():
    z3_in_3 = CycNum.root(3, 1)
    assert cyc_embed(z3_in_3, 24) == CycNum.root(24, 8)
    z8 = CycNum.root(8, 1)
    assert cyc_embed(z8, 24) == CycNum.root(24, 3)
    # embedding preserves products
    a = CycNum.root(8, 3) + CycNum.one(8)
    b = CycNum.root(8, 5)
    assert cyc_embed(a * b, 24) == cyc_embed(a, 24) * cyc_embed(b, 24)


def test_rational_detection():
    half = CycNum.rational(24, Fraction(1, 2))
    assert half.is_rational and half.rational_value == Fraction(1, 2)
    z = CycNum.root(24, 5)
    assert not z.is_rational


small = st.integers(min_value=-6, max_value=6)


def rand_cyc(draw, n):
    ctx = context(n)
    coeffs = tuple(Fraction(draw(small)) for _ in range(ctx.phi))
    return CycNum(n, coeffs)


@st.composite
def cyc24(draw):
    return rand_cyc(draw, 24)


@settings(max_examples=60)
@given(cyc24(), cyc24(), cyc24())
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@settings(max_examples=40)
@given(cyc24(), cyc24())
def test_conj_is_ring_hom(a, b):
    assert (a + b).conj() == a.conj() + b.conj()
    assert (a * b).conj() == a.conj() * b.conj()
    assert a.conj().conj() == a


@settings(max_examples=40)
@given(st.integers(min_value=0, max_value=23), st.integers(min_value=0, max_value=23))
def test_roots_multiply_by_exponent(i, j):
    assert CycNum.root(24, i) * CycNum.root(24, j) == CycNum.root(24, i + j)


# -------------------- count-vector form --------------------


def test_counts_round_trip():
    n = 24
    v = counts_zero(n)
    v[3] = 2
    v[20] = -1
    assert CycNum.from_counts(n, v) == (
        CycNum.root(n, 3) + CycNum.root(n, 3) - CycNum.root(n, 20)
    )


@settings(max_examples=40)
@given(st.lists(st.integers(min_value=-9, max_value=9), min_size=24, max_size=24),
       st.integers(min_value=0, max_value=47))
def test_counts_shift_matches_root_product(vals, k):
    n = 24
    v = np.array(vals, dtype=np.int64)
    shifted = counts_shift(v, k)
    lhs = CycNum.from_counts(n, shifted)
    rhs = CycNum.from_counts(n, v) * CycNum.root(n, k)
    assert lhs == rhs


@settings(max_examples=30)
@given(st.lists(st.integers(min_value=-5, max_value=5), min_size=24, max_size=24),
       st.lists(st.integers(min_value=-5, max_value=5), min_size=24, max_size=24))
def test_counts_convolve_matches_product(u, v):
    n = 24
    a = np.array(u, dtype=np.int64)
    b = np.array(v, dtype=np.int64)
    lhs = CycNum.from_counts(n, counts_convolve(a, b))
    rhs = CycNum.from_counts(n, a) * CycNum.from_counts(n, b)
    assert lhs == rhs


@settings(max_examples=30)
@given(st.lists(st.integers(min_value=-5, max_value=5), min_size=24, max_size=24))
def test_counts_conj_matches_conj(vals):
    n = 24
    v = np.array(vals, dtype=np.int64)
    assert CycNum.from_counts(n, counts_conj(n, v)) == CycNum.from_counts(n, v).conj()


def test_counts_equal_reduces_first():
    n = 24
    a = counts_root(n, 8)
    b = counts_zero(n)
    b[4] += 1
    b[12] += 1  # zeta^4 + zeta^12 = zeta^4 - 1 = zeta^8
    assert counts_equal(n, a, b)
    assert not counts_equal(n, a, counts_root(n, 4))


def test_batch_reduction_matches_scalar():
    n = 24
    rng = np.random.default_rng(7)
    mat = rng.integers(-50, 50, size=(20, n)).astype(np.int64)
    reduced = context(n).reduce_batch(mat)
    for r in range(20):
        expect = CycNum.from_counts(n, mat[r])
        got = tuple(Fraction(int(c)) for c in reduced[r])
        assert got == expect.coeffs

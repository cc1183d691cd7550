"""Tests for truncated ring and quaternion arithmetic.

The quaternion product law is cross-checked against an independent
rewriting oracle: elements are polynomials c0 + c1*phi + c2*phi^2 with
left coefficients, multiplied by sliding coefficients through phi via
phi^i * c = c^{q^i} * phi^i and truncating at phi^3.  The reduced norm
is cross-checked against the determinant of the 2x2 model
(a, b0; pi*b0^q, F(a)) computed with TruncElem matrix entries.
"""

import random

import pytest
from hypothesis import given, strategies as st

from ringrep.gf import field_create
from ringrep.truncated import (
    QuatElem,
    TruncElem,
    quat_arith,
    quat_nrd,
    quat_units,
    trunc_arith,
    trunc_create,
    trunc_elements,
    trunc_units,
)

F3 = field_create(3, 4)
Q = 3
CODES_F3 = [int(c) for c in F3.subfield_codes(1)]
CODES_F9 = [int(c) for c in F3.subfield_codes(2)]


def q_one(a0, b0, a1, field=F3):
    return QuatElem(field, a0, b0, a1)


def rewrite_mul(field, f, x: QuatElem, y: QuatElem) -> QuatElem:
    """Oracle: multiply in E<phi>/(phi^3) by generic coefficient sliding."""
    xs = (x.a0, x.b0, x.a1)
    ys = (y.a0, y.b0, y.a1)
    out = [0, 0, 0]
    for i, ci in enumerate(xs):
        for j, cj in enumerate(ys):
            if i + j >= 3:
                continue
            out[i + j] = field.add(out[i + j], field.mul(ci, field.frob(cj, f * i)))
    return QuatElem(field, out[0], out[1], out[2])


# ---------------------------------------------------------------- TruncElem


def test_trunc_pi_square_zero():
    one = trunc_create(F3, 1, 1, 0)
    x = trunc_create(F3, 1, 1, 1)  # 1 + pi
    y = trunc_create(F3, 1, 1, 2)  # 1 - pi
    assert x * y == one
    pi = trunc_create(F3, 1, 0, 1)
    assert (pi * pi).is_zero


def test_trunc_inverse_formula():
    for x in trunc_units(F3, 1):
        inv = trunc_arith(x, None, "inv")
        assert x * inv == trunc_create(F3, 1, 1, 0)
        assert inv * x == trunc_create(F3, 1, 1, 0)
    with pytest.raises(ZeroDivisionError):
        trunc_create(F3, 1, 0, 1).inverse()


def test_trunc_unit_split_is_group_iso():
    # a0 + a1 pi -> (a0, a1/a0) turns unit multiplication into
    # componentwise (mul, add); check all 6 x 6 products over F_3.
    units = trunc_units(F3, 1)
    assert len(units) == Q * (Q - 1)
    pairs = {u.unit_pair() for u in units}
    assert len(pairs) == len(units)  # bijective onto F_q^x times F_q
    for x in units:
        for y in units:
            px, py, pxy = x.unit_pair(), y.unit_pair(), (x * y).unit_pair()
            assert pxy[0] == F3.mul(px[0], py[0])
            assert pxy[1] == F3.add(px[1], py[1])


def test_trunc_unit_count_quadratic_ring():
    # coefficients in F_{q^2}: q^2 (q^2 - 1) units
    assert len(trunc_units(F3, 2)) == Q**2 * (Q**2 - 1) == 72
    assert len(trunc_elements(F3, 2)) == Q**4


def test_trunc_create_rejects_outside_subfield():
    bad = next(c for c in range(F3.N) if not F3.in_subfield(c, 2))
    with pytest.raises(ValueError):
        trunc_create(F3, 2, bad, 0)


def test_trunc_mixed_ring_rejected():
    x = trunc_create(F3, 1, 1, 0)
    y = trunc_create(F3, 2, 1, 0)
    with pytest.raises(ValueError):
        _ = x * y


@given(
    a=st.tuples(st.sampled_from(CODES_F9), st.sampled_from(CODES_F9)),
    b=st.tuples(st.sampled_from(CODES_F9), st.sampled_from(CODES_F9)),
    c=st.tuples(st.sampled_from(CODES_F9), st.sampled_from(CODES_F9)),
)
def test_trunc_ring_axioms(a, b, c):
    x = TruncElem(F3, 2, *a)
    y = TruncElem(F3, 2, *b)
    z = TruncElem(F3, 2, *c)
    assert x * y == y * x
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert (x - y) + y == x
    # Frobenius is a ring endomorphism with F^2 = id on degree-2f input
    assert (x * y).frob_q() == x.frob_q() * y.frob_q()
    assert (x + y).frob_q() == x.frob_q() + y.frob_q()
    assert x.frob_q(2) == x


@given(a0=st.sampled_from([c for c in CODES_F9 if c != 0]), a1=st.sampled_from(CODES_F9))
def test_trunc_pow_matches_repeated_mul(a0, a1):
    x = TruncElem(F3, 2, a0, a1)
    one = TruncElem(F3, 2, 1, 0)
    assert x**0 == one
    assert x**3 == x * x * x
    assert x**-1 == x.inverse()
    assert x**-2 == x.inverse() * x.inverse()


# ----------------------------------------------------------------- QuatElem


def test_quat_phi_relations():
    phi = q_one(0, 1, 0)
    pi = q_one(0, 0, 1)
    assert phi * phi == pi
    assert (pi * phi).a0 == (pi * phi).b0 == (pi * phi).a1 == 0  # phi^3 = 0
    for a in CODES_F9:
        scalar = q_one(a, 0, 0)
        assert phi * scalar == q_one(0, F3.frob(a, 1), 0)  # phi a = a^q phi
        assert scalar * phi == q_one(0, a, 0)


def test_quat_product_matches_rewrite_oracle():
    rng = random.Random(11)
    units = quat_units(F3)
    structured = [
        q_one(0, 1, 0),
        q_one(0, 0, 1),
        q_one(1, 1, 0),
        q_one(CODES_F9[4], 0, 0),
        q_one(1, CODES_F9[5], CODES_F9[7]),
    ]
    pairs = [(rng.choice(units), rng.choice(units)) for _ in range(2000)]
    pairs += [(x, y) for x in structured for y in structured]
    for x, y in pairs:
        assert x * y == rewrite_mul(F3, 1, x, y)


def test_quat_unit_count_frozen():
    # q^4 (q^2 - 1) = 648 at q = 3; exhaustive enumeration
    assert len(quat_units(F3)) == 648


def test_quat_unit_count_q5():
    F5 = field_create(5, 4)
    assert len(quat_units(F5)) == 5**4 * (5**2 - 1) == 15000


def test_quat_inverse_two_sided():
    rng = random.Random(23)
    units = quat_units(F3)
    one = q_one(1, 0, 0)
    for x in rng.sample(units, 200):
        inv = quat_arith(x, None, "inv")
        assert x * inv == one
        assert inv * x == one
    with pytest.raises(ZeroDivisionError):
        q_one(0, 1, 0).inverse()


def test_quat_nrd_values():
    # Nrd(phi) = -pi by the norm formula (nilpotent, non-unit)
    n = quat_nrd(q_one(0, 1, 0))
    assert n.a0 == 0 and n.a1 == F3.neg(1)
    assert not n.is_unit
    # scalars: Nrd(a) = a^{q+1}, the field norm to F_q
    for a in CODES_F9:
        if a == 0:
            continue
        n = quat_nrd(q_one(a, 0, 0))
        assert n.a1 == 0
        assert n.a0 == F3.norm(a, 2, 1)
        assert n.deg == 1


def test_quat_nrd_multiplicative_sampled():
    rng = random.Random(5)
    units = quat_units(F3)
    for _ in range(10**4):
        x, y = rng.choice(units), rng.choice(units)
        assert quat_nrd(x * y) == quat_nrd(x) * quat_nrd(y)


def test_quat_nrd_image_and_kernel():
    units = quat_units(F3)
    base_units = {(u.a0, u.a1) for u in trunc_units(F3, 1)}
    image = set()
    kernel = 0
    one = trunc_create(F3, 1, 1, 0)
    for x in units:
        n = quat_nrd(x)
        assert (n.a0, n.a1) in base_units  # lands in (O_F/pi^2)^x
        image.add((n.a0, n.a1))
        if n == one:
            kernel += 1
    assert image == base_units  # surjective
    assert kernel == len(units) // len(base_units) == 108


def test_quat_commutator_identity():
    # [1 + phi b, 1 + phi b'] = 1 + pi (b^q b' - b b'^q), all 81 pairs.
    # Note 1 + phi b = 1 + b^q phi in right-coefficient form.
    for b in CODES_F9:
        for bp in CODES_F9:
            x = q_one(1, F3.frob(b, 1), 0)
            y = q_one(1, F3.frob(bp, 1), 0)
            comm = x * y * x.inverse() * y.inverse()
            expected = F3.sub(
                F3.mul(F3.frob(b, 1), bp), F3.mul(b, F3.frob(bp, 1))
            )
            assert comm == q_one(1, 0, expected)


def test_quat_pi_line_central_in_unipotent_part():
    # U = {1 + a1 pi} commutes with every 1 + b0 phi + a1' pi
    for a1 in CODES_F9:
        u = q_one(1, 0, a1)
        for b0 in CODES_F9:
            for a1p in CODES_F9[::3]:
                v = q_one(1, b0, a1p)
                assert u * v == v * u


def test_quat_nrd_matches_matrix_determinant():
    # det of (a, b0; pi b0^q, F(a)) with TruncElem entries over F_{q^2}
    rng = random.Random(17)
    units = quat_units(F3)
    for _ in range(500):
        x = rng.choice(units)
        a = TruncElem(F3, 2, x.a0, x.a1)
        off = TruncElem(F3, 2, x.b0, 0)
        off_q = TruncElem(F3, 2, 0, F3.frob(x.b0, 1))  # pi * b0^q
        det = a * a.frob_q() - off * off_q
        n = quat_nrd(x)
        assert (det.a0, det.a1) == (n.a0, n.a1)


def test_quat_matrix_model_tracks_products():
    # The (1,1) and (2,1) entries of the matrix product equal the matrix
    # of the quaternion product; the (1,2) entry may differ by a pi term
    # that the phi^3 truncation kills.
    rng = random.Random(29)
    units = quat_units(F3)

    def matrix_of(x):
        a = TruncElem(F3, 2, x.a0, x.a1)
        return (
            a,
            TruncElem(F3, 2, x.b0, 0),
            TruncElem(F3, 2, 0, F3.frob(x.b0, 1)),
            a.frob_q(),
        )

    for _ in range(500):
        x, y = rng.choice(units), rng.choice(units)
        xa, xb, xc, xd = matrix_of(x)
        ya, yb, yc, yd = matrix_of(y)
        prod_11 = xa * ya + xb * yc
        prod_21 = xc * ya + xd * yc
        za, _, zc, _ = matrix_of(x * y)
        assert prod_11 == za
        assert prod_21 == zc


@given(
    x=st.tuples(
        st.sampled_from(CODES_F9), st.sampled_from(CODES_F9), st.sampled_from(CODES_F9)
    ),
    y=st.tuples(
        st.sampled_from(CODES_F9), st.sampled_from(CODES_F9), st.sampled_from(CODES_F9)
    ),
    z=st.tuples(
        st.sampled_from(CODES_F9), st.sampled_from(CODES_F9), st.sampled_from(CODES_F9)
    ),
)
def test_quat_ring_axioms(x, y, z):
    a, b, c = q_one(*x), q_one(*y), q_one(*z)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a + b) * c == a * c + b * c
    assert quat_nrd(a * b) == quat_nrd(a) * quat_nrd(b)


@given(
    x0=st.sampled_from([c for c in CODES_F9 if c != 0]),
    y0=st.integers(0, 80),
    x1=st.integers(0, 80),
    b=st.tuples(
        st.sampled_from([c for c in CODES_F9 if c != 0]),
        st.sampled_from(CODES_F9),
        st.sampled_from(CODES_F9),
    ),
    t=st.tuples(
        st.sampled_from([c for c in CODES_F9 if c != 0]), st.sampled_from(CODES_F9)
    ),
)
def test_quat_base_change_actions_stay_exact(x0, y0, x1, b, t):
    # Base-changed point: constant coordinate in F_{q^2} (the shape the
    # norm condition forces), other coordinates ambient.  Right action
    # by a unit and left action by a torus element must agree with the
    # rewriting oracle, and the norm must stay multiplicative codewise.
    pt = q_one(x0, y0, x1)
    unit = q_one(*b)
    torus = q_one(t[0], 0, t[1])

    def codes(n):
        return (n.a0, n.a1)

    def tmul(u, v):
        return (
            F3.mul(u[0], v[0]),
            F3.add(F3.mul(u[0], v[1]), F3.mul(u[1], v[0])),
        )

    right = pt * unit
    assert right == rewrite_mul(F3, 1, pt, unit)
    assert codes(quat_nrd(right)) == tmul(codes(quat_nrd(pt)), codes(quat_nrd(unit)))

    left = torus * pt
    assert left == rewrite_mul(F3, 1, torus, pt)
    assert codes(quat_nrd(left)) == tmul(codes(quat_nrd(torus)), codes(quat_nrd(pt)))

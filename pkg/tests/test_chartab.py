"""Character-table checks against hand tables and textbook degree lists."""

from collections import Counter
from fractions import Fraction

import pytest

from ringrep.cyclotomic import CycNum
from ringrep.gf import field_create
from ringrep.chartab import (
    ClassFunction,
    class_sizes,
    decompose,
    dixon_table,
    identity_class,
    induce,
    inner_product,
    inner_product_on_subgroup,
    regular_character,
    restrict,
    trivial_character,
)
from ringrep.groups import (
    build_gamma,
    build_gl1,
    build_quat_unit_group,
    conjugacy_classes,
    group_materialize,
    subgroup_with_transversal,
)

F3 = field_create(3, 4)
N24 = 24


def _cyclic(n):
    return group_materialize(range(n), lambda x, y: (x + y) % n,
                             assume_closed=True, name=f"C{n}")


PERMS = [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]


def _perm_label(p):
    return p[0] + 3 * p[1] + 9 * p[2]


def _perm_mul(x, y):
    lab = [_perm_label(p) for p in PERMS]
    px, py = PERMS[lab.index(x)], PERMS[lab.index(y)]
    return _perm_label(tuple(px[py[i]] for i in range(3)))


@pytest.fixture(scope="module")
def s3():
    return group_materialize([_perm_label(p) for p in PERMS], _perm_mul,
                             assume_closed=True, name="S3")


@pytest.fixture(scope="module")
def gl1():
    return build_gl1(F3)


@pytest.fixture(scope="module")
def gl1_table(gl1):
    return dixon_table(gl1, n_ctx=N24)


def test_cyclic_four_table():
    t = dixon_table(_cyclic(4))
    assert t.degrees == [1, 1, 1, 1]
    one = CycNum.one(4)
    i = CycNum.root(4, 1)
    seen = {v for row in t.rows for v in row.values}
    assert seen == {one, -one, i, -i}


def test_s3_table_matches_hand_values(s3):
    # element order: labels sort so that class 0 = transpositions (size 3),
    # class 1 = 3-cycles (size 2), class 2 = identity
    t = dixon_table(s3, n_ctx=N24)
    assert sorted(t.degrees) == [1, 1, 2]
    assert list(class_sizes(s3)) == [3, 2, 1]
    assert identity_class(s3) == 2

    def cf(vals):
        return ClassFunction(s3, tuple(CycNum.rational(N24, v) for v in vals))

    hand = {cf((1, 1, 1)), cf((-1, 1, 1)), cf((0, -1, 2))}
    assert set(t.rows) == hand


def test_q8_table_contains_the_two_dimensional_row():
    def quat_mul(x, y):
        ax, sx = divmod(x, 2)
        ay, sy = divmod(y, 2)
        s = sx ^ sy
        if ax == 0:
            return 2 * ay + s
        if ay == 0:
            return 2 * ax + s
        if ax == ay:
            return (s ^ 1)
        if ay == ax % 3 + 1:
            return 2 * (6 - ax - ay) + s
        return 2 * (6 - ax - ay) + (s ^ 1)

    Q8 = group_materialize(range(8), quat_mul, assume_closed=True, name="Q8")
    t = dixon_table(Q8, n_ctx=N24)
    assert sorted(t.degrees) == [1, 1, 1, 1, 2]
    two = [r for r in t.rows if r.degree == CycNum.rational(N24, 2)][0]
    got = Counter(
        (len(c), v) for c, v in zip(conjugacy_classes(Q8), two.values)
    )
    want = Counter(
        [
            (1, CycNum.rational(N24, 2)),
            (1, CycNum.rational(N24, -2)),
            (2, CycNum.zero(N24)),
            (2, CycNum.zero(N24)),
            (2, CycNum.zero(N24)),
        ]
    )
    assert got == want


def test_gl2_residue_table_degrees(gl1_table):
    assert sorted(gl1_table.degrees) == [1, 1, 2, 2, 2, 3, 3, 4]


def test_gamma_table_is_all_linear():
    Gam = build_gamma(F3)
    t = dixon_table(Gam, n_ctx=N24)
    assert len(t.rows) == 72
    assert set(t.degrees) == {1}


def test_quat_unit_degrees_and_class_count():
    O3 = build_quat_unit_group(F3)
    t = dixon_table(O3, n_ctx=N24)
    assert len(t.rows) == len(conjugacy_classes(O3)) == 84
    assert sum(d * d for d in t.degrees) == 648
    assert Counter(t.degrees) == {1: 24, 3: 48, 4: 12}


def test_inner_products_on_basics(gl1, gl1_table):
    triv = trivial_character(gl1, N24)
    reg = regular_character(gl1, N24)
    assert inner_product(triv, triv) == CycNum.one(N24)
    assert inner_product(reg, triv) == CycNum.one(N24)
    assert decompose(reg, gl1_table) == gl1_table.degrees


def test_column_orthogonality_exact(gl1, gl1_table):
    classes = conjugacy_classes(gl1)
    sizes = class_sizes(gl1)
    for i in range(len(classes)):
        for j in range(i, len(classes)):
            acc = CycNum.zero(N24)
            for row in gl1_table.rows:
                acc = acc + row.values[i] * row.values[j].conj()
            if i == j:
                assert acc == CycNum.rational(N24, Fraction(gl1.n, int(sizes[i])))
            else:
                assert acc == CycNum.zero(N24)


def test_induction_and_frobenius_reciprocity(s3):
    table = dixon_table(s3, n_ctx=N24)
    three_cycle = next(
        i for i in range(s3.n) if s3.order_of(i) == 3
    )
    H = subgroup_with_transversal(s3, [three_cycle])
    assert H.order == 3 and H.index_in_group == 2
    # the three characters of the cyclic subgroup, by matching powers
    e = s3.identity
    c = three_cycle
    c2 = s3.mul(c, c)
    for j in range(3):
        phi = {
            e: CycNum.one(N24),
            c: CycNum.root(N24, 8 * j),
            c2: CycNum.root(N24, 16 * j),
        }
        ind = induce(H, phi, N24)
        assert ind.degree == CycNum.rational(N24, 2)
        for chi in table.rows:
            lhs = inner_product(ind, chi)
            rhs = inner_product_on_subgroup(H, phi, restrict(chi, H))
            assert lhs == rhs


def test_induced_trivial_degree_is_subgroup_index(gl1):
    # a Borel-like solvable subgroup: upper triangular matrices
    codec = gl1.codec
    gens = [
        gl1.index_of(codec.pack([1, 1, 0, 1])),
        gl1.index_of(codec.pack([2, 0, 0, 1])),
        gl1.index_of(codec.pack([1, 0, 0, 2])),
    ]
    B = subgroup_with_transversal(gl1, gens)
    assert B.order == 12 and B.index_in_group == 4
    vals = {h: CycNum.one(N24) for h in B.indices}
    ind = induce(B, vals, N24)
    assert ind.degree == CycNum.rational(N24, 4)


def test_decompose_rejects_non_characters(gl1, gl1_table):
    half = ClassFunction(
        gl1, tuple(v.scale(Fraction(1, 2)) for v in trivial_character(gl1, N24).values)
    )
    with pytest.raises(ValueError):
        decompose(half, gl1_table)


def test_solver_bounds_and_context_errors(gl1):
    with pytest.raises(ValueError, match="bound"):
        dixon_table(gl1, max_order=10)
    with pytest.raises(ValueError, match="exp"):
        dixon_table(gl1, n_ctx=8)  # exponent 24 does not divide 8


def test_table_json_round_shape(gl1, gl1_table):
    blob = gl1_table.to_json()
    assert blob["order"] == 48
    assert len(blob["rows"]) == 8
    assert len(blob["classes"]) == 8
    assert {c["size"] for c in blob["classes"]} == {
        len(c) for c in conjugacy_classes(gl1)
    }

"""Engine checks against hand-built oracles plus the concrete groups.

The symmetric and quaternion groups are written out from first
principles here (tuple composition, sign rules) so the engine's
closure, identity, inverse, and class machinery is checked against
arithmetic it had no hand in.
"""

import numpy as np
import pytest

from ringrep.gf import field_create
from ringrep.groups import (
    GroupElem,
    build_gamma,
    build_gl1,
    build_gl2,
    build_quat_unit_group,
    build_sl1,
    build_sl2,
    check_hom,
    conjugacy_classes,
    gamma_norm_twist,
    group_materialize,
    reduction_to_residue,
    subgroup_with_transversal,
    torus_embedding,
)

F3 = field_create(3, 4)


@pytest.fixture(scope="module")
def g2():
    return build_gl2(F3)


@pytest.fixture(scope="module")
def gamma():
    return build_gamma(F3)


@pytest.fixture(scope="module")
def quat():
    return build_quat_unit_group(F3)


# ----- hand oracles -----

PERMS = [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]


def _perm_label(p):
    return p[0] + 3 * p[1] + 9 * p[2]


def _perm_mul(x, y):
    px = PERMS[[_perm_label(p) for p in PERMS].index(x)]
    py = PERMS[[_perm_label(p) for p in PERMS].index(y)]
    return _perm_label(tuple(px[py[i]] for i in range(3)))


def _quat_mul(x, y):
    # labels 2*axis + sign with axes 0=scalar, 1=i, 2=j, 3=k
    ax, sx = divmod(x, 2)
    ay, sy = divmod(y, 2)
    s = sx ^ sy
    if ax == 0:
        return 2 * ay + s
    if ay == 0:
        return 2 * ax + s
    if ax == ay:
        return 2 * 0 + (s ^ 1)
    # cyclic rule: i*j=k, j*k=i, k*i=j; reversed order flips the sign
    if ay == ax % 3 + 1:
        return 2 * (6 - ax - ay) + s
    return 2 * (6 - ax - ay) + (s ^ 1)


def test_s3_materializes_from_generators():
    gens = [_perm_label((1, 0, 2)), _perm_label((0, 2, 1))]
    G = group_materialize(gens, _perm_mul, name="S3")
    assert G.n == 6
    assert G.labels[G.identity] == _perm_label((0, 1, 2))
    sizes = sorted(len(c) for c in conjugacy_classes(G))
    assert sizes == [1, 2, 3]
    three_cycle = G.element(_perm_label((1, 2, 0)))
    assert (three_cycle * three_cycle * three_cycle).index == G.identity
    assert three_cycle.inv() == three_cycle**2


def test_q8_classes_and_center():
    G = group_materialize(range(8), _quat_mul, assume_closed=True, name="Q8")
    assert G.n == 8
    sizes = sorted(len(c) for c in conjugacy_classes(G))
    assert sizes == [1, 1, 2, 2, 2]
    minus_one = G.element(1)
    for a in (2, 4, 6):
        assert (G.element(a) ** 2) == minus_one


def test_broken_oracle_is_rejected():
    def bad_mul(x, y):
        out = _perm_mul(x, y)
        # send two distinct products to the same element
        if (x, y) == (_perm_label((1, 0, 2)), _perm_label((0, 2, 1))):
            return x
        return out

    with pytest.raises(ValueError):
        group_materialize([_perm_label(p) for p in PERMS], bad_mul,
                          assume_closed=True, name="S3bad")


def test_closure_bound_is_enforced():
    with pytest.raises(ValueError, match="bound"):
        group_materialize([1], lambda x, y: x + y, name="free", bound=50)


def test_unknown_label_raises(g2):
    with pytest.raises(KeyError):
        g2.index_of(0)  # the zero matrix is not a unit


# ----- concrete groups -----


def test_gl2_truncated_order_and_elements(g2):
    assert g2.n == 3888
    e = GroupElem(g2, g2.identity)
    assert e.label == g2.codec.pack([1, 0, 0, 0, 0, 0, 1, 0])
    assert len(conjugacy_classes(g2)) == 78  # re-derived by the table count
    rng = np.random.default_rng(3)
    for i in rng.integers(0, g2.n, 12):
        assert 3888 % g2.order_of(int(i)) == 0


def test_residue_groups_match_known_counts():
    G1 = build_gl1(F3)
    assert G1.n == 48
    assert len(conjugacy_classes(G1)) == 8
    S1 = build_sl1(F3)
    assert S1.n == 24
    assert len(conjugacy_classes(S1)) == 7


def test_sl2_truncated_order():
    S2 = build_sl2(F3)
    assert S2.n == 648
    assert len(conjugacy_classes(S2)) == 25


def test_reduction_kernel_is_abelian_of_order_81(g2):
    G1 = build_gl1(F3)
    red = reduction_to_residue(g2, G1)
    ker = np.flatnonzero(red == G1.identity)
    assert len(ker) == 81
    # elementary abelian: commuting and exponent 3
    for i in ker[:20]:
        assert g2.pow_(int(i), 3) == g2.identity
    tab = g2.table
    assert (tab[np.ix_(ker, ker)] == tab[np.ix_(ker, ker)].T).all()
    assert check_hom(red, g2, G1)


def test_gamma_is_abelian_72(gamma):
    assert gamma.n == 72
    classes = conjugacy_classes(gamma)
    assert len(classes) == 72
    assert all(len(c) == 1 for c in classes)


def test_torus_embedding_is_injective_hom(gamma, g2):
    emb, zeta0 = torus_embedding(gamma, g2)
    assert check_hom(emb, gamma, g2)
    assert len(set(emb.tolist())) == gamma.n
    assert not F3.in_subfield(zeta0, 1)


def test_norm_twist_is_hom_onto_norm_one_part(gamma):
    nt = gamma_norm_twist(gamma)
    assert check_hom(nt, gamma, gamma)
    image = sorted(set(int(i) for i in nt))
    assert len(image) == 4
    for i in image:
        assert gamma.pow_(i, 4) == gamma.identity


def test_squaring_is_not_a_hom(g2):
    square = g2.table[np.arange(g2.n), np.arange(g2.n)]
    assert not check_hom(square, g2, g2)


def test_gamma_n_subgroup_and_transversal(gamma, g2):
    emb, _ = torus_embedding(gamma, g2)
    n_gens = [
        g2.index_of(g2.codec.pack(v))
        for v in (
            [1, 1, 0, 0, 0, 0, 1, 0],
            [1, 0, 0, 1, 0, 0, 1, 0],
            [1, 0, 0, 0, 0, 1, 1, 0],
            [1, 0, 0, 0, 0, 0, 1, 1],
        )
    ]
    gn = subgroup_with_transversal(
        g2, [int(emb[g]) for g in gamma.generators] + n_gens
    )
    assert gn.order == 648
    assert gn.index_in_group == 6
    rng = np.random.default_rng(7)
    for g in rng.integers(0, g2.n, 40):
        g = int(g)
        t = gn.transversal[gn.coset_index[g]]
        assert g2.mul(t, int(gn.h_part[g])) == g
        assert gn.in_subgroup[int(gn.h_part[g])]


def test_pi_line_subgroup_of_quaternion_units(quat):
    assert quat.n == 648
    zeta = F3.subfield_generator(2)
    U = subgroup_with_transversal(
        quat,
        [
            quat.index_of(quat.codec.pack([1, 0, 1])),
            quat.index_of(quat.codec.pack([1, 0, zeta])),
        ],
    )
    assert U.order == 9
    assert U.index_in_group == 72


def test_quat_class_count_is_recorded(quat):
    # the character-table tests re-derive this count independently
    assert len(conjugacy_classes(quat)) == 84


def test_class_size_times_centralizer_is_group_order(g2):
    classes = conjugacy_classes(g2)
    tab = g2.table
    rng = np.random.default_rng(11)
    for ci in rng.integers(0, len(classes), 10):
        rep = classes[ci][0]
        cent = int((tab[:, rep] == tab[rep, :]).sum())
        assert cent * len(classes[ci]) == g2.n


def test_no_table_path_at_q5():
    F5 = field_create(5, 4)
    S2 = build_sl2(F5)
    assert S2.n == 15000
    assert S2.table is None
    g = 12345 % S2.n
    gi = S2.inv(g)
    assert S2.mul(g, gi) == S2.identity
    assert S2.mul(gi, g) == S2.identity
    gam5 = build_gamma(F5)
    assert gam5.n == 600

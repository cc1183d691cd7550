"""Point-scan layer: surface census, curve counts, actions, quotients."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ringrep.gf import FieldElem
from ringrep.surfaces import (
    CURVE_ACTIONS,
    CurveComponent,
    SurfacePoint,
    check_iota,
    count_affine,
    count_curve,
    curve_components,
    enumerate_S,
    enumerate_S00,
    enumerate_X0D,
    enumerate_XD,
    equivariance_check,
    f_values,
    fiber_line_count,
    fixed_points,
    genus_verdict,
    quotient_Aprime,
    s00_act_residue,
    s00_reverse,
    s00_simply_transitive,
    s0_stability_check,
    surface_action_check,
    surface_context,
    t0_values,
    torus_pair_cancellation,
    xi_values,
    _sample_group_digits,
    _t22_mul,
)

N24 = 24


@pytest.fixture(scope="module")
def ctx():
    return surface_context(3, 1)


@pytest.fixture(scope="module")
def base_pts(ctx):
    return enumerate_S00(ctx)


def test_base_locus_sizes_and_transitivity(ctx, base_pts):
    assert len(base_pts) == 48
    assert s00_simply_transitive(ctx, base_pts)
    pts1 = enumerate_S00(ctx, det_one=True)
    assert len(pts1) == 24
    assert s00_simply_transitive(ctx, pts1, det_one=True)
    # every unit of the prime field occurs as a curve parameter
    assert set(xi_values(ctx, base_pts).tolist()) == {1, 2}


def test_surface_census_over_the_tower(ctx):
    sc = enumerate_S(ctx, 4)
    assert sc.total == 34992 == 48 * 729
    assert sc.star == sc.total and sc.off_star == 0
    assert (sc.fiber_counts == 729).all()
    assert int(sc.pair_in_s00.sum()) == 48
    # the obstruction column agrees with the power-condition flag
    assert ((t0_values(ctx, sc.pairs) == 0) == sc.pair_in_s00).all()
    # no rational points below the top of the tower: the constant wedge
    # lands in the trace kernel, which meets the prime field only at zero
    assert enumerate_S(ctx, 2).total == 0
    assert enumerate_S(ctx, 1).total == 0
    sc1 = enumerate_S(ctx, 4, det_one=True)
    assert sc1.total == 5832 == 24 * 243
    assert sc1.off_star == 0


def test_surface_census_scan_cap(ctx):
    with pytest.raises(ValueError, match="cap"):
        enumerate_S(ctx, 4, cap=10**4)


def test_enumerated_points_satisfy_membership(ctx):
    sc = enumerate_S(ctx, 4, return_points=True)
    assert sc.points is not None and len(sc.points) == sc.total
    k = len(sc.points) // 2
    p = SurfacePoint(*(FieldElem(ctx.field, int(c)) for c in sc.points[k]))
    assert p.satisfies_membership(ctx)
    # zeroing the leading pair kills the wedge, so the unit condition fails
    zero = FieldElem(ctx.field, 0)
    assert not SurfacePoint(zero, p.x1, zero, p.y1).satisfies_membership(ctx)


def test_fiber_line_counts_all_rationality_levels(ctx):
    sub1 = ctx.subcodes(1)
    sub2 = ctx.subcodes(2)
    t1 = int(sub1[sub1 != 0][0])
    t2 = int(sub2[~ctx.in_fq[sub2] & (sub2 != 0)][0])
    assert fiber_line_count(ctx, t0=t1) == (1, 9, 9)
    assert fiber_line_count(ctx, t0=t2) == (2, 27, 27)
    m, count, expected = fiber_line_count(ctx)
    assert m == 4 and count == expected == 243
    with pytest.raises(ValueError, match="nonzero"):
        fiber_line_count(ctx, t0=0)


@pytest.mark.parametrize("det_one,m,n_expected", [
    (False, 2, 0),
    (False, 4, 34992),
    (True, 2, 0),
    (True, 4, 5832),
])
def test_iota_matrix_model(ctx, det_one, m, n_expected):
    r = check_iota(ctx, m=m, det_one=det_one)
    assert r.n_points == n_expected
    assert r.bijection_ok
    assert r.det_identity_ok
    assert r.identity_excluded
    assert r.shape_forced_ok
    assert r.equivariance_ok


def test_curve_components_and_counts(ctx):
    for xi in (1, 2):
        comps = curve_components(ctx, xi)
        assert [c.c for c in comps] == [0, 1, 2]
        for comp in comps:
            assert count_affine(ctx, comp, 2) == 27
            assert count_curve(ctx, comp, 2).count == 28 == 3**3 + 1
            assert count_curve(ctx, comp, 4).count == 28 == 3**4 + 1 - 2 * 3 * 9
            assert genus_verdict(ctx, comp) == 3 == 3 * (3 - 1) // 2


def test_genus_verdict_catches_corruption(ctx):
    sub2 = ctx.subcodes(2)
    bad_c = int(sub2[~ctx.in_fq[sub2]][1])
    with pytest.raises(ValueError):
        genus_verdict(ctx, CurveComponent(xi=1, c=bad_c))
    sub4 = ctx.subcodes(4)
    bad_xi = int(sub4[~ctx.in_fq[sub4]][0])
    with pytest.raises(ValueError):
        curve_components(ctx, bad_xi)


def test_fixed_points_match_spectral_count(ctx):
    for z in ctx.mu.tolist():
        if z == 1:
            continue
        r = fixed_points(ctx, 1, int(z), n_ctx=N24)
        assert r.direct == r.lefschetz == 12 == 3 * (3 + 1)
    with pytest.raises(ValueError):
        fixed_points(ctx, 1, 1, n_ctx=N24)
    # an element outside the norm-one group is rejected
    outside = int(ctx.fq2[~np.isin(ctx.fq2, ctx.mu) & (ctx.fq2 != 0)][0])
    with pytest.raises(ValueError):
        fixed_points(ctx, 1, outside, n_ctx=N24)


@pytest.mark.parametrize("kind", CURVE_ACTIONS)
def test_curve_actions_equivariance(ctx, kind):
    assert equivariance_check(ctx, kind, m=4, n_pairs=200)


def test_torus_pair_cancellation(ctx):
    assert torus_pair_cancellation(ctx, n_samples=100)


def test_dual_family_components(ctx):
    xd = enumerate_XD(ctx, 4)
    assert xd.n_components == 8 == 3**2 - 1
    assert set(xd.counts.values()) == {81}
    # the norm map hits each unit of the prime field q+1 times
    assert xd.xi_fibers == {1: 4, 2: 4}
    assert xd.change_of_variables_ok


def test_norm_one_dual_copies(ctx):
    for m in (2, 4):
        copies = enumerate_X0D(ctx, m)
        assert len(copies) == 4 == 3 + 1
        assert set(copies.values()) == {27}


def test_quotient_by_translations(ctx):
    qr = quotient_Aprime(ctx, 4)
    assert qr.n_points == 34992
    assert qr.free
    assert qr.n_orbits == 11664 == 34992 // 3
    assert qr.labels == (0, 1, 2)
    assert qr.d2_hom_ok and qr.t2_hom_ok


def test_surface_action_and_stability(ctx):
    assert surface_action_check(ctx)
    assert s0_stability_check(ctx)


def test_residue_action_scales_curve_parameter(ctx, base_pts):
    rev = s00_reverse(ctx, base_pts)
    xi = xi_values(ctx, base_pts)
    rng = np.random.default_rng(13)
    for _ in range(25):
        dig = _sample_group_digits(ctx, rng)
        perm = s00_act_residue(ctx, base_pts, rev, dig[0], dig[2], dig[4], dig[6])
        det0 = int(ctx.sub(ctx.mul(dig[0], dig[6]), ctx.mul(dig[2], dig[4])))
        assert np.array_equal(xi[perm], ctx.mul(det0, xi))


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1))
def test_cocycle_composition_rule(seed):
    """f(i, g*h) = det0(h)*f(i, g) + f(i*gbar, h) on the whole base locus."""
    ctx = surface_context(3, 1)
    pts = enumerate_S00(ctx)
    rev = s00_reverse(ctx, pts)
    rng = np.random.default_rng(seed)
    g = _sample_group_digits(ctx, rng)
    h = _sample_group_digits(ctx, rng)
    gh = _t22_mul(ctx, g, h)
    det0h = int(ctx.sub(ctx.mul(h[0], h[6]), ctx.mul(h[2], h[4])))
    perm_g = s00_act_residue(ctx, pts, rev, g[0], g[2], g[4], g[6])
    lhs = f_values(ctx, pts, gh)
    rhs = ctx.add(ctx.mul(det0h, f_values(ctx, pts, g)), f_values(ctx, pts, h)[perm_g])
    assert np.array_equal(lhs, rhs)


def test_cocycle_lands_in_trace_kernel_for_pinned_wedge(ctx, base_pts):
    rng = np.random.default_rng(17)
    for _ in range(25):
        dig = _sample_group_digits(ctx, rng, det_one=True)
        fv = f_values(ctx, base_pts, dig)
        assert (ctx.add(ctx.q1[fv], fv) == 0).all()


def test_q5_smoke():
    ctx5 = surface_context(5, 1)
    pts = enumerate_S00(ctx5)
    assert len(pts) == 480 == 5 * 4 * 24
    assert s00_simply_transitive(ctx5, pts)
    assert enumerate_S(ctx5, 2).total == 0
    comps = curve_components(ctx5, 1, m=2)
    assert len(comps) == 5
    assert count_curve(ctx5, comps[0], 2).count == 126 == 5**3 + 1
    copies = enumerate_X0D(ctx5, 2)
    assert len(copies) == 6 and set(copies.values()) == {125}
    m, count, expected = fiber_line_count(ctx5)
    assert (m, count) == (4, expected)
    z = int(ctx5.mu[1])
    r = fixed_points(ctx5, 1, z, n_ctx=120)
    assert r.direct == r.lefschetz == 30 == 5 * (5 + 1)
    assert check_iota(ctx5, m=2).bijection_ok


def test_q5_components_split_by_norm():
    ctx5 = surface_context(5, 1)
    xd = enumerate_XD(ctx5, 2)
    assert xd.n_components == 24 == 5**2 - 1
    # over F_{q^2} the skew-part condition is vacuous: a full affine plane
    assert set(xd.counts.values()) == {625}
    # norm fibers: each unit hit q+1 = 6 times
    assert set(xd.xi_fibers.values()) == {6}
    assert xd.change_of_variables_ok

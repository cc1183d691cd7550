"""Class functions, induction, and a Burnside-Dixon character-table solver.

Characters take values in one fixed cyclotomic field Q(zeta_n); the
solver works over a prime field F_ell with ell = 1 mod exp(G), finds the
simultaneous eigenvectors of the class-multiplication matrices there,
and lifts eigenvalue multiplicities back to exact zeta powers.  All
linear algebra mod ell is written out here: row reduction, nullspaces,
Hessenberg characteristic polynomials, and equal-degree root splitting.

Isomorphism of representations is decided by equality of characters
throughout the package, so this module is the arbiter every model check
ultimately reduces to.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

import numpy as np
from sympy import isprime
from sympy.ntheory.residue_ntheory import sqrt_mod

from .cyclotomic import CycNum, context
from .groups import FiniteGroup, Subgroup, conjugacy_classes

__all__ = [
    "ClassFunction",
    "CharTable",
    "class_sizes",
    "identity_class",
    "inner_product",
    "trivial_character",
    "regular_character",
    "dixon_table",
    "induce",
    "restrict",
    "inner_product_on_subgroup",
    "decompose",
]


def class_sizes(G: FiniteGroup) -> np.ndarray:
    return np.array([len(c) for c in conjugacy_classes(G)], dtype=np.int64)


def identity_class(G: FiniteGroup) -> int:
    conjugacy_classes(G)
    return int(G.class_of[G.identity])


@dataclass(frozen=True)
class ClassFunction:
    """A class function on a group: one CycNum per conjugacy class."""

    group: FiniteGroup
    values: tuple[CycNum, ...]

    def __post_init__(self):
        assert len(self.values) == len(conjugacy_classes(self.group))

    @property
    def order(self) -> int:
        return self.values[0].order

    @property
    def degree(self) -> CycNum:
        return self.values[identity_class(self.group)]

    def at_element(self, i: int) -> CycNum:
        return self.values[int(self.group.class_of[i])]

    def __add__(self, other: "ClassFunction") -> "ClassFunction":
        assert self.group is other.group
        return ClassFunction(
            self.group, tuple(a + b for a, b in zip(self.values, other.values))
        )

    def __mul__(self, other: "ClassFunction") -> "ClassFunction":
        assert self.group is other.group
        return ClassFunction(
            self.group, tuple(a * b for a, b in zip(self.values, other.values))
        )

    def conj(self) -> "ClassFunction":
        return ClassFunction(self.group, tuple(v.conj() for v in self.values))


def inner_product(f: ClassFunction, g: ClassFunction) -> CycNum:
    """(1/|G|) sum_g f(g) conj(g(g)), exact."""
    if f.group is not g.group:
        raise ValueError("class functions live on different groups")
    sizes = class_sizes(f.group)
    n = f.order
    acc = CycNum.zero(n)
    for s, a, b in zip(sizes, f.values, g.values):
        acc = acc + (a * b.conj()) * int(s)
    return acc.scale(Fraction(1, f.group.n))


def trivial_character(G: FiniteGroup, n: int) -> ClassFunction:
    one = CycNum.one(n)
    return ClassFunction(G, tuple([one] * len(conjugacy_classes(G))))


def regular_character(G: FiniteGroup, n: int) -> ClassFunction:
    k0 = identity_class(G)
    vals = [CycNum.zero(n)] * len(conjugacy_classes(G))
    vals[k0] = CycNum.rational(n, G.n)
    return ClassFunction(G, tuple(vals))


def restrict(f: ClassFunction, sub: Subgroup) -> dict[int, CycNum]:
    """Values of f on the subgroup, keyed by ambient index."""
    assert sub.group is f.group
    return {h: f.at_element(h) for h in sub.indices}


def inner_product_on_subgroup(
    sub: Subgroup, a: dict[int, CycNum], b: dict[int, CycNum]
) -> CycNum:
    n = next(iter(a.values())).order
    acc = CycNum.zero(n)
    for h in sub.indices:
        acc = acc + a[h] * b[h].conj()
    return acc.scale(Fraction(1, sub.order))


def induce(sub: Subgroup, values: dict[int, CycNum], n: int) -> ClassFunction:
    """Induced class function from elementwise values on a subgroup.

    Ind(f)(g) = ([G:H]/|C_g|) * sum of f over (class of g) meet H.
    """
    G = sub.group
    classes = conjugacy_classes(G)
    index = sub.index_in_group
    out = []
    for members in classes:
        acc = CycNum.zero(n)
        for m in members:
            if sub.in_subgroup[m]:
                acc = acc + values[m]
        out.append(acc.scale(Fraction(index, len(members))))
    return ClassFunction(G, tuple(out))


def decompose(f: ClassFunction, table: "CharTable") -> list[int]:
    """Multiplicities of f in the irreducible basis; errors on non-integers."""
    out = []
    for chi in table.rows:
        m = inner_product(f, chi)
        if not m.is_rational or m.rational_value.denominator != 1:
            raise ValueError(f"non-integer multiplicity {m}; not a character?")
        out.append(int(m.rational_value))
    return out


# ------------------------- linear algebra mod ell -------------------------


def _inv_mod(a: int, ell: int) -> int:
    return pow(a % ell, ell - 2, ell)


def _rref(A: np.ndarray, ell: int) -> tuple[np.ndarray, list[int]]:
    """Row-reduced echelon form over F_ell; returns (matrix, pivot columns)."""
    A = A.copy() % ell
    rows, cols = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        sel = None
        for i in range(r, rows):
            if A[i, c] % ell:
                sel = i
                break
        if sel is None:
            continue
        A[[r, sel]] = A[[sel, r]]
        A[r] = (A[r] * _inv_mod(int(A[r, c]), ell)) % ell
        for i in range(rows):
            if i != r and A[i, c]:
                A[i] = (A[i] - A[i, c] * A[r]) % ell
        pivots.append(c)
        r += 1
    return A, pivots


def _nullspace(A: np.ndarray, ell: int) -> np.ndarray:
    """Columns spanning the kernel of A over F_ell."""
    R, pivots = _rref(A, ell)
    cols = A.shape[1]
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((cols, len(free)), dtype=np.int64)
    for t, fc in enumerate(free):
        basis[fc, t] = 1
        for r, pc in enumerate(pivots):
            basis[pc, t] = (-int(R[r, fc])) % ell
    return basis


def _solve_matrix(B: np.ndarray, Y: np.ndarray, ell: int) -> np.ndarray:
    """Solve B X = Y for X over F_ell, B of full column rank."""
    k, d = B.shape
    aug = np.concatenate([B, Y], axis=1) % ell
    R, pivots = _rref(aug, ell)
    assert pivots[:d] == list(range(d)), "basis lost rank"
    return R[:d, d:]


def _hessenberg_charpoly(A: np.ndarray, ell: int) -> list[int]:
    """Characteristic polynomial of A over F_ell, little-endian coeffs."""
    H = A.copy() % ell
    d = H.shape[0]
    for c in range(d - 1):
        sel = None
        for r in range(c + 1, d):
            if H[r, c] % ell:
                sel = r
                break
        if sel is None:
            continue
        if sel != c + 1:
            H[[c + 1, sel]] = H[[sel, c + 1]]
            H[:, [c + 1, sel]] = H[:, [sel, c + 1]]
        inv = _inv_mod(int(H[c + 1, c]), ell)
        for r in range(c + 2, d):
            if H[r, c]:
                factor = int(H[r, c]) * inv % ell
                H[r] = (H[r] - factor * H[c + 1]) % ell
                H[:, c + 1] = (H[:, c + 1] + factor * H[:, r]) % ell
    # p_m = (x - H[m-1,m-1]) p_{m-1} - sum over trailing subdiagonal products
    polys: list[list[int]] = [[1]]
    for m in range(1, d + 1):
        term = _poly_sub(
            _poly_shift(polys[m - 1], 1),
            _poly_scale(polys[m - 1], int(H[m - 1, m - 1])),
            ell,
        )
        beta = 1
        for i in range(m - 1, 0, -1):
            beta = beta * int(H[i, i - 1]) % ell
            if beta == 0:
                break
            coef = beta * int(H[i - 1, m - 1]) % ell
            term = _poly_sub(term, _poly_scale(polys[i - 1], coef), ell)
        polys.append(term)
    return polys[d]


def _poly_trim(p: list[int]) -> list[int]:
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _poly_shift(p: list[int], k: int) -> list[int]:
    return [0] * k + list(p)


def _poly_scale(p: list[int], c: int) -> list[int]:
    return [a * c for a in p]


def _poly_sub(a: list[int], b: list[int], ell: int) -> list[int]:
    m = max(len(a), len(b))
    a = list(a) + [0] * (m - len(a))
    b = list(b) + [0] * (m - len(b))
    return _poly_trim([(x - y) % ell for x, y in zip(a, b)])


def _poly_mulmod(a: list[int], b: list[int], mod: list[int], ell: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % ell
    return _poly_rem(out, mod, ell)


def _poly_rem(a: list[int], mod: list[int], ell: int) -> list[int]:
    a = [x % ell for x in a]
    dm = len(mod) - 1
    inv_lead = _inv_mod(mod[-1], ell)
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i] * inv_lead % ell
        if c:
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] - c * mod[j]) % ell
    return _poly_trim(a[:dm] or [0])


def _poly_gcd(a: list[int], b: list[int], ell: int) -> list[int]:
    a, b = _poly_trim(list(a)), _poly_trim(list(b))
    while b != [0]:
        a, b = b, _poly_rem(a, b, ell)
    inv = _inv_mod(a[-1], ell)
    return [x * inv % ell for x in a]


def _poly_roots(p: list[int], ell: int) -> list[int]:
    """All roots in F_ell of a polynomial that splits there (with multiplicity 1)."""
    p = _poly_trim([c % ell for c in p])
    # keep only the split squarefree part: gcd(p, x^ell - x)
    xell = _poly_powmod([0, 1], ell, p, ell)
    split = _poly_gcd(p, _poly_sub(xell, [0, 1], ell), ell)
    roots: list[int] = []
    stack = [split]
    delta = 0
    while stack:
        f = stack.pop()
        if len(f) == 1:
            continue
        if len(f) == 2:
            roots.append((-f[0]) * _inv_mod(f[1], ell) % ell)
            continue
        # split by gcd with (x + delta)^((ell-1)/2) - 1, deterministic deltas
        while True:
            shifted = [delta % ell, 1]
            s = _poly_powmod(shifted, (ell - 1) // 2, f, ell)
            g = _poly_gcd(f, _poly_sub(s, [1], ell), ell)
            delta += 1
            if 1 < len(g) < len(f):
                stack.append(g)
                stack.append(_poly_quotient(f, g, ell))
                break
    return sorted(roots)


def _poly_powmod(base: list[int], e: int, mod: list[int], ell: int) -> list[int]:
    result = [1]
    base = _poly_rem(base, mod, ell)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, mod, ell)
        base = _poly_mulmod(base, base, mod, ell)
        e >>= 1
    return result


def _poly_quotient(a: list[int], b: list[int], ell: int) -> list[int]:
    a = [x % ell for x in a]
    out = [0] * (len(a) - len(b) + 1)
    inv_lead = _inv_mod(b[-1], ell)
    for i in range(len(a) - 1, len(b) - 2, -1):
        c = a[i] * inv_lead % ell
        out[i - len(b) + 1] = c
        if c:
            for j in range(len(b)):
                a[i - len(b) + 1 + j] = (a[i - len(b) + 1 + j] - c * b[j]) % ell
    return _poly_trim(out)


# ------------------------------ Dixon solver ------------------------------


@dataclass(frozen=True)
class CharTable:
    """The complete list of irreducible characters of a group."""

    group: FiniteGroup
    rows: tuple[ClassFunction, ...]

    @property
    def degrees(self) -> list[int]:
        return [int(r.degree.rational_value) for r in self.rows]

    def to_json(self) -> dict:
        G = self.group
        classes = conjugacy_classes(G)
        return {
            "group": G.name,
            "order": G.n,
            "classes": [
                {
                    "rep_label": int(G.labels[c[0]]),
                    "size": len(c),
                    "element_order": G.order_of(c[0]),
                }
                for c in classes
            ],
            "rows": [
                {
                    "degree": int(r.degree.rational_value),
                    "values": [repr(v) for v in r.values],
                }
                for r in self.rows
            ],
        }


def _group_exponent(G: FiniteGroup) -> int:
    e = 1
    for c in conjugacy_classes(G):
        o = G.order_of(c[0])
        e = e * o // gcd(e, o)
    return e


def _dixon_prime(G: FiniteGroup, exponent: int) -> int:
    sizes = class_sizes(G)
    lower = 2 * isqrt(G.n) * int(sizes.max())
    ell = (lower // exponent + 1) * exponent + 1
    while not isprime(ell):
        ell += exponent
        if ell > 10**9:
            raise ValueError("no suitable prime found for the solver")
    return ell


def _primitive_root(ell: int) -> int:
    fac = []
    m = ell - 1
    d = 2
    while d * d <= m:
        if m % d == 0:
            fac.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        fac.append(m)
    g = 2
    while True:
        if all(pow(g, (ell - 1) // f, ell) != 1 for f in fac):
            return g
        g += 1


def _class_matrix(G: FiniteGroup, i: int) -> np.ndarray:
    """M[j, k] = number of (x, y) in C_i x C_j with x y = rep_k."""
    classes = conjugacy_classes(G)
    k = len(classes)
    members_i = np.array(classes[i], dtype=np.int64)
    inv_members = np.array([G.inv(int(x)) for x in members_i], dtype=np.int64)
    M = np.zeros((k, k), dtype=np.int64)
    for kk in range(k):
        rep = classes[kk][0]
        # x y = rep  <=>  y = x^-1 rep; count the class of y over x in C_i
        y = G.mul_many(inv_members, np.full(len(inv_members), rep))
        M[:, kk] = np.bincount(G.class_of[y], minlength=k)
    return M


def dixon_table(
    G: FiniteGroup,
    n_ctx: int | None = None,
    max_order: int = 10**6,
    max_classes: int = 500,
    retries: int = 5,
) -> CharTable:
    """Complete irreducible character table by the Burnside-Dixon method."""
    if G.n > max_order:
        raise ValueError(f"group order {G.n} above solver bound")
    classes = conjugacy_classes(G)
    k = len(classes)
    if k > max_classes:
        raise ValueError(f"{k} classes above solver bound")
    exponent = _group_exponent(G)
    if n_ctx is None:
        n_ctx = exponent
    if n_ctx % exponent != 0:
        raise ValueError(f"context order {n_ctx} lacks exp(G) = {exponent}")
    sizes = class_sizes(G)
    k0 = identity_class(G)
    inverse_class = np.array(
        [int(G.class_of[G.inv(c[0])]) for c in classes], dtype=np.int64
    )

    ell = _dixon_prime(G, exponent)
    last_err: Exception | None = None
    for _ in range(retries):
        try:
            omega = _common_eigenvectors(G, k, k0, ell)
            break
        except _SeparationFailure as err:
            last_err = err
            ell += exponent
            while not isprime(ell):
                ell += exponent
    else:
        raise ValueError(f"eigenspace separation failed: {last_err}")

    # degrees: d^2 = |G| / sum_k omega_k omega_{k*} / |C_k|
    rows = []
    zpow = _zeta_power_tables(G, classes, exponent, ell)
    for w in omega:
        s = 0
        for j in range(k):
            s = (s + w[j] * w[int(inverse_class[j])] * _inv_mod(int(sizes[j]), ell)) % ell
        d2 = G.n * _inv_mod(s, ell) % ell
        root = sqrt_mod(d2, ell)
        if root is None:
            raise ValueError("degree recovery failed; solver inconsistency")
        d = int(root)
        d = min(d, ell - d)
        values = _lift_row(w, d, zpow, classes, sizes, exponent, ell, n_ctx, G)
        rows.append(values)

    rows.sort(key=lambda vals: (vals[k0].coeffs, [v.coeffs for v in vals]))
    table = CharTable(G, tuple(ClassFunction(G, tuple(r)) for r in rows))
    _validate_table(table, sizes, k0)
    return table


class _SeparationFailure(Exception):
    pass


def _common_eigenvectors(G: FiniteGroup, k: int, k0: int, ell: int) -> list[list[int]]:
    """Simultaneous eigenvectors of all class matrices mod ell, normalized
    to value 1 at the identity class."""
    spaces = [np.eye(k, dtype=np.int64)]
    for i in range(k):
        if i == k0:
            continue
        if all(B.shape[1] == 1 for B in spaces):
            break
        M = _class_matrix(G, i) % ell
        new_spaces = []
        for B in spaces:
            if B.shape[1] == 1:
                new_spaces.append(B)
                continue
            A = _solve_matrix(B, (M @ B) % ell, ell)
            charpoly = _hessenberg_charpoly(A, ell)
            for lam in _poly_roots(charpoly, ell):
                shifted = (A - lam * np.eye(A.shape[0], dtype=np.int64)) % ell
                K = _nullspace(shifted, ell)
                if K.shape[1]:
                    new_spaces.append((B @ K) % ell)
        if sum(B.shape[1] for B in new_spaces) != k:
            raise _SeparationFailure(f"lost dimensions at class {i} (ell={ell})")
        spaces = new_spaces
    if not all(B.shape[1] == 1 for B in spaces):
        raise _SeparationFailure(f"inseparable eigenspaces at ell={ell}")
    out = []
    for B in spaces:
        v = B[:, 0] % ell
        if v[k0] % ell == 0:
            raise _SeparationFailure("eigenvector vanishes at the identity class")
        v = v * _inv_mod(int(v[k0]), ell) % ell
        out.append([int(x) for x in v])
    return out


def _zeta_power_tables(G, classes, exponent: int, ell: int):
    """For each class: orders and class indices of rep powers, plus the fixed
    exponent-th root of unity mod ell the lift is pinned to."""
    z = pow(_primitive_root(ell), (ell - 1) // exponent, ell)
    per_class = []
    for c in classes:
        rep = c[0]
        o = G.order_of(rep)
        powers = []
        cur = G.identity
        for _ in range(o):
            powers.append(int(G.class_of[cur]))
            cur = G.mul(cur, rep)
        per_class.append((o, powers))
    return z, per_class


def _lift_row(w, d, zpow, classes, sizes, exponent, ell, n_ctx, G) -> list[CycNum]:
    """Exact character values from the mod-ell row via eigenvalue counts."""
    z, per_class = zpow
    k = len(classes)
    chi_mod = [d * w[j] * _inv_mod(int(sizes[j]), ell) % ell for j in range(k)]
    out: list[CycNum] = [CycNum.zero(n_ctx)] * k
    for j in range(k):
        o, power_classes = per_class[j]
        zj = pow(z, exponent // o, ell)
        zpows = [pow(zj, s, ell) for s in range(o)]
        step = n_ctx // o
        counts = np.zeros(n_ctx, dtype=np.int64)
        inv_o = _inv_mod(o, ell)
        for t in range(o):
            m = 0
            for s in range(o):
                m = (m + chi_mod[power_classes[s]] * zpows[(-t * s) % o]) % ell
            m = m * inv_o % ell
            if m > d:
                raise ValueError("lifted multiplicity exceeds the degree")
            counts[(t * step) % n_ctx] += m
        out[j] = CycNum.from_counts(n_ctx, counts)
    return out


def _validate_table(table: CharTable, sizes: np.ndarray, k0: int) -> None:
    """Exact orthonormality of all row pairs, on integer coefficient vectors."""
    G = table.group
    rows = table.rows
    n = rows[0].order
    ctx = context(n)
    phi = ctx.phi
    k = len(rows)
    V = np.zeros((k, k, phi), dtype=np.int64)
    for ri, r in enumerate(rows):
        for ci, v in enumerate(r.values):
            for t, cf in enumerate(v.coeffs):
                assert cf.denominator == 1, "non-integral character value"
                V[ri, ci, t] = int(cf)
    degs = V[:, k0, 0]
    assert (V[:, k0, 1:] == 0).all() and (degs > 0).all()
    assert int((degs * degs).sum()) == G.n, "sum of squared degrees is off"
    conj_mat = np.array(
        [ctx.reduction[(-i) % n] for i in range(phi)], dtype=np.int64
    )
    red = np.array(
        [[ctx.reduction[i + j] for j in range(phi)] for i in range(phi)],
        dtype=np.int64,
    )
    W = V @ conj_mat
    weighted = V * sizes[None, :, None]
    pair = np.einsum("aci,bcj->abij", weighted, W)
    gram = pair.reshape(k * k, phi * phi) @ red.reshape(phi * phi, phi)
    gram = gram.reshape(k, k, phi)
    expect = np.zeros((k, k, phi), dtype=np.int64)
    expect[np.arange(k), np.arange(k), 0] = G.n
    assert (gram == expect).all(), "row orthogonality fails"

"""Finite-group engine plus the concrete matrix and quaternion groups.

A ``FiniteGroup`` is materialized from a label-level multiplication
oracle by breadth-first closure over a generating set (or taken as is
when the caller enumerated a closed set).  Labels are packed
non-negative int64s so the reverse map label -> index is a dense array
and bulk work vectorizes.  Groups of at most ``TABLE_CAP`` elements get
a full multiplication table; larger ones stay oracle-backed and the
algorithms fall back to generator-driven orbits.

Construction always verifies the identity and inverse laws for every
element, verifies closure (exhaustively when the table exists, by a
large sample otherwise), and samples associativity triples.  A broken
oracle fails fast instead of producing garbage classes downstream.

The second half of the module builds the concrete groups used
everywhere else: GL2 and SL2 over k[pi]/(pi^2), their residue versions
over k, the truncated torus, and the quaternion unit group, all sharing
one ambient field.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

import numpy as np

from .gf import Field

__all__ = [
    "GroupElem",
    "FiniteGroup",
    "group_materialize",
    "conjugacy_classes",
    "Subgroup",
    "subgroup_with_transversal",
    "check_hom",
    "build_gl2",
    "build_sl2",
    "build_gl1",
    "build_sl1",
    "build_gamma",
    "build_quat_unit_group",
    "gl2_det",
    "gl2_inv_label",
    "reduction_to_residue",
]

TABLE_CAP = 4096
AXIOM_SAMPLES = 10**6
ENGINE_SEED = 90021


@dataclass(frozen=True)
class GroupElem:
    """A group element as a dense index into its group's element list."""

    group: "FiniteGroup"
    index: int

    @property
    def label(self) -> int:
        return int(self.group.labels[self.index])

    def __mul__(self, other: "GroupElem") -> "GroupElem":
        assert self.group is other.group
        return GroupElem(self.group, self.group.mul(self.index, other.index))

    def inv(self) -> "GroupElem":
        return GroupElem(self.group, self.group.inv(self.index))

    def __pow__(self, e: int) -> "GroupElem":
        return GroupElem(self.group, self.group.pow_(self.index, e))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GroupElem)
            and self.group is other.group
            and self.index == other.index
        )

    def __hash__(self) -> int:
        return hash((id(self.group), self.index))

    def __repr__(self) -> str:
        return f"<{self.group.name}[{self.index}]>"


class FiniteGroup:
    """Immutable finite group over packed int labels.

    Instances come from :func:`group_materialize`.  ``labels`` is the
    index -> label array (the element order is fixed for the group's
    lifetime), ``generators`` a verified generating set of indices.
    ``classes`` is computed lazily by :func:`conjugacy_classes`.
    """

    def __init__(
        self,
        labels: np.ndarray,
        mul_label: Callable[[int, int], int],
        inv_label: Callable[[int], int] | None,
        mul_batch: Callable[[np.ndarray, np.ndarray], np.ndarray] | None,
        generators: list[int],
        name: str,
    ):
        self.name = name
        self.labels = labels
        self.n = len(labels)
        self._mul_label = mul_label
        self._mul_batch = mul_batch
        rev = np.full(int(labels.max()) + 1, -1, dtype=np.int64)
        rev[labels] = np.arange(self.n)
        self._rev = rev
        self.generators = generators
        self.table: np.ndarray | None = None
        self.inv_: np.ndarray | None = None
        self._classes: list[tuple[int, ...]] | None = None
        self._inv_label = inv_label

    # ----- primitive operations -----

    def index_of(self, label: int) -> int:
        idx = int(self._rev[label]) if 0 <= label < len(self._rev) else -1
        if idx < 0:
            raise KeyError(f"label {label} not in group {self.name}")
        return idx

    def mul(self, i: int, j: int) -> int:
        if self.table is not None:
            return int(self.table[i, j])
        return self.index_of(self._mul_label(int(self.labels[i]), int(self.labels[j])))

    def mul_many(self, ii: np.ndarray, jj: np.ndarray) -> np.ndarray:
        """Elementwise products of two aligned index arrays."""
        if self.table is not None:
            return self.table[ii, jj]
        assert self._mul_batch is not None
        return self._rev[self._mul_batch(self.labels[ii], self.labels[jj])]

    def inv(self, i: int) -> int:
        assert self.inv_ is not None
        return int(self.inv_[i])

    def pow_(self, i: int, e: int) -> int:
        if e < 0:
            i, e = self.inv(i), -e
        acc = self.identity
        base = i
        while e:
            if e & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            e >>= 1
        return acc

    def order_of(self, i: int) -> int:
        k, cur = 1, i
        while cur != self.identity:
            cur = self.mul(cur, i)
            k += 1
        return k

    def element(self, label: int) -> GroupElem:
        return GroupElem(self, self.index_of(label))

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name}, n={self.n})"

    # ----- construction-time verification -----

    def _find_identity(self) -> None:
        first = int(self.labels[0])
        ident = -1
        for i in range(self.n):
            if self._mul_label(int(self.labels[i]), first) == first:
                cand = i
                if self._mul_label(first, int(self.labels[cand])) == first:
                    ident = cand
                    break
        if ident < 0:
            raise ValueError(f"{self.name}: no identity element found")
        self.identity = ident

    def _build_table(self) -> None:
        table = np.empty((self.n, self.n), dtype=np.int32)
        if self._mul_batch is not None:
            chunk = max(1, (1 << 22) // self.n)
            for lo in range(0, self.n, chunk):
                hi = min(self.n, lo + chunk)
                a = np.repeat(self.labels[lo:hi], self.n)
                b = np.tile(self.labels, hi - lo)
                prod = self._rev[self._mul_batch(a, b)]
                if (prod < 0).any():
                    raise ValueError(f"{self.name}: product escaped the element set")
                table[lo:hi] = prod.reshape(hi - lo, self.n)
        else:
            for i in range(self.n):
                li = int(self.labels[i])
                for j in range(self.n):
                    lab = self._mul_label(li, int(self.labels[j]))
                    k = int(self._rev[lab]) if 0 <= lab < len(self._rev) else -1
                    if k < 0:
                        raise ValueError(
                            f"{self.name}: product escaped the element set"
                        )
                    table[i, j] = k
        self.table = table

    def _verify(self) -> None:
        rng = np.random.default_rng(ENGINE_SEED)
        e = self.identity
        if self.table is not None:
            # Latin-square property (left/right cancellation) plus identity
            ar = np.arange(self.n)
            if not (np.sort(self.table, axis=1) == ar).all():
                raise ValueError(f"{self.name}: a row is not a permutation")
            if not (np.sort(self.table, axis=0) == ar[:, None]).all():
                raise ValueError(f"{self.name}: a column is not a permutation")
            if not (self.table[e] == ar).all() or not (self.table[:, e] == ar).all():
                raise ValueError(f"{self.name}: identity law fails")
            self.inv_ = np.argmax(self.table == e, axis=1).astype(np.int64)
            if not (self.table[self.inv_, ar] == e).all():
                raise ValueError(f"{self.name}: inverse law fails")
        else:
            # inverse oracle required above the table cap
            if self._inv_label is None:
                raise ValueError(f"{self.name}: need inv oracle for large group")
            inv_labels = np.fromiter(
                (self._inv_label(int(l)) for l in self.labels),
                dtype=np.int64,
                count=self.n,
            )
            inv_idx = self._rev[inv_labels]
            if (inv_idx < 0).any():
                raise ValueError(f"{self.name}: inverse escaped the element set")
            self.inv_ = inv_idx
            ar = np.arange(self.n)
            if not (self.mul_many(ar, inv_idx) == e).all():
                raise ValueError(f"{self.name}: right inverse law fails")
            if not (self.mul_many(inv_idx, ar) == e).all():
                raise ValueError(f"{self.name}: left inverse law fails")
            if not (self.mul_many(np.full(self.n, e), ar) == ar).all():
                raise ValueError(f"{self.name}: identity law fails")
            # sampled closure
            k = min(AXIOM_SAMPLES, 4 * self.n)
            ii = rng.integers(0, self.n, k)
            jj = rng.integers(0, self.n, k)
            prod = self._mul_batch(self.labels[ii], self.labels[jj])
            if (self._rev[prod] < 0).any():
                raise ValueError(f"{self.name}: sampled closure fails")
        # associativity, sampled (exhaustive is cubic and pointless here)
        have_batch = self.table is not None or self._mul_batch is not None
        k = AXIOM_SAMPLES if have_batch else 10**4
        ii = rng.integers(0, self.n, k)
        jj = rng.integers(0, self.n, k)
        kk = rng.integers(0, self.n, k)
        left = self.mul_many(self.mul_many(ii, jj), kk)
        right = self.mul_many(ii, self.mul_many(jj, kk))
        if not (left == right).all():
            raise ValueError(f"{self.name}: associativity fails on a sampled triple")

    def _verify_generators(self) -> None:
        reached = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for i in frontier:
                for g in self.generators:
                    j = self.mul(i, g)
                    if j not in reached:
                        reached.add(j)
                        nxt.append(j)
            frontier = nxt
        if len(reached) != self.n:
            raise ValueError(
                f"{self.name}: declared generators reach {len(reached)} of {self.n}"
            )


def group_materialize(
    seed: Sequence[int],
    mul_label: Callable[[int, int], int],
    *,
    inv_label: Callable[[int], int] | None = None,
    mul_batch: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None,
    generators: Sequence[int] | None = None,
    assume_closed: bool = False,
    name: str = "G",
    bound: int = 2_000_000,
) -> FiniteGroup:
    """Materialize a group from labels and a label-level product.

    ``seed`` is a generating collection (closure computed breadth-first
    from the sorted seed) or, with ``assume_closed``, the full element
    set; closure is then verified rather than computed.  ``generators``
    may name a smaller verified generating set used by the orbit
    algorithms; it defaults to the seed.
    """
    seed_sorted = sorted(int(s) for s in seed)
    if assume_closed:
        labels = np.array(seed_sorted, dtype=np.int64)
    else:
        known = dict.fromkeys(seed_sorted)
        queue = list(known)
        while queue:
            nxt = []
            for x in queue:
                for g in seed_sorted:
                    y = mul_label(x, g)
                    if y not in known:
                        known[y] = None
                        nxt.append(y)
            queue = nxt
            if len(known) > bound:
                raise ValueError(f"{name}: closure exceeded bound {bound}")
        labels = np.array(list(known), dtype=np.int64)

    gen_labels = list(generators) if generators is not None else seed_sorted
    G = FiniteGroup(labels, mul_label, inv_label, mul_batch, [], name)
    G._find_identity()
    if G.n <= TABLE_CAP:
        G._build_table()
    G._verify()
    G.generators = sorted(G.index_of(int(l)) for l in set(gen_labels))
    G._verify_generators()
    return G


def conjugacy_classes(G: FiniteGroup) -> list[tuple[int, ...]]:
    """Conjugation orbits, cached; each class is sorted, rep = least index.

    With a table the whole orbit of a representative comes from one
    vectorized pass over the group; without one, orbits grow under
    conjugation by the verified generators only.
    """
    if G._classes is not None:
        return G._classes
    assigned = np.full(G.n, -1, dtype=np.int64)
    classes: list[tuple[int, ...]] = []
    if G.table is not None:
        ar = np.arange(G.n)
        inv = G.inv_
        for rep in range(G.n):
            if assigned[rep] >= 0:
                continue
            members = np.unique(G.table[G.table[ar, np.full(G.n, rep)], inv])
            assigned[members] = len(classes)
            classes.append(tuple(int(m) for m in members))
    else:
        gens = G.generators
        ginv = [G.inv(g) for g in gens]
        for rep in range(G.n):
            if assigned[rep] >= 0:
                continue
            orbit = {rep}
            frontier = [rep]
            while frontier:
                nxt = []
                for x in frontier:
                    for g, gi in zip(gens, ginv):
                        y = G.mul(g, G.mul(x, gi))
                        if y not in orbit:
                            orbit.add(y)
                            nxt.append(y)
                frontier = nxt
            members = tuple(sorted(orbit))
            for m in members:
                assigned[m] = len(classes)
            classes.append(members)
    sizes = [len(c) for c in classes]
    assert sum(sizes) == G.n
    assert all(G.n % s == 0 for s in sizes), "class size must divide the order"
    G._classes = classes
    G.class_of = assigned
    return classes


@dataclass
class Subgroup:
    """A subgroup with a left transversal and the unique factorization maps.

    Every g factors as g = transversal[coset_index[g]] * h with
    h = h_part[g] in the subgroup.
    """

    group: FiniteGroup
    indices: tuple[int, ...]
    transversal: tuple[int, ...]
    coset_index: np.ndarray
    h_part: np.ndarray
    in_subgroup: np.ndarray = dc_field(repr=False, default=None)

    @property
    def order(self) -> int:
        return len(self.indices)

    @property
    def index_in_group(self) -> int:
        return len(self.transversal)


def subgroup_with_transversal(G: FiniteGroup, gens: Sequence[int]) -> Subgroup:
    """Close ``gens`` to a subgroup H and pick least-index coset reps.

    The transversal is scanned in element order, so it (and the
    factorization) is deterministic.
    """
    gens = sorted(set(int(g) for g in gens) | {G.identity})
    members = set(gens)
    queue = list(gens)
    while queue:
        nxt = []
        for x in queue:
            for g in gens:
                y = G.mul(x, g)
                if y not in members:
                    members.add(y)
                    nxt.append(y)
        queue = nxt
    h_sorted = np.array(sorted(members), dtype=np.int64)
    assert G.n % len(h_sorted) == 0, "subgroup order must divide the group order"
    coset = np.full(G.n, -1, dtype=np.int64)
    h_part = np.full(G.n, -1, dtype=np.int64)
    transversal = []
    for rep in range(G.n):
        if coset[rep] >= 0:
            continue
        cid = len(transversal)
        transversal.append(rep)
        body = G.mul_many(np.full(len(h_sorted), rep), h_sorted)
        if (coset[body] >= 0).any():
            raise ValueError("cosets overlap; oracle is inconsistent")
        coset[body] = cid
        h_part[body] = h_sorted
    assert len(transversal) * len(h_sorted) == G.n
    in_sub = np.zeros(G.n, dtype=bool)
    in_sub[h_sorted] = True
    return Subgroup(
        G,
        tuple(int(h) for h in h_sorted),
        tuple(transversal),
        coset,
        h_part,
        in_sub,
    )


def check_hom(
    f: Callable[[int], int] | np.ndarray, G: FiniteGroup, H: FiniteGroup
) -> bool:
    """True iff f(xy) = f(x)f(y); exhaustive when |G|^2 <= 10^6, sampled else."""
    if callable(f):
        fmap = np.fromiter((f(i) for i in range(G.n)), dtype=np.int64, count=G.n)
    else:
        fmap = np.asarray(f, dtype=np.int64)
    if G.n * G.n <= 10**6:
        ii = np.repeat(np.arange(G.n), G.n)
        jj = np.tile(np.arange(G.n), G.n)
    else:
        rng = np.random.default_rng(ENGINE_SEED + 1)
        ii = rng.integers(0, G.n, 10**4)
        jj = rng.integers(0, G.n, 10**4)
    lhs = fmap[G.mul_many(ii, jj)]
    rhs = H.mul_many(fmap[ii], fmap[jj])
    return bool((lhs == rhs).all())


# --------------------------------------------------------------------------
# Concrete groups over one ambient field.
#
# All labels are little-endian digit packings of dense subfield positions:
# a 2x2 matrix over k[pi]/(pi^2) packs (a0,a1,b0,b1,c0,c1,d0,d1), a torus
# element (a0,a1), a quaternion unit (a0,b0,a1).
# --------------------------------------------------------------------------


class _SubfieldCodec:
    """Dense position <-> field code maps for one coefficient subfield."""

    _DIGIT_TABLE_CAP = 2_000_000

    def __init__(self, field: Field, deg: int):
        self.field = field
        self.codes = np.sort(field.subfield_codes(deg)).astype(np.int64)
        self.size = len(self.codes)
        pos = np.full(field.N, -1, dtype=np.int64)
        pos[self.codes] = np.arange(self.size)
        self.pos = pos
        self._digit_tables: dict[int, np.ndarray] = {}

    def pack(self, code_digits: Sequence[int]) -> int:
        out = 0
        for c in reversed(code_digits):
            out = out * self.size + int(self.pos[c])
        return out

    def unpack(self, label: int, k: int) -> list[int]:
        out = []
        for _ in range(k):
            label, r = divmod(label, self.size)
            out.append(int(self.codes[r]))
        return out

    def unpack_batch(self, labels: np.ndarray, k: int) -> np.ndarray:
        # integer division dominates table builds, so cache label -> digits
        # for the whole label space when it is small enough
        if self.size**k <= self._DIGIT_TABLE_CAP:
            tab = self._digit_tables.get(k)
            if tab is None:
                all_labels = np.arange(self.size**k, dtype=np.int64)
                tab = np.empty((len(all_labels), k), dtype=np.int32)
                cur = all_labels
                for t in range(k):
                    cur, r = np.divmod(cur, self.size)
                    tab[:, t] = self.codes[r]
                self._digit_tables[k] = tab
            return tab[labels].astype(np.int64)
        out = np.empty((len(labels), k), dtype=np.int64)
        cur = labels.copy()
        for t in range(k):
            cur, r = np.divmod(cur, self.size)
            out[:, t] = self.codes[r]
        return out

    def pack_batch(self, codes: np.ndarray) -> np.ndarray:
        out = np.zeros(len(codes), dtype=np.int64)
        for t in range(codes.shape[1] - 1, -1, -1):
            out = out * self.size + self.pos[codes[:, t]]
        return out


def _f_of(field: Field) -> int:
    assert field.degree % 4 == 0
    return field.degree // 4


def _trunc_mul_codes(F: Field, x0, x1, y0, y1):
    return F.mul(x0, y0), F.add(F.mul(x0, y1), F.mul(x1, y0))


class _PairRing:
    """Tables for the truncated scalars as single pair positions.

    A truncated scalar a0 + a1 pi is the pair position pos(a0) + s*pos(a1),
    so an 8-digit matrix label base s is also a 4-digit label base s^2 and
    each ring operation is one table gather.
    """

    def __init__(self, field: Field, codec: _SubfieldCodec):
        s = codec.size
        m = s * s
        self.m = m
        codes = codec.codes
        pos = codec.pos
        idx = np.arange(m)
        c0 = codes[idx % s]
        c1 = codes[idx // s]
        M, S = field.mul_table, field.add_table
        lo = M[c0[:, None], c0[None, :]]
        hi = S[M[c0[:, None], c1[None, :]], M[c1[:, None], c0[None, :]]]
        self.TM = (pos[lo] + s * pos[hi]).astype(np.int32)
        alo = S[c0[:, None], c0[None, :]]
        ahi = S[c1[:, None], c1[None, :]]
        self.TA = (pos[alo] + s * pos[ahi]).astype(np.int32)
        # label -> 4 pair digits, cached for the whole label space
        all_labels = np.arange(m**4, dtype=np.int64)
        digs = np.empty((m**4, 4), dtype=np.int32)
        cur = all_labels
        for t in range(4):
            cur, r = np.divmod(cur, m)
            digs[:, t] = r
        self.digits4 = digs


def _pair_ring(field: Field, codec: _SubfieldCodec) -> _PairRing:
    ring = getattr(codec, "_pair_ring", None)
    if ring is None:
        ring = _PairRing(field, codec)
        codec._pair_ring = ring
    return ring


def _gl2_mul_label(ring: _PairRing, x: int, y: int) -> int:
    m = ring.m
    TM, TA = ring.TM, ring.TA
    x, a = divmod(x, m)
    x, b = divmod(x, m)
    d, c = divmod(x, m)
    y, e = divmod(y, m)
    y, f_ = divmod(y, m)
    h, g = divmod(y, m)
    r0 = TA[TM[a, e], TM[b, g]]
    r1 = TA[TM[a, f_], TM[b, h]]
    r2 = TA[TM[c, e], TM[d, g]]
    r3 = TA[TM[c, f_], TM[d, h]]
    return int(r0) + m * (int(r1) + m * (int(r2) + m * int(r3)))


def _gl2_mul_batch(ring: _PairRing, xs: np.ndarray, ys: np.ndarray):
    m = ring.m
    TM, TA = ring.TM, ring.TA
    A = ring.digits4[xs]
    B = ring.digits4[ys]
    a, b, c, d = A[:, 0], A[:, 1], A[:, 2], A[:, 3]
    e, f_, g, h = B[:, 0], B[:, 1], B[:, 2], B[:, 3]
    r0 = TA[TM[a, e], TM[b, g]].astype(np.int64)
    r1 = TA[TM[a, f_], TM[b, h]].astype(np.int64)
    r2 = TA[TM[c, e], TM[d, g]].astype(np.int64)
    r3 = TA[TM[c, f_], TM[d, h]].astype(np.int64)
    return r0 + m * (r1 + m * (r2 + m * r3))


def gl2_det(F: Field, codec: _SubfieldCodec, label: int) -> tuple[int, int]:
    """det = a d - b c as a truncated pair of field codes."""
    a0, a1, b0, b1, c0, c1, d0, d1 = codec.unpack(label, 8)
    p0, p1 = _trunc_mul_codes(F, a0, a1, d0, d1)
    q0, q1 = _trunc_mul_codes(F, b0, b1, c0, c1)
    return F.sub(p0, q0), F.sub(p1, q1)


def gl2_inv_label(F: Field, codec: _SubfieldCodec, label: int) -> int:
    """Adjugate over determinant; input must have unit determinant."""
    a0, a1, b0, b1, c0, c1, d0, d1 = codec.unpack(label, 8)
    det0, det1 = gl2_det(F, codec, label)
    i0 = F.inv(det0)
    i1 = F.neg(F.mul(det1, F.mul(i0, i0)))

    def scale(u0, u1):
        return _trunc_mul_codes(F, i0, i1, u0, u1)

    r = (
        *scale(d0, d1),
        *scale(F.neg(b0), F.neg(b1)),
        *scale(F.neg(c0), F.neg(c1)),
        *scale(a0, a1),
    )
    return codec.pack(r)


def _enumerate_gl2_labels(F: Field, codec: _SubfieldCodec, det_one: bool) -> np.ndarray:
    n_all = codec.size**8
    labels = np.arange(n_all, dtype=np.int64)
    digits = codec.unpack_batch(labels, 8)
    M, S = F.mul_table, F.add_table
    neg = F.neg_
    det0 = S[M[digits[:, 0], digits[:, 6]], neg[M[digits[:, 2], digits[:, 4]]]]
    if det_one:
        det1 = S[
            S[M[digits[:, 0], digits[:, 7]], M[digits[:, 1], digits[:, 6]]],
            neg[S[M[digits[:, 2], digits[:, 5]], M[digits[:, 3], digits[:, 4]]]],
        ]
        keep = (det0 == 1) & (det1 == 0)
    else:
        keep = det0 != 0
    return labels[keep]


def _gl2_generator_labels(F: Field, codec: _SubfieldCodec, det_one: bool) -> list[int]:
    one, zero = 1, 0

    def mat(a0, a1, b0, b1, c0, c1, d0, d1):
        return codec.pack([a0, a1, b0, b1, c0, c1, d0, d1])

    # elementary matrices with constant and with pi entries
    gens = [
        mat(one, 0, one, 0, zero, 0, one, 0),  # upper 1
        mat(one, 0, zero, 0, one, 0, one, 0),  # lower 1
        mat(one, 0, zero, one, zero, 0, one, 0),  # upper pi
        mat(one, 0, zero, 0, zero, one, one, 0),  # lower pi
    ]
    if not det_one:
        # a multiplicative generator of the residue units and a 1+pi twist
        fq = [int(c) for c in F.subfield_codes(_f_of(F)) if c != 0]
        gmul = next(
            c
            for c in fq
            if all(F.pow_(c, len(fq) // r) != 1 for r in _prime_divisors(len(fq)))
        )
        gens.append(mat(gmul, 0, zero, 0, zero, 0, one, 0))
        gens.append(mat(one, one, zero, 0, zero, 0, one, 0))
    return gens


def _prime_divisors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def build_gl2(field: Field, det_one: bool = False, name: str | None = None) -> FiniteGroup:
    """GL2 (or SL2 with ``det_one``) over k[pi]/(pi^2), k the degree-f subfield."""
    f = _f_of(field)
    codec = _SubfieldCodec(field, f)
    labels = _enumerate_gl2_labels(field, codec, det_one)
    ring = _pair_ring(field, codec)
    mul = lambda x, y: _gl2_mul_label(ring, x, y)  # noqa: E731
    batch = lambda xs, ys: _gl2_mul_batch(ring, xs, ys)  # noqa: E731
    inv = lambda x: gl2_inv_label(field, codec, x)  # noqa: E731
    G = group_materialize(
        labels,
        mul,
        inv_label=inv,
        mul_batch=batch,
        generators=_gl2_generator_labels(field, codec, det_one),
        assume_closed=True,
        name=name or ("SL2[pi]" if det_one else "GL2[pi]"),
    )
    G.codec = codec
    G.field = field
    return G


def build_sl2(field: Field) -> FiniteGroup:
    return build_gl2(field, det_one=True)


def _residue_mul_label(F: Field, codec: _SubfieldCodec, x: int, y: int) -> int:
    a, b, c, d = codec.unpack(x, 4)
    e, f_, g, h = codec.unpack(y, 4)
    return codec.pack(
        [
            F.add(F.mul(a, e), F.mul(b, g)),
            F.add(F.mul(a, f_), F.mul(b, h)),
            F.add(F.mul(c, e), F.mul(d, g)),
            F.add(F.mul(c, f_), F.mul(d, h)),
        ]
    )


def build_gl1(field: Field, det_one: bool = False) -> FiniteGroup:
    """The residue group GL2(k) (or SL2(k)): matrices over the subfield."""
    f = _f_of(field)
    codec = _SubfieldCodec(field, f)
    n_all = codec.size**4
    labels = np.arange(n_all, dtype=np.int64)
    digits = codec.unpack_batch(labels, 4)
    M, S = field.mul_table, field.add_table
    det = S[M[digits[:, 0], digits[:, 3]], field.neg_[M[digits[:, 1], digits[:, 2]]]]
    keep = (det == 1) if det_one else (det != 0)
    labels = labels[keep]

    def batch(xs, ys):
        A = codec.unpack_batch(xs, 4)
        B = codec.unpack_batch(ys, 4)
        out = np.empty_like(A)
        out[:, 0] = S[M[A[:, 0], B[:, 0]], M[A[:, 1], B[:, 2]]]
        out[:, 1] = S[M[A[:, 0], B[:, 1]], M[A[:, 1], B[:, 3]]]
        out[:, 2] = S[M[A[:, 2], B[:, 0]], M[A[:, 3], B[:, 2]]]
        out[:, 3] = S[M[A[:, 2], B[:, 1]], M[A[:, 3], B[:, 3]]]
        return codec.pack_batch(out)

    def inv(x):
        a, b, c, d = codec.unpack(x, 4)
        dt = field.sub(field.mul(a, d), field.mul(b, c))
        di = field.inv(dt)
        return codec.pack(
            [
                field.mul(di, d),
                field.neg(field.mul(di, b)),
                field.neg(field.mul(di, c)),
                field.mul(di, a),
            ]
        )

    G = group_materialize(
        labels,
        lambda x, y: _residue_mul_label(field, codec, x, y),
        inv_label=inv,
        mul_batch=batch,
        assume_closed=True,
        name="SL2[k]" if det_one else "GL2[k]",
    )
    G.codec = codec
    G.field = field
    return G


def build_sl1(field: Field) -> FiniteGroup:
    return build_gl1(field, det_one=True)


def reduction_to_residue(G2: FiniteGroup, G1: FiniteGroup) -> np.ndarray:
    """Index map of the canonical surjection (drop the pi digits)."""
    codec2, codec1 = G2.codec, G1.codec
    digits = codec2.unpack_batch(G2.labels, 8)
    reduced = codec1.pack_batch(digits[:, [0, 2, 4, 6]])
    return G1._rev[reduced]


def build_gamma(field: Field) -> FiniteGroup:
    """The truncated torus: units a0 + a1 pi with coefficients of degree 2f."""
    f = _f_of(field)
    codec = _SubfieldCodec(field, 2 * f)
    labels = np.arange(codec.size**2, dtype=np.int64)
    digits = codec.unpack_batch(labels, 2)
    labels = labels[digits[:, 0] != 0]
    M, S = field.mul_table, field.add_table

    def batch(xs, ys):
        A = codec.unpack_batch(xs, 2)
        B = codec.unpack_batch(ys, 2)
        out = np.empty_like(A)
        out[:, 0] = M[A[:, 0], B[:, 0]]
        out[:, 1] = S[M[A[:, 0], B[:, 1]], M[A[:, 1], B[:, 0]]]
        return codec.pack_batch(out)

    def mul(x, y):
        x0, x1 = codec.unpack(x, 2)
        y0, y1 = codec.unpack(y, 2)
        return codec.pack(_trunc_mul_codes(field, x0, x1, y0, y1))

    def inv(x):
        x0, x1 = codec.unpack(x, 2)
        i0 = field.inv(x0)
        return codec.pack([i0, field.neg(field.mul(x1, field.mul(i0, i0)))])

    g2 = field.subfield_generator(2 * f)
    gens = [codec.pack([g2, 0])]
    b = 1
    for _ in range(2 * f):
        gens.append(codec.pack([1, b]))
        b = field.mul(b, g2)
    G = group_materialize(
        labels,
        mul,
        inv_label=inv,
        mul_batch=batch,
        generators=gens,
        assume_closed=True,
        name="Gamma",
    )
    G.codec = codec
    G.field = field
    return G


def build_quat_unit_group(field: Field) -> FiniteGroup:
    """The quaternion unit group: triples (a0, b0, a1), a0 nonzero."""
    f = _f_of(field)
    codec = _SubfieldCodec(field, 2 * f)
    labels = np.arange(codec.size**3, dtype=np.int64)
    digits = codec.unpack_batch(labels, 3)
    labels = labels[digits[:, 0] != 0]
    M, S = field.mul_table, field.add_table
    frob = field.frob_
    fq = np.arange(field.N, dtype=np.int64)
    for _ in range(f):
        fq = frob[fq]  # x -> x^q as a table

    def batch(xs, ys):
        A = codec.unpack_batch(xs, 3)
        B = codec.unpack_batch(ys, 3)
        out = np.empty_like(A)
        out[:, 0] = M[A[:, 0], B[:, 0]]
        out[:, 1] = S[M[A[:, 0], B[:, 1]], M[A[:, 1], fq[B[:, 0]]]]
        out[:, 2] = S[
            S[M[A[:, 0], B[:, 2]], M[A[:, 2], B[:, 0]]], M[A[:, 1], fq[B[:, 1]]]
        ]
        return codec.pack_batch(out)

    def mul(x, y):
        a0, b0, a1 = codec.unpack(x, 3)
        c0, d0, c1 = codec.unpack(y, 3)
        e0 = field.mul(a0, c0)
        eb = field.add(field.mul(a0, d0), field.mul(b0, field.frob(c0, f)))
        e1 = field.add(
            field.add(field.mul(a0, c1), field.mul(a1, c0)),
            field.mul(b0, field.frob(d0, f)),
        )
        return codec.pack([e0, eb, e1])

    def inv(x):
        a0, b0, a1 = codec.unpack(x, 3)
        i0 = field.inv(a0)
        qi0 = field.frob(i0, f)
        c0 = i0
        d0 = field.neg(field.mul(b0, field.mul(qi0, i0)))
        t1 = field.mul(a1, field.mul(i0, i0))
        t2 = field.mul(
            field.mul(b0, field.frob(b0, f)), field.mul(field.mul(qi0, i0), i0)
        )
        return codec.pack([c0, d0, field.sub(t2, t1)])

    g2 = field.subfield_generator(2 * f)
    gens = [codec.pack([g2, 0, 0]), codec.pack([1, 1, 0])]
    b = 1
    for _ in range(2 * f):
        gens.append(codec.pack([1, 0, b]))
        b = field.mul(b, g2)
    G = group_materialize(
        labels,
        mul,
        inv_label=inv,
        mul_batch=batch,
        generators=gens,
        assume_closed=True,
        name="O3x",
    )
    G.codec = codec
    G.field = field
    return G


# --------------------------------------------------------------------------
# Maps between the concrete groups.
# --------------------------------------------------------------------------


def split_quadratic(field: Field, x: int, zeta0: int) -> tuple[int, int]:
    """Write x = u + v*zeta0 with u, v in the degree-f subfield."""
    f = _f_of(field)
    xq = field.frob(x, f)
    zq = field.frob(zeta0, f)
    v = field.div(field.sub(xq, x), field.sub(zq, zeta0))
    u = field.sub(x, field.mul(v, zeta0))
    return u, v


def torus_embedding(Gamma: FiniteGroup, G2: FiniteGroup, zeta0: int | None = None):
    """Index map of the torus embedding t = a + b*zeta0 -> a + b*C(zeta0).

    C(zeta0) is the companion matrix [[zeta0^q + zeta0, 1], [-zeta0^{q+1}, 0]]
    and a, b run over truncated scalars, so the image meets the kernel of
    the residue map in the full residue-trivial part of the torus.
    Returns (index_array, zeta0).
    """
    field: Field = Gamma.field
    f = _f_of(field)
    if zeta0 is None:
        zeta0 = field.subfield_generator(2 * f)
    s = field.add(field.frob(zeta0, f), zeta0)
    nrm = field.mul(field.frob(zeta0, f), zeta0)
    out = np.empty(Gamma.n, dtype=np.int64)
    for i in range(Gamma.n):
        t0, t1 = Gamma.codec.unpack(int(Gamma.labels[i]), 2)
        a0, b0 = split_quadratic(field, t0, zeta0)
        a1, b1 = split_quadratic(field, t1, zeta0)
        lab = G2.codec.pack(
            [
                field.add(a0, field.mul(b0, s)),
                field.add(a1, field.mul(b1, s)),
                b0,
                b1,
                field.neg(field.mul(b0, nrm)),
                field.neg(field.mul(b1, nrm)),
                a0,
                a1,
            ]
        )
        out[i] = G2.index_of(lab)
    return out, zeta0


def gamma_norm_twist(Gamma: FiniteGroup) -> np.ndarray:
    """Index map of t = a0 + a1 pi -> a0^(q-1) inside the torus itself."""
    field: Field = Gamma.field
    f = _f_of(field)
    q = field.p**f
    out = np.empty(Gamma.n, dtype=np.int64)
    for i in range(Gamma.n):
        a0, _ = Gamma.codec.unpack(int(Gamma.labels[i]), 2)
        out[i] = Gamma.index_of(Gamma.codec.pack([field.pow_(a0, q - 1), 0]))
    return out

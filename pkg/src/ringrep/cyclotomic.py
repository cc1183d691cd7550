"""Exact arithmetic in the cyclotomic field Q(zeta_n).

Two representations live here:

* the public one, `CycNum`: a tuple of `Fraction` coefficients on the power
  basis 1, zeta, ..., zeta^(phi(n)-1), i.e. reduced mod the n-th cyclotomic
  polynomial.  Equality of CycNums is coefficient-wise and exact.
* an internal "count vector" form used by hot paths: an integer vector
  v in Z^n meaning sum_k v[k] * zeta^k (no reduction).  Traces of monomial
  actions and character sums accumulate here and get reduced in one numpy
  matmul at the end.

Everything downstream fixes one order n per run (lcm of p, q^2-1, q+1), so
contexts are cached per n.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd

import numpy as np
from sympy import cyclotomic_poly, symbols


def _cyclotomic_coeffs(n: int) -> list[int]:
    """Integer coefficients of the n-th cyclotomic polynomial, constant first."""
    x = symbols("x")
    poly = cyclotomic_poly(n, x)
    coeffs = [int(c) for c in reversed(poly.as_poly(x).all_coeffs())]
    return coeffs


class CycContext:
    """Precomputed reduction data for Q(zeta_n)."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("order must be positive")
        self.n = n
        mod = _cyclotomic_coeffs(n)
        self.phi = len(mod) - 1
        # rows[k] = coefficients of x^k reduced mod Phi_n, for k < 2n.
        # 2n rows cover every product of two reduced elements and every
        # unreduced count-vector exponent.
        rows = np.zeros((2 * n, self.phi), dtype=np.int64)
        cur = np.zeros(self.phi, dtype=object)
        cur[0] = 1
        # -x^phi mod Phi_n, as coefficients of lower-degree terms
        top = np.array([-c for c in mod[: self.phi]], dtype=object)
        for k in range(2 * n):
            rows[k] = cur.astype(np.int64)
            lead = cur[self.phi - 1]
            cur = np.roll(cur, 1)
            cur[0] = 0
            if lead:
                cur = cur + lead * top
        self.reduction = rows
        # entries stay tiny for the orders in scope; guard the int64 headroom
        # assumption the batch paths rely on
        self._max_entry = int(np.abs(rows).max())
        if self._max_entry > 1 << 20:
            raise ValueError(f"reduction matrix entries too large for n={n}")
        self.conj_perm = np.array([(-k) % n for k in range(n)], dtype=np.int64)

    def reduce_counts(self, counts) -> tuple[Fraction, ...]:
        """Reduce one length-n integer count vector to basis coefficients."""
        v = np.asarray(counts, dtype=np.int64)
        out = v @ self.reduction[: self.n]
        return tuple(Fraction(int(c)) for c in out)

    def reduce_batch(self, counts: np.ndarray) -> np.ndarray:
        """Reduce an (m, n) int64 count matrix to an (m, phi) int64 matrix."""
        counts = np.asarray(counts, dtype=np.int64)
        return counts @ self.reduction[: self.n]


@lru_cache(maxsize=None)
def context(n: int) -> CycContext:
    return CycContext(n)


@dataclass(frozen=True)
class CycNum:
    """An element of Q(zeta_n), reduced mod the n-th cyclotomic polynomial.

    `coeffs` has length phi(n); entry k is the coefficient of zeta_n^k.
    """

    order: int
    coeffs: tuple[Fraction, ...]

    @staticmethod
    def zero(n: int) -> "CycNum":
        return CycNum(n, tuple([Fraction(0)] * context(n).phi))

    @staticmethod
    def rational(n: int, value) -> "CycNum":
        ctx = context(n)
        c = [Fraction(0)] * ctx.phi
        c[0] = Fraction(value)
        return CycNum(n, tuple(c))

    @staticmethod
    def one(n: int) -> "CycNum":
        return CycNum.rational(n, 1)

    @staticmethod
    def root(n: int, k: int) -> "CycNum":
        """zeta_n^k as a reduced element."""
        ctx = context(n)
        row = ctx.reduction[k % n]
        return CycNum(n, tuple(Fraction(int(c)) for c in row))

    @staticmethod
    def from_counts(n: int, counts) -> "CycNum":
        return CycNum(n, context(n).reduce_counts(counts))

    def _check(self, other: "CycNum") -> None:
        if self.order != other.order:
            raise ValueError("mixed cyclotomic orders; embed first")

    def __add__(self, other: "CycNum") -> "CycNum":
        self._check(other)
        return CycNum(self.order, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "CycNum") -> "CycNum":
        self._check(other)
        return CycNum(self.order, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "CycNum":
        return CycNum(self.order, tuple(-a for a in self.coeffs))

    def __mul__(self, other) -> "CycNum":
        if isinstance(other, (int, Fraction)):
            return CycNum(self.order, tuple(a * other for a in self.coeffs))
        self._check(other)
        ctx = context(self.order)
        phi = ctx.phi
        prod = [Fraction(0)] * (2 * phi - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        prod[i + j] += a * b
        out = [Fraction(0)] * phi
        for k, c in enumerate(prod):
            if c:
                row = ctx.reduction[k]
                for t in range(phi):
                    if row[t]:
                        out[t] += c * int(row[t])
        return CycNum(self.order, tuple(out))

    __rmul__ = __mul__

    def conj(self) -> "CycNum":
        """Complex conjugation, zeta -> zeta^(-1)."""
        ctx = context(self.order)
        # map each basis power through exponent negation; coefficients may be
        # non-integer Fractions, so run per-coefficient
        out = [Fraction(0)] * ctx.phi
        for k, a in enumerate(self.coeffs):
            if a:
                row = ctx.reduction[(-k) % self.order]
                for t in range(ctx.phi):
                    if row[t]:
                        out[t] += a * int(row[t])
        return CycNum(self.order, tuple(out))

    @property
    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    @property
    def rational_value(self) -> Fraction:
        if not self.is_rational:
            raise ValueError(f"not rational: {self}")
        return self.coeffs[0]

    def scale(self, r) -> "CycNum":
        r = Fraction(r)
        return CycNum(self.order, tuple(a * r for a in self.coeffs))

    def __repr__(self) -> str:
        terms = []
        for k, a in enumerate(self.coeffs):
            if a == 0:
                continue
            if k == 0:
                terms.append(str(a))
            elif k == 1:
                terms.append(f"{a}*z")
            else:
                terms.append(f"{a}*z^{k}")
        body = " + ".join(terms) if terms else "0"
        return f"Cyc({self.order}; {body})"


def cyc_embed(a: CycNum, m: int) -> CycNum:
    """Embed Q(zeta_n) into Q(zeta_m) via zeta_n -> zeta_m^(m/n).

    Requires n | m.
    """
    n = a.order
    if m % n != 0:
        raise ValueError(f"no embedding: {n} does not divide {m}")
    step = m // n
    counts = np.zeros(m, dtype=object)
    # write `a` on the unreduced powers of zeta_n first (its basis powers are
    # already reduced, so exponents < phi(n) <= n suffice)
    for k, c in enumerate(a.coeffs):
        if c:
            counts[(k * step) % m] += c
    ctx = context(m)
    out = [Fraction(0)] * ctx.phi
    for k in range(m):
        c = counts[k]
        if c:
            row = ctx.reduction[k]
            for t in range(ctx.phi):
                if row[t]:
                    out[t] += c * int(row[t])
    return CycNum(m, tuple(out))


def order_for(p: int, q: int) -> int:
    """The scalar order n = lcm(p, q^2-1, q+1) every run fixes up front."""
    n = p
    for k in (q * q - 1, q + 1):
        n = n * k // gcd(n, k)
    return n


# -------------------- count-vector helpers (hot paths) --------------------


def counts_zero(n: int) -> np.ndarray:
    return np.zeros(n, dtype=np.int64)

def counts_root(n: int, k: int) -> np.ndarray:
    v = np.zeros(n, dtype=np.int64)
    v[k % n] += 1
    return v


def counts_conj(n: int, counts: np.ndarray) -> np.ndarray:
    """Exponent negation: conjugation on an unreduced count vector."""
    out = np.zeros_like(counts)
    idx = context(n).conj_perm
    # scatter-add handles repeated target indices (k and -k collide at 0, n/2)
    np.add.at(out, idx, counts)
    return out


def counts_shift(counts: np.ndarray, k: int) -> np.ndarray:
    """Multiply by zeta^k: circular shift of the count vector."""
    return np.roll(counts, k % counts.shape[-1], axis=-1)


def counts_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of two count vectors: circular convolution over Z."""
    n = a.shape[-1]
    out = np.zeros(n, dtype=np.int64)
    nz = np.nonzero(a)[0]
    for k in nz:
        out += int(a[k]) * np.roll(b, int(k))
    return out


def counts_equal(n: int, a: np.ndarray, b: np.ndarray) -> bool:
    """Exact equality of two count vectors as elements of Q(zeta_n)."""
    ctx = context(n)
    return bool(np.array_equal(ctx.reduce_batch(a.reshape(1, -1)),
                               ctx.reduce_batch(b.reshape(1, -1))))

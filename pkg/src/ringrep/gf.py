"""Finite fields as one tabulated tower.

A run needs F_q, F_{q^2} and F_{q^4} simultaneously (q = p^f), so a single
field F_{p^(4f)} is built and the smaller fields are carved out as the
subsets {x : x^(p^m) = x}.  Elements are int codes: the element
sum_i c_i t^i (0 <= c_i < p) has code sum_i c_i p^i, so codes are
coefficient-lex with the constant term as the fastest digit.

Construction is deterministic: the modulus is the code-order-least monic
irreducible polynomial of the right degree, the generator the code-order-
least primitive element.  Multiplication, inversion and Frobenius run off
exp/dlog arrays; when the field is small enough, full N x N add and mul
tables are exposed for vectorized point scans.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from sympy import factorint


# -------------------- tiny F_p[x] helpers (construction only) --------------------


def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mulmod(a: list[int], b: list[int], mod: list[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    # reduce by the monic modulus
    d = len(mod) - 1
    for k in range(len(out) - 1, d - 1, -1):
        c = out[k]
        if c:
            out[k] = 0
            for t in range(d):
                out[k - d + t] = (out[k - d + t] - c * mod[t]) % p
    return _poly_trim(out[:d] + [0] * max(0, d - len(out)))


def _poly_powmod(a: list[int], e: int, mod: list[int], p: int) -> list[int]:
    result = [1]
    base = list(a)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, mod, p)
        base = _poly_mulmod(base, base, mod, p)
        e >>= 1
    return result


def _poly_sub(a: list[int], b: list[int], p: int) -> list[int]:
    m = max(len(a), len(b))
    out = [0] * m
    for i in range(m):
        ai = a[i] if i < len(a) else 0
        bi = b[i] if i < len(b) else 0
        out[i] = (ai - bi) % p
    return _poly_trim(out)


def _poly_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = list(a), list(b)
    while b:
        # a mod b with b made monic
        lead_inv = pow(b[-1], p - 2, p)
        bm = [(c * lead_inv) % p for c in b]
        r = list(a)
        while len(r) >= len(bm) and r:
            c = r[-1]
            if c:
                shift = len(r) - len(bm)
                for t in range(len(bm)):
                    r[shift + t] = (r[shift + t] - c * bm[t]) % p
            _poly_trim(r)
            if not r:
                break
            if len(r) < len(bm):
                break
        a, b = b, r
    return a


def _is_irreducible(mod: list[int], p: int) -> bool:
    """Rabin's test for a monic polynomial over F_p."""
    d = len(mod) - 1
    x = [0, 1]
    if _poly_sub(_poly_powmod(x, p**d, mod, p), x, p):
        return False
    for r in set(factorint(d)):
        diff = _poly_sub(_poly_powmod(x, p ** (d // r), mod, p), x, p)
        if not diff:
            return False
        if len(_poly_gcd(list(mod), diff, p)) > 1:
            return False
    return True


def least_irreducible(p: int, degree: int) -> tuple[int, ...]:
    """Code-order-least monic irreducible of the given degree over F_p."""
    for code in range(p**degree):
        coeffs = []
        c = code
        for _ in range(degree):
            coeffs.append(c % p)
            c //= p
        mod = coeffs + [1]
        if _is_irreducible(mod, p):
            return tuple(mod)
    raise RuntimeError("no irreducible found")  # unreachable for degree >= 1


# -------------------- the field --------------------

_TABLE_CAP = 3000  # largest N for which full N x N tables are built


class Field:
    """F_{p^degree} with exp/dlog arrays and (for small N) full op tables."""

    def __init__(self, p: int, degree: int):
        self.p = p
        self.degree = degree
        self.N = p**degree
        self.modulus = least_irreducible(p, degree)
        self._mod_list = list(self.modulus)

        # find the least primitive element, multiplying in F_p[x]/(modulus)
        fact = sorted(factorint(self.N - 1))
        gen = None
        for cand in range(1, self.N):
            poly = self._decode(cand)
            if all(self._powmod_code(poly, (self.N - 1) // r) != 1 for r in fact):
                gen = cand
                break
        if gen is None:
            raise RuntimeError("no generator found")
        self.generator = gen

        # exp/dlog
        exp = np.zeros(self.N - 1, dtype=np.int64)
        cur = [1]
        gpoly = self._decode(gen)
        for k in range(self.N - 1):
            exp[k] = self._encode(cur)
            cur = _poly_mulmod(cur, gpoly, self._mod_list, p)
        dlog = np.full(self.N, -1, dtype=np.int64)
        dlog[exp] = np.arange(self.N - 1)
        self.exp_ = exp
        self.dlog_ = dlog

        # negation / digitwise tables
        codes = np.arange(self.N, dtype=np.int64)
        digits = np.zeros((self.N, degree), dtype=np.int64)
        c = codes.copy()
        for i in range(degree):
            digits[:, i] = c % p
            c //= p
        self._digits = digits
        self.neg_ = ((-digits) % p @ (p ** np.arange(degree, dtype=np.int64)))
        inv = np.zeros(self.N, dtype=np.int64)
        inv[exp] = exp[(-(np.arange(self.N - 1))) % (self.N - 1)]
        self.inv_ = inv
        frob = np.zeros(self.N, dtype=np.int64)
        frob[exp] = exp[(np.arange(self.N - 1) * p) % (self.N - 1)]
        self.frob_ = frob

        if self.N <= _TABLE_CAP:
            pw = p ** np.arange(degree, dtype=np.int64)
            self.add_table = (
                (digits[:, None, :] + digits[None, :, :]) % p @ pw
            ).astype(np.int32)
            mt = np.zeros((self.N, self.N), dtype=np.int32)
            ii = exp[np.add.outer(np.arange(self.N - 1), np.arange(self.N - 1)) % (self.N - 1)]
            mt[np.ix_(exp, exp)] = ii.astype(np.int32)
            self.mul_table = mt
        else:
            self.add_table = None
            self.mul_table = None

    # ----- code <-> coefficient list -----

    def _decode(self, code: int) -> list[int]:
        out = []
        while code:
            out.append(code % self.p)
            code //= self.p
        return out

    def _encode(self, poly: list[int]) -> int:
        code = 0
        for c in reversed(poly):
            code = code * self.p + c
        return code

    def _powmod_code(self, poly: list[int], e: int) -> int:
        return self._encode(_poly_powmod(poly, e, self._mod_list, self.p))

    # ----- scalar ops on codes -----

    def add(self, a: int, b: int) -> int:
        if self.add_table is not None:
            return int(self.add_table[a, b])
        s = (self._digits[a] + self._digits[b]) % self.p
        return int(s @ (self.p ** np.arange(self.degree, dtype=np.int64)))

    def sub(self, a: int, b: int) -> int:
        return self.add(a, int(self.neg_[b]))

    def neg(self, a: int) -> int:
        return int(self.neg_[a])

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp_[(self.dlog_[a] + self.dlog_[b]) % (self.N - 1)])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return int(self.inv_[a])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow_(self, a: int, e: int) -> int:
        if a == 0:
            if e == 0:
                return 1
            if e < 0:
                raise ZeroDivisionError("negative power of zero")
            return 0
        return int(self.exp_[(self.dlog_[a] * e) % (self.N - 1)])

    def frob(self, a: int, k: int = 1) -> int:
        """k-fold p-power Frobenius."""
        out = a
        for _ in range(k % self.degree):
            out = int(self.frob_[out])
        return out

    def dlog(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("dlog of zero")
        return int(self.dlog_[a])

    # ----- subfields -----

    def subfield_codes(self, d: int) -> np.ndarray:
        """Sorted codes of the subfield F_{p^d} (requires d | degree)."""
        if self.degree % d != 0:
            raise ValueError(f"degree {d} does not divide {self.degree}")
        codes = np.arange(self.N, dtype=np.int64)
        fr = codes.copy()
        for _ in range(d):
            fr = self.frob_[fr]
        return codes[fr == codes]

    def in_subfield(self, a: int, d: int) -> bool:
        return self.frob(a, d) == a

    def subfield_generator(self, d: int) -> int:
        """Deterministic generator of F_{p^d}^x: g^((N-1)/(p^d-1))."""
        M = self.p**d
        return int(self.exp_[(self.N - 1) // (M - 1)])

    def subfield_dlog(self, a: int, d: int) -> int:
        """Discrete log w.r.t. subfield_generator(d); a must lie in F_{p^d}^x."""
        M = self.p**d
        step = (self.N - 1) // (M - 1)
        big = self.dlog(a)
        if big % step:
            raise ValueError("element not in the subfield")
        return (big // step) % (M - 1)

    def trace(self, a: int, d_from: int, d_to: int) -> int:
        """Trace F_{p^d_from} -> F_{p^d_to}; a must lie in the source field."""
        if d_from % d_to != 0:
            raise ValueError("no trace between these fields")
        out = 0
        cur = a
        for _ in range(d_from // d_to):
            out = self.add(out, cur)
            cur = self.frob(cur, d_to)
        return out

    def norm(self, a: int, d_from: int, d_to: int) -> int:
        if d_from % d_to != 0:
            raise ValueError("no norm between these fields")
        e = (self.p**d_from - 1) // (self.p**d_to - 1)
        return self.pow_(a, e)

    def galois_ops(self, a: int, d: int) -> dict[str, int]:
        """d-step Frobenius plus trace and norm down to F_{p^d}."""
        return {
            "frobenius": self.frob(a, d),
            "trace": self.trace(a, self.degree, d),
            "norm": self.norm(a, self.degree, d),
        }

    def enumerate(self) -> np.ndarray:
        return np.arange(self.N, dtype=np.int64)

    def __repr__(self) -> str:
        return f"Field(p={self.p}, degree={self.degree}, modulus={self.modulus})"


@dataclass(frozen=True)
class FieldElem:
    """Convenience wrapper pairing a code with its field."""

    field: Field
    code: int

    def __add__(self, other: "FieldElem") -> "FieldElem":
        return FieldElem(self.field, self.field.add(self.code, other.code))

    def __sub__(self, other: "FieldElem") -> "FieldElem":
        return FieldElem(self.field, self.field.sub(self.code, other.code))

    def __mul__(self, other: "FieldElem") -> "FieldElem":
        return FieldElem(self.field, self.field.mul(self.code, other.code))

    def __neg__(self) -> "FieldElem":
        return FieldElem(self.field, self.field.neg(self.code))

    def inv(self) -> "FieldElem":
        return FieldElem(self.field, self.field.inv(self.code))

    def __pow__(self, e: int) -> "FieldElem":
        return FieldElem(self.field, self.field.pow_(self.code, e))

    def __eq__(self, other) -> bool:
        return isinstance(other, FieldElem) and self.code == other.code \
            and self.field is other.field

    def __hash__(self) -> int:
        return hash((id(self.field), self.code))


@lru_cache(maxsize=None)
def field_create(p: int, degree: int) -> Field:
    return Field(p, degree)

"""Length-two truncated rings k[pi]/(pi^2) and the quaternion quotient.

Two value types live here.  ``TruncElem`` is a0 + a1*pi with pi^2 = 0 and
coefficients in a subfield of one shared ambient field (see ``gf.Field``);
it models O_F/pi^2, O_E/pi^2 and their base changes in one stroke.
``QuatElem`` is a0 + b0*phi + a1*pi in the quotient of the quaternion
order by phi^3, where phi*a = a^q*phi and phi^2 = pi.  Both are immutable
and all operations are pure, so values can be shared freely across
threads.

Elements are kept as integer codes into the ambient field; the
Frobenius x -> x^q is the ambient field's ``frob`` iterated f times,
where the ambient degree is 4f by construction (F_q, F_{q^2} and the
coordinate field of any enumerated point all sit inside F_{q^4}).
"""

from __future__ import annotations

from dataclasses import dataclass

from .gf import Field

__all__ = [
    "TruncElem",
    "QuatElem",
    "trunc_arith",
    "quat_arith",
    "quat_nrd",
    "trunc_create",
    "trunc_elements",
    "trunc_units",
    "quat_units",
]


def _f_of(field: Field) -> int:
    """Degree of F_q over the prime field; the ambient degree is 4f."""
    if field.degree % 4 != 0:
        raise ValueError(f"ambient field degree {field.degree} is not 4f")
    return field.degree // 4


@dataclass(frozen=True)
class TruncElem:
    """a0 + a1*pi with pi^2 = 0, coefficients in the subfield of degree deg.

    ``deg`` is the coefficient subfield's degree over the prime field:
    f for O_F/pi^2, 2f for O_E/pi^2, and m*f (or its compositum with 2f)
    for coordinate rings of enumerated points.  Binary operations
    require both operands to share the field and deg; results stay in
    the same ring because each subfield is closed under the arithmetic.
    """

    field: Field
    deg: int
    a0: int
    a1: int

    def _same_ring(self, other: "TruncElem") -> None:
        if self.field is not other.field or self.deg != other.deg:
            raise ValueError("operands live in different truncated rings")

    @property
    def is_unit(self) -> bool:
        return self.a0 != 0

    @property
    def is_zero(self) -> bool:
        return self.a0 == 0 and self.a1 == 0

    def __add__(self, other: "TruncElem") -> "TruncElem":
        self._same_ring(other)
        F = self.field
        return TruncElem(F, self.deg, F.add(self.a0, other.a0), F.add(self.a1, other.a1))

    def __sub__(self, other: "TruncElem") -> "TruncElem":
        self._same_ring(other)
        F = self.field
        return TruncElem(F, self.deg, F.sub(self.a0, other.a0), F.sub(self.a1, other.a1))

    def __neg__(self) -> "TruncElem":
        F = self.field
        return TruncElem(F, self.deg, F.neg(self.a0), F.neg(self.a1))

    def __mul__(self, other: "TruncElem") -> "TruncElem":
        # (a0 + a1 pi)(b0 + b1 pi) = a0 b0 + (a0 b1 + a1 b0) pi
        self._same_ring(other)
        F = self.field
        c0 = F.mul(self.a0, other.a0)
        c1 = F.add(F.mul(self.a0, other.a1), F.mul(self.a1, other.a0))
        return TruncElem(F, self.deg, c0, c1)

    def inverse(self) -> "TruncElem":
        """Multiplicative inverse a0^{-1} - (a1/a0^2) pi; unit input only."""
        if self.a0 == 0:
            raise ZeroDivisionError("non-unit truncated element")
        F = self.field
        i0 = F.inv(self.a0)
        i1 = F.neg(F.mul(self.a1, F.mul(i0, i0)))
        return TruncElem(F, self.deg, i0, i1)

    def __pow__(self, e: int) -> "TruncElem":
        base = self.inverse() if e < 0 else self
        out = trunc_create(self.field, self.deg, 1, 0)
        for _ in range(abs(e)):
            out = out * base
        return out

    def frob_q(self, k: int = 1) -> "TruncElem":
        """Apply F(a0 + a1 pi) = a0^q + a1^q pi, iterated k times."""
        F = self.field
        f = _f_of(F) * k
        return TruncElem(F, self.deg, F.frob(self.a0, f), F.frob(self.a1, f))

    def unit_pair(self) -> tuple[int, int]:
        """Coordinates (a0, a1/a0) of the splitting units ~ k^x times k."""
        if self.a0 == 0:
            raise ZeroDivisionError("non-unit truncated element")
        return (self.a0, self.field.div(self.a1, self.a0))

    def __repr__(self) -> str:
        return f"TruncElem({self.a0}+{self.a1}pi; deg={self.deg})"


def trunc_create(field: Field, deg: int, a0: int, a1: int) -> TruncElem:
    """Build a TruncElem, checking the coefficients lie in the subfield."""
    if not (field.in_subfield(a0, deg) and field.in_subfield(a1, deg)):
        raise ValueError("coefficient outside the requested subfield")
    return TruncElem(field, deg, a0, a1)


def trunc_arith(x: TruncElem, y: TruncElem | None, op: str) -> TruncElem:
    """Dispatch add/mul/inv on truncated elements.

    ``y`` is ignored for inv.  Raises ZeroDivisionError when inverting a
    non-unit and ValueError on an unknown op.
    """
    if op == "add":
        assert y is not None
        return x + y
    if op == "mul":
        assert y is not None
        return x * y
    if op == "inv":
        return x.inverse()
    raise ValueError(f"unknown op {op!r}")


def trunc_elements(field: Field, deg: int) -> list[TruncElem]:
    """All elements of the truncated ring with coefficients of degree deg."""
    codes = [int(c) for c in field.subfield_codes(deg)]
    return [TruncElem(field, deg, a0, a1) for a0 in codes for a1 in codes]


def trunc_units(field: Field, deg: int) -> list[TruncElem]:
    codes = [int(c) for c in field.subfield_codes(deg)]
    return [TruncElem(field, deg, a0, a1) for a0 in codes if a0 != 0 for a1 in codes]


@dataclass(frozen=True)
class QuatElem:
    """a0 + b0*phi + a1*pi in the phi^3-truncated quaternion order.

    The product uses phi*c = c^q*phi and phi^2 = pi, which collapses to

        (a0 + b0 phi + a1 pi)(c0 + d0 phi + c1 pi)
            = a0 c0 + (a0 d0 + b0 c0^q) phi + (a0 c1 + a1 c0 + b0 d0^q) pi.

    Coefficients are ambient-field codes and x^q means the ambient
    Frobenius^f.  For the unit group proper all coefficients live in
    F_{q^2}.  Base-changed points carry larger coefficients; the closed
    law above still computes the true product provided the right
    factor's constant coefficient c0 lies in F_{q^2} (pi commutes past
    c0 only up to c0^{q^2}).  Every use here has that shape: right
    multiplication by a unit, and left multiplication by a torus element
    against a point whose constant coordinate is forced into F_{q^2} by
    the norm condition.
    """

    field: Field
    a0: int
    b0: int
    a1: int

    def _q_pow(self, a: int) -> int:
        return self.field.frob(a, _f_of(self.field))

    @property
    def is_unit(self) -> bool:
        return self.a0 != 0

    def __add__(self, other: "QuatElem") -> "QuatElem":
        F = self.field
        return QuatElem(
            F, F.add(self.a0, other.a0), F.add(self.b0, other.b0), F.add(self.a1, other.a1)
        )

    def __sub__(self, other: "QuatElem") -> "QuatElem":
        F = self.field
        return QuatElem(
            F, F.sub(self.a0, other.a0), F.sub(self.b0, other.b0), F.sub(self.a1, other.a1)
        )

    def __neg__(self) -> "QuatElem":
        F = self.field
        return QuatElem(F, F.neg(self.a0), F.neg(self.b0), F.neg(self.a1))

    def __mul__(self, other: "QuatElem") -> "QuatElem":
        F = self.field
        a0, b0, a1 = self.a0, self.b0, self.a1
        c0, d0, c1 = other.a0, other.b0, other.a1
        e0 = F.mul(a0, c0)
        e_b = F.add(F.mul(a0, d0), F.mul(b0, self._q_pow(c0)))
        e1 = F.add(
            F.add(F.mul(a0, c1), F.mul(a1, c0)),
            F.mul(b0, self._q_pow(d0)),
        )
        return QuatElem(F, e0, e_b, e1)

    def inverse(self) -> "QuatElem":
        """Solve x*y = 1 coefficient by coefficient; unit input only.

        c0 = a0^{-1}, then d0 = -b0 a0^{-(q+1)}, then the pi part
        c1 = -a1 a0^{-2} + b0^{q+1} a0^{-(q+2)}.  The same y satisfies
        y*x = 1 (checked exhaustively in the tests), so this is the
        two-sided inverse.
        """
        if self.a0 == 0:
            raise ZeroDivisionError("non-unit quaternion element")
        F = self.field
        q = self._q_pow
        i0 = F.inv(self.a0)
        c0 = i0
        d0 = F.neg(F.mul(self.b0, F.mul(q(i0), i0)))
        t1 = F.mul(self.a1, F.mul(i0, i0))
        t2 = F.mul(F.mul(self.b0, q(self.b0)), F.mul(F.mul(q(i0), i0), i0))
        c1 = F.sub(t2, t1)
        return QuatElem(F, c0, d0, c1)

    def __pow__(self, e: int) -> "QuatElem":
        base = self.inverse() if e < 0 else self
        out = QuatElem(self.field, 1, 0, 0)
        for _ in range(abs(e)):
            out = out * base
        return out

    def __repr__(self) -> str:
        return f"QuatElem({self.a0}+{self.b0}phi+{self.a1}pi)"


def quat_arith(x: QuatElem, y: QuatElem | None, op: str) -> QuatElem:
    """Dispatch add/mul/inv on quaternion elements (y ignored for inv)."""
    if op == "add":
        assert y is not None
        return x + y
    if op == "mul":
        assert y is not None
        return x * y
    if op == "inv":
        return x.inverse()
    raise ValueError(f"unknown op {op!r}")


def quat_nrd(x: QuatElem) -> TruncElem:
    """Reduced norm a0^{q+1} + (a0^q a1 + a0 a1^q - b0^{q+1}) pi.

    For coefficients in F_{q^2} both components land in F_q and the
    result is tagged with that subfield; base-changed inputs fall back
    to the ambient field.  It is the determinant of the 2x2 model
    (a, b0; pi b0^q, F(a)), hence multiplicative whenever the product
    law itself is exact (right factor's constant coefficient in F_{q^2}).
    """
    F = x.field
    f = _f_of(F)
    qp = lambda a: F.frob(a, f)  # noqa: E731 - local shorthand
    n0 = F.mul(x.a0, qp(x.a0))
    n1 = F.sub(
        F.add(F.mul(qp(x.a0), x.a1), F.mul(x.a0, qp(x.a1))),
        F.mul(x.b0, qp(x.b0)),
    )
    deg = f if F.in_subfield(n0, f) and F.in_subfield(n1, f) else F.degree
    return TruncElem(F, deg, n0, n1)


def quat_units(field: Field) -> list[QuatElem]:
    """The full unit group: a0 in F_{q^2}^x, b0 and a1 in F_{q^2}."""
    codes = [int(c) for c in field.subfield_codes(2 * _f_of(field))]
    return [
        QuatElem(field, a0, b0, a1)
        for a0 in codes
        if a0 != 0
        for b0 in codes
        for a1 in codes
    ]

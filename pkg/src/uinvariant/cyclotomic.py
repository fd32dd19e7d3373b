"""Exact arithmetic in Z[u], u a primitive fifth root of unity.

Elements are stored in the basis u, u^2, u^3, u^4, so the rational integer
``n`` is the vector ``(-n, -n, -n, -n)`` (because 1 + u + u^2 + u^3 + u^4 = 0).
:class:`SqrtExt` adjoins ``s`` with ``s*s == y`` where ``y = u^2 + u^3``; tangle
matrices take their entries there.
"""

from __future__ import annotations

import cmath
import re
from typing import Union

__all__ = [
    "CycInt",
    "SqrtExt",
    "NotDivisible",
    "NotCyclotomic",
    "ZERO",
    "ONE",
    "U",
    "Y",
    "NORM_FACTOR",
    "S",
    "S_INV",
    "cyc_from_int",
    "parse_cyc",
]


class NotDivisible(ArithmeticError):
    """Raised when an element is not a multiple of 1 + 2y in Z[u]."""


class NotCyclotomic(ValueError):
    """Raised when an element of Z[u][s] has a nonzero s-part."""


def _reduce(c0: int, c1: int, c2: int, c3: int, c4: int) -> tuple[int, int, int, int]:
    # c0 + c1 u + ... + c4 u^4  ->  basis u..u^4 via 1 = -(u+u^2+u^3+u^4)
    return (c1 - c0, c2 - c0, c3 - c0, c4 - c0)


class CycInt:
    """An element a*u + b*u^2 + c*u^3 + d*u^4 of Z[u]."""

    __slots__ = ("_c", "_hash")

    def __init__(self, a: int = 0, b: int = 0, c: int = 0, d: int = 0) -> None:
        self._c = (int(a), int(b), int(c), int(d))
        self._hash = None

    @classmethod
    def _raw(cls, coeffs: tuple[int, int, int, int]) -> "CycInt":
        obj = cls.__new__(cls)
        obj._c = coeffs
        obj._hash = None
        return obj

    @classmethod
    def power_of_u(cls, k: int) -> "CycInt":
        poly = [0] * 5
        poly[k % 5] = 1
        return cls._raw(_reduce(*poly))

    @property
    def coeffs(self) -> tuple[int, int, int, int]:
        return self._c

    def __iter__(self):
        return iter(self._c)

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._c, other._c
        return CycInt._raw((a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]))

    __radd__ = __add__

    def __neg__(self) -> "CycInt":
        a = self._c
        return CycInt._raw((-a[0], -a[1], -a[2], -a[3]))

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, SqrtExt):
            return NotImplemented
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a1, a2, a3, a4 = self._c
        b1, b2, b3, b4 = other._c
        # cyclic convolution of u^1..u^4 terms, exponents taken mod 5
        c0 = a1 * b4 + a2 * b3 + a3 * b2 + a4 * b1
        c1 = a2 * b4 + a3 * b3 + a4 * b2
        c2 = a1 * b1 + a3 * b4 + a4 * b3
        c3 = a1 * b2 + a2 * b1 + a4 * b4
        c4 = a1 * b3 + a2 * b2 + a3 * b1
        return CycInt._raw(_reduce(c0, c1, c2, c3, c4))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "CycInt":
        if n < 0:
            raise ValueError("negative powers are not defined in Z[u]")
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, SqrtExt):
            return other == self
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._c == other._c

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(("CycInt", self._c))
        return self._hash

    def __bool__(self) -> bool:
        return any(self._c)

    def conj(self) -> "CycInt":
        """Complex conjugation, which reverses the coefficient vector."""
        a, b, c, d = self._c
        return CycInt._raw((d, c, b, a))

    def is_integer(self) -> bool:
        a, b, c, d = self._c
        return a == b == c == d

    def as_integer(self) -> int:
        if not self.is_integer():
            raise ValueError(f"{self} is not a rational integer")
        return -self._c[0]

    def div_norm(self) -> "CycInt":
        """Exact division by 1 + 2y, using (1 + 2y)^2 = 5."""
        prod = self * NORM_FACTOR
        if any(x % 5 for x in prod._c):
            raise NotDivisible(f"{self} is not divisible by 1+2y")
        return CycInt._raw(tuple(x // 5 for x in prod._c))

    def embed(self, k: int = 1) -> complex:
        """Numeric value at u = exp(2 pi i k / 5)."""
        if k not in (1, 2, 3, 4):
            raise ValueError(f"root index must be in 1..4, got {k}")
        return sum(c * _ROOTS[(k * j) % 5] for j, c in enumerate(self._c, start=1))

    def __repr__(self) -> str:
        return "CycInt(%d, %d, %d, %d)" % self._c

    def __str__(self) -> str:
        return "⌊%d,%d,%d,%d⌋" % self._c


_ROOTS = [cmath.exp(2j * cmath.pi * j / 5) for j in range(5)]


def _coerce(x) -> Union[CycInt, type(NotImplemented)]:
    if isinstance(x, CycInt):
        return x
    if isinstance(x, int):
        return cyc_from_int(x)
    return NotImplemented


def cyc_from_int(n: int) -> CycInt:
    return CycInt(-n, -n, -n, -n)


_CYC_RE = re.compile(r"^\s*[⌊\[(]\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*[⌋\])]\s*$")


def parse_cyc(text: str) -> CycInt:
    """Parse ``⌊a,b,c,d⌋`` (square brackets and parentheses are also accepted)."""
    m = _CYC_RE.match(text.replace("−", "-"))
    if not m:
        raise ValueError(f"cannot parse cyclotomic integer from {text!r}")
    return CycInt(*map(int, m.groups()))


ZERO = CycInt(0, 0, 0, 0)
ONE = cyc_from_int(1)
U = CycInt(1, 0, 0, 0)
Y = CycInt(0, 1, 1, 0)
NORM_FACTOR = ONE + Y + Y  # 1 + 2y, whose square is 5


class SqrtExt:
    """An element p + q*s of Z[u][s] with s^2 = y = u^2 + u^3."""

    __slots__ = ("p", "q")

    def __init__(self, p=ZERO, q=ZERO) -> None:
        self.p = _coerce(p)
        self.q = _coerce(q)
        if self.p is NotImplemented or self.q is NotImplemented:
            raise TypeError("SqrtExt parts must be CycInt or int")

    @staticmethod
    def _lift(x):
        if isinstance(x, SqrtExt):
            return x
        x = _coerce(x)
        if x is NotImplemented:
            return NotImplemented
        return SqrtExt(x, ZERO)

    def __add__(self, other):
        other = SqrtExt._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return SqrtExt(self.p + other.p, self.q + other.q)

    __radd__ = __add__

    def __neg__(self) -> "SqrtExt":
        return SqrtExt(-self.p, -self.q)

    def __sub__(self, other):
        other = SqrtExt._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return SqrtExt(self.p - other.p, self.q - other.q)

    def __rsub__(self, other):
        other = SqrtExt._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = SqrtExt._lift(other)
        if other is NotImplemented:
            return NotImplemented
        p1, q1, p2, q2 = self.p, self.q, other.p, other.q
        if not q1 and not q2:
            return SqrtExt(p1 * p2, ZERO)
        return SqrtExt(p1 * p2 + q1 * q2 * Y, p1 * q2 + p2 * q1)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        other = SqrtExt._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self.p == other.p and self.q == other.q

    def __hash__(self) -> int:
        if not self.q:
            return hash(self.p)
        return hash(("SqrtExt", self.p, self.q))

    def __bool__(self) -> bool:
        return bool(self.p) or bool(self.q)

    def is_cyclotomic(self) -> bool:
        return not self.q

    def to_cyc(self) -> CycInt:
        if self.q:
            raise NotCyclotomic(f"{self} has a nonzero s-part")
        return self.p

    def embed(self, k: int = 1, branch: int = 1) -> complex:
        """Numeric value, with s mapped to ``branch`` times the principal root of y."""
        return self.p.embed(k) + branch * self.q.embed(k) * cmath.sqrt(Y.embed(k))

    def __repr__(self) -> str:
        return f"SqrtExt({self.p!r}, {self.q!r})"

    def __str__(self) -> str:
        if not self.q:
            return str(self.p)
        return f"{self.p} + {self.q}·s"


S = SqrtExt(ZERO, ONE)
# s^-1 = s / y and y^-1 = 1 + y
S_INV = SqrtExt(ZERO, ONE + Y)

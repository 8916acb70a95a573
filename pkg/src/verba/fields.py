"""Exact arithmetic in GF(p^e).

Elements are coefficient vectors over GF(p), low-to-high degree, reduced
modulo a monic irreducible of degree e.  The modulus is always the
lexicographically least monic irreducible (comparing low-to-high
coefficient lists), so fields are reproducible across runs without
external polynomial tables.

For the matrix-group constructions the same field is exposed through
:class:`FieldTables`: elements become integers 0..q-1 (base-p digit
packing of the coefficient vector) and add/mul/neg/inv become numpy
gather tables, which is what makes the group arithmetic vectorizable.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InputError

FIELD_SIZE_CAP = 2**20
TABLE_CAP = 4096  # largest q for which dense q*q op tables are built


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_power_decomposition(q: int) -> tuple[int, int]:
    """Return (p, e) with q = p^e, or raise InputError."""
    if q < 2:
        raise InputError(f"{q} is not a prime power")
    for p in range(2, q + 1):
        if q % p == 0:
            e = 0
            m = q
            while m % p == 0:
                m //= p
                e += 1
            if m != 1 or not is_prime(p):
                raise InputError(f"{q} is not a prime power")
            return p, e
    raise InputError(f"{q} is not a prime power")


# -- polynomial helpers over GF(p); coefficients low-to-high ------------------


def _poly_trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    """Remainder of a modulo the monic polynomial m, over GF(p)."""
    a = [x % p for x in a]
    dm = len(m) - 1
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i] % p
        if c:
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] - c * m[j]) % p
    del a[dm:]
    while len(a) < dm:
        a.append(0)
    return a


def _poly_mul(a: list[int], b: list[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return out


def _is_irreducible(m: list[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg(m)/2."""
    e = len(m) - 1
    if e <= 0:
        return False
    for d in range(1, e // 2 + 1):
        for idx in range(p**d):
            div = _digits(idx, p, d) + [1]
            if not _poly_trim(list(_poly_mod(list(m), div, p))):
                return False
    return True


def _digits(n: int, p: int, width: int) -> list[int]:
    out = []
    for _ in range(width):
        out.append(n % p)
        n //= p
    return out


@dataclass(frozen=True)
class FieldSpec:
    """GF(p^e) with a fixed monic irreducible modulus (coeffs low-to-high)."""

    p: int
    e: int
    modulus: tuple[int, ...]

    @property
    def q(self) -> int:
        return self.p**self.e

    def zero(self) -> "FieldElement":
        return FieldElement((0,) * self.e)

    def one(self) -> "FieldElement":
        return FieldElement((1,) + (0,) * (self.e - 1))

    def element(self, coeffs) -> "FieldElement":
        c = tuple(int(x) % self.p for x in coeffs)
        if len(c) != self.e:
            raise InputError(f"expected {self.e} coefficients, got {len(c)}")
        return FieldElement(c)

    def from_int(self, n: int) -> "FieldElement":
        if not 0 <= n < self.q:
            raise InputError(f"integer encoding {n} out of range for GF({self.q})")
        return FieldElement(tuple(_digits(n, self.p, self.e)))

    def to_int(self, a: "FieldElement") -> int:
        n = 0
        for c in reversed(a.coeffs):
            n = n * self.p + c
        return n

    def elements(self):
        return (self.from_int(n) for n in range(self.q))

    # -- arithmetic ----------------------------------------------------------

    def add(self, a: "FieldElement", b: "FieldElement") -> "FieldElement":
        self._check(a), self._check(b)
        return FieldElement(tuple((x + y) % self.p for x, y in zip(a.coeffs, b.coeffs)))

    def sub(self, a: "FieldElement", b: "FieldElement") -> "FieldElement":
        self._check(a), self._check(b)
        return FieldElement(tuple((x - y) % self.p for x, y in zip(a.coeffs, b.coeffs)))

    def neg(self, a: "FieldElement") -> "FieldElement":
        self._check(a)
        return FieldElement(tuple((-x) % self.p for x in a.coeffs))

    def mul(self, a: "FieldElement", b: "FieldElement") -> "FieldElement":
        self._check(a), self._check(b)
        prod = _poly_mul(list(a.coeffs), list(b.coeffs), self.p)
        return FieldElement(tuple(_poly_mod(prod, list(self.modulus), self.p)))

    def inv(self, a: "FieldElement") -> "FieldElement":
        self._check(a)
        if a.is_zero():
            raise ZeroDivisionError("inversion of zero field element")
        # a^(q-2) = a^(-1); q is desk-scale so square-and-multiply is fine
        return self.pow(a, self.q - 2)

    def pow(self, a: "FieldElement", n: int) -> "FieldElement":
        self._check(a)
        if n < 0:
            return self.pow(self.inv(a), -n)
        result = self.one()
        base = a
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def _check(self, a: "FieldElement") -> None:
        if len(a.coeffs) != self.e or any(not 0 <= c < self.p for c in a.coeffs):
            raise InputError(f"element {a} does not belong to GF({self.p}^{self.e})")

    def __str__(self) -> str:
        return f"GF({self.p})" if self.e == 1 else f"GF({self.p}^{self.e})"


@dataclass(frozen=True)
class FieldElement:
    coeffs: tuple[int, ...]

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)


@lru_cache(maxsize=None)
def make_field(p: int, e: int) -> FieldSpec:
    """Build GF(p^e) with the lexicographically least monic irreducible modulus."""
    if not isinstance(p, int) or not is_prime(p):
        raise InputError(f"{p} is not prime")
    if not isinstance(e, int) or e < 1:
        raise InputError(f"extension degree must be >= 1, got {e}")
    if p**e > FIELD_SIZE_CAP:
        raise InputError(f"field size {p}^{e} exceeds cap {FIELD_SIZE_CAP}")
    if e == 1:
        return FieldSpec(p, 1, (0, 1))  # the polynomial x
    for idx in range(p**e):
        cand = _digits(idx, p, e) + [1]
        if _is_irreducible(cand, p):
            return FieldSpec(p, e, tuple(cand))
    raise AssertionError("no irreducible polynomial found")  # cannot happen


def field_from_q(q: int) -> FieldSpec:
    p, e = prime_power_decomposition(q)
    return make_field(p, e)


def field_arith(spec: FieldSpec, op: str, a: FieldElement, b: FieldElement | None = None) -> FieldElement:
    """Dispatch form of the field operations: op in {add, sub, mul, inv}."""
    if op == "inv":
        if b is not None:
            raise InputError("inv takes a single operand")
        return spec.inv(a)
    if b is None:
        raise InputError(f"{op} needs two operands")
    if op == "add":
        return spec.add(a, b)
    if op == "sub":
        return spec.sub(a, b)
    if op == "mul":
        return spec.mul(a, b)
    raise InputError(f"unknown field op {op!r}")


def field_pow(spec: FieldSpec, a: FieldElement, n: int) -> FieldElement:
    return spec.pow(a, n)


def parse_field_literal(text: str) -> FieldSpec:
    """Parse "GF(p^e)" / "GF(q)" literals used in group-spec files."""
    s = text.strip()
    if not (s.startswith("GF(") and s.endswith(")")):
        raise InputError(f"bad field literal {text!r}")
    body = s[3:-1]
    if "^" in body:
        ps, es = body.split("^", 1)
        return make_field(int(ps), int(es))
    return field_from_q(int(body))


class FieldTables:
    """Dense operation tables over integer-encoded field elements.

    Encoding: element -> sum(c_i * p^i), so 0 encodes 0 and 1 encodes 1.
    inv[0] is a sentinel 0 and must never be consumed.
    """

    def __init__(self, spec: FieldSpec):
        q = spec.q
        if q > TABLE_CAP:
            raise InputError(f"op tables capped at q <= {TABLE_CAP}, got {q}")
        self.spec = spec
        self.q = q
        elems = [spec.from_int(n) for n in range(q)]
        add = np.zeros((q, q), dtype=np.int64)
        mul = np.zeros((q, q), dtype=np.int64)
        for i, a in enumerate(elems):
            for j, b in enumerate(elems):
                add[i, j] = spec.to_int(spec.add(a, b))
                mul[i, j] = spec.to_int(spec.mul(a, b))
        self.add = add
        self.mul = mul
        self.neg = np.array([spec.to_int(spec.neg(a)) for a in elems], dtype=np.int64)
        inv = np.zeros(q, dtype=np.int64)
        for i, a in enumerate(elems[1:], start=1):
            inv[i] = spec.to_int(spec.inv(a))
        self.inv = inv
        self.sub = add[:, self.neg]  # sub[a, b] = add[a, neg[b]]


@lru_cache(maxsize=None)
def field_tables(q: int) -> FieldTables:
    return FieldTables(field_from_q(q))

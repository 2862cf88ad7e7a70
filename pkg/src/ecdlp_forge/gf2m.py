"""Binary field arithmetic: GF(2)[x] polynomials and GF(2^m) elements.

Polynomials over GF(2) are plain Python ints with bit i holding the
coefficient of x^i, so x^4 + x + 1 is 0b10011 == 0x13.  This is also the
hex encoding used on the command line.  Field elements are fixed-width
bit vectors of length m wrapped together with their field description,
so that elements of different fields cannot be mixed by accident.

Everything here is immutable and pure; these functions are the ground
truth that every synthesized circuit is verified against.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

TRIAL_DIVISION_MAX_DEGREE = 20


def poly_degree(p: int) -> int | None:
    """Degree of polynomial p, or None for the zero polynomial."""
    if p == 0:
        return None
    return p.bit_length() - 1


def poly_mul(a: int, b: int) -> int:
    """Carry-less product of two GF(2)[x] polynomials."""
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def poly_divmod(a: int, b: int) -> tuple[int, int]:
    """Quotient and remainder of a divided by b over GF(2)[x]."""
    if b == 0:
        raise ZeroDivisionError("polynomial division by zero")
    db = b.bit_length() - 1
    q = 0
    while a.bit_length() - 1 >= db and a:
        shift = (a.bit_length() - 1) - db
        q ^= 1 << shift
        a ^= b << shift
    return q, a


def poly_mod(a: int, b: int) -> int:
    return poly_divmod(a, b)[1]


def poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, poly_mod(a, b)
    return a


def poly_mulmod(a: int, b: int, mod: int) -> int:
    return poly_mod(poly_mul(a, b), mod)


def poly_to_hex(p: int) -> str:
    return hex(p)


def poly_from_hex(s: str) -> int:
    p = int(s, 16)
    if p < 0:
        raise ValueError("polynomial encoding must be non-negative")
    return p


def poly_to_str(p: int) -> str:
    """Human-readable form, e.g. x^4 + x + 1."""
    if p == 0:
        return "0"
    terms = []
    for i in range(p.bit_length() - 1, -1, -1):
        if (p >> i) & 1:
            terms.append("1" if i == 0 else ("x" if i == 1 else f"x^{i}"))
    return " + ".join(terms)


def poly_is_irreducible(p: int) -> bool:
    """Decide irreducibility of p over GF(2).

    Uses exhaustive trial division up to degree 20 and the standard
    gcd test against x^(2^k) - x above that.  Degree-0 inputs are
    rejected: units and zero are neither reducible nor irreducible.
    """
    d = poly_degree(p)
    if d is None or d == 0:
        raise ValueError("irreducibility is only defined for degree >= 1")
    if d == 1:
        return True
    if p & 1 == 0:  # divisible by x
        return False
    if d <= TRIAL_DIVISION_MAX_DEGREE:
        for q in range(2, 1 << (d // 2 + 1)):
            if poly_mod(p, q) == 0:
                return False
        return True
    # Rabin's test: x^(2^d) == x (mod p), and for every prime divisor e
    # of d, gcd(x^(2^(d/e)) - x mod p, p) == 1.
    def x_pow_pow2(k: int) -> int:
        t = 0b10
        for _ in range(k):
            t = poly_mulmod(t, t, p)
        return t

    if x_pow_pow2(d) != 0b10:
        return False
    for e in _prime_factors(d):
        if poly_gcd(x_pow_pow2(d // e) ^ 0b10, p) != 1:
            return False
    return True


def _prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def random_irreducible(m: int, rng: random.Random) -> int:
    """Uniformly-ish sampled irreducible polynomial of degree m."""
    if m < 1:
        raise ValueError("degree must be >= 1")
    while True:
        p = (1 << m) | 1 | (rng.getrandbits(max(m - 1, 0)) << 1)
        if poly_is_irreducible(p):
            return p


@dataclass(frozen=True)
class FieldSpec:
    """GF(2^m) fixed by an irreducible degree-m polynomial."""

    m: int
    poly: int

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("field degree m must be >= 2")
        if poly_degree(self.poly) != self.m:
            raise ValueError(
                f"polynomial {poly_to_hex(self.poly)} does not have degree {self.m}"
            )
        if self.poly & 1 == 0:
            raise ValueError("modulus must have constant term 1")
        if not poly_is_irreducible(self.poly):
            raise ValueError(f"{poly_to_str(self.poly)} is reducible")

    @property
    def order(self) -> int:
        return 1 << self.m

    def element(self, bits: int) -> "FieldElement":
        if not 0 <= bits < (1 << self.m):
            raise ValueError(f"element {bits:#x} out of range for m={self.m}")
        return FieldElement(self, bits)

    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    def elements(self):
        for v in range(1 << self.m):
            yield FieldElement(self, v)

    def __repr__(self):
        return f"FieldSpec(m={self.m}, poly={poly_to_hex(self.poly)})"


@dataclass(frozen=True)
class FieldElement:
    """Element of GF(2^m): a length-m coefficient vector stored as an int."""

    spec: FieldSpec
    bits: int

    def __post_init__(self):
        if not 0 <= self.bits < (1 << self.spec.m):
            raise ValueError("element bits out of range")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        return field_add(self, other)

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        return field_mul(self, other)

    def inverse(self) -> "FieldElement":
        return field_inv(self)

    def __bool__(self):
        return self.bits != 0

    def __repr__(self):
        return f"<{self.bits:#x} in GF(2^{self.spec.m})>"


def _check_same_spec(a: FieldElement, b: FieldElement):
    if a.spec != b.spec:
        raise ValueError("elements belong to different field specs")


def field_add(a: FieldElement, b: FieldElement) -> FieldElement:
    """Sum: bitwise XOR of the coefficient vectors."""
    _check_same_spec(a, b)
    return FieldElement(a.spec, a.bits ^ b.bits)


def field_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    """Product: schoolbook polynomial product reduced mod the field polynomial.

    This is the reference oracle.  It is deliberately independent of the
    matrix (L/U/reduction) formulation used for circuit synthesis.
    """
    _check_same_spec(a, b)
    return FieldElement(a.spec, poly_mulmod(a.bits, b.bits, a.spec.poly))


class NotInvertibleError(ZeroDivisionError):
    """Raised when inverting the zero element."""


def field_inv(a: FieldElement) -> FieldElement:
    """Multiplicative inverse by the extended Euclidean algorithm."""
    if a.bits == 0:
        raise NotInvertibleError("zero has no multiplicative inverse")
    # Invariants: s * a == r (mod poly), t * a == newr (mod poly).
    r, newr = a.spec.poly, a.bits
    s, news = 0, 1
    while newr != 0:
        q, rem = poly_divmod(r, newr)
        r, newr = newr, rem
        s, news = news, s ^ poly_mul(q, news)
    assert r == 1, "modulus is irreducible, gcd must be 1"
    return FieldElement(a.spec, poly_mod(s, a.spec.poly))


def batch_inverse(elems: list[FieldElement]) -> list[FieldElement]:
    """Invert many nonzero elements with a single field_inv call.

    Montgomery's trick: invert the running product once and unwind.
    """
    if not elems:
        return []
    spec = elems[0].spec
    prefix = []
    acc = spec.one()
    for e in elems:
        if e.bits == 0:
            raise NotInvertibleError("zero element in batch")
        prefix.append(acc)
        acc = field_mul(acc, e)
    inv_acc = field_inv(acc)
    out: list[FieldElement] = [spec.zero()] * len(elems)
    for i in range(len(elems) - 1, -1, -1):
        out[i] = field_mul(inv_acc, prefix[i])
        inv_acc = field_mul(inv_acc, elems[i])
    return out


def field_pow(a: FieldElement, n: int) -> FieldElement:
    if n < 0:
        return field_pow(field_inv(a), -n)
    result = a.spec.one()
    base = a
    while n:
        if n & 1:
            result = field_mul(result, base)
        base = field_mul(base, base)
        n >>= 1
    return result

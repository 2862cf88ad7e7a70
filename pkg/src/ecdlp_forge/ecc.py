"""Classical elliptic-curve arithmetic over GF(2^m).

Non-supersingular curves y^2 + xy = x^3 + a x^2 + b with b != 0.  The
point at infinity is represented by None in the affine API and by
Z == 0 projectively.  These operations are the group oracle that the
synthesized point-addition circuits are verified against, so they are
written for clarity and exactness, not speed.

The projective addition follows one fixed division-free formula
sequence (the affine formulas put over the common denominator); the
point-add circuit mirrors it term for term, which is what makes
representative-exact comparison between circuit and oracle possible.
"""

from __future__ import annotations

from dataclasses import dataclass

from .gf2m import FieldElement, FieldSpec, batch_inverse, field_add, field_inv, field_mul

ENUMERATION_MAX_M = 16


@dataclass(frozen=True)
class CurveParams:
    spec: FieldSpec
    a: FieldElement
    b: FieldElement

    def __post_init__(self):
        if self.a.spec != self.spec or self.b.spec != self.spec:
            raise ValueError("curve coefficients belong to a different field")
        if self.b.bits == 0:
            raise ValueError("b must be nonzero (supersingular curves excluded)")

    def point(self, x_bits: int, y_bits: int) -> "AffinePoint":
        p = AffinePoint(self.spec.element(x_bits), self.spec.element(y_bits))
        if not on_curve(self, p):
            raise ValueError(f"({x_bits:#x}, {y_bits:#x}) is not on the curve")
        return p


@dataclass(frozen=True)
class AffinePoint:
    x: FieldElement
    y: FieldElement


@dataclass(frozen=True)
class ProjectivePoint:
    x: FieldElement
    y: FieldElement
    z: FieldElement


def on_curve(c: CurveParams, p: AffinePoint | None) -> bool:
    """Check y^2 + xy = x^3 + ax^2 + b; the infinity point passes."""
    if p is None:
        return True
    if p.x.spec != c.spec or p.y.spec != c.spec:
        raise ValueError("point belongs to a different field")
    x, y = p.x, p.y
    lhs = field_add(field_mul(y, y), field_mul(x, y))
    x2 = field_mul(x, x)
    rhs = field_add(field_add(field_mul(x2, x), field_mul(c.a, x2)), c.b)
    return lhs == rhs


def _require_on_curve(c: CurveParams, p: AffinePoint | None):
    if not on_curve(c, p):
        raise ValueError("point is not on the curve")


def negate(c: CurveParams, p: AffinePoint | None) -> AffinePoint | None:
    """-(x, y) = (x, x + y); an involution, and -O = O."""
    _require_on_curve(c, p)
    if p is None:
        return None
    return AffinePoint(p.x, field_add(p.x, p.y))


def add_affine(c: CurveParams, p: AffinePoint | None, q: AffinePoint | None) -> AffinePoint | None:
    """Group law with the full case analysis."""
    _require_on_curve(c, p)
    _require_on_curve(c, q)
    if p is None:
        return q
    if q is None:
        return p
    if p.x == q.x:
        if field_add(p.y, q.y).bits == p.x.bits:
            # q == -p (covers doubling a 2-torsion point, where y+y=0=x)
            return None
        # p == q, x != 0: doubling
        lam = field_add(p.x, field_mul(p.y, field_inv(p.x)))
        x3 = field_add(field_add(field_mul(lam, lam), lam), c.a)
        y3 = field_add(field_add(field_mul(p.x, p.x), field_mul(lam, x3)), x3)
        return AffinePoint(x3, y3)
    lam = field_mul(field_add(p.y, q.y), field_inv(field_add(p.x, q.x)))
    x3 = field_add(
        field_add(field_add(field_mul(lam, lam), lam), field_add(p.x, q.x)), c.a
    )
    y3 = field_add(field_add(field_mul(lam, field_add(p.x, x3)), x3), p.y)
    return AffinePoint(x3, y3)


def from_affine(c: CurveParams, p: AffinePoint | None) -> ProjectivePoint:
    if p is None:
        return ProjectivePoint(c.spec.zero(), c.spec.one(), c.spec.zero())
    return ProjectivePoint(p.x, p.y, c.spec.one())


def to_affine(c: CurveParams, p: ProjectivePoint) -> AffinePoint | None:
    """Z = 0 is infinity; otherwise (X/Z, Y/Z).  The one place inversion is used."""
    if p.z.bits == 0:
        return None
    zinv = field_inv(p.z)
    return AffinePoint(field_mul(p.x, zinv), field_mul(p.y, zinv))


def proj_eq(c: CurveParams, p: ProjectivePoint, q: ProjectivePoint) -> bool:
    """Same projective class, decided by cross-multiplication (no inversion)."""
    if (p.z.bits == 0) != (q.z.bits == 0):
        return False
    if p.z.bits == 0:
        return True
    return (
        field_mul(p.x, q.z) == field_mul(q.x, p.z)
        and field_mul(p.y, q.z) == field_mul(q.y, p.z)
    )


def add_projective(c: CurveParams, p: ProjectivePoint, q: ProjectivePoint) -> ProjectivePoint:
    """Division-free point addition.

    General branch (distinct finite classes), with Zi the inputs'
    denominators:

        A  = Y1 Z2 + Y2 Z1          (lambda numerator)
        B  = X1 Z2 + X2 Z1          (lambda denominator)
        C  = B + a Z1 Z2
        N  = Z1 Z2 A (A + B) + B^2 C
        X3 = B N
        Y3 = A (X1 B^2 Z2 + N) + B N + Y1 B^3 Z2
        Z3 = B^3 Z1 Z2

    Doubling branch, with D = X1 Z1 and N = X1^2 + Y1 Z1:

        X3 = D (N (N + D) + a D^2)
        Y3 = X1^4 D + (N + D) (N (N + D) + a D^2)
        Z3 = D^3

    Both are the affine formulas under a common denominator; adding an
    inverse pair lands on Z3 = 0 with a nonzero coordinate, a valid
    infinity representative.
    """
    if p.z.bits == 0:
        return q
    if q.z.bits == 0:
        return p
    same_class = field_mul(p.x, q.z) == field_mul(q.x, p.z)
    if same_class and field_mul(p.y, q.z) == field_mul(q.y, p.z):
        x1, y1, z1 = p.x, p.y, p.z
        d = field_mul(x1, z1)
        n = field_add(field_mul(x1, x1), field_mul(y1, z1))
        d2 = field_mul(d, d)
        npd = field_add(n, d)
        core = field_add(field_mul(n, npd), field_mul(c.a, d2))
        x3 = field_mul(d, core)
        x1sq = field_mul(x1, x1)
        y3 = field_add(field_mul(field_mul(x1sq, x1sq), d), field_mul(npd, core))
        z3 = field_mul(d2, d)
        return ProjectivePoint(x3, y3, z3)
    x1, y1, z1 = p.x, p.y, p.z
    x2, y2, z2 = q.x, q.y, q.z
    a_ = field_add(field_mul(y1, z2), field_mul(y2, z1))
    b_ = field_add(field_mul(x1, z2), field_mul(x2, z1))
    z1z2 = field_mul(z1, z2)
    c_ = field_add(b_, field_mul(c.a, z1z2))
    b2 = field_mul(b_, b_)
    n = field_add(
        field_mul(field_mul(z1z2, a_), field_add(a_, b_)), field_mul(b2, c_)
    )
    x3 = field_mul(b_, n)
    b2z2 = field_mul(b2, z2)
    y3 = field_add(
        field_add(field_mul(a_, field_add(field_mul(x1, b2z2), n)), field_mul(b_, n)),
        field_mul(y1, field_mul(b2z2, b_)),
    )
    z3 = field_mul(field_mul(b2, b_), z1z2)
    return ProjectivePoint(x3, y3, z3)


def scalar_mul(c: CurveParams, k: int, p: AffinePoint | None) -> AffinePoint | None:
    """kP by left-to-right double-and-add; 0P = O."""
    if k < 0:
        raise ValueError("scalar must be non-negative")
    _require_on_curve(c, p)
    if k == 0 or p is None:
        return None
    acc: AffinePoint | None = None
    for bit in bin(k)[2:]:
        acc = add_affine(c, acc, acc)
        if bit == "1":
            acc = add_affine(c, acc, p)
    return acc


def enumerate_points(c: CurveParams) -> list[AffinePoint | None]:
    """All points including O; exhaustive scan, desk scale only."""
    if c.spec.m > ENUMERATION_MAX_M:
        raise ValueError(f"enumeration limited to m <= {ENUMERATION_MAX_M}")
    pts: list[AffinePoint | None] = [None]
    for xb in range(1 << c.spec.m):
        for yb in range(1 << c.spec.m):
            pt = AffinePoint(c.spec.element(xb), c.spec.element(yb))
            if on_curve(c, pt):
                pts.append(pt)
    return pts


def order_of(c: CurveParams, p: AffinePoint | None) -> int:
    """Least r > 0 with rP = O, by repeated addition."""
    _require_on_curve(c, p)
    if p is None:
        return 1
    acc: AffinePoint | None = p
    r = 1
    limit = (1 << c.spec.m) + 1 + (2 << ((c.spec.m + 1) // 2)) + 1
    while acc is not None:
        acc = add_affine(c, acc, p)
        r += 1
        if r > limit:
            raise RuntimeError("order search exceeded the Hasse bound; point off curve?")
    return r


@dataclass(frozen=True)
class DeskCurve:
    curve: CurveParams
    generator: AffinePoint
    order: int  # prime order of the generator
    group_size: int


def find_desk_curve(spec: FieldSpec, min_order: int = 5) -> DeskCurve:
    """First curve (scanning a, then b) with a prime-order subgroup.

    Demo curves are searched for at test/run time rather than stored as
    constants, so every recorded group size or generator order is the
    output of this enumeration.
    """
    if spec.m > ENUMERATION_MAX_M:
        raise ValueError("desk curve search is exhaustive; use small m")
    for a_bits in range(1 << spec.m):
        for b_bits in range(1, 1 << spec.m):
            curve = CurveParams(spec, spec.element(a_bits), spec.element(b_bits))
            pts = enumerate_points(curve)
            n = len(pts)
            best_prime = 0
            for f in _prime_factors_int(n):
                if f > best_prime:
                    best_prime = f
            if best_prime < min_order:
                continue
            for pt in pts:
                if pt is None:
                    continue
                r = order_of(curve, pt)
                if r % best_prime == 0:
                    gen = scalar_mul(curve, r // best_prime, pt)
                    assert gen is not None
                    return DeskCurve(curve, gen, best_prime, n)
    raise RuntimeError(f"no curve with a prime subgroup of order >= {min_order}")


def _prime_factors_int(n: int) -> list[int]:
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


def batch_to_affine(
    c: CurveParams, points: list[ProjectivePoint]
) -> list[AffinePoint | None]:
    """Affinize many points with a single field inversion.

    All nonzero denominators are inverted together through the product
    trick, matching the one-inversion-at-the-end structure of the
    algorithm being emulated.  Z = 0 entries come back as None.
    """
    finite_idx = [i for i, p in enumerate(points) if p.z.bits != 0]
    invs = batch_inverse([points[i].z for i in finite_idx])
    out: list[AffinePoint | None] = [None] * len(points)
    for i, zi in zip(finite_idx, invs):
        p = points[i]
        out[i] = AffinePoint(field_mul(p.x, zi), field_mul(p.y, zi))
    return out

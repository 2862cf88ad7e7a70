"""Reversible circuit adding a classically known point to a point register.

The circuit takes projective registers (X1, Y1, Z1) plus zeroed
ancillas and produces fresh output registers (X3, Y3, Z3) holding the
projective sum with the known affine point R, following exactly the
oracle's division-free formula sequence (ecc.add_projective with
Z2 = 1).  It is forward-only: inputs and every intermediate survive,
as the surrounding algorithm requires them preserved until the whole
chain is uncomputed.

Building blocks are register copies / additions (parallel CNOTs,
depth 1), constant additions (NOTs), multiplications by classical
constants (the collapsed, constant-specialized multiplier), and plain
multiplier instances for products of two live registers.  Squarings
are expressed as a register copy followed by an ordinary
multiplication so that only multiplier instances and CNOT additions
appear.

Exceptional group-law inputs (accumulator infinite, or equal to R or
-R) are not handled inside the reversible datapath; the harness
resolves them through exceptional_case_policy, with a fixed off-curve
coordinate triple standing in for the point at infinity.
"""

from __future__ import annotations

from dataclasses import dataclass

from functools import lru_cache

from . import bitsim
from .bitsim import run_int
from .circuit import CNOT, TOF, Circuit, CircuitBuilder, Gate
from .ecc import AffinePoint, CurveParams, ProjectivePoint, add_projective, from_affine, on_curve
from .mastrovito import (
    d_stage_pairs,
    e_stage_pairs,
    gauss_jordan_ops,
    mul_const_gates,
    ops_to_cnots,
    reduction_update_matrix,
)


@dataclass(frozen=True)
class PointRegisterMap:
    """Wire ranges (start, stop) of every m-bit register in the circuit."""

    m: int
    n_wires: int
    x1: tuple[int, int]
    y1: tuple[int, int]
    z1: tuple[int, int]
    x3: tuple[int, int]
    y3: tuple[int, int]
    z3: tuple[int, int]
    ancillas: tuple[tuple[str, int, int], ...]

    def input_ranges(self) -> tuple[tuple[int, int], ...]:
        return (self.x1, self.y1, self.z1)

    def output_ranges(self) -> tuple[tuple[int, int], ...]:
        return (self.x3, self.y3, self.z3)


class _RegisterBank:
    def __init__(self, m: int):
        self.m = m
        self.names: list[str] = []

    def alloc(self, name: str) -> tuple[int, int]:
        start = len(self.names) * self.m
        self.names.append(name)
        return (start, start + self.m)

    def labels(self) -> tuple[str, ...]:
        return tuple(f"{name}_{i}" for name in self.names for i in range(self.m))


def synth_point_add_known(
    curve: CurveParams, r_point: AffinePoint
) -> tuple[Circuit, PointRegisterMap]:
    """Circuit for (X1, Y1, Z1) + R with R = (xr, yr) a classical constant.

    Valid on generic inputs: a projective point whose affine image is
    none of O, R, -R, with all non-input registers zero.  Depth is
    linear in m because the number of multiplier instances is fixed.
    """
    if r_point is None:
        raise ValueError("the known point must be finite")
    if not on_curve(curve, r_point):
        raise ValueError("the known point is not on the curve")
    spec = curve.spec
    m = spec.m
    xr = r_point.x.bits
    yr = r_point.y.bits
    ac = curve.a.bits

    bank = _RegisterBank(m)
    x1 = bank.alloc("x1")
    y1 = bank.alloc("y1")
    z1 = bank.alloc("z1")
    rb = bank.alloc("B")
    ra = bank.alloc("A")
    rs = bank.alloc("S")
    rbc = bank.alloc("Bcopy")
    rb2 = bank.alloc("B2")
    rab = bank.alloc("AS")
    rn = bank.alloc("N")
    rc = bank.alloc("C")
    rt2 = bank.alloc("B2C")
    rx3 = bank.alloc("x3")
    rb3 = bank.alloc("B3")
    rz3 = bank.alloc("z3")
    ru = bank.alloc("U")
    ry3 = bank.alloc("y3")
    rv = bank.alloc("V")

    gates: list[Gate] = []

    def wires(rng: tuple[int, int]) -> list[int]:
        return list(range(rng[0], rng[1]))

    def copy_into(src: tuple[int, int], dst: tuple[int, int]):
        gates.extend(Gate(CNOT, (s, d)) for s, d in zip(wires(src), wires(dst)))

    def mul_const_into(k: int, src: tuple[int, int], dst: tuple[int, int]):
        gates.extend(mul_const_gates(spec, k, wires(src), wires(dst)))

    def mul_into(a_reg: tuple[int, int], b_reg: tuple[int, int], dst: tuple[int, int]):
        aw, bw, cw = wires(a_reg), wires(b_reg), wires(dst)
        for i, j in e_stage_pairs(m):
            gates.append(Gate(TOF, (aw[i], bw[j], cw[i + j - m])))
        for g in ops_to_cnots(gauss_jordan_ops(reduction_update_matrix(spec))):
            gates.append(Gate(CNOT, (cw[g.qubits[0]], cw[g.qubits[1]])))
        for i, j in d_stage_pairs(m):
            gates.append(Gate(TOF, (aw[i], bw[j], cw[i + j])))

    # B = xr * Z1 + X1, A = yr * Z1 + Y1, S = A + B, C = a * Z1 + B.
    # Constant products land in still-zero registers (their reduction
    # network needs that); the register terms are XORed in afterwards.
    mul_const_into(xr, z1, rb)
    copy_into(x1, rb)
    mul_const_into(yr, z1, ra)
    copy_into(y1, ra)
    copy_into(ra, rs)
    copy_into(rb, rs)
    mul_const_into(ac, z1, rc)
    copy_into(rb, rc)
    # B2 = B * B via an explicit copy (registers of a product must be distinct)
    copy_into(rb, rbc)
    mul_into(rb, rbc, rb2)
    # N = Z1 * A * (A + B) + B^2 * C, accumulated in rn
    mul_into(ra, rs, rab)
    mul_into(z1, rab, rn)
    mul_into(rb2, rc, rt2)
    copy_into(rt2, rn)
    # X3 = B * N
    mul_into(rb, rn, rx3)
    # Z3 = B^3 * Z1
    mul_into(rb, rb2, rb3)
    mul_into(rb3, z1, rz3)
    # Y3 = A * (X1 * B^2 + N) + X3 + Y1 * B^3
    mul_into(x1, rb2, ru)
    copy_into(rn, ru)
    mul_into(ra, ru, ry3)
    copy_into(rx3, ry3)
    mul_into(y1, rb3, rv)
    copy_into(rv, ry3)

    n_wires = len(bank.names) * m
    builder = CircuitBuilder(n_wires, bank.labels())
    builder.extend(gates)
    circ = builder.build()
    anc_names = [
        n for n in bank.names if n not in ("x1", "y1", "z1", "x3", "y3", "z3")
    ]
    anc = []
    for name in anc_names:
        start = bank.names.index(name) * m
        anc.append((name, start, start + m))
    regmap = PointRegisterMap(
        m=m,
        n_wires=n_wires,
        x1=x1,
        y1=y1,
        z1=z1,
        x3=rx3,
        y3=ry3,
        z3=rz3,
        ancillas=tuple(anc),
    )
    return circ, regmap


def apply_point_add(
    circ: Circuit,
    regmap: PointRegisterMap,
    curve: CurveParams,
    acc: ProjectivePoint,
    ancilla_bits: int = 0,
) -> ProjectivePoint:
    """Run the point-add circuit on a concrete accumulator.

    The documented precondition is that every non-input register is
    zero; a nonzero ancilla_bits is rejected here rather than silently
    producing an unspecified result.
    """
    if ancilla_bits != 0:
        raise ValueError("point-add circuits require all ancillas zero")
    spec = curve.spec

    def put(rng: tuple[int, int], bits: int) -> int:
        return bits << rng[0]

    mask = put(regmap.x1, acc.x.bits) | put(regmap.y1, acc.y.bits) | put(regmap.z1, acc.z.bits)
    out = run_int(circ, mask)

    def get(rng: tuple[int, int]) -> int:
        return (out >> rng[0]) & ((1 << regmap.m) - 1)

    return ProjectivePoint(
        spec.element(get(regmap.x3)),
        spec.element(get(regmap.y3)),
        spec.element(get(regmap.z3)),
    )


def uncompute_pass(circ: Circuit, regmap: PointRegisterMap) -> Circuit:
    """Copy the outputs aside, then run the whole circuit in reverse.

    The result, applied after the forward circuit, restores the inputs
    and re-zeroes every ancilla while the sum survives in three fresh
    registers appended after the original wires.
    """
    m = regmap.m
    extra = 3 * m
    n = circ.n_wires + extra
    labels = circ.labels + tuple(
        f"{name}_{i}" for name in ("x3out", "y3out", "z3out") for i in range(m)
    )
    b = CircuitBuilder(n, labels)
    for k, rng in enumerate(regmap.output_ranges()):
        for i in range(m):
            b.cx(rng[0] + i, circ.n_wires + k * m + i)
    b.extend(bitsim.inverse(circ).gates)
    return b.build()


@lru_cache(maxsize=None)
def off_curve_sentinel(curve: CurveParams) -> ProjectivePoint:
    """Lexicographically first (X, Y, 1) failing the curve equation.

    This fixed triple represents the point at infinity in registers;
    it only has to be consistent, not meaningful.  With b != 0 the
    search always stops at (0, 0, 1), but the rule is the definition.
    """
    spec = curve.spec
    for xb in range(1 << spec.m):
        for yb in range(1 << spec.m):
            pt = AffinePoint(spec.element(xb), spec.element(yb))
            if not on_curve(curve, pt):
                return ProjectivePoint(spec.element(xb), spec.element(yb), spec.one())
    raise RuntimeError("every coordinate pair lies on the curve; impossible for b != 0")


def is_infinity_repr(curve: CurveParams, p: ProjectivePoint) -> bool:
    """True for Z = 0 and for the designated off-curve sentinel."""
    if p.z.bits == 0:
        return True
    s = off_curve_sentinel(curve)
    return p == s


def exceptional_case_policy(
    curve: CurveParams, acc: ProjectivePoint, r_point: AffinePoint
) -> ProjectivePoint | None:
    """Harness-level rule for the group-law cases the datapath excludes.

    Returns the resolved representative, or None when the input is
    generic and the reversible datapath applies.  Infinity in, R's own
    representative out; an inverse pair resolves to the off-curve
    sentinel; accumulator equal to R resolves to the oracle's doubling
    representative.
    """
    if not on_curve(curve, r_point):
        raise ValueError("known point is not on the curve")
    if is_infinity_repr(curve, acc):
        return ProjectivePoint(r_point.x, r_point.y, curve.spec.one())
    r_proj = from_affine(curve, r_point)
    x_cross = acc.x * r_proj.z == r_proj.x * acc.z
    if x_cross:
        if acc.y * r_proj.z == r_proj.y * acc.z:
            # acc ~ R: the sum is the double of R
            return add_projective(curve, acc, r_proj)
        return off_curve_sentinel(curve)
    return None

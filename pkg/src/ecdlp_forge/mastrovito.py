"""Three-stage GF(2^m) multiplier synthesis and its LNN-routed form.

The multiplier computes |a>|b>|0> -> |a>|b>|a*b> in three stages:

  1. partial products with a_i b_j, i+j >= m, into the ancilla register
     (the high half of the schoolbook product),
  2. an in-place CNOT network applying the reduction matrix to the
     ancilla (folding x^m..x^{2m-2} back below degree m),
  3. partial products with i+j < m added on top (the low half).

Stages 1 and 3 emit Toffolis grouped by the diagonal i-j: within one
diagonal all gates are wire-disjoint, so the greedy scheduler runs each
diagonal as one time step and the stage depths come out exactly 2m-3
and 2m-1.

Matrices over GF(2) are numpy uint8 arrays with 0/1 entries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import CNOT, SWAP, TOF, Circuit, CircuitBuilder, Gate
from .gf2m import FieldElement, FieldSpec, field_inv, poly_mod, poly_mulmod

GF2Matrix = np.ndarray


def _as_gf2(mat) -> np.ndarray:
    arr = np.asarray(mat, dtype=np.uint8)
    if arr.ndim != 2:
        raise ValueError("matrix must be 2-dimensional")
    if not np.all((arr == 0) | (arr == 1)):
        raise ValueError("matrix entries must be 0 or 1")
    return arr


def reduction_matrix(spec: FieldSpec) -> GF2Matrix:
    """m x (m-1) matrix whose column j holds x^(m+j) mod P(x).

    Applied to the high-half coefficient vector it yields the
    equivalent below-degree-m polynomial, which is exactly the
    correction term added to the low half of the product.
    """
    m = spec.m
    mat = np.zeros((m, m - 1), dtype=np.uint8)
    for j in range(m - 1):
        col = poly_mod(1 << (m + j), spec.poly)
        for i in range(m):
            mat[i, j] = (col >> i) & 1
    return mat


def reduction_update_matrix(spec: FieldSpec) -> GF2Matrix:
    """Invertible m x m extension of the reduction matrix.

    The ancilla register holds the high half in wires c_0..c_{m-2} with
    c_{m-1} still zero, so the in-place update is the reduction matrix
    on the first m-1 wires with wire c_{m-1} as a plain pass-through
    target column.  The result is always invertible: the extra column
    is e_{m-1} and x^(m-1) never lies in the span of x^m..x^{2m-2}.
    """
    m = spec.m
    t = np.zeros((m, m), dtype=np.uint8)
    t[:, : m - 1] = reduction_matrix(spec)
    t[m - 1, m - 1] = 1
    return t


def gf2_rank(mat: GF2Matrix) -> int:
    a = _as_gf2(mat).copy()
    rank = 0
    rows, cols = a.shape
    for col in range(cols):
        pivot = None
        for r in range(rank, rows):
            if a[r, col]:
                pivot = r
                break
        if pivot is None:
            continue
        a[[rank, pivot]] = a[[pivot, rank]]
        for r in range(rows):
            if r != rank and a[r, col]:
                a[r] ^= a[rank]
        rank += 1
    return rank


def is_invertible(mat: GF2Matrix) -> bool:
    a = _as_gf2(mat)
    return a.shape[0] == a.shape[1] and gf2_rank(a) == a.shape[0]


def gauss_jordan_ops(mat: GF2Matrix) -> list[tuple[int, int]]:
    """Row operations (src, dst), meaning row_dst ^= row_src, reducing mat to I.

    Deterministic: columns left to right, missing pivots fixed from the
    lowest row below, eliminations in row order.  At most n^2 - 1 ops.
    """
    a = _as_gf2(mat).copy()
    n, ncols = a.shape
    if n != ncols:
        raise ValueError("matrix must be square")
    ops: list[tuple[int, int]] = []
    for col in range(n):
        if not a[col, col]:
            for r in range(col + 1, n):
                if a[r, col]:
                    a[col] ^= a[r]
                    ops.append((r, col))
                    break
            else:
                raise ValueError("matrix is not invertible")
        for r in range(n):
            if r != col and a[r, col]:
                a[r] ^= a[col]
                ops.append((col, r))
    return ops


def lnn_linear_ops(mat: GF2Matrix) -> list[tuple[int, int]]:
    """Like gauss_jordan_ops but every (src, dst) has |src - dst| == 1.

    Non-adjacent row additions are expanded by walking the source row
    next to the destination with adjacent row swaps (three additions
    each) and unwinding afterwards.  Entries of one column are cleared
    in one grouped walk so the expansion cost is paid once per column.
    """
    a = _as_gf2(mat).copy()
    n, ncols = a.shape
    if n != ncols:
        raise ValueError("matrix must be square")
    ops: list[tuple[int, int]] = []

    def add(src: int, dst: int):
        a[dst] ^= a[src]
        ops.append((src, dst))

    def rswap(r1: int, r2: int):
        add(r1, r2)
        add(r2, r1)
        add(r1, r2)

    def add_far(src: int, dst: int):
        if abs(src - dst) == 1:
            add(src, dst)
            return
        step = 1 if dst > src else -1
        walked = []
        cur = src
        while abs(cur - dst) > 1:
            rswap(cur, cur + step)
            walked.append((cur, cur + step))
            cur += step
        add(cur, dst)
        for r1, r2 in reversed(walked):
            rswap(r1, r2)

    for col in range(n):
        if not a[col, col]:
            src = None
            for r in range(col + 1, n):
                if a[r, col]:
                    src = r
                    break
            if src is None:
                raise ValueError("matrix is not invertible")
            add_far(src, col)
        # Clear the column in one walk: carry the pivot row outward in
        # each direction, adding it wherever the column has a 1.
        for step in (1, -1):
            rows = range(col + step, n if step == 1 else -1, step)
            hits = [r for r in rows if a[r, col]]
            if not hits:
                continue
            far = hits[-1]
            walked = []
            cur = col
            while abs(cur - far) > 1:
                nxt = cur + step
                if a[nxt, col]:
                    add(cur, nxt)
                rswap(cur, nxt)
                walked.append((cur, nxt))
                cur = nxt
            add(cur, far)
            for r1, r2 in reversed(walked):
                rswap(r1, r2)
    return ops


def ops_to_cnots(ops: list[tuple[int, int]], offset: int = 0) -> list[Gate]:
    """CNOT list realizing the linear map whose reduction ops are given.

    The ops reduce T to I, so T is their product in reverse; the circuit
    therefore emits them back to front, one CNOT(src, dst) per op.
    """
    return [Gate(CNOT, (src + offset, dst + offset)) for src, dst in reversed(ops)]


def synth_linear(mat: GF2Matrix) -> Circuit:
    """CNOT-only in-place circuit for an invertible GF(2) map on n wires."""
    a = _as_gf2(mat)
    n = a.shape[0]
    b = CircuitBuilder(n, tuple(f"c{i}" for i in range(n)))
    b.extend(ops_to_cnots(gauss_jordan_ops(a)))
    return b.build()


def linear_map_of_cnots(gates, n: int) -> GF2Matrix:
    """Matrix computed by a CNOT-only gate list (for verification)."""
    t = np.eye(n, dtype=np.uint8)
    for g in gates:
        if g.kind != CNOT:
            raise ValueError("only CNOT gates form a linear map")
        src, dst = g.qubits
        t[dst] ^= t[src]
    return t


# ---------------------------------------------------------------------------
# Partial-product stages

def e_stage_pairs(m: int) -> list[tuple[int, int]]:
    """High-half index pairs (i, j), i+j >= m, grouped by the diagonal i-j."""
    out = []
    for d in range(-(m - 2), m - 1):
        for i in range(m):
            j = i - d
            if 0 <= j < m and i + j >= m:
                out.append((i, j))
    return out


def d_stage_pairs(m: int) -> list[tuple[int, int]]:
    """Low-half index pairs (i, j), i+j < m, grouped by the diagonal i-j."""
    out = []
    for d in range(-(m - 1), m):
        for i in range(m):
            j = i - d
            if 0 <= j < m and i + j < m:
                out.append((i, j))
    return out


def multiplier_labels(m: int) -> tuple[str, ...]:
    return tuple(
        [f"a{i}" for i in range(m)] + [f"b{j}" for j in range(m)] + [f"c{k}" for k in range(m)]
    )


def synth_e_stage(spec: FieldSpec) -> Circuit:
    """Toffolis for the high half: a_i b_j -> c_{i+j-m}, depth 2m-3."""
    m = spec.m
    b = CircuitBuilder(3 * m, multiplier_labels(m))
    for i, j in e_stage_pairs(m):
        b.ccx(i, m + j, 2 * m + (i + j - m))
    return b.build()


def synth_d_stage(spec: FieldSpec) -> Circuit:
    """Toffolis for the low half: a_i b_j -> c_{i+j}, depth 2m-1."""
    m = spec.m
    b = CircuitBuilder(3 * m, multiplier_labels(m))
    for i, j in d_stage_pairs(m):
        b.ccx(i, m + j, 2 * m + (i + j))
    return b.build()


def synth_multiplier(spec: FieldSpec) -> Circuit:
    """Full 3m-wire multiplier: high half, reduction network, low half.

    Gate count is m(m-1)/2 + m(m+1)/2 Toffolis plus at most m^2 - 1
    CNOTs, i.e. at most 2m^2 - 1 gates; trinomials need only m - 1
    CNOTs for the reduction, giving m^2 + m - 1 gates total.
    """
    m = spec.m
    b = CircuitBuilder(3 * m, multiplier_labels(m))
    for i, j in e_stage_pairs(m):
        b.ccx(i, m + j, 2 * m + (i + j - m))
    b.extend(ops_to_cnots(gauss_jordan_ops(reduction_update_matrix(spec)), offset=2 * m))
    for i, j in d_stage_pairs(m):
        b.ccx(i, m + j, 2 * m + (i + j))
    return b.build()


def mul_const_gates(
    spec: FieldSpec, k: int, src: list[int], dst: list[int]
) -> list[Gate]:
    """Gates mapping |u>|0> -> |u>|u*k> for a classical constant k.

    Toffolis of the general multiplier collapse: a b_j-controlled gate
    becomes a CNOT when bit j of k is set and vanishes otherwise.  The
    reduction network runs on the destination register and is skipped
    when no high-half gate fired (k in {0, 1}), where it would act on
    an all-zero register.  The destination must start at zero.
    """
    m = spec.m
    if not 0 <= k < (1 << m):
        raise ValueError("constant out of field range")
    if k == 0:
        return []
    gates: list[Gate] = []
    e_gates = [
        Gate(CNOT, (src[i], dst[i + j - m]))
        for i, j in e_stage_pairs(m)
        if (k >> j) & 1
    ]
    gates.extend(e_gates)
    if e_gates:
        for g in ops_to_cnots(gauss_jordan_ops(reduction_update_matrix(spec))):
            gates.append(Gate(CNOT, (dst[g.qubits[0]], dst[g.qubits[1]])))
    for i, j in d_stage_pairs(m):
        if (k >> j) & 1:
            gates.append(Gate(CNOT, (src[i], dst[i + j])))
    return gates


def synth_mul_const(spec: FieldSpec, k: FieldElement) -> Circuit:
    """2m-wire circuit |a>|0> -> |a>|a*k>, input register preserved."""
    if k.spec != spec:
        raise ValueError("constant belongs to a different field")
    m = spec.m
    labels = tuple([f"a{i}" for i in range(m)] + [f"c{i}" for i in range(m)])
    b = CircuitBuilder(2 * m, labels)
    b.extend(mul_const_gates(spec, k.bits, list(range(m)), list(range(m, 2 * m))))
    return b.build()


def synth_known_mul(spec: FieldSpec, b: FieldElement) -> Circuit:
    """2m-wire circuit |a>|0> -> |0>|a*b> for a nonzero classical b.

    Forward: the multiplier specialized to b fills the output register.
    Then the inverse of the multiplier specialized to b^-1, aimed back
    at the input register, clears it: that inverse maps |a*b>|a> to
    |a*b>|0> because (a*b)*b^-1 = a.  The product ends up in the second
    register, a relabeling of the usual in-place convention.
    """
    if b.spec != spec:
        raise ValueError("constant belongs to a different field")
    if b.bits == 0:
        raise ValueError("constant must be nonzero")
    m = spec.m
    labels = tuple([f"a{i}" for i in range(m)] + [f"c{i}" for i in range(m)])
    bld = CircuitBuilder(2 * m, labels)
    a_wires = list(range(m))
    c_wires = list(range(m, 2 * m))
    bld.extend(mul_const_gates(spec, b.bits, a_wires, c_wires))
    b_inv = field_inv(b)
    back = mul_const_gates(spec, b_inv.bits, c_wires, a_wires)
    bld.extend(reversed(back))
    return bld.build()


# ---------------------------------------------------------------------------
# LNN routing

def initial_multiplier_layout(m: int) -> tuple[str, ...]:
    """Connectivity pattern c_0..c_{m-1}, a_{m-1}, b_0, a_{m-2}, b_1, ..."""
    lay = [f"c{i}" for i in range(m)]
    for t in range(m):
        lay.append(f"a{m - 1 - t}")
        lay.append(f"b{t}")
    return tuple(lay)


def _e_machine_layout(m: int) -> list[str]:
    # Queue (head at the right), then pair sites with i+j == m, then the
    # three qubits the high half never touches, parked at the far end.
    lay = [f"c{m - 2 - i}" for i in range(m - 1)]
    for t in range(m - 1):
        lay.append(f"a{1 + t}")
        lay.append(f"b{m - 1 - t}")
    lay += ["a0", "b0", f"c{m - 1}"]
    return lay


def _parse_label(lab: str) -> tuple[str, int]:
    return lab[0], int(lab[1:])


def _oe_route_layers(current: list[str], target: list[str]) -> list[list[tuple[int, int]]]:
    """Swap layers turning one layout into another, odd-even transposition style."""
    if sorted(current) != sorted(target):
        raise ValueError("layouts are not permutations of each other")
    want = {lab: i for i, lab in enumerate(target)}
    perm = [want[lab] for lab in current]
    n = len(perm)
    layers: list[list[tuple[int, int]]] = []
    parity = 0
    for _ in range(n + 2):
        if all(perm[i] == i for i in range(n)):
            return layers
        layer = []
        for q in range(parity, n - 1, 2):
            if perm[q] > perm[q + 1]:
                perm[q], perm[q + 1] = perm[q + 1], perm[q]
                layer.append((q, q + 1))
        if layer:
            layers.append(layer)
        parity ^= 1
    raise RuntimeError("odd-even routing did not converge")


class _Router:
    """Gate emission plus layout tracking and stage accounting."""

    def __init__(self, m: int):
        self.m = m
        self.n = 3 * m
        self.layout = list(initial_multiplier_layout(m))
        self.gates: list[Gate] = []
        self.comp_stages = 0
        self.swap_stages = 0

    def position_of(self, lab: str) -> int:
        return self.layout.index(lab)

    def emit_swap_layers(self, layers: list[list[tuple[int, int]]]):
        for layer in layers:
            for a, b in layer:
                self.gates.append(Gate(SWAP, (a, b)))
                self.layout[a], self.layout[b] = self.layout[b], self.layout[a]
        self.swap_stages += (len(layers) + 1) // 2

    def route_to(self, target: list[str]):
        self.emit_swap_layers(_oe_route_layers(self.layout, target))

    def emit_comp_block(self, gates: list[Gate]):
        """Emit computational gates, counting greedy layers as stages."""
        ready = [0] * self.n
        stages = 0
        for g in gates:
            layer = max(ready[q] for q in g.qubits) + 1
            for q in g.qubits:
                ready[q] = layer
            stages = max(stages, layer)
        self.gates.extend(gates)
        self.comp_stages += stages

    def run_systolic(self, kind: str):
        """Execute one partial-product half in place on the line.

        Computation qubits sweep right through the pair sites; one
        depth-2 swap stage after each firing round reshapes every fired
        window [x, c, a, b] into [a, x, b, c], so the next round's
        windows are adjacent again.  Waiting target qubits advance
        through spent material by bubbling swaps in the same stages.
        """
        m = self.m
        if kind == "e":
            pending = {(i, j) for i in range(m) for j in range(m) if i + j >= m}

            def target(i: int, j: int) -> int:
                return i + j - m

        else:
            pending = {(i, j) for i in range(m) for j in range(m) if i + j < m}

            def target(i: int, j: int) -> int:
                return i + j

        a_left = [0] * m
        b_left = [0] * m
        c_left = [0] * m
        for i, j in pending:
            a_left[i] += 1
            b_left[j] += 1
            c_left[target(i, j)] += 1

        def remaining(lab: str) -> int:
            k, x = _parse_label(lab)
            return {"a": a_left, "b": b_left, "c": c_left}[k][x]

        n = self.n
        rounds = 0
        while pending:
            rounds += 1
            if rounds > 8 * m + 32:
                raise RuntimeError(f"systolic {kind} stage did not converge")
            # Firing scan: disjoint windows [c_s, a_i, b_j] with the
            # window's own product pending.  A one-position gap after
            # each window keeps the following swap stages disjoint.
            fired: list[int] = []
            p = 0
            while p + 2 < n:
                k0, s = _parse_label(self.layout[p])
                k1, i = _parse_label(self.layout[p + 1])
                k2, j = _parse_label(self.layout[p + 2])
                if (
                    k0 == "c"
                    and k1 == "a"
                    and k2 == "b"
                    and (i, j) in pending
                    and target(i, j) == s
                ):
                    fired.append(p)
                    p += 4
                else:
                    p += 1
            if fired:
                self.gates.extend(Gate(TOF, (p + 1, p + 2, p)) for p in fired)
                self.comp_stages += 1
                for p in fired:
                    _, i = _parse_label(self.layout[p + 1])
                    _, j = _parse_label(self.layout[p + 2])
                    pending.discard((i, j))
                    a_left[i] -= 1
                    b_left[j] -= 1
                    c_left[target(i, j)] -= 1
            if not pending:
                break

            reserved = [False] * n
            for p in fired:
                for q in range(max(p - 1, 0), p + 3):
                    reserved[q] = True

            def bubble_layer(used: list[bool]) -> list[tuple[int, int]]:
                # Pending targets overtake spent qubits to their right.
                layer = []
                for q in range(n - 1):
                    if used[q] or used[q + 1]:
                        continue
                    lq, lq1 = self.layout[q], self.layout[q + 1]
                    if lq[0] == "c" and remaining(lq) > 0 and remaining(lq1) == 0:
                        layer.append((q, q + 1))
                        used[q] = used[q + 1] = True
                return layer

            layer1 = [(p, p + 1) for p in fired]
            layer1 += bubble_layer(reserved.copy())
            layer2 = [(p - 1, p) for p in fired if p >= 1]
            layer2 += [(p + 1, p + 2) for p in fired]
            emitted = False
            for layer in (layer1, layer2):
                live = [sw for sw in layer if sw]
                if layer is layer2:
                    live += bubble_layer(reserved.copy())
                if live:
                    emitted = True
                for a, b in live:
                    self.gates.append(Gate(SWAP, (a, b)))
                    self.layout[a], self.layout[b] = self.layout[b], self.layout[a]
            if not fired and not emitted:
                raise RuntimeError(f"systolic {kind} stage deadlocked")
            if emitted:
                self.swap_stages += 1


@dataclass(frozen=True)
class RoutedMultiplier:
    """LNN multiplier circuit plus the layout data needed to read it."""

    spec: FieldSpec
    circuit: Circuit
    initial_layout: tuple[str, ...]
    final_layout: tuple[str, ...]
    comp_stages: int
    swap_stages: int


def route_lnn(spec: FieldSpec) -> RoutedMultiplier:
    """Full multiplier with every gate on adjacent wires.

    Pipeline: reposition into the high-half pattern, run the high-half
    systolic sweep, reposition back to the published connectivity
    pattern, apply the reduction network on the now-contiguous ancilla
    block with adjacent-only CNOTs, then run the low-half sweep.
    """
    m = spec.m
    router = _Router(m)
    router.route_to(_e_machine_layout(m))
    router.run_systolic("e")
    router.route_to(list(initial_multiplier_layout(m)))
    # Ancilla block sits at positions 0..m-1 in index order, so matrix
    # row r is wire r and adjacent row ops are adjacent wires.
    ops = lnn_linear_ops(reduction_update_matrix(spec))
    router.emit_comp_block(ops_to_cnots(ops))
    router.run_systolic("d")
    circ = Circuit(3 * m, initial_multiplier_layout(m), tuple(router.gates))
    return RoutedMultiplier(
        spec=spec,
        circuit=circ,
        initial_layout=initial_multiplier_layout(m),
        final_layout=tuple(router.layout),
        comp_stages=router.comp_stages,
        swap_stages=router.swap_stages,
    )


def routed_input_state(routed: RoutedMultiplier, a_bits: int, b_bits: int) -> int:
    """Wire mask for inputs a, b placed per the initial layout."""
    mask = 0
    for pos, lab in enumerate(routed.initial_layout):
        kind, idx = _parse_label(lab)
        if kind == "a" and (a_bits >> idx) & 1:
            mask |= 1 << pos
        elif kind == "b" and (b_bits >> idx) & 1:
            mask |= 1 << pos
    return mask


def routed_read_product(routed: RoutedMultiplier, out_mask: int) -> int:
    """Extract the product register from a final wire mask."""
    c_bits = 0
    for pos, lab in enumerate(routed.final_layout):
        kind, idx = _parse_label(lab)
        if kind == "c" and (out_mask >> pos) & 1:
            c_bits |= 1 << idx
    return c_bits

"""Exact classical simulation of reversible circuits on basis states.

The gate set (NOT, CNOT, Toffoli, SWAP) permutes computational basis
states, so one bit vector per run is all the state there is; exhaustive
verification of an n-wire circuit costs 2^n runs of O(gates) bit
operations.  Opaque 2-qubit placeholders have no defined action and are
rejected.

run() propagates a single input; run_batch() propagates many inputs at
once through a numpy bit matrix and must agree with run() bit for bit
(it does: same gates, same order, just vectorized across inputs).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .circuit import CNOT, G2, NOT, SWAP, TOF, Circuit, Gate

BitState = tuple[int, ...]

THREADS_ENV_VAR = "ECDLP_FORGE_THREADS"


class NotSimulatableError(ValueError):
    """Raised when a circuit contains opaque (G2) gates."""


def _check_bits(bits, n: int) -> tuple[int, ...]:
    t = tuple(bits)
    if len(t) != n:
        raise ValueError(f"state has {len(t)} bits, circuit has {n} wires")
    if any(b not in (0, 1) for b in t):
        raise ValueError("state entries must be 0 or 1")
    return t


def bits_to_int(bits) -> int:
    mask = 0
    for i, b in enumerate(bits):
        if b:
            mask |= 1 << i
    return mask


def int_to_bits(mask: int, n: int) -> BitState:
    return tuple((mask >> i) & 1 for i in range(n))


def apply_gate_int(mask: int, g: Gate) -> int:
    if g.kind == NOT:
        return mask ^ (1 << g.qubits[0])
    if g.kind == CNOT:
        c, t = g.qubits
        return mask ^ (((mask >> c) & 1) << t)
    if g.kind == TOF:
        c1, c2, t = g.qubits
        return mask ^ ((((mask >> c1) & (mask >> c2)) & 1) << t)
    if g.kind == SWAP:
        a, b = g.qubits
        ba, bb = (mask >> a) & 1, (mask >> b) & 1
        if ba != bb:
            mask ^= (1 << a) | (1 << b)
        return mask
    raise NotSimulatableError(f"{g.kind} gates have no defined bit action")


def apply_gate(state: BitState, g: Gate) -> BitState:
    """Apply one gate's defining permutation to a bit vector."""
    n = len(state)
    if max(g.qubits) >= n:
        raise ValueError("gate wires exceed state length")
    return int_to_bits(apply_gate_int(bits_to_int(state), g), n)


def run(c: Circuit, state) -> BitState:
    """Left-to-right application of every gate to the input state."""
    bits = _check_bits(state, c.n_wires)
    mask = bits_to_int(bits)
    for g in c.gates:
        mask = apply_gate_int(mask, g)
    return int_to_bits(mask, c.n_wires)


def run_int(c: Circuit, mask: int) -> int:
    """run() on an int bit mask; the fast path for harness loops."""
    for g in c.gates:
        mask = apply_gate_int(mask, g)
    return mask


def _run_batch_chunk(c: Circuit, arr: np.ndarray) -> np.ndarray:
    for g in c.gates:
        if g.kind == NOT:
            arr[:, g.qubits[0]] ^= 1
        elif g.kind == CNOT:
            cq, t = g.qubits
            arr[:, t] ^= arr[:, cq]
        elif g.kind == TOF:
            c1, c2, t = g.qubits
            arr[:, t] ^= arr[:, c1] & arr[:, c2]
        elif g.kind == SWAP:
            a, b = g.qubits
            arr[:, [a, b]] = arr[:, [b, a]]
        else:
            raise NotSimulatableError(f"{g.kind} gates have no defined bit action")
    return arr


def batch_workers(explicit: int | None = None) -> int:
    """Worker count: explicit argument, else ECDLP_FORGE_THREADS, else 1."""
    if explicit is not None:
        n = explicit
    else:
        env = os.environ.get(THREADS_ENV_VAR)
        if env is None:
            return 1
        try:
            n = int(env)
        except ValueError:
            raise ValueError(f"{THREADS_ENV_VAR} must be an integer, got {env!r}") from None
    if n < 1:
        raise ValueError("worker count must be >= 1")
    return n


def run_batch(c: Circuit, states: np.ndarray, workers: int | None = None) -> np.ndarray:
    """Simulate many inputs at once.

    states is an (n_inputs, n_wires) 0/1 array; the result has the same
    shape.  Inputs are independent, so chunks may be evaluated on
    worker threads; chunk results are concatenated in input order, so
    the output is identical to sequential evaluation.
    """
    if states.ndim != 2 or states.shape[1] != c.n_wires:
        raise ValueError(f"states must have shape (n, {c.n_wires})")
    arr = np.array(states, dtype=np.uint8, copy=True)
    nw = batch_workers(workers)
    if nw == 1 or arr.shape[0] < 2 * nw:
        return _run_batch_chunk(c, arr)
    chunks = np.array_split(arr, nw)
    with ThreadPoolExecutor(max_workers=nw) as pool:
        done = list(pool.map(lambda ch: _run_batch_chunk(c, ch), chunks))
    return np.concatenate(done, axis=0)


def inverse(c: Circuit) -> Circuit:
    """Reversed gate list; valid because every simulatable gate is an involution."""
    for g in c.gates:
        if g.kind == G2:
            raise NotSimulatableError("cannot invert opaque 2-qubit gates")
    return Circuit(c.n_wires, c.labels, tuple(reversed(c.gates)))

"""Reversible-gate IR: gate set, circuits, scheduling, LNN checks, text format.

Wire index equals physical position on the line; logical-to-physical
tracking is the router's job, not the IR's.  Circuits are immutable
after construction (build them through CircuitBuilder) and all queries
here are pure, so values can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

NOT = "NOT"
CNOT = "CNOT"
TOF = "TOF"
SWAP = "SWAP"
G2 = "G2"

GATE_ARITY = {NOT: 1, CNOT: 2, TOF: 3, SWAP: 2, G2: 2}

# Number of opaque 2-qubit gates one Toffoli expands to (the standard
# controlled-V realization; see decompose_toffoli).
TOFFOLI_2Q_TEMPLATE_SIZE = 5


@dataclass(frozen=True)
class Gate:
    """One gate: kind plus ordered wire tuple (controls first, target last)."""

    kind: str
    qubits: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in GATE_ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(self.qubits) != GATE_ARITY[self.kind]:
            raise ValueError(
                f"{self.kind} takes {GATE_ARITY[self.kind]} wires, got {self.qubits}"
            )
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"{self.kind} wires must be distinct: {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise ValueError("wire indices must be non-negative")


@dataclass(frozen=True)
class Circuit:
    n_wires: int
    labels: tuple[str, ...]
    gates: tuple[Gate, ...]

    def __post_init__(self):
        if self.n_wires < 0:
            raise ValueError("negative wire count")
        if len(self.labels) != self.n_wires:
            raise ValueError("need exactly one label per wire")
        if len(set(self.labels)) != self.n_wires:
            raise ValueError("wire labels must be unique")
        for g in self.gates:
            if max(g.qubits, default=-1) >= self.n_wires:
                raise ValueError(f"gate {g} exceeds wire count {self.n_wires}")

    def gate_counts(self) -> dict[str, int]:
        counts = {k: 0 for k in GATE_ARITY}
        for g in self.gates:
            counts[g.kind] += 1
        counts["total"] = len(self.gates)
        return counts

    def __len__(self):
        return len(self.gates)


def default_labels(n: int) -> tuple[str, ...]:
    return tuple(f"q{i}" for i in range(n))


class CircuitBuilder:
    """Accumulates gates, then freezes them into a Circuit."""

    def __init__(self, n_wires: int, labels: tuple[str, ...] | list[str] | None = None):
        self.n_wires = n_wires
        self.labels = tuple(labels) if labels is not None else default_labels(n_wires)
        self._gates: list[Gate] = []

    def gate(self, g: Gate) -> "CircuitBuilder":
        if max(g.qubits, default=-1) >= self.n_wires:
            raise ValueError(f"gate {g} exceeds wire count {self.n_wires}")
        self._gates.append(g)
        return self

    def x(self, t: int):
        return self.gate(Gate(NOT, (t,)))

    def cx(self, c: int, t: int):
        return self.gate(Gate(CNOT, (c, t)))

    def ccx(self, c1: int, c2: int, t: int):
        return self.gate(Gate(TOF, (c1, c2, t)))

    def swap(self, a: int, b: int):
        return self.gate(Gate(SWAP, (a, b)))

    def g2(self, a: int, b: int):
        return self.gate(Gate(G2, (a, b)))

    def extend(self, gates) -> "CircuitBuilder":
        for g in gates:
            self.gate(g)
        return self

    def build(self) -> Circuit:
        return Circuit(self.n_wires, self.labels, tuple(self._gates))


def schedule(c: Circuit) -> list[list[int]]:
    """Greedy as-soon-as-possible layering of the gate list.

    Each gate lands one layer after the latest earlier gate it shares a
    wire with, which is the minimum-depth schedule for the given order.
    """
    ready = [0] * c.n_wires  # first layer each wire is free at
    layers: list[list[int]] = []
    for idx, g in enumerate(c.gates):
        layer = max(ready[q] for q in g.qubits)
        if layer == len(layers):
            layers.append([])
        layers[layer].append(idx)
        for q in g.qubits:
            ready[q] = layer + 1
    return layers


def depth(c: Circuit) -> int:
    """Number of time steps of the greedy schedule."""
    ready = [0] * c.n_wires
    d = 0
    for g in c.gates:
        layer = max(ready[q] for q in g.qubits) + 1
        for q in g.qubits:
            ready[q] = layer
        if layer > d:
            d = layer
    return d


def is_lnn(c: Circuit) -> bool:
    """True iff every multi-qubit gate acts on adjacent line positions.

    2-qubit gates need |i - j| == 1; Toffolis need their three wires to
    occupy consecutive positions (in any control/target arrangement).
    """
    for g in c.gates:
        if g.kind == NOT:
            continue
        if g.kind == TOF:
            lo = min(g.qubits)
            if set(g.qubits) != {lo, lo + 1, lo + 2}:
                return False
        else:
            if abs(g.qubits[0] - g.qubits[1]) != 1:
                return False
    return True


def decompose_toffoli(c: Circuit) -> Circuit:
    """Replace each Toffoli on consecutive wires by 5 opaque 2-qubit gates.

    The template is the standard controlled-V / controlled-V+ ladder
    (5 two-qubit gates; no extra NOTs needed).  Gate identities are not
    modeled: the result is for depth and count accounting only and
    cannot be simulated.  Toffolis on non-consecutive wires are
    rejected; route the circuit first.
    """
    out: list[Gate] = []
    for g in c.gates:
        if g.kind != TOF:
            out.append(g)
            continue
        lo = min(g.qubits)
        if set(g.qubits) != {lo, lo + 1, lo + 2}:
            raise ValueError(
                f"Toffoli on non-consecutive wires {g.qubits}; route before decomposing"
            )
        c1, c2, t = g.qubits
        out.extend(
            [
                Gate(G2, (c2, t)),
                Gate(G2, (c1, c2)),
                Gate(G2, (c2, t)),
                Gate(G2, (c1, c2)),
                Gate(G2, (c1, t)),
            ]
        )
    return Circuit(c.n_wires, c.labels, tuple(out))


class RqcParseError(ValueError):
    """Malformed .rqc text; carries the 1-based offending line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def emit_text(c: Circuit) -> str:
    """Serialize to the .rqc line format (ASCII, LF, '#' comments)."""
    lines = [f"WIRES {c.n_wires}"]
    for i, lab in enumerate(c.labels):
        lines.append(f"LABEL {i} {lab}")
    for g in c.gates:
        lines.append(" ".join([g.kind] + [str(q) for q in g.qubits]))
    return "\n".join(lines) + "\n"


def parse_text(text: str) -> Circuit:
    """Parse the .rqc format; inverse of emit_text."""
    n_wires: int | None = None
    labels: dict[int, str] = {}
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        op = parts[0]
        if op == "WIRES":
            if n_wires is not None:
                raise RqcParseError(lineno, "duplicate WIRES header")
            if len(parts) != 2:
                raise RqcParseError(lineno, "WIRES takes one argument")
            try:
                n_wires = int(parts[1])
            except ValueError:
                raise RqcParseError(lineno, f"bad wire count {parts[1]!r}") from None
            if n_wires < 0:
                raise RqcParseError(lineno, "negative wire count")
            continue
        if n_wires is None:
            raise RqcParseError(lineno, "WIRES header must come first")
        if op == "LABEL":
            if len(parts) != 3:
                raise RqcParseError(lineno, "LABEL takes index and name")
            try:
                idx = int(parts[1])
            except ValueError:
                raise RqcParseError(lineno, f"bad label index {parts[1]!r}") from None
            if not 0 <= idx < n_wires:
                raise RqcParseError(lineno, f"label index {idx} out of range")
            if idx in labels:
                raise RqcParseError(lineno, f"duplicate label for wire {idx}")
            labels[idx] = parts[2]
            continue
        if op not in GATE_ARITY:
            raise RqcParseError(lineno, f"unknown directive {op!r}")
        if len(parts) - 1 != GATE_ARITY[op]:
            raise RqcParseError(
                lineno, f"{op} takes {GATE_ARITY[op]} wires, got {len(parts) - 1}"
            )
        try:
            qubits = tuple(int(x) for x in parts[1:])
        except ValueError:
            raise RqcParseError(lineno, "wire indices must be integers") from None
        if max(qubits) >= n_wires:
            raise RqcParseError(lineno, f"wire index out of range in {line!r}")
        try:
            gates.append(Gate(op, qubits))
        except ValueError as e:
            raise RqcParseError(lineno, str(e)) from None
    if n_wires is None:
        raise RqcParseError(1, "missing WIRES header")
    label_tuple = tuple(labels.get(i, f"q{i}") for i in range(n_wires))
    if len(set(label_tuple)) != n_wires:
        raise RqcParseError(1, "labels are not unique")
    return Circuit(n_wires, label_tuple, tuple(gates))

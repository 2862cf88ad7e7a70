"""Desk-scale, mathematically exact emulation of the discrete-log run.

The quantum algorithm prepares sum |x>|y>|xP + yQ> and Fourier
transforms the two index registers.  Here the index registers range
over Z_r with r the order of P: the group-state construction is
identical up to that point, and with Z_r indices the post-transform
distribution is exactly supported on a line, so recovery needs no
continued-fraction step.

The chain for one (x, y) mirrors the algorithm's datapath: projective
double-and-add against classically precomputed 2^k P and 2^k Q, the
off-curve sentinel standing in for the point at infinity, and a single
field inversion at the very end; all r^2 chain results are affinized
through one batched inversion, so solving an instance invokes field_inv
exactly once.  In circuit-backed mode each generic group addition runs
through the synthesized point-add circuit on the bit simulator.

Probabilities are computed in double-precision complex arithmetic with
fixed-shape numpy reductions, so results are deterministic run to run.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit
from .ecadd import (
    PointRegisterMap,
    apply_point_add,
    exceptional_case_policy,
    off_curve_sentinel,
    synth_point_add_known,
)
from .ecc import (
    AffinePoint,
    CurveParams,
    ProjectivePoint,
    add_affine,
    add_projective,
    batch_to_affine,
    from_affine,
    on_curve,
    order_of,
    scalar_mul,
)
from .gf2m import batch_inverse, field_mul

DESK_SCALE_MAX_ORDER = 1 << 12
NORMALIZATION_TOL = 1e-9


class SubgroupMembershipError(ValueError):
    """Q is not a multiple of P; no discrete logarithm exists."""


@dataclass(frozen=True)
class ECDLPInstance:
    curve: CurveParams
    p: AffinePoint
    q: AffinePoint | None
    r: int  # order of p


def make_instance(curve: CurveParams, p: AffinePoint, q: AffinePoint | None) -> ECDLPInstance:
    """Validate P, compute its order, and check Q really lies in <P>."""
    if p is None or not on_curve(curve, p):
        raise ValueError("P must be a finite point on the curve")
    if not on_curve(curve, q):
        raise ValueError("Q must be on the curve")
    r = order_of(curve, p)
    multiples = set()
    acc: AffinePoint | None = None
    for _ in range(r):
        multiples.add(acc)
        acc = add_affine(curve, acc, p)
    assert acc is None, "order_of is the additive period"
    if q not in multiples:
        raise SubgroupMembershipError("Q is not in the subgroup generated by P")
    return ECDLPInstance(curve, p, q, r)


@dataclass(frozen=True)
class DoubleAddSchedule:
    """Classically precomputed 2^k multiples of P and of Q."""

    p_powers: tuple[AffinePoint | None, ...]
    q_powers: tuple[AffinePoint | None, ...]

    def __len__(self):
        return len(self.p_powers) + len(self.q_powers)


def double_and_add_schedule(inst: ECDLPInstance) -> DoubleAddSchedule:
    """2^k P and 2^k Q for 0 <= k < ceil(log2 r), each checked on curve."""
    n_bits = max(1, (inst.r - 1).bit_length())
    curve = inst.curve

    def powers(base: AffinePoint | None) -> tuple[AffinePoint | None, ...]:
        out = [base]
        for _ in range(n_bits - 1):
            out.append(add_affine(curve, out[-1], out[-1]))
        for pt in out:
            assert on_curve(curve, pt)
        return tuple(out)

    return DoubleAddSchedule(powers(inst.p), powers(inst.q))


@dataclass
class DatapathAccounting:
    """Counts the operations the emulated datapath performs."""

    field_inv_calls: int = 0
    generic_adds: int = 0
    policy_adds: int = 0


def _chain_adders(
    inst: ECDLPInstance, mode: str
) -> list[tuple[AffinePoint | None, object]]:
    """One adder per scheduled classical point, honoring the mode.

    Each entry is (point, add_fn) where add_fn maps a generic
    projective accumulator to accumulator + point.  Infinite scheduled
    points get adder None: adding O is the identity.
    """
    sched = double_and_add_schedule(inst)
    curve = inst.curve
    adders: list[tuple[AffinePoint | None, object]] = []
    for pt in list(sched.p_powers) + list(sched.q_powers):
        if pt is None:
            adders.append((None, None))
        elif mode == "oracle":
            rp = from_affine(curve, pt)
            adders.append((pt, lambda acc, rp=rp: add_projective(curve, acc, rp)))
        elif mode == "circuit":
            circ, regmap = synth_point_add_known(curve, pt)
            adders.append(
                (
                    pt,
                    lambda acc, circ=circ, regmap=regmap: apply_point_add(
                        circ, regmap, curve, acc
                    ),
                )
            )
        else:
            raise ValueError(f"unknown mode {mode!r}")
    return adders


def state_table(
    inst: ECDLPInstance,
    mode: str = "oracle",
    accounting: DatapathAccounting | None = None,
) -> dict[tuple[int, int, int], list[tuple[int, int]]]:
    """Class of xP + yQ for every (x, y) in Z_r x Z_r.

    Returns canonical-representative -> sorted list of (x, y), with the
    off-curve sentinel keying the infinity class.  All chains finish
    with one shared batched inversion, so the whole table costs exactly
    one field_inv call.
    """
    r = inst.r
    if r > DESK_SCALE_MAX_ORDER:
        raise ValueError(f"subgroup order {r} exceeds the desk-scale guard")
    acct = accounting if accounting is not None else DatapathAccounting()
    curve = inst.curve
    sentinel = off_curve_sentinel(curve)
    adders = _chain_adders(inst, mode)
    n_bits = len(adders) // 2

    def add_known(acc: ProjectivePoint, idx: int) -> ProjectivePoint:
        pt, fn = adders[idx]
        if pt is None:
            return acc
        resolved = exceptional_case_policy(curve, acc, pt)
        if resolved is not None:
            acct.policy_adds += 1
            return resolved
        acct.generic_adds += 1
        return fn(acc)

    triples: list[ProjectivePoint] = []
    xy: list[tuple[int, int]] = []
    for x in range(r):
        for y in range(r):
            acc = sentinel
            for k in range(n_bits):
                if (x >> k) & 1:
                    acc = add_known(acc, k)
                if (y >> k) & 1:
                    acc = add_known(acc, n_bits + k)
            triples.append(acc)
            xy.append((x, y))

    # One-shot affinization: a single field inversion normalizes every
    # finite representative (infinity is already the fixed sentinel).
    finite_idx = [
        i for i, t in enumerate(triples) if not (t.z.bits == 0 or t == sentinel)
    ]
    invs = batch_inverse([triples[i].z for i in finite_idx])
    acct.field_inv_calls += 1 if finite_idx else 0
    skey = (sentinel.x.bits, sentinel.y.bits, sentinel.z.bits)
    keys: list[tuple[int, int, int]] = [skey] * len(triples)
    for i, zi in zip(finite_idx, invs):
        t = triples[i]
        keys[i] = (field_mul(t.x, zi).bits, field_mul(t.y, zi).bits, 1)
    table: dict[tuple[int, int, int], list[tuple[int, int]]] = {}
    for key, pair in zip(keys, xy):
        table.setdefault(key, []).append(pair)
    for v in table.values():
        v.sort()
    return table


@dataclass(frozen=True)
class OutcomeDistribution:
    """Exact post-transform probabilities over Z_r x Z_r outcomes."""

    r: int
    prob: dict[tuple[int, int], float]

    def support(self, tol: float = 1e-12) -> set[tuple[int, int]]:
        return {k for k, v in self.prob.items() if v > tol}


def outcome_distribution(
    inst: ECDLPInstance,
    mode: str = "oracle",
    table: dict | None = None,
    accounting: DatapathAccounting | None = None,
) -> OutcomeDistribution:
    """Measurement distribution after the two-register Fourier transform.

    Pr(k1, k2) = (1/r^4) * sum over point classes of
    |sum over class members of omega^(x*k2 - y*k1)|^2, omega = e^(2*pi*i/r):
    the x register transforms against index k2 and the y register
    against -k1, a unitary index convention chosen so the support is
    the line k1 + d*k2 = 0 (mod r) and d = -k1/k2 reads off directly.
    """
    r = inst.r
    if table is None:
        table = state_table(inst, mode=mode, accounting=accounting)
    ks = np.arange(r)
    omega = np.exp(2j * np.pi / r)
    w = omega ** np.outer(ks, ks)  # w[v, k] = omega^(v*k)
    total = np.zeros((r, r), dtype=np.float64)
    for members in table.values():
        xs = np.array([x for x, _ in members])
        ys = np.array([y for _, y in members])
        # s[k1, k2] = sum_j omega^(xs_j * k2 - ys_j * k1)
        s = np.conj(w[ys, :]).T @ w[xs, :]
        total += np.abs(s) ** 2
    total /= float(r) ** 4
    if abs(total.sum() - 1.0) > NORMALIZATION_TOL:
        raise ArithmeticError(f"distribution sums to {total.sum()}, not 1")
    prob = {(k1, k2): float(total[k1, k2]) for k1 in range(r) for k2 in range(r)}
    return OutcomeDistribution(r, prob)


def sample_outcomes(
    dist: OutcomeDistribution, seed: int, n: int
) -> list[tuple[int, int]]:
    """n independent draws from the distribution, deterministic per seed."""
    rng = random.Random(seed)
    keys = sorted(dist.prob)
    weights = [dist.prob[k] for k in keys]
    cumulative = []
    acc = 0.0
    for wgt in weights:
        acc += wgt
        cumulative.append(acc)
    out = []
    for _ in range(n):
        u = rng.random() * acc
        lo, hi = 0, len(cumulative) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if cumulative[mid] < u:
                lo = mid + 1
            else:
                hi = mid
        out.append(keys[lo])
    return out


class RecoveryError(RuntimeError):
    """No outcome with invertible second index within the sample budget."""


def recover_d(outcomes, r: int) -> tuple[int, int]:
    """d = (-k1) * k2^(-1) mod r from the first outcome with invertible k2.

    Returns (d, number of outcomes consumed).  Raises RecoveryError if
    the supply runs out, which only matters for composite r.
    """
    used = 0
    for k1, k2 in outcomes:
        used += 1
        if k2 % r != 0 and _gcd(k2, r) == 1:
            return (-k1 * pow(k2, -1, r)) % r, used
    raise RecoveryError(f"no invertible outcome among {used} samples")


def recover_d_exact(dist: OutcomeDistribution) -> int:
    """Recovery from the exact distribution: scan the support in order."""
    d, _ = recover_d(sorted(dist.support()), dist.r)
    return d


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


@dataclass(frozen=True)
class SolveResult:
    d: int
    r: int
    samples_used: int
    support_size: int
    mode: str
    accounting: DatapathAccounting


def ecdlp_solve(
    curve: CurveParams,
    p: AffinePoint,
    q: AffinePoint | None,
    seed: int = 0,
    mode: str = "oracle",
    max_samples: int = 64,
) -> SolveResult:
    """End-to-end run: order, state table, exact transform, sampling, d.

    Deterministic for a fixed seed.  The recovered d is verified by
    scalar multiplication before being returned.
    """
    inst = make_instance(curve, p, q)
    acct = DatapathAccounting()
    dist = outcome_distribution(inst, mode=mode, accounting=acct)
    samples = sample_outcomes(dist, seed, max_samples)
    d, used = recover_d(samples, inst.r)
    if scalar_mul(curve, d, p) != q:
        raise RuntimeError(f"recovered d={d} fails verification")
    return SolveResult(
        d=d,
        r=inst.r,
        samples_used=used,
        support_size=len(dist.support()),
        mode=mode,
        accounting=acct,
    )

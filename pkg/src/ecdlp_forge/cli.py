"""Command-line entry point.

Subcommands cover synthesis (synth-mult, route-lnn, synth-ecadd),
simulation (simulate), verification (verify-mult), curve inspection
(curve-info), the end-to-end discrete-log demo (ecdlp-demo), and the
count/depth reproduction tables (report).

Exit codes: 0 success, 1 verification failure, 2 usage error.  Reports
are flat sorted key=value text by default (byte-stable across runs, so
they can serve as golden files); --format json switches to a sorted
JSON object.  Output files are written to a temp file and renamed into
place, so a failure never leaves a partial file behind.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

import numpy as np

from . import bitsim, circuit, ecadd, ecc, gf2m, mastrovito, shor

KV = "kv"
JSON_FMT = "json"


class VerificationFailure(Exception):
    """A requested check ran and failed."""


def _atomic_write(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit_report(data: dict, fmt: str, out=sys.stdout):
    if fmt == JSON_FMT:
        out.write(json.dumps(data, sort_keys=True, indent=2) + "\n")
    else:
        for k in sorted(data):
            out.write(f"{k}={data[k]}\n")


def _parse_poly(s: str) -> int:
    try:
        return gf2m.poly_from_hex(s)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _hex_int(s: str) -> int:
    try:
        v = int(s, 16)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a hex integer: {s!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("hex values must be non-negative")
    return v


def _field_spec(args) -> gf2m.FieldSpec:
    try:
        return gf2m.FieldSpec(args.m, args.poly)
    except ValueError as e:
        raise UsageError(str(e)) from None


class UsageError(Exception):
    pass


def _curve(args) -> ecc.CurveParams:
    spec = _field_spec(args)
    try:
        return ecc.CurveParams(spec, spec.element(args.a), spec.element(args.b))
    except ValueError as e:
        raise UsageError(str(e)) from None


def _mult_stats(spec: gf2m.FieldSpec, circ: circuit.Circuit, routed=None) -> dict:
    m = spec.m
    counts = circ.gate_counts()
    stats = {
        "m": m,
        "poly": gf2m.poly_to_hex(spec.poly),
        "gates.total": counts["total"],
        "gates.toffoli": counts[circuit.TOF],
        "gates.cnot": counts[circuit.CNOT],
        "gates.swap": counts[circuit.SWAP],
        "gates.not": counts[circuit.NOT],
        "gates.g2": counts[circuit.G2],
        "depth": circuit.depth(circ),
        "bound.general": 2 * m * m - 1,
        "bound.trinomial": m * m + m - 1,
    }
    if routed is not None:
        stats["lnn"] = int(circuit.is_lnn(circ))
        stats["stages.comp"] = routed.comp_stages
        stats["stages.swap"] = routed.swap_stages
    return stats


def cmd_synth_mult(args) -> int:
    spec = _field_spec(args)
    if args.route_lnn:
        routed = mastrovito.route_lnn(spec)
        circ = routed.circuit
    else:
        routed = None
        circ = mastrovito.synth_multiplier(spec)
    if args.decompose:
        circ = circuit.decompose_toffoli(circ)
    stats = _mult_stats(spec, circ, routed)
    text = circuit.emit_text(circ)
    if args.out:
        _atomic_write(args.out, text)
        _emit_report(stats, args.format)
    else:
        sys.stdout.write(text)
        _emit_report(stats, args.format, out=sys.stderr)
    return 0


def cmd_route_lnn(args) -> int:
    args.route_lnn = True
    return cmd_synth_mult(args)


def cmd_simulate(args) -> int:
    with open(args.circuit) as f:
        circ = circuit.parse_text(f.read())
    bits = args.input.strip()
    if len(bits) != circ.n_wires or any(ch not in "01" for ch in bits):
        raise UsageError(
            f"input must be {circ.n_wires} characters of 0/1, got {bits!r}"
        )
    state = tuple(int(ch) for ch in bits)
    out = bitsim.run(circ, state)
    sys.stdout.write("".join(str(b) for b in out) + "\n")
    return 0


def cmd_verify_mult(args) -> int:
    spec = _field_spec(args)
    if args.routed:
        routed = mastrovito.route_lnn(spec)
        if not circuit.is_lnn(routed.circuit):
            raise VerificationFailure("routed circuit is not LNN-legal")
    else:
        routed = None
        circ = mastrovito.synth_multiplier(spec)
    m = spec.m
    if args.exhaustive:
        pairs = [(a, b) for a in range(1 << m) for b in range(1 << m)]
    else:
        rng = np.random.default_rng(args.seed)
        pairs = [
            (int(a), int(b))
            for a, b in zip(
                rng.integers(0, 1 << m, size=args.samples),
                rng.integers(0, 1 << m, size=args.samples),
            )
        ]
    states = np.zeros((len(pairs), 3 * m), dtype=np.uint8)
    if routed is not None:
        for row, (a, b) in enumerate(pairs):
            mask = mastrovito.routed_input_state(routed, a, b)
            for w in range(3 * m):
                states[row, w] = (mask >> w) & 1
        out = bitsim.run_batch(routed.circuit, states, workers=args.workers)
        ok = 0
        for row, (a, b) in enumerate(pairs):
            mask = int(sum(int(out[row, w]) << w for w in range(3 * m)))
            got = mastrovito.routed_read_product(routed, mask)
            want = gf2m.poly_mulmod(a, b, spec.poly)
            ok += got == want
    else:
        for row, (a, b) in enumerate(pairs):
            for i in range(m):
                states[row, i] = (a >> i) & 1
                states[row, m + i] = (b >> i) & 1
        out = bitsim.run_batch(circ, states, workers=args.workers)
        ok = 0
        for row, (a, b) in enumerate(pairs):
            got = int(sum(int(out[row, 2 * m + i]) << i for i in range(m)))
            want = gf2m.poly_mulmod(a, b, spec.poly)
            ok += got == want
    print(f"{ok}/{len(pairs)} pass")
    if ok != len(pairs):
        raise VerificationFailure("multiplier disagrees with the field oracle")
    return 0


def cmd_synth_ecadd(args) -> int:
    curve = _curve(args)
    try:
        r_point = curve.point(args.rx, args.ry)
    except ValueError as e:
        raise UsageError(str(e)) from None
    circ, regmap = ecadd.synth_point_add_known(curve, r_point)
    text = circuit.emit_text(circ)
    side_lines = [f"M {regmap.m}", f"WIRES {regmap.n_wires}"]
    for name, rng in (
        ("X1", regmap.x1),
        ("Y1", regmap.y1),
        ("Z1", regmap.z1),
        ("X3", regmap.x3),
        ("Y3", regmap.y3),
        ("Z3", regmap.z3),
    ):
        side_lines.append(f"REG {name} {rng[0]} {rng[1]}")
    for name, start, stop in regmap.ancillas:
        side_lines.append(f"ANC {name} {start} {stop}")
    sidecar = "\n".join(side_lines) + "\n"
    if args.out:
        _atomic_write(args.out, text)
        _atomic_write(args.out + ".regmap", sidecar)
    else:
        sys.stdout.write(text)
        for line in side_lines:
            sys.stdout.write(f"# {line}\n")
    return 0


def cmd_curve_info(args) -> int:
    curve = _curve(args)
    pts = ecc.enumerate_points(curve)
    best = None
    for pt in pts:
        if pt is None:
            continue
        r = ecc.order_of(curve, pt)
        key = (-r, pt.x.bits, pt.y.bits)
        if best is None or key < best[0]:
            best = (key, pt, r)
    assert best is not None
    _, gen, r = best
    data = {
        "m": curve.spec.m,
        "poly": gf2m.poly_to_hex(curve.spec.poly),
        "a": hex(curve.a.bits),
        "b": hex(curve.b.bits),
        "group_size": len(pts),
        "generator.x": hex(gen.x.bits),
        "generator.y": hex(gen.y.bits),
        "generator.order": r,
    }
    _emit_report(data, args.format)
    return 0


def cmd_ecdlp_demo(args) -> int:
    curve = _curve(args)
    pts = ecc.enumerate_points(curve)
    best = None
    for pt in pts:
        if pt is None:
            continue
        r = ecc.order_of(curve, pt)
        key = (-r, pt.x.bits, pt.y.bits)
        if best is None or key < best[0]:
            best = (key, pt, r)
    assert best is not None
    _, gen, r_full = best
    # Use the largest prime-order subgroup of the best generator.
    r = max(_prime_factors(r_full))
    p = ecc.scalar_mul(curve, r_full // r, gen)
    assert p is not None
    rng_d = args.d if args.d is not None else (args.seed % r)
    q = ecc.scalar_mul(curve, rng_d, p)
    result = shor.ecdlp_solve(curve, p, q, seed=args.seed, mode=args.mode)
    data = {
        "m": curve.spec.m,
        "poly": gf2m.poly_to_hex(curve.spec.poly),
        "a": hex(curve.a.bits),
        "b": hex(curve.b.bits),
        "P.x": hex(p.x.bits),
        "P.y": hex(p.y.bits),
        "r": result.r,
        "d.true": rng_d % r,
        "d.recovered": result.d,
        "support.size": result.support_size,
        "support.line": f"k1 + {result.d}*k2 = 0 (mod {result.r})",
        "samples.used": result.samples_used,
        "mode": result.mode,
        "field_inv_calls": result.accounting.field_inv_calls,
        "verified": int(ecc.scalar_mul(curve, result.d, p) == q),
    }
    _emit_report(data, args.format)
    if data["verified"] != 1 or result.d != rng_d % r:
        raise VerificationFailure("recovered exponent failed verification")
    return 0


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
    return [x for x in out] or [n]


def default_poly(m: int) -> int:
    """Smallest-integer irreducible polynomial of degree m."""
    for p in range((1 << m) + 1, 1 << (m + 1), 2):
        if gf2m.poly_is_irreducible(p):
            return p
    raise RuntimeError(f"no irreducible polynomial of degree {m}")


def cmd_report(args) -> int:
    ms = args.m_list
    data: dict = {}
    for m in ms:
        poly = default_poly(m)
        spec = gf2m.FieldSpec(m, poly)
        circ = mastrovito.synth_multiplier(spec)
        counts = circ.gate_counts()
        pre = f"m{m:03d}."
        data[pre + "poly"] = gf2m.poly_to_hex(poly)
        data[pre + "gates.total"] = counts["total"]
        data[pre + "gates.toffoli"] = counts[circuit.TOF]
        data[pre + "gates.cnot"] = counts[circuit.CNOT]
        data[pre + "bound.general"] = 2 * m * m - 1
        data[pre + "bound.trinomial"] = m * m + m - 1
        data[pre + "depth.e_stage"] = circuit.depth(mastrovito.synth_e_stage(spec))
        data[pre + "depth.d_stage"] = circuit.depth(mastrovito.synth_d_stage(spec))
        data[pre + "depth.full"] = circuit.depth(circ)
        if args.route:
            routed = mastrovito.route_lnn(spec)
            dec = circuit.decompose_toffoli(routed.circuit)
            data[pre + "routed.lnn"] = int(circuit.is_lnn(routed.circuit))
            data[pre + "routed.stages.comp"] = routed.comp_stages
            data[pre + "routed.stages.swap"] = routed.swap_stages
            data[pre + "routed.depth.decomposed"] = circuit.depth(dec)
            data[pre + "routed.depth.per_m"] = round(circuit.depth(dec) / m, 3)
    _emit_report(data, args.format)
    return 0


def _add_field_args(p: argparse.ArgumentParser):
    p.add_argument("--m", type=int, required=True, help="field degree")
    p.add_argument("--poly", type=_parse_poly, required=True, help="modulus, hex (bit i = x^i)")


def _add_format_arg(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=[KV, JSON_FMT], default=KV)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ecdlp-forge",
        description="Reversible-circuit synthesis and ECDLP emulation over GF(2^m)",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth-mult", help="synthesize the field multiplier")
    _add_field_args(p)
    p.add_argument("--route-lnn", action="store_true")
    p.add_argument("--decompose", action="store_true")
    p.add_argument("-o", "--out", help="write .rqc here (default: stdout)")
    _add_format_arg(p)
    p.set_defaults(fn=cmd_synth_mult)

    p = sub.add_parser("route-lnn", help="synthesize the LNN-routed multiplier")
    _add_field_args(p)
    p.add_argument("--decompose", action="store_true")
    p.add_argument("-o", "--out")
    _add_format_arg(p)
    p.set_defaults(fn=cmd_route_lnn)

    p = sub.add_parser("simulate", help="run a circuit file on an input bit string")
    p.add_argument("circuit", help=".rqc file")
    p.add_argument("--input", required=True, help="bit string, wire 0 first")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("verify-mult", help="check the multiplier against the field oracle")
    _add_field_args(p)
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--routed", action="store_true")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(fn=cmd_verify_mult)

    p = sub.add_parser("synth-ecadd", help="synthesize known-point addition")
    _add_field_args(p)
    p.add_argument("--a", type=_hex_int, required=True)
    p.add_argument("--b", type=_hex_int, required=True)
    p.add_argument("--rx", type=_hex_int, required=True)
    p.add_argument("--ry", type=_hex_int, required=True)
    p.add_argument("-o", "--out")
    p.set_defaults(fn=cmd_synth_ecadd)

    p = sub.add_parser("curve-info", help="group size, a generator, its order")
    _add_field_args(p)
    p.add_argument("--a", type=_hex_int, required=True)
    p.add_argument("--b", type=_hex_int, required=True)
    _add_format_arg(p)
    p.set_defaults(fn=cmd_curve_info)

    p = sub.add_parser("ecdlp-demo", help="solve a discrete log instance end to end")
    _add_field_args(p)
    p.add_argument("--a", type=_hex_int, required=True)
    p.add_argument("--b", type=_hex_int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--d", type=int, default=None, help="exponent (default: seed mod r)")
    p.add_argument("--mode", choices=["circuit", "oracle"], default="oracle")
    _add_format_arg(p)
    p.set_defaults(fn=cmd_ecdlp_demo)

    p = sub.add_parser("report", help="reproduce the count and depth tables")
    p.add_argument(
        "--m-list",
        type=lambda s: [int(x) for x in s.split(",")],
        default=[4, 8, 16],
    )
    p.add_argument("--route", action="store_true")
    _add_format_arg(p)
    p.set_defaults(fn=cmd_report)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else 0
    try:
        if getattr(args, "workers", None) is None and hasattr(args, "workers"):
            args.workers = bitsim.batch_workers(None)
        return args.fn(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except VerificationFailure as e:
        print(f"verification failed: {e}", file=sys.stderr)
        return 1
    except (ValueError, OSError, shor.SubgroupMembershipError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())

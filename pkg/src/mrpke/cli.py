"""Command-line interface: key lifecycle, known-answer tests, security
estimates, attack and reduction demonstrations, and benchmarks.

Exit codes: 0 success, 1 validation error, 2 I/O or format error,
3 cryptographic failure (undecodable ciphertext).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import statistics
import sys
import time

from . import attacks, estimator, onebit, pke, reduction
from .gabidulin import DecodeFailure
from .pke import DecryptError, PARAM_SETS, Params, ValidationError
from .rng import Expander, random_seed

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_CRYPTO = 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _param_set(name: str) -> Params:
    try:
        return PARAM_SETS[name]
    except KeyError:
        raise CliError(f"unknown parameter set {name!r}; choose from "
                       f"{', '.join(sorted(PARAM_SETS))}", EXIT_VALIDATION)


def _seed_arg(value: str | None) -> bytes:
    if value is None:
        seed = random_seed()
        print(f"seed: {seed.hex().upper()}", file=sys.stderr)
        return seed
    try:
        seed = bytes.fromhex(value)
    except ValueError:
        raise CliError("--seed must be hexadecimal", EXIT_VALIDATION)
    if len(seed) != 32:
        raise CliError("--seed must be 64 hex characters (32 bytes)", EXIT_VALIDATION)
    return seed


def _read_file(path: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_IO)


def _write_file(path: str, data: bytes) -> None:
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", EXIT_IO)


def _deserialize(kind: str, parser, data: bytes):
    try:
        return parser(data)
    except (ValueError, ValidationError) as exc:
        raise CliError(f"malformed {kind}: {exc}", EXIT_IO)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_keygen(args) -> int:
    p = _param_set(args.params)
    seed = _seed_arg(args.seed)
    pk, sk = pke.keygen(p, seed)
    _write_file(args.pk, pke.serialize_pk(pk))
    _write_file(args.sk, pke.serialize_sk(sk))
    print(f"wrote {args.pk} ({p.pk_payload_bytes} B payload) and "
          f"{args.sk} ({p.sk_payload_bytes} B payload)")
    return EXIT_OK


def cmd_encrypt(args) -> int:
    pk = _deserialize("public key", pke.deserialize_pk, _read_file(args.pk))
    p = pk.params
    seed = _seed_arg(args.seed)
    try:
        raw = bytes.fromhex(args.msg)
        msg = pke.msg_from_bytes(p, raw)
    except ValueError as exc:
        raise CliError(f"invalid message: {exc}", EXIT_VALIDATION)
    ct = pke.encrypt(pk, msg, seed)
    _write_file(args.ct, pke.serialize_ct(ct))
    print(f"wrote {args.ct} ({p.ct_payload_bytes} B payload)")
    return EXIT_OK


def cmd_decrypt(args) -> int:
    sk = _deserialize("secret key", pke.deserialize_sk, _read_file(args.sk))
    ct = _deserialize("ciphertext", pke.deserialize_ct, _read_file(args.ct))
    try:
        msg = pke.decrypt(sk, ct)
    except DecryptError as exc:
        raise CliError(str(exc), EXIT_CRYPTO)
    data = pke.msg_to_bytes(sk.params, msg)
    if args.out:
        _write_file(args.out, data)
    else:
        print(data.hex().upper())
    return EXIT_OK


def cmd_kat_gen(args) -> int:
    p = _param_set(args.params)
    text = pke.kat_generate(p, args.count)
    _write_file(args.out, text.encode())
    print(f"wrote {args.count} vectors to {args.out}")
    return EXIT_OK


def cmd_kat_verify(args) -> int:
    text = _read_file(getattr(args, "in")).decode()
    try:
        count = pke.kat_verify(text)
    except DecryptError as exc:
        raise CliError(str(exc), EXIT_CRYPTO)
    except ValueError as exc:
        raise CliError(f"KAT mismatch: {exc}", EXIT_VALIDATION)
    print(f"verified {count} vectors")
    return EXIT_OK


def _params_row(p: Params) -> dict:
    info = pke.validate_params(p)
    return {
        "set": p.name, "level": p.level, "q": p.q, "m": p.m, "n": p.n,
        "k": p.k, "r": p.r, "d": p.d, "l1": p.l1, "l2": p.l2,
        "kappa": p.kappa, "pk_bytes": p.pk_payload_bytes,
        "ct_bytes": p.ct_payload_bytes, "sk_bytes": p.sk_payload_bytes,
        "msg_bytes": p.msg_bytes, "decoder_radius": info["decoder_radius"],
        "gv_radius": round(info["gv_radius"], 2),
    }


def cmd_params(args) -> int:
    p = _param_set(args.set)
    row = _params_row(p)
    if args.json:
        print(json.dumps(row, indent=2))
    else:
        width = max(len(k) for k in row)
        for key, value in row.items():
            print(f"{key:<{width}}  {value}")
    return EXIT_OK


def _cost_json(rep: estimator.CostReport) -> dict:
    return {
        "attack": rep.attack, "bits": round(rep.log2_cost, 1),
        "delta": rep.delta, "a": rep.a, "l": rep.l, "v": rep.v, "b": rep.b,
        "side": rep.side,
    }


def cmd_estimate(args) -> int:
    if args.table:
        rows = estimator.table_reproduce(args.omega)
        print(json.dumps(rows, indent=2))
        return EXIT_OK
    p = _param_set(args.params)
    reports = estimator.attack_costs(p, args.omega)
    payload = {
        "set": p.name, "omega": args.omega,
        "attacks": [_cost_json(rep) for rep in reports.values()],
        "best": _cost_json(min(reports.values(), key=lambda r: r.log2_cost)),
    }
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(f"{p.name} (omega = {args.omega})")
        for rep in payload["attacks"]:
            print(f"  {rep['attack']:<15} {rep['bits']:>7.1f} bits  "
                  f"(delta={rep['delta']} a={rep['a']} l={rep['l']} "
                  f"v={rep['v']} b={rep['b']} side={rep['side']})")
    return EXIT_OK


def _parse_shape(text: str, fields: int) -> tuple[int, ...]:
    try:
        parts = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise CliError("shape must be comma-separated integers", EXIT_VALIDATION)
    if len(parts) != fields:
        raise CliError(f"shape needs {fields} comma-separated integers", EXIT_VALIDATION)
    return parts


def cmd_attack_demo(args) -> int:
    q, m, n, k, t = _parse_shape(args.shape, 5)
    shape = estimator.MinRankShape(q, m, n, k, t)
    root = Expander(_seed_arg(args.seed), b"attack-demo")
    print("trial,seed,iterations,success")
    for trial in range(args.trials):
        seed = root.child(f"trial-{trial}").read(32)
        xof = Expander(seed, b"attack-trial")
        try:
            inst = attacks.random_instance(shape, xof)
        except ValueError as exc:
            raise CliError(str(exc), EXIT_VALIDATION)
        try:
            _, iters = attacks.kernel_attack(inst, xof, max_iters=args.budget)
            success = 1
        except attacks.Exhausted as exc:
            iters, success = exc.iterations, 0
        print(f"{trial},{seed.hex().upper()},{iters},{success}")
    return EXIT_OK


def cmd_onebit_demo(args) -> int:
    p = onebit.demo_params(args.l2)
    root = Expander(_seed_arg(args.seed), b"onebit-demo")
    failures = 0
    for trial in range(args.trials):
        bit, _ = onebit.misdecode_trial(p, root.child(f"trial-{trial}").read(32), 1)
        failures += bit == 0
    predicted = 2.0 ** (p.r * p.d + 1 - p.l2)
    print(json.dumps({
        "l2": args.l2, "trials": args.trials, "misdecodes": failures,
        "rate": failures / args.trials, "predicted_rate": predicted,
    }, indent=2))
    return EXIT_OK


def cmd_reduce_demo(args) -> int:
    m, n, k, t, big_n = _parse_shape(args.shape, 5)
    shape = estimator.MslShape(2, m, n, big_n, k, t)
    root = Expander(_seed_arg(args.seed), b"reduce-demo")
    start = time.perf_counter()

    def make_oracle(seed: bytes):
        if args.oracle == "coin":
            return reduction.CoinOracle(seed)
        return reduction.RankStatisticOracle(shape, threshold=1,
                                             epsilon=args.epsilon, seed=seed)

    calib = make_oracle(root.child("calibration").read(32))
    advantages = {
        f"i0={i}": round(reduction.measure_advantage(
            calib, shape, i, root.child(f"adv-{i}"), trials=args.calibration), 3)
        for i in range(1, big_n + 1)
    }
    successes = 0
    for trial in range(args.trials):
        xof = root.child(f"trial-{trial}")
        inst = reduction.sample_dual_instance(shape, xof)
        oracle = make_oracle(root.child(f"oracle-{trial}").read(32))
        try:
            support, _ = reduction.full_reduction_demo(
                inst, oracle, xof, epsilon=args.epsilon)
        except reduction.ReductionFailure:
            continue
        successes += support.basis == inst.support.basis
    print(json.dumps({
        "shape": {"m": m, "n": n, "k": k, "t": t, "N": big_n},
        "oracle": args.oracle, "declared_epsilon": args.epsilon,
        "measured_advantage": advantages,
        "trials": args.trials, "successes": successes,
        "success_rate": successes / args.trials if args.trials else 0.0,
        "wall_time_s": round(time.perf_counter() - start, 2),
    }, indent=2))
    return EXIT_OK


def cmd_bench(args) -> int:
    p = _param_set(args.params)
    root = Expander(_seed_arg(args.seed), b"bench")
    reps = args.iterations

    def median_ms(fn) -> float:
        samples = []
        for _ in range(reps):
            t0 = time.perf_counter()
            fn()
            samples.append((time.perf_counter() - t0) * 1000)
        return statistics.median(samples)

    seed = root.read(32)
    pk, sk = pke.keygen(p, seed)
    msg = pke.random_message(p, root.child("msg"))
    ct = pke.encrypt(pk, msg, root.child("enc-seed").read(32))
    report = {
        "set": p.name, "iterations": reps,
        "keygen_ms": round(median_ms(lambda: pke.keygen(p, seed)), 2),
        "encrypt_ms": round(median_ms(
            lambda: pke.encrypt(pk, msg, root.child("enc").read(32))), 2),
        "decrypt_ms": round(median_ms(lambda: pke.decrypt(sk, ct)), 2),
    }
    print(json.dumps(report, indent=2))
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mrpke",
        description="Rank-metric public-key encryption: keys, KATs, "
                    "security estimates, attack and reduction demos.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_seed(sp):
        sp.add_argument("--seed", help="64 hex chars; omitted = OS entropy "
                                       "(echoed to stderr)")

    sp = sub.add_parser("keygen", help="generate a key pair")
    sp.add_argument("--params", required=True)
    sp.add_argument("--pk", required=True)
    sp.add_argument("--sk", required=True)
    add_seed(sp)
    sp.set_defaults(func=cmd_keygen)

    sp = sub.add_parser("encrypt", help="encrypt a message")
    sp.add_argument("--pk", required=True)
    sp.add_argument("--msg", required=True, help="message bytes in hex")
    sp.add_argument("--ct", required=True)
    add_seed(sp)
    sp.set_defaults(func=cmd_encrypt)

    sp = sub.add_parser("decrypt", help="decrypt a ciphertext")
    sp.add_argument("--sk", required=True)
    sp.add_argument("--ct", required=True)
    sp.add_argument("--out", help="write message bytes here instead of stdout hex")
    sp.set_defaults(func=cmd_decrypt)

    sp = sub.add_parser("kat-gen", help="generate known-answer test vectors")
    sp.add_argument("--params", required=True)
    sp.add_argument("--count", type=int, default=16)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_kat_gen)

    sp = sub.add_parser("kat-verify", help="verify a known-answer test file")
    sp.add_argument("--in", required=True)
    sp.set_defaults(func=cmd_kat_verify)

    sp = sub.add_parser("params", help="print a parameter-set row")
    sp.add_argument("--set", required=True)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_params)

    sp = sub.add_parser("estimate", help="attack-cost estimates")
    sp.add_argument("--params")
    sp.add_argument("--omega", type=float, default=estimator.OMEGA_DEFAULT)
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--table", action="store_true",
                    help="machine-readable rows for every registered set")
    sp.set_defaults(func=cmd_estimate)

    sp = sub.add_parser("attack-demo", help="kernel attack on planted instances")
    sp.add_argument("--shape", required=True, help="q,m,n,k,t")
    sp.add_argument("--trials", type=int, default=10)
    sp.add_argument("--budget", type=int, default=1 << 16)
    add_seed(sp)
    sp.set_defaults(func=cmd_attack_demo)

    sp = sub.add_parser("onebit-demo", help="one-bit scheme misdecode rates")
    sp.add_argument("--l2", type=int, default=6)
    sp.add_argument("--trials", type=int, default=1000)
    add_seed(sp)
    sp.set_defaults(func=cmd_onebit_demo)

    sp = sub.add_parser("reduce-demo", help="search-to-decision reduction demo")
    sp.add_argument("--shape", default="6,6,12,1,3", help="m,n,k,t,N")
    sp.add_argument("--oracle", choices=("rank", "coin"), default="rank")
    sp.add_argument("--trials", type=int, default=5)
    sp.add_argument("--epsilon", type=float, default=0.4,
                    help="oracle advantage (declared)")
    sp.add_argument("--calibration", type=int, default=100,
                    help="samples per hybrid pair for advantage measurement")
    add_seed(sp)
    sp.set_defaults(func=cmd_reduce_demo)

    sp = sub.add_parser("bench", help="median-of-N operation timings")
    sp.add_argument("--params", required=True)
    sp.add_argument("--iterations", type=int, default=31)
    add_seed(sp)
    sp.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "estimate" and not args.table and not args.params:
        print("estimate needs --params or --table", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (DecryptError, DecodeFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CRYPTO


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point.

Bit strings are written first bit first: ``--input 01`` means x = (0, 1),
whose integer encoding is 2.  Exit status is 0 on success, 1 when a check
fails (``verify``, ``validate-arch``) and 2 for malformed input.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict

from . import bitspace, construct, netcore, verify

EXIT_OK, EXIT_FAIL, EXIT_BAD_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get("SBN_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"SBN_SEED must be an integer, got {raw!r}")


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}")


def _load_kernel(path: str) -> netcore.Kernel:
    try:
        return netcore.kernel_from_dict(_load_json(path))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path} is not a kernel: {exc}")


def _load_network(path: str) -> netcore.Network:
    try:
        return netcore.network_from_dict(_load_json(path))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path} is not a network: {exc}")


def _emit(obj, out: str | None = None):
    text = json.dumps(obj, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _bits(text: str) -> tuple[int, ...]:
    if any(c not in "01" for c in text):
        raise InputError(f"not a bit string: {text!r}")
    return tuple(int(c) for c in text)


def _bitstring(v) -> str:
    return "".join(str(b) for b in v)


def cmd_plan(args) -> int:
    _emit(construct.plan(args.d, args.s, args.j).to_dict())
    return EXIT_OK


def cmd_construct(args) -> int:
    target = _load_kernel(args.target)
    if args.arch == "deep":
        j = target.d if args.j is None else args.j
        net = construct.build_deep(target, j=j, eps=args.eps, schedule=args.schedule)
    elif args.arch == "shallow-fixed":
        net = construct.build_shallow_fixed(target, args.eps, scale=args.scale)
    else:
        net = construct.build_shallow_trainable(target, args.eps, scale=args.scale, variant=args.variant)
    _emit(netcore.network_to_dict(net), args.out)
    return EXIT_OK


def cmd_eval(args) -> int:
    kernel = netcore.network_kernel(_load_network(args.network))
    _emit(netcore.kernel_to_dict(kernel), args.out)
    return EXIT_OK


def cmd_sample(args) -> int:
    net = _load_network(args.network)
    x = _bits(args.input)
    seed = _default_seed() if args.seed is None else args.seed
    counts = netcore.sample(net, x, args.n, seed)
    states = bitspace.all_states(net.s)
    _emit(
        {
            "input": args.input,
            "n": args.n,
            "seed": seed,
            "counts": {_bitstring(y): int(c) for y, c in zip(states, counts)},
        }
    )
    return EXIT_OK


def cmd_verify(args) -> int:
    net = _load_network(args.network)
    target = _load_kernel(args.target)
    if (net.d, net.s) != (target.d, target.s):
        raise InputError("network and target shapes differ")
    kernel = netcore.network_kernel(net)
    clamped = verify.clamp_to_eps(target, args.eps)
    error = verify.max_abs_error(kernel, clamped)
    bound = construct.error_bound(args.eps, net.unit_count)
    _emit(
        {
            "error": error,
            "bound": bound,
            "N": net.unit_count,
            "ok": error <= bound,
            "error_unclamped": verify.max_abs_error(kernel, target),
        }
    )
    return EXIT_OK if error <= bound else EXIT_FAIL


def cmd_table8(args) -> int:
    seed = _default_seed() if args.seed is None else args.seed
    eps_list = verify.TABLE_EPS if args.eps is None else tuple(float(e) for e in args.eps.split(","))
    rows = verify.table8(
        trials=args.trials,
        eps_list=eps_list,
        seed=seed,
        mode=args.mode,
        samples_per_input=args.samples,
        workers=args.workers,
    )
    if args.out:
        _emit([asdict(r) for r in rows], args.out)
    if args.json:
        _emit([asdict(r) for r in rows])
    else:
        print(verify.format_table(rows))
    return EXIT_OK


def cmd_graycode(args) -> int:
    if args.partial:
        b = args.b if args.b is not None else bitspace.block_exponent(args.s)
        pcs = bitspace.partial_codes(args.s, b)
        _emit(
            {
                "m": pcs.m,
                "b": pcs.b,
                "codes": [[list(v) for v in c] for c in pcs.codes],
                "properties": bitspace.validate_partial_codes(pcs),
            }
        )
    else:
        _emit({"s": args.s, "code": [list(v) for v in bitspace.sharing_code(args.s)]})
    return EXIT_OK


def cmd_validate_arch(args) -> int:
    try:
        widths = [int(w) for w in args.widths.split(",") if w.strip()]
    except ValueError:
        raise InputError(f"widths must be comma-separated integers, got {args.widths!r}")
    report = construct.validate_arch(args.d, args.s, widths, args.params)
    _emit(report.to_dict())
    return EXIT_OK if report.ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sbnet",
        description=(
            "Construct and check sigmoid belief networks that approximate Markov kernels. "
            "Bit strings are first-bit-first: '01' is x=(0,1), integer 2."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="architecture statistics for (d, s, j)")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--j", type=int, required=True)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("construct", help="synthesize a network for a target kernel")
    p.add_argument("--target", required=True, help="kernel JSON")
    p.add_argument("--arch", choices=["shallow-fixed", "shallow-trainable", "deep"], required=True)
    p.add_argument("--j", type=int, default=None, help="shape coefficient (deep; default d)")
    p.add_argument("--schedule", choices=["simplified", "overlaid"], default="simplified")
    p.add_argument("--variant", choices=["literal", "anchored"], default=None)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--scale", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("eval", help="exact kernel of a network")
    p.add_argument("--network", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sample", help="output counts from ancestral sampling")
    p.add_argument("--network", required=True)
    p.add_argument("--input", required=True, help="first-bit-first bit string")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=None, help="default: $SBN_SEED or 0")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("verify", help="compare a network with a target against the error bound")
    p.add_argument("--network", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("table8", help="random-target experiment for d = s = 2, j = 2")
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--seed", type=int, default=None, help="default: $SBN_SEED or 0")
    p.add_argument("--mode", choices=["exact", "sampled"], default="exact")
    p.add_argument("--samples", type=int, default=25_000, help="samples per input (sampled mode)")
    p.add_argument("--eps", default=None, help="comma-separated eps values")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--json", action="store_true", help="print JSON rows instead of the table")
    p.add_argument("--out", default=None, help="also write JSON rows to this file")
    p.set_defaults(func=cmd_table8)

    p = sub.add_parser("graycode", help="sharing code or partial code set")
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--partial", action="store_true")
    p.add_argument("--b", type=int, default=None)
    p.set_defaults(func=cmd_graycode)

    p = sub.add_parser("validate-arch", help="necessary conditions for universal approximation")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--widths", required=True, help="comma-separated hidden widths")
    p.add_argument("--params", type=int, default=None)
    p.set_defaults(func=cmd_validate_arch)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ValueError, bitspace.CodeSearchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Subcommands: params, exchange, attack, oracle, bench.  All integers on the
command line and in files are decimal strings.  Exit codes: 0 success,
1 attack found nothing, 2 usage/validation error, 3 resource cap hit.
"""

from __future__ import annotations

import argparse
import re
import sys

from . import attack as attack_mod
from . import harness, protocol
from .errors import ConstraintViolated, SearchSpaceExceeded, ToolkitError

EXIT_OK = 0
EXIT_NO_CANDIDATES = 1
EXIT_USAGE = 2
EXIT_RESOURCE_CAP = 3


def decimal_int(text: str) -> int:
    if not re.fullmatch(r"[0-9]+", text):
        raise argparse.ArgumentTypeError(f"expected a decimal integer, got {text!r}")
    return int(text)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="truncrack",
        description="Truncated-multiplication key exchange and the lattice attack on it.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_params = sub.add_parser("params", help="generate and validate a parameter file")
    p_params.add_argument("--l", type=decimal_int, required=True)
    p_params.add_argument("--m", type=decimal_int, required=True)
    p_params.add_argument("--q", type=decimal_int, required=True)
    p_params.add_argument("--r", type=decimal_int, required=True)
    p_params.add_argument("--seed", type=decimal_int)
    p_params.add_argument("--out", help="write the parameter file here (default: stdout)")

    p_exchange = sub.add_parser("exchange", help="run one seeded honest exchange")
    p_exchange.add_argument("--params", required=True)
    p_exchange.add_argument("--seed", type=decimal_int, required=True)

    p_attack = sub.add_parser("attack", help="recover token preimages and keys")
    p_attack.add_argument("--params", required=True)
    p_attack.add_argument("--token", type=decimal_int, required=True)
    p_attack.add_argument("--token-scaled", action="store_true",
                          help="the token is the pre-division value 2^q*u")
    p_attack.add_argument("--m", type=decimal_int,
                          help="secret bit length (default: from the parameter file)")
    p_attack.add_argument("--other-token", type=decimal_int,
                          help="peer token; derive the shared key per candidate")

    p_oracle = sub.add_parser("oracle", help="brute-force token preimages (small m only)")
    p_oracle.add_argument("--z", type=decimal_int, required=True)
    p_oracle.add_argument("--p", type=decimal_int, required=True)
    p_oracle.add_argument("--q", type=decimal_int, required=True)
    p_oracle.add_argument("--u", type=decimal_int, required=True)
    p_oracle.add_argument("--m", type=decimal_int, required=True)

    p_bench = sub.add_parser("bench", help="run seeded trials and write a CSV")
    p_bench.add_argument("--l", type=decimal_int, required=True)
    p_bench.add_argument("--m", type=decimal_int, required=True)
    p_bench.add_argument("--q", type=decimal_int, required=True)
    p_bench.add_argument("--r", type=decimal_int, required=True)
    p_bench.add_argument("--trials", type=decimal_int, required=True)
    p_bench.add_argument("--seed", type=decimal_int, required=True)
    p_bench.add_argument("--out", required=True)
    p_bench.add_argument("--mode", choices=harness.MODES, default="attack")

    return parser


def _cmd_params(args) -> int:
    if args.l < 1:
        raise ConstraintViolated("l>=1", f"l={args.l}")
    derived_p = args.l + args.m - args.q
    probe = protocol.ProtocolParams(
        l=args.l, m=args.m, p=derived_p, q=args.q, r=args.r, z=1 << (args.l - 1)
    )
    protocol.validate_params(probe)
    if args.seed is None:
        print("error: --seed is required to generate z", file=sys.stderr)
        return EXIT_USAGE
    params = protocol.gen_params(args.seed, args.l, args.m, args.q, args.r)
    label = protocol.classify(params)
    if args.out:
        protocol.save_params(params, args.out)
        print(f"p={params.p} class={label}")
    else:
        sys.stdout.write(protocol.dump_params(params))
        print(f"p={params.p} class={label}", file=sys.stderr)
    return EXIT_OK


def _cmd_exchange(args) -> int:
    params = protocol.load_params(args.params)
    transcript = protocol.exchange(args.seed, params)
    print(f"x={transcript.x}")
    print(f"y={transcript.y}")
    print(f"U={transcript.u}")
    print(f"V={transcript.v}")
    print(f"W_a={transcript.w_a}")
    print(f"W_b={transcript.w_b}")
    print(f"agree={1 if transcript.agree else 0}")
    return EXIT_OK


def _cmd_attack(args) -> int:
    params = protocol.load_params(args.params)
    m = args.m if args.m is not None else params.m
    inp = attack_mod.AttackInput(
        z=params.z, p=params.p, q=params.q, m=m,
        token=args.token, token_is_scaled=args.token_scaled,
    )
    result = attack_mod.recover_preimages(inp)
    for x, y in result.candidates:
        suffix = " flag=nonpositive" if x < 1 else ""
        print(f"x={x} y={y}{suffix}")
    print(f"unique={1 if result.unique else 0}")
    if not result.candidates:
        print("no candidates", file=sys.stderr)
        return EXIT_NO_CANDIDATES
    if args.other_token is not None:
        keys = attack_mod.recover_shared_key(inp, args.other_token, params.r, result=result)
        counts: dict[int, int] = {}
        for _, key in keys:
            counts[key] = counts.get(key, 0) + 1
        for key in sorted(counts):
            print(f"key={key} candidates={counts[key]}")
    return EXIT_OK


def _cmd_oracle(args) -> int:
    for x in harness.brute_force_preimages(args.z, args.p, args.q, args.u, args.m):
        print(x)
    return EXIT_OK


def _cmd_bench(args) -> int:
    cfg = harness.TrialConfig(
        seed_base=args.seed, trials=args.trials,
        l=args.l, m=args.m, q=args.q, r=args.r, mode=args.mode,
    )
    records = harness.run_trials(cfg)
    harness.write_csv(records, args.out)
    print(f"wrote {len(records)} records to {args.out}")
    return EXIT_OK


_COMMANDS = {
    "params": _cmd_params,
    "exchange": _cmd_exchange,
    "attack": _cmd_attack,
    "oracle": _cmd_oracle,
    "bench": _cmd_bench,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except ConstraintViolated as exc:
        print(f"error: constraint violated: {exc.name}", file=sys.stderr)
        return EXIT_USAGE
    except SearchSpaceExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE_CAP
    except (ToolkitError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def console_main() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    console_main()

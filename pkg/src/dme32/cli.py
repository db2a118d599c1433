"""Command-line front end: ``dme32 <subcommand> ...``."""

from __future__ import annotations

import argparse
import sys

from . import io
from .attack import AttackError, VerificationFailed, full_attack
from .dme import DMEError, ZeroBlock, decrypt, derive_public_key, eval_public, gen_system_params, keygen
from .fields import FieldError
from .polyalg import DegenerateSystem

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_DOMAIN = 3
EXIT_VERIFY = 4
EXIT_IO = 5


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        io.write_text(out, text)


def _load_params(args):
    if not args.params:
        raise CliError("--params is required", EXIT_PARSE)
    return io.parse_params(io.read_text(args.params))


def _single(values, flag: str) -> str:
    if not values or len(values) != 1:
        raise CliError(f"exactly one {flag} is required", EXIT_PARSE)
    return values[0]


def cmd_gen_params(args) -> int:
    if args.preset:
        params = gen_system_params(48, preset=args.preset)
    else:
        if args.width is None or args.seed is None:
            raise CliError("gen-params needs --width and --seed (or --preset nist)", EXIT_PARSE)
        params = gen_system_params(args.width, args.seed)
    _emit(io.format_params(params), args.out)
    return EXIT_OK


def cmd_keygen(args) -> int:
    params = _load_params(args)
    if args.seed is None:
        raise CliError("keygen needs --seed", EXIT_PARSE)
    _emit(io.format_private_key(keygen(params, args.seed), params), args.out)
    return EXIT_OK


def cmd_pubkey(args) -> int:
    params = _load_params(args)
    sk = io.parse_private_key(io.read_text(_single(args.key, "--key")), params)
    _emit(io.format_public_key(derive_public_key(sk, params)), args.out)
    return EXIT_OK


def cmd_encrypt(args) -> int:
    params = _load_params(args)
    if not args.pub:
        raise CliError("encrypt needs --pub", EXIT_PARSE)
    pk = io.parse_public_key(io.read_text(args.pub), params)
    m = io.parse_vector(io.read_text(_require(args.inp, "--in")), params.w)
    for k in range(3):
        if not m[2 * k] and not m[2 * k + 1]:
            raise ZeroBlock(f"plaintext block {k + 1} is zero")
    _emit(io.format_vector(eval_public(pk, m), params.w), args.out)
    return EXIT_OK


def cmd_decrypt(args) -> int:
    params = _load_params(args)
    sk = io.parse_private_key(io.read_text(_single(args.key, "--key")), params)
    ct = io.parse_vector(io.read_text(_require(args.inp, "--in")), params.w)
    _emit(io.format_vector(decrypt(sk, params, ct), params.w), args.out)
    return EXIT_OK


def cmd_attack(args) -> int:
    params = _load_params(args)
    if not args.pub:
        raise CliError("attack needs --pub", EXIT_PARSE)
    pk = io.parse_public_key(io.read_text(args.pub), params)
    sk, report = full_attack(pk, workers=args.workers)
    _emit(io.format_private_key(sk, params), args.out)
    if args.report:
        io.write_text(args.report, report.summary() + "\n")
    print(report.line(), file=sys.stderr)
    return EXIT_OK


def cmd_verify_equiv(args) -> int:
    params = _load_params(args)
    keys = args.key or []
    pks = [derive_public_key(io.parse_private_key(io.read_text(k), params), params) for k in keys]
    if args.pub:
        pks.append(io.parse_public_key(io.read_text(args.pub), params))
    if len(pks) != 2:
        raise CliError("verify-equiv compares two keys: give --key twice, or --key and --pub", EXIT_PARSE)
    same = pks[0] == pks[1]
    print("equivalent" if same else "different")
    return EXIT_OK if same else EXIT_VERIFY


def _require(value, flag: str):
    if value is None:
        raise CliError(f"{flag} is required", EXIT_PARSE)
    return value


HELP = {
    "gen-params": "write a parameter file (random tower and exponents, or the NIST preset)",
    "keygen": "write a random private key",
    "pubkey": "expand a private key into its public key",
    "encrypt": "encrypt a 6-line plaintext with a public key",
    "decrypt": "decrypt a 6-line ciphertext with a private key",
    "attack": "recover an equivalent private key from a public key",
    "verify-equiv": "check that two keys give the same public key",
}

COMMANDS = {
    "gen-params": cmd_gen_params,
    "keygen": cmd_keygen,
    "pubkey": cmd_pubkey,
    "encrypt": cmd_encrypt,
    "decrypt": cmd_decrypt,
    "attack": cmd_attack,
    "verify-equiv": cmd_verify_equiv,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dme32", description="DME-(3,2,q) toolkit and key-recovery attack")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=HELP[name])
        p.add_argument("--params", help="parameter file")
        p.add_argument("--key", action="append", help="private key file (repeatable for verify-equiv)")
        p.add_argument("--pub", help="public key file")
        p.add_argument("--in", dest="inp", help="input message file")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--seed", type=int)
        p.add_argument("-w", "--width", type=int)
        p.add_argument("--preset", choices=["nist"])
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--report", help="attack: write a text report here")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except io.ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except VerificationFailed as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (AttackError, DMEError, FieldError, DegenerateSystem, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: generate, census, decode, simulate."""

from __future__ import annotations

import argparse
import io
import logging
import os
import sys
import tempfile
from collections import Counter
from fractions import Fraction
from pathlib import Path

import numpy as np

from ldpc_vfap.code_model import read_alist, write_alist
from ldpc_vfap.construction import ConstructionSpec, irregular_profile, peg_construct
from ldpc_vfap.cycles import DEFAULT_CAP, census
from ldpc_vfap.decoder import DEFAULT_CLAMP, DecoderConfig, Variant, decode, reweight_for
from ldpc_vfap.harness import StopRule, run_sweep, write_csv

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG = 0, 1, 2


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _variant_list(text: str) -> list[Variant]:
    try:
        return [Variant.parse(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"unknown decoder in {text!r}; use bp, urw, vfap") from None


def _variant(text: str) -> Variant:
    try:
        return Variant.parse(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"unknown decoder {text!r}; use bp, urw, vfap") from None


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    p = _Parser(prog="ldpc-vfap", description=__doc__, formatter_class=fmt)
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="build a PEG parity-check matrix and write it as alist", formatter_class=fmt)
    g.add_argument("--n", type=int, default=500, help="code length (variable nodes)")
    g.add_argument("--m", type=int, default=None, help="check nodes (default n/2)")
    g.add_argument("--profile", choices=("regular", "irregular"), default="regular", help="variable degree profile")
    g.add_argument("--dv", type=int, default=3, help="variable degree for the regular profile")
    g.add_argument("--seed", type=int, default=0, help="construction seed")
    g.add_argument("--out", required=True, help="output alist path")

    c = sub.add_parser("census", help="girth and girth-cycle statistics of an alist code", formatter_class=fmt)
    c.add_argument("--alist", required=True, help="parity-check matrix in alist format")
    c.add_argument("--cap", type=int, default=DEFAULT_CAP, help="longest cycle length searched")
    c.add_argument("--csv", default=None, help="write per-check counts (check_index,s_i) here")

    def decoder_flags(sp):
        sp.add_argument("--max-iter", type=int, default=60, help="iteration limit per frame")
        sp.add_argument("--clamp", type=float, default=DEFAULT_CLAMP, help="LLR magnitude clamp")
        sp.add_argument("--rho-u", type=float, default=None, help="URW weight (default 2/mean variable degree)")
        sp.add_argument("--rho-v", type=float, default=None, help="VFAP weight (default 2/mean variable degree)")
        sp.add_argument("--cap", type=int, default=DEFAULT_CAP, help="cycle search cap for VFAP")

    d = sub.add_parser("decode", help="decode one received vector", formatter_class=fmt)
    d.add_argument("--alist", required=True, help="parity-check matrix in alist format")
    d.add_argument("--y", default="-", help="file of whitespace-separated received values ('-' = stdin)")
    d.add_argument("--sigma2", type=float, required=True, help="noise variance")
    d.add_argument("--variant", type=_variant, default=Variant.VFAP_BP, help="bp, urw or vfap")
    decoder_flags(d)

    s = sub.add_parser("simulate", help="Monte Carlo sweep, CSV output", formatter_class=fmt)
    s.add_argument("--alist", required=True, help="parity-check matrix in alist format")
    s.add_argument("--decoders", type=_variant_list, default="bp,urw,vfap", help="comma-separated decoders")
    s.add_argument("--snr", type=_float_list, default="2,4,6", help="Eb/N0 points in dB")
    s.add_argument("--trials", type=int, default=1000, help="frame cap per point")
    s.add_argument("--min-frame-errors", type=int, default=100, help="stop a point after this many frame errors (0 = never)")
    s.add_argument("--seed", type=int, required=True, help="master noise seed")
    s.add_argument("--rate", type=float, default=None, help="code rate for the SNR conversion (default 1 - m/n)")
    s.add_argument("--random-messages", action="store_true", help="send encoded random messages instead of the all-zero word")
    s.add_argument("--code-id", default=None, help="label for the code_id column (default: alist file stem)")
    s.add_argument("--out", default="-", help="CSV path ('-' = stdout)")
    decoder_flags(s)
    return p


def _validate(args) -> None:
    def need(cond, msg):
        if not cond:
            raise ConfigError(f"ldpc-vfap {args.command}: {msg}")

    if args.command == "generate":
        m = args.m if args.m is not None else args.n // 2
        need(args.n > m >= 1, "need n > m >= 1")
        need(args.dv >= 1, "--dv must be >= 1")
    if args.command in ("census", "decode", "simulate"):
        need(args.cap >= 4 and args.cap % 2 == 0, "--cap must be even and >= 4")
        need(Path(args.alist).is_file(), f"alist file not found: {args.alist}")
    if args.command in ("decode", "simulate"):
        need(args.max_iter >= 1, "--max-iter must be >= 1")
        need(args.clamp > 0, "--clamp must be positive")
        for flag, val in (("--rho-u", args.rho_u), ("--rho-v", args.rho_v)):
            need(val is None or 0 < val <= 1, f"{flag} must lie in (0, 1]")
    if args.command == "decode":
        need(args.sigma2 > 0, "--sigma2 must be positive")
        need(args.y == "-" or Path(args.y).is_file(), f"received-vector file not found: {args.y}")
    if args.command == "simulate":
        need(args.trials >= 1, "--trials must be >= 1")
        need(args.min_frame_errors >= 0, "--min-frame-errors must be >= 0")
        need(len(args.snr) > 0, "--snr needs at least one value")
        need(len(args.decoders) > 0, "--decoders needs at least one value")
        need(args.rate is None or 0 < args.rate <= 1, "--rate must lie in (0, 1]")


def _atomic_write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or Path("."), prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _load(path: str):
    return read_alist(Path(path).read_text(encoding="utf-8"))


def _fmt_mu(mu: Fraction) -> str:
    return str(mu.numerator) if mu.denominator == 1 else f"{float(mu):.10g}"


def cmd_generate(args) -> None:
    if args.profile == "regular":
        m = args.m if args.m is not None else args.n // 2
        spec = ConstructionSpec.regular(args.n, m, args.dv, args.seed)
    else:
        spec = ConstructionSpec.from_profile(args.n, irregular_profile(), args.seed)
        if args.m is not None and args.m != spec.m:
            spec = ConstructionSpec(args.n, args.m, spec.var_degrees, args.seed)
    _atomic_write(args.out, write_alist(peg_construct(spec)))


def cmd_census(args) -> None:
    h = _load(args.alist)
    c = census(h, args.cap)
    if c.acyclic:
        print(f"girth=none (no cycles up to {c.cap})")
        if args.csv:
            _atomic_write(args.csv, "check_index,s_i\n")
        return
    s = np.array(c.per_check)
    print(f"girth={c.girth}")
    print(f"total={c.total}")
    print(f"mu={_fmt_mu(c.mu_g)}")
    print(f"s_min={s.min()} s_max={s.max()}")
    hist = Counter(c.per_check)
    print("histogram=" + " ".join(f"{k}:{hist[k]}" for k in sorted(hist)))
    if args.csv:
        _atomic_write(args.csv, "check_index,s_i\n" + "".join(f"{i},{v}\n" for i, v in enumerate(c.per_check)))


def cmd_decode(args) -> None:
    h = _load(args.alist)
    text = sys.stdin.read() if args.y == "-" else Path(args.y).read_text(encoding="utf-8")
    try:
        y = np.array([float(t) for t in text.split()])
    except ValueError:
        raise ConfigError("ldpc-vfap decode: received vector must contain only numbers") from None
    if len(y) != h.n:
        raise ConfigError(f"ldpc-vfap decode: received vector has {len(y)} values, code length is {h.n}")
    cfg = DecoderConfig(args.variant, args.max_iter, args.clamp, args.rho_u, args.rho_v)
    c = census(h, args.cap) if args.variant is Variant.VFAP_BP else None
    r = decode(h, y, args.sigma2, cfg, reweight_for(h, cfg, c, args.cap))
    print("x_hat=" + "".join(str(int(b)) for b in r.codeword))
    print(f"converged={'true' if r.converged else 'false'}")
    print(f"iterations={r.iterations_used}")


def cmd_simulate(args) -> None:
    h = _load(args.alist)
    c = census(h, args.cap) if Variant.VFAP_BP in args.decoders else None
    stop = StopRule(args.trials, args.min_frame_errors or None)
    records = run_sweep(
        h,
        c,
        args.decoders,
        args.snr,
        args.max_iter,
        args.trials,
        args.seed,
        stop,
        rate=args.rate,
        random_messages=args.random_messages,
        rho_uniform=args.rho_u,
        rho_v_override=args.rho_v,
        llr_clamp=args.clamp,
        code_id=args.code_id if args.code_id is not None else Path(args.alist).stem,
    )
    buf = io.StringIO()
    write_csv(records, buf)
    _atomic_write(args.out, buf.getvalue())


COMMANDS = {"generate": cmd_generate, "census": cmd_census, "decode": cmd_decode, "simulate": cmd_simulate}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _validate(args)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
        COMMANDS[args.command](args)
    except ConfigError as exc:
        print(str(exc).splitlines()[0], file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - any failure after validation is a runtime error
        print(f"ldpc-vfap: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

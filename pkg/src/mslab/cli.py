"""Command-line entry point: ``mslab <subcommand> ...``.

Exit codes: 0 success, 1 computation error, 2 usage error.  Output files
are written atomically, so a failing run never leaves a partial file.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from . import (
    distributions as dist,
    lossless_codec,
    markov_empirical,
    multiset_core,
    order_stats,
    quantizer,
    rd_bounds,
    universal_codec,
)
from .bitstream import Bitstream


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    seed: int | None
    out: str | None
    format: str | None


# ---------------------------------------------------------------------------
# output helpers


def _render(records: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(records, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    if records:
        w = csv.DictWriter(buf, fieldnames=list(records[0]), lineterminator="\n")
        w.writeheader()
        for r in records:
            w.writerow({k: _fmt_cell(v) for k, v in r.items()})
    return buf.getvalue()


def _fmt_cell(v: Any) -> Any:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if v is None:
        return ""
    return v


def _write(cfg: RunConfig, data: str | bytes) -> None:
    if cfg.out is None:
        if isinstance(data, bytes):
            sys.stdout.buffer.write(data)
        else:
            sys.stdout.write(data)
        return
    directory = os.path.dirname(os.path.abspath(cfg.out))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".mslab-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data if isinstance(data, bytes) else data.encode("utf-8"))
        os.replace(tmp, cfg.out)
    except BaseException:
        os.unlink(tmp)
        raise


def _emit(cfg: RunConfig, records: list[dict], scalar: Any = None) -> None:
    """Scalars print bare unless a format is requested; tables default to CSV."""
    if scalar is not None and cfg.format is None:
        _write(cfg, f"{scalar}\n")
    else:
        _write(cfg, _render(records, cfg.format or "csv"))


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise UsageError(message)


def _need_seed(cfg: RunConfig) -> int:
    _require(cfg.seed is not None, "this subcommand is randomized and needs an explicit --seed")
    return cfg.seed


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"expected integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"expected numbers, got {text!r}") from None


def _read_letters(args) -> list[int]:
    if args.letters is not None:
        return _int_list(args.letters)
    if args.input is not None:
        with open(args.input, encoding="utf-8") as fh:
            return _int_list(fh.read())
    return _int_list(sys.stdin.read())


def _read_stream(args) -> Bitstream:
    if args.bits is not None:
        return Bitstream.from_bits(args.bits.strip())
    if args.input is not None:
        with open(args.input, "rb") as fh:
            return Bitstream.from_bytes(fh.read())
    return Bitstream.from_bytes(sys.stdin.buffer.read())


def _emit_stream(cfg: RunConfig, b: Bitstream, text: bool) -> None:
    """Wire format (u32 bit length + payload) unless ``--text`` asks for 0/1."""
    _write(cfg, b.to_str() + "\n" if text else b.to_bytes())


def _parent(text: str | None, discrete: bool | None = None):
    _require(text is not None, "missing --parent")
    try:
        p = dist.load_parent(text)
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        raise UsageError(f"bad parent specification: {exc}") from None
    if discrete is True:
        _require(isinstance(p, dist.DiscretePMF), "this subcommand needs a discrete parent")
    if discrete is False:
        _require(isinstance(p, dist.ContinuousParent), "this subcommand needs a continuous parent")
    return p


# ---------------------------------------------------------------------------
# subcommands


def cmd_type_count(cfg, args):
    _require(args.n >= 0 and args.alphabet >= 1, "need --n >= 0 and --alphabet >= 1")
    c = multiset_core.type_count(args.n, args.alphabet)
    _emit(cfg, [{"n": args.n, "alphabet": args.alphabet, "types": c}], scalar=c)


def cmd_entropy(cfg, args):
    p = _parent(args.parent, discrete=True)
    _require(args.n >= 1, "need --n >= 1")
    if args.mode == "asymptotic":
        _require(p.alphabet_size == 2, "the asymptotic form is for binary parents")
        h_ms = multiset_core.binomial_entropy_asymptotic(args.n, p.probs[0])
    else:
        h_ms = multiset_core.multiset_entropy_exact(args.n, p)
    h_seq = args.n * p.entropy()
    _emit(cfg, [{"n": args.n, "h_sequence": h_seq, "h_multiset": h_ms, "h_order": h_seq - h_ms}], scalar=h_ms)


def _code_for(args, n: int, A: int):
    if args.codec == "huffman":
        p = _parent(args.parent, discrete=True)
        _require(p.alphabet_size == A, "parent alphabet differs from --alphabet")
        return lossless_codec.build_optimal_code(n, p)
    return None


def cmd_encode(cfg, args):
    letters = _read_letters(args)
    _require(args.alphabet >= 1, "need --alphabet >= 1")
    t = multiset_core.type_of(letters, args.alphabet)
    _require(args.n is None or args.n == t.n, f"--n {args.n} but {t.n} letters were given")
    code = _code_for(args, t.n, args.alphabet)
    b = lossless_codec.enum_encode(t) if code is None else lossless_codec.encode_multiset(letters, code)
    _emit_stream(cfg, b, args.text)


def cmd_decode(cfg, args):
    _require(args.n >= 0 and args.alphabet >= 1, "need --n >= 0 and --alphabet >= 1")
    b = _read_stream(args)
    code = _code_for(args, args.n, args.alphabet)
    t = lossless_codec.enum_decode(b, args.n, args.alphabet) if code is None else lossless_codec.decode_multiset(b, code)
    _emit(cfg, [{"letter": i + 1, "count": k} for i, k in enumerate(t.counts)], scalar=" ".join(map(str, t.counts)))


def cmd_universal_encode(cfg, args):
    _emit_stream(cfg, universal_codec.universal_encode(_read_letters(args)), args.text)


def cmd_universal_decode(cfg, args):
    vals = universal_codec.universal_decode(_read_stream(args))
    _emit(cfg, [{"letter": v} for v in vals], scalar=" ".join(map(str, vals)))


def cmd_histogram(cfg, args):
    if args.decode is not None:
        counts = universal_codec.histogram_decode(args.decode.strip())
        _emit(cfg, [{"bin": i + 1, "count": k} for i, k in enumerate(counts)], scalar=" ".join(map(str, counts)))
    else:
        b = universal_codec.histogram_encode(_int_list(args.encode))
        _emit(cfg, [{"bits": b.to_str()}], scalar=b.to_str())


def cmd_redundancy(cfg, args):
    _require(args.alphabet in (2, 3), "finite-n redundancy supports --alphabet 2 or 3")
    grid = list(args.n or []) + (_parse_grid(args.n_grid) if args.n_grid else [])
    _require(bool(grid), "give --n or --n-grid")
    recs = []
    for n in grid:
        _require(n >= 2, "need n >= 2")
        h, hc, v = universal_codec.redundancy_terms_empirical(args.alphabet, n)
        recs.append({"n": n, "H_types_bits": h, "H_cond_bits": hc, "normalized_redundancy": v})
    _emit(cfg, recs)


def _parse_grid(text: str) -> list[int]:
    """``2^8:2^16`` is every power of two in range; ``a:b`` every integer."""
    try:
        lo, hi = text.split(":")
        if "^" in lo:
            base, e0 = (int(t) for t in lo.split("^"))
            base1, e1 = (int(t) for t in hi.split("^"))
            if base1 != base:
                raise ValueError
            return [base**e for e in range(e0, e1 + 1)]
        return list(range(int(lo), int(hi) + 1))
    except ValueError:
        raise UsageError(f"bad grid {text!r}; use e.g. 2^8:2^16") from None


def cmd_oszero(cfg, args):
    _require(args.n_max >= 1, "need --n-max >= 1")
    parents = dist.UNIT_VARIANCE_PARENTS if args.parent is None else (_parent(args.parent, discrete=False),)
    recs = []
    for p in parents:
        for n, d in order_stats.zero_rate_curve(p, args.n_max).points:
            recs.append({"parent": p.label, "n": n, "D_n0": d})
    _emit(cfg, recs)


def cmd_os_entropy(cfg, args):
    p = _parent(args.parent, discrete=False)
    K = args.K
    _require(K >= 1, "need --K >= 1")
    recs = []
    for r in range(1, K + 1):
        recs.append({
            "r": r,
            "marginal_entropy": order_stats.os_marginal_entropy(p, K, r),
            "conditional_entropy": order_stats.os_conditional_entropy(p, K, r - 1) if r > 1 else None,
        })
    summary = {
        "h_parent": dist.differential_entropy(p),
        "h_avg_marginal": order_stats.os_avg_marginal_entropy(p, K),
        "h_joint": order_stats.os_joint_entropy(p, K),
    }
    if cfg.format == "json":
        _write(cfg, json.dumps({"K": K, **summary, "ranks": recs}, indent=2) + "\n")
    else:
        _emit(cfg, [{**rec, **summary} for rec in recs])


def cmd_quantize(cfg, args):
    if args.action == "ledger":
        _require(args.K >= 1, "need --K >= 1")
        _emit(cfg, scheme_records(args.K))
        return
    if args.action == "design":
        _require(args.rate >= 0, "need --rate >= 0")
        if args.kind == "scalar":
            res = quantizer.lloyd_max_parent(_parent(args.parent, discrete=False), args.rate)
            obj = {**res.codebook.to_json(), "distortion": res.distortion}
        else:
            _require(args.rate <= 3, "the sorted-pair design supports --rate 0..3")
            res = quantizer.os_quantizer_2d_gaussian(args.rate, n_samples=args.samples, seed=_need_seed(cfg))
            obj = {**res.codebook.to_json(), "distortion_total": res.distortion_total,
                   "distortion_per_letter": res.distortion_per_letter}
        _write(cfg, json.dumps(obj, indent=2) + "\n")
        return
    # apply
    _require(args.codebook is not None and args.input is not None, "apply needs --codebook and --input")
    with open(args.codebook, encoding="utf-8") as fh:
        cb = quantizer.Codebook.from_json(json.load(fh))
    with open(args.input, encoding="utf-8") as fh:
        rows = [_float_list(line) for line in fh if line.strip()]
    _require(all(len(r) == cb.K for r in rows), f"every input row needs {cb.K} numbers")
    x = np.array(rows, dtype=float).reshape(-1, cb.K)
    idx = cb.assign(x)
    xs = np.sort(x, axis=1) if cb.space == "ordered" else x
    err = ((xs - cb.points[idx]) ** 2).sum(axis=1)
    _emit(cfg, [{"row": i + 1, "index": int(j), "squared_error": float(e)} for i, (j, e) in enumerate(zip(idx, err))])


def scheme_records(K: int) -> list[dict]:
    return quantizer.scheme_ledger(K).to_records()


def cmd_bounds(cfg, args):
    _require(args.points >= 2, "need --points >= 2")
    if args.curve in ("slb", "sub"):
        curve = rd_bounds.bound_curve(args.curve, args.points)
    else:
        pmf = _float_list(args.pmf)
        try:
            pmf = rd_bounds._check_pmf(pmf)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if args.curve == "erokhin":
            curve = rd_bounds.erokhin_rd(pmf, args.points)
        else:
            betas = [float(b) for b in _linspace(0.05, args.beta_max, args.points)]
            curve = rd_bounds.blahut_arimoto(pmf, rd_bounds.error_frequency_matrix(len(pmf)), betas)
    _emit(cfg, curve.to_records())


def _linspace(a: float, b: float, n: int) -> list[float]:
    return [a + (b - a) * i / (n - 1) for i in range(n)]


def cmd_budget(cfg, args):
    _require(args.N >= 1 and args.R >= 0, "need --N >= 1 and --R >= 0")
    recs = []
    for n in args.n:
        _require(n >= 1 and n % args.N == 0, f"n={n} must be positive and divisible by N")
        bits = rd_bounds.lossy_logn_budget(n, args.N, args.R)
        recs.append({"n": n, "N": args.N, "R": args.R, "bits": bits, "bits_per_log2n": bits / math.log2(n) if n > 1 else None})
    _emit(cfg, recs)


def cmd_table(cfg, args):
    grams = _int_list(args.grams)
    _require(all(k >= 1 for k in grams), "gram lengths must be positive")
    if args.kgram_counts:
        _require(1 <= args.n_max <= 20, "need 1 <= --n-max <= 20")
        rows = markov_empirical.kgram_count_table(args.n_max, grams, args.alphabet or 2)
        _emit(cfg, [{"n": r.n, "k": r.k, "distinct": r.distinct, "log2_distinct": r.log2_distinct,
                     "log2_bound": r.log2_bound} for r in rows])
        return
    _require(args.corpus is not None, "table needs --corpus (or --kgram-counts)")
    corpus = markov_empirical.read_corpus(args.corpus)
    table = markov_empirical.empirical_entropy_table(corpus, grams, args.windowing, args.alphabet)
    _emit(cfg, table.to_records())


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="seed for randomized subcommands")
    common.add_argument("--out", default=None, help="output path (written atomically)")
    common.add_argument("--format", choices=("csv", "json"), default=None)

    ap = argparse.ArgumentParser(prog="mslab", description="Multiset coding and order-statistics toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)
        return p

    p = add("type-count", cmd_type_count, "number of types of n letters")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alphabet", type=int, required=True)

    p = add("entropy", cmd_entropy, "multiset entropy of n i.i.d. letters")
    p.add_argument("--parent", required=True, help='JSON, e.g. {"family":"discrete","params":{"probs":[0.5,0.5]}}')
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mode", choices=("exact", "asymptotic"), default="exact")

    for name, fn in (("encode", cmd_encode), ("decode", cmd_decode)):
        p = add(name, fn, f"{name} a multiset with the enumerative or Huffman type code")
        p.add_argument("--alphabet", type=int, required=True)
        p.add_argument("--codec", choices=("enum", "huffman"), default="enum")
        p.add_argument("--parent", default=None, help="discrete parent (Huffman code only)")
        p.add_argument("--input", default=None, help="input file; default stdin")
        p.add_argument("--n", type=int, required=name == "decode", help="number of letters")
        if name == "encode":
            p.add_argument("--letters", default=None, help="letters 1..|X|, space or comma separated")
            p.add_argument("--text", action="store_true", help="print the bits as 0/1 text")
        else:
            p.add_argument("--bits", default=None, help="0/1 text instead of a binary stream")

    p = add("universal-encode", cmd_universal_encode, "universal code for a multiset of positive integers")
    p.add_argument("--letters", default=None)
    p.add_argument("--input", default=None, help="input file; default stdin")
    p.add_argument("--text", action="store_true", help="print the bits as 0/1 text")
    p = add("universal-decode", cmd_universal_decode, "decode a universal multiset stream")
    p.add_argument("--bits", default=None, help="0/1 text instead of a binary stream")
    p.add_argument("--input", default=None, help="input file; default stdin")

    p = add("histogram", cmd_histogram, "run-length histogram code")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--decode", metavar="BITS")
    g.add_argument("--encode", metavar="COUNTS")

    p = add("redundancy", cmd_redundancy, "log-blocklength normalized redundancy")
    p.add_argument("--alphabet", type=int, default=2)
    p.add_argument("--n", type=int, nargs="+", default=None)
    p.add_argument("--n-grid", default=None, help="e.g. 2^8:2^16")

    p = add("oszero", cmd_oszero, "zero-rate distortion D_n(0) curves")
    p.add_argument("--parent", default=None, help="continuous parent JSON; default: the three unit-variance parents")
    p.add_argument("--n-max", type=int, default=128)

    p = add("os-entropy", cmd_os_entropy, "differential entropies of order statistics")
    p.add_argument("--parent", required=True)
    p.add_argument("--K", type=int, required=True)

    p = add("quantize", cmd_quantize, "quantizer design, application and scheme ledger")
    p.add_argument("action", choices=("design", "apply", "ledger"))
    p.add_argument("--kind", choices=("os2", "scalar"), default="os2")
    p.add_argument("--rate", type=int, default=1)
    p.add_argument("--parent", default=None)
    p.add_argument("--samples", type=int, default=1 << 20)
    p.add_argument("--codebook", default=None)
    p.add_argument("--input", default=None)
    p.add_argument("--K", type=int, default=2)

    p = add("bounds", cmd_bounds, "rate-distortion curves and bounds")
    p.add_argument("--curve", choices=("slb", "sub", "erokhin", "ba"), required=True)
    p.add_argument("--pmf", default="0.25,0.5,0.25")
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--beta-max", type=float, default=30.0)

    p = add("budget", cmd_budget, "bits for lossy multiset coding")
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--R", type=float, default=1.0)

    p = add("table", cmd_table, "empirical entropy table or k-gram multiset counts")
    p.add_argument("--corpus", default=None)
    p.add_argument("--grams", default="1,2,3,4")
    p.add_argument("--windowing", choices=("anchored", "sliding"), default="anchored")
    p.add_argument("--alphabet", type=int, default=None)
    p.add_argument("--kgram-counts", action="store_true")
    p.add_argument("--n-max", type=int, default=16)
    return ap


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    cfg = RunConfig(args.command, args.seed, args.out, args.format)
    try:
        args.func(cfg, args)
    except UsageError as exc:
        sub = parser._subparsers._group_actions[0].choices[args.command]
        sub.print_usage(sys.stderr)
        print(f"mslab {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, RuntimeError, OSError, KeyError) as exc:
        print(f"mslab {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

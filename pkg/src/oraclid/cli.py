"""Command-line front end: ``oraclid {gen,run,bound,inspect}``.

Exit codes: 0 success, 2 configuration error, 3 I/O error. Bounded-error
identification failures are data and still exit 0.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import oracle_set as osets
from .bounds import ambainis_bound, halves_relation, simple_adversary_bound, threshold_instance_bound
from .harness import (
    ALGORITHMS,
    ConfigError,
    ExperimentConfig,
    dumps_csv,
    dumps_summary,
    dumps_transcripts,
    run_experiment,
)

EXIT_CONFIG = 2
EXIT_IO = 3
GENERATORS = ("grover", "bv", "hybrid", "av", "balanced", "random")


class CLIError(Exception):
    def __init__(self, message, code=EXIT_CONFIG):
        super().__init__(message)
        self.code = code


def _need(args, name):
    value = getattr(args, name)
    if value is None:
        raise CLIError(f"--{name} is required for generator {args.generator!r}")
    return value


def build_matrix(args) -> osets.OracleMatrix:
    gen = args.generator
    n = _need(args, "n")
    if gen == "grover":
        return osets.make_grover(n)
    if gen == "bv":
        return osets.make_bv(n)
    if gen == "hybrid":
        return osets.make_hybrid(n, _need(args, "k"))
    K = args.K if args.K is not None else args.k
    if gen in ("av", "balanced"):
        if K is None:
            raise CLIError(f"--K is required for generator {gen!r}")
        fn = osets.sample_av if gen == "av" else osets.sample_balanced
        return fn(n, K, args.seed)
    if gen == "random":
        return osets.sample_distinct(n, _need(args, "M"), args.seed)
    raise CLIError(f"unknown generator {gen!r}")


def _load(path) -> osets.OracleMatrix:
    try:
        return osets.load(path)
    except OSError as exc:
        raise CLIError(f"cannot read {path}: {exc}", EXIT_IO) from None
    except osets.MatrixFormatError as exc:
        raise CLIError(f"{path}: {exc}") from None


def _write(path, text):
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise CLIError(f"cannot write {path}: {exc}", EXIT_IO) from None


def cmd_gen(args, out):
    Z = build_matrix(args)
    text = osets.dumps(Z)
    if args.out:
        _write(args.out, text)
        print(f"wrote {args.out}: n={Z.n} N={Z.N} M={Z.M}", file=out)
    else:
        out.write(text)


def _parse_consts(items) -> dict:
    consts = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep or not name:
            raise CLIError(f"--const expects name=value, got {item!r}")
        consts[name.strip()] = value.strip()
    return consts


def cmd_run(args, out):
    if args.file and args.generator:
        raise CLIError("give either --file or --gen, not both")
    if args.file:
        S = _load(args.file)
        source = os.path.basename(args.file)
    elif args.generator:
        S = build_matrix(args)
        source = f"gen:{args.generator}"
    else:
        raise CLIError("run needs --file or --gen")
    meta = dict(S.meta)
    if args.k is not None:
        meta["k"] = args.k
    if args.K is not None:
        meta["K"] = args.K
    S = osets.OracleMatrix(S.n, S.rows, S.row_ids, meta, check=False)
    config = ExperimentConfig(
        algorithm=args.algorithm,
        matrix=S,
        trials=args.trials,
        oracles=args.oracles,
        seed=args.seed if args.seed is not None else 0,
        constants=_parse_consts(args.const),
        hybrid_k=args.k if args.algorithm in ("identify_hybrid", "classical_identify_hybrid") else None,
        source=source,
    )
    try:
        summary, records = run_experiment(config, workers=args.workers)
    except ConfigError as exc:
        raise CLIError(str(exc)) from None
    summary_text = dumps_summary(summary)
    if args.out:
        try:
            os.makedirs(args.out, exist_ok=True)
        except OSError as exc:
            raise CLIError(f"cannot create {args.out}: {exc}", EXIT_IO) from None
        _write(os.path.join(args.out, "transcripts.jsonl"), dumps_transcripts(records))
        _write(os.path.join(args.out, "summary.json"), summary_text)
        if args.format == "csv":
            _write(os.path.join(args.out, "per_oracle.csv"), dumps_csv(records))
    if args.format == "csv" and not args.out:
        out.write(dumps_csv(records))
    else:
        out.write(summary_text)


def cmd_bound(args, out):
    if args.kind == "threshold":
        if args.N is None or args.K is None:
            raise CLIError("bound threshold needs --N and --K")
        try:
            S, _rel, report = threshold_instance_bound(args.N, args.K)
        except osets.OracleSetError as exc:
            raise CLIError(str(exc)) from None
        report.ingredients["M"] = S.M
    else:
        if not args.file:
            raise CLIError(f"bound {args.kind} needs --file")
        S = _load(args.file)
        if S.M < 2:
            raise CLIError("bounds need at least two oracles")
        if args.kind == "simple":
            report = simple_adversary_bound(S)
        else:
            report = ambainis_bound(S, halves_relation(S))
    out.write(json.dumps(report.to_dict(), sort_keys=True) + "\n")


def cmd_inspect(args, out):
    path = args.path or args.file
    if not path:
        raise CLIError("inspect needs a matrix file")
    Z = _load(path)
    stats = osets.sensitivity(Z)
    hist = np.bincount(stats.counts, minlength=stats.K + 1)
    flipped, mask = osets.column_flip(Z)
    info = {
        "file": path,
        "n": Z.n,
        "N": Z.N,
        "M": Z.M,
        "K": stats.K,
        "one_sensitive": stats.one_sensitive,
        "K_after_flip": osets.sensitivity(flipped).K,
        "columns_needing_flip": int(mask.bits.sum()),
        "column_weight_histogram": {str(w): int(c) for w, c in enumerate(hist) if c},
        "duplicate_rows": 0,  # load() rejects duplicates
    }
    out.write(json.dumps(info, indent=2) + "\n")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="oraclid", description="Quantum oracle identification simulator")
    sub = p.add_subparsers(dest="command", required=True)

    def matrix_flags(sp):
        sp.add_argument("--n", type=int)
        sp.add_argument("--k", type=int, help="hybrid suffix length (alias of --K for av/balanced)")
        sp.add_argument("--K", type=int, help="column weight for av/balanced")
        sp.add_argument("--M", type=int, help="row count for the random generator")
        sp.add_argument("--seed", type=int)

    g = sub.add_parser("gen", help="generate a matrix file")
    g.add_argument("generator", choices=GENERATORS)
    matrix_flags(g)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="run a seeded identification experiment")
    r.add_argument("--file")
    r.add_argument("--gen", dest="generator", choices=GENERATORS)
    matrix_flags(r)
    r.add_argument("--algorithm", required=True, choices=ALGORITHMS)
    r.add_argument("--trials", type=int, default=1)
    r.add_argument("--oracles", default="all")
    r.add_argument("--const", action="append", metavar="NAME=VALUE")
    r.add_argument("--out", help="directory for transcripts.jsonl / summary.json")
    r.add_argument("--format", choices=("json", "csv"), default="json")
    r.add_argument("--workers", type=int, help="override ORACLID_THREADS")
    r.set_defaults(func=cmd_run)

    b = sub.add_parser("bound", help="evaluate a lower bound")
    b.add_argument("kind", choices=("simple", "ambainis", "threshold"))
    b.add_argument("--file")
    b.add_argument("--N", type=int)
    b.add_argument("--K", type=int)
    b.set_defaults(func=cmd_bound)

    i = sub.add_parser("inspect", help="print matrix statistics")
    i.add_argument("path", nargs="?")
    i.add_argument("--file")
    i.set_defaults(func=cmd_inspect)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else 0
    try:
        args.func(args, out)
    except CLIError as exc:
        print(f"oraclid: error: {exc}", file=sys.stderr)
        return exc.code
    except osets.OracleSetError as exc:
        print(f"oraclid: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return 0


if __name__ == "__main__":
    sys.exit(main())

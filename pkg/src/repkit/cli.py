"""Command-line front end.

Subcommands: generate, discretize, compress, decompress, test, mc-null, rep,
tables.  Every command is deterministic given its flags and --seed (which is
echoed back), reports embed the seed and tool version, and verdicts never
drive exit codes.  Exit codes: 0 success, 2 usage, 3 data error, 4 numeric
error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bits import (
    BitSequence,
    SymbolSeries,
    bits_to_symbols,
    decimal_digits_to_nibbles,
    read_bit_file,
    read_symbol_file,
    write_bit_file,
    write_symbol_file,
)
from .codecs import ALL_CODERS, compress as codec_compress, decompress as codec_decompress
from .discretize import (
    bounds_to_csv,
    empirical_quantile_discretize,
    equal_width_bins,
    normal_quantile_bounds,
    discretize_with_bounds,
    progressive_discretize,
)
from .errors import DataError, NumericError, RepkitError
from .generators import (
    GENERATOR_KINDS,
    bernoulli_bits,
    champernowne_binary,
    embed_low_bit_cycle,
    iid_gaussian_returns,
    pi_decimal_digits,
    symbols_to_returns,
    thue_morse,
    toy_price_series,
    uniform_symbols,
)
from .pipeline import (
    DEFAULT_TRIALS,
    StageSpec,
    load_pipeline_config,
    mc_null_distribution,
    run_pipeline,
)
from .rng import derive_seed
from .series import ReturnSeries, read_price_csv, read_return_csv, write_return_csv
from .stats import run_test


def _echo(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True))


def _write_prices_csv(prices, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["label", "price"])
        labels = prices.timestamps or range(len(prices))
        for label, value in zip(labels, prices.values):
            writer.writerow([label, repr(float(value))])


def _write_integers_csv(series, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["value"])
        for v in series.values:
            writer.writerow([int(v)])


def _cmd_generate(args) -> int:
    kind = args.kind
    seed = args.seed
    out = Path(args.out)
    info: dict = {"command": "generate", "kind": kind, "seed": seed, "out": str(out),
                  "version": __version__}
    if kind == "thue-morse":
        write_bit_file(thue_morse(args.n), out)
        info["n"] = args.n
    elif kind == "champernowne":
        write_bit_file(champernowne_binary(args.n), out)
        info["n"] = args.n
    elif kind == "pi-digits":
        _write_integers_csv(pi_decimal_digits(args.n), out)
        info["n"] = args.n
    elif kind == "bernoulli":
        write_bit_file(bernoulli_bits(args.n, args.p_one, seed), out)
        info.update(n=args.n, p_one=args.p_one)
    elif kind == "gaussian":
        write_return_csv(iid_gaussian_returns(args.n, seed), out)
        info["n"] = args.n
    elif kind == "uniform":
        write_symbol_file(uniform_symbols(args.n, args.width, seed), out)
        info.update(n=args.n, width=args.width)
    elif kind in ("lowbit-case1", "lowbit-case2"):
        cycle_bits = 1 if kind.endswith("1") else 3
        symbols = embed_low_bit_cycle(uniform_symbols(args.n, args.width, seed), cycle_bits)
        returns = symbols_to_returns(
            symbols, normal_quantile_bounds(args.width), derive_seed(seed, 1)
        )
        write_return_csv(returns, out)
        info.update(n=args.n, width=args.width, cycle_bits=cycle_bits)
    elif kind == "toy-e1":
        _write_prices_csv(toy_price_series(args.n, seed), out)
        info["n"] = args.n
    elif kind == "pi-returns":
        digits = pi_decimal_digits(args.digits)
        symbols = bits_to_symbols(decimal_digits_to_nibbles(digits), 8)
        returns = symbols_to_returns(symbols, normal_quantile_bounds(8), seed)
        write_return_csv(returns, out)
        info.update(digits=args.digits, symbols=len(symbols))
    else:  # pragma: no cover - argparse restricts choices
        raise DataError(f"unknown generator kind {kind!r}")
    _echo(info)
    return 0


def _cmd_discretize(args) -> int:
    returns = read_return_csv(args.input)
    if args.scheme == "equal-width":
        symbols, bounds = equal_width_bins(returns, args.width)
    elif args.scheme == "normal-quantile":
        bounds = normal_quantile_bounds(args.width)
        symbols = discretize_with_bounds(returns, bounds)
    elif args.scheme == "empirical-quantile":
        symbols = empirical_quantile_discretize(returns, args.width)
        bounds = None
    else:
        symbols = progressive_discretize(returns, args.window, args.width)
        bounds = None
    write_symbol_file(symbols, args.out)
    if args.bounds_out and bounds is not None:
        bounds_to_csv(bounds, args.bounds_out)
    _echo(
        {
            "command": "discretize",
            "scheme": args.scheme,
            "width": args.width,
            "window": args.window if args.scheme == "progressive" else None,
            "n_in": len(returns),
            "n_out": len(symbols),
            "out": str(args.out),
            "version": __version__,
        }
    )
    return 0


def _cmd_compress(args) -> int:
    series = read_symbol_file(args.input, width=args.width)
    blob, outcome = codec_compress(series, args.coder)
    Path(args.out).write_bytes(blob)
    _echo(
        {
            "command": "compress",
            "coder": args.coder,
            "original_bits": outcome.original_bits,
            "compressed_bits": outcome.compressed_bits,
            "rate": outcome.rate,
            "out": str(args.out),
            "version": __version__,
        }
    )
    return 0


def _cmd_decompress(args) -> int:
    series = codec_decompress(Path(args.input).read_bytes())
    write_symbol_file(series, args.out)
    _echo(
        {
            "command": "decompress",
            "n": len(series),
            "width": series.width,
            "out": str(args.out),
            "version": __version__,
        }
    )
    return 0


def _cmd_test(args) -> int:
    returns = read_return_csv(args.input)
    names = [t.strip() for t in args.tests.split(",") if t.strip()]
    reports = []
    for name in names:
        kwargs = {}
        if name == "ljung_box" and args.lags:
            kwargs["lags"] = args.lags
        reports.append(run_test(name, returns, **kwargs))
    if args.format == "csv":
        lines = ["test_id,cell,statistic,p_value"]
        for report in reports:
            for cell, stat, p in zip(report.cells, report.statistics, report.p_values):
                label = ";".join(f"{k}={v}" for k, v in cell.items())
                lines.append(f"{report.test_id},{label},{float(stat)!r},{float(p)!r}")
        text = "\n".join(lines)
    else:
        payload = {
            "command": "test",
            "input": str(args.input),
            "n": len(returns),
            "reports": [r.to_json() for r in reports],
            "version": __version__,
        }
        text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


def _cmd_mc_null(args) -> int:
    null = mc_null_distribution(args.coder, args.length, args.width, args.trials, args.seed)
    if args.format == "csv":
        lines = ["trial,rate"] + [f"{i},{float(r)!r}" for i, r in enumerate(null.rates)]
        text = "\n".join(lines)
    else:
        payload = dict(null.to_json(), command="mc-null", version=__version__)
        text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


def _cmd_rep(args) -> int:
    config = load_pipeline_config(args.pipeline)
    if args.trials is not None:
        config["trials"] = args.trials
    if args.seed is not None:
        config["seed"] = args.seed
    if args.input_kind == "prices":
        data = read_price_csv(args.input)
    else:
        data = read_return_csv(args.input)
    report = run_pipeline(
        config["stages"],
        data,
        coders=config["coders"],
        trials=config["trials"],
        seed=config["seed"],
        significance=config["significance"],
        regular_threshold=config["regular_threshold"],
        tests=config["tests"],
        source=str(args.input),
    )
    text = report.to_json_text()
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


def _cmd_tables(args) -> int:
    report = json.loads(Path(args.report).read_text())
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for i, stage in enumerate(report.get("stages", [])):
        outcomes = stage.get("outcomes", [])
        if not outcomes:
            continue
        path = out_dir / f"stage{i:02d}_{stage['transform']}.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["algorithm", "file_size_bits", "rate"])
            for o in outcomes:
                writer.writerow([o["coder"], o["compressed_bits"], repr(o["rate"])])
        written.append(str(path))
    if not written:
        path = out_dir / "empty.csv"
        with open(path, "w", newline="") as fh:
            csv.writer(fh).writerow(["algorithm", "file_size_bits", "rate"])
        written.append(str(path))
    _echo({"command": "tables", "written": written, "version": __version__})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="repkit",
        description="Compression-based randomness estimation for numeric series.",
    )
    parser.add_argument("--version", action="version", version=f"repkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a generated series to a file")
    p.add_argument("kind", choices=GENERATOR_KINDS)
    p.add_argument("--n", type=int, default=32000)
    p.add_argument("--digits", type=int, default=50000, help="pi-returns: decimal digits to use")
    p.add_argument("--width", type=int, default=8)
    p.add_argument("--p-one", type=float, default=0.5, dest="p_one")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("discretize", help="map a return CSV onto an integer alphabet")
    p.add_argument("--input", required=True)
    p.add_argument(
        "--scheme",
        choices=("equal-width", "normal-quantile", "empirical-quantile", "progressive"),
        required=True,
    )
    p.add_argument("--width", type=int, default=8)
    p.add_argument("--window", type=int, default=512)
    p.add_argument("--out", required=True)
    p.add_argument("--bounds-out", default=None)
    p.set_defaults(func=_cmd_discretize)

    p = sub.add_parser("compress", help="compress a symbol file")
    p.add_argument("--coder", choices=ALL_CODERS, required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--width", type=int, default=8)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_compress)

    p = sub.add_parser("decompress", help="restore a symbol file from a blob")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_decompress)

    p = sub.add_parser("test", help="run statistical tests on a return CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--tests", default="ljung_box,adf,bds")
    p.add_argument("--lags", type=int, default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_test)

    p = sub.add_parser("mc-null", help="Monte-Carlo null distribution of a coder")
    p.add_argument("--coder", choices=ALL_CODERS, required=True)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--width", type=int, default=8)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_mc_null)

    p = sub.add_parser("rep", help="run a full pipeline from a config file")
    p.add_argument("--input", required=True)
    p.add_argument("--input-kind", choices=("prices", "returns"), default="prices")
    p.add_argument("--pipeline", required=True)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_rep)

    p = sub.add_parser("tables", help="render per-stage CSV tables from a report")
    p.add_argument("--report", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_tables)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 4
    except RepkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

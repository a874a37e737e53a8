"""Command line front end.

Subcommands: decompose, reliability, band, pit, marginal, simulate, test.

Point data is CSV with the exact header ``x,y``; distributional data is
JSON lines with one ``{"dist": {...}, "y": <float>}`` record per line (see
the distributions module for the wire shapes).  Every randomized subcommand
requires --seed and is reproducible: the same invocation writes
byte-identical JSON and SVG.

Exit codes: 0 on success, 2 for input or parse errors, 3 for numeric or
domain errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from .diagrams import (
    CurveBand,
    ks_uniform,
    marginal_reliability,
    pit_reliability,
    reliability_diagram,
)
from .distributions import dist_from_json, functional_of, pit_values
from .functionals import Functional, parse_functional
from .resampling import (
    consistency_band,
    marginal_band,
    mc_pvalue,
    pit_band,
    resample_auto,
    resample_residual,
)
from .scores import decompose, extended_decompose
from .svg import render_curve, render_reliability
from .synthetic import Scenario, gen_scenario


class InputError(Exception):
    """Unreadable or malformed input; exits with status 2."""


def _open_input(path: str):
    if path in (None, "-"):
        return io.StringIO(sys.stdin.read())
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return io.StringIO(fh.read())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def _infer_format(path: str, explicit: str | None) -> str:
    if explicit:
        return explicit
    if path and path != "-":
        if path.endswith(".csv"):
            return "csv"
        if path.endswith((".jsonl", ".ndjson", ".json")):
            return "jsonl"
    raise InputError("cannot infer input format; pass --format csv or --format jsonl")


def read_point_csv(stream) -> tuple[np.ndarray, np.ndarray]:
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise InputError("empty CSV input") from None
    if [h.strip() for h in header] != ["x", "y"]:
        raise InputError(f"CSV header must be exactly 'x,y', got {','.join(header)!r}")
    xs, ys = [], []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 2:
            raise InputError(f"line {lineno}: expected two fields, got {len(row)}")
        try:
            xs.append(float(row[0]))
            ys.append(float(row[1]))
        except ValueError:
            raise InputError(f"line {lineno}: cannot parse {row!r} as numbers") from None
    if not xs:
        raise InputError("CSV input holds no data rows")
    return np.array(xs), np.array(ys)


def read_jsonl(stream) -> tuple[list, np.ndarray]:
    dists, ys = [], []
    for lineno, line in enumerate(stream, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise InputError(f"line {lineno}: invalid JSON ({exc.msg})") from None
        try:
            dists.append(dist_from_json(rec["dist"]))
            ys.append(float(rec["y"]))
        except (KeyError, TypeError):
            raise InputError(f"line {lineno}: record must have 'dist' and numeric 'y'") from None
        except ValueError as exc:
            raise InputError(f"line {lineno}: {exc}") from None
    if not dists:
        raise InputError("jsonl input holds no records")
    return dists, np.array(ys)


def _load_pairs(args, f: Functional):
    """Return (x, y, dists-or-None) for a functional-based subcommand."""
    fmt = _infer_format(args.input, args.format)
    stream = _open_input(args.input)
    if fmt == "csv":
        x, y = read_point_csv(stream)
        return x, y, None
    dists, y = read_jsonl(stream)
    x = np.array([functional_of(d, f) for d in dists])
    return x, y, dists


def _parse_functional_arg(args) -> Functional:
    if not getattr(args, "functional", None):
        raise InputError("--functional is required for this subcommand")
    try:
        return parse_functional(args.functional)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _require_seed(args):
    if args.seed is None:
        raise InputError("--seed is required whenever randomness is used")


def _emit(args, text: str):
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)


def _csv_text(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(f"{v!r}" if isinstance(v, float) else str(v) for v in row))
    return "\n".join(lines) + "\n"


def _emit_payload(args, payload: dict, table=None):
    """Write the payload as JSON (default) or, with --output-format csv, as
    the command's tabular form."""
    if getattr(args, "output_format", "json") == "csv":
        if table is None:
            rows = []
            for k, v in payload.items():
                if isinstance(v, dict):
                    rows.extend((f"{k}_{k2}", v2) for k2, v2 in v.items())
                elif not isinstance(v, (list, tuple)):
                    rows.append((k, v))
            header = ("field", "value")
        else:
            header, rows = table
        _emit(args, _csv_text(header, rows))
    else:
        _emit(args, json.dumps(payload, indent=2) + "\n")


def _write_svg(args, text: str):
    with open(args.svg, "w", encoding="utf-8") as fh:
        fh.write(text)


def _band_for(args, f: Functional, x, y, dists) -> CurveBand:
    _require_seed(args)
    if args.resamples is None or args.resamples < 2:
        raise InputError("bands need --resamples of at least 2")
    hypothesis = args.hypothesis or ("auto" if dists is not None else "residual")
    if hypothesis == "auto":
        if dists is None:
            raise InputError("hypothesis 'auto' needs jsonl input with distributions")
        rs = resample_auto(dists, f, args.resamples, args.seed)
    else:
        rs = resample_residual(x, y, f, args.resamples, args.seed)
    return consistency_band(rs, f, args.level)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_decompose(args) -> int:
    f = _parse_functional_arg(args)
    x, y, _ = _load_pairs(args, f)
    d = extended_decompose(x, y, f) if args.extended else decompose(x, y, f)
    _emit_payload(args, d.to_dict())
    return 0


def cmd_reliability(args) -> int:
    f = _parse_functional_arg(args)
    x, y, dists = _load_pairs(args, f)
    band = _band_for(args, f, x, y, dists) if args.resamples is not None else None
    diagram = reliability_diagram(x, y, f, band=band)
    if args.svg:
        _write_svg(args, render_reliability(diagram))
    table = (("x", "x_hat"), list(zip(map(float, diagram.points_x), map(float, diagram.points_y))))
    _emit_payload(args, diagram.to_dict(), table)
    return 0


def cmd_band(args) -> int:
    f = _parse_functional_arg(args)
    x, y, dists = _load_pairs(args, f)
    band = _band_for(args, f, x, y, dists)
    payload = band.to_dict()
    payload["hypothesis"] = args.hypothesis or ("auto" if dists is not None else "residual")
    payload["m"] = args.resamples
    table = (("at", "lower", "upper"),
             list(zip(payload["at"], payload["lower"], payload["upper"])))
    _emit_payload(args, payload, table)
    return 0


def cmd_pit(args) -> int:
    fmt = _infer_format(args.input, args.format)
    if fmt != "jsonl":
        raise InputError("pit needs jsonl input with distributions")
    _require_seed(args)
    dists, y = read_jsonl(_open_input(args.input))
    rng = np.random.default_rng(np.random.SeedSequence(args.seed))
    pits = pit_values(dists, y, rng)
    curve = pit_reliability(pits)
    ks = ks_uniform(pits)
    band = None
    if args.resamples is not None:
        if args.resamples < 2:
            raise InputError("bands need --resamples of at least 2")
        band = pit_band(y.size, args.resamples, args.level, args.seed)
    payload = {"n": int(y.size), "curve": curve.to_dict(), "ks": ks}
    if band is not None:
        payload["band"] = band.to_dict()
    table = (("x", "y"), list(zip(curve.x.tolist(), curve.y.tolist())))
    if args.svg:
        _write_svg(
            args,
            render_curve(
                curve,
                band=band,
                title="PIT reliability diagram",
                xlabel="PIT value",
                ylabel="empirical CDF",
                annotation=[f"KS  {ks:.4g}", f"n   {y.size}"],
            ),
        )
    _emit_payload(args, payload, table)
    return 0


def cmd_marginal(args) -> int:
    fmt = _infer_format(args.input, args.format)
    if fmt != "jsonl":
        raise InputError("marginal needs jsonl input with distributions")
    dists, y = read_jsonl(_open_input(args.input))
    curve = marginal_reliability(dists, y)
    band = None
    if args.resamples is not None:
        _require_seed(args)
        if args.resamples < 2:
            raise InputError("bands need --resamples of at least 2")
        band = marginal_band(dists, y, args.resamples, args.level, args.seed)
    payload = {"n": int(y.size), "curve": curve.to_dict()}
    if band is not None:
        payload["band"] = band.to_dict()
    table = (("x", "y"), list(zip(curve.x.tolist(), curve.y.tolist())))
    if args.svg:
        _write_svg(
            args,
            render_curve(
                curve,
                band=band,
                title="marginal reliability diagram",
                xlabel="average forecast CDF",
                ylabel="outcome ECDF",
                annotation=[f"n   {y.size}"],
            ),
        )
    _emit_payload(args, payload, table)
    return 0


def cmd_simulate(args) -> int:
    _require_seed(args)
    scenario = Scenario(
        kind=args.model.replace("-", "_"),
        eta0=args.eta0,
        delta0=args.delta0,
        c=args.latent_scale,
    )
    dists, y = gen_scenario(scenario, args.n, args.seed)
    lines = [
        json.dumps({"dist": d.to_json(), "y": float(v)}) for d, v in zip(dists, y)
    ]
    _emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_test(args) -> int:
    f = _parse_functional_arg(args)
    _require_seed(args)
    if args.resamples is None or args.resamples < 1:
        raise InputError("test needs --resamples of at least 1")
    x, y, dists = _load_pairs(args, f)
    hypothesis = args.hypothesis or ("auto" if dists is not None else "residual")
    if hypothesis == "auto":
        if dists is None:
            raise InputError("hypothesis 'auto' needs jsonl input with distributions")
        rs = resample_auto(dists, f, args.resamples, args.seed)
    else:
        rs = resample_residual(x, y, f, args.resamples, args.seed)
    observed = decompose(x, y, f).mcb
    mcbs = np.array([decompose(rs.x, rs.replicates[j], f).mcb for j in range(rs.m)])
    p = mc_pvalue(observed, mcbs)
    qs = np.quantile(mcbs, [0.05, 0.25, 0.5, 0.75, 0.95])
    payload = {
        "functional": f.label(),
        "hypothesis": hypothesis,
        "m": int(rs.m),
        "observed_mcb": float(observed),
        "resampled_mcb": {
            "q05": float(qs[0]),
            "q25": float(qs[1]),
            "q50": float(qs[2]),
            "q75": float(qs[3]),
            "q95": float(qs[4]),
        },
        "p_value": float(p),
    }
    _emit_payload(args, payload)
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_io_options(p, functional=True):
    if functional:
        p.add_argument("--functional", help="target functional, e.g. mean, quantile:0.9, threshold:2.0")
    p.add_argument("--input", default="-", help="input path, or - for stdin (default)")
    p.add_argument("--format", choices=("csv", "jsonl"), help="input format; inferred from the extension if omitted")
    p.add_argument("--output", default="-", help="output path, or - for stdout (default)")
    p.add_argument("--output-format", choices=("json", "csv"), default="json",
                   help="emit JSON (default) or the command's tabular CSV form")


def _add_band_options(p):
    p.add_argument("--resamples", type=int, help="number of Monte Carlo resamples m")
    p.add_argument("--level", type=float, default=0.9, help="band coverage level (default 0.9)")
    p.add_argument("--hypothesis", choices=("auto", "residual"),
                   help="resampling hypothesis (default: auto for jsonl input, residual for csv)")
    p.add_argument("--seed", type=int, help="random seed; required with any randomness")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isocal",
        description="Calibration diagnostics: isotonic recalibration diagrams, score decompositions, and Monte Carlo calibration tests.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="score decomposition of forecasts against outcomes")
    _add_io_options(p)
    p.add_argument("--extended", action="store_true",
                   help="split miscalibration into unconditional and conditional parts")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("reliability", help="reliability diagram with optional consistency band")
    _add_io_options(p)
    _add_band_options(p)
    p.add_argument("--svg", help="also write the rendered diagram to this SVG file")
    p.set_defaults(func=cmd_reliability)

    p = sub.add_parser("band", help="consistency band for the recalibration curve")
    _add_io_options(p)
    _add_band_options(p)
    p.set_defaults(func=cmd_band)

    p = sub.add_parser("pit", help="PIT reliability diagram from distributional input")
    _add_io_options(p, functional=False)
    _add_band_options(p)
    p.add_argument("--svg", help="also write the rendered diagram to this SVG file")
    p.set_defaults(func=cmd_pit)

    p = sub.add_parser("marginal", help="marginal reliability diagram from distributional input")
    _add_io_options(p, functional=False)
    _add_band_options(p)
    p.add_argument("--svg", help="also write the rendered diagram to this SVG file")
    p.set_defaults(func=cmd_marginal)

    p = sub.add_parser("simulate", help="generate synthetic forecast-outcome records")
    p.add_argument("--model", required=True,
                   choices=("perfect", "unconditional", "unfocused", "lopsided", "piecewise-uniform"))
    p.add_argument("--eta0", type=float, default=1.5, help="unfocused shift magnitude (default 1.5)")
    p.add_argument("--delta0", type=float, default=0.7, help="lopsided skew magnitude (default 0.7)")
    p.add_argument("--latent-scale", type=float, default=0.5,
                   help="latent center scale of the piecewise-uniform model (default 0.5)")
    p.add_argument("-n", type=int, required=True, help="number of records")
    p.add_argument("--seed", type=int, help="random seed (required)")
    p.add_argument("--output", default="-", help="output path, or - for stdout (default)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("test", help="Monte Carlo calibration test on the miscalibration component")
    _add_io_options(p)
    _add_band_options(p)
    p.set_defaults(func=cmd_test)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"isocal: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"isocal: error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())

"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 invalid matrix,
4 domain/threshold mismatch, 5 unsupported precondition.

Every command prints one JSON report (or a CSV table with ``--format csv``)::

    {"command": ..., "version": ..., "seed": ..., "model": {...},
     "results": [...], "warnings": [...]}
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from dataclasses import replace
from pathlib import Path

from . import __version__
from .asymptotics import (
    EllipticalModel,
    gumbel_norm_density,
    gumbel_norm_tail,
    kotz_tail_constants,
    product_density_beta_mix,
    product_density_beta_power,
    product_tail_beta_mix,
    product_tail_beta_power,
    weibull_norm_density,
    weibull_norm_tail,
)
from .errors import MDAMismatchError, MatrixError, PreconditionError
from .extremes import (
    bc_simulate,
    ks_distance,
    maxima_simulate,
    norming_empirical,
    norming_for,
    norming_kotz,
)
from .oracle import ratio_rows_json, ratio_table, ratio_table_csv
from .radial import Kotz3, law_from_dict
from .spectrum import MULTIPLICITY_RTOL

EXIT_CONFIG, EXIT_MATRIX, EXIT_MISMATCH, EXIT_PRECONDITION = 2, 3, 4, 5


class ConfigError(ValueError):
    pass


class CLIError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _load_json(source: str, what: str):
    """Parse inline JSON or the JSON file at ``source``."""
    text = source
    if not source.lstrip().startswith(("{", "[")):
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise ConfigError(f"{what}: cannot read {source!r}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{what}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def _matrix(value, field: str):
    if (
        not isinstance(value, list)
        or not value
        or not all(isinstance(row, list) and len(row) == len(value) for row in value)
    ):
        raise ConfigError(f"{field}: expected a square array of arrays")
    for i, row in enumerate(value):
        for j, x in enumerate(row):
            if not isinstance(x, (int, float)) or isinstance(x, bool):
                raise ConfigError(f"{field}[{i}][{j}]: expected a number, got {x!r}")
    return value


def model_from_config(cfg) -> EllipticalModel:
    """Build a model from ``{"sigma" | "a_matrix": [[...]], "radial": {...}, "multiplicity_rtol": r}``."""
    if not isinstance(cfg, dict):
        raise ConfigError("model: expected a JSON object")
    unknown = set(cfg) - {"sigma", "a_matrix", "radial", "multiplicity_rtol"}
    if unknown:
        raise ConfigError(f"model: unknown fields {sorted(unknown)}")
    has_sigma, has_a = "sigma" in cfg, "a_matrix" in cfg
    if has_sigma == has_a:
        raise ConfigError("model: give exactly one of 'sigma' or 'a_matrix'")
    if "radial" not in cfg:
        raise ConfigError("model.radial: missing")
    rtol = cfg.get("multiplicity_rtol", MULTIPLICITY_RTOL)
    if not isinstance(rtol, (int, float)) or isinstance(rtol, bool) or not 0 <= rtol < 1:
        raise ConfigError("model.multiplicity_rtol: expected a number in [0, 1)")
    law = radial_from_config(cfg["radial"], "model.radial")
    if has_sigma:
        return EllipticalModel.from_sigma(_matrix(cfg["sigma"], "model.sigma"), law, rtol)
    return EllipticalModel.from_A(_matrix(cfg["a_matrix"], "model.a_matrix"), law, rtol)


def radial_from_config(cfg, field: str = "radial"):
    try:
        return law_from_dict(cfg)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"{field}: {exc}") from exc


def _report(args, model: EllipticalModel | None, results, caught, extra=None) -> dict:
    seen = []
    for w in caught:
        msg = f"{w.category.__name__}: {w.message}"
        if msg not in seen:
            seen.append(msg)
    out = {
        "command": {"name": args.command, "argv": args.argv},
        "version": __version__,
        "seed": args.seed,
        "model": model.summary() if model is not None else None,
    }
    if extra:
        out.update(extra)
    out["results"] = results
    out["warnings"] = seen
    return out


def _need_model(args) -> EllipticalModel:
    if not args.model:
        raise ConfigError("--model is required for this command")
    return model_from_config(_load_json(args.model, "model"))


def _check_thresholds(model: EllipticalModel, args) -> tuple[str, list[float]]:
    tag = model.radial.mda().tag
    if tag == "gumbel":
        if args.ugap:
            raise CLIError(EXIT_MISMATCH, "Gumbel-domain radius: use --u, not --ugap")
        if not args.u:
            raise CLIError(EXIT_MISMATCH, "Gumbel-domain radius needs --u thresholds")
        return tag, list(args.u)
    if args.u:
        raise CLIError(EXIT_MISMATCH, "Weibull-domain radius: use --ugap, not --u")
    if not args.ugap:
        raise CLIError(EXIT_MISMATCH, "Weibull-domain radius needs --ugap gaps")
    return tag, list(args.ugap)


def cmd_spectrum(args):
    model = _need_model(args)
    return model, [model.spectrum.to_dict()], {}


def cmd_approx(args):
    model = _need_model(args)
    tag, values = _check_thresholds(model, args)
    lam = model.spectrum.lambda_top
    unit = model.normalized()
    rows = []
    for v in values:
        if tag == "gumbel":
            u = v / math.sqrt(lam)
            approx = gumbel_norm_tail(model, u)
            row = {"u": v, "u_normalized": u, "value": approx.value, **approx.factors}
            if args.density:
                row["density"] = gumbel_norm_density(unit, u)
        else:
            approx = weibull_norm_tail(model, v)
            row = {"ugap": v, "value": approx.value, **approx.factors}
            if args.density:
                row["density"] = weibull_norm_density(unit, v)
        rows.append(row)
    extra = {"rescale": lam} if args.density else {}
    return model, rows, extra


def cmd_compare(args):
    model = _need_model(args)
    tag, values = _check_thresholds(model, args)
    scale = math.sqrt(model.spectrum.lambda_top) if tag == "gumbel" else 1.0
    try:
        rows = ratio_table(model, [v / scale for v in values], samples=args.samples, seed=args.seed)
    except ValueError as exc:
        raise CLIError(EXIT_PRECONDITION, str(exc)) from exc
    # report thresholds on the scale the user gave them
    rows = [replace(r, u=v) for r, v in zip(rows, values)]
    if args.format == "csv":
        return model, rows, {"_csv": ratio_table_csv(rows)}
    return model, ratio_rows_json(rows), {}


def cmd_extremes(args):
    model = _need_model(args)
    lam = model.spectrum.lambda_top
    unit = model.normalized()
    law = unit.radial
    try:
        if args.empirical:
            norming = norming_empirical(unit, args.n, args.samples or 100 * args.n, args.seed)
        else:
            norming = norming_for(unit, args.n)
    except MDAMismatchError:
        raise
    except ValueError as exc:
        raise CLIError(EXIT_PRECONDITION, str(exc)) from exc
    result = {"block": args.n, "norming": norming.to_dict()}
    if isinstance(law, Kotz3):
        K, alpha = kotz_tail_constants(unit)
        result["kotz"] = {"K": K, "alpha": alpha, "norming": norming_kotz(unit, max(args.n, 3)).to_dict()}
    maxima = None
    if args.reps > 0:
        maxima = maxima_simulate(unit, args.n, args.reps, args.seed, norming)
        result["reps"] = args.reps
        result["ks_distance"] = ks_distance(maxima, norming.limit, norming.index)
    run = None
    if args.bc is not None:
        try:
            run = bc_simulate(unit, args.bc, args.bc_nmax, args.seed)
        except PreconditionError as exc:
            raise CLIError(EXIT_PRECONDITION, str(exc)) from exc
        result["bc"] = {
            **run.boundary.to_dict(),
            "n_max": args.bc_nmax,
            "crossings": run.count,
            "crossings_beyond_100": run.count_beyond(100),
            "crossing_n": [int(k) for k in run.n],
        }
    extra = {"rescale": lam}
    if args.format == "csv":
        if run is not None:
            extra["_csv"] = run.to_csv()
        elif maxima is not None:
            extra["_csv"] = "".join(f"{x:.17g}\n" for x in maxima)
        else:
            extra["_csv"] = ""
    return model, [result], extra


def cmd_product(args):
    if args.F is None:
        raise ConfigError("--F radial law is required")
    F = radial_from_config(_load_json(args.F, "F"), "F")
    H = radial_from_config(_load_json(args.H, "H"), "H") if args.H else None
    rows = []
    for u in args.u or []:
        try:
            rows.append(_product_row(F, H, args, u))
        except MDAMismatchError:
            raise
        except ValueError as exc:
            raise ConfigError(f"product: {exc}") from exc
    extra = {
        "product": {
            "kind": "beta_power" if H is None else "beta_mix",
            "F": F.to_dict(),
            "H": H.to_dict() if H is not None else None,
            "a": args.a,
            "b": args.b,
            "delta": args.delta,
            "tau": args.tau,
        }
    }
    return None, rows, extra


def _product_row(F, H, args, u: float) -> dict:
    if H is None:
        if args.tau is None:
            raise ConfigError("--tau is required without --H")
        row = {"u": u, "value": product_tail_beta_power(F, args.a, args.b, args.delta, args.tau, u)}
        if args.density:
            row["density"] = product_density_beta_power(F, args.a, args.b, args.delta, args.tau, u)
    else:
        row = {"u": u, "value": product_tail_beta_mix(F, H, args.a, args.b, args.delta, u)}
        if args.density:
            row["density"] = product_density_beta_mix(F, H, args.a, args.b, args.delta, u)
    return row


COMMANDS = {
    "spectrum": cmd_spectrum,
    "approx": cmd_approx,
    "compare": cmd_compare,
    "extremes": cmd_extremes,
    "product": cmd_product,
}


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.replace(",", " ").split()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected numbers, got {text!r}") from exc


class _Flatten(argparse.Action):
    """Collect ``--u 1 2`` and ``--u 1,2`` alike into one flat list."""

    def __call__(self, parser, namespace, values, option_string=None):
        values = [x for chunk in values for x in chunk]
        setattr(namespace, self.dest, (getattr(namespace, self.dest) or []) + values)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", default=argparse.SUPPRESS, help="model JSON file (or inline JSON)")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS, help="write output here instead of stdout")

    parser = argparse.ArgumentParser(prog="ellnorm", parents=[common], description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"ellnorm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def thresholds(p):
        p.add_argument("--u", type=_float_list, nargs="+", action=_Flatten, help="thresholds on the absolute scale")
        p.add_argument("--ugap", type=_float_list, nargs="+", action=_Flatten, help="gaps to the endpoint (Weibull radii)")

    sub.add_parser("spectrum", parents=[common], help="eigenvalues, multiplicity and C*")

    p = sub.add_parser("approx", parents=[common], help="tail (and density) expansions")
    thresholds(p)
    p.add_argument("--density", action="store_true")

    p = sub.add_parser("compare", parents=[common], help="expansion versus oracle ratio table")
    thresholds(p)
    p.add_argument("--samples", type=int, default=0)

    p = sub.add_parser("extremes", parents=[common], help="norming constants, maxima, a.s. boundary")
    p.add_argument("--n", type=int, default=1000, help="block size")
    p.add_argument("--reps", type=int, default=0)
    p.add_argument("--bc", type=float, default=None, help="boundary coefficient s")
    p.add_argument("--bc-nmax", type=int, default=100_000)
    p.add_argument("--empirical", action="store_true", help="quantile from simulated norms")
    p.add_argument("--samples", type=int, default=0)

    p = sub.add_parser("product", parents=[common], help="tails of Beta products")
    p.add_argument("--F", help="radial law JSON for the main factor")
    p.add_argument("--H", help="radial law JSON for the Beta-mixed factor")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--tau", type=float)
    p.add_argument("--u", type=_float_list, nargs="+", action=_Flatten)
    p.add_argument("--density", action="store_true")
    return parser


def run(argv=None) -> tuple[int, str, str | None]:
    """Run the CLI; return ``(exit_code, output_text, out_path)`` without printing."""
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    for name, default in (("model", None), ("seed", 0), ("format", "json"), ("out", None)):
        if not hasattr(args, name):
            setattr(args, name, default)
    args.argv = argv
    if args.seed < 0:
        return EXIT_CONFIG, "error: --seed must be a non-negative integer\n", None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            model, results, extra = COMMANDS[args.command](args)
        except ConfigError as exc:
            return EXIT_CONFIG, f"error: {exc}\n", None
        except MatrixError as exc:
            return EXIT_MATRIX, f"error: invalid matrix: {exc}\n", None
        except MDAMismatchError as exc:
            return EXIT_MISMATCH, f"error: {exc}\n", None
        except PreconditionError as exc:
            return EXIT_PRECONDITION, f"error: {exc}\n", None
        except CLIError as exc:
            return exc.code, f"error: {exc}\n", None
        except ValueError as exc:
            return EXIT_MISMATCH, f"error: {exc}\n", None
    csv_text = extra.pop("_csv", None)
    if args.format == "csv" and csv_text is not None:
        return 0, csv_text, args.out
    return 0, json.dumps(_report(args, model, results, caught, extra), indent=2) + "\n", args.out


def main(argv=None) -> int:
    try:
        code, text, out = run(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if code != 0:
        sys.stderr.write(text)
    elif out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: exact tables and Monte Carlo reports as CSV or JSON.

Every table carries each rational quantity twice, as an exact fraction
string and as a binary64 approximation: the exact column feeds tests and
round-trips, the approximate one feeds plots.  Identical invocations
(including the seed) produce byte-identical output.

Exit status: 0 on success, 1 on a usage error, 2 on a runtime, capacity,
or I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from io import StringIO
from typing import Any

from weaver import analysis, exact, sampler
from weaver.errors import WeaverError
from weaver.exact import DyadicPoint, WeaverParams
from weaver.parents import (
    ParentDistribution,
    bernoulli,
    gaussian,
    point_mass,
    standardize_parents,
    uniform_interval,
)

CAP_ENV_VAR = "WEAVER_MATERIALIZATION_CAP"

COMMANDS = ("pmf", "cdf", "triangle", "moments", "decompose", "sample", "converge", "density")


@dataclass(frozen=True)
class RunConfig:
    command: str
    n: int
    p: Fraction
    parents: tuple[ParentDistribution, ParentDistribution] | None
    replications: int
    seed: int
    format: str
    output: str
    resolution: int | None = None
    max_order: int = 4


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; the contract wants 1
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _parse_probability(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(
            f"cannot parse {text!r} as a fraction 'a/b' or a decimal"
        )
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"p must lie strictly inside (0, 1), got {text}")
    return value


_PARENT_FACTORIES = {
    "point": (point_mass, 1),
    "pointmass": (point_mass, 1),
    "point-mass": (point_mass, 1),
    "bernoulli": (bernoulli, 1),
    "uniform": (uniform_interval, 2),
    "uniform-interval": (uniform_interval, 2),
    "gauss": (gaussian, 2),
    "gaussian": (gaussian, 2),
}


def _parse_parent(spec: str) -> ParentDistribution:
    name, _, arg_text = spec.partition(":")
    key = name.strip().lower()
    if key not in _PARENT_FACTORIES:
        raise argparse.ArgumentTypeError(
            f"unknown parent family {name!r}; expected one of "
            "point:c, bernoulli:q, uniform:a,b, gauss:mean,variance"
        )
    factory, arity = _PARENT_FACTORIES[key]
    try:
        args = [float(a) for a in arg_text.split(",")] if arg_text else []
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad numeric parameters in parent spec {spec!r}")
    if len(args) != arity:
        raise argparse.ArgumentTypeError(
            f"parent family {name!r} takes {arity} parameter(s), got {len(args)}"
        )
    try:
        return factory(*args)
    except WeaverError as err:
        raise argparse.ArgumentTypeError(str(err))


def _parse_parent_pair(text: str) -> tuple[ParentDistribution, ParentDistribution]:
    specs = text.split(";")
    if len(specs) != 2:
        raise argparse.ArgumentTypeError(
            f"expected two parent specs separated by ';', got {text!r}"
        )
    return _parse_parent(specs[0]), _parse_parent(specs[1])


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _non_negative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="weaver", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument("--format", choices=("csv", "json"), default="csv")
        sub.add_argument("--output", default="-", help="output path, '-' for stdout")
        return sub

    sub = add("pmf", "exact probability mass function over all leaves")
    sub.add_argument("--n", type=_positive_int, required=True)
    sub.add_argument("--p", type=_parse_probability, required=True)

    sub = add("cdf", "exact distribution function on the dyadic grid")
    sub.add_argument("--n", type=_positive_int, required=True)
    sub.add_argument("--p", type=_parse_probability, required=True)
    sub.add_argument(
        "--resolution",
        type=_positive_int,
        default=None,
        help="dyadic grid resolution (defaults to --n)",
    )

    sub = add("triangle", "exponent triangle row (one-bit counts per leaf)")
    sub.add_argument("--n", type=_non_negative_int, required=True)

    sub = add("moments", "closed-form and enumerated moments")
    sub.add_argument("--n", type=_positive_int, required=True)
    sub.add_argument("--p", type=_parse_probability, required=True)
    sub.add_argument("--max-order", type=_positive_int, default=4)

    sub = add("decompose", "weaving/merging variance split for depths 1..n")
    sub.add_argument("--n", type=_positive_int, required=True)
    sub.add_argument("--p", type=_parse_probability, default=Fraction(1, 2))

    sub = add("sample", "Monte Carlo moment report for exponential sampling")
    sub.add_argument("--n", type=_positive_int, required=True)
    sub.add_argument("--p", type=_parse_probability, required=True)
    sub.add_argument(
        "--parents",
        type=_parse_parent_pair,
        default=(point_mass(0.0), point_mass(1.0)),
        help="pair of populations, e.g. 'gauss:0,1;gauss:1,1'",
    )
    sub.add_argument("--reps", type=_positive_int, default=10000)
    sub.add_argument("--seed", type=int, default=0)

    sub = add("converge", "variance ratio against its limit 1/3 for depths 1..n")
    sub.add_argument("--n", type=_positive_int, default=40)
    sub.add_argument("--p", type=_parse_probability, required=True)

    sub = add("density", "piecewise cell densities of the halving cascade")
    sub.add_argument("--n", type=_positive_int, required=True)
    sub.add_argument("--p", type=_parse_probability, required=True)

    return parser


def parse_config(argv: list[str]) -> RunConfig:
    """Parse and validate argv into a RunConfig; usage errors exit with 1."""
    args = build_parser().parse_args(argv)
    return RunConfig(
        command=args.command,
        n=args.n,
        p=getattr(args, "p", Fraction(1, 2)),
        parents=getattr(args, "parents", None),
        replications=getattr(args, "reps", 1),
        seed=getattr(args, "seed", 0),
        format=args.format,
        output=args.output,
        resolution=getattr(args, "resolution", None),
        max_order=getattr(args, "max_order", 4),
    )


def _cell(value: Any) -> list[tuple[str, str]]:
    # a Fraction renders as an exact string plus a binary64 column
    if isinstance(value, Fraction):
        return [("exact", str(value)), ("approx", repr(float(value)))]
    if isinstance(value, float):
        return [("", repr(value))]
    return [("", str(value))]


def _render_csv(rows: list[dict[str, Any]]) -> str:
    header: list[str] = []
    for key, value in rows[0].items():
        for suffix, _ in _cell(value):
            header.append(f"{key}_{suffix}" if suffix else key)
    lines = [",".join(header)]
    for row in rows:
        cells: list[str] = []
        for value in row.values():
            cells.extend(text for _, text in _cell(value))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _render_json(rows: list[dict[str, Any]]) -> str:
    def convert(value: Any) -> Any:
        if isinstance(value, Fraction):
            return {"exact": str(value), "approx": float(value)}
        return value

    payload = [{key: convert(value) for key, value in row.items()} for row in rows]
    return json.dumps(payload, indent=2) + "\n"


def emit_table(rows: list[dict[str, Any]], format: str, output: str) -> int:
    """Serialize rows to CSV or JSON and write them to a path or stdout."""
    if not rows:
        raise WeaverError("refusing to emit an empty table")
    text = _render_csv(rows) if format == "csv" else _render_json(rows)
    if output == "-":
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    return 0


def _materialization_cap() -> int:
    raw = os.environ.get(CAP_ENV_VAR)
    if raw is None:
        return exact.MATERIALIZATION_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise WeaverError(f"{CAP_ENV_VAR} must be an integer, got {raw!r}")
    print(
        f"warning: materialization cap overridden to {cap} via {CAP_ENV_VAR} "
        f"(default {exact.MATERIALIZATION_CAP})",
        file=sys.stderr,
    )
    return cap


def _pmf_rows(config: RunConfig, cap: int) -> list[dict[str, Any]]:
    params = WeaverParams(n=config.n, p=config.p)
    dist = exact.build_pmf_vector(params, cap=cap)
    assert dist.pmf is not None
    return [
        {"k": k, "y": exact.realization_value(k, config.n), "p": mass}
        for k, mass in enumerate(dist.pmf)
    ]


def _cdf_rows(config: RunConfig, cap: int) -> list[dict[str, Any]]:
    del cap  # O(n) per point, no materialization
    params = WeaverParams(n=config.n, p=config.p)
    resolution = config.resolution if config.resolution is not None else config.n
    rows = []
    for k in range((1 << resolution) + 1):
        point = DyadicPoint(k=k, n=resolution)
        rows.append({"k": k, "v": point.value, "F": exact.cdf_at_dyadic(point, params)})
    return rows


def _triangle_rows(config: RunConfig, cap: int) -> list[dict[str, Any]]:
    row = exact.geometric_triangle_row(config.n, cap=cap)
    return [{"k": k, "exponent": e} for k, e in enumerate(row)]


def _moments_rows(config: RunConfig, cap: int) -> list[dict[str, Any]]:
    params = WeaverParams(n=config.n, p=config.p)
    rows = [
        {"statistic": "mean", "value": analysis.exact_mean(params)},
        {"statistic": "variance", "value": analysis.exact_variance(params)},
        {"statistic": "limit_variance", "value": analysis.limit_variance(config.p)},
    ]
    for j in range(1, config.max_order + 1):
        rows.append(
            {"statistic": f"moment_{j}", "value": analysis.exact_moment(params, j, cap=cap)}
        )
    return rows


def _decompose_rows(config: RunConfig, cap: int) -> list[dict[str, Any]]:
    del cap
    rows = []
    for n in range(1, config.n + 1):
        split = analysis.variance_decomposition(n, config.p)
        rows.append(
            {
                "n": split.n,
                "denom": split.denom,
                "weaving": split.weaving,
                "merging": split.merging,
                "weaving_share": split.weaving_share,
                "merging_share": split.merging_share,
            }
        )
    return rows


def _sample_rows(config: RunConfig, cap: int) -> list[dict[str, Any]]:
    del cap
    assert config.parents is not None
    h0, h1 = standardize_parents(*config.parents)
    report = sampler.monte_carlo_moments(
        config.n, h0, h1, config.p, config.replications, config.seed
    )
    return [
        {
            "n": config.n,
            "p": config.p,
            "seed": config.seed,
            "replications": report.replications,
            "empirical_mean": report.empirical_mean,
            "empirical_variance": report.empirical_variance,
            "exact_mean": report.exact_mean,
            "exact_variance": report.exact_variance,
            "standard_error": report.standard_error,
            "z_score": report.z_score,
        }
    ]


def _converge_rows(config: RunConfig, cap: int) -> list[dict[str, Any]]:
    del cap
    p = config.p
    bernoulli_variance = p * (1 - p)
    rows = []
    for n in range(1, config.n + 1):
        variance = analysis.exact_variance(WeaverParams(n=n, p=p))
        rows.append({"n": n, "variance": variance, "ratio": variance / bernoulli_variance})
    return rows


def _density_rows(config: RunConfig, cap: int) -> list[dict[str, Any]]:
    params = WeaverParams(n=config.n, p=config.p)
    dist = exact.build_pmf_vector(params, cap=cap)
    assert dist.pmf is not None
    scale = 1 << config.n
    return [
        {
            "k": k,
            "left": Fraction(k, scale),
            "right": Fraction(k + 1, scale),
            "density": scale * mass,
        }
        for k, mass in enumerate(dist.pmf)
    ]


_ROW_BUILDERS = {
    "pmf": _pmf_rows,
    "cdf": _cdf_rows,
    "triangle": _triangle_rows,
    "moments": _moments_rows,
    "decompose": _decompose_rows,
    "sample": _sample_rows,
    "converge": _converge_rows,
    "density": _density_rows,
}


def main(argv: list[str] | None = None) -> int:
    config = parse_config(sys.argv[1:] if argv is None else argv)
    try:
        cap = _materialization_cap()
        rows = _ROW_BUILDERS[config.command](config, cap)
        return emit_table(rows, config.format, config.output)
    except WeaverError as err:
        print(f"weaver: error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"weaver: i/o error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())

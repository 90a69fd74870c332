"""Command-line interface.

Subcommands: sample, sweep, moments, validate, purify.  Exit codes:
0 success, 1 validation failure, 2 invalid input or configuration,
3 numerical failure.

A key=value config file can be passed with --config; explicit flags
override file entries.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness, phasespace, validate
from .errors import (
    BadDimension,
    BadModeCount,
    DimensionMismatch,
    EmptyConstraintSet,
    EmptyInput,
    GaussworkError,
    InvalidConfig,
    InvalidCovariance,
    InvalidProfile,
    MalformedFile,
    NotUnitary,
    NumericalFailure,
    RejectionTimeout,
)
from .sampling import RandomStateConfig, ZProfile
from .stats import CSV_COLUMNS

_INVALID_INPUT = (
    MalformedFile,
    InvalidProfile,
    InvalidConfig,
    InvalidCovariance,
    BadModeCount,
    BadDimension,
    DimensionMismatch,
    NotUnitary,
    EmptyConstraintSet,
    EmptyInput,
)
_NUMERICAL = (NumericalFailure, RejectionTimeout)


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise InvalidConfig(f"expected a comma-separated integer list, got {text!r}") from exc


def _float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise InvalidConfig(f"expected a comma-separated float list, got {text!r}") from exc


def load_config_file(path: str) -> dict[str, str]:
    """Read a key=value config file; '#' starts a comment line."""
    entries: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidConfig(f"cannot read config file {path}: {exc}") from exc
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise InvalidConfig(f"config line is not key=value: {raw!r}")
        entries[key.strip().replace("-", "_")] = value.strip()
    return entries


# Per-subcommand option schema: dest -> (converter, default).  A None
# default with required=True must be present on the CLI or in the file.
_SCHEMAS = {
    "sample": {
        "n": (int, None),
        "m": (int, 1),
        "z_profile": (str, None),
        "samples": (int, None),
        "seed": (int, 0),
        "pipeline": (str, "purified"),
        "threads": (int, 1),
        "format": (str, "csv"),
        "out": (str, None),
    },
    "sweep": {
        "n_grid": (_int_list, None),
        "m": (int, 1),
        "z_profile": (str, None),
        "samples": (int, None),
        "seed": (int, 0),
        "pipeline": (str, "purified"),
        "threads": (int, 1),
        "epsilon": (_float_list, list(harness.DEFAULT_EPSILONS)),
        "out": (str, None),
    },
    "moments": {
        "n": (int, None),
        "m": (int, 1),
        "z_profile": (str, None),
        "samples": (int, None),
        "seed": (int, 0),
        "pipeline": (str, "purified"),
        "threads": (int, 1),
        "out": (str, None),
    },
    "validate": {
        "seed": (int, 2024),
        "sizes": (_int_list, [2, 4, 8]),
        "lipschitz_pairs": (int, 1000),
        "cov": (str, None),
    },
    "purify": {},
}

_REQUIRED = {
    "sample": ("n", "z_profile", "samples"),
    "sweep": ("n_grid", "z_profile", "samples"),
    "moments": ("n", "z_profile", "samples"),
    "validate": (),
    "purify": (),
}


def _resolve_options(args: argparse.Namespace) -> dict:
    schema = _SCHEMAS[args.command]
    file_entries = load_config_file(args.config) if getattr(args, "config", None) else {}
    unknown = set(file_entries) - set(schema)
    if unknown:
        raise InvalidConfig(f"unknown config keys for {args.command}: {sorted(unknown)}")
    resolved = {}
    for dest, (convert, default) in schema.items():
        value = getattr(args, dest, None)
        if value is None and dest in file_entries:
            value = convert(file_entries[dest])
        if value is None:
            value = default
        resolved[dest] = value
    missing = [dest for dest in _REQUIRED[args.command] if resolved.get(dest) is None]
    if missing:
        flags = ", ".join("--" + dest.replace("_", "-") for dest in missing)
        raise InvalidConfig(f"missing required option(s): {flags}")
    return resolved


def _write_text(out: str | None, text: str) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _state_config(opts: dict, n_key: str = "n") -> RandomStateConfig:
    return RandomStateConfig(
        n_full=opts[n_key],
        m_sys=opts["m"],
        profile=ZProfile.parse(opts["z_profile"]),
        master_seed=opts["seed"],
        pipeline=opts["pipeline"],
    )


def cmd_sample(opts: dict) -> int:
    config = _state_config(opts)
    records = harness.compute_records(config, opts["samples"], opts["threads"])
    if opts["format"] == "csv":
        _write_text(opts["out"], harness.records_csv(records))
    elif opts["format"] == "json":
        rows = [{col: getattr(r, col) for col in CSV_COLUMNS} for r in records]
        _write_text(opts["out"], _json_text(rows))
    else:
        raise InvalidConfig(f"format must be 'csv' or 'json', got {opts['format']!r}")
    return 0


def cmd_sweep(opts: dict) -> int:
    records, summary = harness.run_sweep(
        n_grid=opts["n_grid"],
        m_sys=opts["m"],
        profile=ZProfile.parse(opts["z_profile"]),
        samples=opts["samples"],
        master_seed=opts["seed"],
        pipeline=opts["pipeline"],
        epsilons=opts["epsilon"],
        threads=opts["threads"],
    )
    _write_text(opts["out"], _json_text(summary))
    if opts["out"] is not None:
        csv_path = Path(opts["out"]).with_suffix(".csv")
        csv_path.write_text(harness.records_csv(records), encoding="utf-8")
    return 0


def cmd_moments(opts: dict) -> int:
    config = _state_config(opts)
    reports = harness.run_moments(config, opts["samples"], opts["threads"])
    _write_text(opts["out"], _json_text([r.to_dict() for r in reports]))
    return 0


def cmd_validate(opts: dict) -> int:
    if opts["cov"] is not None:
        try:
            with open(opts["cov"], "r", encoding="utf-8") as fh:
                gamma = phasespace.read_covariance_text(fh)
        except OSError as exc:
            raise MalformedFile(f"cannot read {opts['cov']}: {exc}") from exc
        result = validate.validate_covariance_matrix(gamma)
        if result.ok:
            print(f"ok {result.name}")
            return 0
        print(f"FAIL {result.name}: {result.detail}", file=sys.stderr)
        return 1
    results = validate.run_suite(
        seed=opts["seed"], sizes=tuple(opts["sizes"]), lipschitz_pairs=opts["lipschitz_pairs"]
    )
    failed = [r for r in results if not r.ok]
    for r in results:
        print(f"ok {r.name}" if r.ok else f"FAIL {r.name}: {r.detail}")
    if failed:
        print(f"first failing assertion: {failed[0].name}", file=sys.stderr)
        return 1
    return 0


def cmd_purify(args: argparse.Namespace) -> int:
    try:
        with open(args.input, "r", encoding="utf-8") as fh:
            gamma = phasespace.read_covariance_text(fh)
    except OSError as exc:
        raise MalformedFile(f"cannot read {args.input}: {exc}") from exc
    m = phasespace.check_covariance(gamma, require_physical=True)
    pure = phasespace.purify(gamma)
    # verify the round trip before writing anything
    roundtrip = float(abs(phasespace.partial_trace(pure, m) - gamma).max())
    if roundtrip > 1e-10:
        raise NumericalFailure(f"purification round trip error {roundtrip:.3e} exceeds 1e-10")
    nus = phasespace.symplectic_eigenvalues(pure).nus
    purity = float(abs(nus - 0.5).max())
    if purity > 1e-8:
        raise NumericalFailure(f"purification impurity {purity:.3e} exceeds 1e-8")
    with open(args.output, "w", encoding="utf-8") as fh:
        phasespace.write_covariance_text(pure, fh)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gausswork",
        description="Monte Carlo laboratory for extractable-work statistics "
        "of random energy-bounded Gaussian states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, with_state: bool = True) -> None:
        p.add_argument("--config", help="key=value config file; flags override")
        if with_state:
            p.add_argument("--m", type=int, help="kept system modes (default 1)")
            p.add_argument(
                "--z-profile",
                dest="z_profile",
                help="vacuum | uniform:<z0> | power:<beta> | flat:<E> | file:<path>",
            )
            p.add_argument("--samples", type=int, help="samples per grid point")
            p.add_argument("--seed", type=int, help="master seed (default 0)")
            p.add_argument("--pipeline", choices=["direct", "purified"])
            p.add_argument("--threads", type=int, help="worker processes (default 1)")
            p.add_argument("--out", help="output path (default stdout)")

    p_sample = sub.add_parser("sample", help="emit one record per sampled state")
    add_common(p_sample)
    p_sample.add_argument("--n", type=int, help="full system modes before tracing")
    p_sample.add_argument("--format", choices=["csv", "json"])
    p_sample.set_defaults(fn=lambda args: cmd_sample(_resolve_options(args)))

    p_sweep = sub.add_parser("sweep", help="n-grid sweep with tail table and slope fit")
    add_common(p_sweep)
    p_sweep.add_argument("--n-grid", dest="n_grid", type=_int_list, help="e.g. 16,32,64")
    p_sweep.add_argument("--epsilon", type=_float_list, help="tail thresholds, e.g. 0.05,0.1")
    p_sweep.set_defaults(fn=lambda args: cmd_sweep(_resolve_options(args)))

    p_moments = sub.add_parser("moments", help="analytic vs Monte Carlo moment table")
    add_common(p_moments)
    p_moments.add_argument("--n", type=int, help="full system modes before tracing")
    p_moments.set_defaults(fn=lambda args: cmd_moments(_resolve_options(args)))

    p_validate = sub.add_parser("validate", help="run the invariant self-checks")
    p_validate.add_argument("--config", help="key=value config file; flags override")
    p_validate.add_argument("--seed", type=int)
    p_validate.add_argument("--sizes", type=_int_list, help="mode counts, e.g. 2,4,8")
    p_validate.add_argument("--lipschitz-pairs", dest="lipschitz_pairs", type=int)
    p_validate.add_argument("--cov", help="validate one covariance text file instead")
    p_validate.set_defaults(fn=lambda args: cmd_validate(_resolve_options(args)))

    p_purify = sub.add_parser("purify", help="purify a covariance text file")
    p_purify.add_argument("input", help="input covariance file")
    p_purify.add_argument("output", help="output covariance file")
    p_purify.set_defaults(fn=cmd_purify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except _NUMERICAL as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except _INVALID_INPUT as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2
    except GaussworkError as exc:  # unmapped package errors default to invalid input
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()

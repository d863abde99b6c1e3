"""Command-line entry point: ``solve``, ``ensemble`` and ``structure``.

Exit status is 0 on success, 1 when a requested check fails and 2 on
usage or configuration errors.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .ensemble import EnsembleSpec, format_number, records_to_csv, run_ensemble
from .errors import InvalidSpec, LandscapeError
from .landscape import (
    BOUND_TOL,
    GREEN_NEGATIVITY_RTOL,
    bound_margins,
    green_direct,
    green_series,
    landscape_function,
    verify_landscape_bound,
)
from .linalg import SymmetricEigenDecomposition, max_norm, operator_norm, symmetric_eigen
from .operator import HoppingProfile, PotentialVector, assemble, hopping_norm_bound
from .structure import (
    block_diagonal_chains,
    block_permutation,
    build_offdiagonal,
    conjugate_by_permutation,
    verify_strict_gap,
)

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE = 0, 1, 2
CHECKS = ("positivity", "bound", "spectrum", "norm-lemmas")
SITES_COLUMNS = ("j", "v_j", "u_j", "lambda_min_u_j")


class ConfigError(InvalidSpec):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


# ---------------------------------------------------------------- config


def _one_of(field: str, value, shorthand, keys):
    """Resolve a ``{key: value}`` choice, also accepting a bare number or list."""
    if isinstance(value, bool) or value is None:
        raise ConfigError(f"field {field!r}: expected an object, number or list")
    if isinstance(value, (int, float)):
        return shorthand[0], value
    if isinstance(value, list):
        return shorthand[1], value
    if not isinstance(value, dict):
        raise ConfigError(f"field {field!r}: expected an object, number or list")
    present = [k for k in keys if k in value]
    unknown = set(value) - set(keys)
    if unknown or len(present) != 1:
        raise ConfigError(f"field {field!r}: give exactly one of {', '.join(keys)}")
    return present[0], value[present[0]]


def parse_instance_config(data) -> dict:
    """Validate an instance configuration and build its potential and hopping profile."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    try:
        n = data["lattice_size"]
    except KeyError:
        raise ConfigError("field 'lattice_size' is required") from None
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ConfigError("field 'lattice_size': must be a positive integer")

    kind, value = _one_of("potential", data.get("potential"), ("constant", "values"), ("constant", "values"))
    try:
        potential = PotentialVector.constant(n, value) if kind == "constant" else PotentialVector(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field 'potential': {exc}") from None
    if len(potential) != n:
        raise ConfigError(f"field 'potential': expected {n} values, got {len(potential)}")

    kind, value = _one_of(
        "hopping", data.get("hopping"), ("nearest_neighbor", "values"), ("values", "nearest_neighbor", "geometric")
    )
    try:
        if kind == "values":
            hopping = HoppingProfile(value, n)
        elif kind == "nearest_neighbor":
            hopping = HoppingProfile.nearest_neighbor(n, float(value))
        else:
            hopping = HoppingProfile.geometric(n, float(value))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field 'hopping': {exc}") from None

    solver = data.get("solver", "direct")
    order = data.get("series_order")
    if isinstance(solver, dict) and set(solver) == {"series"}:
        order = solver["series"]
        solver = "series"
    if solver not in ("direct", "series"):
        raise ConfigError("field 'solver': expected 'direct', 'series' or {\"series\": K}")
    if solver == "series":
        order = 20 if order is None else order
        if isinstance(order, bool) or not isinstance(order, int) or order < 0:
            raise ConfigError("field 'solver': series order must be a nonnegative integer")

    checks = data.get("checks", "all")
    if checks == "all":
        checks = list(CHECKS)
    if not isinstance(checks, list) or any(c not in CHECKS for c in checks):
        raise ConfigError(f"field 'checks': expected 'all' or a list drawn from {list(CHECKS)}")

    override = data.get("override_violated", False)
    if not isinstance(override, bool):
        raise ConfigError("field 'override_violated': expected true or false")

    return {
        "potential": potential,
        "hopping": hopping,
        "solver": solver,
        "series_order": order,
        "checks": checks,
        "override_violated": override,
    }


def _load_json(path) -> object:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating, float)):
        return None if not math.isfinite(float(x)) else float(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(_jsonable(payload), indent=2, allow_nan=False) + "\n")


# ---------------------------------------------------------------- solve


def recompute_checks(report: dict) -> dict:
    """Re-derive pass/fail flags from the data stored in a ``report.json``."""
    out = {}
    checks = report["checks"]
    if "error" in report:
        return {name: False for name in checks}
    u = np.array(report["u"])
    eig = SymmetricEigenDecomposition(np.array(report["eigenvalues"]), np.array(report["eigenvectors"]))
    if "positivity" in checks:
        out["positivity"] = bool(
            np.all(u > 0)
            and report["min_green_entry"] >= -GREEN_NEGATIVITY_RTOL * report["max_abs_green_entry"]
        )
    if "bound" in checks:
        out["bound"] = bool(np.all(bound_margins(u, eig) >= -BOUND_TOL))
    if "spectrum" in checks:
        out["spectrum"] = bool(eig.eigenvalues[0] > 0)
    if "norm-lemmas" in checks:
        norms = report["norms"]
        hop_ok = norms["hopping_norm"] <= norms["hopping_norm_bound"]
        if norms["hopping_norm_bound"] > 0:
            hop_ok = norms["hopping_norm"] < norms["hopping_norm_bound"]
        inv_ok = norms["inverse_potential_norm"] <= norms["max_inverse_potential"] * (1 + 1e-12)
        out["norm-lemmas"] = bool(hop_ok and inv_ok)
    if "series" in checks:
        cert = report["certificate"]
        out["series"] = bool(cert["series_error"] <= max(cert["error_bound"], cert["roundoff_floor"]))
    return out


def cmd_solve(config: dict, out_dir: Path, override: bool = False, series_order: int | None = None) -> int:
    if series_order is not None:
        config = dict(config, solver="series", series_order=series_order)
    override = override or config["override_violated"]
    op = assemble(config["potential"], config["hopping"])
    checks = list(config["checks"])
    if config["solver"] == "series":
        checks.append("series")

    report = {
        "lattice_size": op.n,
        "regime": op.regime.kind.value,
        "margin": op.regime.margin,
        "hop_sum": op.hopping.hop_sum,
        "potential": op.potential.values,
        "hopping": op.hopping.coefficients,
        "solver": config["solver"],
        "override_violated": override,
        "checks": {name: False for name in checks},
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        direct = green_direct(op, override=override)
        green = direct
        if config["solver"] == "series":
            green = green_series(op, config["series_order"], override=override)
        u = landscape_function(green)
        eig = symmetric_eigen(op.h)
        landscape = verify_landscape_bound(op, u, eig, green)
    except LandscapeError as exc:
        report["error"] = f"{type(exc).__name__}: {exc}"
        report["passed"] = False
        _write_json(out_dir / "report.json", report)
        print(f"solve: {report['error']}", file=sys.stderr)
        return EXIT_CHECK_FAILED

    inv_v = 1.0 / op.potential.values
    report.update(
        u=u,
        eigenvalues=eig.eigenvalues,
        eigenvectors=eig.eigenvectors,
        bound_margins=landscape.margins,
        min_bound_margin=landscape.min_margin,
        min_green_entry=green.min_entry,
        max_abs_green_entry=green.max_abs_entry,
        direct_residual=direct.residual,
        norms={
            "hopping_norm": operator_norm(op.hopping_matrix),
            "hopping_norm_bound": hopping_norm_bound(op.hopping),
            "inverse_potential_norm": operator_norm(np.diag(inv_v)),
            "max_inverse_potential": float(inv_v.max()),
        },
    )
    if green.certificate is not None:
        cert = green.certificate
        report["certificate"] = {
            "contraction_q": cert.contraction_q,
            "analytic_q": cert.analytic_q,
            "truncation_order": cert.truncation_order,
            "error_bound": cert.error_bound,
            "series_error": max_norm(green.g - direct.g),
            # differences below a few ulps of G are not resolvable in double precision
            "roundoff_floor": op.n * float(np.finfo(np.float64).eps) * direct.max_abs_entry,
        }
    report["checks"] = recompute_checks(report)
    report["passed"] = all(report["checks"].values())
    _write_json(out_dir / "report.json", report)

    lam_min = float(eig.eigenvalues[0])
    rows = [",".join(SITES_COLUMNS)]
    for j, (v, uj) in enumerate(zip(op.potential.values, u), start=1):
        rows.append(",".join(format_number(x) for x in (j, v, uj, lam_min * uj)))
    (out_dir / "sites.csv").write_text("\n".join(rows) + "\n")

    print(f"regime {op.regime.kind.value} (margin {op.regime.margin:.6g}), n = {op.n}")
    print(f"min u = {u.min():.6g}, min eigenvalue = {lam_min:.6g}, min bound margin = {landscape.min_margin:.3e}")
    for name, ok in report["checks"].items():
        print(f"  {name:<12} {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


# ---------------------------------------------------------------- ensemble


def cmd_ensemble(spec: EnsembleSpec, out_dir: Path, workers: int = 1, series_order: int = 20) -> int:
    summary = run_ensemble(spec, workers=workers, series_order=series_order)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_json(out_dir / "summary.json", summary.to_dict())
    (out_dir / "instances.csv").write_text(records_to_csv(summary.records))
    print(
        f"{len(summary.records)} instances, target {spec.regime_target.kind.value}: "
        f"positivity_ok {summary.positivity_ok_count}, bound_ok {summary.bound_ok_count}, "
        f"failures {len(summary.failures)}"
    )
    for index, reason in summary.failures[:10]:
        print(f"  instance {index}: {reason}", file=sys.stderr)
    return EXIT_OK if summary.passed else EXIT_CHECK_FAILED


# ---------------------------------------------------------------- structure


def structure_report(n: int, j: int) -> dict:
    a = build_offdiagonal(n, j)
    blocks = block_permutation(n, j)
    conjugated = conjugate_by_permutation(a, blocks.permutation)
    exact = bool(np.array_equal(conjugated, block_diagonal_chains(blocks.block_sizes)))
    try:
        gap = verify_strict_gap(n, j)
    except LandscapeError:
        gap = 2.0 - operator_norm(a)
    return {
        "n": n,
        "j": j,
        "permutation": [p + 1 for p in blocks.permutation],
        "block_sizes": list(blocks.block_sizes),
        "norm_before": operator_norm(a),
        "norm_after": operator_norm(conjugated),
        "spectral_gap": gap,
        "block_structure_exact": exact,
        "passed": exact and gap > 0,
    }


def cmd_structure(n: int, j: int, out_dir: Path | None = None) -> int:
    report = structure_report(n, j)
    print(f"A_{j}({n}): permutation {tuple(report['permutation'])}, blocks {tuple(report['block_sizes'])}")
    print(f"norm before {report['norm_before']:.17g}, after {report['norm_after']:.17g}")
    print(f"spectral gap 2 - ||A|| = {report['spectral_gap']:.17g}")
    print(f"block structure exact: {report['block_structure_exact']}")
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        _write_json(out_dir / "structure.json", report)
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


# ---------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="landscape-lattice", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="landscape function and checks for one operator")
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--out-dir", type=Path, default=Path("."))
    p.add_argument("--override-violated", action="store_true")
    p.add_argument("--series-order", type=int, default=None, metavar="K")

    p = sub.add_parser("ensemble", help="run a seeded random ensemble")
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--out-dir", type=Path, default=Path("."))
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--series-order", type=int, default=20, metavar="K")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("structure", help="block form and spectral gap of A_j(n)")
    p.add_argument("n", type=int)
    p.add_argument("j", type=int)
    p.add_argument("--out-dir", type=Path, default=None)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "solve":
            if args.series_order is not None and args.series_order < 0:
                raise ConfigError("--series-order must be nonnegative")
            config = parse_instance_config(_load_json(args.config))
            return cmd_solve(config, args.out_dir, args.override_violated, args.series_order)
        if args.command == "ensemble":
            data = _load_json(args.config)
            if not isinstance(data, dict):
                raise ConfigError("ensemble config must be a JSON object")
            if args.seed is not None:
                data = dict(data, seed=args.seed)
            if args.workers < 1 or args.series_order < 0:
                raise ConfigError("--workers must be >= 1 and --series-order >= 0")
            return cmd_ensemble(EnsembleSpec.from_dict(data), args.out_dir, args.workers, args.series_order)
        n, j = args.n, args.j
        if n < 1 or not (1 <= j <= n - 1 or n == j == 1):
            raise ConfigError(f"need 1 <= j <= n - 1, got n={n}, j={j}")
        return cmd_structure(n, j, args.out_dir)
    except InvalidSpec as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED

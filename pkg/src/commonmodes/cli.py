"""
Command-line front end.

    commonmodes run <config>           evaluate the configured points
    commonmodes sweep <config>         same, but requires a sweep evaluation
    commonmodes overlap-scan <config>  vary the momentum separation of two Gaussians
    commonmodes oracle-check <config>  compare against the Fock-space oracle at random points

Exit status: 0 on success, 1 when an oracle comparison exceeds tolerance,
2 on configuration or I/O errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import csv
import io
import logging
import os
import sys
import tempfile
import warnings
from pathlib import Path

import numpy as np

from . import fock_oracle
from .config import ExperimentConfig, load_config
from .dynamics import SpacetimePoint
from .errors import CommonModesError, OscillationWarning, ValidationError
from .interference import overlap_set, position_sweep
from .momentum_modes import GaussianModes, make_gaussian

log = logging.getLogger("commonmodes")

ORACLE_TOL = 1e-8
EXIT_OK, EXIT_ORACLE, EXIT_ERROR = 0, 1, 2


def fmt(value: float) -> str:
    return format(float(value), ".17g")


def _position_names(d: int) -> list[str]:
    return [f"r{i + 1}" for i in range(d)]


def evaluate(config: ExperimentConfig, points: list[SpacetimePoint], oracle: bool) -> tuple[list[str], list[list[float]]]:
    """Result rows for ``points``, grouped per time but emitted in input order."""
    d = config.grid.dimension
    header = _position_names(d) + ["t", "total", "term_mu_mu", "term_eta_eta", "interference"]
    problem = None
    if oracle:
        header += ["oracle_total", "abs_deviation"]
        problem = fock_oracle.from_distributions(
            config.eta, config.mu, config.constants, max_modes=config.max_modes)

    by_time: dict[float, list[int]] = {}
    for i, pt in enumerate(points):
        by_time.setdefault(pt.time, []).append(i)
    results = [None] * len(points)
    for t, idx in by_time.items():
        positions = np.array([points[i].position for i in idx])
        for i, res in zip(idx, position_sweep(config.eta, config.mu, positions, t, config.constants)):
            results[i] = res

    rows = []
    for pt, res in zip(points, results):
        row = [*pt.position, pt.time, res.total, res.term_mu_mu, res.term_eta_eta, res.interference]
        if problem is not None:
            ref = problem.density(pt)
            row += [ref, abs(ref - res.total)]
        rows.append(row)
    return header, rows


def overlap_scan(config: ExperimentConfig, separations) -> tuple[list[str], list[list[float]]]:
    """|c|, state norm and max |interference| as the mu Gaussian slides away from eta.

    mu keeps its width and carrier phase from the configuration; its centre is
    eta's centre shifted by each separation along the first axis.
    """
    if config.grid.dimension != 1:
        raise ValidationError("grid.dimension: overlap-scan needs a 1D grid")
    eta_desc = config.eta.descriptor
    if not isinstance(eta_desc, GaussianModes) or config.source_mu.kind != "gaussian":
        raise ValidationError("source_eta.kind: overlap-scan needs Gaussian sources")
    if not separations:
        raise ValidationError("scan.separations: no separations given")
    mu_desc = config.mu.descriptor

    rows = []
    for sep in separations:
        center = eta_desc.center[0] + sep
        try:
            mu = make_gaussian(config.grid, center, mu_desc.width, mu_desc.carrier_phase, config.constants)
        except CommonModesError as exc:
            raise ValidationError(f"scan.separations: separation {sep:g}: {exc}") from None
        ov = overlap_set(config.eta, mu)
        worst = 0.0
        for t in config.evaluation.times:
            res = position_sweep(config.eta, mu, config.evaluation.positions, t, config.constants)
            worst = max(worst, max(abs(r.interference) for r in res))
        rows.append([sep, abs(ov.c), ov.state_norm, worst])
    return ["separation", "abs_c", "state_norm", "max_abs_interference"], rows


def random_points(config: ExperimentConfig, seed: int) -> list[SpacetimePoint]:
    rng = np.random.default_rng(seed)
    chk = config.check
    lo, hi = np.array(chk["box_lower"]), np.array(chk["box_upper"])
    t0, t1 = chk["time_range"]
    n = chk["points"]
    positions = lo + (hi - lo) * rng.random((n, len(lo)))
    times = t0 + (t1 - t0) * rng.random(n)
    return [SpacetimePoint(r, t) for r, t in zip(positions, times)]


def render_csv(header, rows, meta: dict) -> str:
    buf = io.StringIO()
    for key, value in meta.items():
        buf.write(f"# {key}: {value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_atomic(path: Path, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="commonmodes",
        description="Single-detection interference of two bosons from independent multimode sources.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in [
        ("run", "evaluate the configured point, sweep or time sweep"),
        ("sweep", "like run, but the configuration must describe a sweep"),
        ("overlap-scan", "scan the momentum separation of two Gaussian sources"),
        ("oracle-check", "compare with the Fock-space oracle at random spacetime points"),
    ]:
        p = sub.add_parser(name, help=text)
        p.add_argument("config", type=Path)
        p.add_argument("--output", type=Path, help="CSV path (default: output.path or stdout)")
        p.add_argument("--oracle", action="store_true", help="also evaluate with the Fock-space oracle")
        p.add_argument("--max-modes", type=int, help="oracle mode cap (default: oracle.max_modes)")
        p.add_argument("--seed", type=int, default=0, help="seed for oracle-check points")
        p.add_argument("--quiet", action="store_true", help="suppress diagnostics")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.INFO,
                        format="%(name)s: %(message)s")
    if args.quiet:
        warnings.simplefilter("ignore", OscillationWarning)
    if args.seed < 0 or args.seed >= 2**64:
        log.error("--seed must be an unsigned 64-bit integer")
        return EXIT_ERROR

    try:
        config = load_config(args.config)
        if args.max_modes is not None:
            if args.max_modes < 1:
                raise ValidationError("--max-modes: must be at least 1")
            config = dataclasses.replace(config, max_modes=args.max_modes)
        meta = {"command": args.command, "config_sha256": config.digest}

        if args.command == "overlap-scan":
            header, rows = overlap_scan(config, config.scan_separations)
            oracle = False
        else:
            if args.command == "sweep" and config.evaluation.kind == "point":
                raise ValidationError("evaluation.kind: sweep needs 'sweep' or 'time_sweep'")
            if args.command == "oracle-check":
                points = random_points(config, args.seed)
                oracle = True
                meta["seed"] = args.seed
            else:
                points = config.evaluation.points()
                oracle = args.oracle or config.oracle
            if oracle:
                meta["max_modes"] = config.max_modes
            header, rows = evaluate(config, points, oracle)

        text = render_csv(header, rows, meta)
        target = args.output or config.output_path
        if target is None:
            sys.stdout.write(text)
        else:
            write_atomic(target, text)
    except CommonModesError as exc:
        log.error("%s", exc)
        return EXIT_ERROR
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_ERROR

    if oracle:
        worst = max((row[-1] for row in rows), default=0.0)
        log.info("oracle max abs deviation %.3g over %d points", worst, len(rows))
        if worst > ORACLE_TOL:
            log.error("oracle deviation %.3g exceeds %.0e", worst, ORACLE_TOL)
            return EXIT_ORACLE
    elif target is not None:
        log.info("wrote %d rows to %s", len(rows), target)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

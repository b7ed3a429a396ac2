#!/usr/bin/env python3
"""
Command-line front door for the blow-up verification lab.

Subcommands:
    simulate    advance axisymmetric / 2D Euler / Boussinesq fields, write a
                trajectory and a conservation report
    rescale     extract a near-maximal blow-up sequence from a trajectory and
                write the rescaled window fields
    validate    symmetry, decay and sign checks of an ansatz
    certify     route an ansatz to its certifiers and run them
    datacheck   pointwise vorticity consistency of ingested profile data
    report      summarize certificate reports and export plot data

Every run writes ``<hash>-config.json`` (the frozen effective configuration)
next to its outputs; all output names start with the same hash.

Exit codes: 0 completed, 2 every requested certifier returned
HypothesesNotMet (or no certifier applies), 3 input error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from config import get_current_config, get_default, get_output_dir, get_thread_count
from models.schemas import (
    CenterEntry,
    CertificateReport,
    ConservationReport,
    DataCheckReport,
    ErrorResult,
    RunConfig,
    SequenceManifest,
)
from tools.certify_tools import CERTIFIERS, route_proposition, run_certifiers, screen_rectangles
from tools.field_tools import Grid2D, ScalarField2D, TimeSeries, VectorField2D, require_same_grid
from tools.io_tools import load_profile_csv, load_scalar_csv, read_trajectory, write_field_csv, write_trajectory
from tools.plot_tools import emit_plotdata
from tools.profile_tools import load_ansatz, pointwise_vorticity_check, symmetry_decay_check
from tools.rescale_tools import (
    RescaleWindow,
    classify_domain,
    find_near_maximal,
    rescale_field,
)
from tools.simulation_tools import (
    AxiState,
    BoussinesqState,
    Euler2DState,
    axisym_divergence,
    gamma_conservation,
    gamma_lp_drift,
    run_axisym,
    run_boussinesq,
    run_euler2d,
    swirl_bound_check,
)
from utils import CSVFormatError, config_hash, read_json, write_json

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NOT_MET = 2
EXIT_INPUT = 3

SYSTEM_FIELDS = {
    "axisym": ("vr", "vtheta", "v3"),
    "euler2d": ("omega",),
    "boussinesq": ("omega", "h"),
}

DATACHECK_COLUMNS = ("W", "dV1_dz2", "dV2_dz1")


class UsageError(ValueError):
    """Bad command-line usage; mapped to exit code 3 like any input error."""


class LabArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _named_path(value: str) -> tuple[str, str]:
    name, sep, path = value.partition("=")
    if not sep or not name or not path:
        raise argparse.ArgumentTypeError(f"expected name=path, got {value!r}")
    return name, path


def build_parser() -> LabArgumentParser:
    parser = LabArgumentParser(
        prog="blowup-lab",
        description="Blow-up rescaling and self-similar profile certificates for axisymmetric Euler flows",
    )
    parser.add_argument("--output-dir", "-o", default=None, help="Output directory (default: BLOWUP_LAB_OUTPUT_DIR)")
    parser.add_argument("--threads", type=int, default=None, help="Worker threads for independent runs")
    parser.add_argument("--debug", action="store_true", help="Enable debug logging")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    sim = sub.add_parser("simulate", help="Advance initial fields in time")
    sim.add_argument("--system", choices=sorted(SYSTEM_FIELDS), required=True)
    sim.add_argument("--input", action="append", type=_named_path, default=[], metavar="NAME=PATH",
                     help="Initial field CSV, e.g. omega=omega0.csv")
    sim.add_argument("--dt", type=float, default=1e-3)
    sim.add_argument("--steps", type=int, default=0)
    sim.add_argument("--cfl", type=float, default=get_default("simulation", "cfl_limit"))
    sim.add_argument("--orientation", choices=["upper_minus", "upper_plus", "left"], default="upper_minus")
    sim.add_argument("--flux", type=float, default=0.0, help="Stream-function jump across the channel")

    res = sub.add_parser("rescale", help="Rescale a trajectory around near-maximal points")
    res.add_argument("--trajectory", required=True, help="Trajectory manifest written by simulate")
    res.add_argument("--alpha", type=float, default=0.5)
    res.add_argument("--near", type=float, default=0.9, help="Near-maximal factor in (0, 1]")
    res.add_argument("--index", type=int, default=-1, help="Sequence entry to rescale (default: last)")
    res.add_argument("--window", type=float, default=1.0, help="Half width of the spatial window")
    res.add_argument("--window-nodes", type=int, default=33)

    val = sub.add_parser("validate", help="Symmetry, decay and sign checks of an ansatz")
    val.add_argument("--ansatz", required=True)

    cer = sub.add_parser("certify", help="Run contradiction certifiers on an ansatz")
    cer.add_argument("--ansatz", required=True)
    cer.add_argument("--prop", default="auto", help="'auto' or a comma-separated list of certifiers")

    dat = sub.add_parser("datacheck", help="Pointwise vorticity consistency of ingested data")
    dat.add_argument("--profiles", required=True, help="CSV with columns W,dV1_dz2,dV2_dz1")
    dat.add_argument("--accuracy", type=float, default=get_default("profile", "data_accuracy"))
    dat.add_argument("--cells", type=int, default=2, help="Rectangle size for the screening, in cells")

    rep = sub.add_parser("report", help="Summarize certificate reports")
    rep.add_argument("reports", nargs="+", help="CertificateReport JSON files")
    return parser


# =============================================================================
# Run configuration
# =============================================================================


def _resolve_inputs(args: argparse.Namespace) -> dict[str, str]:
    inputs: dict[str, str] = {}
    if args.subcommand == "simulate":
        for name, path in args.input:
            inputs[name] = str(Path(path).resolve())
    elif args.subcommand == "rescale":
        inputs["trajectory"] = str(Path(args.trajectory).resolve())
    elif args.subcommand in ("validate", "certify"):
        inputs["ansatz"] = str(Path(args.ansatz).resolve())
    elif args.subcommand == "datacheck":
        inputs["profiles"] = str(Path(args.profiles).resolve())
    else:
        for k, path in enumerate(args.reports):
            inputs[f"report{k}"] = str(Path(path).resolve())
    for name, path in inputs.items():
        if not Path(path).is_file():
            raise FileNotFoundError(f"input {name}: no such file {path}")
    return inputs


def _parameters(args: argparse.Namespace) -> dict:
    skip = {"subcommand", "output_dir", "threads", "debug", "input", "trajectory", "ansatz", "profiles", "reports"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def make_run_config(args: argparse.Namespace) -> RunConfig:
    threads = args.threads if args.threads is not None else get_thread_count()
    return RunConfig(
        subcommand=args.subcommand,
        inputs=_resolve_inputs(args),
        output_dir=str(Path(args.output_dir or get_output_dir()).resolve()),
        parameters=_parameters(args),
        threads=threads,
    )


def _write_config(cfg: RunConfig) -> tuple[Path, str]:
    payload = cfg.model_dump()
    prefix = config_hash(payload)
    out = Path(cfg.output_dir)
    write_json(out / f"{prefix}-config.json", {"run": payload, "defaults": get_current_config()})
    return out, prefix


# =============================================================================
# Subcommands
# =============================================================================


def _load_inputs(cfg: RunConfig, system: str) -> dict[str, ScalarField2D]:
    needed = SYSTEM_FIELDS[system]
    missing = [n for n in needed if n not in cfg.inputs]
    if missing:
        raise UsageError(f"--input: system {system} needs fields {list(needed)}, missing {missing}")
    extra = sorted(set(cfg.inputs) - set(needed))
    if extra:
        raise UsageError(f"--input: unexpected fields {extra} for system {system}")
    fields = {n: load_scalar_csv(cfg.inputs[n]) for n in needed}
    require_same_grid(*fields.values())
    return fields


def cmd_simulate(cfg: RunConfig, out: Path, prefix: str) -> int:
    p = cfg.parameters
    system, dt, steps, cfl = p["system"], p["dt"], p["steps"], p["cfl"]
    if steps < 0:
        raise UsageError(f"--steps must be >= 0, got {steps}")
    fields = _load_inputs(cfg, system)
    grid = next(iter(fields.values())).grid

    if system == "axisym":
        state = AxiState(grid, fields["vr"].values, fields["vtheta"].values, fields["v3"].values)
        states = run_axisym(state, dt, steps, cfl)
        snaps = [
            {"vr": ScalarField2D(grid, s.vr), "vtheta": ScalarField2D(grid, s.vtheta), "v3": ScalarField2D(grid, s.v3)}
            for s in states
        ]
        gamma0 = float(np.max(np.abs(states[0].gamma)))
        sups = [float(np.max(np.abs(s.gamma))) for s in states]
        report = ConservationReport(
            system=system, steps=steps, dt=dt, times=[s.time for s in states],
            gamma_sup_drift=gamma_conservation(states) if steps else None,
            gamma_lp_drift={str(n): gamma_lp_drift(states, n) for n in (1, 2, 3)} if steps else {},
            swirl_violation=max(swirl_bound_check(s, gamma0) for s in states),
            max_divergence=max(float(np.max(np.abs(axisym_divergence(s).values))) for s in states),
            omega_range=[[float(s.meridian_vorticity().min()), float(s.meridian_vorticity().max())] for s in states],
        )
        series = {"gamma_sup_drift": (report.times, [abs(x - sups[0]) / sups[0] if sups[0] else x for x in sups])}
    else:
        flow = Euler2DState.from_vorticity(grid, fields["omega"].values, flux=p["flux"])
        if system == "euler2d":
            states = run_euler2d(flow, dt, steps, cfl)
            flows = states
        else:
            states = run_boussinesq(BoussinesqState(flow, fields["h"].values, p["orientation"]), dt, steps, cfl)
            flows = [s.flow for s in states]
        snaps = []
        for s, f in zip(states, flows):
            snap = {name: ScalarField2D(grid, getattr(f, name)) for name in ("omega", "psi", "u1", "u2")}
            if system == "boussinesq":
                snap["h"] = ScalarField2D(grid, s.h)
            snaps.append(snap)
        report = ConservationReport(
            system=system, steps=steps, dt=dt, times=[f.time for f in flows],
            max_divergence=max(float(np.max(np.abs(f.divergence()))) for f in flows),
            omega_range=[[float(f.omega.min()), float(f.omega.max())] for f in flows],
        )
        series = {"omega_max": (report.times, [float(np.max(np.abs(f.omega))) for f in flows])}

    write_trajectory(out, prefix, report.times, snaps)
    write_json(out / f"{prefix}-conservation.json", report.model_dump())
    emit_plotdata(out, prefix, series=series)
    logger.info("simulate %s: %d steps, report %s-conservation.json", system, steps, prefix)
    return EXIT_OK


def cmd_rescale(cfg: RunConfig, out: Path, prefix: str) -> int:
    p = cfg.parameters
    comps = read_trajectory(cfg.inputs["trajectory"])
    pair = ("vr", "v3") if "vr" in comps else ("u1", "u2")
    if not all(name in comps for name in pair):
        raise UsageError(f"trajectory has no velocity components {pair}")
    first = comps[pair[0]]
    velocity = TimeSeries(
        first.times,
        tuple(VectorField2D(a.grid, a.values, b.values) for a, b in zip(first.snapshots, comps[pair[1]].snapshots)),
    )
    seq, failures = find_near_maximal(velocity, p["near"], p["alpha"])
    if len(seq) == 0:
        raise ValueError(f"no snapshot has a near-maximal point with factor {p['near']}")
    try:
        domain = classify_domain(seq, p["alpha"])
    except ValueError as exc:
        logger.info("domain classification skipped: %s", exc)
        domain = None
    manifest = SequenceManifest(
        alpha=p["alpha"], c=seq.c,
        centers=[CenterEntry(x=list(x), t=t, Q=q, index=k)
                 for x, t, q, k in zip(seq.centers, seq.times, seq.Q, seq.indices)],
        domain_class=domain.tag if domain else None,
        domain_offset=domain.offset if domain else None,
        failures=failures,
    )
    write_json(out / f"{prefix}-sequence.json", manifest.model_dump())

    k = p["index"]
    if not -len(seq) <= k < len(seq):
        raise UsageError(f"--index {k} is outside the sequence of {len(seq)} centres")
    L, n = p["window"], p["window_nodes"]
    window = RescaleWindow(Grid2D(-L, L, -L, L, n, n), (0.0,))
    rescaled = rescale_field({name: comps[name] for name in pair}, seq.centers[k], seq.times[k], seq.Q[k],
                             p["alpha"], window)
    write_field_csv(out / f"{prefix}-rescaled.csv", window.grid,
                    {name: rescaled.components[name][0] for name in pair})
    logger.info("rescale: %d centres, entry %d written", len(seq), k)
    return EXIT_OK


def cmd_validate(cfg: RunConfig, out: Path, prefix: str) -> int:
    ansatz = load_ansatz(cfg.inputs["ansatz"])
    report = symmetry_decay_check(ansatz)
    write_json(out / f"{prefix}-validation.json", report.model_dump())
    return EXIT_OK


def cmd_certify(cfg: RunConfig, out: Path, prefix: str) -> int:
    ansatz = load_ansatz(cfg.inputs["ansatz"])
    prop = cfg.parameters["prop"]
    route = route_proposition(ansatz)
    if prop == "auto":
        names = route.certifiers
    else:
        names = [n.strip() for n in prop.split(",") if n.strip()]
        unknown = [n for n in names if n not in CERTIFIERS]
        if unknown:
            raise UsageError(f"--prop: unknown certifiers {unknown} (have {sorted(CERTIFIERS)})")
    write_json(out / f"{prefix}-route.json", route.model_dump())
    if not names:
        logger.warning("no certifier applies: %s", route.rationale)
        return EXIT_NOT_MET
    reports = run_certifiers(ansatz, names, cfg.threads)
    for report in reports:
        write_json(out / f"{prefix}-{report.certifier}.json", report.model_dump())
        logger.info("%s: %s", report.certifier, report.verdict)
    emit_plotdata(out, prefix, reports=reports)
    if all(r.verdict == "HypothesesNotMet" for r in reports):
        return EXIT_NOT_MET
    return EXIT_OK


def cmd_datacheck(cfg: RunConfig, out: Path, prefix: str) -> int:
    p = cfg.parameters
    table = load_profile_csv(cfg.inputs["profiles"])
    missing = [c for c in DATACHECK_COLUMNS if c not in table]
    if missing:
        raise CSVFormatError(f"'# columns' line must name {list(DATACHECK_COLUMNS)}; missing {missing}",
                             cfg.inputs["profiles"], 2)
    W = table["W"].values
    check = pointwise_vorticity_check(W, table["dV1_dz2"].values, table["dV2_dz1"].values, p["accuracy"])
    z1, z2 = table.grid.mesh()
    negative = [
        {"node": list(table.mesh_index(int(i), int(j))), "value": float(W[i, j])}
        for i, j in np.argwhere((W < 0.0) & (z1 > 0.0) & (z2 > 0.0))
    ]
    report = DataCheckReport(
        accuracy=check.accuracy,
        nodes_checked=int(W.size),
        flagged=[
            {"node": list(table.mesh_index(i, j)), "mismatch": float(check.mismatch[i, j])}
            for i, j in check.flagged
        ],
        max_mismatch=check.max_mismatch,
        negative_w=negative,
        rectangles=screen_rectangles(W, table.grid, (table.i0, table.j0), p["cells"]),
    )
    write_json(out / f"{prefix}-datacheck.json", report.model_dump())
    logger.info("datacheck: %d nodes, %d flagged, %d negative", report.nodes_checked, len(report.flagged),
                len(negative))
    return EXIT_OK


def cmd_report(cfg: RunConfig, out: Path, prefix: str) -> int:
    reports = [CertificateReport.model_validate(read_json(path)) for path in cfg.inputs.values()]
    summary = {
        "reports": [
            {"certifier": r.certifier, "proposition": r.proposition, "verdict": r.verdict,
             "failed": [h.name for h in r.failed]}
            for r in reports
        ],
    }
    write_json(out / f"{prefix}-summary.json", summary)
    emit_plotdata(out, prefix, reports=reports)
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "rescale": cmd_rescale,
    "validate": cmd_validate,
    "certify": cmd_certify,
    "datacheck": cmd_datacheck,
    "report": cmd_report,
}


def run(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv``, execute the subcommand and return the exit code."""
    try:
        args = build_parser().parse_args(argv)
        cfg = make_run_config(args)
        out, prefix = _write_config(cfg)
        return COMMANDS[cfg.subcommand](cfg, out, prefix)
    except (ValueError, OSError) as exc:
        error = ErrorResult(error=str(exc), field=getattr(exc, "field", None), exit_code=EXIT_INPUT)
        logger.error("%s", error.error)
        print(f"error: {error.error}", file=sys.stderr)
        return EXIT_INPUT


def main():
    """Main entry point for the blowup-lab CLI."""
    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )
    argv = sys.argv[1:]
    if "--debug" in argv:
        logging.getLogger().setLevel(logging.DEBUG)
    sys.exit(run(argv))


if __name__ == "__main__":
    main()

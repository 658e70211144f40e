"""Command-line interface.

Subcommands expose state dumps, single-state reports, the three parameter
sweeps and the fidelity probe, plus a standalone power-law fit.  Output goes
to stdout or ``--output`` as CSV (fixed per-subcommand schemas, 17
significant digits, LF line endings) or JSON (one object with ``metadata``
and ``records``).  Angles accept plain radians or a ``pi`` suffix
(``0.02pi``); grids accept ``min:max:count`` (append ``log`` to the count
for log spacing) or explicit comma-separated values.

Exit codes: 0 success, 2 argument errors, 1 numerical failure.
"""

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .experiments import probe_fidelity, sweep_alpha, sweep_dalpha, sweep_sigma
from .imperfections import resolution_scaling_fit
from .metrology import (
    DEFAULT_THETA_PROBE,
    Z_AXIS,
    axis_for,
    classical_fi,
    metrology_report,
    pure_family,
    qfi_pure,
)
from .spin import apply_oat, build_ops, make_coherent_state

__all__ = ["main", "build_parser", "parse_angle", "parse_grid"]


class CliError(Exception):
    """Argument-level failure; carries the offending flag name."""

    def __init__(self, flag, message):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


def parse_angle(text: str) -> float:
    """Parse '0.25', '0.02pi' or 'pi' into radians."""
    text = text.strip()
    try:
        if text.lower().endswith("pi"):
            head = text[:-2].strip()
            factor = 1.0 if head in ("", "+") else (-1.0 if head == "-" else float(head))
            return factor * math.pi
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid angle {text!r}") from None


def _parse_scalar(text, angle):
    return parse_angle(text) if angle else float(text)


def parse_grid(spec: str, angle: bool = False) -> list[float]:
    """Parse 'min:max:count[log]' or a comma-separated list of values."""
    spec = spec.strip()
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"grid {spec!r} must be min:max:count")
        lo, hi = (_parse_scalar(p, angle) for p in parts[:2])
        count_text = parts[2].strip().lower()
        log_spaced = count_text.endswith("log")
        if log_spaced:
            count_text = count_text[:-3]
        try:
            count = int(count_text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid grid count {parts[2]!r}") from None
        if count < 1:
            raise argparse.ArgumentTypeError("grid count must be >= 1")
        if log_spaced:
            if lo <= 0 or hi <= 0:
                raise argparse.ArgumentTypeError("log grids need positive endpoints")
            return [float(v) for v in np.geomspace(lo, hi, count)]
        return [float(v) for v in np.linspace(lo, hi, count)]
    try:
        return [_parse_scalar(tok, angle) for tok in spec.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid grid {spec!r}") from None


def _angle_grid(spec):
    return parse_grid(spec, angle=True)


def _fmt(value) -> str:
    return f"{value:.17g}"


def _write_csv(stream, header, rows):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])


def _config_echo(args) -> dict:
    skip = {"func", "csv_columns"}
    echo = {}
    for key, value in vars(args).items():
        if key in skip:
            continue
        echo[key] = value
    return echo


def _write_json(stream, args, records):
    payload = {
        "metadata": {"version": __version__, "config": _config_echo(args)},
        "records": records,
    }
    json.dump(payload, stream, indent=2)
    stream.write("\n")


def _emit(args, header, rows, records):
    """Send the dataset to the chosen sink in the chosen format."""
    if args.output is None:
        sink = sys.stdout
        close = False
    else:
        sink = open(args.output, "w", newline="")
        close = True
    try:
        if args.format == "csv":
            _write_csv(sink, header, rows)
        else:
            _write_json(sink, args, records)
    finally:
        if close:
            sink.close()


def _emit_sweep(args, result, columns):
    meta_extra = {}
    if result.fit is not None:
        meta_extra["fit"] = {"prefactor": result.fit[0], "exponent": result.fit[1]}
    if "snl_reference" in result.metadata:
        meta_extra["snl_reference"] = {
            str(k): v for k, v in result.metadata["snl_reference"].items()
        }
    rows = [[rec.get(col, result.grid_name) for col in columns] for rec in result.records]
    records = [rec.as_dict(result.grid_name) for rec in result.records]
    if args.format == "csv":
        _emit(args, columns, rows, records)
    else:
        if args.output is None:
            sink, close = sys.stdout, False
        else:
            sink, close = open(args.output, "w", newline=""), True
        try:
            payload = {
                "metadata": {
                    "version": __version__,
                    "config": _config_echo(args),
                    **meta_extra,
                },
                "records": records,
            }
            json.dump(payload, sink, indent=2)
            sink.write("\n")
        finally:
            if close:
                sink.close()
    if getattr(args, "figure", None):
        from .figures import save_figure

        save_figure(result, args.figure)


def _require_positive_n(args):
    if args.n < 1:
        raise CliError("--n", "particle number must be >= 1")


def _cmd_state(args) -> int:
    _require_positive_n(args)
    state = apply_oat(make_coherent_state(args.n), args.alpha)
    rows = [
        [float(m), a.real, a.imag, abs(a) ** 2]
        for m, a in zip(state.m_values, state.amplitudes)
    ]
    records = [
        {"m": float(m), "re": a.real, "im": a.imag, "prob": float(abs(a) ** 2)}
        for m, a in zip(state.m_values, state.amplitudes)
    ]
    _emit(args, ["m", "re", "im", "prob"], rows, records)
    return 0


_REPORT_COLUMNS = [
    "n_particles", "alpha", "xi2_optimized",
    "xi2_dir_x", "xi2_dir_y", "xi2_dir_z",
    "qfi_bs", "qfi_mzi", "qfi_optimized",
    "qfi_dir_x", "qfi_dir_y", "qfi_dir_z",
    "fi_bs", "fi_mzi", "theta_probe",
]


def _cmd_report(args) -> int:
    _require_positive_n(args)
    report = metrology_report(args.n, args.alpha, theta_probe=args.theta)
    record = report.as_dict()
    if args.interferometer is not None:
        which = args.interferometer
        if which == "bs":
            record["qfi"], record["fi"] = report.qfi_bs, report.fi_bs
        elif which == "mzi":
            record["qfi"], record["fi"] = report.qfi_mzi, report.fi_mzi
        else:  # phase rotation: imbalance statistics carry no phase information
            ops = build_ops(args.n)
            state = apply_oat(make_coherent_state(args.n), args.alpha)
            record["qfi"] = qfi_pure(state, ops, Z_AXIS)
            record["fi"] = classical_fi(pure_family(state, ops, Z_AXIS), args.theta)
    xd, qd = record["xi2_direction"], record["qfi_direction"]
    row = [
        record["n_particles"], record["alpha"], record["xi2_optimized"],
        xd[0], xd[1], xd[2],
        record["qfi_bs"], record["qfi_mzi"], record["qfi_optimized"],
        qd[0], qd[1], qd[2],
        record["fi_bs"], record["fi_mzi"], record["theta_probe"],
    ]
    columns = list(_REPORT_COLUMNS)
    if "qfi" in record:
        columns += ["qfi", "fi"]
        row += [record["qfi"], record["fi"]]
    _emit(args, columns, [row], [record])
    return 0


def _cmd_scan_alpha(args) -> int:
    _require_positive_n(args)
    try:
        result = sweep_alpha(args.n, args.alphas, theta_probe=args.theta, jobs=args.jobs)
    except ValueError as exc:
        raise CliError("--alphas", str(exc)) from None
    _emit_sweep(args, result,
                ["alpha", "xi2_opt", "inv_xi2_opt", "qfi_opt", "qfi_bs",
                 "qfi_mzi", "fi_bs", "fi_mzi"])
    return 0


def _cmd_scan_sigma(args) -> int:
    _require_positive_n(args)
    if any(s <= 0 for s in args.sigmas):
        raise CliError("--sigmas", "resolutions must be positive")
    try:
        result = sweep_sigma(args.n, args.alpha, args.thetas, args.sigmas, jobs=args.jobs)
    except ValueError as exc:
        raise CliError("--sigmas", str(exc)) from None
    _emit_sweep(args, result, ["theta", "sigma", "fi", "fi_ratio"])
    return 0


def _cmd_scan_dalpha(args) -> int:
    _require_positive_n(args)
    try:
        result = sweep_dalpha(args.n, args.alpha, args.theta, args.dalphas,
                              nodes=args.nodes, jobs=args.jobs)
    except ValueError as exc:
        raise CliError("--dalphas", str(exc)) from None
    _emit_sweep(args, result, ["dalpha", "fi_simulated", "fi_predicted", "rel_dev"])
    return 0


def _cmd_fidelity(args) -> int:
    _require_positive_n(args)
    try:
        result = probe_fidelity(args.n, args.alpha, axis_for(args.interferometer),
                                args.theta, args.dthetas)
    except ValueError as exc:
        raise CliError("--dthetas", str(exc)) from None
    _emit_sweep(args, result, ["dtheta", "fidelity", "fi_local_estimate"])
    return 0


def _cmd_fit(args) -> int:
    xs, ys = [], []
    with open(args.input, newline="") as handle:
        for lineno, row in enumerate(csv.reader(handle)):
            if not row or not row[0].strip():
                continue
            try:
                x, y = float(row[0]), float(row[1])
            except (ValueError, IndexError):
                if lineno == 0:
                    continue  # header line
                raise CliError("--input", f"line {lineno + 1}: expected two numbers")
            xs.append(x)
            ys.append(y)
    try:
        prefactor, exponent = resolution_scaling_fit(xs, ys)
    except ValueError as exc:
        raise CliError("--input", str(exc)) from None
    record = {"prefactor": prefactor, "exponent": exponent}
    _emit(args, ["prefactor", "exponent"], [[prefactor, exponent]], [record])
    return 0


def _add_io_options(sub, default_format="csv"):
    sub.add_argument("--format", choices=["csv", "json"], default=default_format,
                     help="output format (default: %(default)s)")
    sub.add_argument("--output", metavar="PATH", default=None,
                     help="write data to this file instead of standard output")


def _add_jobs_option(sub):
    sub.add_argument("--jobs", type=int, default=os.cpu_count() or 1, metavar="J",
                     help="worker processes for grid points; 1 disables "
                          "multiprocessing and gives identical output (default: all cores)")


def _add_figure_option(sub):
    sub.add_argument("--figure", metavar="PATH", default=None,
                     help="also render the sweep to this image file (format by extension)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oatsim",
        description="Twisted-state interferometry calculator: states, "
                    "information metrics and imperfection sweeps.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")

    st = subs.add_parser("state", help="dump the twisted-state amplitudes")
    st.add_argument("--n", type=int, required=True, metavar="N",
                    help="particle number (dimensionless, >= 1)")
    st.add_argument("--alpha", type=parse_angle, default=0.0, metavar="A",
                    help="twisting strength in radians, 'pi' suffix allowed (default: 0)")
    _add_io_options(st)
    st.set_defaults(func=_cmd_state)

    rp = subs.add_parser("report", help="all figures of merit for one state")
    rp.add_argument("--n", type=int, required=True, metavar="N",
                    help="particle number (dimensionless, >= 1)")
    rp.add_argument("--alpha", type=parse_angle, required=True, metavar="A",
                    help="twisting strength in radians ('pi' suffix allowed)")
    rp.add_argument("--theta", type=parse_angle, default=DEFAULT_THETA_PROBE, metavar="T",
                    help="probe rotation in radians for the classical information "
                         "(default: 0.02pi)")
    rp.add_argument("--interferometer", choices=["bs", "mzi", "phase"], default=None,
                    help="also emit 'qfi'/'fi' aliases for this rotation axis")
    _add_io_options(rp, default_format="json")
    rp.set_defaults(func=_cmd_report)

    sa = subs.add_parser("scan-alpha", help="sweep the twisting strength")
    sa.add_argument("--n", type=int, required=True, metavar="N",
                    help="particle number (dimensionless, >= 1)")
    sa.add_argument("--alphas", type=_angle_grid, default="0:pi:314", metavar="GRID",
                    help="twisting grid in radians, min:max:count[log] or list "
                         "(default: 0:pi:314)")
    sa.add_argument("--theta", type=parse_angle, default=DEFAULT_THETA_PROBE, metavar="T",
                    help="probe rotation in radians (default: 0.02pi)")
    _add_jobs_option(sa)
    _add_io_options(sa)
    _add_figure_option(sa)
    sa.set_defaults(func=_cmd_scan_alpha)

    ss = subs.add_parser("scan-sigma", help="sweep the detector resolution")
    ss.add_argument("--n", type=int, required=True, metavar="N",
                    help="particle number (dimensionless, >= 1)")
    ss.add_argument("--alpha", type=parse_angle, default=1.0, metavar="A",
                    help="twisting strength in radians (default: 1.0)")
    ss.add_argument("--thetas", type=_angle_grid, default="0.02pi,0.07pi,0.14pi",
                    metavar="GRID", help="probe rotations in radians "
                                         "(default: 0.02pi,0.07pi,0.14pi)")
    ss.add_argument("--sigmas", type=parse_grid, default="1,1.5,2,3,4,6,8,10",
                    metavar="GRID", help="resolutions in atom-count units "
                                         "(default: 1,1.5,2,3,4,6,8,10)")
    _add_jobs_option(ss)
    _add_io_options(ss)
    _add_figure_option(ss)
    ss.set_defaults(func=_cmd_scan_sigma)

    sd = subs.add_parser("scan-dalpha", help="sweep the twist-strength spread")
    sd.add_argument("--n", type=int, required=True, metavar="N",
                    help="particle number (dimensionless, >= 1)")
    sd.add_argument("--alpha", type=parse_angle, default=1.0, metavar="A",
                    help="twisting strength in radians (default: 1.0)")
    sd.add_argument("--theta", type=parse_angle, default=DEFAULT_THETA_PROBE, metavar="T",
                    help="probe rotation in radians (default: 0.02pi)")
    sd.add_argument("--dalphas", type=parse_grid, default="0,0.01,0.03,0.1,0.3,1.0",
                    metavar="GRID", help="spread grid, dimensionless "
                                         "(default: 0,0.01,0.03,0.1,0.3,1.0)")
    sd.add_argument("--nodes", type=int, default=None, metavar="K",
                    help="quadrature nodes for the ensemble average "
                         "(default: automatic, growing with the spread)")
    _add_jobs_option(sd)
    _add_io_options(sd)
    _add_figure_option(sd)
    sd.set_defaults(func=_cmd_scan_dalpha)

    fp = subs.add_parser("fidelity", help="overlap of neighboring outcome distributions")
    fp.add_argument("--n", type=int, required=True, metavar="N",
                    help="particle number (dimensionless, >= 1)")
    fp.add_argument("--alpha", type=parse_angle, default=1.0, metavar="A",
                    help="twisting strength in radians (default: 1.0)")
    fp.add_argument("--interferometer", choices=["bs", "mzi", "phase"], default="bs",
                    help="rotation axis (default: bs)")
    fp.add_argument("--theta", type=parse_angle, default=DEFAULT_THETA_PROBE, metavar="T",
                    help="working point in radians (default: 0.02pi)")
    fp.add_argument("--dthetas", type=_angle_grid, default="1e-4:1e-1:7log",
                    metavar="GRID", help="phase increments in radians "
                                         "(default: 1e-4:1e-1:7log)")
    _add_io_options(fp)
    _add_figure_option(fp)
    fp.set_defaults(func=_cmd_fidelity)

    ft = subs.add_parser("fit", help="power-law fit of a two-column CSV")
    ft.add_argument("--input", required=True, metavar="PATH",
                    help="CSV with x,y columns (positive values; header allowed)")
    _add_io_options(ft)
    ft.set_defaults(func=_cmd_fit)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the message
        return int(exc.code or 0)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # numerical or I/O failure
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

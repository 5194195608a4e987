"""Command-line front end: ``csl-bounds {heat,bound,dav,wdlf,exclusion}``.

Exit codes: 0 success, 1 usage or invalid argument, 2 data file validation,
3 numerical failure (no chi-square crossing, divergence in the fit window).

A JSON file given with ``--config`` supplies defaults keyed by option name
(``{"sigma": 3, "rc_min": 1e-9}``); flags on the command line win.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import balance, catalog, core, pulsation, wdlf

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

DEFAULT_CATALOGS = ("solar_system.csv", "compact_objects.csv")
DEFAULT_WDLF = "wdlf_surrogate.csv"
DEFAULT_CLS = (0.70, 0.95, 0.999)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _num(x, fmt):
    return repr(float(x)) if fmt == "csv" else f"{x:.3e}"


def _write(text, out):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------------------


def cmd_heat(args):
    params = core.CslParams(args.lam, args.rc)
    power = core.csl_heating_power(args.mass, params)
    if args.format == "csv":
        _write(_csv(("mass_kg", "lambda_per_s", "r_c_m", "power_W"),
                    [[repr(args.mass), repr(args.lam), repr(args.rc), repr(power)]]), args.out)
    else:
        _write(f"CSL heating power: {power:.3e} W  (lambda/r_C^2 = {params.ratio():.3e} s^-1 m^-2)\n", args.out)
    return EXIT_OK


def _catalog_paths(args):
    return args.catalog or [catalog.data_path(name) for name in DEFAULT_CATALOGS]


def _records(args):
    return [r for path in _catalog_paths(args) for r in catalog.load_objects(path)]


def _emit_rows(rows, args):
    if args.format == "csv":
        _write(catalog.dump_report(rows), args.out)
    else:
        _write(catalog.format_report(rows), args.out)


def cmd_bound(args):
    if args.sigma < 0:
        raise core.DomainError("--sigma must be >= 0")
    bounds = []
    for rec in _records(args):
        if isinstance(rec, pulsation.DavStar):
            bounds.append(pulsation.dav_bound(rec))
        else:
            bounds.append(balance.bound_object(rec, args.sigma))
    _emit_rows(catalog.report_rows(bounds), args)
    return EXIT_OK


def cmd_dav(args):
    flags = (args.log_l, args.mass_msun, args.drift, args.drift_error)
    if any(f is not None for f in flags):
        if any(f is None for f in flags):
            raise UsageError("--log-l, --mass-msun, --drift and --drift-error go together")
        star = pulsation.DavStar(
            args.name,
            core.to_si(args.log_l, "dex(L_sun)"),
            core.to_si(args.mass_msun, "M_sun"),
            args.period,
            args.drift,
            args.drift_error,
        )
        stars = [star]
    else:
        stars = [r for r in _records(args) if isinstance(r, pulsation.DavStar)]
    rows = catalog.report_rows([pulsation.dav_bound(s) for s in stars])
    _emit_rows(rows, args)
    return EXIT_OK


def cmd_wdlf(args):
    window = wdlf.FitWindow(*args.window)
    path = args.data or catalog.data_path(DEFAULT_WDLF)
    data = catalog.load_wdlf(path, window)
    template = wdlf.WdlfModel()
    bounds = [wdlf.solve_bound(data, window, template, cl, args.constraints, binning=args.binning) for cl in args.cl]
    _emit_rows(catalog.report_rows(bounds, sort=False), args)

    if args.scan_out:
        ceiling = wdlf.ratio_for_divergence_at(window.m_bol_max + 1e-3, template)
        top = args.scan_max if args.scan_max else ceiling
        ratios = np.linspace(0.0, min(top, ceiling), args.scan_points)
        prof = wdlf.chi2_profile(data, window, template, ratios, args.constraints, args.binning)
        Path(args.scan_out).write_text(
            _csv(("ratio", "chi2_red"), [[repr(float(r)), repr(float(c))] for r, c in zip(ratios, prof)]),
            encoding="utf-8",
        )
    if args.curves_out:
        rows = []
        grid = np.linspace(window.m_bol_min, window.m_bol_max, args.curve_points)
        for r in args.curve_ratio or [0.0]:
            model = wdlf.normalized(data, template.with_ratio(r), window)
            for m, f in zip(grid, wdlf.wdlf_density(grid, model)):
                rows.append([repr(float(r)), repr(float(m)), repr(float(f))])
        Path(args.curves_out).write_text(_csv(("ratio", "m_bol", "density"), rows), encoding="utf-8")
    return EXIT_OK


def cmd_exclusion(args):
    if args.from_report:
        bounds = [row.to_bound() for row in catalog.load_report(args.from_report)]
    else:
        bounds = [core.RatioBound(b, f"ratio={b:g}", "thermal_balance", "") for b in args.ratio]
    rows = []
    for b in bounds:
        series = core.exclusion_boundary(b, args.rc_min, args.rc_max, args.points)
        rows += [[b.source, _num(r, args.format), _num(lam, args.format)] for r, lam in series.points()]
    if args.overlays:
        grw = core.GRW
        rows.append(["GRW", _num(grw.r_c, args.format), _num(grw.lam, args.format)])
        maj = core.RatioBound(core.MAJORANA_RATIO, "Majorana", "thermal_balance", "")
        series = core.exclusion_boundary(maj, args.rc_min, args.rc_max, args.points)
        rows += [["Majorana", _num(r, args.format), _num(lam, args.format)] for r, lam in series.points()]
    _write(_csv(("series", "r_c_m", "lambda_per_s"), rows), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser():
    p = _Parser(prog="csl-bounds", description="Astrophysical bounds on CSL collapse parameters.")
    p.add_argument("--config", help="JSON file with option defaults")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--format", choices=("text", "csv"), default="text",
                        help="text: 4 significant digits; csv: full precision")
        sp.add_argument("--out", help="write here instead of stdout")

    sp = sub.add_parser("heat", help="CSL heating power of a mass")
    sp.add_argument("--mass", type=float, required=True, help="kg")
    sp.add_argument("--lambda", dest="lam", type=float, default=core.GRW.lam, help="collapse rate [1/s]")
    sp.add_argument("--rc", type=float, default=core.GRW.r_c, help="correlation length [m]")
    common(sp)
    sp.set_defaults(func=cmd_heat)

    sp = sub.add_parser("bound", help="thermal-balance bounds for every catalog row")
    sp.add_argument("--catalog", action="append", help="catalog file (repeatable); default: shipped catalogs")
    sp.add_argument("--sigma", type=float, default=3, help="least-favorable shift in units of sigma")
    common(sp)
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("dav", help="period-drift bound for pulsating white dwarfs")
    sp.add_argument("--catalog", action="append")
    sp.add_argument("--name", default="DAV")
    sp.add_argument("--log-l", type=float, help="log10(L/L_sun)")
    sp.add_argument("--mass-msun", type=float)
    sp.add_argument("--period", type=float, default=1.0, help="s (not used by the bound)")
    sp.add_argument("--drift", type=float, help="period drift [s/s]")
    sp.add_argument("--drift-error", type=float, help="[s/s]")
    common(sp)
    sp.set_defaults(func=cmd_dav)

    sp = sub.add_parser("wdlf", help="chi-square bound from the white-dwarf luminosity function")
    sp.add_argument("--data", help="WDLF table; default: shipped surrogate")
    sp.add_argument("--cl", type=float, action="append", help="confidence level (repeatable)")
    sp.add_argument("--window", type=float, nargs=2, default=(10.5, 15.0), metavar=("MIN", "MAX"))
    sp.add_argument("--constraints", type=int, default=1, help="degrees of freedom removed from the bin count")
    sp.add_argument("--binning", choices=wdlf.BINNINGS, default="average",
                    help="compare boxes with the box-averaged model or the model at box centers")
    sp.add_argument("--scan-out", help="write (ratio, chi2_red) series here")
    sp.add_argument("--scan-points", type=int, default=200)
    sp.add_argument("--scan-max", type=float)
    sp.add_argument("--curves-out", help="write normalized model curves here")
    sp.add_argument("--curve-ratio", type=float, action="append")
    sp.add_argument("--curve-points", type=int, default=91)
    common(sp)
    sp.set_defaults(func=cmd_wdlf)

    sp = sub.add_parser("exclusion", help="exclusion-plane boundary series")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--ratio", type=float, action="append", help="bound on lambda/r_C^2 (repeatable)")
    src.add_argument("--from-report", help="report file written by 'bound --format csv'")
    sp.add_argument("--rc-min", type=float, default=1e-8)
    sp.add_argument("--rc-max", type=float, default=1e-3)
    sp.add_argument("--points", type=int, default=50)
    sp.add_argument("--overlays", action="store_true", help="add the GRW point and the Majorana bound")
    common(sp)
    sp.set_defaults(func=cmd_exclusion)
    return p


def _apply_config(parser, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    try:
        config = json.loads(Path(known.config).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {known.config}: {exc}") from None
    if not isinstance(config, dict):
        raise UsageError("config must be a JSON object")
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            for sp in action.choices.values():
                sp.set_defaults(**{k.replace("-", "_"): v for k, v in config.items()})


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        if getattr(args, "cl", "unset") is None:
            args.cl = list(DEFAULT_CLS)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except catalog.CatalogError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (core.NoCrossingError, core.DivergenceError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except core.DomainError as exc:
        print(f"invalid argument: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

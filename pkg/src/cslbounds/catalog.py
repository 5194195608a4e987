"""Reading and writing catalogs, WDLF tables and bound reports.

All three formats are comma-separated text with a two-line ``#`` header:
the first line names the format and version, the second declares units
(catalogs) or the bin width (WDLF tables). Further ``#`` lines are comments
and are skipped, so data files can carry their provenance inline.

Catalog columns::

    name,kind,mass,observable_type,value1,value2,err_plus,err_minus,radius_convention

``observable_type`` decides what ``value1``/``value2`` mean:

================  ==========  ============  ======================
observable_type   value1      value2        errors apply to
================  ==========  ============  ======================
luminosity        luminosity  (empty)       luminosity
photosphere       radius      t_eff         t_eff
surface_flux      radius      flux          flux
period_drift      luminosity  period_drift  period_drift
================  ==========  ============  ======================

``period_drift`` rows (kind ``dav``) also need a ``period`` column. Any other
column is kept in the record's ``extra`` mapping and otherwise ignored.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .balance import KINDS, AstroObject, Luminosity, Photosphere, SurfaceFlux
from .core import R_C_REFERENCE, DomainError, RatioBound, error_to_si, to_si
from .pulsation import DavStar
from .wdlf import WdlfDataset

__all__ = [
    "CatalogError",
    "ReportRow",
    "CATALOG_COLUMNS",
    "data_path",
    "load_objects",
    "dump_objects",
    "load_wdlf",
    "dump_wdlf",
    "report_rows",
    "format_report",
    "dump_report",
    "load_report",
    "emit_report",
]

CATALOG_FORMAT = "csl-catalog v1"
WDLF_FORMAT = "csl-wdlf v1"
REPORT_FORMAT = "csl-report v1"

CATALOG_COLUMNS = (
    "name",
    "kind",
    "mass",
    "observable_type",
    "value1",
    "value2",
    "err_plus",
    "err_minus",
    "radius_convention",
)
REPORT_COLUMNS = ("name", "method", "level", "ratio_bound", "lambda_at_ref")
QUANTITIES = ("mass", "luminosity", "radius", "t_eff", "flux", "period", "period_drift")

# which quantity each value column carries, per observable type
_LAYOUT = {
    "luminosity": ("luminosity", None),
    "photosphere": ("radius", "t_eff"),
    "surface_flux": ("radius", "flux"),
    "period_drift": ("luminosity", "period_drift"),
}


class CatalogError(ValueError):
    """A data file failed to parse or validate.

    ``line`` is 1-based within the file and ``column`` names the offending
    field when there is one.
    """

    def __init__(self, path, line, column, message):
        where = f"{path}:{line}" if line else str(path)
        if column:
            where += f" [{column}]"
        super().__init__(f"{where}: {message}")
        self.path, self.line, self.column = str(path), line, column


def data_path(name):
    """Path of a data file shipped with the package."""
    return Path(str(resources.files("cslbounds") / "data" / name))


def _read_lines(path):
    return Path(path).read_text(encoding="utf-8").splitlines()


def _check_format(path, lines, expected):
    first = lines[0].lstrip("#").strip()
    if first != expected:
        raise CatalogError(path, 1, None, f"expected header '# {expected}', got {lines[0]!r}")


def _parse_units(path, line):
    text = line.lstrip("#").strip()
    if not text.startswith("units:"):
        raise CatalogError(path, 2, "units", f"expected '# units: ...', got {line!r}")
    units = dict.fromkeys(QUANTITIES, "")
    for token in text[len("units:"):].split():
        key, sep, unit = token.partition("=")
        if not sep or key not in QUANTITIES:
            raise CatalogError(path, 2, "units", f"bad unit declaration {token!r}")
        try:
            to_si(1.0, unit)
        except DomainError as exc:
            raise CatalogError(path, 2, "units", str(exc)) from None
        units[key] = unit
    return units


def _data_rows(lines, start):
    """(line number, text) pairs after the header, comments and blanks dropped."""
    return [(i + 1, ln) for i, ln in enumerate(lines) if i >= start and ln.strip() and not ln.lstrip().startswith("#")]


def _float(path, lineno, column, text, required=True):
    text = (text or "").strip()
    if not text:
        if required:
            raise CatalogError(path, lineno, column, "missing value")
        return 0.0
    try:
        value = float(text)
    except ValueError:
        raise CatalogError(path, lineno, column, f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise CatalogError(path, lineno, column, f"not finite: {text!r}")
    return value


def _build_record(path, lineno, row, units):
    kind = row["kind"].strip()
    otype = row["observable_type"].strip()
    if otype not in _LAYOUT:
        raise CatalogError(path, lineno, "observable_type", f"unknown observable type {otype!r}")
    q1, q2 = _LAYOUT[otype]
    err_q = q2 or q1
    mass = to_si(_float(path, lineno, "mass", row["mass"]), units["mass"])
    raw1 = _float(path, lineno, "value1", row["value1"])
    raw2 = _float(path, lineno, "value2", row["value2"]) if q2 else 0.0
    raw_err = raw2 if q2 else raw1
    ep = error_to_si(raw_err, _float(path, lineno, "err_plus", row["err_plus"], False), units[err_q])
    em = abs(error_to_si(raw_err, -_float(path, lineno, "err_minus", row["err_minus"], False), units[err_q]))
    v1 = to_si(raw1, units[q1])
    v2 = to_si(raw2, units[q2]) if q2 else None
    name = row["name"].strip()
    extra = {k: v for k, v in row.items() if k not in CATALOG_COLUMNS and k != "period" and v.strip()}

    if otype == "period_drift":
        if kind != "dav":
            raise CatalogError(path, lineno, "kind", "period_drift rows must have kind 'dav'")
        if "period" not in row:
            raise CatalogError(path, lineno, "period", "dav rows need a period column")
        period = to_si(_float(path, lineno, "period", row["period"]), units["period"])
        return DavStar(name, v1, mass, period, v2, ep)
    if kind not in KINDS:
        raise CatalogError(path, lineno, "kind", f"unknown kind {kind!r}")
    obs = {"luminosity": lambda: Luminosity(v1),
           "photosphere": lambda: Photosphere(v1, v2),
           "surface_flux": lambda: SurfaceFlux(v1, v2)}[otype]()
    return AstroObject(name, mass, obs, ep, em, kind, (row.get("radius_convention") or "").strip(), extra)


def load_objects(path):
    """Load a catalog file into validated records (SI units).

    Returns a list of :class:`AstroObject` and :class:`DavStar`. The whole
    file is rejected on the first bad row; the error names the line and
    column. An empty file is an empty catalog.
    """
    lines = _read_lines(path)
    if not any(ln.strip() for ln in lines):
        return []
    if len(lines) < 2:
        raise CatalogError(path, 1, None, "missing unit declaration line")
    _check_format(path, lines, CATALOG_FORMAT)
    units = _parse_units(path, lines[1])
    rows = _data_rows(lines, 2)
    if not rows:
        return []
    header_no, header = rows[0]
    columns = [c.strip() for c in next(csv.reader([header]))]
    missing = [c for c in CATALOG_COLUMNS if c not in columns]
    if missing:
        raise CatalogError(path, header_no, missing[0], f"missing columns {missing}")
    records = []
    for lineno, text in rows[1:]:
        values = next(csv.reader([text]))
        if len(values) != len(columns):
            raise CatalogError(path, lineno, None, f"expected {len(columns)} fields, got {len(values)}")
        row = dict(zip(columns, values))
        try:
            records.append(_build_record(path, lineno, row, units))
        except DomainError as exc:
            raise CatalogError(path, lineno, None, str(exc)) from None
    names = [r.name for r in records]
    dupes = {n for n in names if names.count(n) > 1}
    if dupes:
        raise CatalogError(path, None, "name", f"duplicate names {sorted(dupes)}")
    return records


def dump_objects(records, path=None):
    """Write records in canonical SI form; returns the text."""
    extra_cols = sorted({k for r in records for k in getattr(r, "extra", {})})
    buf = io.StringIO()
    buf.write(f"# {CATALOG_FORMAT}\n")
    buf.write("# units: " + " ".join(f"{q}={u}" for q, u in zip(QUANTITIES, ("kg", "W", "m", "K", "W/m^2", "s", "s/s"))) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CATALOG_COLUMNS + ("period",) + tuple(extra_cols))
    for r in records:
        if isinstance(r, DavStar):
            w.writerow([r.name, "dav", repr(r.mass), "period_drift", repr(r.luminosity), repr(r.period_drift),
                        repr(r.drift_error), repr(r.drift_error), "", repr(r.period)] + [""] * len(extra_cols))
            continue
        obs = r.observable
        if isinstance(obs, Luminosity):
            otype, v1, v2 = "luminosity", repr(obs.luminosity), ""
        elif isinstance(obs, Photosphere):
            otype, v1, v2 = "photosphere", repr(obs.radius), repr(obs.t_eff)
        else:
            otype, v1, v2 = "surface_flux", repr(obs.radius), repr(obs.flux)
        w.writerow([r.name, r.kind, repr(r.mass), otype, v1, v2, repr(r.err_plus), repr(r.err_minus),
                    r.radius_convention, ""] + [r.extra.get(k, "") for k in extra_cols])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def load_wdlf(path, window=None):
    """Load a binned WDLF table.

    If ``window`` is given, every bin inside it must have a positive error.
    """
    lines = _read_lines(path)
    if len(lines) < 2:
        raise CatalogError(path, 1, None, "file too short for the two-line header")
    _check_format(path, lines, WDLF_FORMAT)
    key, _, value = lines[1].lstrip("#").strip().partition(":")
    if key.strip() != "bin_width":
        raise CatalogError(path, 2, "bin_width", f"expected '# bin_width: <mag>', got {lines[1]!r}")
    bin_width = _float(path, 2, "bin_width", value)
    rows = _data_rows(lines, 2)
    if not rows:
        raise CatalogError(path, 3, None, "no column header")
    header_no, header = rows[0]
    columns = [c.strip() for c in header.split(",")]
    for col in ("m_bol", "density", "error"):
        if col not in columns:
            raise CatalogError(path, header_no, col, "missing column")
    m, d, e = [], [], []
    for lineno, text in rows[1:]:
        row = dict(zip(columns, [v.strip() for v in text.split(",")]))
        m.append(_float(path, lineno, "m_bol", row.get("m_bol")))
        d.append(_float(path, lineno, "density", row.get("density")))
        e.append(_float(path, lineno, "error", row.get("error")))
        if len(m) > 1 and m[-1] <= m[-2]:
            what = "duplicate" if m[-1] == m[-2] else "unsorted"
            raise CatalogError(path, lineno, "m_bol", f"{what} bin at M_bol = {m[-1]:g}")
    try:
        ds = WdlfDataset(m, d, e, bin_width, Path(path).stem)
    except DomainError as exc:
        raise CatalogError(path, None, None, str(exc)) from None
    if window is not None:
        bad = ds.in_window(window) & (ds.error <= 0)
        if np.any(bad):
            raise CatalogError(path, None, "error", f"non-positive error at M_bol = {ds.m_bol[bad][0]:g} inside fit window")
    return ds


def dump_wdlf(dataset, path=None, comments=()):
    buf = io.StringIO()
    buf.write(f"# {WDLF_FORMAT}\n# bin_width: {dataset.bin_width!r}\n")
    for c in comments:
        buf.write(f"# {c}\n")
    buf.write("m_bol,density,error\n")
    for row in zip(dataset.m_bol, dataset.density, dataset.error):
        buf.write(",".join(repr(float(x)) for x in row) + "\n")
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


@dataclass(frozen=True)
class ReportRow:
    name: str
    method: str
    level: str
    ratio_bound: float
    lambda_at_ref: float

    @classmethod
    def from_bound(cls, bound, name=None):
        return cls(name or bound.source, bound.method, bound.level, bound.value, bound.lambda_at(R_C_REFERENCE))

    def to_bound(self):
        return RatioBound(self.ratio_bound, self.name, self.method, self.level)


def report_rows(bounds, sort=True):
    rows = [ReportRow.from_bound(b) for b in bounds]
    return sorted(rows, key=lambda r: r.ratio_bound) if sort else rows


def format_report(rows):
    """Human-readable table, 4 significant digits."""
    head = ("name", "method", "level", "lambda/r_C^2 [1/(s m^2)]", "lambda @ r_C=1e-7 m [1/s]")
    body = [(r.name, r.method, r.level, f"{r.ratio_bound:.3e}", f"{r.lambda_at_ref:.3e}") for r in rows]
    widths = [max(len(x) for x in col) for col in zip(head, *body)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(line, widths)).rstrip() for line in (head, *body)]
    return "\n".join(lines) + "\n"


def dump_report(rows, path=None):
    """Machine-readable report; floats at full precision."""
    buf = io.StringIO()
    buf.write(f"# {REPORT_FORMAT}\n# units: ratio_bound=s^-1 m^-2 lambda_at_ref=s^-1 r_c_ref={R_C_REFERENCE!r}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for r in rows:
        w.writerow([r.name, r.method, r.level, repr(float(r.ratio_bound)), repr(float(r.lambda_at_ref))])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def load_report(path):
    lines = _read_lines(path)
    if not lines:
        raise CatalogError(path, 1, None, "empty report")
    _check_format(path, lines, REPORT_FORMAT)
    rows = _data_rows(lines, 2)
    if not rows or [c.strip() for c in rows[0][1].split(",")] != list(REPORT_COLUMNS):
        raise CatalogError(path, rows[0][0] if rows else 3, None, f"expected columns {REPORT_COLUMNS}")
    out = []
    for lineno, text in rows[1:]:
        name, method, level, b, lam = next(csv.reader([text]))
        out.append(ReportRow(name, method, level, _float(path, lineno, "ratio_bound", b),
                             _float(path, lineno, "lambda_at_ref", lam)))
    return out


def emit_report(rows, path=None):
    """Text table for humans, plus the machine file at ``path`` if given."""
    if path is not None:
        dump_report(rows, path)
    return format_report(rows)

"""
Scenario configuration, parameter sweeps and tabular output.

A scenario is an INI file. Base sections describe one scenario; optional
``[series.NAME]`` sections hold ``section.key = value`` overrides, and each
series is swept separately. Rows of every series share one table.
"""

import configparser
import csv
import hashlib
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from importlib import resources

import numpy as np

from . import __version__
from .errors import (
    ConfigError,
    DomainError,
    InvalidTriangle,
    NoCherenkov,
    ParaxialViolation,
    QuadratureNotConverged,
    ZeroAmplitude,
)
from .kinematics import Configuration, EmissionKinematics, cherenkov_angle_classical
from .medium import ConstantMedium, TabulatedMedium, is_weakly_dispersive
from .timescales import (
    axial_spreading_time,
    correlation_radius_sq,
    flash_sigma_t,
    mach_angle,
    paraxial_ok,
    sigma_x,
    spreading_time,
    tau_d_squared,
    _cached_theta_infinity,
    timescale_report,
    velocities,
)
from .units import (
    ev_to_natural,
    from_attoseconds,
    from_seconds,
    natural_to_ev,
    sigma_from_length,
    to_attoseconds,
    to_nanometers,
    to_picoseconds,
    from_nanometers,
)

# key -> (type, default). None as default means "required unless an
# alternative key is given".
SCHEMA = {
    "electron.beta": (float, None),
    "electron.gamma": (float, None),
    "electron.sigma": (float, None),
    "electron.sigma_x_nm": (float, None),
    "electron.p_perp": (float, 0.0),
    "electron.helicity": (float, 0.5),
    "final.pp_perp_fraction": (float, 0.99),
    "final.pz_fraction": (float, None),
    "final.helicity": (float, 0.5),
    "final.phi_deg": (float, 0.0),
    "photon.omega_ev": (float, None),
    "photon.theta_deg": (str, None),
    "photon.helicity": (str, "1"),
    "medium.n": (float, None),
    "medium.table": (str, None),
    "sweep.axis": (str, "none"),
    "sweep.start": (float, 0.0),
    "sweep.stop": (float, 0.0),
    "sweep.count": (int, 1),
    "sweep.configuration": (str, "plus"),
    "sweep.arrival_shift": (bool, True),
    "sweep.require_cherenkov": (bool, False),
    "sweep.t_prime_fs": (float, 0.0),
    "sweep.lorentz": (bool, False),
    "wigner.mode": (str, "samples"),
    "wigner.t_prime_fs": (float, 1.0),
    "wigner.theta_r_deg": (float, 90.0),
    "wigner.phi_r_deg": (float, 0.0),
    "wigner.r_nm": (float, 0.0),
    "wigner.t_as": (float, 0.0),
    "run.tol": (float, 1e-10),
    "run.jobs": (int, 1),
}

AXES = {
    "none": "-",
    "theta": "deg",
    "phi": "deg",
    "n": "-",
    "omega": "eV",
    "t": "as",
    "r": "nm",
    "theta_r": "deg",
}
TIMESCALE_AXES = ("none", "theta", "phi", "n", "omega")
WIGNER_AXES = {"correlation": ("theta_r",), "samples": ("none", "t", "r", "theta_r")}


def _parse_bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def read_config(source):
    """Parse INI text (or a path) into (base, {series: overrides}) flat dicts."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    parser.optionxform = str
    if hasattr(source, "read"):
        parser.read_file(source)
    elif "\n" in str(source):
        parser.read_string(str(source))
    else:
        with open(source, encoding="utf-8") as fh:
            parser.read_file(fh)
    base = {}
    series = {}
    for sec in parser.sections():
        if sec.startswith("series."):
            series[sec[len("series.") :]] = dict(parser.items(sec))
        else:
            for key, value in parser.items(sec):
                base[f"{sec}.{key}"] = value
    return base, series


def load_preset(name):
    text = resources.files("qcherenkov.presets").joinpath(f"{name}.ini").read_text("utf-8")
    return read_config(text)


@dataclass(frozen=True)
class Scenario:
    """One validated scenario with all derived quantities in natural units."""

    name: str
    beta: float
    energy: float
    sigma: float
    p_perp: float
    pp_perp: float
    pz_fraction: float
    helicity: float
    helicity_out: float
    photon_helicity: object
    phi_prime: float
    omega: float
    theta: object
    medium: object
    medium_spec: str
    axis: str
    values: tuple
    configuration: str
    arrival_shift: bool
    require_cherenkov: bool
    t_prime: float
    lorentz: bool
    wigner_mode: str
    wigner_t_prime: float
    theta_r: float
    phi_r: float
    r: float
    t: float
    tol: float
    jobs: int
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    def with_axis_value(self, value):
        """Copy of the scenario with the sweep variable set to ``value`` (axis units)."""
        ax = self.axis
        if ax == "theta":
            return replace(self, theta=math.radians(value))
        if ax == "phi":
            return replace(self, phi_prime=math.radians(value))
        if ax == "n":
            return replace(self, medium=ConstantMedium(value))
        if ax == "omega":
            return replace(self, omega=ev_to_natural(value))
        if ax == "t":
            return replace(self, t=from_attoseconds(value))
        if ax == "r":
            return replace(self, r=from_nanometers(value))
        if ax == "theta_r":
            return replace(self, theta_r=math.radians(value))
        return self

    def photon_theta(self):
        if self.theta == "cherenkov":
            return cherenkov_angle_classical(self.beta, self.medium.index(self.omega))
        return self.theta


def _typed(flat, errors):
    out = {}
    for key, text in flat.items():
        if key not in SCHEMA:
            errors.append((f"unknown configuration key {key!r}", [key]))
            continue
        typ = SCHEMA[key][0]
        try:
            out[key] = _parse_bool(text) if typ is bool else typ(text)
        except ValueError:
            errors.append((f"{key}: cannot parse {text!r} as {typ.__name__}", [key]))
    for key, (typ, default) in SCHEMA.items():
        if key not in out and default is not None:
            out[key] = default
    return out


def _one_of(cfg, a, b, errors, required=True):
    has_a, has_b = a in cfg, b in cfg
    if has_a and has_b:
        errors.append((f"give only one of {a} and {b}", [a, b]))
    elif required and not (has_a or has_b):
        errors.append((f"one of {a} or {b} is required", [a, b]))


def _scenario(name, cfg, kind):
    errors = []
    cfg = _typed(cfg, errors)
    _one_of(cfg, "electron.beta", "electron.gamma", errors)
    _one_of(cfg, "electron.sigma", "electron.sigma_x_nm", errors)
    _one_of(cfg, "medium.n", "medium.table", errors, required=cfg.get("sweep.axis") != "n")
    if "photon.omega_ev" not in cfg:
        errors.append(("photon.omega_ev is required", ["photon.omega_ev"]))
    if errors:
        raise ConfigError(f"[{name}] " + "; ".join(m for m, _ in errors), [f for _, fs in errors for f in fs])

    def fail(msg, *keys):
        raise ConfigError(f"[{name}] {msg}", keys)

    if "electron.beta" in cfg:
        beta = cfg["electron.beta"]
        if not 0 < beta < 1:
            fail("electron.beta must lie in (0, 1)", "electron.beta")
        energy = 1 / math.sqrt((1 - beta) * (1 + beta))
    else:
        energy = cfg["electron.gamma"]
        if not energy > 1:
            fail("electron.gamma must exceed 1", "electron.gamma")
        beta = math.sqrt((energy - 1) * (energy + 1)) / energy
    if "electron.sigma" in cfg:
        sigma = cfg["electron.sigma"]
    else:
        sigma = sigma_from_length(cfg["electron.sigma_x_nm"] * 1e-9)
    if not sigma > 0:
        fail("momentum width must be positive", "electron.sigma", "electron.sigma_x_nm")
    p_perp = cfg["electron.p_perp"]
    if p_perp < 0 or p_perp >= beta * energy:
        fail("electron.p_perp must lie in [0, |p|)", "electron.p_perp")
    for key in ("electron.helicity", "final.helicity"):
        if cfg[key] not in (0.5, -0.5):
            fail(f"{key} must be 0.5 or -0.5", key)
    ph = cfg["photon.helicity"].strip().lower()
    if ph not in ("1", "+1", "-1", "sum"):
        fail("photon.helicity must be 1, -1 or sum", "photon.helicity")
    photon_helicity = "sum" if ph == "sum" else int(ph)
    omega = ev_to_natural(cfg["photon.omega_ev"])
    if not omega > 0:
        fail("photon.omega_ev must be positive", "photon.omega_ev")

    if "medium.table" in cfg:
        spec = cfg["medium.table"]
        try:
            medium = TabulatedMedium.from_file(spec)
        except (OSError, ValueError) as exc:
            fail(f"cannot load medium.table: {exc}", "medium.table")
    else:
        n = cfg.get("medium.n", 1.5)
        if not n > 0:
            fail("medium.n must be positive", "medium.n")
        medium = ConstantMedium(n)
        spec = repr(n)

    theta_text = cfg.get("photon.theta_deg")
    theta = None
    if theta_text is not None:
        if theta_text.strip().lower() == "cherenkov":
            theta = "cherenkov"
        else:
            try:
                theta = math.radians(float(theta_text))
            except ValueError:
                fail("photon.theta_deg must be a number or 'cherenkov'", "photon.theta_deg")

    axis = cfg["sweep.axis"].strip().lower()
    mode = cfg["wigner.mode"].strip().lower()
    if axis not in AXES:
        fail(f"sweep.axis must be one of {sorted(AXES)}", "sweep.axis")
    if kind == "timescales":
        if axis not in TIMESCALE_AXES:
            fail(f"sweep.axis {axis!r} is not available for time-scale sweeps", "sweep.axis")
        if photon_helicity == "sum":
            fail("time-scale sweeps need a definite photon.helicity", "photon.helicity")
    else:
        if mode not in WIGNER_AXES:
            fail("wigner.mode must be 'correlation' or 'samples'", "wigner.mode")
        if axis not in WIGNER_AXES[mode]:
            fail(f"sweep.axis {axis!r} is not available for wigner.mode={mode}", "sweep.axis", "wigner.mode")
    if theta is None and axis != "theta":
        fail("photon.theta_deg is required unless theta is swept", "photon.theta_deg")
    count = cfg["sweep.count"]
    if count < 1:
        fail("sweep.count must be at least 1", "sweep.count")
    values = tuple(np.linspace(cfg["sweep.start"], cfg["sweep.stop"], count)) if axis != "none" else (math.nan,)
    if axis == "n" and min(values) <= 0:
        fail("refractive indices must be positive", "sweep.start", "sweep.stop")
    if axis == "omega" and min(values) <= 0:
        fail("photon energies must be positive", "sweep.start", "sweep.stop")
    conf = cfg["sweep.configuration"].strip().lower()
    if conf not in ("plus", "minus", "both"):
        fail("sweep.configuration must be plus, minus or both", "sweep.configuration")
    if cfg["run.tol"] <= 0:
        fail("run.tol must be positive", "run.tol")
    if cfg["run.jobs"] < 1:
        fail("run.jobs must be at least 1", "run.jobs")
    if theta is None:
        theta = math.radians(values[0])
    return Scenario(
        name=name,
        beta=beta,
        energy=energy,
        sigma=sigma,
        p_perp=p_perp,
        pp_perp=cfg["final.pp_perp_fraction"] * p_perp,
        pz_fraction=cfg.get("final.pz_fraction", math.nan),
        helicity=cfg["electron.helicity"],
        helicity_out=cfg["final.helicity"],
        photon_helicity=photon_helicity,
        phi_prime=math.radians(cfg["final.phi_deg"]),
        omega=omega,
        theta=theta,
        medium=medium,
        medium_spec=spec,
        axis=axis,
        values=values,
        configuration=conf,
        arrival_shift=cfg["sweep.arrival_shift"],
        require_cherenkov=cfg["sweep.require_cherenkov"],
        t_prime=from_seconds(cfg["sweep.t_prime_fs"] * 1e-15),
        lorentz=cfg["sweep.lorentz"],
        wigner_mode=mode,
        wigner_t_prime=from_seconds(cfg["wigner.t_prime_fs"] * 1e-15),
        theta_r=math.radians(cfg["wigner.theta_r_deg"]),
        phi_r=math.radians(cfg["wigner.phi_r_deg"]),
        r=from_nanometers(cfg["wigner.r_nm"]),
        t=from_attoseconds(cfg["wigner.t_as"]),
        tol=cfg["run.tol"],
        jobs=cfg["run.jobs"],
        raw=cfg,
    )


def validate(config, kind="timescales", tol=None, jobs=None):
    """Check a parsed config and return the list of scenarios (one per series).

    Raises ConfigError naming the offending keys.
    """
    base, series = config
    if not series:
        series = {"default": {}}
    out = []
    for name, overrides in series.items():
        flat = dict(base)
        flat.update(overrides)
        if tol is not None:
            flat["run.tol"] = repr(tol)
        if jobs is not None:
            flat["run.jobs"] = str(jobs)
        out.append(_scenario(name, flat, kind))
    return out


def config_hash(config):
    base, series = config
    canon = json.dumps({"base": base, "series": series}, sort_keys=True)
    return hashlib.sha256(canon.encode()).hexdigest()


# ---------------------------------------------------------------------------
# Result table


@dataclass
class ResultTable:
    """Rectangular table; cells are floats (NaN = flagged blank) or strings."""

    columns: list
    rows: list
    provenance: dict

    @property
    def names(self):
        return [n for n, _ in self.columns]

    def column(self, name):
        i = self.names.index(name)
        return [r[i] for r in self.rows]

    def __eq__(self, other):
        if not isinstance(other, ResultTable):
            return NotImplemented
        if [tuple(c) for c in self.columns] != [tuple(c) for c in other.columns]:
            return False
        if self.provenance != other.provenance or len(self.rows) != len(other.rows):
            return False
        for a, b in zip(self.rows, other.rows):
            for x, y in zip(a, b):
                same_nan = isinstance(x, float) and isinstance(y, float) and math.isnan(x) and math.isnan(y)
                if not (same_nan or x == y):
                    return False
        return True


def _cell_text(v):
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(v)
    return str(v)


def emit(table, fmt="csv"):
    """Serialise a ResultTable to CSV or JSON bytes."""
    if fmt == "csv":
        buf = io.StringIO()
        for key in sorted(table.provenance):
            buf.write(f"# {key}: {json.dumps(table.provenance[key], sort_keys=True)}\r\n")
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow([f"{n}[{u}]" for n, u in table.columns])
        for row in table.rows:
            writer.writerow([_cell_text(v) for v in row])
        return buf.getvalue().encode("utf-8")
    if fmt == "json":
        cols = []
        for i, (name, unit) in enumerate(table.columns):
            vals = [r[i] for r in table.rows]
            vals = [None if isinstance(v, float) and math.isnan(v) else v for v in vals]
            cols.append({"name": name, "unit": unit, "values": vals})
        doc = {"provenance": table.provenance, "columns": cols}
        return (json.dumps(doc, sort_keys=True, allow_nan=False) + "\n").encode("utf-8")
    raise ValueError(f"unknown format {fmt!r}")


def table_from_json(data):
    doc = json.loads(data)
    cols = doc["columns"]
    columns = [(c["name"], c["unit"]) for c in cols]
    n_rows = len(cols[0]["values"]) if cols else 0
    rows = []
    for i in range(n_rows):
        row = []
        for c in cols:
            v = c["values"][i]
            row.append(math.nan if v is None else (float(v) if isinstance(v, (int, float)) else v))
        rows.append(row)
    return ResultTable(columns, rows, doc["provenance"])


def table_from_csv(data):
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    lines = text.splitlines(keepends=True)
    provenance = {}
    body = []
    for line in lines:
        if line.startswith("# ") and not body:
            key, _, val = line[2:].rstrip("\r\n").partition(": ")
            provenance[key] = json.loads(val)
        else:
            body.append(line)
    reader = csv.reader(io.StringIO("".join(body)))
    header = next(reader)
    columns = []
    for h in header:
        name, _, unit = h.partition("[")
        columns.append((name, unit.rstrip("]")))
    rows = []
    for rec in reader:
        row = []
        for cell, (name, unit) in zip(rec, columns):
            if unit == "text":
                row.append(cell)
            else:
                row.append(math.nan if cell == "" else float(cell))
        rows.append(row)
    return ResultTable(columns, rows, provenance)


# ---------------------------------------------------------------------------
# Sweeps


def _provenance(config, scenarios, kind):
    s0 = scenarios[0]
    return {
        "command": kind,
        "config_sha256": config_hash(config),
        "series": [s.name for s in scenarios],
        "tolerances": {"quadrature": s0.tol, "gradient_pass": 1e-6, "gradient_inconsistent": 1e-4},
        "version": __version__,
    }


def _run_points(fn, points, jobs):
    if jobs <= 1 or len(points) <= 1:
        return [fn(p) for p in points]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        results = list(pool.map(fn, points, chunksize=max(1, len(points) // (4 * jobs))))
    return results


def _configs(s):
    return {
        "plus": (Configuration.PLUS,),
        "minus": (Configuration.MINUS,),
        "both": (Configuration.PLUS, Configuration.MINUS),
    }[s.configuration]


def _timescale_columns(s):
    cols = [
        ("series", "text"),
        ("index", "-"),
    ]
    if s.axis == "phi":
        cols.append(("phi", "deg"))
    cols += [
        ("theta", "deg"),
        ("n", "-"),
        ("omega", "eV"),
        ("theta_ch", "deg"),
        ("t_d", "ps"),
        ("inv_t_d", "1/ps"),
        ("t_d_axial", "ps"),
        ("tau_d_sq", "ps^2"),
        ("formation_length", "nm"),
        ("theta_mach", "deg"),
        ("theta_inf_minus_approx", "deg"),
        ("theta_inf_plus_approx", "deg"),
        ("theta_inf_minus", "deg"),
        ("theta_inf_plus", "deg"),
        ("delta_theta_inf", "deg"),
        ("sigma_x", "nm"),
        ("r_eff", "nm"),
        ("sigma_t", "as"),
    ]
    if s.lorentz:
        cols.append(("sigma_t_contracted", "as"))
    if s.arrival_shift:
        if s.configuration == "both":
            cols += [("t0_plus", "as"), ("dt_plus", "as"), ("dt_minus", "as"), ("dt_abs", "as")]
        else:
            cols += [("t0", "as"), ("dt", "as")]
        cols += [("pz_out", "m_e"), ("gradient_discrepancy", "-")]
    cols.append(("flags", "text"))
    return cols


def _deg(x):
    return math.degrees(x) if math.isfinite(x) else math.nan


def _ideal_timescales(s, theta, n):
    """Time scales for u_p along z with the photon at ``theta`` (no transverse momenta)."""
    flags = []
    u_p, u_k = velocities(theta, s.beta, n)
    t_d = spreading_time(u_p, u_k, s.sigma, s.omega, s.energy, n)
    t_ax = axial_spreading_time(s.sigma, s.omega, s.energy, n)
    try:
        th_mach = mach_angle(theta, u_p, u_k)
    except DomainError:
        th_mach = math.nan
        flags.append("mach_domain")
    try:
        inf = _cached_theta_infinity(s.beta, n, s.omega, s.energy)
        approx, exact, gap = inf.approx, inf.exact, inf.gap
    except NoCherenkov:
        approx = exact = (math.nan, math.nan)
        gap = math.nan
    cr = np.cross(u_p, u_k)
    norm = float(np.linalg.norm(cr))
    if norm > 0:
        ratio = correlation_radius_sq(cr / norm, s.t_prime, u_p, u_k, s.sigma, s.omega, s.energy)
        r_eff = 1 / math.sqrt(ratio) if ratio > 0 else math.nan
        s_t = flash_sigma_t(s.t_prime, s.sigma, t_d, u_p, u_k)
    else:
        r_eff = s_t = math.nan
        flags.append("collinear")
    return {
        "t_d": t_d,
        "t_d_axial": t_ax,
        "tau_d_sq": tau_d_squared(t_d, t_ax, s.sigma, s.omega, s.energy),
        "theta_mach": th_mach,
        "approx": approx,
        "exact": exact,
        "gap": gap,
        "sigma_x": sigma_x(s.t_prime, s.sigma, t_d),
        "r_eff": r_eff,
        "sigma_t": s_t,
        "flags": flags,
    }


def _timescale_row(args):
    s, index, value = args
    p = s.with_axis_value(value)
    flags = []
    try:
        n = p.medium.index(p.omega)
    except ValueError:
        n = math.nan
        flags.append("out_of_range")
    theta = p.photon_theta() if not math.isnan(n) else math.nan
    cherenkov = s.beta * n > 1
    if not cherenkov:
        flags.append("no_cherenkov")
    if math.isnan(n):
        return _timescale_blank(s, index, value, theta, n, p, flags)
    if not paraxial_ok(theta, s.sigma):
        flags.append("paraxial")
    if isinstance(p.medium, TabulatedMedium):
        try:
            if not is_weakly_dispersive(p.medium, p.omega):
                flags.append("dispersion")
        except ValueError:
            pass

    ideal = _ideal_timescales(p, theta, n)
    flags += ideal["flags"]
    t_d = ideal["t_d"]
    if math.isinf(t_d):
        flags.append("t_d_infinite")
    vals = {
        "theta_ch": _deg(cherenkov_angle_classical(s.beta, n)) if cherenkov else math.nan,
        "t_d": to_picoseconds(t_d) if math.isfinite(t_d) else math.nan,
        "inv_t_d": 1 / to_picoseconds(t_d),
        "t_d_axial": to_picoseconds(ideal["t_d_axial"]),
        "tau_d_sq": to_picoseconds(to_picoseconds(ideal["tau_d_sq"])),
        "formation_length": to_nanometers(s.beta * abs(t_d)) if math.isfinite(t_d) else math.nan,
        "theta_mach": _deg(ideal["theta_mach"]),
        "theta_inf_minus_approx": _deg(ideal["approx"][0]),
        "theta_inf_plus_approx": _deg(ideal["approx"][1]),
        "theta_inf_minus": _deg(ideal["exact"][0]),
        "theta_inf_plus": _deg(ideal["exact"][1]),
        "delta_theta_inf": _deg(ideal["gap"]),
        "sigma_x": to_nanometers(ideal["sigma_x"]),
        "r_eff": to_nanometers(ideal["r_eff"]),
        "sigma_t": to_attoseconds(ideal["sigma_t"]),
        "sigma_t_contracted": to_attoseconds(ideal["sigma_t"]) / s.energy,
    }

    if s.arrival_shift:
        shifts = {}
        t0 = math.nan
        pz_out = math.nan
        discrepancy = math.nan
        blank = s.require_cherenkov and not cherenkov
        if s.p_perp == 0:
            flags.append("no_transverse")
        elif blank:
            pass
        else:
            for conf in _configs(s):
                try:
                    kin = EmissionKinematics.on_triangle(
                        s.beta, s.p_perp, s.pp_perp, theta, p.omega, p.medium,
                        p.phi_prime, conf, s.helicity, s.helicity_out, s.photon_helicity,
                    )
                except InvalidTriangle:
                    flags.append("forbidden")
                    break
                try:
                    rep = timescale_report(kin, s.sigma, s.t_prime)
                except ZeroAmplitude:
                    flags.append("zero_amplitude")
                    break
                flags += [f for f in rep.flags if f in ("one_sided", "inconsistent", "failed", "zero_amplitude")]
                shifts[conf] = to_attoseconds(rep.delta_t)
                if conf is _configs(s)[0]:
                    t0 = to_attoseconds(rep.t0)
                    pz_out = float(kin.electron_out.p[2])
                    discrepancy = rep.gradient_discrepancy
        if s.configuration == "both":
            dp = shifts.get(Configuration.PLUS, math.nan)
            dm = shifts.get(Configuration.MINUS, math.nan)
            vals.update(t0_plus=t0, dt_plus=dp, dt_minus=dm, dt_abs=abs(dp))
        else:
            vals.update(t0=t0, dt=next(iter(shifts.values()), math.nan))
        vals.update(pz_out=pz_out, gradient_discrepancy=discrepancy)

    row = []
    for name, _ in _timescale_columns(s):
        if name == "series":
            row.append(s.name)
        elif name == "index":
            row.append(float(index))
        elif name == s.axis:
            row.append(float(value))
        elif name == "theta":
            row.append(_deg(theta))
        elif name == "n":
            row.append(float(n))
        elif name == "omega":
            row.append(natural_to_ev(p.omega))
        elif name == "flags":
            row.append("|".join(dict.fromkeys(flags)))
        else:
            row.append(float(vals[name]))
    return row


def _timescale_blank(s, index, value, theta, n, p, flags):
    row = []
    for name, _ in _timescale_columns(s):
        if name == "series":
            row.append(s.name)
        elif name == "index":
            row.append(float(index))
        elif name == s.axis:
            row.append(float(value))
        elif name == "omega":
            row.append(natural_to_ev(p.omega))
        elif name == "flags":
            row.append("|".join(flags))
        else:
            row.append(math.nan)
    return row


def run_timescale_sweep(config, tol=None, jobs=None):
    """One row per (series, sweep point) with the flattened time-scale report."""
    scenarios = validate(config, "timescales", tol=tol, jobs=jobs)
    columns = _timescale_columns(scenarios[0])
    for s in scenarios[1:]:
        if _timescale_columns(s) != columns:
            raise ConfigError(f"[{s.name}] series change the output columns", ["series"])
    points = [(s, i, v) for s in scenarios for i, v in enumerate(s.values)]
    rows = _run_points(_timescale_row, points, scenarios[0].jobs)
    return ResultTable(columns, rows, _provenance(config, scenarios, "timescales"))


def _correlation_row(args):
    s, index, value = args
    p = s.with_axis_value(value)
    n = p.medium.index(p.omega)
    theta = p.photon_theta()
    u_p, u_k = velocities(theta, s.beta, n)
    direction = np.array(
        [
            math.sin(p.theta_r) * math.cos(p.phi_r),
            math.sin(p.theta_r) * math.sin(p.phi_r),
            math.cos(p.theta_r),
        ]
    )
    ratio = correlation_radius_sq(direction, p.wigner_t_prime, u_p, u_k, s.sigma, p.omega, s.energy)
    flags = []
    if ratio > 0:
        r_eff = 1 / math.sqrt(ratio)
    else:
        r_eff = math.nan
        flags.append("unbounded")
    try:
        th_mach = _deg(mach_angle(theta, u_p, u_k))
    except DomainError:
        th_mach = math.nan
        flags.append("mach_domain")
    return [
        s.name,
        float(index),
        float(value),
        _deg(theta),
        th_mach,
        to_nanometers(r_eff),
        r_eff / (s.beta * p.wigner_t_prime),
        "|".join(flags),
    ]


CORRELATION_COLUMNS = [
    ("series", "text"),
    ("index", "-"),
    ("theta_r", "deg"),
    ("theta", "deg"),
    ("theta_mach", "deg"),
    ("r_eff", "nm"),
    ("r_eff_over_upt", "-"),
    ("flags", "text"),
]


def _sample_columns(s):
    return [
        ("series", "text"),
        ("index", "-"),
        ("r", "nm"),
        ("theta_r", "deg"),
        ("t", "as"),
        ("wigner", "-"),
        ("error", "-"),
        ("flags", "text"),
    ]


def _sample_row(args):
    s, index, value = args
    p = s.with_axis_value(value)
    flags = []
    direction = np.array(
        [
            math.sin(p.theta_r) * math.cos(p.phi_r),
            math.sin(p.theta_r) * math.sin(p.phi_r),
            math.cos(p.theta_r),
        ]
    )
    value_w = err = math.nan
    try:
        kin = EmissionKinematics.on_triangle(
            s.beta, s.p_perp, s.pp_perp, p.photon_theta(), p.omega, p.medium, p.phi_prime,
            _configs(s)[0], s.helicity, s.helicity_out,
            1 if s.photon_helicity == "sum" else s.photon_helicity,
        )
        from .wigner import wigner_point

        sample = wigner_point(p.r * direction, p.t, kin, s.sigma, helicity=s.photon_helicity, tol=s.tol, strict=False)
        value_w = sample.value
        err = sample.diagnostics["error"]
        if not sample.diagnostics["converged"]:
            flags.append("not_converged")
    except InvalidTriangle:
        flags.append("forbidden")
    except ParaxialViolation:
        flags.append("paraxial")
    except ZeroAmplitude:
        flags.append("zero_amplitude")
    except QuadratureNotConverged:
        flags.append("not_converged")
    return [
        s.name,
        float(index),
        to_nanometers(p.r),
        _deg(p.theta_r),
        to_attoseconds(p.t),
        value_w,
        err,
        "|".join(flags),
    ]


def run_wigner_scan(config, tol=None, jobs=None):
    """Correlation-radius scan over theta_R, or Wigner samples over an (r, t) axis."""
    scenarios = validate(config, "wigner", tol=tol, jobs=jobs)
    modes = {s.wigner_mode for s in scenarios}
    if len(modes) != 1:
        raise ConfigError("all series must share wigner.mode", ["wigner.mode"])
    points = [(s, i, v) for s in scenarios for i, v in enumerate(s.values)]
    if modes == {"correlation"}:
        columns, fn = CORRELATION_COLUMNS, _correlation_row
    else:
        columns, fn = _sample_columns(scenarios[0]), _sample_row
    rows = _run_points(fn, points, scenarios[0].jobs)
    return ResultTable(columns, rows, _provenance(config, scenarios, "wigner"))


def any_not_converged(table):
    if "flags" not in table.names:
        return False
    return any("not_converged" in f.split("|") for f in table.column("flags"))

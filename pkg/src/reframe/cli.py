"""Command-line scenario runner.

Subcommands ``overlap``, ``change-frame``, ``limit-sweep`` and ``bhd`` each
emit one table (CSV or JSON) with a metadata block, and optionally a PNG
figure.  Exit codes: 0 success, 2 configuration error, 3 numerical contract
violation.
"""

from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import math
import operator
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import yaml

from . import __version__
from .bhd import REGIMES, bhd_two_pe_total, j_marginal, regime_inputs, regime_table, oracle_table
from .change_frame import ProcedureSpec, decohered_system, instrument, outcome_grid_bandlimit
from .channels import dephase_z, encode
from .frames import FAMILIES, FrameError, FrameFamily
from .groups import SU2, U1, haar_grid, identity, random_element
from .hilbert import PhysicalityError, Space, fidelity, ket_to_density, trace_distance

EXIT_CONFIG = 2
EXIT_CONTRACT = 3
RESIDUAL_TOL = 1e-10
BHD_TOL = 1e-8

GROUP_FAMILIES = {"u1": ("pe", "u1-coherent"), "su2": ("su2-fiducial",), "su2-coset": ("su2-coherent",)}
DEFAULT_FAMILY = {"u1": "pe", "su2": "su2-fiducial", "su2-coset": "su2-coherent"}


class ConfigError(ValueError):
    pass


class ContractError(RuntimeError):
    pass


# parsing helpers -------------------------------------------------------------

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv,
        ast.USub: operator.neg, ast.UAdd: operator.pos}


def parse_number(text, key: str) -> float:
    """A float, or arithmetic on numbers and ``pi`` such as ``2*pi/3``."""
    if isinstance(text, (int, float)):
        return float(text)

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ValueError
    try:
        return float(ev(ast.parse(str(text).strip(), mode="eval")))
    except (ValueError, SyntaxError, ZeroDivisionError):
        raise ConfigError(f"{key}: cannot read {text!r} as a number") from None


def parse_element(text, group: str, key: str):
    """U(1): an angle.  SU(2): 'omega,theta,phi' polar angles."""
    if group == "u1":
        return U1(parse_number(text, key))
    parts = [p for p in str(text).split(",") if p.strip()]
    if len(parts) != 3:
        raise ConfigError(f"{key}: SU(2) elements are given as 'omega,theta,phi'")
    return SU2.from_polar(*(parse_number(p, key) for p in parts))


def parse_sizes(text, key: str) -> list[float]:
    if isinstance(text, (list, tuple)):
        items = list(text)
    else:
        items = [t for t in str(text).split(",") if t.strip()]
    if not items:
        raise ConfigError(f"{key}: empty size list")
    return [parse_number(t, key) for t in items]


def _complex(text: str, key: str) -> complex:
    try:
        return complex(text.strip().replace(" ", ""))
    except ValueError:
        raise ConfigError(f"{key}: cannot read {text!r} as a complex amplitude") from None


def parse_system(text: str, group: str, seed: int = 0):
    """Return (space, rho) for a system descriptor.

    ``plus``                   |0>+|1> (U(1) modes) or +x spin-1/2 (SU(2))
    ``mixed[:d]``              maximally mixed, dimension d (default 2)
    ``basis:k[:d]``, ``fock:k[:d]``   k-th basis vector of a d-dimensional system
    ``random[:d[:seed]]``      seeded random pure state
    ``coherent:j:theta:phi``   spin coherent state (SU(2) only)
    ``amps:a0,a1,...``         explicit amplitudes (renormalised with a warning)
    """
    key = "system"
    parts = str(text).split(":")
    kind = parts[0]

    def space_for(d: int) -> Space:
        if d < 1:
            raise ConfigError(f"{key}: dimension must be positive")
        return Space.fock(d - 1) if group == "u1" else Space.spin((d - 1) / 2)

    try:
        if kind == "plus":
            return space_for(2), ket_to_density(np.array([1.0, 1.0]) / math.sqrt(2))
        if kind == "mixed":
            d = int(parts[1]) if len(parts) > 1 else 2
            return space_for(d), np.eye(d, dtype=complex) / d
        if kind in ("basis", "fock"):
            k = int(parts[1])
            d = int(parts[2]) if len(parts) > 2 else max(2, k + 1)
            if not 0 <= k < d:
                raise ConfigError(f"{key}: basis index {k} outside dimension {d}")
            v = np.zeros(d)
            v[k] = 1.0
            return space_for(d), ket_to_density(v)
        if kind == "random":
            d = int(parts[1]) if len(parts) > 1 else 2
            rng = np.random.default_rng(int(parts[2]) if len(parts) > 2 else seed)
            v = rng.normal(size=d) + 1j * rng.normal(size=d)
            return space_for(d), ket_to_density(v / np.linalg.norm(v))
        if kind == "coherent":
            if group == "u1":
                raise ConfigError(f"{key}: spin coherent systems need an SU(2) group")
            from .frames import su2_coherent
            j = parse_number(parts[1], key)
            theta = parse_number(parts[2], key) if len(parts) > 2 else 0.0
            phi = parse_number(parts[3], key) if len(parts) > 3 else 0.0
            v = su2_coherent(j, phi, theta, 0.0)
            return space_for(len(v)), ket_to_density(v)
        if kind == "amps":
            amps = np.array([_complex(a, key) for a in parts[1].split(",")])
            norm = np.linalg.norm(amps)
            if norm == 0:
                raise ConfigError(f"{key}: zero amplitude vector")
            if abs(norm - 1) > 1e-12:
                print(f"warning: system amplitudes had norm {norm:.6g}; renormalised", file=sys.stderr)
            return space_for(len(amps)), ket_to_density(amps / norm)
    except (IndexError, ValueError) as err:
        if isinstance(err, ConfigError):
            raise
        raise ConfigError(f"{key}: malformed descriptor {text!r}") from None
    raise ConfigError(f"{key}: unknown system descriptor {text!r}")


# configuration ------------------------------------------------------------------

KEYS = ("group", "family", "s_a", "s_b", "system", "orientation_a", "outcome", "outcome_grid", "bandlimit",
        "out", "format", "figure", "sizes", "mean_photons", "points", "regime", "phase_a", "phase_b",
        "j_max", "seed")

DEFAULTS = {"group": "u1", "s_a": 1, "s_b": 1, "system": "plus", "orientation_a": None, "outcome": None,
            "outcome_grid": None, "bandlimit": None, "out": None, "format": "csv", "figure": None,
            "sizes": "8,16,32,64,128", "mean_photons": None, "points": 181, "regime": "two-cs",
            "phase_a": "0", "phase_b": "pi/2", "j_max": None, "seed": 0, "family": None}


COMMON = ("group", "family", "s_a", "bandlimit", "seed")
COMMAND_KEYS = {
    "overlap": COMMON + ("mean_photons", "points"),
    "change-frame": COMMON + ("s_b", "system", "orientation_a", "outcome", "outcome_grid"),
    "limit-sweep": COMMON + ("system", "sizes"),
    "bhd": ("regime", "s_a", "s_b", "phase_a", "phase_b", "j_max"),
}


@dataclass
class ScenarioConfig:
    command: str
    values: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    def echo(self) -> dict:
        keys = COMMAND_KEYS[self.command]
        return {k: v for k, v in sorted(self.values.items()) if k in keys and v is not None}


def load_config_file(path: str) -> dict:
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh) or {}
    except OSError as err:
        raise ConfigError(f"config: cannot read {path}: {err}") from None
    except yaml.YAMLError as err:
        raise ConfigError(f"config: {path} is not valid YAML: {err}") from None
    if not isinstance(data, dict):
        raise ConfigError("config: expected a flat mapping of keys to values")
    out = {}
    for k, v in data.items():
        key = str(k).replace("-", "_")
        if key not in KEYS:
            raise ConfigError(f"config: unknown key {k!r}")
        if isinstance(v, (dict, list)) and key != "sizes":
            raise ConfigError(f"{key}: nested values are not allowed")
        out[key] = v
    return out


def build_config(command: str, cli_values: dict, config_path: str | None) -> ScenarioConfig:
    values = dict(DEFAULTS)
    if config_path:
        values.update(load_config_file(config_path))
    values.update({k: v for k, v in cli_values.items() if v is not None})
    group = values["group"]
    if group not in GROUP_FAMILIES:
        raise ConfigError(f"group: expected one of {sorted(GROUP_FAMILIES)}, got {group!r}")
    if values["family"] is None:
        values["family"] = DEFAULT_FAMILY[group]
    if values["family"] not in FAMILIES:
        raise ConfigError(f"family: expected one of {FAMILIES}, got {values['family']!r}")
    if command != "bhd" and values["family"] not in GROUP_FAMILIES[group]:
        raise ConfigError(f"family: {values['family']!r} does not belong to group {group!r}")
    if values["format"] not in ("csv", "json"):
        raise ConfigError(f"format: expected csv or json, got {values['format']!r}")
    for key in ("s_a", "s_b"):
        values[key] = parse_number(values[key], key)
        if values[key] < 0:
            raise ConfigError(f"{key}: must be non-negative")
    for key in ("points", "seed"):
        try:
            values[key] = int(values[key])
        except (TypeError, ValueError):
            raise ConfigError(f"{key}: expected an integer") from None
    if values["points"] < 2:
        raise ConfigError("points: need at least 2")
    for key in ("outcome_grid", "bandlimit", "j_max"):
        if values[key] is not None:
            try:
                values[key] = int(values[key])
            except (TypeError, ValueError):
                raise ConfigError(f"{key}: expected an integer") from None
            if values[key] < (1 if key == "outcome_grid" else 0):
                raise ConfigError(f"{key}: out of range")
    if command == "bhd" and values["regime"] not in REGIMES:
        raise ConfigError(f"regime: expected one of {REGIMES}, got {values['regime']!r}")
    return ScenarioConfig(command, values)


def make_frame(family: str, size: float, key: str) -> FrameFamily:
    try:
        return FrameFamily(family, size)
    except (FrameError, ValueError) as err:
        raise ConfigError(f"{key}: {err}") from None


def _grid(cfg: ScenarioConfig, group: str, needed: int):
    """Haar grid honouring a --bandlimit override (refused when too small)."""
    bl = cfg["bandlimit"]
    if bl is None:
        return None
    if bl < needed:
        raise ConfigError(f"bandlimit: {bl} is below the {needed} needed for exact integration")
    return haar_grid(group, bl)


# tables ------------------------------------------------------------------------

@dataclass
class Table:
    columns: list[str]
    rows: list[list]
    metadata: dict
    footer: dict = field(default_factory=dict)


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return "" if v is None else str(v)


def render(table: Table, fmt: str) -> str:
    if fmt == "json":
        def conv(v):
            if isinstance(v, (float, np.floating)):
                return float(f"{float(v):.12g}")
            if isinstance(v, Fraction):
                return _fmt(v)
            if isinstance(v, np.integer):
                return int(v)
            return v
        doc = {"metadata": {k: conv(v) for k, v in table.metadata.items()}, "columns": table.columns,
               "rows": [[conv(v) for v in row] for row in table.rows],
               "footer": {k: conv(v) for k, v in table.footer.items()}}
        return json.dumps(doc, indent=2, sort_keys=False, default=str) + "\n"
    buf = io.StringIO()
    for k, v in table.metadata.items():
        buf.write(f"# {k}: {_fmt(v) if not isinstance(v, dict) else json.dumps(v, sort_keys=True, default=str)}\r\n")
    w = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([_fmt(v) for v in row])
    for k, v in table.footer.items():
        buf.write(f"# {k}: {_fmt(v)}\r\n")
    return buf.getvalue()


def _metadata(cfg: ScenarioConfig, **extra) -> dict:
    meta = {"tool": "reframe", "version": __version__, "command": cfg.command,
            "config": {k: (str(v) if not isinstance(v, (int, float, str)) else v) for k, v in cfg.echo().items()}}
    meta.update(extra)
    return meta


# subcommands ----------------------------------------------------------------------

def _u1_overlap_frame(family: str, cfg: ScenarioConfig) -> FrameFamily:
    n = cfg["mean_photons"]
    if n is not None:
        n = parse_number(n, "mean_photons")
        if n < 0:
            raise ConfigError("mean_photons: must be non-negative")
        size = 2 * n if family == "pe" else math.sqrt(n)
        if family == "pe" and abs(size - round(size)) > 1e-12:
            raise ConfigError("mean_photons: a phase eigenstate needs an even 2<n>")
        return make_frame(family, round(size) if family == "pe" else size, "mean_photons")
    return make_frame(family, cfg["s_a"], "s_a")


def run_overlap(cfg: ScenarioConfig) -> tuple[Table, dict]:
    group, family = cfg["group"], cfg["family"]
    pts = cfg["points"]
    curves = {}
    rows = []
    if group == "u1":
        frame = _u1_overlap_frame(family, cfg)
        xs = np.linspace(-math.pi, math.pi, pts)
        param = "g"
    else:
        frame = make_frame(family, cfg["s_a"], "s_a")
        xs = np.linspace(0.0, math.pi, pts)
        param = "omega" if group == "su2" else "beta"
    d = frame.measurement_family().dimension
    columns = [param, "weight", "overlap_sq", "family", "s"]
    if family == "u1-coherent":
        columns.append("unsquared")
    for x in xs:
        if group == "u1":
            g = U1(x)
        elif group == "su2":
            g = SU2.from_polar(x, 0.0, 0.0)
        else:
            g = SU2.from_euler(0.0, x, 0.0)
        weight = frame.overlap_weight(g)
        row = [float(x), weight, weight / d, family, frame.size]
        if family == "u1-coherent":
            # alternative curve: bare amplitude modulus, no dimension factor
            row.append(math.sqrt(weight / d))
        rows.append(row)
    curves[f"{family} s={frame.size:g}"] = (xs, [r[1] for r in rows])
    meta = _metadata(cfg, dimension=d, frame_space_dim=frame.space.dim,
                     cutoff=frame.cutoff if frame.cutoff is not None else "")
    return Table(columns, rows, meta), {"curves": curves, "xlabel": param}


def _outcomes(cfg: ScenarioConfig, frame_b: FrameFamily):
    group = frame_b.group
    n = cfg["outcome_grid"]
    if cfg["outcome"] is not None:
        return [parse_element(cfg["outcome"], group, "outcome")], np.array([1.0]), "single"
    if group == "u1":
        n = 64 if n is None else n
        nodes = [U1(2 * math.pi * k / n) for k in range(n)]
        return nodes, np.full(n, 1.0 / n), "uniform"
    if n is None:
        grid = haar_grid("su2", outcome_grid_bandlimit(frame_b))
        return list(grid.nodes), np.asarray(grid.weights), "haar"
    rng = np.random.default_rng(cfg["seed"])
    return [random_element("su2", rng) for _ in range(n)], np.full(n, 1.0 / n), "random"


def _element_columns(g) -> list[float]:
    if isinstance(g, U1):
        return [g.theta]
    return list(g.polar())


def run_change_frame(cfg: ScenarioConfig) -> tuple[Table, dict]:
    group, family = cfg["group"], cfg["family"]
    space_s, rho_s = parse_system(cfg["system"], "u1" if group == "u1" else "su2", cfg["seed"])
    frame_a = make_frame(family, cfg["s_a"], "s_a")
    frame_b = make_frame(family, cfg["s_b"], "s_b")
    sgroup = frame_a.group
    a = identity(sgroup) if cfg["orientation_a"] is None else parse_element(cfg["orientation_a"], sgroup, "orientation_a")
    outcomes, weights, kind = _outcomes(cfg, frame_b)
    mb = frame_b.measurement_family()
    needed = frame_a.measurement_family().space.conjugation_bandlimit() + 2 * mb.space.conjugation_bandlimit()
    needed = max(needed, space_s.conjugation_bandlimit() + frame_a.space.conjugation_bandlimit(),
                 space_s.conjugation_bandlimit() + mb.space.conjugation_bandlimit(),
                 space_s.conjugation_bandlimit() + frame_a.overlap_bandlimit())
    grid = _grid(cfg, sgroup, needed)
    spec = ProcedureSpec(space_s, rho_s, frame_a, frame_b, a, outcomes[0], grid=grid)
    sigma = spec.initial_state()
    rho_p = decohered_system(spec)
    columns = ["index"] + (["h"] if sgroup == "u1" else ["h_omega", "h_theta", "h_phi"]) + \
        ["p_h", "residual", "fidelity_sb"]
    rows = []
    densities = []
    residuals = []
    for i, h in enumerate(outcomes):
        out = instrument(sigma, h, space_s, frame_a, frame_b, grid)
        predicted = encode(rho_p, mb.state(h), space_s, mb.space, grid)
        if out.null:
            res, fid = float("nan"), float("nan")
        else:
            res = trace_distance(out.post_state, predicted)
            fid = fidelity(out.post_state, predicted)
        rows.append([i] + _element_columns(h) + [out.outcome_density, res, fid])
        densities.append(out.outcome_density)
        residuals.append(res)
    max_res = float(np.nanmax(residuals)) if residuals else 0.0
    footer = {"fidelity_s": fidelity(rho_s, rho_p), "trace_distance_s": trace_distance(rho_s, rho_p),
              "max_residual": max_res, "p_integral": float(np.dot(weights, densities)),
              "outcome_grid": kind}
    meta = _metadata(cfg, outcomes=len(outcomes), system_dim=space_s.dim,
                     frame_a_dim=frame_a.space.dim, frame_b_dim=mb.space.dim)
    table = Table(columns, rows, meta, footer)
    if not max_res <= RESIDUAL_TOL:
        raise ContractError(f"pipeline/oracle residual {max_res:.3e} exceeds {RESIDUAL_TOL:g}", table)
    return table, {"index": list(range(len(outcomes))), "density": densities, "residual": residuals}


def _pe_concentration(s: int, width: float = 0.1, n: int = 4001) -> float:
    """Mass of D|<g|e>|^2 dg/2pi on |g| < width (trapezoid rule)."""
    frame = FrameFamily("pe", s)
    xs = np.linspace(-width, width, n)
    ys = np.array([frame.overlap_weight(U1(x)) for x in xs])
    return float(np.trapezoid(ys, xs) / (2 * math.pi)) if hasattr(np, "trapezoid") else \
        float(np.trapz(ys, xs) / (2 * math.pi))


def _offdiag(rho, space: Space) -> float:
    return float(np.linalg.norm(rho - dephase_z(rho, space)))


def run_limit_sweep(cfg: ScenarioConfig) -> tuple[Table, dict]:
    from .channels import decoherence_F

    group, family = cfg["group"], cfg["family"]
    sgroup = "u1" if group == "u1" else "su2"
    space_s, rho_s = parse_system(cfg["system"], sgroup, cfg["seed"])
    sizes = parse_sizes(cfg["sizes"], "sizes")
    columns = ["size", "fidelity", "trace_distance", "offdiag_norm", "concentration", "monotone"]
    rows = []
    prev = None
    fids, offs = [], []
    for s in sizes:
        frame = make_frame(family, s, "sizes")
        rho_p = decoherence_F(rho_s, space_s, frame)
        fid = fidelity(rho_s, rho_p)
        off = _offdiag(rho_p, space_s) if sgroup == "su2" else float("nan")
        conc = _pe_concentration(int(s)) if family == "pe" else float("nan")
        mono = "" if prev is None else bool(fid > prev)
        rows.append([s, fid, trace_distance(rho_s, rho_p), off, conc, mono])
        fids.append(fid)
        offs.append(off)
        prev = fid
    # analytic infinite-size row
    if group == "u1":
        limit = rho_s
    elif group == "su2":
        limit = rho_s
    else:
        limit = dephase_z(rho_s, space_s)
    rows.append(["inf", fidelity(rho_s, limit), trace_distance(rho_s, limit),
                 _offdiag(limit, space_s) if sgroup == "su2" else float("nan"), float("nan"), ""])
    meta = _metadata(cfg, system_dim=space_s.dim)
    footer = {"strictly_increasing": all(r[5] for r in rows[1:-1]) if len(rows) > 2 else True}
    return Table(columns, rows, meta, footer), {"sizes": sizes, "metrics": {"fidelity": fids}}


def run_bhd(cfg: ScenarioConfig) -> tuple[Table, dict]:
    regime = cfg["regime"]
    s_a, s_b = cfg["s_a"], cfg["s_b"]
    a, b = parse_number(cfg["phase_a"], "phase_a"), parse_number(cfg["phase_b"], "phase_b")
    if regime in ("two-pe",) and (s_a != int(s_a) or s_b != int(s_b)):
        raise ConfigError("s_a: phase eigenstate cutoffs must be integers")
    if regime == "cs-pe" and s_b != int(s_b):
        raise ConfigError("s_b: phase eigenstate cutoff must be an integer")
    j_max = cfg["j_max"]
    two_j_max = None if j_max is None else 2 * j_max
    meta = _metadata(cfg)
    if regime == "two-pe":
        psi_a, psi_b = regime_inputs(regime, s_a, a, s_b, b)
        marg = j_marginal(oracle_table(psi_a, psi_b))
        top = int(s_a + s_b) if two_j_max is None else min(two_j_max, int(s_a + s_b))
        rows = []
        for two_j in range(top + 1):
            j = two_j / 2
            exact = bhd_two_pe_total(int(s_a), int(s_b), j)
            o = marg.get(j, 0.0)
            rows.append([j, float(exact), exact, o, abs(float(exact) - o)])
        total = sum((r[2] for r in rows), Fraction(0))
        footer = {"normalization": float(total), "normalization_exact": total,
                  "max_residual": max(r[4] for r in rows)}
        table = Table(["j", "probability", "fraction", "oracle", "residual"], rows, meta, footer)
        plot = {"j": [r[0] for r in rows], "m": [0.0] * len(rows), "p": [r[1] for r in rows]}
        limit = BHD_TOL
    else:
        if regime in ("large-cs", "cs-pe") and s_a < 5:
            print(f"warning: large-amplitude approximation used at s_A = {s_a:g} < 5", file=sys.stderr)
        data = regime_table(regime, s_a, a, s_b, b, two_j_max)
        rows = [[j, m, p, o, abs(p - o)] for j, m, p, o in data]
        footer = {"normalization": float(sum(r[2] for r in rows)),
                  "oracle_mass": float(sum(r[3] for r in rows)),
                  "max_residual": max(r[4] for r in rows),
                  "total_variation": 0.5 * sum(r[4] for r in rows)}
        table = Table(["j", "m", "probability", "oracle", "residual"], rows, meta, footer)
        plot = {"j": [r[0] for r in rows], "m": [r[1] for r in rows], "p": [r[2] for r in rows]}
        limit = BHD_TOL if regime in ("two-cs", "equal-cs") else math.inf
    if not footer["max_residual"] <= limit:
        raise ContractError(f"closed form deviates from the oracle by {footer['max_residual']:.3e}", table)
    return table, plot


def _figure(command: str, path: str, extra: dict):
    from . import plotting

    if command == "overlap":
        plotting.overlap_figure(path, extra["curves"], extra["xlabel"])
    elif command == "change-frame":
        plotting.outcome_figure(path, extra["index"], extra["density"], extra["residual"])
    elif command == "limit-sweep":
        plotting.sweep_figure(path, extra["sizes"], extra["metrics"])
    else:
        plotting.bhd_figure(path, extra["j"], extra["m"], extra["p"])


RUNNERS = {"overlap": run_overlap, "change-frame": run_change_frame, "limit-sweep": run_limit_sweep,
           "bhd": run_bhd}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reframe", description="Quantum reference frame change scenarios.")
    parser.add_argument("--version", action="version", version=f"reframe {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in RUNNERS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="YAML file of flat key: value pairs (flags override it)")
        p.add_argument("--group", choices=sorted(GROUP_FAMILIES))
        p.add_argument("--family", help=f"frame family, one of {', '.join(FAMILIES)}")
        p.add_argument("--s-a", dest="s_a", help="size of frame A (cutoff, amplitude, spin)")
        p.add_argument("--s-b", dest="s_b", help="size of frame B")
        p.add_argument("--system", help="system state descriptor, e.g. plus, mixed:2, random:2:7, amps:1,1j")
        p.add_argument("--orientation-a", dest="orientation_a", help="orientation a (angle or omega,theta,phi)")
        p.add_argument("--outcome", help="single outcome h")
        p.add_argument("--outcome-grid", dest="outcome_grid", help="number of outcomes to evaluate")
        p.add_argument("--bandlimit", help="Haar grid bandlimit override")
        p.add_argument("--out", help="output path (stdout if omitted)")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--figure", help="also render a PNG figure to this path")
        p.add_argument("--seed", help="seed for random outcome grids and random systems")
        if name == "overlap":
            p.add_argument("--mean-photons", dest="mean_photons", help="set the U(1) size from <n>")
            p.add_argument("--points", help="number of parameter points")
        if name == "limit-sweep":
            p.add_argument("--sizes", help="comma-separated frame sizes")
        if name == "bhd":
            p.add_argument("--regime", choices=REGIMES)
            p.add_argument("--phase-a", dest="phase_a")
            p.add_argument("--phase-b", dest="phase_b")
            p.add_argument("--j-max", dest="j_max", help="largest j to tabulate")
    return parser


def _write(text: str, path: str | None):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    values = {k: v for k, v in vars(args).items() if k in KEYS}
    try:
        cfg = build_config(args.command, values, args.config)
        table, extra = RUNNERS[args.command](cfg)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except ContractError as err:
        msg, table = err.args
        _write(render(table, cfg["format"]), cfg["out"])
        print(f"contract violation: {msg}", file=sys.stderr)
        return EXIT_CONTRACT
    except PhysicalityError as err:
        print(f"contract violation: {err}", file=sys.stderr)
        return EXIT_CONTRACT
    _write(render(table, cfg["format"]), cfg["out"])
    if cfg["figure"]:
        _figure(args.command, cfg["figure"], extra)
    return 0


if __name__ == "__main__":
    sys.exit(main())

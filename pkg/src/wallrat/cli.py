"""Command-line front end.

Exit codes: 1 for configuration problems, 2 for numerical failures, 3 for
file-system errors.  Output files are written to a temporary file and renamed
into place.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import geometry as geo
from .errors import ConfigError, DomainError, NumericalError, PoleError, TerminatedError, WallratError
from .geometry import AlphaSeq, get_geometry
from .indeterminate import (TRAJECTORY_COLUMNS, extremality_diagnostics, indeterminate_alpha_builder,
                            oscillation_example, weyl_trajectory_s)
from .khrushchev import interior_grid, strong_formula_residual, weak_formula_residual
from .measure import DEFAULT_GRID, Measure, measure_from_descriptor, random_atomic, random_smooth
from .orf import orf_from_measure
from .schur import SchurEvaluator, SchurParams, measure_params
from .wall import approximants, tail_bound

EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 1, 2, 3


@dataclass
class RunConfig:
    geometry: str = "disk"
    measure: dict | None = None
    alphas: dict = field(default_factory=lambda: {"rule": "constant"})
    depth: int = 6
    grid: str = "interior"
    grid_count: int = 50
    boundary_count: int = 256
    fmt: str = "csv"
    seed: int = 0
    n_grid: int = DEFAULT_GRID
    z: complex | None = None
    params: list | None = None
    example: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)


# -- config parsing ----------------------------------------------------------------

def _complex(v, what: str) -> complex:
    try:
        if isinstance(v, (list, tuple)):
            if len(v) != 2:
                raise ValueError
            return complex(float(v[0]), float(v[1]))
        return complex(float(v), 0.0)
    except (TypeError, ValueError):
        raise ConfigError(f"{what}: expected a number or [re, im], got {v!r}") from None


def load_config(path: str | None, args: argparse.Namespace) -> RunConfig:
    raw: dict = {}
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed JSON in {path}: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
    cfg = RunConfig(raw=raw)
    cfg.geometry = raw.get("geometry", "disk")
    if cfg.geometry not in (geo.DISK, geo.HALFPLANE):
        raise ConfigError(f"unknown geometry {cfg.geometry!r}")
    cfg.measure = raw.get("measure")
    cfg.alphas = raw.get("alphas", {"rule": "constant"})
    cfg.depth = int(raw.get("depth", 6))
    cfg.n_grid = int(raw.get("n_grid", DEFAULT_GRID))
    cfg.seed = int(raw.get("seed", 0))
    cfg.fmt = raw.get("format", "csv")
    cfg.grid_count = int(raw.get("grid_count", 50))
    cfg.boundary_count = int(raw.get("boundary_count", 256))
    if "z" in raw:
        cfg.z = _complex(raw["z"], "z")
    cfg.params = raw.get("params")
    cfg.example = raw.get("example", {})
    if args.depth is not None:
        cfg.depth = args.depth
    if args.seed is not None:
        cfg.seed = args.seed
    if args.format is not None:
        cfg.fmt = args.format
    if args.grid is not None:
        cfg.grid = args.grid
    if cfg.depth < 1:
        raise ConfigError("depth must be at least 1")
    if cfg.fmt not in ("csv", "json"):
        raise ConfigError(f"unknown format {cfg.fmt!r}")
    return cfg


def build_measure(cfg: RunConfig, rng: np.random.Generator) -> Measure:
    desc = cfg.measure
    if desc is None:
        raise ConfigError("config has no measure")
    if not isinstance(desc, dict):
        raise ConfigError("measure must be an object")
    if "random" in desc:
        spec = desc["random"]
        kind = spec.get("kind", "atomic")
        if kind == "atomic":
            return random_atomic(cfg.geometry, int(spec.get("atoms", 4)), rng, cfg.n_grid)
        if kind == "smooth":
            return random_smooth(cfg.geometry, rng, int(spec.get("terms", 3)), n_grid=cfg.n_grid)
        raise ConfigError(f"unknown random measure kind {kind!r}")
    desc = dict(desc)
    desc.setdefault("geometry", cfg.geometry)
    try:
        return measure_from_descriptor(desc, cfg.n_grid)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, WallratError):
            raise
        raise ConfigError(f"bad measure descriptor: {exc}") from None


def build_alphas(cfg: RunConfig, rng: np.random.Generator, gammas=None) -> AlphaSeq:
    a = cfg.alphas
    geom = get_geometry(cfg.geometry)
    rule = a.get("rule", "constant")
    if rule == "explicit":
        pts = tuple(_complex(p, "alpha") for p in a.get("points", []))
        if not pts:
            raise ConfigError("explicit alpha rule needs points")
        return AlphaSeq(geom, pts, "constant" if a.get("repeat_last", True) else "explicit")
    if rule == "constant":
        alpha = _complex(a["alpha"], "alpha") if "alpha" in a else None
        return AlphaSeq.constant(geom, alpha)
    if rule == "geometric":
        return AlphaSeq.geometric(geom, _complex(a.get("target", 1.0), "target"), float(a.get("ratio", 0.5)))
    if rule == "random":
        return geo.random_alphas(geom, int(a.get("count", cfg.depth + 2)), rng)
    if rule == "builder":
        g = gammas if gammas is not None else [_complex(x, "gamma") for x in a.get("gammas", [])]
        eps = _epsilons(a.get("epsilons"), len(g))
        return indeterminate_alpha_builder(np.asarray(g, complex), eps, geom)
    raise ConfigError(f"unknown alpha rule {rule!r}")


def _epsilons(spec, count: int) -> np.ndarray:
    if spec is None:
        spec = {"geometric": 0.5}
    if isinstance(spec, list):
        return np.asarray(spec, dtype=float)
    n = np.arange(1, int(spec.get("count", count)) + 1)
    if "geometric" in spec:
        return float(spec["geometric"]) ** n
    if "power" in spec:
        return n ** (-float(spec["power"]))
    raise ConfigError(f"bad epsilon spec {spec!r}")


def build_grid(cfg: RunConfig) -> np.ndarray:
    geom = get_geometry(cfg.geometry)
    g = cfg.grid
    if g == "interior":
        return interior_grid(geom, cfg.grid_count)
    if g == "boundary":
        u = np.exp(2j * np.pi * (np.arange(cfg.boundary_count) + 0.5) / cfg.boundary_count)
        return np.asarray(geom.zeta0_inv(u), dtype=complex)
    if g.startswith("file:"):
        path = g[5:]
        try:
            with open(path, encoding="utf-8") as fh:
                pts = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed grid file: {exc}") from None
        z = np.array([_complex(p, "grid point") for p in pts], dtype=complex)
        if z.size == 0:
            raise ConfigError("grid file is empty")
        return z
    raise ConfigError(f"unknown grid {g!r}")


# -- output -------------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%.17g" % float(v)


def _jsonable(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    f = float(v)
    return f if math.isfinite(f) else None


def render(columns, rows, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
        return buf.getvalue()
    doc = {"columns": list(columns), "rows": [[_jsonable(v) for v in r] for r in rows]}
    return json.dumps(doc, indent=1) + "\n"


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(out: Path, name: str, columns, rows, fmt: str) -> Path:
    path = out / f"{name}.{fmt}"
    write_atomic(path, render(columns, rows, fmt))
    return path


# -- commands ---------------------------------------------------------------------

def _params_source(cfg: RunConfig, rng) -> tuple[SchurParams, AlphaSeq, Measure | None]:
    if cfg.params is not None:
        gam = np.array([_complex(x, "gamma") for x in cfg.params], dtype=complex)
        alphas = build_alphas(cfg, rng, gam)
        return SchurParams(gam, False, alphas), alphas, None
    m = build_measure(cfg, rng)
    alphas = build_alphas(cfg, rng)
    return measure_params(m, alphas, cfg.depth), alphas, m


def cmd_params(cfg: RunConfig, out: Path) -> str:
    rng = np.random.default_rng(cfg.seed)
    m = build_measure(cfg, rng)
    alphas = build_alphas(cfg, rng)
    p = measure_params(m, alphas, cfg.depth)
    system = orf_from_measure(m, alphas, cfg.depth)
    lam = system.lambdas
    rows = []
    for k, g in enumerate(p.gammas):
        l = lam[k] if k < lam.size else complex("nan")
        rows.append((k, g.real, g.imag, abs(g), l.real, l.imag, abs(g - l)))
    emit(out, "params", ("n", "re_gamma", "im_gamma", "abs_gamma", "re_lambda", "im_lambda",
                         "discrepancy"), rows, cfg.fmt)
    worst = max((r[-1] for r in rows), default=0.0)
    return f"params: {len(rows)} rows, terminating={int(p.terminating)}, max discrepancy {worst:.3e}"


def cmd_approx(cfg: RunConfig, out: Path) -> str:
    rng = np.random.default_rng(cfg.seed)
    params, alphas, m = _params_source(cfg, rng)
    z = build_grid(cfg)
    f = SchurEvaluator.from_measure(m)(z) if m is not None else None
    rows = []
    ok_all = True
    top = len(params) if params.terminating else min(cfg.depth, len(params))
    for n in range(1, top + 1):
        even, _ = approximants(params, alphas, n, z, odd=False)
        q_odd = approximants_odd(params, alphas, n, z)
        bound = tail_bound(alphas, n - 1, z)
        err = np.abs(f - even) if f is not None else np.full(z.shape, np.nan)
        ok = err <= bound + 1e-9 if f is not None else np.ones(z.shape, bool)
        ok_all &= bool(np.all(ok))
        for j in range(z.size):
            rows.append((n, z[j].real, z[j].imag, even[j].real, even[j].imag, q_odd[j].real,
                         q_odd[j].imag, err[j], bound[j], bool(ok[j])))
    emit(out, "approx", ("n", "re_z", "im_z", "re_even", "im_even", "re_odd", "im_odd", "error",
                         "bound", "bound_ok"), rows, cfg.fmt)
    return f"approx: {len(rows)} rows, bound satisfied everywhere={int(ok_all)}"


def approximants_odd(params, alphas, n, z) -> np.ndarray:
    from .wall import wall_eval
    q = wall_eval(params, alphas, n - 1, z)
    with np.errstate(divide="ignore", invalid="ignore"):
        odd = q.Sstar / q.Rstar
    return np.where(q.Rstar == 0, complex("nan"), odd)


def cmd_khrushchev(cfg: RunConfig, out: Path) -> str:
    rng = np.random.default_rng(cfg.seed)
    m = build_measure(cfg, rng)
    alphas = build_alphas(cfg, rng)
    grid = build_grid(cfg) if cfg.grid != "boundary" else interior_grid(alphas.geom, cfg.grid_count)
    params = measure_params(m, alphas, cfg.depth)
    top = len(params) - 1 if params.terminating else cfg.depth
    rows = []
    for n in range(0, min(cfg.depth, top) + 1):
        s = strong_formula_residual(m, alphas, n, grid)
        w = weak_formula_residual(m, alphas, n, cfg.boundary_count)
        rows.append((n, s.max_abs_residual, s.extra["second_form_max"], s.extra["mass"],
                     float("nan") if w.skipped else w.max_abs_residual, w.excluded))
    emit(out, "khrushchev", ("n", "strong_max", "second_form_max", "mass", "weak_max", "excluded"),
         rows, cfg.fmt)
    worst = max(r[1] for r in rows)
    return f"khrushchev: max residual {worst:.3e}"


def cmd_weyl(cfg: RunConfig, out: Path) -> str:
    rng = np.random.default_rng(cfg.seed)
    params, alphas, _ = _params_source(cfg, rng)
    z = cfg.z if cfg.z is not None else complex(get_geometry(cfg.geometry).zeta0_inv(0.5))
    n_max = min(cfg.depth, len(params) - (2 if params.terminating else 1))
    if n_max < 2:
        raise ConfigError("weyl needs at least three parameters")
    rep = extremality_diagnostics(params, alphas, n_max, z)
    emit(out, "weyl", TRAJECTORY_COLUMNS, rep.rows(), cfg.fmt)
    return f"weyl: {len(rep.n)} disks, min radius {rep.radius.min():.6e}"


def cmd_example(cfg: RunConfig, out: Path) -> str:
    ex_cfg = cfg.example
    geom = get_geometry(cfg.geometry)
    default_z = 0.5 if geom.is_disk else 2j
    z = _complex(ex_cfg["z"], "z") if "z" in ex_cfg else (cfg.z if cfg.z is not None else default_z)
    g0 = float(ex_cfg.get("gamma0", 0.5))
    N = int(ex_cfg.get("N", cfg.depth))
    eps = _epsilons(ex_cfg.get("epsilons", {"geometric": 0.5, "count": N}), N)
    ex = oscillation_example(geom, z, g0, eps, N)
    arows = [(k, a.real, a.imag, ex.alphas.depth(k)) for k, a in enumerate(ex.alphas.points, start=1)]
    grows = [(k, g.real) for k, g in enumerate(ex.params.gammas)]
    drows = [(k, d) for k, d in enumerate(ex.d)]
    emit(out, "example_alphas", ("n", "re_alpha", "im_alpha", "depth"), arows, cfg.fmt)
    emit(out, "example_gammas", ("n", "gamma"), grows, cfg.fmt)
    emit(out, "example_d", ("n", "d"), drows, cfg.fmt)
    disks = weyl_trajectory_s(ex.params, ex.alphas, N, z)
    rmin = min(d.radius for d in disks)
    alt = all((d > 0) == (k % 2 == 0) for k, d in enumerate(ex.d))
    return f"example: {N} steps, signs alternate={int(alt)}, min radius {rmin:.6e}"


COMMANDS = {
    "params": cmd_params,
    "approx": cmd_approx,
    "khrushchev": cmd_khrushchev,
    "weyl": cmd_weyl,
    "example": cmd_example,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wallrat", description="Nevanlinna-Pick parameters, Wall "
                                "approximants, Khrushchev residuals and Weyl disks.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--depth", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--grid", help="interior | boundary | file:PATH")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args)
        summary = COMMANDS[args.command](cfg, Path(args.out))
    except (ConfigError, DomainError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, TerminatedError, PoleError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(summary)
    return 0


if __name__ == "__main__":
    sys.exit(main())

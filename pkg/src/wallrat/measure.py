"""Finite positive measures on the boundary and their C- and S-functions.

A :class:`Measure` is a finite list of atoms plus an optional density sampled
on a uniform grid of ``n_grid`` nodes of the unit circle.  Half-plane
measures are stored through their Cayley pushforward: the grid lives on the
circle and maps to the extended real line, the node ``u = 1`` being the point
at infinity.  Densities are taken with respect to the normalised Lebesgue
measure ``dm`` of the geometry (``dtheta/2pi`` on the circle,
``dt/(pi(1+t^2))`` on the line), so the sample values are ``mu'``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ._removable import node_radius, removable_eval
from .errors import DomainError, NonFiniteIntegrand, ZeroMassError
from .geometry import INF, Geometry, get_geometry

DEFAULT_GRID = 2048
PROBABILITY_TOL = 1e-10


def grid_circle(n: int) -> np.ndarray:
    """Uniform nodes ``exp(2 pi i (k + 1/2) / n)``; never hits ``u = 1``."""
    return np.exp(2j * np.pi * (np.arange(n) + 0.5) / n)


@dataclass(frozen=True, eq=False)
class Measure:
    geom: Geometry
    atom_locs: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))
    atom_weights: np.ndarray = field(default_factory=lambda: np.zeros(0))
    density: np.ndarray | None = None
    n_grid: int = DEFAULT_GRID

    def __post_init__(self):
        locs = np.atleast_1d(np.asarray(self.atom_locs, dtype=complex))
        w = np.atleast_1d(np.asarray(self.atom_weights, dtype=float))
        if locs.shape != w.shape:
            raise DomainError("atom locations and weights differ in length")
        if np.any(~(w > 0)):
            raise DomainError("atom weights must be positive")
        if not np.all(self.geom.is_boundary(locs)):
            raise DomainError("atoms must lie on the boundary")
        if not self.geom.is_disk:
            locs = np.where(np.isinf(locs), INF, locs.real + 0j)
        object.__setattr__(self, "atom_locs", locs)
        object.__setattr__(self, "atom_weights", w)
        if self.density is not None:
            d = np.asarray(self.density, dtype=float)
            if d.shape != (self.n_grid,):
                raise DomainError(f"density needs {self.n_grid} samples, got {d.shape}")
            if np.any(d < 0) or not np.all(np.isfinite(d)):
                raise DomainError("density samples must be finite and non-negative")
            object.__setattr__(self, "density", d)
        if not self.mass > 0:
            raise ZeroMassError("measure has no mass")
        object.__setattr__(self, "_coeff_cache", {})

    # -- cached geometry of the grid ---------------------------------------
    @property
    def grid_u(self) -> np.ndarray:
        return grid_circle(self.n_grid)

    @property
    def grid_t(self) -> np.ndarray:
        return np.asarray(self.geom.zeta0_inv(self.grid_u))

    @property
    def atom_u(self) -> np.ndarray:
        return np.asarray(self.geom.zeta0(self.atom_locs), dtype=complex).reshape(-1)

    @property
    def mass(self) -> float:
        m = float(self.atom_weights.sum())
        if self.density is not None:
            m += float(self.density.mean())
        return m

    @property
    def is_probability(self) -> bool:
        return abs(self.mass - 1.0) <= PROBABILITY_TOL

    @property
    def n_atoms(self) -> int:
        return int(self.atom_weights.size)

    @property
    def is_atomic(self) -> bool:
        return self.density is None

    def normalized(self) -> "Measure":
        s = 1.0 / self.mass
        dens = None if self.density is None else self.density * s
        return Measure(self.geom, self.atom_locs, self.atom_weights * s, dens, self.n_grid)


# -- construction -----------------------------------------------------------

def lebesgue(geom, n_grid: int = DEFAULT_GRID) -> Measure:
    return Measure(get_geometry(geom), density=np.ones(n_grid), n_grid=n_grid)


def poisson(geom, alpha: complex, n_grid: int = DEFAULT_GRID, depth: float | None = None) -> Measure:
    """``dm_alpha = D_R(., alpha) dm``."""
    geom = get_geometry(geom)
    geom.check_interior(alpha, "alpha")
    t = geom.zeta0_inv(grid_circle(n_grid))
    dens = np.real(geom.poisson(t, alpha, depth))
    return Measure(geom, density=dens, n_grid=n_grid)


def dirac(geom, tau: complex, n_grid: int = DEFAULT_GRID) -> Measure:
    return Measure(get_geometry(geom), np.array([tau]), np.array([1.0]), None, n_grid)


def atomic(geom, locs: Sequence[complex], weights: Sequence[float],
           n_grid: int = DEFAULT_GRID) -> Measure:
    return Measure(get_geometry(geom), np.asarray(locs, complex), np.asarray(weights, float),
                   None, n_grid)


def mix(parts: Sequence[tuple[float, Measure]]) -> Measure:
    """Convex combination ``sum c_j mu_j``; all parts share geometry and grid."""
    if not parts:
        raise DomainError("empty mixture")
    geom = parts[0][1].geom
    n_grid = parts[0][1].n_grid
    coeffs = [float(c) for c, _ in parts]
    if any(c <= 0 for c in coeffs) or abs(sum(coeffs) - 1.0) > 1e-12:
        raise DomainError("mixture weights must be positive and sum to 1")
    locs, weights, dens = [], [], None
    for c, m in parts:
        if m.geom != geom or m.n_grid != n_grid:
            raise DomainError("mixture parts must share geometry and grid")
        locs.append(m.atom_locs)
        weights.append(c * m.atom_weights)
        if m.density is not None:
            dens = c * m.density if dens is None else dens + c * m.density
    return Measure(geom, np.concatenate(locs), np.concatenate(weights), dens, n_grid)


def builtin_measure(geom, kind: str, *, alpha: complex | None = None, tau: complex | None = None,
                    parts: Sequence[tuple[float, Measure]] | None = None,
                    n_grid: int = DEFAULT_GRID) -> Measure:
    geom = get_geometry(geom)
    if kind == "lebesgue":
        return lebesgue(geom, n_grid)
    if kind == "poisson":
        if alpha is None:
            raise DomainError("poisson needs alpha")
        return poisson(geom, alpha, n_grid)
    if kind == "dirac":
        if tau is None:
            raise DomainError("dirac needs tau")
        return dirac(geom, tau, n_grid)
    if kind == "mix":
        return mix(parts or [])
    raise DomainError(f"unknown builtin measure {kind!r}")


def modulate(m: Measure, weight: Callable[[np.ndarray], np.ndarray],
             renormalize: bool = False) -> Measure:
    """Multiply ``m`` by a non-negative boundary function."""
    wa = np.asarray(weight(m.atom_locs), dtype=float).reshape(-1) if m.n_atoms else np.zeros(0)
    new_atoms = m.atom_weights * wa
    dens = None
    if m.density is not None:
        wg = np.asarray(weight(m.grid_t), dtype=float).reshape(-1)
        if np.any(wg < 0) or not np.all(np.isfinite(wg)):
            raise DomainError("modulating weight must be finite and non-negative")
        dens = m.density * wg
    if np.any(wa < 0) or not np.all(np.isfinite(wa)):
        raise DomainError("modulating weight must be finite and non-negative")
    keep = new_atoms > 0
    mass = new_atoms.sum() + (0.0 if dens is None else dens.mean())
    if not mass > 1e-300:
        raise ZeroMassError("modulated measure has no mass")
    out = Measure(m.geom, m.atom_locs[keep], new_atoms[keep], dens, m.n_grid)
    return out.normalized() if renormalize else out


# -- integration --------------------------------------------------------------

def integrate(m: Measure, g: Callable[[np.ndarray], np.ndarray]) -> complex:
    """``sum_j w_j g(t_j) + trapezoid(g * density)``."""
    total = 0j
    if m.n_atoms:
        ga = np.asarray(g(m.atom_locs), dtype=complex)
        if not np.all(np.isfinite(ga)):
            raise NonFiniteIntegrand("integrand is not finite at an atom")
        total += np.sum(m.atom_weights * ga)
    if m.density is not None:
        gg = np.asarray(g(m.grid_t), dtype=complex)
        if not np.all(np.isfinite(gg)):
            raise NonFiniteIntegrand("integrand is not finite at a grid node")
        total += np.mean(m.density * gg)
    return complex(total)


def _moments(samples: np.ndarray) -> np.ndarray:
    """``int conj(u)^j rho dm`` for ``j = 0 .. n/2 - 1`` from node samples."""
    n = samples.size
    k = n // 2
    j = np.arange(k)
    c = np.fft.fft(samples)[:k] / n
    return c * np.exp(-1j * np.pi * j / n)


def _series_coeffs(m: Measure, weight, key) -> np.ndarray:
    cache = m._coeff_cache
    if key is not None and key in cache:
        return cache[key]
    rho = m.density.astype(complex)
    if weight is not None:
        rho = rho * np.asarray(weight(m.grid_t), complex)
    if not np.all(np.isfinite(rho)):
        raise NonFiniteIntegrand("integrand is not finite at a grid node")
    mom = _moments(rho)
    coeffs = 2.0 * mom
    coeffs[0] = mom[0]
    if key is not None:
        cache[key] = coeffs
    return coeffs


def herglotz(m: Measure, z, boundary_weight: Callable[[np.ndarray], np.ndarray] | None = None,
             cache_key=None):
    """``int D(t, z) h(t) dmu(t)`` for interior (or near-boundary) ``z``.

    The density part is summed as the Fourier series of the sampled density
    (the trapezoid rule with aliasing removed), which stays accurate for
    points close to the boundary where the plain trapezoid rule fails.
    """
    z = np.asarray(z, dtype=complex)
    if not np.all(m.geom.is_interior(z)):
        raise DomainError("C-function evaluated outside the open region")
    w = np.asarray(m.geom.zeta0(z), dtype=complex)
    out = np.zeros(w.shape, dtype=complex)
    if m.n_atoms:
        s = m.atom_u
        ha = m.atom_weights * (1.0 if boundary_weight is None
                               else np.asarray(boundary_weight(m.atom_locs), complex))
        if not np.all(np.isfinite(ha)):
            raise NonFiniteIntegrand("integrand is not finite at an atom")
        wf = w.reshape(-1)
        D = (s[:, None] + wf[None, :]) / (s[:, None] - wf[None, :])
        out += (ha @ D).reshape(w.shape)
    if m.density is not None:
        if boundary_weight is None:
            cache_key = "plain"
        coeffs = _series_coeffs(m, boundary_weight, cache_key)
        out += np.polynomial.polynomial.polyval(w, coeffs)
    return out[()] if out.ndim == 0 else out


def c_function(m: Measure, z):
    """``F(z; dmu) = int D(t, z) dmu(t)``."""
    return herglotz(m, z)


def c_alpha_constant(m: Measure, alpha: complex, depth: float | None = None) -> float:
    """``c_alpha(dmu) = -int D_I(t, alpha) / D_R(t, alpha) dmu(t)``."""
    geom = m.geom

    def g(t):
        DI = geom.kernel(t, alpha).D_I
        return DI.real / geom.poisson(t, alpha, depth)

    return -integrate(m, g).real


def alpha_c_function(m: Measure, alpha: complex, z, depth: float | None = None):
    """``F_alpha(z; dmu) = F(z; dmu / D_R(., alpha)) + i c_alpha(dmu)``."""
    geom = m.geom
    geom.check_interior(alpha, "alpha")
    if alpha == geom.alpha0:
        return c_function(m, z)
    F = herglotz(m, z, lambda t: 1.0 / geom.poisson(t, alpha, depth),
                 cache_key=("alpha", complex(alpha), depth))
    return F + 1j * c_alpha_constant(m, alpha, depth)


def s_from_c(geom: Geometry, alpha: complex, F, z):
    """``f = (1/zeta_alpha) (F - 1)/(F + 1)``; not safe at ``z = alpha``."""
    return (F - 1.0) / ((F + 1.0) * geom.zeta(alpha, z))


def alpha_s_function(m: Measure, alpha: complex, z, depth: float | None = None):
    """The alpha-S-function of ``m``; ``z = alpha`` is a removable point."""
    geom = m.geom

    def f(x):
        return s_from_c(geom, alpha, alpha_c_function(m, alpha, x, depth), x)

    return removable_eval(f, z, [(alpha, node_radius(m.geom, alpha, depth))])


def s_function(m: Measure, z):
    return alpha_s_function(m, m.geom.alpha0, z)


def fa_from_f(geom: Geometry, alpha: complex, f):
    """Alpha-S-function from the S-function of the same measure."""
    a = complex(geom.zeta0(alpha))
    if a == 0:
        return f
    return -(a / abs(a)) * (f - np.conj(a)) / (1.0 - a * f)


def f_from_fa(geom: Geometry, alpha: complex, fa):
    a = complex(geom.zeta0(alpha))
    if a == 0:
        return fa
    r = abs(a)
    return -(r / a) * (fa - r) / (1.0 - r * fa)


def boundary_offset(geom: Geometry, t, h: float):
    """Interior point at distance ``h`` from boundary point ``t`` (radial or vertical)."""
    t = np.asarray(t, dtype=complex)
    return (1.0 - h) * t if geom.is_disk else t + 1j * h


# -- descriptors and random fixtures --------------------------------------------

def _boundary_point(geom: Geometry, v) -> complex:
    if geom.is_disk:
        return complex(np.exp(1j * float(v)))
    if isinstance(v, str):
        if v.lower() in ("inf", "infinity", "+inf", "-inf"):
            return INF
        return complex(float(v))
    return complex(float(v))


def measure_from_descriptor(desc: dict, n_grid: int = DEFAULT_GRID,
                            normalize: bool = True) -> Measure:
    """Build a measure from the JSON descriptor used by the CLI."""
    geom = get_geometry(desc.get("geometry", "disk"))
    atoms = desc.get("atoms", []) or []
    locs = [_boundary_point(geom, a["angle_or_x"]) for a in atoms]
    weights = [float(a["weight"]) for a in atoms]
    dens = None
    dd = desc.get("density")
    if dd:
        scale = float(dd.get("weight", 1.0))
        if "samples" in dd:
            dens = scale * np.asarray(dd["samples"], dtype=float)
            n_grid = dens.size
        elif dd.get("builtin") == "lebesgue":
            dens = scale * np.ones(n_grid)
        elif dd.get("builtin") == "poisson":
            a = dd["alpha"]
            alpha = complex(a[0], a[1])
            dens = scale * poisson(geom, alpha, n_grid).density
        else:
            raise DomainError(f"unknown density descriptor {dd!r}")
    m = Measure(geom, np.asarray(locs, complex), np.asarray(weights, float), dens, n_grid)
    return m.normalized() if normalize else m


def random_atomic(geom, k: int, rng: np.random.Generator, n_grid: int = DEFAULT_GRID) -> Measure:
    """``k`` atoms at well-separated random boundary points, random weights."""
    geom = get_geometry(geom)
    base = np.sort(rng.uniform(0, 2 * math.pi, k))
    # keep atoms apart so the Gram matrices stay well conditioned
    theta = (2 * math.pi * np.arange(k) / k + 0.6 * (base - base.mean()) / k) % (2 * math.pi)
    theta += rng.uniform(0, 2 * math.pi)
    u = np.exp(1j * theta)
    locs = geom.zeta0_inv(u)
    w = rng.uniform(0.5, 1.5, k)
    return atomic(geom, np.atleast_1d(locs), w / w.sum(), n_grid)


def random_smooth(geom, rng: np.random.Generator, n_terms: int = 3, rmax: float = 0.6,
                  n_grid: int = DEFAULT_GRID) -> Measure:
    """Random convex combination of Poisson densities (smooth, positive)."""
    geom = get_geometry(geom)
    c = rng.uniform(0.2, 1.0, n_terms)
    c = c / c.sum()
    parts = []
    for cj in c:
        a = rmax * math.sqrt(rng.uniform()) * np.exp(2j * math.pi * rng.uniform())
        alpha = geom.zeta0_inv(a)
        parts.append((cj, poisson(geom, complex(alpha), n_grid)))
    c_sum = sum(p[0] for p in parts)
    parts[-1] = (parts[-1][0] + 1.0 - c_sum, parts[-1][1])
    return mix(parts)

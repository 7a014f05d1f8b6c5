"""Residual checks for the rational Khrushchev formulas.

The strong form compares the ``alpha_n``-S-function of ``|Phi_n|^2 dmu`` with
``b_n f_n`` inside the region.  The weak form compares boundary densities,
using a two-offset Richardson extrapolation for the boundary values of
``f_n``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NumericalError
from .geometry import AlphaSeq, Geometry
from .measure import Measure, alpha_s_function, fa_from_f, modulate, s_function
from .orf import OrfSystem, inverse_iterate_b, orf_eval
from .schur import SchurEvaluator, measure_params, np_iterate

MASS_TOL = 1e-8
ATOM_EXCLUSION = 1e-3
OFFSETS = (1e-5, 1e-6)


@dataclass(frozen=True)
class ResidualReport:
    n: int
    grid: np.ndarray
    residuals: np.ndarray
    max_abs_residual: float
    skipped: bool = False
    note: str = ""
    excluded: int = 0
    extra: dict = field(default_factory=dict)

    @classmethod
    def build(cls, n, grid, residuals, **kw) -> "ResidualReport":
        r = np.abs(np.asarray(residuals))
        mx = float(r.max()) if r.size else 0.0
        return cls(n, np.asarray(grid), r, mx, **kw)


def interior_grid(geom: Geometry, k: int = 50, rmax: float = 0.9) -> np.ndarray:
    """Deterministic sunflower points in the Cayley disk of radius ``rmax``."""
    j = np.arange(k)
    golden = (3.0 - np.sqrt(5.0)) * np.pi
    u = rmax * np.sqrt((j + 0.5) / k) * np.exp(1j * golden * j)
    return np.asarray(geom.zeta0_inv(u), dtype=complex)


def _offset_points(geom: Geometry, t: np.ndarray, h: float) -> np.ndarray:
    # move inwards along the Cayley radius; for the disk this is the radial offset
    u = np.asarray(geom.zeta0(t), dtype=complex)
    return np.asarray(geom.zeta0_inv((1.0 - h) * u), dtype=complex)


def density_at(m: Measure, t) -> np.ndarray:
    """Trigonometric interpolant of the density samples at boundary points."""
    if m.density is None:
        raise DomainError("measure has no density part")
    n = m.n_grid
    c = np.fft.fft(m.density) / n
    k = np.fft.fftfreq(n, 1.0 / n)
    u = np.asarray(m.geom.zeta0(t), dtype=complex).reshape(-1)
    # sample k sits at angle 2 pi (k + 1/2) / n
    phase = np.exp(-1j * np.pi * k / n)
    vals = (c * phase)[None, :] * u[:, None] ** k[None, :]
    return vals.sum(axis=1).real.reshape(np.shape(t))


def _setup(m: Measure, alphas: AlphaSeq, n: int, system: OrfSystem | None):
    """``Phi_n`` as a point map, the S-function and its parameters.

    Without ``system`` the ORF comes from the recurrence over the measure's
    own parameters, which stays accurate where the Gram matrix of ``B_k`` is
    numerically singular (e.g. one node repeated close to the boundary).
    """
    f = SchurEvaluator.from_measure(m)
    params = measure_params(m, alphas, max(n, 1))
    if system is not None:
        if n > system.n_max or (system.terminating and n == system.n_max):
            raise DomainError(f"Phi_{n} is not available for this measure")
        return (lambda t: system.phi(n, t)), f, params
    if params.terminating and n >= len(params):
        raise DomainError(f"Phi_{n} is not available for this measure")
    return (lambda t: orf_eval(params, alphas, n, t).Phi), f, params


def weak_formula_residual(m: Measure, alphas: AlphaSeq, n: int, boundary_grid=256,
                          system: OrfSystem | None = None) -> ResidualReport:
    """Boundary residual of the density identity for ``|Phi_n|^2 dmu``.

    ``boundary_grid`` is a node count (a subset of the quadrature grid) or an
    array of boundary points.
    """
    geom = alphas.geom
    if m.is_atomic:
        return ResidualReport(n, np.zeros(0, complex), np.zeros(0), 0.0, True,
                              "finitely supported measure: the identity is trivial")
    if np.isscalar(boundary_grid):
        k = int(boundary_grid)
        step = max(m.n_grid // k, 1)
        t = m.grid_t[::step]
        dens = m.density[::step]
    else:
        t = np.asarray(boundary_grid, dtype=complex)
        dens = density_at(m, t)
    keep = np.isfinite(t)
    if m.n_atoms:
        u = np.asarray(geom.zeta0(t[keep]))
        d = np.min(np.abs(u[:, None] - m.atom_u[None, :]), axis=1)
        sub = d >= ATOM_EXCLUSION
        idx = np.flatnonzero(keep)
        keep[idx[~sub]] = False
    excluded = int((~keep).sum())
    t, dens = t[keep], dens[keep]
    phi, f, params = _setup(m, alphas, n, system)
    fn = np_iterate(f, alphas, n) if n else f
    an, dn = alphas[n], alphas.depth(n)
    lhs = np.abs(phi(t)) ** 2 * dens / geom.poisson(t, an, dn)
    h1, h2 = OFFSETS
    g1 = fn(_offset_points(geom, t, h1))
    g2 = fn(_offset_points(geom, t, h2))
    fb = (h1 * g2 - h2 * g1) / (h1 - h2)
    b = inverse_iterate_b(params, alphas, n, t)
    zn = geom.zeta(an, t)
    rhs = (1.0 - np.abs(fb) ** 2) / np.abs(1.0 - zn * b * fb) ** 2
    return ResidualReport.build(n, t, lhs - rhs, excluded=excluded,
                                note=f"{excluded} nodes excluded" if excluded else "")


def strong_formula_residual(m: Measure, alphas: AlphaSeq, n: int, grid=None,
                            system: OrfSystem | None = None) -> ResidualReport:
    """Interior residual ``|f_{alpha_n}(z; |Phi_n|^2 dmu) - b_n(z) f_n(z)|``.

    ``extra`` carries the second-form residual, the pure-algebra consistency
    between the two forms and the mass of the modulated measure.
    """
    geom = alphas.geom
    z = interior_grid(geom) if grid is None else np.asarray(grid, dtype=complex)
    phi, f, params = _setup(m, alphas, n, system)
    nu = modulate(m, lambda t: np.abs(phi(t)) ** 2)
    if abs(nu.mass - 1.0) > MASS_TOL:
        raise NumericalError(f"|Phi_{n}|^2 dmu has mass {nu.mass!r}")
    an, dn = alphas[n], alphas.depth(n)
    lhs = alpha_s_function(nu, an, z, dn)
    fn = np_iterate(f, alphas, n) if n else f
    bf = inverse_iterate_b(params, alphas, n, z) * fn(z)
    a = complex(geom.zeta0(an))
    ra = abs(a)
    k3_rhs = bf if ra == 0 else -(ra / a) * (bf - ra) / (1.0 - ra * bf)
    k3 = np.abs(s_function(nu, z) - k3_rhs)
    # mapping the second form back through the S -> alpha-S map must return b_n f_n
    algebra = np.abs(fa_from_f(geom, an, k3_rhs) - bf)
    extra = {
        "second_form_max": float(k3.max()),
        "algebra_max": float(algebra.max()),
        "mass": float(nu.mass),
        "max_abs_bf": float(np.abs(bf).max()),
        # f -> f_n amplifies errors by about 1 / Upsilon_{n-1}
        "upsilon": params.upsilon(n - 1) if n else 1.0,
    }
    return ResidualReport.build(n, z, lhs - bf, extra=extra)

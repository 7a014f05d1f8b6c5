"""Weyl disks, indeterminate (alpha, gamma) constructions and finite-horizon
extremality diagnostics.

Centers and radii are computed from cancellation-free forms (a running sum of
non-negative terms for the denominators).  The textbook determinant forms are
evaluated as well and compared with a tolerance that accounts for their
conditioning, since they lose digits when ``|S|`` and ``|R*|`` nearly agree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConstructionError, DegenerateDisk, DomainError, InfeasibleEpsilon
from .geometry import AlphaSeq, Geometry, blaschke_all, get_geometry
from .measure import Measure
from .orf import inverse_iterate_b, orf_trajectory
from .schur import SchurParams, measure_params
from .wall import wall_trajectory

O0_EXCLUSION = 1e-6
DEGENERATE_TOL = 1e-14
CROSS_TOL = 1e-9
EPS = np.finfo(float).eps


@dataclass(frozen=True)
class WeylDisk:
    center: complex
    radius: float
    n: int
    variant: str
    cross_check: float = 0.0
    cross_tol: float = CROSS_TOL

    @property
    def cross_check_ok(self) -> bool:
        return self.cross_check <= self.cross_tol

    def contains(self, s: complex, slack: float = 1e-9) -> bool:
        return abs(s - self.center) <= self.radius + slack


def _check_o0(alphas: AlphaSeq, n: int, z: complex):
    for k in range(0, n + 1):
        if abs(z - alphas[k]) < O0_EXCLUSION:
            raise DomainError(f"z is within {O0_EXCLUSION} of alpha_{k}")


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def weyl_trajectory_s(params: SchurParams, alphas: AlphaSeq, n_max: int, z: complex) -> list[WeylDisk]:
    """Schur-coordinate disks ``0..n_max`` at one point ``z``."""
    z = complex(z)
    _check_o0(alphas, n_max, z)
    quads = wall_trajectory(params, alphas, n_max, z)
    B = blaschke_all(alphas, n_max, z)
    out = []
    for q in quads:
        if q.norm_gap is None:
            raise DegenerateDisk("terminated parameters: the disk has collapsed")
        N = float(q.norm_gap)
        if not N * q.Upsilon > DEGENERATE_TOL:
            raise DegenerateDisk(f"|S|^2 - |R*|^2 too small at n={q.n}")
        R, S, Rs, Ss = complex(q.R), complex(q.S), complex(q.Rstar), complex(q.Sstar)
        Bn = complex(B[q.n])
        r = abs(Bn) / N
        # R/S - c = +(B_n/N_n) conj(R*)/S follows from S S* - R R* = Upsilon B_n
        c = R / S - (Bn / N) * np.conj(Rs) / S
        # determinant forms
        den = abs(S) ** 2 - abs(Rs) ** 2
        r_det = abs(S * Ss - R * Rs) / den
        c_det = (R * np.conj(S) - Ss * np.conj(Rs)) / den
        cond = (abs(S) ** 2 + abs(Rs) ** 2) / max(abs(den), 1e-300) \
            + (abs(S * Ss) + abs(R * Rs)) / max(abs(S * Ss - R * Rs), 1e-300)
        tol = max(CROSS_TOL, 64 * EPS * cond)
        err = max(_rel(r, r_det), abs(c - c_det) / max(abs(c), r, 1e-300))
        out.append(WeylDisk(complex(c), float(r), q.n, "s_function", err, tol))
    return out


def weyl_disk_s(params: SchurParams, alphas: AlphaSeq, n: int, z: complex) -> WeylDisk:
    return weyl_trajectory_s(params, alphas, n, z)[-1]


def weyl_trajectory_c(params: SchurParams, alphas: AlphaSeq, n_max: int, z: complex) -> list[WeylDisk]:
    """Caratheodory-coordinate disks ``1..n_max`` at one point ``z``."""
    if n_max < 1:
        raise DomainError("C-function disks start at n = 1")
    geom = alphas.geom
    z = complex(z)
    _check_o0(alphas, n_max, z)
    quads = orf_trajectory(params, alphas, n_max, z)
    B = blaschke_all(alphas, n_max, z)
    w0 = complex(geom.varpi(geom.alpha0, z))
    w0s = complex(geom.varpi_star(geom.alpha0, z))
    wz = complex(geom.varpi_self(z))
    lead = 2.0 * abs(w0 * w0s / (geom.varpi0_at_alpha0 * wz))
    zeta0 = complex(geom.zeta0(z))
    out = []
    total = 0.0
    for k in range(1, n_max + 1):
        total += abs(complex(quads[k - 1].Phi)) ** 2
        q = quads[k]
        Phi, PhiS = complex(q.Phi), complex(q.PhiStar)
        Psi, PsiS = complex(q.Psi), complex(q.PsiStar)
        r = lead * abs(complex(B[k - 1])) / total
        # phase of Psi* Phi + Psi Phi*
        wr = complex(geom.varpi_ratio(geom.alpha0, alphas[k], z))
        ph = geom.z_factor(alphas[k]) * zeta0 * complex(B[k - 1]) * wr * wr
        ph = ph / abs(ph) if ph != 0 else 1.0
        c = PsiS / PhiS + (np.conj(Phi) / PhiS) * r * ph
        den = abs(PhiS) ** 2 - abs(Phi) ** 2
        den_stable = abs(wz) * abs(geom.varpi0_at_alpha0) * alphas.depth(k) * total \
            / abs(complex(geom.varpi(alphas[k], z))) ** 2
        if not den_stable > DEGENERATE_TOL * abs(PhiS) ** 2:
            raise DegenerateDisk(f"|Phi*|^2 - |Phi|^2 too small at n={k}")
        r_det = abs(PsiS * Phi + Psi * PhiS) / den
        c_det = (PsiS * np.conj(PhiS) + Psi * np.conj(Phi)) / den
        cond = (abs(PhiS) ** 2 + abs(Phi) ** 2) / max(abs(den), 1e-300) \
            + (abs(PsiS * Phi) + abs(Psi * PhiS)) / max(abs(PsiS * Phi + Psi * PhiS), 1e-300)
        tol = max(CROSS_TOL, 64 * EPS * cond)
        err = max(_rel(r, r_det), _rel(den, den_stable),
                  abs(c - c_det) / max(abs(c), r, 1e-300))
        out.append(WeylDisk(complex(c), float(r), k, "c_function", err, tol))
    return out


def weyl_disk_c(params: SchurParams, alphas: AlphaSeq, n: int, z: complex) -> WeylDisk:
    return weyl_trajectory_c(params, alphas, n, z)[-1]


def nestedness_violations(disks: Sequence[WeylDisk], slack: float = 1e-9) -> np.ndarray:
    """``|c_{n+1} - c_n| - (r_n - r_{n+1})`` for consecutive disks (<= slack when nested)."""
    return np.array([abs(b.center - a.center) - (a.radius - b.radius)
                     for a, b in zip(disks[:-1], disks[1:])])


def s_to_c(geom: Geometry, z: complex, s):
    """``s -> (1 + zeta0 s) / (1 - zeta0 s)``, Schur to Caratheodory values."""
    w = complex(geom.zeta0(z))
    return (1.0 + w * s) / (1.0 - w * s)


def correspondence_residual(params: SchurParams, alphas: AlphaSeq, n: int, z: complex,
                            k: int = 8) -> float:
    """Map ``k`` boundary points of the Schur disk ``n`` into Caratheodory
    coordinates; return the worst relative distance to the boundary of the
    C-function disk ``n + 1``."""
    ds = weyl_disk_s(params, alphas, n, z)
    dc = weyl_disk_c(params, alphas, n + 1, z)
    pts = ds.center + ds.radius * np.exp(2j * np.pi * (np.arange(k) + 0.25) / k)
    img = s_to_c(alphas.geom, z, pts)
    return float(np.max(np.abs(np.abs(img - dc.center) - dc.radius)) / max(dc.radius, abs(dc.center)))


def modified_approximant(params: SchurParams, alphas: AlphaSeq, n: int, z, tau: complex):
    """``(R_n - tau S*_n) / (S_n - tau R*_n)``; runs over the disk boundary as
    ``tau`` runs over the unit circle."""
    q = wall_trajectory(params, alphas, n, z)[-1]
    return (q.R - tau * q.Sstar) / (q.S - tau * q.Rstar)


# -- constructions -----------------------------------------------------------------

def _check_epsilons(eps: np.ndarray, upper_open: bool = False):
    if eps.size == 0:
        raise InfeasibleEpsilon("no epsilons given")
    too_big = eps >= 1 if upper_open else eps > 1
    if np.any(~(eps > 0)) or np.any(too_big):
        raise InfeasibleEpsilon("epsilons out of range")
    if eps.size >= 4:
        h = eps.size // 2
        n = np.arange(1, eps.size + 1)
        slope = np.polyfit(np.log(n[h:]), np.log(eps[h:]), 1)[0]
        if not slope < -1.0:
            raise InfeasibleEpsilon(f"epsilons do not look summable (log-log slope {slope:.3f})")


def _nodes_from_depths(geom: Geometry, depths: np.ndarray) -> list[complex]:
    if geom.is_disk:
        if np.any(depths > 1):
            raise InfeasibleEpsilon("required 1-|alpha|^2 exceeds 1")
        return [complex(-math.sqrt(1.0 - d)) for d in depths]
    return [complex(0.0, d) for d in depths]


def indeterminate_depths(gammas: np.ndarray, eps: np.ndarray) -> np.ndarray:
    """``eps_n prod_{k<n} (1-|g_k|)/(1+|g_k|)`` for ``n = 1..len(eps)``."""
    a = np.abs(np.asarray(gammas, dtype=complex))
    if np.any(a >= 1):
        raise DomainError("parameters must lie in the open disk")
    if a.size < eps.size:
        raise DomainError("need at least as many parameters as epsilons")
    ratio = np.cumprod((1.0 - a) / (1.0 + a))[: eps.size]
    return eps * ratio


def des_phi_margin(params: SchurParams, alphas: AlphaSeq, n_max: int, z) -> float:
    """Worst ratio ``|Phi*_n|^2 / bound`` over ``n <= n_max``; ``<= 1`` when the
    growth bound from the recurrence holds (also checks ``|Phi_n| <= |Phi*_n|``)."""
    geom = alphas.geom
    z = np.asarray(z, dtype=complex)
    quads = orf_trajectory(params, alphas, n_max, z)
    a = np.abs(params.gammas)
    worst = 0.0
    for q in quads[1:]:
        n = q.n
        growth = np.prod((1.0 + a[:n]) / (1.0 - a[:n]))
        bound = np.abs(geom.varpi_ratio(geom.alpha0, alphas[n], z)) ** 2 * alphas.depth(n) * growth
        star = np.abs(q.PhiStar) ** 2
        if np.any(np.abs(q.Phi) ** 2 > star * (1 + 1e-10)):
            return float("inf")
        worst = max(worst, float(np.max(star / bound)))
    return worst


def indeterminate_alpha_builder(gammas, epsilons, geom, check_points=None) -> AlphaSeq:
    """Nodes on the negative real axis (disk) or the imaginary axis
    (half-plane) making ``sum depth_n prod (1+|g_k|)/(1-|g_k|)`` equal to
    ``sum eps_n``, which forces the indeterminate case."""
    geom = get_geometry(geom)
    g = gammas.gammas if isinstance(gammas, SchurParams) else np.asarray(gammas, dtype=complex)
    eps = np.asarray(epsilons, dtype=float)
    _check_epsilons(eps)
    depths = indeterminate_depths(g, eps)
    alphas = AlphaSeq.explicit(geom, _nodes_from_depths(geom, depths), depths=tuple(depths))
    # divergence-functional terms are dominated by eps_n term by term
    terms = depths / (1.0 + np.abs(np.array(alphas.points))) if geom.is_disk else \
        np.array([a.imag / (1.0 + abs(a) ** 2) for a in alphas.points])
    if np.any(terms > eps * (1 + 1e-12)):
        raise ConstructionError("divergence functional is not dominated by the epsilons")
    n = eps.size
    if check_points is None:
        check_points = geom.zeta0_inv(0.5 * np.exp(2j * np.pi * np.arange(4) / 4 + 0.3j))
    params = SchurParams(g[:n], False, alphas)
    if des_phi_margin(params, alphas, n, check_points) > 1.0 + 1e-9:
        raise ConstructionError("growth bound for Phi*_n violated")
    return alphas


@dataclass(frozen=True)
class OscillationExample:
    z: complex
    alphas: AlphaSeq
    params: SchurParams
    d: np.ndarray
    zetas: np.ndarray


def oscillation_example(geom, z: complex, gamma0: float, epsilons, N: int | None = None) -> OscillationExample:
    """Real parameters for which ``R*_n(z)/S_n(z)`` alternates in sign.

    Each ``g_n`` is the midpoint of its admissible interval.
    """
    geom = get_geometry(geom)
    z = complex(z)
    if geom.is_disk and not (z.imag == 0 and 0 < z.real < 1):
        raise DomainError("disk example needs z in (0, 1)")
    if not geom.is_disk and not (z.real == 0 and z.imag > 1):
        raise DomainError("half-plane example needs z in i(1, inf)")
    if not 0 < gamma0 < 1:
        raise DomainError("gamma0 must lie in (0, 1)")
    eps = np.asarray(epsilons, dtype=float)
    N = eps.size if N is None else N
    if N > eps.size:
        raise DomainError("need an epsilon for every step")
    eps = eps[:N]
    if N:
        _check_epsilons(eps, upper_open=True)
    gam = [float(gamma0)]
    d = [float(gamma0)]
    depths, pts, zetas = [], [], []
    shrink = 1.0
    for n in range(1, N + 1):
        shrink *= (1.0 - abs(gam[-1])) / (1.0 + abs(gam[-1]))
        dep = eps[n - 1] * shrink
        a = _nodes_from_depths(geom, np.array([dep]))[0]
        zn = float(np.real(geom.zeta(a, z)))
        x = zn * d[-1]
        if n % 2 == 0:
            lo, hi = max(-x, gamma0), 1.0
        else:
            lo, hi = -1.0, min(-x, -gamma0)
        if not lo < hi:
            raise ConstructionError(f"empty admissible interval at n={n}")
        g = 0.5 * (lo + hi)
        dn = (x + g) / (1.0 + g * x)
        if (n % 2 == 0 and not dn > 0) or (n % 2 == 1 and not dn < 0):
            raise ConstructionError(f"sign pattern broken at n={n}")
        gam.append(g)
        d.append(dn)
        depths.append(dep)
        pts.append(a)
        zetas.append(zn)
    alphas = AlphaSeq.explicit(geom, pts, depths=tuple(depths) if depths else None)
    if np.any(np.abs(gam) < gamma0):
        raise ConstructionError("|gamma_n| fell below gamma0")
    params = SchurParams(np.array(gam, dtype=complex), False, alphas)
    return OscillationExample(z, alphas, params, np.array(d), np.array(zetas))


# -- diagnostics -----------------------------------------------------------------------

@dataclass(frozen=True)
class ExtremalityReport:
    n: np.ndarray
    sum_abs_gamma: np.ndarray
    max_abs_gamma: np.ndarray
    abs_b: np.ndarray
    center: np.ndarray
    radius: np.ndarray
    dist_boundary: np.ndarray
    b_product: np.ndarray
    labels: dict = field(default_factory=dict)

    def rows(self) -> list[tuple]:
        """Trajectory table: n, Re c, Im c, r, dist_boundary, |b_n|, sum_abs_gamma."""
        return [(int(k), float(c.real), float(c.imag), float(r), float(d), float(b), float(s))
                for k, c, r, d, b, s in zip(self.n, self.center, self.radius,
                                            self.dist_boundary, self.abs_b, self.sum_abs_gamma)]


TRAJECTORY_COLUMNS = ("n", "re_c", "im_c", "r", "dist_boundary", "abs_b", "sum_abs_gamma")


def extremality_diagnostics(source, alphas: AlphaSeq, n_max: int, z: complex) -> ExtremalityReport:
    """Finite-horizon evidence about the limit points of ``R_n(z)/S_n(z)``.

    ``source`` is a :class:`SchurParams` or a :class:`Measure`.  Nothing is
    concluded about limits; the report only tabulates trends.
    """
    if n_max < 2:
        raise DomainError("n_max must be at least 2")
    if isinstance(source, Measure):
        params = measure_params(source, alphas, n_max + 1)
    else:
        params = source
    top = min(n_max, len(params) - 1)
    if params.terminating:
        top = min(top, len(params) - 2)
    disks = weyl_trajectory_s(params, alphas, top, z)
    quads = wall_trajectory(params, alphas, top, z)
    a = np.abs(params.gammas[: top + 1])
    ns = np.arange(top + 1)
    abs_b = np.array([abs(complex(inverse_iterate_b(params, alphas, k, z))) for k in range(top + 2)])
    approx = np.array([complex(q.R / q.S) for q in quads])
    centers = np.array([d.center for d in disks])
    radii = np.array([d.radius for d in disks])
    dist = radii - np.abs(approx - centers)
    prod = (1.0 - abs_b[1:]) * (1.0 - abs_b[:-1])
    labels = {
        "summable_gamma_regime": "partial sums of |gamma_n| (limit points on the disk interior if finite)",
        "boundary_regime": "(1-|b_{n+1}|)(1-|b_n|) trajectory",
        "support_regime": "|b_n(z)| trajectory",
    }
    return ExtremalityReport(ns, np.cumsum(a), np.maximum.accumulate(a), abs_b[: top + 1],
                             centers, radii, dist, prod, labels)

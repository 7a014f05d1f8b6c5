"""Orthogonal rational functions, second-kind functions and the Wall bridge.

Two independent routes are provided: the transfer recurrence driven by a
parameter list (:func:`orf_trajectory`) and Gram-Schmidt of the Blaschke
products against a measure (:func:`orf_from_measure`).  The Gram-Schmidt
output is re-phased so both routes produce the same functions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, IllConditionedGram, NumericalError
from .geometry import AlphaSeq, blaschke_all
from .measure import Measure, c_function, herglotz, modulate, poisson, s_function
from .schur import SchurParams
from .wall import WallQuad, wall_eval

GRAM_COND_MAX = 1e12


@dataclass(frozen=True)
class OrfQuad:
    n: int
    Phi: np.ndarray
    PhiStar: np.ndarray
    Psi: np.ndarray
    PsiStar: np.ndarray
    b: np.ndarray
    kappa: float


def _kappa(params: SchurParams, alphas: AlphaSeq, n: int) -> float:
    if n == 0:
        return 1.0
    ups = params.upsilon(n - 1)
    if not ups > 0:
        raise DomainError("kappa_n needs Upsilon_{n-1} > 0")
    return math.sqrt(ups / alphas.depth(n))


def orf_trajectory(params: SchurParams, alphas: AlphaSeq, n: int, z) -> list[OrfQuad]:
    """ORF and second-kind values for indices ``0..n`` from the recurrence.

    Index ``n`` uses ``lambda_0..lambda_{n-1}``.  After a unimodular final
    parameter the last function has zero norm and is scaled without the
    ``1/(1-|lambda|^2)`` factor.
    """
    lam = params.gammas
    if n < 0 or n > len(lam):
        raise IndexError(f"ORF index {n} outside the parameter range")
    geom = alphas.geom
    z = np.asarray(z, dtype=complex)
    one = np.ones(z.shape, dtype=complex)
    # columns: (Phi_hat, Phi*) and (Psi_hat, -Psi*)
    ph, ps = one.copy(), one.copy()
    qh, qs = one.copy(), -one
    out = [OrfQuad(0, ph, ps, qh, -qs, ph / ps, 1.0)]
    for k in range(1, n + 1):
        lk = lam[k - 1]
        d = 1.0 - abs(lk) ** 2
        e2 = alphas.depth(k) / alphas.depth(k - 1)
        e = math.sqrt(e2 / d) if d > 0 else math.sqrt(e2)
        zk = geom.zeta(alphas[k - 1], z)
        scale = e * geom.varpi_ratio(alphas[k - 1], alphas[k], z)
        lc = np.conj(lk)
        ph, ps = scale * (zk * ph - lc * ps), scale * (-lk * zk * ph + ps)
        qh, qs = scale * (zk * qh - lc * qs), scale * (-lk * zk * qh + qs)
        zn = geom.z_factor(alphas[k])
        kap = _kappa(params, alphas, k) if d > 0 or k < n else float("nan")
        out.append(OrfQuad(k, zn * ph, ps, zn * qh, -qs, ph / ps, kap))
    return out


def orf_eval(params: SchurParams, alphas: AlphaSeq, n: int, z) -> OrfQuad:
    return orf_trajectory(params, alphas, n, z)[-1]


def inverse_iterate_b(params: SchurParams, alphas: AlphaSeq, n: int, z):
    """``b_n = conj(z_n) Phi_n / Phi*_n`` through its own Moebius recurrence."""
    geom = alphas.geom
    z = np.asarray(z, dtype=complex)
    b = np.ones(z.shape, dtype=complex)
    for k in range(1, n + 1):
        g = params.gammas[k - 1]
        zb = geom.zeta(alphas[k - 1], z) * b
        b = (zb - np.conj(g)) / (1.0 - g * zb)
    return b[()] if b.ndim == 0 else b


# -- Wall bridge --------------------------------------------------------------------

def wall_to_orf(wq: WallQuad, alphas: AlphaSeq, z) -> OrfQuad:
    """ORF quad at ``n = wq.n + 1`` from the Wall quad at ``n - 1``."""
    n = wq.n + 1
    geom = alphas.geom
    kap = math.sqrt(wq.Upsilon / alphas.depth(n))
    r = geom.varpi_ratio(geom.alpha0, alphas[n], z) / kap
    zeta0 = geom.zeta0(z)
    zn = geom.z_factor(alphas[n])
    Phi = zn * r * (zeta0 * wq.Sstar - wq.Rstar)
    PhiS = r * (wq.S - zeta0 * wq.R)
    Psi = zn * r * (zeta0 * wq.Sstar + wq.Rstar)
    PsiS = r * (wq.S + zeta0 * wq.R)
    return OrfQuad(n, Phi, PhiS, Psi, PsiS, np.conj(zn) * Phi / PhiS, kap)


def orf_to_wall(oq: OrfQuad, alphas: AlphaSeq, z, upsilon: float | None = None) -> WallQuad:
    """Inverse of :func:`wall_to_orf`; singular at ``z = alpha_0``."""
    n = oq.n
    if n < 1:
        raise DomainError("the bridge starts at n = 1")
    geom = alphas.geom
    h = 0.5 * oq.kappa / geom.varpi_ratio(geom.alpha0, alphas[n], z)
    zeta0 = geom.zeta0(z)
    zc = np.conj(geom.z_factor(alphas[n]))
    R = h * (oq.PsiStar - oq.PhiStar) / zeta0
    S = h * (oq.PsiStar + oq.PhiStar)
    Rs = h * zc * (oq.Psi - oq.Phi)
    Ss = h * zc * (oq.Psi + oq.Phi) / zeta0
    ups = oq.kappa ** 2 * alphas.depth(n) if upsilon is None else upsilon
    return WallQuad(n - 1, R, S, Rs, Ss, ups)


def wall_orf_bridge(q, params: SchurParams, alphas: AlphaSeq, z, direction: str = "forward"):
    """``forward``: WallQuad at n-1 -> OrfQuad at n; ``inverse``: the reverse."""
    if direction == "forward":
        return wall_to_orf(q, alphas, z)
    if direction == "inverse":
        return orf_to_wall(q, alphas, z, params.upsilon(q.n - 1))
    raise DomainError(f"unknown bridge direction {direction!r}")


# -- Gram-Schmidt route -----------------------------------------------------------

@dataclass(frozen=True)
class OrfSystem:
    """Orthonormal rational functions ``Phi_k = sum_j coeffs[k, j] B_j``."""

    alphas: AlphaSeq
    coeffs: np.ndarray
    lambdas: np.ndarray
    terminating: bool
    ill_conditioned: bool
    gram_cond: float

    @property
    def n_max(self) -> int:
        """Largest index with a (possibly zero-norm) function."""
        return self.coeffs.shape[0] - 1

    @property
    def params(self) -> SchurParams:
        return SchurParams(self.lambdas, self.terminating, self.alphas)

    def phi(self, n: int, z):
        z = np.asarray(z, dtype=complex)
        B = blaschke_all(self.alphas, n, z)
        return np.tensordot(self.coeffs[n, : n + 1], B, axes=1)

    def phi_star(self, n: int, z):
        """``B_n conj(Phi_n(hat z))``, i.e. ``sum conj(c_k) zeta_{k+1} ... zeta_n``."""
        z = np.asarray(z, dtype=complex)
        geom = self.alphas.geom
        c = np.conj(self.coeffs[n, : n + 1])
        # Horner in the nested products zeta_n (zeta_{n-1} (...))
        acc = np.full(z.shape, c[0], dtype=complex)
        for k in range(1, n + 1):
            acc = acc * geom.zeta(self.alphas[k], z) + c[k]
        return acc


def _quadrature(m: Measure) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = [], []
    if m.n_atoms:
        nodes.append(m.atom_locs)
        weights.append(m.atom_weights)
    if m.density is not None:
        keep = m.density > 0
        nodes.append(m.grid_t[keep])
        weights.append(m.density[keep] / m.n_grid)
    return np.concatenate(nodes), np.concatenate(weights)


def _star_value(alphas: AlphaSeq, c: np.ndarray, n: int, z) -> complex:
    """``Phi*_n(z)`` for coefficient row ``c`` (Horner in the zeta factors)."""
    geom = alphas.geom
    cs = np.conj(c[: n + 1])
    val = cs[0]
    for k in range(1, n + 1):
        val = val * geom.zeta(alphas[k], z) + cs[k]
    return complex(val)


def _rephase(alphas: AlphaSeq, coeffs: np.ndarray, n: int, prev_star_at: complex) -> None:
    """Rotate row ``n`` so that ``Phi*_n(alpha_{n-1})`` has the phase the
    recurrence gives it: ``arg(varpi_{n-1}/varpi_n) + arg Phi*_{n-1}``,
    where ``prev_star_at = Phi*_{n-1}(alpha_{n-1})``."""
    a = alphas[n - 1]
    val = _star_value(alphas, coeffs[n], n, a)
    target = complex(alphas.geom.varpi_ratio(a, alphas[n], a)) * prev_star_at
    rot = (target / abs(target)) / (val / abs(val))
    # Phi -> conj(rot) Phi multiplies Phi* by rot
    coeffs[n] = np.conj(rot) * coeffs[n]


def orf_from_measure(m: Measure, alphas: AlphaSeq, n_max: int = 12,
                     strict: bool = False) -> OrfSystem:
    """Gram-Schmidt of ``B_0..B_n`` in ``L^2(dmu)`` and the recurrence parameters.

    For a ``k``-atom measure the functions stop at ``Phi_{k-1}``; the zero-norm
    ``Phi_k`` (null vector of the atom-evaluation matrix) yields the final
    unimodular parameter.
    """
    if not m.is_probability:
        raise DomainError("orf_from_measure needs a probability measure")
    if n_max < 1:
        raise DomainError("n_max must be at least 1")
    geom = alphas.geom
    nodes, w = _quadrature(m)
    support = m.n_atoms if m.is_atomic else None
    n_fun = n_max if support is None else min(n_max, support - 1)
    A = blaschke_all(alphas, n_fun + (1 if support is not None and n_fun == support - 1 else 0), nodes).T
    # orthonormal part
    Aw = np.sqrt(w)[:, None] * A[:, : n_fun + 1]
    Q, Rm = np.linalg.qr(Aw)
    cond = float(np.linalg.cond(Rm)) ** 2
    ill = not cond <= GRAM_COND_MAX
    if ill and strict:
        raise IllConditionedGram(f"Gram condition number {cond:.3e}")
    Rinv = np.linalg.solve(Rm, np.eye(n_fun + 1))
    terminating = support is not None and n_fun == support - 1
    size = n_fun + 2 if terminating else n_fun + 1
    coeffs = np.zeros((size, size), dtype=complex)
    coeffs[: n_fun + 1, : n_fun + 1] = Rinv.T
    if terminating:
        # null vector of [B_j(t_atoms)]_{j<=k}
        _, _, vh = np.linalg.svd(A)
        coeffs[size - 1] = np.conj(vh[-1])
    # Phi_0 = 1 for a probability measure; fix its sign to +1
    coeffs[0] = coeffs[0] / (coeffs[0, 0] / abs(coeffs[0, 0]))
    lambdas = []
    star_prev = 1.0 + 0j
    for n in range(1, size):
        _rephase(alphas, coeffs, n, star_prev)
        a = alphas[n - 1]
        c = coeffs[n, : n + 1]
        phi_hat = np.conj(geom.z_factor(alphas[n])) * np.sum(c * blaschke_all(alphas, n, a))
        lambdas.append(-np.conj(phi_hat / _star_value(alphas, c, n, a)))
        star_prev = _star_value(alphas, c, n, alphas[n])
    lam = np.asarray(lambdas, dtype=complex)
    if terminating:
        lam[-1] = lam[-1] / abs(lam[-1])
    return OrfSystem(alphas, coeffs, lam, terminating, ill, cond)


def gram_matrix(m: Measure, system: OrfSystem, n: int | None = None) -> np.ndarray:
    """``int Phi_j conj(Phi_k) dmu`` for ``j, k <= n``."""
    n = system.n_max if n is None else n
    nodes, w = _quadrature(m)
    V = np.stack([system.phi(k, nodes) for k in range(n + 1)])
    return (V * w) @ V.conj().T


def second_kind_from_measure(m: Measure, system: OrfSystem, n: int, z):
    """``Psi_n(z) = int D(t, z) (Phi_n(t) - Phi_n(z)) dmu(t)`` (``Psi_0 = 1``)."""
    z = np.asarray(z, dtype=complex)
    if n == 0:
        return np.ones(z.shape, dtype=complex)
    weighted = herglotz(m, z, lambda t: system.phi(n, t))
    return weighted - system.phi(n, z) * c_function(m, z)


# -- Khrushchev measures ------------------------------------------------------------

@dataclass(frozen=True)
class KhrushchevMeasure:
    measure: Measure
    n: int
    c_residual: float
    s_residual: float


def khrushchev_measure(m: Measure, alphas: AlphaSeq, n: int, z_check=None,
                       system: OrfSystem | None = None, tol: float = 1e-8) -> KhrushchevMeasure:
    """``dm_{alpha_n} / |Phi_n|^2`` and its checks against the recurrence route.

    ``F`` of the result is compared with ``Psi*_n/Phi*_n`` and ``f`` with
    ``R_{n-1}/S_{n-1}`` on ``z_check`` (a default interior set if ``None``).
    """
    system = orf_from_measure(m, alphas, max(n, 1)) if system is None else system
    if n > system.n_max or (system.terminating and n == system.n_max):
        raise DomainError(f"Phi_{n} is not available for this measure")
    geom = alphas.geom
    base = poisson(geom, alphas[n], m.n_grid, alphas.depth(n))
    mu_n = modulate(base, lambda t: 1.0 / np.abs(system.phi(n, t)) ** 2)
    if z_check is None:
        u = 0.6 * np.exp(2j * np.pi * (np.arange(12) + 0.3) / 12)
        z_check = geom.zeta0_inv(u)
    z_check = np.asarray(z_check, dtype=complex)
    cres = sres = 0.0
    if n >= 1:
        params = system.params
        oq = orf_eval(params, alphas, n, z_check)
        cres = float(np.max(np.abs(c_function(mu_n, z_check) - oq.PsiStar / oq.PhiStar)))
        wq = wall_eval(params, alphas, n - 1, z_check)
        sres = float(np.max(np.abs(s_function(mu_n, z_check) - wq.R / wq.S)))
    else:
        cres = float(np.max(np.abs(c_function(mu_n, z_check) - 1.0)))
    if max(cres, sres) > tol:
        raise NumericalError(f"Khrushchev measure check failed: {cres:.3e}, {sres:.3e}")
    return KhrushchevMeasure(mu_n, n, cres, sres)

"""Wall rational functions from the coupled four-term recurrence.

All four functions are carried pointwise, so nothing is ever evaluated
outside the region.  ``norm_gap`` is ``(|S_n|^2 - |R*_n|^2) / Upsilon_n``,
accumulated through a sum of non-negative terms to avoid cancellation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateStep, DomainError, SingularSystem, ZeroDenominator
from .geometry import AlphaSeq, blaschke
from .schur import SchurParams


@dataclass(frozen=True)
class WallQuad:
    n: int
    R: np.ndarray
    S: np.ndarray
    Rstar: np.ndarray
    Sstar: np.ndarray
    Upsilon: float
    norm_gap: np.ndarray | None = None


def wall_trajectory(params: SchurParams, alphas: AlphaSeq, n: int, z) -> list[WallQuad]:
    """Quads ``0..n`` at ``z`` (scalar or array)."""
    gam = params.gammas
    if n < 0 or n >= len(gam):
        raise IndexError(f"wall index {n} outside 0..{len(gam) - 1}")
    geom = alphas.geom
    z = np.asarray(z, dtype=complex)
    g0 = gam[0]
    R = np.full(z.shape, g0, dtype=complex)
    S = np.ones(z.shape, dtype=complex)
    Rs = np.full(z.shape, np.conj(g0), dtype=complex)
    Ss = np.ones(z.shape, dtype=complex)
    ups = 1.0 - abs(g0) ** 2
    gap = np.ones(z.shape)
    out = [WallQuad(0, R, S, Rs, Ss, ups, gap if ups > 0 else None)]
    for k in range(1, n + 1):
        gk = gam[k]
        a = alphas[k]
        zk = geom.zeta(a, z)
        if ups > 0:
            gap = gap + geom.one_minus_abs2_zeta(a, z, alphas.depth(k)) * np.abs(Rs) ** 2 / ups
        R, S, Rs, Ss = (R + gk * zk * Ss, S + gk * zk * Rs,
                        zk * Rs + np.conj(gk) * S, zk * Ss + np.conj(gk) * R)
        ups = ups * (1.0 - abs(gk) ** 2)
        out.append(WallQuad(k, R, S, Rs, Ss, ups, gap if ups > 0 else None))
    return out


def wall_eval(params: SchurParams, alphas: AlphaSeq, n: int, z) -> WallQuad:
    return wall_trajectory(params, alphas, n, z)[-1]


def approximants(params: SchurParams, alphas: AlphaSeq, n: int, z, odd: bool = True):
    """``(R_{n-1}/S_{n-1}, S*_{n-1}/R*_{n-1})``; ``odd=False`` skips the second."""
    if n < 1:
        raise DomainError("approximants start at n = 1")
    q = wall_eval(params, alphas, n - 1, z)
    even = q.R / q.S
    if not odd:
        return even, None
    if np.any(q.Rstar == 0):
        raise ZeroDenominator("R*_{n-1} vanishes; odd approximant undefined")
    return even, q.Sstar / q.Rstar


def wall_inverse_step(q: WallQuad, gamma: complex, alpha: complex, z, geom) -> WallQuad:
    """Undo one step of the recurrence (``q`` at ``n``, result at ``n - 1``)."""
    if q.n < 1:
        raise DomainError("cannot step below n = 0")
    d = 1.0 - abs(gamma) ** 2
    if d <= 0:
        raise DegenerateStep("inverse step needs |gamma| < 1")
    zk = geom.zeta(alpha, z)
    gc = np.conj(gamma)
    R = (q.R - gamma * q.Sstar) / d
    S = (q.S - gamma * q.Rstar) / d
    Rs = (q.Rstar - gc * q.S) / (d * zk)
    Ss = (q.Sstar - gc * q.R) / (d * zk)
    ups = q.Upsilon / d
    return WallQuad(q.n - 1, R, S, Rs, Ss, ups)


def _boundary_nodes(alphas: AlphaSeq, k: int, rng: np.random.Generator) -> np.ndarray:
    theta = 2 * np.pi * (np.arange(k) + rng.uniform(0.1, 0.9, k)) / k
    theta += rng.uniform(0, 2 * np.pi)
    return np.asarray(alphas.geom.zeta0_inv(np.exp(1j * theta)), dtype=complex)


def expand_blaschke_basis(evaluate, alphas: AlphaSeq, n: int,
                          rng: np.random.Generator | None = None, attempts: int = 3,
                          cond_max: float = 1e10) -> np.ndarray:
    """Coefficients ``c_0..c_n`` with ``evaluate = sum c_k B_k``.

    Solved by interpolation at ``n + 1`` random boundary nodes, where every
    ``B_k`` is unimodular and the system is well conditioned.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    for _ in range(attempts):
        nodes = _boundary_nodes(alphas, n + 1, rng)
        if not np.all(np.isfinite(nodes)):
            continue
        A = np.stack([blaschke(alphas.geom, alphas, k, nodes) for k in range(n + 1)], axis=1)
        if np.linalg.cond(A) > cond_max:
            continue
        rhs = np.asarray(evaluate(nodes), dtype=complex)
        return np.linalg.solve(A, rhs)
    raise SingularSystem("no well-conditioned node set found")


def tail_bound(alphas: AlphaSeq, n: int, z):
    """``(1 + |zeta_{n+1}(z)|) |B_{n+1}(z)|``."""
    geom = alphas.geom
    return (1.0 + np.abs(geom.zeta(alphas[n + 1], z))) * np.abs(blaschke(geom, alphas, n + 1, z))

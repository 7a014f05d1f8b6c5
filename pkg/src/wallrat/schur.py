"""Nevanlinna-Pick iteration on Schur functions.

Iterates ``f_{n+1} = (f_n - g_n) / ((1 - conj(g_n) f_n) zeta_{n+1})`` have a
removable singularity at every node used so far; evaluators declare those
nodes and are evaluated through :func:`removable_eval`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._removable import EPS_RADIUS, node_radius, removable_eval
from .errors import DomainError, NumericalError, TerminatedError
from .geometry import AlphaSeq, Geometry, get_geometry
from .measure import Measure, s_function

TERMINATION_TOL = 1e-8
PROPF_TOL = 1e-9


@dataclass(frozen=True)
class SchurEvaluator:
    """A Schur function as a vectorised point map.

    ``singular`` lists removable points as ``(point, radius)`` pairs, the
    radius being the circle used to evaluate there.
    """

    func: Callable[[np.ndarray], np.ndarray]
    tag: str = "composed"
    singular: tuple = ()
    radius: float = EPS_RADIUS

    def __call__(self, z):
        return eval_with_removable(self, z)

    @classmethod
    def from_measure(cls, m: Measure) -> "SchurEvaluator":
        return cls(lambda z: s_function(m, z), "from-measure")

    @classmethod
    def constant(cls, c: complex) -> "SchurEvaluator":
        c = complex(c)
        return cls(lambda z: np.full(np.shape(z), c, dtype=complex), "composed")


def eval_with_removable(f: SchurEvaluator | Callable, z, radius: float | None = None):
    """Evaluate ``f`` at ``z``; near removable points use a circular mean."""
    if isinstance(f, SchurEvaluator):
        r = f.radius if radius is None else radius
        return removable_eval(f.func, z, f.singular, r)
    return removable_eval(f, z, (), EPS_RADIUS if radius is None else radius)


@dataclass(frozen=True)
class SchurParams:
    gammas: np.ndarray
    terminating: bool
    alphas: AlphaSeq

    def __post_init__(self):
        g = np.atleast_1d(np.asarray(self.gammas, dtype=complex))
        object.__setattr__(self, "gammas", g)
        body = g[:-1] if self.terminating else g
        if np.any(np.abs(body) >= 1.0):
            raise DomainError("non-final Schur parameters must lie in the open disk")
        if self.terminating and abs(abs(g[-1]) - 1.0) > TERMINATION_TOL:
            raise DomainError("terminating parameter is not unimodular")

    def __len__(self) -> int:
        return int(self.gammas.size)

    @property
    def geom(self) -> Geometry:
        return self.alphas.geom

    def upsilon(self, n: int) -> float:
        """``prod_{k<=n} (1 - |g_k|^2)``."""
        return float(np.prod(1.0 - np.abs(self.gammas[: n + 1]) ** 2))

    def padded(self, n: int) -> np.ndarray:
        """First ``n`` parameters, zero-padded when the list is shorter."""
        out = np.zeros(n, dtype=complex)
        k = min(n, len(self))
        out[:k] = self.gammas[:k]
        return out


def _step_func(geom: Geometry, f: SchurEvaluator, alpha: complex, gamma: complex):
    gc = np.conj(gamma)

    def g(z):
        fz = f(z)
        return (fz - gamma) / ((1.0 - gc * fz) * geom.zeta(alpha, z))

    return g


def np_step(f: SchurEvaluator, alpha: complex, geom, depth: float | None = None,
            tol: float = TERMINATION_TOL) -> tuple[complex, SchurEvaluator | None]:
    """One Nevanlinna-Pick step at node ``alpha``.

    Returns ``(gamma, next_iterate)``; ``next_iterate`` is ``None`` when
    ``|gamma| >= 1 - tol`` (``f`` is a unimodular constant).
    """
    geom = get_geometry(geom)
    geom.check_interior(alpha, "alpha")
    gamma = complex(f(alpha))
    if abs(gamma) >= 1.0 - tol:
        return gamma, None
    node = (complex(alpha), node_radius(geom, alpha, depth))
    nxt = SchurEvaluator(_step_func(geom, f, alpha, gamma), "composed", f.singular + (node,), f.radius)
    return gamma, nxt


def np_iterates(f: SchurEvaluator, alphas: AlphaSeq, n: int) -> tuple[np.ndarray, list[SchurEvaluator]]:
    """Parameters ``g_0..g_{n-1}`` and iterates ``f_0..f_n``.

    Raises :class:`TerminatedError` if the sequence ends before ``f_n``.
    """
    gammas, its = [], [f]
    for k in range(n):
        g, nxt = np_step(its[-1], alphas[k + 1], alphas.geom, alphas.depth(k + 1))
        gammas.append(g)
        if nxt is None:
            raise TerminatedError(f"parameter sequence terminates at index {k}")
        its.append(nxt)
    return np.asarray(gammas, dtype=complex), its


def np_iterate(f: SchurEvaluator, alphas: AlphaSeq, n: int) -> SchurEvaluator:
    return np_iterates(f, alphas, n)[1][-1]


def np_params(f: SchurEvaluator, alphas: AlphaSeq, n_max: int = 12) -> SchurParams:
    """Parameters of ``f`` up to ``n_max`` entries or termination."""
    if n_max < 1:
        raise DomainError("n_max must be at least 1")
    gammas = []
    cur = f
    terminating = False
    for k in range(n_max):
        g, cur = np_step(cur, alphas[k + 1], alphas.geom, alphas.depth(k + 1))
        gammas.append(g)
        if cur is None:
            terminating = True
            gammas[-1] = g / abs(g)
            break
    return SchurParams(np.asarray(gammas), terminating, alphas)


def measure_params(m: Measure, alphas: AlphaSeq, n_max: int = 12) -> SchurParams:
    return np_params(SchurEvaluator.from_measure(m), alphas, n_max)


def mobius(geom: Geometry, alpha: complex, gamma: complex, g, z):
    """``M(alpha, gamma) g = (zeta_alpha g + gamma) / (1 + conj(gamma) zeta_alpha g)``."""
    zg = geom.zeta(alpha, z) * g
    return (zg + gamma) / (1.0 + np.conj(gamma) * zg)


def mobius_inverse(alpha: complex, gamma: complex, g: SchurEvaluator, geom) -> SchurEvaluator:
    geom = get_geometry(geom)
    geom.check_interior(alpha, "alpha")
    if abs(gamma) >= 1.0:
        raise DomainError("mobius_inverse needs |gamma| < 1")
    return SchurEvaluator(lambda z: mobius(geom, alpha, gamma, g(z), z), "composed", g.singular, g.radius)


def params_evaluator(params: SchurParams, tail: SchurEvaluator | None = None,
                     start: int = 0) -> SchurEvaluator:
    """The iterate ``f_start`` of the Schur function with these parameters.

    A terminating list ends in the unimodular constant; otherwise ``tail``
    (default ``0``) is used as the iterate after the last parameter.
    """
    geom = params.geom
    gam = params.gammas
    alphas = params.alphas
    n = len(gam)

    def f(z):
        z = np.asarray(z, dtype=complex)
        if params.terminating:
            w = np.full(z.shape, gam[-1], dtype=complex)
            top = n - 1
        else:
            w = np.zeros(z.shape, complex) if tail is None else np.asarray(tail(z), complex)
            top = n
        for k in range(top - 1, start - 1, -1):
            w = mobius(geom, alphas[k + 1], gam[k], w, z)
        return w

    return SchurEvaluator(f, "from-params")


# -- parameter transforms ----------------------------------------------------------

@dataclass(frozen=True)
class TransformCheck:
    direct: SchurParams
    predicted: np.ndarray
    max_discrepancy: float


def rotate_prediction(gammas: np.ndarray, lam: complex) -> np.ndarray:
    return lam * np.asarray(gammas)


def disk_mobius_prediction(gammas: np.ndarray, w: complex) -> np.ndarray:
    g = np.asarray(gammas, dtype=complex).copy()
    g0 = g[0]
    g[0] = (g0 - w) / (1.0 - np.conj(w) * g0)
    g[1:] *= (1.0 - w * np.conj(g0)) / (1.0 - np.conj(w) * g0)
    return g


def alpha_params_prediction(geom: Geometry, alpha: complex, gammas: np.ndarray) -> np.ndarray:
    """Parameters of the alpha-S-function from those of the S-function."""
    a = complex(geom.zeta0(alpha))
    if a == 0:
        return np.asarray(gammas, dtype=complex).copy()
    return rotate_prediction(disk_mobius_prediction(gammas, np.conj(a)), -a / abs(a))


def lemma_propf_transforms(f: SchurEvaluator, mode: tuple[str, complex], alphas: AlphaSeq,
                           n: int, tol: float = PROPF_TOL) -> TransformCheck:
    """Parameters of ``lam f`` or ``(f - w)/(1 - conj(w) f)``, checked against
    the closed-form prediction from the parameters of ``f``."""
    kind, c = mode
    c = complex(c)
    if kind == "rotate":
        if abs(abs(c) - 1.0) > 1e-12:
            raise DomainError("rotation needs |lambda| = 1")
        g = SchurEvaluator(lambda z: c * f(z), "composed")
        predict = rotate_prediction
    elif kind == "disk_mobius":
        if abs(c) >= 1.0:
            raise DomainError("disk_mobius needs |w| < 1")

        def gfun(z):
            fz = f(z)
            return (fz - c) / (1.0 - np.conj(c) * fz)

        g = SchurEvaluator(gfun, "composed")
        predict = disk_mobius_prediction
    else:
        raise DomainError(f"unknown transform {kind!r}")
    base = np_params(f, alphas, n)
    direct = np_params(g, alphas, n)
    m = min(len(base), len(direct))
    pred = predict(base.gammas[:m], c)
    err = float(np.max(np.abs(pred - direct.gammas[:m]))) if m else 0.0
    if err > tol:
        raise NumericalError(f"parameter transform mismatch {err:.3e}")
    return TransformCheck(direct, pred, err)


def identity_residual(geom: Geometry, f_n: SchurEvaluator, f_next: SchurEvaluator,
                      alpha_next: complex, gamma: complex, z) -> np.ndarray:
    """``(1 - conj(g) f_n)(1 + conj(g) zeta f_{n+1}) - (1 - |g|^2)``."""
    gc = np.conj(gamma)
    lhs = (1.0 - gc * f_n(z)) * (1.0 + gc * geom.zeta(alpha_next, z) * f_next(z))
    return np.abs(lhs - (1.0 - abs(gamma) ** 2))

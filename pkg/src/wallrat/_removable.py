from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import EvaluationError

EPS_RADIUS = 1e-4
N_MEAN = 64
# points closer than this fraction of a node's radius are averaged instead of evaluated
NEAR_FRACTION = 0.25
# node circles cover this fraction of the distance from the node to the boundary
NODE_FRACTION = 0.5


def node_radius(geom, alpha: complex, depth: float | None = None) -> float:
    """Circle radius used around an interpolation node.

    A Schur function is analytic on the whole region, so the ``N_MEAN``-point
    mean over a circle of half the distance to the boundary is exact to about
    ``0.5**N_MEAN``.  A large circle also keeps ``|zeta_alpha|`` bounded away
    from zero on it, so nested iterates do not amplify rounding.
    """
    d = geom.depth(alpha) if depth is None else depth
    dist = d / (1.0 + abs(alpha)) if geom.is_disk else d
    return float(NODE_FRACTION * dist)


def circle_offsets(radius: float = EPS_RADIUS, k: int = N_MEAN) -> np.ndarray:
    return radius * np.exp(2j * np.pi * (np.arange(k) + 0.5) / k)


def _nodes(singular, radius: float) -> list[tuple[complex, float]]:
    out = []
    for s in singular:
        if isinstance(s, tuple):
            out.append((complex(s[0]), float(s[1])))
        else:
            out.append((complex(s), radius))
    return out


def removable_eval(func: Callable[[np.ndarray], np.ndarray], z,
                   singular: Sequence = (), radius: float = EPS_RADIUS) -> np.ndarray:
    """Evaluate ``func`` at ``z``, replacing values near removable points by a
    circular mean.

    ``singular`` holds points or ``(point, radius)`` pairs; a bare point uses
    ``radius``, which is also the circle used for any non-finite value.
    """
    z = np.asarray(z, dtype=complex)
    flat = z.reshape(-1)
    r_use = np.zeros(flat.shape)
    for p, r in _nodes(singular, radius):
        hit = np.abs(flat - p) < NEAR_FRACTION * r
        r_use[hit] = np.where(r_use[hit] > 0, np.minimum(r_use[hit], r), r)
    near = r_use > 0
    out = np.empty(flat.shape, dtype=complex)
    ok = ~near
    if np.any(ok):
        with np.errstate(all="ignore"):
            out[ok] = np.asarray(func(flat[ok]), dtype=complex).reshape(-1)
    bad = ok & ~np.isfinite(out)
    r_use[bad] = radius
    redo = near | bad
    if np.any(redo):
        pts = flat[redo][:, None] + r_use[redo][:, None] * circle_offsets(1.0)[None, :]
        with np.errstate(all="ignore"):
            vals = np.asarray(func(pts.reshape(-1)), dtype=complex).reshape(pts.shape)
        if not np.all(np.isfinite(vals)):
            raise EvaluationError("circular-mean evaluation failed")
        out[redo] = vals.mean(axis=1)
    out = out.reshape(z.shape)
    return out[()] if out.ndim == 0 else out

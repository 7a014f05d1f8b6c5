from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from wallrat.geometry import get_geometry, random_alphas
from wallrat.schur import SchurParams

settings.register_profile("default", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

CASES = ("disk", "halfplane")


@pytest.fixture(params=CASES)
def geom(request):
    return get_geometry(request.param)


def random_interior(geom, k, rng, rmax=0.8):
    """Random points in the region, drawn uniformly in the Cayley disk."""
    u = rmax * np.sqrt(rng.uniform(size=k)) * np.exp(2j * np.pi * rng.uniform(size=k))
    return np.asarray(geom.zeta0_inv(u), dtype=complex)


def random_boundary(geom, k, rng):
    u = np.exp(2j * np.pi * rng.uniform(size=k))
    return np.asarray(geom.zeta0_inv(u), dtype=complex)


def random_params(geom, n, rng, gmax=0.9, alphas=None):
    """Parameters ``g_0..g_n`` with ``|g| <= gmax`` and random nodes."""
    g = gmax * np.sqrt(rng.uniform(size=n + 1)) * np.exp(2j * np.pi * rng.uniform(size=n + 1))
    al = random_alphas(geom, n + 3, rng) if alphas is None else alphas
    return SchurParams(g, False, al), al

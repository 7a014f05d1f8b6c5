from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_interior
from wallrat.errors import DomainError, NonFiniteIntegrand, ZeroMassError
from wallrat.geometry import get_geometry
from wallrat.khrushchev import interior_grid
from wallrat.measure import (Measure, alpha_c_function, alpha_s_function, atomic, builtin_measure,
                             c_function, dirac, f_from_fa, fa_from_f, integrate, lebesgue,
                             measure_from_descriptor, mix, modulate, poisson, random_atomic,
                             random_smooth, s_function)

DISK = get_geometry("disk")
HALF = get_geometry("halfplane")
seeds = st.integers(0, 2**32 - 1)

# 50-digit quadrature of the Herglotz integral, rounded to double
F_POISSON_DISK = 0.95303874181122261207 + 0.33368501116372647643j   # alpha=0.3+0.2i, z=-0.25+0.4i
F_POISSON_HALF = 0.88917647058823529412 - 0.00070588235294117647j   # beta=0.5+1.2i, z=-0.3+0.7i


def test_integrate_examples():
    m = lebesgue(DISK)
    assert integrate(m, lambda t: np.ones_like(t)) == pytest.approx(1.0)
    assert abs(integrate(m, lambda t: t)) < 1e-14
    tau = np.exp(0.9j)
    assert integrate(dirac(DISK, tau), lambda t: t ** 2) == pytest.approx(tau ** 2)
    with pytest.raises(NonFiniteIntegrand), np.errstate(divide="ignore", invalid="ignore"):
        integrate(dirac(DISK, 1.0), lambda t: 1.0 / (t - 1.0))


def test_c_function_oracles():
    assert c_function(poisson(DISK, 0.3 + 0.2j), -0.25 + 0.4j) == pytest.approx(F_POISSON_DISK, abs=1e-13)
    assert c_function(poisson(HALF, 0.5 + 1.2j), -0.3 + 0.7j) == pytest.approx(F_POISSON_HALF, abs=1e-13)


@pytest.mark.parametrize("case", ["disk", "halfplane"])
def test_closed_forms(case):
    g = get_geometry(case)
    z = interior_grid(g, 30)
    w = g.zeta0(z)
    assert np.max(np.abs(c_function(lebesgue(g), z) - 1)) < 1e-12
    tau = g.zeta0_inv(np.exp(2.2j))
    s = np.conj(g.zeta0(tau))
    expect = (1 + s * w) / (1 - s * w)
    assert np.max(np.abs(c_function(dirac(g, tau), z) - expect)) < 1e-12
    assert np.max(np.abs(s_function(dirac(g, tau), z) - s)) < 1e-12
    alpha = g.zeta0_inv(0.4 - 0.3j)
    pa = poisson(g, alpha)
    sa = np.conj(g.zeta0(alpha))
    # f is the constant conj(zeta_0(alpha)), so F is its image under zeta_0(z)
    expect = (1 + sa * w) / (1 - sa * w)
    assert np.max(np.abs(c_function(pa, z) - expect)) < 1e-12
    assert np.max(np.abs(s_function(pa, z) - sa)) < 1e-12
    assert np.max(np.abs(s_function(lebesgue(g), z))) < 1e-12
    # alpha-functions
    assert np.max(np.abs(alpha_c_function(pa, alpha, z) - 1)) < 1e-12
    assert np.max(np.abs(alpha_s_function(pa, alpha, z))) < 1e-12
    ra = abs(g.zeta0(alpha))
    za = g.zeta(alpha, z)
    expect = (1 + ra * za) / (1 - ra * za)
    assert np.max(np.abs(alpha_c_function(lebesgue(g), alpha, z) - expect)) < 1e-12


def test_alpha_c_reduces_at_base_point(geom):
    m = random_atomic(geom, 4, np.random.default_rng(0))
    z = interior_grid(geom, 10)
    assert np.allclose(alpha_c_function(m, geom.alpha0, z), c_function(m, z), atol=1e-14)


def test_alpha_c_real_at_alpha(geom):
    rng = np.random.default_rng(2)
    m = random_smooth(geom, rng)
    a = random_interior(geom, 1, rng)[0]
    v = complex(alpha_c_function(m, a, a))
    assert v == pytest.approx(m.mass, abs=1e-12)


def test_builtins():
    m = builtin_measure(DISK, "lebesgue")
    assert m.mass == pytest.approx(1) and m.n_atoms == 0
    p0 = builtin_measure(DISK, "poisson", alpha=0.0)
    assert np.allclose(p0.density, 1.0)
    mx = mix([(0.5, dirac(DISK, 1.0)), (0.5, lebesgue(DISK))])
    assert mx.mass == pytest.approx(1) and mx.n_atoms == 1 and mx.atom_weights[0] == pytest.approx(0.5)
    assert mx.is_probability
    with pytest.raises(DomainError):
        builtin_measure(DISK, "poisson")


def test_halfplane_atom_at_infinity():
    m = atomic(HALF, [np.inf, 0.0], [0.5, 0.5])
    z = np.array([1j, 2 + 1j])
    # the atom at infinity sits at u = 1 on the circle
    w = HALF.zeta0(z)
    expect = 0.5 * (1 + w) / (1 - w) + 0.5 * (-1 + w) / (-1 - w)
    assert np.allclose(c_function(m, z), expect, atol=1e-13)


def test_modulate_examples():
    m = lebesgue(DISK)
    same = modulate(m, lambda t: np.ones(np.shape(t)))
    assert np.array_equal(same.density, m.density)
    unimod = modulate(m, lambda t: np.abs(t ** 5) ** 2)
    assert np.allclose(unimod.density, 1.0, atol=1e-13)
    with pytest.raises(ZeroMassError):
        modulate(dirac(DISK, 1.0), lambda t: np.zeros(np.shape(t)))
    with pytest.raises(DomainError):
        modulate(m, lambda t: -np.ones(np.shape(t)))
    # poisson(alpha) / |Phi|^2 with |Phi| = 1 returns the poisson density
    pa = poisson(DISK, 0.5)
    out = modulate(pa, lambda t: 1.0 / np.abs(t ** 2) ** 2, renormalize=True)
    assert np.allclose(out.density, pa.density)


def test_descriptor_roundtrip():
    d = {"geometry": "halfplane", "atoms": [{"angle_or_x": "inf", "weight": 1.0},
                                              {"angle_or_x": 0.5, "weight": 3.0}],
         "density": {"builtin": "poisson", "alpha": [0.0, 2.0], "weight": 4.0}}
    m = measure_from_descriptor(d)
    assert m.is_probability and m.n_atoms == 2
    assert m.atom_weights == pytest.approx([0.125, 0.375])
    with pytest.raises(DomainError):
        measure_from_descriptor({"density": {"builtin": "nope"}})


def test_invalid_measures():
    with pytest.raises(DomainError):
        atomic(DISK, [0.5], [1.0])
    with pytest.raises(DomainError):
        atomic(DISK, [1.0], [-1.0])


@given(seeds)
def test_f_fa_identity(seed):
    rng = np.random.default_rng(seed)
    for g in (DISK, HALF):
        m = random_smooth(g, rng) if rng.uniform() < 0.5 else random_atomic(g, 4, rng)
        a, z = random_interior(g, 2, rng)
        k = g.kernel(z, a)
        lhs = complex(c_function(m, z))
        rhs = complex(k.D_R * alpha_c_function(m, a, z) - 1j * m.mass * k.D_I)
        assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))


@given(seeds)
def test_f_fa_moebius(seed):
    rng = np.random.default_rng(seed)
    for g in (DISK, HALF):
        m = random_atomic(g, 5, rng)
        a = random_interior(g, 1, rng)[0]
        z = random_interior(g, 8, rng)
        f = s_function(m, z)
        fa = alpha_s_function(m, a, z)
        assert np.max(np.abs(fa_from_f(g, a, f) - fa)) <= 1e-9
        assert np.max(np.abs(f_from_fa(g, a, fa) - f)) <= 1e-9


@given(seeds)
def test_schur_bound(seed):
    rng = np.random.default_rng(seed)
    for g in (DISK, HALF):
        z = random_interior(g, 40, rng, 0.999)
        for m in (random_smooth(g, rng), random_atomic(g, 3, rng)):
            assert np.max(np.abs(s_function(m, z))) <= 1 + 1e-10
            assert np.min(c_function(m, z).real) > -1e-10


@pytest.mark.parametrize("case", ["disk", "halfplane"])
def test_boundary_real_part_law(case):
    g = get_geometry(case)
    m = random_smooth(g, np.random.default_rng(5))
    idx = np.arange(0, m.n_grid, 37)
    u = m.grid_u[idx]
    F = c_function(m, g.zeta0_inv((1 - 1e-6) * u))
    assert np.max(np.abs(F.real - m.density[idx])) < 1e-4


def test_pushforward_consistency():
    rng = np.random.default_rng(8)
    mh = random_smooth(HALF, rng)
    mh = mix([(0.7, mh), (0.3, atomic(HALF, [np.inf, -1.5], [0.4, 0.6]))])
    md = Measure(DISK, mh.atom_u, mh.atom_weights, mh.density, mh.n_grid)
    z = random_interior(HALF, 20, rng)
    assert np.max(np.abs(c_function(mh, z) - c_function(md, HALF.zeta0(z)))) <= 1e-9

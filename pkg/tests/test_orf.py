from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_boundary, random_interior, random_params
from wallrat.errors import DomainError, IllConditionedGram
from wallrat.geometry import AlphaSeq, blaschke, get_geometry, random_alphas
from wallrat.khrushchev import interior_grid
from wallrat.measure import Measure, c_function, dirac, lebesgue, poisson, random_atomic, random_smooth
from wallrat.orf import (gram_matrix, inverse_iterate_b, khrushchev_measure, orf_eval, orf_from_measure,
                         orf_to_wall, orf_trajectory, second_kind_from_measure, wall_orf_bridge,
                         wall_to_orf)
from wallrat.schur import SchurParams
from wallrat.wall import wall_eval, wall_trajectory

DISK = get_geometry("disk")
HALF = get_geometry("halfplane")
A0 = AlphaSeq.constant(DISK)
seeds = st.integers(0, 2**32 - 1)


def test_initial_functions(geom):
    p, al = random_params(geom, 3, np.random.default_rng(0))
    q = orf_eval(p, al, 0, random_interior(geom, 4, np.random.default_rng(1)))
    assert np.all(q.Phi == 1) and np.all(q.Psi == 1) and np.all(q.b == 1) and q.kappa == 1


def test_polynomial_case():
    z = np.array([0.3 + 0.2j, -0.5j, 0.7])
    p = SchurParams(np.zeros(6), False, A0)
    for q in orf_trajectory(p, A0, 5, z):
        assert np.allclose(q.Phi, z ** q.n) and np.allclose(q.PhiStar, 1)
        assert np.allclose(q.b, z ** q.n)
        # second kind: Psi_n = Phi_n for the zero sequence with this sign convention
        assert np.allclose(q.Psi, q.Phi) and np.allclose(q.PsiStar, 1)
        assert np.allclose(inverse_iterate_b(p, A0, q.n, z), z ** q.n)


def test_index_error():
    p = SchurParams([0.1, 0.2], False, A0)
    with pytest.raises(IndexError):
        orf_eval(p, A0, 3, 0.1)


def test_measure_route_examples(geom):
    al = random_alphas(geom, 6, np.random.default_rng(2))
    s = orf_from_measure(lebesgue(geom), AlphaSeq.constant(geom), 5)
    assert np.max(np.abs(s.lambdas)) < 1e-12
    alpha = random_interior(geom, 1, np.random.default_rng(3))[0]
    s = orf_from_measure(poisson(geom, alpha), al, 5)
    assert s.lambdas[0] == pytest.approx(np.conj(geom.zeta0(alpha)), abs=1e-10)
    assert np.max(np.abs(s.lambdas[1:])) < 1e-9
    tau = geom.zeta0_inv(np.exp(2.5j))
    s = orf_from_measure(dirac(geom, tau), al, 5)
    assert s.terminating and s.lambdas.size == 1 and abs(abs(s.lambdas[0]) - 1) < 1e-12
    with pytest.raises(DomainError):
        orf_from_measure(Measure(geom, np.zeros(0), np.zeros(0), 2 * np.ones(64), 64), al, 3)


def test_ill_conditioned_gram_flag():
    # nodes piled near one boundary point make B_k nearly dependent on a smooth measure
    al = AlphaSeq.explicit(DISK, [0.999, 0.9991, 0.9992, 0.9993, 0.9994, 0.9995, 0.9996])
    m = random_smooth(DISK, np.random.default_rng(4))
    s = orf_from_measure(m, al, 7)
    assert s.ill_conditioned and s.gram_cond > 1e12
    with pytest.raises(IllConditionedGram):
        orf_from_measure(m, al, 7, strict=True)


@given(seeds)
def test_orthonormality_both_routes(seed):
    rng = np.random.default_rng(seed)
    for g in (DISK, HALF):
        m = random_smooth(g, rng) if rng.uniform() < 0.5 else random_atomic(g, 8, rng)
        al = random_alphas(g, 6, rng)
        s = orf_from_measure(m, al, 5)
        G = gram_matrix(m, s, 5)
        assert np.max(np.abs(G - np.eye(6))) <= 1e-8
        # recurrence route evaluated on the quadrature nodes
        from wallrat.orf import _quadrature
        nodes, w = _quadrature(m)
        V = np.stack([q.Phi for q in orf_trajectory(s.params, al, 5, nodes)])
        G2 = (V * w) @ V.conj().T
        assert np.max(np.abs(G2 - np.eye(6))) <= 1e-8


@given(seeds)
def test_recurrence_matches_gram_schmidt(seed):
    rng = np.random.default_rng(seed)
    for g in (DISK, HALF):
        m = random_smooth(g, rng)
        al = random_alphas(g, 6, rng)
        s = orf_from_measure(m, al, 5)
        z = random_interior(g, 10, rng)
        for q in orf_trajectory(s.params, al, 5, z):
            assert np.max(np.abs(q.Phi - s.phi(q.n, z))) <= 1e-9
            assert np.max(np.abs(q.PhiStar - s.phi_star(q.n, z))) <= 1e-9


@pytest.mark.parametrize("case", ["disk", "halfplane"])
def test_second_kind_definition(case):
    g = get_geometry(case)
    rng = np.random.default_rng(5)
    for m in (random_smooth(g, rng), random_atomic(g, 8, rng)):
        al = random_alphas(g, 7, rng)
        s = orf_from_measure(m, al, 6)
        z = interior_grid(g, 20)
        tr = orf_trajectory(s.params, al, 6, z)
        for n in range(7):
            assert np.max(np.abs(second_kind_from_measure(m, s, n, z) - tr[n].Psi)) <= 1e-7


@given(seeds)
def test_bridge_round_trip(seed):
    rng = np.random.default_rng(seed)
    for g in (DISK, HALF):
        p, al = random_params(g, 5, rng)
        z = random_interior(g, 6, rng)
        z = z[np.abs(g.zeta0(z)) > 1e-2]
        orf = orf_trajectory(p, al, 5, z)
        for wq in wall_trajectory(p, al, 4, z):
            oq = wall_orf_bridge(wq, p, al, z, "forward")
            ref = orf[wq.n + 1]
            for a, b in ((oq.Phi, ref.Phi), (oq.PhiStar, ref.PhiStar), (oq.Psi, ref.Psi),
                         (oq.PsiStar, ref.PsiStar)):
                assert np.max(np.abs(a - b)) <= 1e-9 * max(1.0, np.max(np.abs(b)))
            back = wall_orf_bridge(oq, p, al, z, "inverse")
            for a, b in ((back.R, wq.R), (back.S, wq.S), (back.Rstar, wq.Rstar), (back.Sstar, wq.Sstar)):
                assert np.max(np.abs(a - b)) <= 1e-10 * max(1.0, np.max(np.abs(b)))
            assert back.Upsilon == pytest.approx(wq.Upsilon, rel=1e-12)


def test_bridge_examples():
    z = np.array([0.3, -0.2 + 0.5j])
    p = SchurParams(np.zeros(3), False, A0)
    oq = wall_to_orf(wall_eval(p, A0, 0, z), A0, z)
    assert oq.kappa == 1 and np.allclose(oq.Phi, z) and np.allclose(oq.PsiStar, 1)
    with pytest.raises(DomainError):
        orf_to_wall(orf_eval(p, A0, 0, z), A0, z)
    with pytest.raises(DomainError):
        wall_orf_bridge(oq, p, A0, z, "sideways")


@given(seeds)
def test_wronskian_transport(seed):
    # S S* - R R* = Upsilon B_{n-1} becomes Psi* Phi + Psi Phi* = 2 (...) B_{n-1} on the ORF side
    rng = np.random.default_rng(seed)
    for g in (DISK, HALF):
        p, al = random_params(g, 4, rng)
        z = random_interior(g, 5, rng)
        for n in range(1, 5):
            q = orf_eval(p, al, n, z)
            wq = wall_eval(p, al, n - 1, z)
            lhs = q.PsiStar * q.Phi + q.Psi * q.PhiStar
            r = g.varpi_ratio(g.alpha0, al[n], z) / q.kappa
            rhs = 2 * g.z_factor(al[n]) * r ** 2 * g.zeta0(z) * wq.Upsilon * blaschke(g, al, n - 1, z)
            assert np.max(np.abs(lhs - rhs)) <= 1e-9 * max(1.0, np.max(np.abs(lhs)))


@given(seeds)
def test_b_quotient_and_recurrence(seed):
    rng = np.random.default_rng(seed)
    for g in (DISK, HALF):
        p, al = random_params(g, 5, rng)
        z = random_interior(g, 8, rng)
        t = random_boundary(g, 8, rng)
        for q in orf_trajectory(p, al, 5, z):
            b = inverse_iterate_b(p, al, q.n, z)
            assert np.max(np.abs(b - np.conj(g.z_factor(al[q.n])) * q.Phi / q.PhiStar)) <= 1e-10
            assert np.max(np.abs(b)) <= 1 + 1e-10
            assert np.max(np.abs(np.abs(inverse_iterate_b(p, al, q.n, t)) - 1)) <= 1e-10


def test_khrushchev_measure_examples(geom):
    rng = np.random.default_rng(6)
    al = random_alphas(geom, 4, rng)
    m = random_atomic(geom, 3, rng)
    k0 = khrushchev_measure(m, al, 0)
    assert np.allclose(k0.measure.density, 1.0)
    k2 = khrushchev_measure(m, al, 2)
    assert k2.c_residual <= 1e-8 and k2.s_residual <= 1e-8
    kl = khrushchev_measure(lebesgue(geom), AlphaSeq.constant(geom), 3)
    assert np.allclose(kl.measure.density, 1.0, atol=1e-12)
    with pytest.raises(DomainError):
        khrushchev_measure(m, al, 3)


@given(seeds)
def test_bernstein_chain(seed):
    rng = np.random.default_rng(seed)
    for g in (DISK, HALF):
        m = random_smooth(g, rng)
        al = random_alphas(g, 7, rng)
        s = orf_from_measure(m, al, 6)
        z = interior_grid(g, 20)
        for n in range(1, 7):
            k = khrushchev_measure(m, al, n, z, system=s)
            oq = orf_eval(s.params, al, n, z)
            assert np.max(np.abs(c_function(k.measure, z) - oq.PsiStar / oq.PhiStar)) <= 1e-8

"""Tests for the time-independent no-go bound and its certificate chain."""

import math

import numpy as np
import pytest

from fibdrive import bigmat as bm
from fibdrive import haar
from fibdrive import stationary as st


def test_bound_values():
    assert abs(st.bound_B(2) - 0.0446582) < 1e-6
    for d in range(2, 101):
        assert st.bound_B(d) > 0
    # B(d)*(d+1) approaches 1 from below, monotonically
    vals = [st.bound_B(d) * (d + 1) for d in range(2, 60)]
    assert all(v < 1 for v in vals)
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_rho_inf_2_hand_enumeration():
    # H = Z, psi = |+>: quadruples with matching energy sums give
    # 1/4 |ee> + 1/4 |gg> + 1/4 (|eg> + |ge>)(<eg| + <ge|)  (eigenbasis labels)
    h = np.array([[1, 0], [0, -1]], dtype=complex)
    psi = np.array([1, 1]) / math.sqrt(2)
    ham = st.HamiltonianSpec.from_state(h, psi)
    rho = st.rho_inf_2(ham)
    expected = np.zeros((4, 4), dtype=complex)
    expected[0, 0] = 0.25
    expected[3, 3] = 0.25
    for i in (1, 2):
        for j in (1, 2):
            expected[i, j] = 0.25
    assert np.allclose(rho.matrix.data, expected, atol=1e-12)
    rho.validate()


def test_rho_inf_2_eigenstate_is_stationary():
    rng = np.random.default_rng(1)
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = (g + g.conj().T) / 2
    evals, vecs = np.linalg.eigh(h)
    psi = vecs[:, 2]
    ham = st.HamiltonianSpec.from_state(h, psi)
    rho = st.rho_inf_2(ham)
    expected = np.zeros((16, 16), dtype=complex)
    expected[2 * 4 + 2, 2 * 4 + 2] = 1.0
    assert np.allclose(rho.matrix.data, expected, atol=1e-10)


def test_rho_inf_2_trace_one():
    rng = np.random.default_rng(2)
    for d in (2, 3, 4, 6):
        ham = st.random_instance(d, rng)
        rho = st.rho_inf_2(ham)
        assert abs(rho.matrix.trace() - 1) < 1e-12


def test_rho_inf_2_matches_time_quadrature():
    # independent dynamic oracle: average the evolved replicated projector
    # over a long, dense time grid
    rng = np.random.default_rng(3)
    d = 3
    ham = st.random_instance(d, rng)
    e = ham.energies
    c = ham.overlaps
    t_grid = np.arange(0, 10 ** 4, 0.25)
    # in the eigenbasis, psi(t) components are c_a e^{-i E_a t}
    acc = np.zeros((d * d, d * d), dtype=complex)
    for t in t_grid:
        amp = c * np.exp(-1j * e * t)
        amp2 = np.kron(amp, amp)
        acc += np.outer(amp2, amp2.conj())
    quad = acc / t_grid.size
    rho = st.rho_inf_2(ham).matrix.data
    delta = bm.trace_norm(bm.CMatrix.from_numpy(rho - quad)) / 2
    assert delta < 0.02


def test_dephase2_fixes_haar():
    for d in (2, 3):
        ref = haar.haar_moment_state(d, 2)
        out = st.dephase2(ref)
        assert np.allclose(out.matrix.data, ref.matrix.data, atol=1e-13)


def test_dephase2_idempotent_and_trace_preserving():
    rng = np.random.default_rng(4)
    d = 3
    g = rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9))
    rho = g @ g.conj().T
    rho /= np.trace(rho)
    ms = haar.MomentState(d=d, k=2, matrix=bm.CMatrix.from_numpy(rho))
    once = st.dephase2(ms)
    twice = st.dephase2(once)
    assert np.allclose(once.matrix.data, twice.matrix.data, atol=1e-13)
    assert abs(once.matrix.trace() - 1) < 1e-12


def test_dephase2_of_rho_inf_closed_form():
    # for a nondegenerate-gap spectrum the dephased stationary moment is
    # sum_ab |c_a|^2 |c_b|^2 M(a,b)
    rng = np.random.default_rng(5)
    d = 4
    ham = st.random_instance(d, rng)
    p = np.abs(ham.overlaps) ** 2
    out = st.dephase2(st.rho_inf_2(ham)).matrix.data
    expected = np.zeros((d * d, d * d), dtype=complex)
    for a in range(d):
        for b in range(d):
            i = a * d + b
            expected[i, i] += p[a] * p[b]
            if a != b:
                expected[i, b * d + a] += p[a] * p[b]
    assert np.allclose(out, expected, atol=1e-12)


def test_data_processing_contracts_distance():
    rng = np.random.default_rng(6)
    d = 3
    ref = haar.haar_moment_state(d, 2)
    for _ in range(5):
        ham = st.random_instance(d, rng)
        rho = st.rho_inf_2(ham)
        before = bm.trace_norm(rho.matrix - ref.matrix) / 2
        after = bm.trace_norm(
            st.dephase2(rho).matrix - st.dephase2(ref).matrix) / 2
        assert after <= before + 1e-12


def test_certificate_chain_random_instances():
    rng = np.random.default_rng(7)
    for d in (2, 3, 4, 5):
        for _ in range(20):
            cert = st.delta2_time_independent(st.random_instance(d, rng))
            assert cert.delta2 >= cert.bound - 1e-12
            assert cert.chain_holds()


def test_delta2_eigenstate_closed_form():
    # psi an eigenstate: Delta = half trace norm of (Haar - |aa><aa|)
    rng = np.random.default_rng(8)
    d = 3
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    h = (g + g.conj().T) / 2
    _, vecs = np.linalg.eigh(h)
    psi = vecs[:, 0]
    cert = st.delta2_time_independent(st.HamiltonianSpec.from_state(h, psi))
    proj = np.zeros((d * d, d * d), dtype=complex)
    proj[0, 0] = 1.0
    ref = haar.haar_moment_state(d, 2)
    direct = bm.trace_norm(ref.matrix - bm.CMatrix.from_numpy(proj)) / 2
    assert abs(cert.delta2 - direct) < 1e-10


def test_dephased_bound_uniform_overlaps():
    # uniform |c|^2 = 1/d: every term is |1/d^2 - (1+delta)/(d(d+1))|
    d = 4
    p = np.ones(d) / d
    ham = st.HamiltonianSpec(h=bm.CMatrix.identity(d),
                             energies=np.arange(d, dtype=float),
                             vectors=np.eye(d, dtype=complex),
                             overlaps=np.sqrt(p).astype(complex))
    expected = 0.0
    for a in range(d):
        for b in range(d):
            target = (2.0 if a == b else 1.0) / (d * (d + 1))
            expected += abs(1 / d ** 2 - target)
    assert abs(st.dephased_bound(ham) - expected / 2) < 1e-14


def test_lemma_F_symmetric_point():
    for d in (2, 3, 4):
        xi = math.sqrt(2.0 / (d * (d + 1)))
        a = np.ones(d) / d
        assert abs(st.lemma_F(a, xi) - d * abs(1 / d ** 2 - xi ** 2)) < 1e-14


def test_lemma_F_rejects_off_simplex():
    with pytest.raises(ValueError):
        st.lemma_F(np.array([0.7, 0.7]), 0.5)


def test_lemma_minimizing_family_matches_F():
    for d in (2, 3, 4):
        for xi in (0.5, 0.57735, 0.4):
            if not (1.0 / d <= xi <= 1):
                continue
            m = int(math.floor(1 / xi))
            a = [xi] * m + [1 - m * xi] + [0.0] * (d - m - 1)
            if len(a) != d or any(x < -1e-12 for x in a):
                continue
            direct = st.lemma_F(np.array(a), xi)
            closed = st.lemma_F_minimizing_family(d, xi)
            assert abs(direct - closed) < 1e-12


def test_brute_min_F_grid_oracle():
    # d=2 at xi = sqrt(1/3): floor is xi^2 (2 - sqrt(3)) ~ 0.0893; the true
    # minimum sits at the minimizing family (one entry at xi, one remainder)
    xi = math.sqrt(1.0 / 3)
    got = st.brute_min_F(2, xi, 1e-3)
    floor = st.lemma_F_floor(2, xi)
    assert abs(floor - xi * xi * (2 - math.sqrt(3))) < 1e-12
    assert got >= floor - 5e-3
    assert got <= st.lemma_F_minimizing_family(2, xi) + 5e-3


@pytest.mark.parametrize("d", [2, 3, 4])
def test_brute_min_F_respects_floor(d):
    xi = math.sqrt(2.0 / (d * (d + 1)))
    got = st.brute_min_F(d, xi, 1e-3)
    assert got >= st.lemma_F_floor(d, xi) - 5e-3

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from doess import spin
from doess.spin import SX, SY, SZ, I2

from oracles import random_hermitian, taylor_expm


def test_pi_pulses_match_pauli_matrices():
    assert np.allclose(spin.rotation_unitary("+X", np.pi), -1j * SX, atol=1e-15)
    assert np.allclose(spin.rotation_unitary("-Y", np.pi), 1j * SY, atol=1e-15)
    half = spin.rotation_unitary("+X", np.pi / 2)
    assert np.allclose(half, (I2 - 1j * SX) / np.sqrt(2), atol=1e-15)


def test_rotation_rejects_bad_input():
    with pytest.raises(ValueError):
        spin.rotation_unitary("+Z", np.pi)
    with pytest.raises(ValueError):
        spin.rotation_unitary("+X", 0.0)
    with pytest.raises(ValueError):
        spin.rotation_unitary("+X", 2 * np.pi)


def test_rotation_unitarity_on_many_angles():
    rng = np.random.default_rng(0)
    axes = list(spin.AXES)
    for _ in range(10_000):
        u = spin.rotation_unitary(axes[rng.integers(4)], rng.uniform(1e-9, 2 * np.pi - 1e-9))
        assert np.abs(u.conj().T @ u - I2).max() < 1e-12


@pytest.mark.parametrize("dim", [2, 4, 8, 16, 32])
def test_expm_matches_taylor_oracle(dim):
    rng = np.random.default_rng(dim)
    for _ in range(5):
        H = random_hermitian(rng, dim)
        t = rng.uniform(0.01, 3.0)
        U = spin.expm_hermitian_generator(H, t)
        assert spin.frobenius_norm(U - taylor_expm(-1j * H * t)) < 1e-10
        assert spin.is_unitary(U)


def test_expm_rejects_non_hermitian():
    with pytest.raises(ValueError):
        spin.expm_hermitian_generator(np.array([[0, 1], [0, 0]]), 1.0)
    with pytest.raises(ValueError):
        spin.expm_hermitian_generator(np.zeros((2, 3)), 1.0)


def test_disorder_only_hamiltonian_is_diagonal():
    h = spin.ClusterHamiltonian((0.3, 0.0), ((0.0, 0.0), (0.0, 0.0)))
    H = spin.assemble_hamiltonian(h)
    assert np.allclose(H, 0.15 * np.kron(SZ, I2))


def test_pair_operator_matches_explicit_kron():
    J = 0.8
    h = spin.ClusterHamiltonian((0.0, 0.0), ((0.0, J), (J, 0.0)))
    H = spin.assemble_hamiltonian(h)
    expect = J / 4 * (np.kron(SX, SX) + np.kron(SY, SY) - 2 * np.kron(SZ, SZ))
    assert np.allclose(H, expect)
    assert spin.is_hermitian(H)


def test_three_spin_hamiltonian_against_embedding():
    rng = np.random.default_rng(3)
    hvec = rng.normal(size=3)
    J = rng.normal(size=(3, 3))
    J = np.triu(J, 1) + np.triu(J, 1).T
    H = spin.assemble_hamiltonian(spin.ClusterHamiltonian(tuple(hvec), tuple(map(tuple, J))))
    expect = sum(hvec[i] / 2 * spin.embed(SZ, i, 3) for i in range(3))
    for i in range(3):
        for j in range(i + 1, 3):
            pair = sum(c * spin.embed(P, i, 3) @ spin.embed(P, j, 3) for c, P in ((1, SX), (1, SY), (-2, SZ)))
            expect = expect + J[i, j] / 4 * pair
    assert np.allclose(H, expect)


def test_cluster_validation():
    with pytest.raises(ValueError):
        spin.ClusterHamiltonian((0.1, 0.2), ((0.0, 1.0), (0.5, 0.0)))
    with pytest.raises(ValueError):
        spin.ClusterHamiltonian((0.1, 0.2), ((0.0,),))
    with pytest.raises(ValueError):
        spin.ClusterHamiltonian((0.1,), (), interaction_form="dipolar")


@settings(max_examples=200, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(0.01, np.pi - 0.01))
def test_axis_angle_round_trip(x, y, z, angle):
    v = np.array([x, y, z])
    if np.linalg.norm(v) < 1e-3:
        return
    n = v / np.linalg.norm(v)
    u = np.cos(angle / 2) * I2 - 1j * np.sin(angle / 2) * spin.sigma_dot(n)
    u = np.exp(0.7j) * u
    axis, got = spin.su2_axis_angle(u)
    assert got == pytest.approx(angle, abs=1e-9)
    assert np.allclose(axis, n, atol=1e-8)


def test_axis_angle_of_identity():
    axis, angle = spin.su2_axis_angle(-I2)
    assert angle == 0.0 and np.allclose(axis, [0, 0, 1])


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(list(spin.AXES)), st.floats(0.01, 2 * np.pi - 0.01))
def test_adjoint_is_the_right_handed_rotation(axis, angle):
    u = spin.rotation_unitary(axis, angle)
    R = spin.adjoint(u)
    assert np.allclose(R, spin.axis_rotation(spin.AXES[axis], angle), atol=1e-12)
    v = np.array([0.3, -0.2, 0.9])
    assert np.allclose(u @ spin.sigma_dot(v) @ u.conj().T, spin.sigma_dot(R @ v), atol=1e-12)

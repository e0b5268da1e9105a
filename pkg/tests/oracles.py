"""Independent reference implementations used by unit and acceptance tests.

They use explicit matrices, scipy/Taylor exponentials and Gauss-Legendre
quadrature rather than the package's closed forms.
"""

import numpy as np
from scipy.linalg import expm

from doess import sequences as sq
from doess.spin import I2, PAIR_TENSORS, SX, SY, SZ, assemble_hamiltonian, collective

PAULIS = (SX, SY, SZ)
GL_X, GL_W = np.polynomial.legendre.leggauss(24)


def taylor_expm(A, terms=60):
    """exp(A) by scaling and squaring a truncated Taylor series."""
    s = max(0, int(np.ceil(np.log2(max(np.abs(A).sum(axis=1).max(), 1e-300)))) + 1)
    B = A / 2**s
    out = np.eye(A.shape[0], dtype=complex)
    term = np.eye(A.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ B / k
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


def random_hermitian(rng, dim):
    A = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (A + A.conj().T) / 2


def pair_operator(M):
    return sum(M[a, b] * np.kron(PAULIS[a], PAULIS[b]) for a in range(3) for b in range(3))


def _partial_pulse(code, phi):
    n = sq.AXIS_VECTORS[code]
    return np.cos(phi / 2) * I2 - 1j * np.sin(phi / 2) * (n[0] * SX + n[1] * SY)


def indicators(codes, null_slot="pi_slot", form="xxyy_m2zz"):
    """Indicators from explicit 2x2 / 4x4 toggling-frame operators and quadrature."""
    M = PAIR_TENSORS[form]
    Hp = pair_operator(M)
    target = np.trace(M) / 3 * pair_operator(np.eye(3))
    C = I2.copy()
    s1 = np.zeros((2, 2), complex)
    s2 = np.zeros((2, 2), complex)
    t3 = np.zeros((4, 4), complex)
    t4 = np.zeros((4, 4), complex)
    g5 = np.zeros((2, 2), complex)
    w2 = w5 = 0.0
    for c in codes:
        CC = np.kron(C, C)
        s1 += C.conj().T @ SZ @ C
        t3 += CC.conj().T @ Hp @ CC
        theta = sq.ANGLES[c]
        if c == 0:
            w = np.pi if null_slot == "pi_slot" else 0.0
            s2 += w * C.conj().T @ SZ @ C
            t4 += w * CC.conj().T @ Hp @ CC
            w2 += w
        else:
            for phi, wt in zip((GL_X + 1) * theta / 2, GL_W * theta / 2):
                Cp = _partial_pulse(c, phi) @ C
                CCp = np.kron(Cp, Cp)
                s2 += wt * Cp.conj().T @ SZ @ Cp
                t4 += wt * CCp.conj().T @ Hp @ CCp
            w2 += theta
            n = sq.AXIS_VECTORS[c]
            g5 += theta * C.conj().T @ (n[0] * SX + n[1] * SY) @ C
            w5 += theta
        C = sq.IDEAL_UNITARIES[c] @ C
    d = len(codes)
    fro = np.linalg.norm
    norm_pair = fro(Hp)
    i1 = fro(s1) / (np.sqrt(2) * d)
    i3 = fro(t3 / d - target) / norm_pair
    i2 = fro(s2) / (np.sqrt(2) * w2) if w2 > 0 else i1
    i4 = fro(t4 / w2 - target) / norm_pair if w2 > 0 else i3
    i5 = fro(g5) / (np.sqrt(2) * w5) if w5 > 0 else 0.0
    return np.array([i1, i2, i3, i4, i5])


def cycle_unitary(codes, realization, params):
    """Cycle unitary as an ordered product of scipy expm segments."""
    n = params.n_spins
    H = assemble_hamiltonian(realization.hamiltonian(params.interaction_form))
    seq = params.timing(codes)
    U = np.eye(2**n, dtype=complex)
    for k, (c, tf, tp) in enumerate(zip(codes, seq.free_durations(), seq.pulse_durations())):
        U = expm(-1j * H * tf) @ U
        if c:
            drive = params.rabi * (1 + realization.eps[k]) / 2 * collective(sq.AXIS_VECTORS[c], n)
            U = expm(-1j * (H + drive) * tp) @ U
    return U

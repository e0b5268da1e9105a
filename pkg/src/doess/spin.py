"""Few-spin linear algebra: Pauli operators, rotations, cluster Hamiltonians.

Conventions: spin-1/2 operators are written with Pauli matrices and the 1/2
is carried by the coefficients. Frequencies are angular (rad/us), times in us.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"x": SX, "y": SY, "z": SZ}

# axis tag -> unit vector in the XY plane
AXES = {
    "+X": np.array([1.0, 0.0, 0.0]),
    "-X": np.array([-1.0, 0.0, 0.0]),
    "+Y": np.array([0.0, 1.0, 0.0]),
    "-Y": np.array([0.0, -1.0, 0.0]),
}

INTERACTION_FORMS = ("xxyy_m2zz", "ising_zz", "heisenberg")

# coefficient tensor M_ab of the pair operator sum_ab M_ab sigma_a sigma_b
PAIR_TENSORS = {
    "xxyy_m2zz": np.diag([1.0, 1.0, -2.0]),
    "ising_zz": np.diag([0.0, 0.0, 1.0]),
    "heisenberg": np.diag([1.0, 1.0, 1.0]),
}


def sigma_dot(v):
    """Return ``v . sigma`` for a real 3-vector."""
    return v[0] * SX + v[1] * SY + v[2] * SZ


def rotation_unitary(axis, angle):
    """SU(2) rotation ``exp(-i angle/2 sigma_axis)`` for axis in {+X,-X,+Y,-Y}."""
    if axis not in AXES:
        raise ValueError(f"invalid axis tag {axis!r}; expected one of {sorted(AXES)}")
    if not 0.0 < angle < 2 * np.pi:
        raise ValueError(f"angle must lie in (0, 2pi), got {angle}")
    n = AXES[axis]
    return np.cos(angle / 2) * I2 - 1j * np.sin(angle / 2) * sigma_dot(n)


def frobenius_norm(m):
    return float(np.sqrt(np.sum(np.abs(np.asarray(m)) ** 2)))


def is_unitary(u, tol=1e-10):
    u = np.asarray(u)
    return frobenius_norm(u.conj().T @ u - np.eye(u.shape[0])) < tol


def is_hermitian(h, tol=1e-12):
    h = np.asarray(h)
    return frobenius_norm(h - h.conj().T) < tol


def embed(op, site, n_spins):
    """Kronecker-embed a single-spin operator at ``site`` of an n-spin register."""
    out = np.ones((1, 1), dtype=complex)
    for k in range(n_spins):
        out = np.kron(out, op if k == site else I2)
    return out


@lru_cache(maxsize=None)
def _site_ops(n_spins):
    # read-only stacks (3, n, D, D) for x/y/z on every site
    ops = np.array([[embed(PAULI[a], i, n_spins) for i in range(n_spins)] for a in "xyz"])
    ops.setflags(write=False)
    return ops


def site_operators(n_spins):
    """Array of shape (3, n, 2^n, 2^n): sigma_a on spin i."""
    return _site_ops(n_spins)


@lru_cache(maxsize=None)
def _pair_ops(n_spins, form):
    tensor = PAIR_TENSORS[form]
    ops = _site_ops(n_spins)
    pairs = [(i, j) for i in range(n_spins) for j in range(i + 1, n_spins)]
    dim = 2**n_spins
    out = np.zeros((len(pairs), dim, dim), dtype=complex)
    for p, (i, j) in enumerate(pairs):
        for a in range(3):
            for b in range(3):
                if tensor[a, b] != 0.0:
                    out[p] += tensor[a, b] * ops[a, i] @ ops[b, j]
    out.setflags(write=False)
    return pairs, out


def pair_operators(n_spins, form="xxyy_m2zz"):
    """Pair list and stacked two-spin operators (unscaled) for ``form``."""
    if form not in PAIR_TENSORS:
        raise ValueError(f"unknown interaction form {form!r}; expected one of {INTERACTION_FORMS}")
    return _pair_ops(n_spins, form)


def collective(axis_vec, n_spins):
    """Sum over spins of ``n . sigma`` (no factor 1/2)."""
    ops = _site_ops(n_spins)
    return np.einsum("a,aijk->jk", np.asarray(axis_vec, dtype=float), ops)


@dataclass(frozen=True)
class ClusterHamiltonian:
    """Disorder fields ``h`` and symmetric couplings ``J`` of an n-spin cluster.

    The assembled operator is
    ``sum_i h_i/2 Z_i + sum_{i<j} J_ij/4 * pair_ij`` with ``pair`` given by
    ``interaction_form`` (default ``XX + YY - 2 ZZ``).
    """

    disorder: tuple
    couplings: tuple
    interaction_form: str = "xxyy_m2zz"

    def __post_init__(self):
        h = np.asarray(self.disorder, dtype=float)
        J = np.asarray(self.couplings, dtype=float)
        n = h.shape[0]
        if h.ndim != 1 or n < 1:
            raise ValueError("disorder must be a non-empty vector")
        if n > 1 or J.size:
            if J.shape != (n, n):
                raise ValueError(f"couplings must be {n}x{n}, got shape {J.shape}")
            if not np.allclose(J, J.T, atol=0) or np.any(np.diag(J) != 0):
                raise ValueError("couplings must be symmetric with zero diagonal")
        if self.interaction_form not in PAIR_TENSORS:
            raise ValueError(f"unknown interaction form {self.interaction_form!r}")

    @property
    def n_spins(self):
        return len(self.disorder)


def assemble_hamiltonian(h):
    """Dense 2^n x 2^n Hermitian matrix for a :class:`ClusterHamiltonian`."""
    disorder = np.asarray(h.disorder, dtype=float)
    n = disorder.shape[0]
    return assemble_batch(disorder[None], np.asarray(h.couplings, float).reshape(1, n, n)
                          if n > 1 else np.zeros((1, n, n)), h.interaction_form)[0]


def assemble_batch(disorder, couplings, form="xxyy_m2zz"):
    """Assemble K cluster Hamiltonians at once.

    disorder: (K, n); couplings: (K, n, n). Returns (K, 2^n, 2^n).
    """
    disorder = np.asarray(disorder, dtype=float)
    K, n = disorder.shape
    H = np.einsum("ki,ijl->kjl", disorder / 2, _site_ops(n)[2])
    if n > 1:
        pairs, ops = pair_operators(n, form)
        idx = np.array(pairs)
        Jp = np.asarray(couplings, dtype=float)[:, idx[:, 0], idx[:, 1]] / 4
        H = H + np.einsum("kp,pjl->kjl", Jp, ops)
    return H


def expm_hermitian_generator(H, t):
    """``exp(-i H t)`` by eigendecomposition; H must be Hermitian."""
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError("H must be a square matrix")
    if not is_hermitian(H, tol=1e-10 * max(1.0, frobenius_norm(H))):
        raise ValueError("H is not Hermitian")
    w, v = np.linalg.eigh(H)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def propagators(w, v, t):
    """Batched ``V exp(-i w t) V^dagger`` from a (batched) eigendecomposition."""
    phase = np.exp(-1j * w * np.asarray(t)[..., None])
    return (v * phase[..., None, :]) @ np.swapaxes(v.conj(), -1, -2)


def su2_axis_angle(u, tol=1e-12):
    """Axis/angle of a 2x2 unitary, up to global phase.

    Returns ``(axis, angle)`` with ``angle`` in [0, pi] such that
    ``u ~ cos(angle/2) I - i sin(angle/2) axis.sigma``. The identity reports
    ``(+Z, 0)``.
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2) or not is_unitary(u, tol=1e-8):
        raise ValueError("expected a 2x2 unitary matrix")
    su = u / np.sqrt(np.linalg.det(u))
    a0 = 0.5 * np.trace(su).real
    a = np.array([0.5j * np.trace(su @ p) for p in (SX, SY, SZ)]).real
    if a0 < 0:
        a0, a = -a0, -a
    s = np.linalg.norm(a)
    angle = 2 * np.arctan2(s, a0)
    if s < tol:
        return np.array([0.0, 0.0, 1.0]), 0.0
    return a / s, float(angle)


def adjoint(u):
    """SO(3) matrix R with ``u (v.sigma) u^dagger = (R v).sigma``."""
    u = np.asarray(u, dtype=complex)
    paulis = (SX, SY, SZ)
    return np.array([[0.5 * np.trace(pa @ u @ pb @ u.conj().T).real for pb in paulis]
                     for pa in paulis])


def axis_rotation(n, angle):
    """Rodrigues rotation matrix: right-handed rotation by ``angle`` about ``n``."""
    n = np.asarray(n, dtype=float)
    K = np.array([[0, -n[2], n[1]], [n[2], 0, -n[0]], [-n[1], n[0], 0]])
    return np.eye(3) + np.sin(angle) * K + (1 - np.cos(angle)) * (K @ K)

"""Leading-order average-Hamiltonian indicators of a pulse word.

Five numbers, each the normalized Frobenius norm of a first-order deviation
term, zero when the corresponding design rule is met exactly:

1. disorder during free intervals
2. disorder during finite-width pulses
3. pair interactions during free intervals
4. pair interactions during finite-width pulses
5. uniform fractional over-rotation of every pulse

Internally every traceless 2x2 operator ``v . sigma`` is handled as its
3-vector ``v`` and every two-spin operator ``sum M_ab sigma_a sigma_b`` as its
3x3 tensor ``M``; conjugating by a global rotation C maps ``v -> O v`` and
``M -> O M O^T`` with ``O = Ad(C)^T``. Frobenius norms are ``sqrt(2)|v|`` and
``2||M||``, so the normalizations below reduce to plain vector/tensor norms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sequences import ALPHABET, ANGLES, AXIS_VECTORS, IDEAL_UNITARIES, N_CODES
from .spin import PAIR_TENSORS, SZ, axis_rotation

N_INDICATORS = 5
DEFAULT_REPETITIONS = 8
ZHAT = np.array([0.0, 0.0, 1.0])


def _cross_matrix(n):
    return np.array([[0, -n[2], n[1]], [n[2], 0, -n[0]], [-n[1], n[0], 0]])


def _pulse_tables(form):
    """Per-code constants: frame step, in-pulse averages, error generator."""
    step = np.empty((N_CODES, 3, 3))
    zavg = np.empty((N_CODES, 3))
    mavg = np.empty((N_CODES, 3, 3))
    M = PAIR_TENSORS[form]
    for p in ALPHABET:
        if p.axis is None:
            step[p.code] = np.eye(3)
            zavg[p.code] = ZHAT
            mavg[p.code] = M
            continue
        n, th = AXIS_VECTORS[p.code], p.angle
        # frame after the pulse: O_k = O_{k-1} R_n(theta)^T = O_{k-1} R_n(-theta)
        step[p.code] = axis_rotation(n, -th)
        K = _cross_matrix(n)
        K2 = K @ K
        s, c = np.sin(th), np.cos(th)
        # averages over phi in [0, theta] of R_n(-phi) = I + a K + b K^2
        ea = -(1 - c) / th
        eb = 1 - s / th
        eaa = 0.5 - np.sin(2 * th) / (4 * th)
        eab = -(1 - c) / th + s * s / (2 * th)
        ebb = 1.5 - 2 * s / th + np.sin(2 * th) / (4 * th)
        zavg[p.code] = (np.eye(3) + ea * K + eb * K2) @ ZHAT
        mavg[p.code] = (M
                        + ea * (K @ M - M @ K)
                        + eb * (K2 @ M + M @ K2)
                        - eaa * K @ M @ K
                        + eab * (K @ M @ K2 - K2 @ M @ K)
                        + ebb * K2 @ M @ K2)
    return step, zavg, mavg


_TABLES = {form: _pulse_tables(form) for form in PAIR_TENSORS}


def _null_weight(null_slot):
    # a Null occupies the duration of a pi pulse (in rotation-angle units)
    return np.pi if null_slot == "pi_slot" else 0.0


@dataclass
class PassTerms:
    """Unnormalized single-pass sums for a batch of words (leading axis N)."""

    d: int
    s1: np.ndarray  # (N, 3) sum of interval frames of Z
    s2: np.ndarray  # (N, 3) duration-weighted in-pulse Z frames
    t3: np.ndarray  # (N, 3, 3) sum of interval frames of the pair tensor
    t4: np.ndarray  # (N, 3, 3) duration-weighted in-pulse pair frames
    g5: np.ndarray  # (N, 3) over-rotation generator
    w2: np.ndarray  # (N,) total pulse-time weight
    w5: np.ndarray  # (N,) total rotation angle
    q: np.ndarray  # (N, 3, 3) frame after one full pass
    m: np.ndarray  # (3, 3) pair tensor


def pass_terms(codes, null_slot="pi_slot", interaction_form="xxyy_m2zz"):
    codes = np.atleast_2d(np.asarray(codes, dtype=int))
    N, d = codes.shape
    step, zavg, mavg = _TABLES[interaction_form]
    M = PAIR_TENSORS[interaction_form]
    wnull = _null_weight(null_slot)
    O = np.broadcast_to(np.eye(3), (N, 3, 3)).copy()
    s1 = np.zeros((N, 3))
    s2 = np.zeros((N, 3))
    t3 = np.zeros((N, 3, 3))
    t4 = np.zeros((N, 3, 3))
    g5 = np.zeros((N, 3))
    w2 = np.zeros(N)
    w5 = np.zeros(N)
    for k in range(d):
        c = codes[:, k]
        theta = ANGLES[c]
        w = np.where(c == 0, wnull, theta)
        OM = O @ M
        # interval k+1 sees the frame accumulated over the first k pulses
        s1 += O[:, :, 2]
        t3 += OM @ O.transpose(0, 2, 1)
        s2 += w[:, None] * np.einsum("nij,nj->ni", O, zavg[c])
        t4 += w[:, None, None] * (O @ mavg[c] @ O.transpose(0, 2, 1))
        g5 += theta[:, None] * np.einsum("nij,nj->ni", O, AXIS_VECTORS[c])
        w2 += w
        w5 += theta
        O = O @ step[c]
    return PassTerms(d, s1, s2, t3, t4, g5, w2, w5, O, M)


def _from_terms(pt, r=1):
    """Indicator matrix (N, 5) for the r-fold repetition of each word."""
    N = pt.s1.shape[0]
    s1 = np.zeros_like(pt.s1)
    s2 = np.zeros_like(pt.s2)
    g5 = np.zeros_like(pt.g5)
    t3 = np.zeros_like(pt.t3)
    t4 = np.zeros_like(pt.t4)
    Qj = np.broadcast_to(np.eye(3), (N, 3, 3)).copy()
    for _ in range(r):
        QjT = Qj.transpose(0, 2, 1)
        s1 += np.einsum("nij,nj->ni", Qj, pt.s1)
        s2 += np.einsum("nij,nj->ni", Qj, pt.s2)
        g5 += np.einsum("nij,nj->ni", Qj, pt.g5)
        t3 += Qj @ pt.t3 @ QjT
        t4 += Qj @ pt.t4 @ QjT
        Qj = Qj @ pt.q
    return _normalize(pt, r, s1, s2, t3, t4, g5)


def _normalize(pt, r, s1, s2, t3, t4, g5):
    M = pt.m
    target = np.trace(M) / 3 * np.eye(3)
    mnorm = np.linalg.norm(M)
    n_int = r * pt.d
    i1 = np.linalg.norm(s1, axis=1) / n_int
    i3 = np.linalg.norm(t3 / n_int - target, axis=(1, 2)) / mnorm
    w2 = r * pt.w2
    w5 = r * pt.w5
    with np.errstate(invalid="ignore", divide="ignore"):
        i2 = np.where(w2 > 0, np.linalg.norm(s2, axis=1) / w2, i1)
        i4 = np.where(w2[:, None, None] > 0, t4 / np.where(w2 > 0, w2, 1.0)[:, None, None], t3 / n_int)
        i4 = np.linalg.norm(i4 - target, axis=(1, 2)) / mnorm
        i5 = np.where(w5 > 0, np.linalg.norm(g5, axis=1) / np.where(w5 > 0, w5, 1.0), 0.0)
    return np.stack([i1, i2, i3, i4, i5], axis=1)


def _codes_and_slot(seq, null_slot):
    codes = getattr(seq, "codes", seq)
    if null_slot is None:
        null_slot = getattr(seq, "null_slot", "pi_slot")
    return np.asarray(codes, dtype=int), null_slot


def indicator_vector(seq, null_slot=None, interaction_form="xxyy_m2zz"):
    """All five indicators of one word, as a length-5 array."""
    codes, null_slot = _codes_and_slot(seq, null_slot)
    return _from_terms(pass_terms(codes, null_slot, interaction_form))[0]


def indicator_matrix(codes_batch, null_slot="pi_slot", interaction_form="xxyy_m2zz"):
    """Indicators for a batch of equal-length words, shape (N, 5)."""
    return _from_terms(pass_terms(codes_batch, null_slot, interaction_form))


def indicator_series(seq, R=DEFAULT_REPETITIONS, null_slot=None, interaction_form="xxyy_m2zz"):
    """5 x R matrix; column r-1 holds the indicators of the r-fold repetition."""
    if R < 1:
        raise ValueError("R must be >= 1")
    codes, null_slot = _codes_and_slot(seq, null_slot)
    return series_batch(codes[None], R, null_slot, interaction_form)[0]


def series_batch(codes_batch, R=DEFAULT_REPETITIONS, null_slot="pi_slot", interaction_form="xxyy_m2zz"):
    """Indicator series for a batch, shape (N, 5, R).

    Repetition is accumulated incrementally: copy j of the word sees every
    frame of the first pass rotated by the j-th power of the net frame.
    """
    pt = pass_terms(codes_batch, null_slot, interaction_form)
    N = pt.s1.shape[0]
    out = np.empty((N, N_INDICATORS, R))
    acc = [np.zeros_like(pt.s1), np.zeros_like(pt.s2), np.zeros_like(pt.t3),
           np.zeros_like(pt.t4), np.zeros_like(pt.g5)]
    Qj = np.broadcast_to(np.eye(3), (N, 3, 3)).copy()
    for r in range(1, R + 1):
        QjT = Qj.transpose(0, 2, 1)
        acc[0] += np.einsum("nij,nj->ni", Qj, pt.s1)
        acc[1] += np.einsum("nij,nj->ni", Qj, pt.s2)
        acc[2] += Qj @ pt.t3 @ QjT
        acc[3] += Qj @ pt.t4 @ QjT
        acc[4] += np.einsum("nij,nj->ni", Qj, pt.g5)
        out[:, :, r - 1] = _normalize(pt, r, *acc)
        Qj = Qj @ pt.q
    return out


# Named single-indicator entry points. Each is a thin view on the shared
# computation so an alternate definition can replace one without touching the rest.

def indicator_1_disorder_free(seq, null_slot=None):
    return float(indicator_vector(seq, null_slot)[0])


def indicator_2_disorder_pulse(seq, null_slot=None):
    return float(indicator_vector(seq, null_slot)[1])


def indicator_3_interaction_free(seq, null_slot=None, interaction_form="xxyy_m2zz"):
    return float(indicator_vector(seq, null_slot, interaction_form)[2])


def indicator_4_interaction_pulse(seq, null_slot=None, interaction_form="xxyy_m2zz"):
    return float(indicator_vector(seq, null_slot, interaction_form)[3])


def indicator_5_pulse_error(seq, null_slot=None):
    return float(indicator_vector(seq, null_slot)[4])


def toggling_frames(seq):
    """Toggling-frame disorder operators ``C_k^dagger Z C_k`` for k = 0..d."""
    codes = getattr(seq, "codes", seq)
    C = np.eye(2, dtype=complex)
    frames = [SZ.copy()]
    for c in codes:
        C = IDEAL_UNITARIES[c] @ C
        frames.append(C.conj().T @ SZ @ C)
    return frames

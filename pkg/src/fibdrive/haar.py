"""Analytic Haar moment states, Haar-random unitaries, Monte-Carlo oracle.

The k-th Haar moment of pure states in dimension d is the normalized
projector onto the symmetric subspace of k replicas,

    rho_haar(d, k) = sum_{pi in S_k} P_pi / (d (d+1) ... (d+k-1)),

with P_pi permuting the replica factors.  Replica counts up to k = 5 are
supported; the permutation sum grows factorially beyond that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .bigmat import CMatrix, DOUBLE, eig_hermitian, half_trace_norm

MAX_REPLICAS = 5


@dataclass
class MomentState:
    """A k-replica moment: Hermitian, PSD, unit-trace matrix of side d^k."""

    d: int
    k: int
    matrix: CMatrix

    def __post_init__(self):
        side = self.d ** self.k
        if self.matrix.shape != (side, side):
            raise ValueError(f"moment matrix must have side {side}")

    @property
    def policy(self):
        return self.matrix.policy

    def validate(self, ulps=1000):
        """Check Hermiticity, unit trace and positivity within ulps."""
        tol = self.policy.eps * ulps
        if not self.matrix.is_hermitian(ulps=ulps):
            raise ValueError("moment state is not Hermitian")
        if abs(self.matrix.trace() - 1) > tol:
            raise ValueError("moment state trace differs from 1")
        evals = eig_hermitian(self.matrix, ulps=ulps)
        if evals[0] < -tol:
            raise ValueError("moment state has a negative eigenvalue")
        return self


def permutation_operator(d, k, pi):
    """Matrix permuting k replica factors of C^d: |a_1..a_k> -> replica order pi.

    Entry convention: row index (a_1,...,a_k), column index
    (a_{pi(1)},...,a_{pi(k)}) carries a 1.
    """
    side = d ** k
    out = np.zeros((side, side))
    # radix-d digits of the row index, most significant = replica 1
    for row in range(side):
        digits = []
        r = row
        for _ in range(k):
            digits.append(r % d)
            r //= d
        digits.reverse()
        col = 0
        for i in range(k):
            col = col * d + digits[pi[i]]
        out[row, col] = 1.0
    return out


def haar_moment_state(d, k, policy=DOUBLE):
    """Analytic k-th Haar moment state in dimension d."""
    if d < 2 or k < 1:
        raise ValueError("need d >= 2 and k >= 1")
    if k > MAX_REPLICAS:
        raise ValueError(f"replica count limited to {MAX_REPLICAS}")
    side = d ** k
    acc = np.zeros((side, side))
    for pi in permutations(range(k)):
        acc += permutation_operator(d, k, pi)
    norm = 1
    for j in range(k):
        norm *= d + j
    base = CMatrix.from_numpy(acc, policy)
    if policy.mode == "double":
        return MomentState(d=d, k=k, matrix=base.scale(1.0 / norm))
    from mpmath import mpf, workprec

    with workprec(policy.bits):
        inv = 1 / mpf(norm)  # exact rational at policy precision
    return MomentState(d=d, k=k, matrix=base.scale(inv))


def sample_haar_unitary(d, rng, policy=DOUBLE):
    """Haar-distributed element of SU(d).

    QR of a complex Ginibre matrix with the R-diagonal phase correction,
    then division by det^(1/d) to land in SU(d).  `rng` is a numpy
    Generator or a seed.  With a big-float policy the orthonormalization
    is redone in policy arithmetic so the result is unitary to policy
    precision (the distribution is still set by the double-precision
    Ginibre draw).
    """
    rng = np.random.default_rng(rng)
    g = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / math.sqrt(2)
    if policy.mode == "double":
        q, r = np.linalg.qr(g)
        ph = np.diag(r) / np.abs(np.diag(r))
        q = q * ph
        det = np.linalg.det(q)
        q = q * det ** (-1.0 / d)
        return CMatrix.from_numpy(q, policy)
    return _orthonormalize_su(CMatrix.from_numpy(g, policy))


def _orthonormalize_su(m):
    """Modified Gram-Schmidt + phase fixing + SU projection, in policy arithmetic."""
    from mpmath import mp, mpc, workprec

    pol = m.policy
    d = m.rows
    with workprec(pol.bits):
        cols = [[mpc(m.data[i, j]) for i in range(d)] for j in range(d)]
        for j in range(d):
            for i in range(j):
                # <col_i, col_j> with the first slot conjugated
                ip = mp.fdot(cols[j], cols[i], conjugate=True)
                cols[j] = [a - ip * b for a, b in zip(cols[j], cols[i])]
            nrm = mp.sqrt(mp.fdot(cols[j], cols[j], conjugate=True).real)
            cols[j] = [a / nrm for a in cols[j]]
        # det via LU-free expansion is fine at these sizes; use recursive minors
        arr = np.empty((d, d), dtype=object)
        for j, col in enumerate(cols):
            for i, v in enumerate(col):
                arr[i, j] = v
        det = _det_object(arr)
        # d-th root of the determinant's phase
        phase = mp.exp(mpc(0, mp.arg(det) / d))
        for j in range(d):
            cols[j] = [a / phase for a in cols[j]]
        out = np.empty((d, d), dtype=object)
        for j, col in enumerate(cols):
            for i, v in enumerate(col):
                out[i, j] = v
    return CMatrix(out, pol)


def _det_object(arr):
    """Determinant by elimination with partial pivoting (object dtype)."""
    a = arr.copy()
    n = a.shape[0]
    det = a[0, 0] * 0 + 1
    for c in range(n):
        piv = max(range(c, n), key=lambda r: abs(a[r, c]))
        if piv != c:
            a[[c, piv]] = a[[piv, c]]
            det = -det
        det = det * a[c, c]
        for r in range(c + 1, n):
            f = a[r, c] / a[c, c]
            a[r, c:] = a[r, c:] - f * a[c, c:]
    return det


def mc_haar_moment(d, k, n_samples, rng, policy=DOUBLE):
    """Monte-Carlo estimate of the k-th Haar moment.

    Averages (U |e0><e0| U^t)^(x k) over Haar samples; by unitary
    invariance the fixed reference state is as good as a random one.
    Haar columns applied to a fixed state are just normalized Gaussian
    vectors, which allows a fully vectorized sampler.
    """
    if n_samples < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(rng)
    batch = min(n_samples, 200_000 // max(d ** k, 1) + 1)
    side = d ** k
    acc = np.zeros((side, side), dtype=complex)
    left = n_samples
    while left > 0:
        n = min(batch, left)
        v = rng.normal(size=(n, d)) + 1j * rng.normal(size=(n, d))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        w = v
        for _ in range(k - 1):
            w = (w[:, :, None] * v[:, None, :]).reshape(n, -1)
        acc += w.T @ w.conj()
        left -= n
    mat = CMatrix.from_numpy(acc / n_samples, policy)
    return MomentState(d=d, k=k, matrix=mat)


def moment_trace_distance(a, b):
    """Half the trace norm of the difference of two moment states."""
    if (a.d, a.k) != (b.d, b.k):
        raise ValueError("moment states live on different replica spaces")
    return half_trace_norm(a.matrix - b.matrix)

"""No-go side: time-independent Hamiltonian evolution never reaches the
Haar moments.

For any Hamiltonian H and initial state psi, the infinite-time average of
the two-replica moment keeps a trace distance to the Haar moment of at
least

    B(d) = 1/(d+1) - sqrt(1 / (2 d (d+1))),

which is positive for every d >= 2.  The chain of inequalities behind the
bound (data processing under a two-replica dephasing channel, then a
simplex minimization) is reproduced here numerically, together with a
brute-force oracle for the simplex lemma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bigmat import CMatrix, eig_hermitian, trace_norm
from .haar import MomentState, haar_moment_state

DEGENERACY_RTOL = 1e-10  # energy sums equal within this fraction of ||H||


def bound_B(d):
    """Universal lower bound on the 2-replica stationary distance."""
    if d < 2:
        raise ValueError("dimension must be >= 2")
    return 1.0 / (d + 1) - math.sqrt(1.0 / (2 * d * (d + 1)))


@dataclass
class HamiltonianSpec:
    """Eigen-decomposed Hamiltonian with initial-state overlaps."""

    h: CMatrix
    energies: np.ndarray
    vectors: np.ndarray      # columns are eigenvectors
    overlaps: np.ndarray     # c_alpha = <alpha|psi>

    @classmethod
    def from_state(cls, h, psi):
        if isinstance(h, CMatrix):
            hm = h
        else:
            hm = CMatrix.from_numpy(np.asarray(h))
        evals, vecs = eig_hermitian(hm, want_vectors=True)
        vecs_np = vecs.data if hm.policy.mode == "double" else vecs.to_numpy()
        psi = np.asarray(psi, dtype=complex).reshape(-1)
        if abs(np.linalg.norm(psi) - 1) > 1e-10:
            raise ValueError("initial state must be normalized")
        c = vecs_np.conj().T @ psi
        return cls(h=hm, energies=np.asarray(evals, dtype=float),
                   vectors=vecs_np, overlaps=c)

    @property
    def d(self):
        return self.energies.size


def _energy_sum_groups(energies, rtol=DEGENERACY_RTOL):
    """Group ordered index pairs (a, b) by the value of E_a + E_b."""
    d = energies.size
    scale = max(np.abs(energies).max(), 1e-300)
    tol = rtol * scale
    pairs = [(energies[a] + energies[b], a, b) for a in range(d) for b in range(d)]
    pairs.sort(key=lambda x: x[0])
    groups = []
    current = [pairs[0]]
    for item in pairs[1:]:
        if item[0] - current[-1][0] <= tol:
            current.append(item)
        else:
            groups.append(current)
            current = [item]
    groups.append(current)
    return [[(a, b) for _, a, b in g] for g in groups]


def rho_inf_2(ham):
    """Infinite-time average of the 2-replica moment, in the eigenbasis.

    Index pairs with equal energy sums survive the averaging; everything
    else dephases away.  Energy sums are compared with a relative
    tolerance since floating spectra never collide exactly.
    """
    d = ham.d
    c = ham.overlaps
    out = np.zeros((d * d, d * d), dtype=complex)
    for group in _energy_sum_groups(ham.energies):
        vec = np.zeros(d * d, dtype=complex)
        for a, b in group:
            vec[a * d + b] = c[a] * c[b]
        out += np.outer(vec, vec.conj())
    return MomentState(d=d, k=2, matrix=CMatrix.from_numpy(out))


def dephase2(rho2, energies=None):
    """Two-replica dephasing channel in the (eigen)basis of the input.

    Keeps the diagonal in the |ab> basis and, for a != b, mirrors each
    |ab><ab| weight onto |ab><ba|.  Idempotent and trace preserving; the
    Haar moment is a fixed point.
    """
    if rho2.k != 2:
        raise ValueError("dephasing channel is defined on two replicas")
    d = rho2.d
    m = rho2.matrix.data
    out = np.zeros_like(np.asarray(m, dtype=complex))
    for a in range(d):
        for b in range(d):
            i = a * d + b
            w = complex(m[i, i])
            if a == b:
                out[i, i] += w
            else:
                out[i, i] += w
                out[i, b * d + a] += w
    return MomentState(d=d, k=2, matrix=CMatrix.from_numpy(out, rho2.matrix.policy))


def dephased_bound(ham):
    """(1/2) sum_ab | |c_a|^2 |c_b|^2 - (1 + delta_ab) / (d (d+1)) |."""
    d = ham.d
    p = np.abs(ham.overlaps) ** 2
    total = 0.0
    for a in range(d):
        for b in range(d):
            target = (2.0 if a == b else 1.0) / (d * (d + 1))
            total += abs(p[a] * p[b] - target)
    return total / 2


def diagonal_bound(ham):
    """(1/2) sum_a | |c_a|^4 - 2 / (d (d+1)) |, the diagonal-only relaxation."""
    d = ham.d
    p = np.abs(ham.overlaps) ** 2
    return 0.5 * float(np.abs(p ** 2 - 2.0 / (d * (d + 1))).sum())


@dataclass
class NoGoCertificate:
    delta2: float
    dephased: float
    diagonal: float
    bound: float

    def chain_holds(self, tol=1e-12):
        return (self.delta2 >= self.dephased - tol
                and self.dephased >= self.diagonal - tol
                and self.diagonal >= self.bound - tol)


def delta2_time_independent(ham):
    """Stationary 2-replica distance with its certificate chain.

    Returns a NoGoCertificate carrying (Delta, dephased bound, diagonal
    bound, B(d)); a broken chain signals a bug, not physics, so it raises.
    """
    d = ham.d
    rho = rho_inf_2(ham)
    haar_ref = haar_moment_state(d, 2)
    delta = float(trace_norm(rho.matrix - haar_ref.matrix)) / 2
    cert = NoGoCertificate(delta2=delta, dephased=float(dephased_bound(ham)),
                           diagonal=float(diagonal_bound(ham)), bound=bound_B(d))
    if not cert.chain_holds():
        raise AssertionError(f"no-go inequality chain broken: {cert}")
    return cert


# ---------------------------------------------------------------------------
# simplex lemma oracle
# ---------------------------------------------------------------------------


def lemma_F(a, xi):
    """F(a) = sum_n |a_n^2 - xi^2| on the probability simplex."""
    a = np.asarray(a, dtype=float)
    if (a < -1e-12).any() or abs(a.sum() - 1) > 1e-9:
        raise ValueError("argument must lie on the probability simplex")
    return float(np.abs(a ** 2 - xi ** 2).sum())


def lemma_F_floor(d, xi):
    """The closed-form floor xi^2 (d - 1/xi)."""
    return xi * xi * (d - 1.0 / xi)


def lemma_F_minimizing_family(d, xi):
    """F on the candidate minimizer: M = floor(1/xi) entries at xi, one remainder."""
    m = int(math.floor(1.0 / xi))
    rest = 1.0 - m * xi
    return xi * xi * (d - m) - rest * rest


def brute_min_F(d, xi, grid_step):
    """Minimum of F over the simplex grid with spacing grid_step.

    Exhaustive enumeration of sorted grid compositions (F is symmetric in
    its arguments), vectorized over the innermost coordinate.
    """
    if d not in (2, 3, 4):
        raise ValueError("oracle supports d in {2, 3, 4}")
    n = int(round(1.0 / grid_step))
    xi2 = xi * xi

    def f_of_counts(*cols):
        # cols are integer grid counts summing to n
        total = None
        for c in cols:
            term = np.abs((np.asarray(c, dtype=float) / n) ** 2 - xi2)
            total = term if total is None else total + term
        return total

    best = math.inf
    if d == 2:
        a1 = np.arange(0, n // 2 + 1)
        best = float(f_of_counts(a1, n - a1).min())
    elif d == 3:
        for a1 in range(0, n // 3 + 1):
            a2 = np.arange(a1, (n - a1) // 2 + 1)
            vals = f_of_counts(np.full_like(a2, a1), a2, n - a1 - a2)
            best = min(best, float(vals.min()))
    else:
        for a1 in range(0, n // 4 + 1):
            for a2 in range(a1, (n - a1) // 3 + 1):
                a3 = np.arange(a2, (n - a1 - a2) // 2 + 1)
                vals = f_of_counts(np.full_like(a3, a1), np.full_like(a3, a2),
                                   a3, n - a1 - a2 - a3)
                best = min(best, float(vals.min()))
    return best


# ---------------------------------------------------------------------------
# instance sweeps
# ---------------------------------------------------------------------------


def random_instance(d, rng):
    """A GUE Hamiltonian and a Haar-ish random state."""
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    h = (g + g.conj().T) / 2
    psi = rng.normal(size=d) + 1j * rng.normal(size=d)
    psi /= np.linalg.norm(psi)
    return HamiltonianSpec.from_state(h, psi)


def bound_check_sweep(d, n_instances, seed):
    """Certificates for random (H, psi) instances; margin = Delta - B(d)."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n_instances):
        out.append(delta2_time_independent(random_instance(d, rng)))
    return out

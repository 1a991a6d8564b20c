"""Spin-chain drives, windowed moment accumulation, projected ensembles.

The chain gates come from two mutually dual Ising-type Hamiltonians on L
sites (open boundary, a weak edge field on the last site):

    H0 = sum_j X_j + sum_{j>=2} X_{j-1} X_j + c_edge X_L
    H1 = sum_j Z_j + sum_{j>=2} Z_{j-1} Z_j + c_edge Z_L

H1 is diagonal in the computational basis and H0 is its conjugate under a
Hadamard on every site, so both gates apply exactly (no splitting error)
as a diagonal phase, optionally sandwiched between fast Walsh-Hadamard
transforms.  This is the matrix-free path used for state evolution at any
L; dense gates are materialized only at small L where contracts need
explicit matrices.

Full-system distances to the Haar moment use the overlap-Gram spectrum:
the nonzero eigenvalues of the rank-T moment average equal those of the
T x T matrix of k-th powers of state overlaps, and the Haar moment is
1/D_sym on the k-replica symmetric subspace (dimension D_sym =
C(d+k-1, k)) where all the temporal states live.  This evaluates the
exact trace distance without ever forming a d^k-sided matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bigmat import CMatrix, DOUBLE, trace_norm
from .drive import DriveSpec, u_gen_fib_table
from .haar import MomentState, haar_moment_state
from .words import zeckendorf

DENSE_GATE_MAX_SITES = 12
DENSE_MOMENT_MAX_SIDE = 4096
GRAM_MAX_REPLICA_QUBITS = 16  # L*k cap for full-system distances
PROJECTED_CUTOFF = 1e-14


class BudgetExceeded(ValueError):
    """A requested size is beyond what this package supports in memory."""


@dataclass(frozen=True)
class ChainSpec:
    """Spin-1/2 chain of length L driven by the order-m word with kick
    duration tau and edge-field coefficient edge."""

    L: int
    tau: float = 1.0
    edge: float = 0.1
    m: int = 1

    def __post_init__(self):
        if self.L < 2:
            raise ValueError("chain needs at least two sites")

    @property
    def dim(self):
        return 2 ** self.L


def _site_z_values(L):
    """z_j = +/-1 per site for every basis index; shape (L, 2^L)."""
    idx = np.arange(2 ** L)
    return np.stack([1 - 2 * ((idx >> (L - j)) & 1) for j in range(1, L + 1)])


def diagonal_field_values(spec):
    """Diagonal of H1 (and of H0 in the Hadamard frame), length 2^L."""
    z = _site_z_values(spec.L)
    vals = z.sum(axis=0) + (z[:-1] * z[1:]).sum(axis=0) + spec.edge * z[-1]
    return vals.astype(float)


def hadamard_transform(psi):
    """Orthonormal Walsh-Hadamard transform on the last axis."""
    a = np.array(psi, dtype=complex)
    n = a.shape[-1]
    h = 1
    while h < n:
        a = a.reshape(-1, n // (2 * h), 2, h)
        top = a[..., 0, :] + a[..., 1, :]
        bot = a[..., 0, :] - a[..., 1, :]
        a = np.stack([top, bot], axis=-2)
        h *= 2
    return a.reshape(psi.shape) / math.sqrt(n)


class ChainEvolver:
    """Matrix-free application of the chain gates to state vectors."""

    def __init__(self, spec):
        self.spec = spec
        diag = diagonal_field_values(spec)
        self.phases = np.exp(-1j * spec.tau * diag)

    def apply_a1(self, psi):
        return self.phases * psi

    def apply_a0(self, psi):
        return hadamard_transform(self.phases * hadamard_transform(psi))

    def apply(self, symbol, psi):
        return self.apply_a0(psi) if symbol in (0, "0") else self.apply_a1(psi)


def chain_hamiltonians(spec, policy=DOUBLE):
    """(H0, H1) as dense Hermitian matrices; limited to small chains."""
    if spec.L > DENSE_GATE_MAX_SITES:
        raise BudgetExceeded(f"dense Hamiltonians limited to L <= {DENSE_GATE_MAX_SITES}")
    diag = diagonal_field_values(spec)
    h1 = np.diag(diag.astype(complex))
    w = _walsh_matrix(spec.L)
    h0 = w @ h1 @ w
    return (CMatrix.from_numpy(h0, policy), CMatrix.from_numpy(h1, policy))


def _walsh_matrix(L):
    h = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2)
    w = np.array([[1.0]])
    for _ in range(L):
        w = np.kron(w, h)
    return w


def chain_gates(spec, policy=DOUBLE):
    """(A0, A1) = (exp(-i tau H0), exp(-i tau H1)), dense, exact.

    H1 is diagonal and H0 is Hadamard-dual to it, so the exponentials come
    out as exact phase diagonals (no eigen-iteration involved).
    """
    if spec.L > DENSE_GATE_MAX_SITES:
        raise BudgetExceeded(f"dense gates limited to L <= {DENSE_GATE_MAX_SITES}")
    diag = diagonal_field_values(spec)
    a1 = np.diag(np.exp(-1j * spec.tau * diag))
    w = _walsh_matrix(spec.L)
    a0 = w @ a1 @ w
    return (CMatrix.from_numpy(a0, policy), CMatrix.from_numpy(a1, policy))


def chain_drive(spec, policy=DOUBLE):
    """DriveSpec wrapping the dense chain gates (small L)."""
    a0, a1 = chain_gates(spec, policy)
    return DriveSpec(m=spec.m, d=spec.dim, a0=a0, a1=a1)


# ---------------------------------------------------------------------------
# state evolution
# ---------------------------------------------------------------------------


def evolve_chain_states(spec, psi0, t_max, word=None):
    """States at t = 0 .. t_max-1, stepping gate by gate; shape (t_max, 2^L)."""
    from .words import fib_word_concat

    ev = ChainEvolver(spec)
    psi = np.asarray(psi0, dtype=complex).reshape(-1)
    if psi.shape[0] != spec.dim:
        raise ValueError("initial state must have dimension 2^L")
    psi = psi / np.linalg.norm(psi)
    symbols = word if word is not None else (
        fib_word_concat(spec.m, max(1, t_max - 1)).symbols if t_max > 1 else "")
    out = np.empty((t_max, spec.dim), dtype=complex)
    out[0] = psi
    for t in range(1, t_max):
        psi = ev.apply(symbols[t - 1], psi)
        out[t] = psi
    return out


def fast_forward_state(spec, psi0, T, table=None):
    """psi(T) by the Zeckendorf splitting: apply Fibonacci-time blocks.

    Blocks are dense recurrence operators (small L); the largest block
    acts first, and each application is a matrix-vector product.
    """
    if spec.m != 1:
        raise ValueError("fast forward requires the order-1 word")
    psi = np.asarray(psi0, dtype=complex).reshape(-1)
    if T == 0:
        return psi.copy()
    idx = zeckendorf(T)
    if table is None:
        table = chain_operator_table(spec, max(idx) - 1)
    out = psi
    for c in idx:  # descending indices: largest Fibonacci block first
        out = table[c - 1] @ out
    return out


def chain_operator_table(spec, n):
    """[U(S_0) .. U(S_n)] for the chain, as plain numpy arrays."""
    drv = chain_drive(spec)
    return [u.data for u in u_gen_fib_table(drv, n)]


def windowed_chain_states(spec, psi0, windows, table=None):
    """Same trajectory as evolve_chain_states, built window by window.

    windows is a sorted disjoint list of [start, end) pairs covering
    [0, T); each window restarts from a Zeckendorf fast-forwarded state
    and then steps gate by gate, which is what makes the windows
    independent work items.
    """
    from .words import fib_word_concat

    _validate_windows(windows)
    t_total = windows[-1][1]
    ev = ChainEvolver(spec)
    psi0 = np.asarray(psi0, dtype=complex).reshape(-1)
    psi0 = psi0 / np.linalg.norm(psi0)
    symbols = fib_word_concat(spec.m, max(1, t_total - 1)).symbols if t_total > 1 else ""
    if table is None and len(windows) > 1:
        idx_max = max(max(zeckendorf(s)) for s, _ in windows[1:])
        table = chain_operator_table(spec, idx_max - 1)
    out = np.empty((t_total, spec.dim), dtype=complex)
    for start, end in windows:
        psi = psi0.copy() if start == 0 else fast_forward_state(
            spec, psi0, start, table=table)
        out[start] = psi
        for t in range(start + 1, end):
            psi = ev.apply(symbols[t - 1], psi)
            out[t] = psi
    return out


def _validate_windows(windows):
    if not windows:
        raise ValueError("need at least one window")
    if windows[0][0] != 0:
        raise ValueError("windows must start at t = 0")
    for (s0, e0), (s1, e1) in zip(windows, windows[1:]):
        if e0 != s1:
            raise ValueError("windows must be disjoint, sorted and contiguous")
    for s, e in windows:
        if e <= s:
            raise ValueError("windows must be nonempty")


def log_spaced_windows(t_total, per_decade=20):
    """[start, end) pairs with boundaries log-spaced in time."""
    bounds = {1}
    decades = math.log10(max(t_total, 2))
    n_marks = max(2, int(per_decade * decades))
    for i in range(n_marks + 1):
        bounds.add(int(round(10 ** (i / n_marks * decades))))
    marks = sorted(b for b in bounds if 1 <= b < t_total)
    edges = [0] + marks + [t_total]
    return [(a, b) for a, b in zip(edges, edges[1:]) if b > a]


# ---------------------------------------------------------------------------
# full-system distances
# ---------------------------------------------------------------------------


def sym_subspace_dim(d, k):
    return math.comb(d + k - 1, k)


def gram_delta(states, k, T=None):
    """Exact Delta^(k)(T) from state overlaps.

    states holds the trajectory row-wise; the moment average over the
    first T rows has the same nonzero spectrum as the T x T Gram matrix
    of overlap k-th powers divided by T, and differs from the Haar moment
    (1/D_sym on the symmetric subspace) only there.
    """
    d = states.shape[1]
    if T is None:
        T = states.shape[0]
    dsym = sym_subspace_dim(d, k)
    sub = states[:T]
    gram = sub.conj() @ sub.T
    kmat = gram ** k if k > 1 else gram
    evals = np.linalg.eigvalsh(kmat) / T
    take = min(T, dsym)
    top = evals[-take:]
    delta = np.abs(top - 1.0 / dsym).sum() + max(dsym - T, 0) / dsym
    return 0.5 * float(delta)


def gram_delta_series(states, k, times):
    """Delta^(k)(T) for each T in `times` from one trajectory."""
    if states.shape[1] ** k > 2 ** GRAM_MAX_REPLICA_QUBITS:
        raise BudgetExceeded("replica space too large for full-system distances")
    return [gram_delta(states, k, T) for T in times]


def moment_from_states(states, k, policy=DOUBLE):
    """Dense k-replica moment average of a trajectory (small d^k only)."""
    d = states.shape[1]
    side = d ** k
    if side > DENSE_MOMENT_MAX_SIDE:
        raise BudgetExceeded(f"dense moment side {side} exceeds budget")
    reps = _replicate_rows(states, k)
    acc = reps.conj().T @ reps / states.shape[0]
    return MomentState(d=d, k=k, matrix=CMatrix.from_numpy(acc, policy))


def _replicate_rows(states, k):
    out = states
    for _ in range(k - 1):
        out = (out[:, :, None] * states[:, None, :]).reshape(states.shape[0], -1)
    return out


@dataclass
class WindowMoments:
    """Per-window dense moments plus cumulative distances at window ends."""

    windows: list
    moments: list            # MomentState per window, or None above budget
    cumulative_times: list   # window end times
    cumulative_deltas: list  # Delta^(k) over [0, end)


def windowed_moment_series(spec, k, psi0, windows):
    """Accumulate k-replica moments window by window.

    Each window starts from a fast-forwarded state and steps gate by
    gate.  Dense per-window moments are returned when d^k is within the
    dense budget; cumulative distances always come from the Gram spectrum,
    so they are available for replica spaces up to 2^16.
    """
    if spec.dim ** k > 2 ** GRAM_MAX_REPLICA_QUBITS:
        raise BudgetExceeded("replica space exceeds the supported budget")
    states = windowed_chain_states(spec, psi0, windows)
    moments = []
    dense_ok = spec.dim ** k <= DENSE_MOMENT_MAX_SIDE
    for start, end in windows:
        moments.append(moment_from_states(states[start:end], k) if dense_ok else None)
    ends = [end for _, end in windows]
    deltas = gram_delta_series(states, k, ends)
    return WindowMoments(windows=list(windows), moments=moments,
                         cumulative_times=ends, cumulative_deltas=deltas)


# ---------------------------------------------------------------------------
# projected ensembles
# ---------------------------------------------------------------------------


@dataclass
class ProjectedEnsemble:
    """Post-measurement pure states on subsystem A with their weights."""

    probs: np.ndarray
    states: np.ndarray  # shape (n_outcomes, d_a)
    d_a: int
    d_b: int
    leakage: float      # total weight dropped below the probability cutoff


def projected_ensemble(psi, n_a, cutoff=PROJECTED_CUTOFF):
    """Measure the last L - n_a sites in the computational basis.

    Subsystem A is the first n_a sites (most significant qubits).  Near-null
    outcomes below `cutoff` are dropped and reported as leakage instead of
    being normalized into garbage.
    """
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    dim = psi.shape[0]
    d_a = 2 ** n_a
    if dim % d_a or d_a > dim:
        raise ValueError("subsystem dimension must divide the state dimension")
    d_b = dim // d_a  # d_b = 1 degenerates to the single-outcome ensemble
    m = psi.reshape(d_a, d_b)
    probs = (np.abs(m) ** 2).sum(axis=0)
    kept = np.flatnonzero(probs >= cutoff)
    leak = float(probs[probs < cutoff].sum())
    states = (m[:, kept] / np.sqrt(probs[kept])).T
    return ProjectedEnsemble(probs=probs[kept], states=states,
                             d_a=d_a, d_b=d_b, leakage=leak)


def projected_moment(ens, k, policy=DOUBLE):
    """k-th moment of the projected ensemble, as a MomentState on A."""
    side = ens.d_a ** k
    if side > DENSE_MOMENT_MAX_SIDE:
        raise BudgetExceeded("projected replica space exceeds the dense budget")
    if k == 1:
        acc = (ens.states.T * ens.probs) @ ens.states.conj()
    else:
        reps = _replicate_rows(ens.states, k)
        acc = (reps.T * ens.probs) @ reps.conj()
    return MomentState(d=ens.d_a, k=k, matrix=CMatrix.from_numpy(acc, policy))


def delta_E(moment, haar_ref=None):
    """Trace distance of a projected moment to the Haar moment on A."""
    if haar_ref is None:
        haar_ref = haar_moment_state(moment.d, moment.k, moment.matrix.policy)
    return float(trace_norm(moment.matrix - haar_ref.matrix)) / 2


def deep_therm_series(spec, n_a, k, psi0, t_max):
    """Delta_E(t) for t = 0 .. t_max-1 along one chain trajectory."""
    states = evolve_chain_states(spec, psi0, t_max)
    ref = haar_moment_state(2 ** n_a, k)
    deltas, leaks = [], []
    for t in range(t_max):
        ens = projected_ensemble(states[t], n_a)
        deltas.append(delta_E(projected_moment(ens, k), ref))
        leaks.append(ens.leakage)
    return deltas, leaks


def random_product_state(L, rng):
    """|phi>^{(x) L} with a Haar-random qubit state phi."""
    rng = np.random.default_rng(rng)
    phi = rng.normal(size=2) + 1j * rng.normal(size=2)
    phi /= np.linalg.norm(phi)
    psi = phi
    for _ in range(L - 1):
        psi = np.kron(psi, phi)
    return psi


def haar_projected_reference(d_a, d_b, k, n_samples, seed):
    """Monte-Carlo mean Delta_E over Haar-random global states."""
    rng = np.random.default_rng(seed)
    ref = haar_moment_state(d_a, k)
    n_a = int(round(math.log2(d_a)))
    total = 0.0
    for _ in range(n_samples):
        psi = rng.normal(size=d_a * d_b) + 1j * rng.normal(size=d_a * d_b)
        psi /= np.linalg.norm(psi)
        ens = projected_ensemble(psi, n_a)
        total += delta_E(projected_moment(ens, k), ref)
    return total / n_samples


def exp_fit(times, values, window=None):
    """Least squares of log(value) against time; returns the decay rate.

    `window` selects indices (lo, hi) inclusive; values must be positive
    there.  The rate is minus the fitted slope.
    """
    from .sweep import _line_fit

    n = len(times)
    if window is None:
        window = (0, n - 1)
    lo, hi = window
    if hi - lo + 1 < 4:
        raise ValueError("exponential fit needs at least 4 points")
    ts = [float(t) for t in times[lo:hi + 1]]
    vs = values[lo:hi + 1]
    if any(v <= 0 for v in vs):
        raise ValueError("exponential fit needs positive values")
    slope, intercept, rms, stderr = _line_fit(ts, [math.log(v) for v in vs])
    return -slope

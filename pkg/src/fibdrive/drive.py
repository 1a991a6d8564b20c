"""Fibonacci-drive evolution operators, time-averaging channels, decays.

The evolution operator at integer time t is the ordered product
U(t) = A_{w_t} ... A_{w_1} over the order-m word symbols.  At the
recurrence times S_n (S_0 = S_1 = 1, S_n = m S_{n-1} + S_{n-2}) both the
operator and the time-averaging channel satisfy recursions that reduce
the cost from O(S_n) to O(n) matrix products:

    U(S_1) = A0,  U(S_2) = A1 A0^m,  U(S_{n+1}) = U(S_{n-1}) U(S_n)^m

    N_{S_{n+1}} = sum_{y=0..m} (S_{n-d_ym} / S_{n+1}) N_{S_{n-d_ym}} o U(S_n)^y

with d_ym the Kronecker delta and the unitary channel acting first in
the composition (matrix form: mat(N) mat(U)^y).

Channels are stored as matrices acting on column-stacked vectorizations,
so the unitary channel rho -> M rho M^H has matrix conj(M) (x) M.

Numerical honesty is tracked by an error ledger: at every reported time
the unitarity defect eps_n = ||1 - U(S_n) U(S_n)^H||_inf must stay below
1e-3 of the reported trace distance, otherwise the run escalates to a
higher-precision restart (or fails with LedgerViolation).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import words
from .bigmat import (
    CMatrix,
    DOUBLE,
    PrecisionPolicy,
    bigfloat,
    half_trace_norm,
    kron,
    operator_norm,
    tensor_power,
    unvec,
    vec,
)
from .haar import MomentState, haar_moment_state

LEDGER_MARGIN = 1e-3  # eps_n must stay below this fraction of delta


class LedgerViolation(ArithmeticError):
    """Unitarity drift too large for the trace distances being reported."""


@dataclass(frozen=True)
class SymbolSequence:
    """A plain drive program: binary symbols with a provenance tag."""

    symbols: str
    origin: str = "custom"


def _symbols_of(source, length):
    """First `length` symbols of a word-like object or string."""
    s = source.symbols if hasattr(source, "symbols") else str(source)
    if len(s) < length:
        raise ValueError(f"symbol source provides {len(s)} < {length} symbols")
    return s[:length]


@dataclass(frozen=True)
class DriveSpec:
    """Order-m drive on dimension d with gate pair (a0, a1).

    gate_builder, when provided, rebuilds the same mathematical gates at an
    arbitrary precision policy; this is what makes precision escalation
    meaningful (converting finite-precision entries cannot reduce the
    unitarity defect already baked into them).
    """

    m: int
    d: int
    a0: CMatrix
    a1: CMatrix
    theta0: float = 0.0
    gate_builder: object = None

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("word order m must be >= 1")
        if self.a0.policy != self.a1.policy:
            raise ValueError("gate pair must share one precision policy")
        if self.a0.shape != (self.d, self.d) or self.a1.shape != (self.d, self.d):
            raise ValueError("gates must be d x d")

    @property
    def policy(self):
        return self.a0.policy

    @classmethod
    def from_builder(cls, m, d, gate_builder, policy=DOUBLE, theta0=0.0):
        a0, a1 = gate_builder(policy)
        return cls(m=m, d=d, a0=a0, a1=a1, theta0=theta0, gate_builder=gate_builder)

    def with_policy(self, policy):
        """The same drive at another precision policy."""
        if policy == self.policy:
            return self
        if self.gate_builder is not None:
            a0, a1 = self.gate_builder(policy)
        else:
            a0, a1 = self.a0.to_policy(policy), self.a1.to_policy(policy)
        return DriveSpec(m=self.m, d=self.d, a0=a0, a1=a1,
                         theta0=self.theta0, gate_builder=self.gate_builder)

    def word(self, length):
        """First `length` symbols of this drive's word."""
        if self.theta0 == 0.0:
            return words.fib_word_concat(self.m, length).symbols
        return words.code_rotation(self.m, self.theta0, length).symbols

    def gate(self, symbol):
        return self.a0 if symbol in (0, "0") else self.a1


@dataclass
class LedgerRow:
    n: int
    t: int
    epsilon: float
    delta: object
    bits: int


@dataclass
class ErrorLedger:
    """Per-step unitarity drift against the trace distances reported."""

    rows: list = field(default_factory=list)

    def record(self, n, t, epsilon, delta, bits):
        self.rows.append(LedgerRow(n=n, t=t, epsilon=float(epsilon),
                                   delta=delta, bits=bits))

    def check(self, margin=LEDGER_MARGIN):
        for row in self.rows:
            if row.delta is not None and row.epsilon > margin * float(row.delta):
                raise LedgerViolation(
                    f"step {row.n}: eps={row.epsilon:.3e} exceeds "
                    f"{margin:g} * delta={float(row.delta):.3e} at {row.bits} bits")
        return self

    def is_green(self, margin=LEDGER_MARGIN):
        try:
            self.check(margin)
        except LedgerViolation:
            return False
        return True


@dataclass
class AvgChannelMat:
    """Matrix of the averaging channel (1/T) sum_t U(t)-conjugation, side d^2k."""

    k: int
    d: int
    T: int
    matrix: CMatrix


@dataclass
class DecaySeries:
    """Trace distances at the drive's recurrence times."""

    times: list
    deltas: list
    epsilons: list
    bits: list
    k: int = 0
    d: int = 0

    def __len__(self):
        return len(self.times)


def unitarity_defect(u):
    """||1 - U U^H||_inf, the per-operator precision figure."""
    eye = CMatrix.identity(u.rows, u.policy)
    return operator_norm(eye - u @ u.H)


def channel_matrix(u, k):
    """Matrix of rho -> (U rho U^H) on k replicas, column-stacked convention."""
    uk = tensor_power(u, k) if k > 1 else u
    return kron(uk.conj(), uk)


def u_direct(spec, t, symbols=None):
    """Ordered gate product over the first t word symbols."""
    if t < 0:
        raise ValueError("time must be nonnegative")
    u = CMatrix.identity(spec.d, spec.policy)
    if t == 0:
        return u
    seq = _symbols_of(symbols, t) if symbols is not None else spec.word(t)
    for ch in seq:
        u = spec.gate(ch) @ u
    return u


def _require_standard_word(spec, op_name):
    if spec.theta0 != 0.0:
        raise ValueError(
            f"{op_name} relies on the recurrence structure of the standard "
            "word and requires theta0 = 0")


def u_gen_fib_table(spec, n):
    """[U(S_0), U(S_1), ..., U(S_n)] by the operator recursion."""
    _require_standard_word(spec, "u_gen_fib")
    if n < 1:
        raise ValueError("recursion index must be >= 1")
    table = [spec.a0, spec.a0]  # S_0 = S_1 = 1, so both entries are U(1) = A0
    if n >= 2:
        a0m = _matrix_power(spec.a0, spec.m)
        table.append(spec.a1 @ a0m)
    for j in range(3, n + 1):
        table.append(table[j - 2] @ _matrix_power(table[j - 1], spec.m))
    return table


def u_gen_fib(spec, n):
    """U(S_n) via the recursion; O(n log m) matrix products."""
    return u_gen_fib_table(spec, n)[n]


def _matrix_power(a, m):
    if m == 1:
        return a
    out = a
    for _ in range(m - 1):
        out = out @ a
    return out


def u_zeckendorf(spec, T):
    """U(T) for m = 1 from the Zeckendorf splitting of T.

    T decomposes into nonconsecutive Fibonacci numbers F_{c_1} > ... >
    F_{c_J}; the factors U(F_{c_i}) = U(S_{c_i - 1}) multiply with the
    largest Fibonacci block applied first (rightmost).
    """
    if spec.m != 1:
        raise ValueError("Zeckendorf splitting applies to the order-1 drive only")
    _require_standard_word(spec, "u_zeckendorf")
    if T < 0:
        raise ValueError("time must be nonnegative")
    if T == 0:
        return CMatrix.identity(spec.d, spec.policy)
    idx = words.zeckendorf(T)  # descending c_1 > c_2 > ...
    table = u_gen_fib_table(spec, max(idx) - 1)
    u = None
    for c in idx:  # descending = application order
        block = table[c - 1]
        u = block if u is None else block @ u
    return u


def avg_channel_direct(spec, k, T, symbols=None):
    """(1/T) sum_{t=0}^{T-1} channel_matrix(U(t), k), by direct summation."""
    if T < 1:
        raise ValueError("T must be >= 1")
    side = spec.d ** (2 * k)
    seq = _symbols_of(symbols, T - 1) if symbols is not None else (
        spec.word(T - 1) if T > 1 else "")
    if spec.policy.mode == "double":
        u = np.eye(spec.d, dtype=complex)
        a = {"0": spec.a0.data, "1": spec.a1.data}
        chunk = max(1, min(T, 40_000_000 // (side * side)))
        partials = []
        mats = np.empty((chunk, side, side), dtype=complex)
        fill = 0
        for t in range(T):
            if t > 0:
                u = a[seq[t - 1]] @ u
            uk = u
            for _ in range(k - 1):
                uk = np.kron(uk, u)
            mats[fill] = np.kron(uk.conj(), uk)
            fill += 1
            if fill == chunk:
                partials.append(mats[:fill].sum(axis=0))
                fill = 0
        if fill:
            partials.append(mats[:fill].sum(axis=0))
        avg = np.sum(partials, axis=0) / T
        return AvgChannelMat(k=k, d=spec.d, T=T,
                             matrix=CMatrix.from_numpy(avg, spec.policy))
    # big-float path: straightforward accumulation (oracle-scale T only)
    acc = channel_matrix(CMatrix.identity(spec.d, spec.policy), k)
    u = CMatrix.identity(spec.d, spec.policy)
    for t in range(1, T):
        u = spec.gate(seq[t - 1]) @ u
        acc = acc + channel_matrix(u, k)
    return AvgChannelMat(k=k, d=spec.d, T=T,
                         matrix=acc.scale(_fraction(spec.policy, 1, T)))


def _fraction(policy, num, den):
    if policy.mode == "double":
        return num / den
    from mpmath import mpf, workprec

    with workprec(policy.bits):
        return mpf(num) / mpf(den)


def avg_channel_recursive(spec, k, n, ledger=None, psi0=None, margin=LEDGER_MARGIN):
    """Averaging-channel matrix at T = S_n via the channel recursion.

    Records the unitarity defect eps_j per step into `ledger`; when `psi0`
    is supplied the trace distance to the Haar moment is tracked alongside
    and the run aborts with LedgerViolation as soon as eps_j exceeds
    `margin` times the current distance.
    """
    _require_standard_word(spec, "avg_channel_recursive")
    if n < 1:
        raise ValueError("recursion index must be >= 1")
    out = None
    for state in _recursive_channel_steps(spec, k, n, ledger=ledger,
                                          psi0=psi0, margin=margin):
        out = state
    j, channel, _, _ = out
    assert j == n
    return channel


def _recursive_channel_steps(spec, k, n_max, ledger=None, psi0=None,
                             margin=LEDGER_MARGIN):
    """Drive the coupled operator/channel recursion, yielding per-step state.

    Yields (n, AvgChannelMat at S_n, epsilon_n, delta_n) for n = 1..n_max;
    delta_n is None when no probe state was given.
    """
    seq = words.gen_fib_numbers(spec.m, max(n_max + 1, 2))
    eye_ch = channel_matrix(CMatrix.identity(spec.d, spec.policy), k)
    haar_ref = haar_moment_state(spec.d, k, spec.policy) if psi0 is not None else None
    rho_vec = _replicated_vec(psi0, spec, k) if psi0 is not None else None
    bits = spec.policy.bits

    def emit(j, mat_n, u_n):
        eps = unitarity_defect(u_n)
        delta = None
        if rho_vec is not None:
            moment = unvec(mat_n @ rho_vec, spec.d ** k)
            delta = half_trace_norm(moment - haar_ref.matrix)
        if ledger is not None:
            ledger.record(j, seq[j], eps, delta, bits)
        if delta is not None and float(eps) > margin * float(delta):
            raise LedgerViolation(
                f"step {j}: eps={float(eps):.3e} > {margin:g}*delta="
                f"{margin * float(delta):.3e} at {bits} bits")
        return AvgChannelMat(k=k, d=spec.d, T=seq[j], matrix=mat_n), eps, delta

    u_prev = spec.a0                       # U(S_1)
    n_prev = eye_ch                        # N at S_1
    n_prev_prev = eye_ch                   # N at S_0
    channel, eps, delta = emit(1, n_prev, u_prev)
    yield 1, channel, eps, delta
    if n_max == 1:
        return
    u_prev_prev = spec.a0                  # placeholder; U(S_1) pairs with S_0 below
    for j in range(2, n_max + 1):
        # advance the channel using U(S_{j-1}) and the lengths S_*
        mat_u = channel_matrix(u_prev, k)
        acc = None
        pow_u = None
        for y in range(spec.m + 1):
            base = n_prev if y < spec.m else n_prev_prev
            weight = _fraction(spec.policy,
                               seq[j - 1] if y < spec.m else seq[j - 2], seq[j])
            term = base if pow_u is None else base @ pow_u
            term = term.scale(weight)
            acc = term if acc is None else acc + term
            if y < spec.m:
                pow_u = mat_u if pow_u is None else pow_u @ mat_u
        # advance the operator: U(S_2) = A1 A0^m, then the two-term recursion
        if j == 2:
            u_next = spec.a1 @ _matrix_power(spec.a0, spec.m)
        else:
            u_next = u_prev_prev @ _matrix_power(u_prev, spec.m)
        u_prev_prev, u_prev = u_prev, u_next
        n_prev_prev, n_prev = n_prev, acc
        channel, eps, delta = emit(j, n_prev, u_prev)
        yield j, channel, eps, delta


def _pure_density(psi0, d, policy):
    """|psi><psi| at the policy, renormalized in policy arithmetic."""
    psi = np.asarray(psi0, dtype=complex).reshape(-1)
    if psi.shape[0] != d:
        raise ValueError("initial state dimension mismatch")
    if abs(np.linalg.norm(psi) - 1) > 1e-12:
        raise ValueError("initial state must be normalized")
    if policy.mode == "double":
        rho = np.outer(psi, psi.conj())
        return CMatrix.from_numpy(rho / np.trace(rho).real, policy)
    from mpmath import mp, mpc, workprec

    with workprec(policy.bits):
        comps = [mpc(z.real, z.imag) for z in psi]
        nrm2 = mp.fdot(comps, comps, conjugate=True).real
        arr = np.empty((d, d), dtype=object)
        for i in range(d):
            for j in range(d):
                arr[i, j] = comps[i] * comps[j].conjugate() / nrm2
    return CMatrix(arr, policy)


def _replicated_vec(psi0, spec, k):
    """vec((|psi0><psi0|)^{(x) k}) at the spec's policy."""
    rho_m = _pure_density(psi0, spec.d, spec.policy)
    return vec(tensor_power(rho_m, k) if k > 1 else rho_m)


def temporal_moment(channel, psi0):
    """Apply an averaging channel to a replicated pure initial state."""
    rho = _pure_density(psi0, channel.d, channel.matrix.policy)
    rk = tensor_power(rho, channel.k) if channel.k > 1 else rho
    out = unvec(channel.matrix @ vec(rk), channel.d ** channel.k)
    return MomentState(d=channel.d, k=channel.k, matrix=out)


def delta_k(moment, haar_ref=None):
    """Trace distance of a moment state to the Haar moment, in [0, 1]."""
    if haar_ref is None:
        haar_ref = haar_moment_state(moment.d, moment.k, moment.matrix.policy)
    if (haar_ref.d, haar_ref.k) != (moment.d, moment.k):
        raise ValueError("moment and reference have different (d, k)")
    return half_trace_norm(moment.matrix - haar_ref.matrix)


DEFAULT_LADDER_START = 256
MAX_LADDER_BITS = 16384


def decay_series(spec, k, psi0, n_max, *, start_policy=None, escalate=True,
                 max_bits=MAX_LADDER_BITS, margin=LEDGER_MARGIN):
    """Trace distance to the Haar moment at times S_1 .. S_{n_max}.

    Runs the channel recursion under a precision ladder: the first attempt
    uses `start_policy` (default 256-bit big floats); whenever the error
    ledger rule eps_n <= margin * delta_n fails, the whole recursion
    restarts at doubled precision, because a violated step contaminates
    every later one.  Raises LedgerViolation when escalation is disabled
    or the bit budget is exhausted.  Returns (DecaySeries, ErrorLedger).
    """
    policy = start_policy or bigfloat(DEFAULT_LADDER_START)
    while True:
        run = spec.with_policy(policy)
        this_ledger = ErrorLedger()
        times, deltas, epss, bits = [], [], [], []
        try:
            for j, _, eps, delta in _recursive_channel_steps(
                    run, k, n_max, ledger=this_ledger, psi0=psi0, margin=margin):
                times.append(this_ledger.rows[-1].t)
                deltas.append(delta)
                epss.append(eps)
                bits.append(policy.bits)
            series = DecaySeries(times=times, deltas=deltas, epsilons=epss,
                                 bits=bits, k=k, d=spec.d)
            return series, this_ledger
        except LedgerViolation:
            next_bits = 256 if policy.mode == "double" else policy.bits * 2
            if not escalate or next_bits > max_bits:
                raise
            if spec.gate_builder is None and policy.mode != "double":
                # rebuilding is impossible; higher bits cannot repair gates
                raise
            policy = bigfloat(next_bits)


def coin_sequence(p1, T, seed):
    """I.i.d. Bernoulli symbol sequence, reproducible from its seed.

    Usable anywhere a word is accepted; needs support on both symbols
    (0 < p1 < 1) for the random baseline to explore the gate group.
    """
    if not 0 < p1 < 1:
        raise ValueError("coin bias must give support on both symbols")
    if T < 1:
        raise ValueError("sequence length must be positive")
    rng = np.random.default_rng(seed)
    draws = rng.random(T) < p1
    return SymbolSequence(symbols="".join("1" if b else "0" for b in draws),
                          origin="coin")

"""Precision-configurable dense complex linear algebra.

All unitaries, density matrices and channel matrices in this package are
carried by :class:`CMatrix`, which stores its entries either as hardware
doubles (numpy complex128) or as mpmath big floats with a configurable
significand size.  The two modes share one code path wherever numpy's
object-array support allows it; the genuinely precision-sensitive kernels
(matrix products, Hermitian eigenvalues) have explicit big-float
implementations.

Dimensions stay small in this package (at most a few thousand per side in
double mode, <= 64 per side in big-float mode), so the big-float
eigensolver is a cyclic Jacobi iteration, which is simple, numerically
transparent and accurate to working precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from mpmath import mp, mpc, mpf, workprec


class PolicyMismatchError(ValueError):
    """Operands carry different precision policies."""


class HermiticityError(ValueError):
    """Input that must be Hermitian is not, within policy tolerance."""


@dataclass(frozen=True)
class PrecisionPolicy:
    """Arithmetic mode for matrix values.

    mode is "double" (numpy complex128) or "bigfloat" (mpmath mpc with
    `bits` significand bits).  In double mode `bits` is fixed at 53.
    """

    mode: str
    bits: int = 53

    def __post_init__(self):
        if self.mode not in ("double", "bigfloat"):
            raise ValueError(f"unknown precision mode {self.mode!r}")
        if self.mode == "double":
            object.__setattr__(self, "bits", 53)
        elif self.bits < 53:
            raise ValueError("big-float mode requires bits >= 53")

    @property
    def eps(self):
        """Unit roundoff: one ulp at magnitude 1."""
        if self.mode == "double":
            return 2.0 ** -52
        with workprec(self.bits):
            return mpf(2) ** (1 - self.bits)

    def zero(self):
        return 0j if self.mode == "double" else mpc(0)

    def to_scalar(self, x):
        """Convert a python/numpy/mpmath number to this policy's scalar type."""
        if self.mode == "double":
            return complex(x)
        with workprec(self.bits):
            if isinstance(x, (complex, np.complexfloating)):
                return mpc(x.real, x.imag)
            return mpc(x)


DOUBLE = PrecisionPolicy("double")


def bigfloat(bits):
    return PrecisionPolicy("bigfloat", bits)


class CMatrix:
    """Dense complex matrix at a fixed precision policy.

    Wraps a numpy array: complex128 in double mode, dtype=object holding
    mpmath mpc in big-float mode.  Instances are treated as immutable;
    operations return new matrices.
    """

    __slots__ = ("data", "policy")

    def __init__(self, data, policy):
        self.data = data
        self.policy = policy

    # -- construction -------------------------------------------------

    @classmethod
    def from_rows(cls, rows, policy=DOUBLE):
        if policy.mode == "double":
            return cls(np.array(rows, dtype=np.complex128), policy)
        arr = np.empty((len(rows), len(rows[0])), dtype=object)
        for i, row in enumerate(rows):
            for j, x in enumerate(row):
                arr[i, j] = policy.to_scalar(x)
        return cls(arr, policy)

    @classmethod
    def from_numpy(cls, arr, policy=DOUBLE):
        arr = np.asarray(arr)
        if policy.mode == "double":
            return cls(arr.astype(np.complex128), policy)
        return cls.from_rows(arr.tolist(), policy)

    @classmethod
    def identity(cls, n, policy=DOUBLE):
        if policy.mode == "double":
            return cls(np.eye(n, dtype=np.complex128), policy)
        arr = np.empty((n, n), dtype=object)
        one, zero = mpc(1), mpc(0)
        for i in range(n):
            for j in range(n):
                arr[i, j] = one if i == j else zero
        return cls(arr, policy)

    @classmethod
    def zeros(cls, rows, cols, policy=DOUBLE):
        if policy.mode == "double":
            return cls(np.zeros((rows, cols), dtype=np.complex128), policy)
        arr = np.empty((rows, cols), dtype=object)
        arr[:] = mpc(0)
        return cls(arr.copy(), policy)

    @classmethod
    def diag(cls, values, policy=DOUBLE):
        n = len(values)
        out = cls.zeros(n, n, policy).data.copy()
        for i, v in enumerate(values):
            out[i, i] = policy.to_scalar(v)
        return cls(out, policy)

    # -- shape ----------------------------------------------------------

    @property
    def rows(self):
        return self.data.shape[0]

    @property
    def cols(self):
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape

    def is_square(self):
        return self.rows == self.cols

    # -- conversions ----------------------------------------------------

    def to_numpy(self):
        """Entries as complex128 (lossy in big-float mode)."""
        if self.policy.mode == "double":
            return self.data.copy()
        out = np.empty(self.data.shape, dtype=np.complex128)
        for i in range(self.rows):
            for j in range(self.cols):
                z = self.data[i, j]
                out[i, j] = complex(float(z.real), float(z.imag))
        return out

    def to_policy(self, policy):
        if policy == self.policy:
            return self
        if policy.mode == "double":
            return CMatrix(self.to_numpy(), policy)
        if self.policy.mode == "double":
            return CMatrix.from_rows(self.data.tolist(), policy)
        with workprec(policy.bits):
            arr = np.empty(self.data.shape, dtype=object)
            for i in range(self.rows):
                for j in range(self.cols):
                    z = self.data[i, j]
                    arr[i, j] = mpc(z.real, z.imag) * 1
        return CMatrix(arr, policy)

    # -- arithmetic -------------------------------------------------------

    def _check(self, other):
        if self.policy != other.policy:
            raise PolicyMismatchError(
                f"policy mismatch: {self.policy} vs {other.policy}")

    def __add__(self, other):
        self._check(other)
        if self.policy.mode == "double":
            return CMatrix(self.data + other.data, self.policy)
        with workprec(self.policy.bits):
            return CMatrix(self.data + other.data, self.policy)

    def __sub__(self, other):
        self._check(other)
        if self.policy.mode == "double":
            return CMatrix(self.data - other.data, self.policy)
        with workprec(self.policy.bits):
            return CMatrix(self.data - other.data, self.policy)

    def scale(self, s):
        """Multiply by a scalar."""
        if self.policy.mode == "double":
            return CMatrix(self.data * complex(s), self.policy)
        with workprec(self.policy.bits):
            return CMatrix(self.data * self.policy.to_scalar(s), self.policy)

    def __matmul__(self, other):
        self._check(other)
        if self.cols != other.rows:
            raise ValueError("inner dimensions do not match")
        if self.policy.mode == "double":
            return CMatrix(self.data @ other.data, self.policy)
        with workprec(self.policy.bits):
            a, b = self.data, other.data
            out = np.empty((self.rows, other.cols), dtype=object)
            bt = b.T
            for i in range(self.rows):
                ai = a[i]
                for j in range(other.cols):
                    # fdot accumulates the products exactly, rounding once
                    out[i, j] = mp.fdot(ai, bt[j])
            return CMatrix(out, self.policy)

    def conj(self):
        # mpmath's conjugate() rounds to the *ambient* precision, so the
        # policy precision must be active whenever it runs
        if self.policy.mode == "double":
            return CMatrix(np.conjugate(self.data), self.policy)
        with workprec(self.policy.bits):
            return CMatrix(np.conjugate(self.data), self.policy)

    def transpose(self):
        return CMatrix(self.data.T.copy(), self.policy)

    @property
    def H(self):
        """Conjugate transpose."""
        return self.conj().transpose()

    def trace(self):
        if self.policy.mode == "double":
            return complex(np.trace(self.data))
        with workprec(self.policy.bits):
            return mp.fsum(self.data[i, i] for i in range(self.rows))

    def max_abs(self):
        """Largest entry magnitude, as a policy-mode real scalar."""
        if self.policy.mode == "double":
            return float(np.abs(self.data).max())
        with workprec(self.policy.bits):
            best = mpf(0)
            for z in self.data.flat:
                a = abs(z)
                if a > best:
                    best = a
            return best

    # -- predicates -----------------------------------------------------

    def hermiticity_defect(self):
        """max |M - M^H| over entries."""
        return (self - self.H).max_abs()

    def is_hermitian(self, ulps=10):
        scale = self.max_abs()
        tol = self.policy.eps * ulps * max(1.0 if self.policy.mode == "double" else mpf(1), scale)
        return self.hermiticity_defect() <= tol


# ---------------------------------------------------------------------------
# Kernel operations
# ---------------------------------------------------------------------------


def kron(a, b):
    """Kronecker product in standard order: entries a[i,j] * b[k,l]."""
    if a.policy != b.policy:
        raise PolicyMismatchError("kron requires a common precision policy")
    if a.policy.mode == "double":
        return CMatrix(np.kron(a.data, b.data), a.policy)
    with workprec(a.policy.bits):
        return CMatrix(np.kron(a.data, b.data), a.policy)


def tensor_power(a, k):
    """k-fold Kronecker power of a matrix."""
    if k < 1:
        raise ValueError("tensor power requires k >= 1")
    out = a
    for _ in range(k - 1):
        out = kron(out, a)
    return out


def partial_trace(m, dims, keep):
    """Trace out all subsystems not in `keep`.

    dims lists the subsystem dimensions whose product must equal the side
    of the square matrix m; keep is an iterable of subsystem indices to
    retain.  Tracing out everything returns a 1x1 matrix holding tr(m).
    """
    if not m.is_square():
        raise ValueError("partial trace requires a square matrix")
    dims = list(dims)
    n = len(dims)
    total = 1
    for d in dims:
        total *= d
    if total != m.rows:
        raise ValueError("subsystem dimensions inconsistent with matrix size")
    keep = sorted(set(keep))
    if any(i < 0 or i >= n for i in keep):
        raise ValueError("keep indices out of range")
    drop = [i for i in range(n) if i not in keep]
    # reshape to a 2n-index tensor, contract dropped row/col index pairs
    t = m.data.reshape(dims + dims)
    for i in reversed(drop):
        # trace over axis pair (i, i+n_current) where the tensor currently
        # has one row and one col axis per remaining subsystem
        cur = t.ndim // 2
        t = np.trace(t, axis1=i, axis2=i + cur)
    side = 1
    for i in keep:
        side *= dims[i]
    out = t.reshape(side, side)
    if m.policy.mode == "double":
        return CMatrix(out, m.policy)
    with workprec(m.policy.bits):
        return CMatrix(out + mpc(0), m.policy)


def _jacobi_hermitian(a, bits):
    """Cyclic Jacobi diagonalization of a Hermitian object-array.

    Returns (eigenvalue list ascending, unitary V as object array) with
    columns of V the matching eigenvectors.  Uses a threshold schedule:
    early sweeps only rotate pivots above a shrinking fraction of the
    off-diagonal mass, later sweeps rotate everything, until the largest
    off-diagonal entry is at working-precision zero.
    """
    n = a.shape[0]
    with workprec(bits + 10):
        A = np.empty((n, n), dtype=object)
        for i in range(n):
            for j in range(n):
                A[i, j] = mpc(a[i, j])
        V = np.empty((n, n), dtype=object)
        one, zero = mpc(1), mpc(0)
        for i in range(n):
            for j in range(n):
                V[i, j] = one if i == j else zero
        scale = max([abs(A[i, j]) for i in range(n) for j in range(n)] + [mpf(1)])
        stop = scale * mpf(2) ** (-bits - 2)

        def off_max():
            best = mpf(0)
            for i in range(n):
                for j in range(i + 1, n):
                    v = abs(A[i, j])
                    if v > best:
                        best = v
            return best

        max_sweeps = 30 + n
        for sweep in range(max_sweeps):
            biggest = off_max()
            if biggest <= stop:
                break
            # threshold schedule: generous early, exact later
            thresh = biggest / 10 if sweep < 3 else stop
            for p in range(n):
                for q in range(p + 1, n):
                    apq = A[p, q]
                    r = abs(apq)
                    if r <= thresh or r <= stop:
                        continue
                    app = mpf(A[p, p].real)
                    aqq = mpf(A[q, q].real)
                    phase = apq / r
                    tau = (aqq - app) / (2 * r)
                    # smaller root of r t^2 - 2 r tau t - r = 0, for stability
                    if tau >= 0:
                        t = -1 / (tau + mp.sqrt(1 + tau * tau))
                    else:
                        t = 1 / (-tau + mp.sqrt(1 + tau * tau))
                    c = 1 / mp.sqrt(1 + t * t)
                    s = t * c
                    sp = s * phase          # s * e^{i phi}
                    spc = s / phase         # s * e^{-i phi}
                    # column update: A <- A J, J = [[c, -sp],[spc, c]] on (p,q)
                    for i in range(n):
                        aip, aiq = A[i, p], A[i, q]
                        A[i, p] = aip * c + aiq * spc
                        A[i, q] = -aip * sp + aiq * c
                    # row update: A <- J^H A
                    for i in range(n):
                        api, aqi = A[p, i], A[q, i]
                        A[p, i] = c * api + sp * aqi
                        A[q, i] = -spc * api + c * aqi
                    A[p, q] = zero
                    A[q, p] = zero
                    A[p, p] = mpc(mpf(A[p, p].real))
                    A[q, q] = mpc(mpf(A[q, q].real))
                    for i in range(n):
                        vip, viq = V[i, p], V[i, q]
                        V[i, p] = vip * c + viq * spc
                        V[i, q] = -vip * sp + viq * c
        else:
            raise ArithmeticError("Jacobi iteration failed to converge")
        evals = [mpf(A[i, i].real) for i in range(n)]
        order = sorted(range(n), key=lambda i: evals[i])
        evals_sorted = [evals[i] for i in order]
        Vs = np.empty((n, n), dtype=object)
        for newj, oldj in enumerate(order):
            for i in range(n):
                Vs[i, newj] = V[i, oldj]
    return evals_sorted, Vs


def eig_hermitian(h, want_vectors=False, ulps=10):
    """Eigenvalues (ascending) of a Hermitian matrix, optionally vectors.

    Rejects inputs whose hermiticity defect exceeds `ulps` units in the
    last place of the policy; long recursions that drift should fail here
    rather than be silently symmetrized.
    """
    if not h.is_square():
        raise ValueError("eigendecomposition requires a square matrix")
    if not h.is_hermitian(ulps=ulps):
        raise HermiticityError("matrix is not Hermitian within policy tolerance")
    if h.policy.mode == "double":
        if want_vectors:
            w, v = np.linalg.eigh(h.data)
            return list(w), CMatrix(v, h.policy)
        return list(np.linalg.eigvalsh(h.data))
    evals, V = _jacobi_hermitian(h.data, h.policy.bits)
    if want_vectors:
        return evals, CMatrix(V, h.policy)
    return evals


def _singular_values(a):
    """Singular values of a (any shape), ascending."""
    gram = a.H @ a
    # numerical symmetrization is safe here: gram is Hermitian by
    # construction and the defect is pure roundoff
    sym = (gram + gram.H).scale(0.5)
    evals = eig_hermitian(sym, ulps=10 ** 6)
    if a.policy.mode == "double":
        return [float(np.sqrt(max(ev, 0.0))) for ev in evals]
    with workprec(a.policy.bits):
        return [mp.sqrt(ev) if ev > 0 else mpf(0) for ev in evals]


def trace_norm(a):
    """Sum of singular values; for Hermitian input, sum of |eigenvalues|."""
    if not a.is_square():
        raise ValueError("trace norm defined for square matrices here")
    if a.is_hermitian():
        evals = eig_hermitian(a)
        if a.policy.mode == "double":
            return float(sum(abs(ev) for ev in evals))
        with workprec(a.policy.bits):
            return mp.fsum(abs(ev) for ev in evals)
    svals = _singular_values(a)
    if a.policy.mode == "double":
        return float(sum(svals))
    with workprec(a.policy.bits):
        return mp.fsum(svals)


def half_trace_norm(a):
    """trace_norm(a) / 2, with the division done at policy precision.

    mpmath rounds every arithmetic result to the *ambient* working
    precision, so even an exact halving outside a workprec block would
    truncate a big-float value to 53 bits.
    """
    tn = trace_norm(a)
    if a.policy.mode == "double":
        return tn / 2
    with workprec(a.policy.bits):
        return tn / 2


def operator_norm(a):
    """Largest singular value."""
    if not a.is_square():
        raise ValueError("operator norm defined for square matrices here")
    svals = _singular_values(a)
    return svals[-1]


def expm_hermitian(h, t):
    """exp(-i t h) for Hermitian h, via eigendecomposition."""
    evals, V = eig_hermitian(h, want_vectors=True)
    if h.policy.mode == "double":
        phases = np.exp(-1j * float(t) * np.array(evals))
        return CMatrix((V.data * phases) @ V.data.conj().T, h.policy)
    with workprec(h.policy.bits):
        tt = mpf(t)
        n = h.rows
        out = np.empty((n, n), dtype=object)
        ph = [mp.exp(mpc(0, -tt * ev)) for ev in evals]
        Vd = V.data
        Vh = np.conjugate(Vd).T
        for i in range(n):
            row = [Vd[i, k] * ph[k] for k in range(n)]
            for j in range(n):
                out[i, j] = mp.fdot(row, Vh[:, j])
        return CMatrix(out, h.policy)


def vec(m):
    """Column-stacked vectorization: vec(AXB) = (B^T (x) A) vec(X)."""
    if not m.is_square():
        raise ValueError("vec expects a square matrix")
    # column stacking = transpose then row-major flatten
    return CMatrix(m.data.T.reshape(-1, 1).copy(), m.policy)


def unvec(v, d):
    """Inverse of vec for a d x d matrix."""
    if v.data.size != d * d:
        raise ValueError("vector length does not match d*d")
    return CMatrix(v.data.reshape(d, d).T.copy(), v.policy)

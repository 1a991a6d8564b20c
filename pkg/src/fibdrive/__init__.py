"""Numerical laboratory for complete Hilbert-space ergodicity under
generalized Fibonacci (Sturmian) drives.

Subpackages:

- bigmat: precision-configurable dense complex linear algebra
- words: Sturmian word generation, complexity, Zeckendorf numeration
- haar: analytic Haar moment states and Haar sampling
- drive: drive unitaries, time-averaging channels, trace-distance decays
- stationary: no-go bound for time-independent Hamiltonian evolution
- sweep: single-qubit parameter sweeps and power-law fits
- manybody: spin-chain drives and projected-ensemble observables
- cli: command-line front end
"""

from .bigmat import (
    CMatrix,
    DOUBLE,
    HermiticityError,
    PolicyMismatchError,
    PrecisionPolicy,
    bigfloat,
    eig_hermitian,
    expm_hermitian,
    kron,
    operator_norm,
    partial_trace,
    tensor_power,
    trace_norm,
    unvec,
    vec,
)

__version__ = "0.1.0"

"""Single-qubit parameter sweeps, power-law fits, convergence diagnostics.

Gate parametrization: the symbol-0 gate rotates about Z by angle 2*theta1,
the symbol-1 gate rotates by 2*theta2 about an axis tilted by theta3 from
Z toward X:

    A0 = exp(-i theta1 Z)
    A1 = exp(-i theta2 (cos(theta3) Z + sin(theta3) X))

theta3 = pi/2 makes A1 a plain X rotation; the (theta_X, theta_Z)
convention used for the X/Z-rotation model maps in as
theta1 = theta_Z, theta2 = theta_X, theta3 = pi/2.

Decay exponents come from least squares on (log T, log Delta); the
convergence figure zeta compares fits at two horizon lengths and flags a
grid point converged when the relative change stays below 0.1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bigmat import CMatrix, DOUBLE, expm_hermitian
from .drive import DriveSpec, LedgerViolation, decay_series


@dataclass(frozen=True)
class QubitAngles:
    theta1: float
    theta2: float
    theta3: float = math.pi / 2

    def __post_init__(self):
        for v in (self.theta1, self.theta2, self.theta3):
            if not math.isfinite(v):
                raise ValueError("angles must be finite")


@dataclass
class FitResult:
    """Least-squares line on transformed axes; gamma is minus the slope."""

    gamma: float
    intercept: float
    residual: float      # rms residual in the fit coordinates
    gamma_stderr: float  # standard error of the slope estimate
    window: tuple        # (first index, last index) used, inclusive


ZETA_CONVERGED = 0.1


def qubit_gates(angles, policy=DOUBLE):
    """(A0, A1) in SU(2) for the given angles, at the given precision."""
    if policy.mode == "double":
        z = CMatrix.from_rows([[1, 0], [0, -1]], policy)
        x = CMatrix.from_rows([[0, 1], [1, 0]], policy)
        c, s = math.cos(angles.theta3), math.sin(angles.theta3)
        axis = z.scale(c) + x.scale(s)
        return expm_hermitian(z, angles.theta1), expm_hermitian(axis, angles.theta2)
    from mpmath import mp, mpf, workprec

    with workprec(policy.bits):
        z = CMatrix.from_rows([[1, 0], [0, -1]], policy)
        x = CMatrix.from_rows([[0, 1], [1, 0]], policy)
        t3 = mpf(angles.theta3)
        axis = z.scale(mp.cos(t3)) + x.scale(mp.sin(t3))
        a0 = expm_hermitian(z, mpf(angles.theta1))
        a1 = expm_hermitian(axis, mpf(angles.theta2))
    return a0, a1


def qubit_drive(angles, m=1, policy=None, theta0=0.0):
    """DriveSpec for a qubit with a rebuildable gate pair."""
    builder = lambda pol: qubit_gates(angles, pol)
    return DriveSpec.from_builder(m, 2, builder, policy=policy or DOUBLE,
                                  theta0=theta0)


def _line_fit(xs, ys):
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    n = xs.size
    xbar, ybar = xs.mean(), ys.mean()
    sxx = ((xs - xbar) ** 2).sum()
    if sxx == 0:
        raise ValueError("degenerate abscissas in fit window")
    slope = ((xs - xbar) * (ys - ybar)).sum() / sxx
    intercept = ybar - slope * xbar
    resid = ys - (intercept + slope * xs)
    rms = float(np.sqrt((resid ** 2).mean()))
    if n > 2:
        s2 = (resid ** 2).sum() / (n - 2)
        stderr = float(np.sqrt(s2 / sxx))
    else:
        stderr = float("inf")
    return float(slope), float(intercept), rms, stderr


def default_window(n_points, skip_fraction=0.2):
    """Drop the leading transient (first 20% of indices), keep the rest."""
    first = int(math.floor(n_points * skip_fraction))
    return (first, n_points - 1)


def powerlaw_fit(series, window=None):
    """Fit Delta ~ T^(-gamma) on log-log axes over the index window."""
    n = len(series)
    if window is None:
        window = default_window(n)
    lo, hi = window
    if hi >= n or lo < 0 or hi - lo + 1 < 4:
        raise ValueError("fit window must contain at least 4 series points")
    ts = series.times[lo:hi + 1]
    ds = series.deltas[lo:hi + 1]
    if any(float(x) <= 0 for x in ds):
        raise ValueError("power-law fit needs positive distances in the window")
    xs = [math.log(t) for t in ts]
    ys = [_log_float(x) for x in ds]
    slope, intercept, rms, stderr = _line_fit(xs, ys)
    return FitResult(gamma=-slope, intercept=intercept, residual=rms,
                     gamma_stderr=stderr, window=(lo, hi))


def _log_float(x):
    """log of a possibly tiny big-float value, as a double."""
    try:
        return math.log(x)
    except (OverflowError, ValueError, TypeError):
        from mpmath import mp

        return float(mp.log(x))


def zeta(fit_short, fit_long):
    """Relative change of gamma between a shorter and a longer horizon.

    Returns inf when the long-horizon gamma vanishes; callers treat that
    as non-convergent rather than a numeric error.
    """
    if fit_long.gamma == 0:
        return math.inf
    return abs(fit_short.gamma - fit_long.gamma) / abs(fit_long.gamma)


@dataclass
class GammaMapRow:
    theta1: float
    theta2: float
    theta3: float
    k: int
    gamma: float
    residual: float
    gamma_stderr: float
    zeta: float
    converged: bool
    final_delta: object
    bits: int
    flags: str


def _random_qubit_states(n_states, seed):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n_states):
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        out.append(v / np.linalg.norm(v))
    return out


def gamma_point(angles, k, n_max, n_states=2, seed=0, m=1, start_policy=None,
                zeta_fraction=0.8, window=None):
    """Averaged decay, fit, and convergence figure for one angle pair.

    The distance series is averaged over `n_states` random initial states
    drawn from the seed; gamma comes from the power-law fit over the
    post-transient window, and zeta compares against a refit at a horizon
    shortened to `zeta_fraction` of n_max.
    """
    spec = qubit_drive(angles, m=m)
    states = _random_qubit_states(n_states, seed)
    series_list = []
    ledgers = []
    for psi in states:
        s, led = decay_series(spec, k, psi, n_max, start_policy=start_policy)
        series_list.append(s)
        ledgers.append(led)
    avg = _average_series(series_list)
    fit = powerlaw_fit(avg, window=window)
    short_hi = max(fit.window[0] + 3, int(math.floor(n_max * zeta_fraction)) - 1)
    fit_short = powerlaw_fit(avg, window=(fit.window[0], min(short_hi, fit.window[1])))
    zt = zeta(fit_short, fit)
    return avg, fit, fit_short, zt, ledgers


def _average_series(series_list):
    from .drive import DecaySeries

    base = series_list[0]
    n = len(base)
    deltas = []
    for i in range(n):
        vals = [float(s.deltas[i]) for s in series_list]
        deltas.append(sum(vals) / len(vals))
    eps = [max(s.epsilons[i] for s in series_list) for i in range(n)]
    bits = [max(s.bits[i] for s in series_list) for i in range(n)]
    return DecaySeries(times=list(base.times), deltas=deltas, epsilons=eps,
                       bits=bits, k=base.k, d=base.d)


def gamma_map(theta1_values, theta2_values, theta3, k, n_max, n_states=2,
              seed=0, m=1, start_policy=None, max_workers=1):
    """FitResult table over a (theta1, theta2) grid at fixed theta3.

    Points run independently (optionally in a process pool) and report in
    grid order; a per-point ledger violation flags the row and the sweep
    continues.  Deterministic for fixed grid and seed, regardless of the
    worker count (per-point seeds derive from the grid position).
    """
    args = [(float(t1), float(t2), theta3, k, n_max, n_states, (seed, i, j),
             m, start_policy)
            for i, t1 in enumerate(theta1_values)
            for j, t2 in enumerate(theta2_values)]
    if max_workers > 1 and len(args) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            rows = list(pool.map(_gamma_map_worker, args))
    else:
        rows = [_gamma_map_worker(a) for a in args]
    return rows


def _gamma_map_worker(arg):
    t1, t2, t3, k, n_max, n_states, seed_key, m, start_policy = arg
    angles = QubitAngles(t1, t2, t3)
    seed = np.random.SeedSequence(seed_key).generate_state(1)[0]
    try:
        avg, fit, fit_short, zt, ledgers = gamma_point(
            angles, k, n_max, n_states=n_states, seed=int(seed), m=m,
            start_policy=start_policy)
    except LedgerViolation as exc:
        return GammaMapRow(theta1=t1, theta2=t2, theta3=t3, k=k,
                           gamma=float("nan"), residual=float("nan"),
                           gamma_stderr=float("nan"), zeta=float("nan"),
                           converged=False, final_delta=float("nan"), bits=0,
                           flags=f"ledger:{exc}")
    except ValueError as exc:
        return GammaMapRow(theta1=t1, theta2=t2, theta3=t3, k=k,
                           gamma=float("nan"), residual=float("nan"),
                           gamma_stderr=float("nan"), zeta=float("nan"),
                           converged=False, final_delta=float("nan"), bits=0,
                           flags=f"fit:{exc}")
    return GammaMapRow(theta1=t1, theta2=t2, theta3=t3, k=k, gamma=fit.gamma,
                       residual=fit.residual, gamma_stderr=fit.gamma_stderr,
                       zeta=zt, converged=zt < ZETA_CONVERGED,
                       final_delta=avg.deltas[-1], bits=avg.bits[-1], flags="")

"""Command-line front end.

One concern per subcommand; every run writes RFC-4180-style CSV data
files plus a manifest JSON echoing the fully resolved configuration, the
seeds in play, wall time and per-point flags.  All randomness flows from
explicit seeds, and numeric CSV fields carry the full precision of the
active arithmetic (decimal strings, never silently truncated to double).

Exit codes: 0 success, 2 configuration error, 3 ledger violation,
4 resource limit.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_LEDGER = 3
EXIT_RESOURCE = 4


def _fmt(x, bits=53):
    """Full-precision decimal string for ints, floats and big floats."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return repr(float(x))
    from mpmath import mp, workprec

    dps = int(bits * 0.30103) + 3
    with workprec(bits + 8):
        return mp.nstr(x, dps, strip_zeros=True)


def write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_manifest(path, subcommand, config, seeds, wall_time, flags, outputs):
    doc = {
        "version": "0.1.0",
        "subcommand": subcommand,
        "config": config,
        "seeds": seeds,
        "wall_time_s": wall_time,
        "flags": flags,
        "outputs": [str(o) for o in outputs],
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


def _resolve(args, parser):
    """Merge flag values over config-file keys over declared defaults."""
    cfg = {}
    if getattr(args, "config", None):
        cfg = json.loads(Path(args.config).read_text())
    defaults = getattr(args, "true_defaults", {})
    out = {}
    for key, val in vars(args).items():
        if key in ("config", "func", "true_defaults", "subcommand"):
            continue
        if val is not None:
            out[key] = val
        elif key in cfg:
            out[key] = cfg[key]
        else:
            out[key] = defaults.get(key)
    return out


def _out_dir(cfg):
    d = Path(cfg.get("out_dir") or "runs")
    d.mkdir(parents=True, exist_ok=True)
    return d


def _policy_from(cfg):
    from .bigmat import DOUBLE, bigfloat

    if cfg.get("mode") == "double":
        return DOUBLE
    bits = cfg.get("bits")
    return bigfloat(int(bits)) if bits else None


# ---------------------------------------------------------------------------
# subcommand runners
# ---------------------------------------------------------------------------


def run_word(cfg):
    from . import words

    m, length = int(cfg["m"]), int(cfg["length"])
    theta0 = float(cfg["theta0"])
    if theta0 == 0.0:
        word = words.fib_word_concat(m, length)
    else:
        word = words.code_rotation(m, theta0, length)
    print(word.symbols)
    outputs = []
    if cfg.get("out_dir"):
        out = _out_dir(cfg)
        sym_path = out / f"word_m{m}.csv"
        write_csv(sym_path, ["position", "symbol"],
                  [[str(i + 1), ch] for i, ch in enumerate(word.symbols)])
        outputs.append(sym_path)
        cmax = int(cfg["complexity_max"] or 0)
        if cmax:
            rows = [[str(n), str(words.symbolic_complexity(word, n))]
                    for n in range(1, cmax + 1)]
            cpath = out / f"complexity_m{m}.csv"
            write_csv(cpath, ["n", "factors"], rows)
            outputs.append(cpath)
    return outputs, [], []


def run_haar_moment(cfg):
    from .haar import haar_moment_state, mc_haar_moment, moment_trace_distance

    d, k = int(cfg["d"]), int(cfg["k"])
    ms = haar_moment_state(d, k)
    out = _out_dir(cfg)
    path = out / f"haar_moment_d{d}_k{k}.csv"
    rows = []
    side = d ** k
    for i in range(side):
        for j in range(side):
            z = ms.matrix.data[i, j]
            rows.append([str(i), str(j), repr(float(z.real)), repr(float(z.imag))])
    write_csv(path, ["row", "col", "re", "im"], rows)
    flags = []
    if cfg.get("mc_samples"):
        mc = mc_haar_moment(d, k, int(cfg["mc_samples"]), int(cfg["seed"]))
        flags.append(f"mc_trace_distance={moment_trace_distance(mc, ms):.6e}")
    return [path], flags, [int(cfg["seed"])]


def _qubit_spec_from(cfg):
    from .sweep import QubitAngles, qubit_drive

    if cfg.get("theta_x") is not None or cfg.get("theta_z") is not None:
        tx = float(cfg["theta_x"]) * math.pi
        tz = float(cfg["theta_z"]) * math.pi
        angles = QubitAngles(tz, tx, math.pi / 2)
        return qubit_drive(angles, m=int(cfg["m"]))
    if cfg.get("theta1") is not None:
        angles = QubitAngles(float(cfg["theta1"]) * math.pi,
                             float(cfg["theta2"]) * math.pi,
                             float(cfg["theta3"]) * math.pi)
        return qubit_drive(angles, m=int(cfg["m"]))
    return None


def _haar_pair_spec(cfg):
    from .drive import DriveSpec
    from .haar import sample_haar_unitary

    d = int(cfg["d"])
    rng = np.random.default_rng(int(cfg["seed"]))
    a0 = sample_haar_unitary(d, rng)
    a1 = sample_haar_unitary(d, rng)
    return DriveSpec(m=int(cfg["m"]), d=d, a0=a0, a1=a1)


def _initial_state(cfg, d):
    kind = cfg.get("state") or "zero"
    if kind == "zero":
        psi = np.zeros(d)
        psi[0] = 1.0
        return psi
    if kind == "plus":
        return np.ones(d) / math.sqrt(d)
    if kind == "random":
        rng = np.random.default_rng(int(cfg["seed"]) + 1)
        psi = rng.normal(size=d) + 1j * rng.normal(size=d)
        return psi / np.linalg.norm(psi)
    raise ValueError(f"unknown initial state {kind!r}")


def run_trace_distance(cfg):
    from .drive import decay_series

    spec = _qubit_spec_from(cfg) or _haar_pair_spec(cfg)
    psi = _initial_state(cfg, spec.d)
    k, n_max = int(cfg["k"]), int(cfg["n_max"])
    policy = _policy_from(cfg)
    series, ledger = decay_series(
        spec, k, psi, n_max, start_policy=policy,
        escalate=not cfg.get("no_escalate"), max_bits=int(cfg["max_bits"]))
    out = _out_dir(cfg)
    path = out / f"trace_distance_k{k}_m{spec.m}.csv"
    rows = [[str(t), _fmt(dlt, b), _fmt(e, b), str(b)]
            for t, dlt, e, b in zip(series.times, series.deltas,
                                    series.epsilons, series.bits)]
    write_csv(path, ["t", "delta", "epsilon", "bits"], rows)
    return [path], [], [int(cfg["seed"])]


def run_gamma_map(cfg):
    from .sweep import gamma_map

    grid1 = _parse_grid(cfg["theta1_grid"])
    grid2 = _parse_grid(cfg["theta2_grid"])
    rows = gamma_map(
        [t * math.pi for t in grid1], [t * math.pi for t in grid2],
        float(cfg["theta3"]) * math.pi, int(cfg["k"]), int(cfg["n_max"]),
        n_states=int(cfg["n_states"]), seed=int(cfg["seed"]),
        m=int(cfg["m"]), start_policy=_policy_from(cfg),
        max_workers=int(cfg["threads"]))
    out = _out_dir(cfg)
    path = out / f"gamma_map_k{cfg['k']}.csv"
    csv_rows = []
    flags = []
    for r in rows:
        csv_rows.append([repr(float(r.theta1)), repr(float(r.theta2)),
                         repr(float(r.theta3)), str(r.k),
                         repr(float(r.gamma)), repr(float(r.residual)),
                         repr(float(r.zeta)), _fmt(r.converged),
                         _fmt(r.final_delta, r.bits or 53), str(r.bits), r.flags])
        if r.flags:
            flags.append(f"({r.theta1:.4f},{r.theta2:.4f}): {r.flags}")
    write_csv(path, ["theta1", "theta2", "theta3", "k", "gamma", "residual",
                     "zeta", "converged", "final_delta", "bits", "flags"],
              csv_rows)
    if flags and len(flags) == len(rows):
        raise _TotalFailure("every grid point failed the ledger rule")
    return [path], flags, [int(cfg["seed"])]


class _TotalFailure(Exception):
    pass


def _parse_grid(text):
    text = str(text)
    if ":" in text:
        start, stop, count = text.split(":")
        return list(np.linspace(float(start), float(stop), int(count)))
    return [float(x) for x in text.split(",")]


def run_bound_check(cfg):
    from .stationary import bound_check_sweep

    d, n = int(cfg["d"]), int(cfg["instances"])
    certs = bound_check_sweep(d, n, int(cfg["seed"]))
    out = _out_dir(cfg)
    path = out / f"bound_check_d{d}.csv"
    rows = [[str(d), repr(c.delta2), repr(c.dephased), repr(c.diagonal),
             repr(c.bound), repr(c.delta2 - c.bound)] for c in certs]
    write_csv(path, ["d", "delta2", "dephased_bound", "diagonal_bound",
                     "B", "margin"], rows)
    return [path], [], [int(cfg["seed"])]


def run_coin_baseline(cfg):
    from .drive import coin_sequence, unitarity_defect
    from .haar import haar_moment_state

    spec = _haar_pair_spec(cfg)
    t_max = int(cfg["t_max"])
    seq = coin_sequence(float(cfg["p1"]), t_max, int(cfg["seed"]))
    psi = _initial_state(cfg, spec.d)
    k = int(cfg["k"])
    marks = _log_marks(t_max)
    ref = haar_moment_state(spec.d, k)
    out_rows = []
    # running average over channel matrices, sampled at the marks
    side = spec.d ** (2 * k)
    acc = np.zeros((side, side), dtype=complex)
    u = np.eye(spec.d, dtype=complex)
    gates = {"0": spec.a0.data, "1": spec.a1.data}
    from .bigmat import CMatrix, unvec, vec, tensor_power, trace_norm

    rho = np.outer(psi, psi.conj())
    rho_k = CMatrix.from_numpy(rho)
    rk = tensor_power(rho_k, k) if k > 1 else rho_k
    rvec = vec(rk).data
    mark_i = 0
    for t in range(t_max):
        if t > 0:
            u = gates[seq.symbols[t - 1]] @ u
        uk = u
        for _ in range(k - 1):
            uk = np.kron(uk, u)
        acc += np.kron(uk.conj(), uk)
        if mark_i < len(marks) and t + 1 == marks[mark_i]:
            avg = acc / (t + 1)
            mom = unvec(CMatrix.from_numpy(avg @ rvec), spec.d ** k)
            delta = float(trace_norm(mom - ref.matrix)) / 2
            eps = float(unitarity_defect(CMatrix.from_numpy(u)))
            out_rows.append([str(t + 1), repr(delta), repr(eps), "53"])
            mark_i += 1
    out = _out_dir(cfg)
    path = out / f"coin_baseline_k{k}.csv"
    write_csv(path, ["t", "delta", "epsilon", "bits"], out_rows)
    return [path], [], [int(cfg["seed"])]


def _log_marks(t_max, per_decade=10):
    marks = sorted({int(round(10 ** (e / per_decade)))
                    for e in range(0, int(per_decade * math.log10(t_max)) + 1)})
    marks = [m for m in marks if 1 <= m <= t_max]
    if marks[-1] != t_max:
        marks.append(t_max)
    return marks


def run_manybody(cfg):
    from .manybody import (ChainSpec, evolve_chain_states, gram_delta_series,
                           log_spaced_windows, random_product_state,
                           windowed_chain_states)

    L, k = int(cfg["L"]), int(cfg["k"])
    t_max = int(cfg["t_max"])
    n_states = int(cfg["n_states"])
    seed = int(cfg["seed"])
    spec = ChainSpec(L=L)
    marks = _log_marks(t_max)
    acc = np.zeros(len(marks))
    windows = log_spaced_windows(t_max, per_decade=int(cfg["windows_per_decade"]))
    for s in range(n_states):
        psi0 = random_product_state(L, seed + s)
        if cfg.get("windowed"):
            states = windowed_chain_states(spec, psi0, windows)
        else:
            states = evolve_chain_states(spec, psi0, t_max)
        acc += np.array(gram_delta_series(states, k, marks))
    avg = acc / n_states
    out = _out_dir(cfg)
    path = out / f"manybody_L{L}_k{k}.csv"
    write_csv(path, ["t", "delta", "k", "L"],
              [[str(t), repr(float(v)), str(k), str(L)] for t, v in zip(marks, avg)])
    mpath = out / f"manybody_L{L}_k{k}_windows.json"
    mpath.write_text(json.dumps({"windows": windows}) + "\n")
    return [path, mpath], [], [seed + s for s in range(n_states)]


def run_deep_therm(cfg):
    from .manybody import ChainSpec, deep_therm_series, random_product_state

    L, k, n_a = int(cfg["L"]), int(cfg["k"]), int(cfg["n_a"])
    t_max = int(cfg["t_max"])
    n_states = int(cfg["n_states"])
    seed = int(cfg["seed"])
    spec = ChainSpec(L=L)
    acc = np.zeros(t_max)
    worst_leak = 0.0
    for s in range(n_states):
        psi0 = random_product_state(L, seed + s)
        deltas, leaks = deep_therm_series(spec, n_a, k, psi0, t_max)
        acc += np.array(deltas)
        worst_leak = max(worst_leak, max(leaks))
    avg = acc / n_states
    out = _out_dir(cfg)
    path = out / f"deep_therm_L{L}_k{k}.csv"
    write_csv(path, ["t", "delta_E", "k", "L", "N_A", "leakage"],
              [[str(t), repr(float(v)), str(k), str(L), str(n_a),
                repr(float(worst_leak))] for t, v in enumerate(avg)])
    return [path], [], [seed + s for s in range(n_states)]


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(
        prog="fibdrive",
        description="Quantum ergodicity diagnostics for Sturmian-word drives")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def add(name, runner, options):
        sp = sub.add_parser(name)
        sp.add_argument("--config", default=None, help="JSON config file")
        sp.add_argument("--out-dir", dest="out_dir", default=None)
        true_defaults = {}
        for flag, kw in options:
            dest = kw.get("dest", flag.lstrip("-").replace("-", "_"))
            if kw.get("action") == "store_true":
                true_defaults[dest] = False
                kw = dict(kw, default=None)
            else:
                true_defaults[dest] = kw.get("default")
                kw = dict(kw, default=None)
            sp.add_argument(flag, **kw)
        sp.set_defaults(func=runner, true_defaults=true_defaults)
        return sp

    add("word", run_word, [
        ("--m", dict(type=int, default=1)),
        ("--length", dict(type=int, default=89)),
        ("--theta0", dict(type=float, default=0.0)),
        ("--complexity-max", dict(dest="complexity_max", type=int, default=0)),
    ])
    add("haar-moment", run_haar_moment, [
        ("--d", dict(type=int, default=2)),
        ("--k", dict(type=int, default=2)),
        ("--mc-samples", dict(dest="mc_samples", type=int, default=0)),
        ("--seed", dict(type=int, default=0)),
    ])
    add("trace-distance", run_trace_distance, [
        ("--d", dict(type=int, default=2)),
        ("--m", dict(type=int, default=1)),
        ("--k", dict(type=int, default=2)),
        ("--n-max", dict(dest="n_max", type=int, default=60)),
        ("--seed", dict(type=int, default=0)),
        ("--state", dict(default="zero")),
        ("--theta-x", dict(dest="theta_x", type=float, default=None,
                           help="X-rotation angle over pi")),
        ("--theta-z", dict(dest="theta_z", type=float, default=None)),
        ("--theta1", dict(type=float, default=None)),
        ("--theta2", dict(type=float, default=None)),
        ("--theta3", dict(type=float, default=None)),
        ("--bits", dict(type=int, default=None)),
        ("--mode", dict(default=None, choices=["double", "bigfloat"])),
        ("--max-bits", dict(dest="max_bits", type=int, default=16384)),
        ("--no-escalate", dict(dest="no_escalate", action="store_true")),
    ])
    add("gamma-map", run_gamma_map, [
        ("--theta1-grid", dict(dest="theta1_grid", default="0.1:0.45:4",
                               help="over pi; start:stop:count or comma list")),
        ("--theta2-grid", dict(dest="theta2_grid", default="0.1:0.45:4")),
        ("--theta3", dict(type=float, default=0.5)),
        ("--m", dict(type=int, default=1)),
        ("--k", dict(type=int, default=2)),
        ("--n-max", dict(dest="n_max", type=int, default=200)),
        ("--n-states", dict(dest="n_states", type=int, default=2)),
        ("--seed", dict(type=int, default=0)),
        ("--bits", dict(type=int, default=None)),
        ("--mode", dict(default=None, choices=["double", "bigfloat"])),
        ("--threads", dict(type=int, default=os.cpu_count() or 1)),
    ])
    add("bound-check", run_bound_check, [
        ("--d", dict(type=int, default=2)),
        ("--instances", dict(type=int, default=100)),
        ("--seed", dict(type=int, default=0)),
    ])
    add("coin-baseline", run_coin_baseline, [
        ("--d", dict(type=int, default=2)),
        ("--m", dict(type=int, default=1)),
        ("--k", dict(type=int, default=2)),
        ("--p1", dict(type=float, default=0.5)),
        ("--t-max", dict(dest="t_max", type=int, default=1000)),
        ("--seed", dict(type=int, default=0)),
        ("--state", dict(default="zero")),
    ])
    add("manybody", run_manybody, [
        ("--L", dict(type=int, default=8)),
        ("--k", dict(type=int, default=1)),
        ("--t-max", dict(dest="t_max", type=int, default=1000)),
        ("--n-states", dict(dest="n_states", type=int, default=10)),
        ("--seed", dict(type=int, default=0)),
        ("--windowed", dict(action="store_true")),
        ("--windows-per-decade", dict(dest="windows_per_decade", type=int,
                                      default=20)),
    ])
    add("deep-therm", run_deep_therm, [
        ("--L", dict(type=int, default=10)),
        ("--n-a", dict(dest="n_a", type=int, default=2)),
        ("--k", dict(type=int, default=1)),
        ("--t-max", dict(dest="t_max", type=int, default=120)),
        ("--n-states", dict(dest="n_states", type=int, default=10)),
        ("--seed", dict(type=int, default=0)),
    ])
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    from .drive import LedgerViolation
    from .manybody import BudgetExceeded

    try:
        cfg = _resolve(args, parser)
        t0 = time.time()
        outputs, flags, seeds = args.func(cfg)
        wall = time.time() - t0
        if cfg.get("out_dir"):
            manifest = Path(cfg["out_dir"]) / f"{args.subcommand.replace('-', '_')}_manifest.json"
            write_manifest(manifest, args.subcommand, cfg, seeds, wall, flags,
                           outputs)
        return EXIT_OK
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        if isinstance(exc, BudgetExceeded):
            print(f"resource limit: {exc}", file=sys.stderr)
            return EXIT_RESOURCE
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except LedgerViolation as exc:
        print(f"ledger violation: {exc}", file=sys.stderr)
        return EXIT_LEDGER
    except _TotalFailure as exc:
        print(f"ledger violation: {exc}", file=sys.stderr)
        return EXIT_LEDGER


if __name__ == "__main__":
    sys.exit(main())

"""Why time-independent evolution can never be completely ergodic:
the stationary 2-replica moment keeps a finite trace distance to the
Haar moment, bounded below by B(d) for every Hamiltonian and state.

The demo samples random (H, psi) pairs and walks the certificate chain
    Delta >= dephased bound >= diagonal bound >= B(d).

Run:  python demos/no_go_bound.py
"""

import numpy as np

from fibdrive import stationary as st

rng = np.random.default_rng(7)

print(" d    Delta^(2)   dephased   diagonal     B(d)    margin")
for d in (2, 3, 4, 5):
    worst = None
    for _ in range(50):
        cert = st.delta2_time_independent(st.random_instance(d, rng))
        if worst is None or cert.delta2 - cert.bound < worst.delta2 - worst.bound:
            worst = cert
    print(f"{d:>2}   {worst.delta2:9.5f}  {worst.dephased:9.5f}  "
          f"{worst.diagonal:9.5f}  {worst.bound:8.5f}  "
          f"{worst.delta2 - worst.bound:9.2e}")

print("\n(the 'margin' column is the worst case over 50 random instances;")
print(" it never goes negative)")

xi = (2.0 / (2 * 3)) ** 0.5
print("\nsimplex lemma oracle at d=2:")
print(f"  brute-force minimum of F: {st.brute_min_F(2, xi, 1e-3):.5f}")
print(f"  analytic floor          : {st.lemma_F_floor(2, xi):.5f}")

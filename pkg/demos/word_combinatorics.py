"""Tour of the word machinery: concatenation vs rotation coding,
factor complexity, metallic ratios, and Zeckendorf splittings.

Run:  python demos/word_combinatorics.py
"""

import math

from fibdrive import words as wd

for m in (1, 2, 3):
    word = wd.fib_word_concat(m, 40)
    coded = wd.code_rotation(m, 0.0, 40)
    mu = wd.metallic_ratio(m)
    om = wd.omega_angle(m)
    print(f"order m={m}: metallic ratio {mu:.6f}, rotation step {om:.6f} rad")
    print(f"  concatenated : {word.symbols}")
    print(f"  rotation-coded: {coded.symbols}")
    assert word.symbols == coded.symbols

print("\nfactor complexity of the m=1 word (Sturmian words sit at n+1,")
print("random words at 2^n):")
word = wd.fib_word_concat(1, 10 ** 4)
for n in (1, 2, 4, 8, 16):
    print(f"  length {n:>2}: {wd.symbolic_complexity(word, n)} distinct factors")

print("\nZeckendorf splittings (indices of nonconsecutive Fibonacci numbers):")
for t in (4, 10, 100, 1999):
    idx = wd.zeckendorf(t)
    parts = " + ".join(f"F_{c}" for c in idx)
    vals = " + ".join(str(wd.fibonacci_number(c)) for c in idx)
    print(f"  {t} = {parts} = {vals}")

print("\ngrowth: S_n for m=1 reaches astronomical times quickly;")
seq = wd.gen_fib_numbers(1, 200)
print(f"  S_50 = {seq[50]}")
print(f"  S_200 has {len(str(seq[200]))} digits")
print(f"  S_200 / S_199 - golden ratio = "
      f"{seq[200] / seq[199] - (1 + math.sqrt(5)) / 2:.2e}")

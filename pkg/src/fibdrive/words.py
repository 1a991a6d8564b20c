"""Generalized Fibonacci (Sturmian) words and Fibonacci numeration.

The order-m word is built either by the concatenation rule
W_{j+1} = (W_j)^m W_{j-1} starting from W_0 = "1", W_1 = "0", or by coding
the irrational circle rotation with step Omega(m): symbol n is 0 when
n*Omega + theta0 lands (mod 2pi) inside [0, 2pi - Omega], and 1 otherwise.
Both constructions agree symbol for symbol when theta0 = 0.

Also provided: the integer recurrence S_n = m S_{n-1} + S_{n-2} whose
values are the canonical evaluation times for the drive, symbolic (factor)
complexity, and the Zeckendorf decomposition of an integer into
nonconsecutive Fibonacci numbers (order m = 1 only).
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp, mpf, workprec


class AmbiguousBoundary(ArithmeticError):
    """A rotation-coded symbol could not be certified at any tried precision."""


@dataclass(frozen=True)
class GenFibSeq:
    """Prefix of the integer sequence S_0 = S_1 = 1, S_n = m S_{n-1} + S_{n-2}."""

    m: int
    values: tuple

    def __getitem__(self, n):
        return self.values[n]

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class FibWord:
    """A certified prefix of an infinite binary word.

    origin is "concat" for the concatenation construction, "rotation" for
    rotation coding (with the phase recorded), or "coin" for random
    baselines produced elsewhere.
    """

    m: int
    symbols: str
    origin: str = "concat"
    theta0: float = 0.0

    def __len__(self):
        return len(self.symbols)

    def __getitem__(self, i):
        return int(self.symbols[i])

    def prefix(self, length):
        if length > len(self.symbols):
            raise ValueError("requested prefix exceeds generated length")
        return self.symbols[:length]


def gen_fib_numbers(m, n_max):
    """Exact values S_0 .. S_n_max for order m (python ints, arbitrary size)."""
    if m < 1:
        raise ValueError("order m must be a positive integer")
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    vals = [1, 1]
    for _ in range(2, n_max + 1):
        vals.append(m * vals[-1] + vals[-2])
    return GenFibSeq(m=m, values=tuple(vals))


def fib_word_concat(m, length):
    """Length-`length` prefix of the order-m word, by repeated concatenation.

    The words are prefix-stable: each W_{j+1} = (W_j)^m W_{j-1} begins with
    W_j, so growing until the buffer is long enough and slicing is exact.
    """
    if m < 1 or length < 1:
        raise ValueError("m and length must be positive")
    prev, cur = "1", "0"
    while len(cur) < length:
        prev, cur = cur, cur * m + prev
    return FibWord(m=m, symbols=cur[:length], origin="concat")


def metallic_ratio(m, policy=None):
    """(m + sqrt(m^2 + 4)) / 2: golden ratio at m=1, silver at m=2, ...

    Evaluated at the policy precision when one is given (returns mpf),
    otherwise as a hardware double.
    """
    if m < 1:
        raise ValueError("order m must be positive")
    if policy is None or policy.mode == "double":
        return (m + (m * m + 4) ** 0.5) / 2
    with workprec(policy.bits):
        return (m + mp.sqrt(m * m + 4)) / 2


def omega_angle(m, policy=None):
    """Rotation step Omega(m) = (pi/m) (2 + m - sqrt(m^2 + 4)), in (0, 2pi)."""
    if m < 1:
        raise ValueError("order m must be positive")
    if policy is None or policy.mode == "double":
        import math

        return math.pi / m * (2 + m - (m * m + 4) ** 0.5)
    with workprec(policy.bits):
        return mp.pi / m * (2 + m - mp.sqrt(m * m + 4))


def _alpha_fixed_point(m, theta0, bits):
    """(alpha, phi) as integers scaled by 2^bits.

    alpha = Omega / 2pi = 1 - 1/(1 + 1/mu); phi = theta0 / 2pi.
    """
    with workprec(bits + 16):
        mu = (m + mp.sqrt(m * m + 4)) / 2
        alpha = 1 - 1 / (1 + 1 / mu)
        phi = mpf(theta0) / (2 * mp.pi)
        scale = mpf(2) ** bits
        a_int = int(mp.floor(alpha * scale))
        p_int = int(mp.floor(phi * scale)) % (1 << bits)
    return a_int, p_int


def code_rotation(m, theta0, length, max_retries=6):
    """Order-m word prefix by coding the circle rotation with phase theta0.

    Arithmetic runs in fixed point with 64 + ceil(log2 n) + 16 fractional
    bits, so the accumulated representation error stays far below the
    2^-32 guard band kept around the interval endpoints.  Any symbol whose
    coded point falls inside the guard band triggers a retry at doubled
    precision; if ambiguity survives all retries the call fails loudly
    instead of guessing.
    """
    if m < 1 or length < 1:
        raise ValueError("m and length must be positive")
    import math

    if not (0 <= theta0 < 2 * math.pi):
        raise ValueError("theta0 must lie in [0, 2pi)")
    bits = 64 + max(0, (length).bit_length()) + 16
    for _ in range(max_retries + 1):
        symbols = _code_rotation_at_bits(m, theta0, length, bits)
        if symbols is not None:
            return FibWord(m=m, symbols=symbols, origin="rotation", theta0=theta0)
        bits *= 2
    raise AmbiguousBoundary(
        f"rotation coding stayed ambiguous near an interval endpoint up to {bits // 2} bits")


def _code_rotation_at_bits(m, theta0, length, bits):
    alpha, phi, = _alpha_fixed_point(m, theta0, bits)
    modulus = 1 << bits
    # interval split point: frac in [0, 1 - alpha] codes 0, else 1
    split = modulus - alpha
    guard = 1 << (bits - 32)
    # representation error of n*alpha is below n ulps; keep it inside the guard
    drift = length + 2
    out = []
    x = phi
    for _ in range(length):
        x = (x + alpha) % modulus
        if (
            min(x, modulus - x) < guard + drift
            or abs(x - split) < guard + drift
        ):
            return None
        out.append("0" if x <= split else "1")
    return "".join(out)


def symbolic_complexity(word, n):
    """Number of distinct length-n factors in the word's prefix.

    Requires the prefix to be at least 10*n long: for the Sturmian words
    used here every factor appears well within that margin, so the count
    is certifiable without word-specific theory.
    """
    if n < 1:
        raise ValueError("factor length must be positive")
    s = word.symbols if isinstance(word, FibWord) else str(word)
    if len(s) < 10 * n:
        raise ValueError(
            f"prefix of length {len(s)} too short to certify complexity at n={n}; "
            f"need at least {10 * n}")
    return len({s[i:i + n] for i in range(len(s) - n + 1)})


def zeckendorf(T):
    """Decompose T >= 1 into nonconsecutive Fibonacci numbers, greedily.

    Returns descending indices [c_1 > c_2 > ...] with T = sum F_{c_i},
    using F_1 = F_2 = 1 and indices >= 2 (so F_2 is the unit used).
    Greedy choice of the largest F_c <= remainder is the unique valid
    decomposition under the nonconsecutivity constraint.
    """
    if T < 1:
        raise ValueError("Zeckendorf representation needs T >= 1")
    fibs = [1, 1]  # F_1, F_2 at indices 0, 1
    while fibs[-1] < T:
        fibs.append(fibs[-1] + fibs[-2])
    out = []
    rem = T
    c = len(fibs) - 1  # index into fibs; F_{c+1} in the 1-based convention
    while rem > 0:
        while fibs[c] > rem:
            c -= 1  # rem >= 1 = fibs[1], so c never drops below 1 here
        out.append(c + 1)
        rem -= fibs[c]
        c -= 2  # greedy remainder is < fibs[c-1], so this skip is safe
        if rem > 0 and c < 1:
            c = 1
    return out


def fibonacci_number(c):
    """F_c with F_1 = F_2 = 1."""
    if c < 1:
        raise ValueError("index must be >= 1")
    a, b = 1, 1
    for _ in range(c - 2):
        a, b = b, a + b
    return b if c >= 2 else a

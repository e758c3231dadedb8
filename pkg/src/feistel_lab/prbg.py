"""Seeded bit generators: number-theoretic streams and a fast utility stream.

Every generator here is replayable: the same parameters, seed, and request
sequence produce identical bits. Experiments derive all of their randomness
from caller-supplied master seeds so that any run can be reproduced exactly.
"""

from __future__ import annotations

import functools
import hashlib
import math
import random
from dataclasses import dataclass

from .bits import BitString

__all__ = [
    "derive_seed",
    "is_probable_prime",
    "is_generator",
    "BitGenerator",
    "FastBitGenerator",
    "fast_generator",
    "BmParams",
    "BmGenerator",
    "bm_generate",
    "BbsParams",
    "BbsGenerator",
    "bbs_generate",
    "generate_bbs_params",
]

MILLER_RABIN_ROUNDS = 64

# Hard-core predicate of the discrete-log stream needs a full log table,
# so larger moduli are refused.
BM_MAX_MODULUS = 1 << 20


def _canonical(part: object) -> str:
    if isinstance(part, BitString):
        return f"b{part.width}.{part.value}"
    return str(part)


def derive_seed(*parts: object) -> int:
    """Stable 64-bit sub-seed from labels, integers, or bit strings.

    Used to give every trial, round, and oracle its own independent stream
    while keeping whole experiments reproducible from one master seed.
    """
    text = "\x1f".join(_canonical(p) for p in parts)
    digest = hashlib.sha256(text.encode()).digest()
    return int.from_bytes(digest[:8], "big")


def is_probable_prime(num: int, rounds: int = MILLER_RABIN_ROUNDS) -> bool:
    """Miller-Rabin with ``rounds`` deterministic-per-input random bases."""
    if num < 2:
        return False
    for small in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if num % small == 0:
            return num == small
    d = num - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    rng = random.Random(derive_seed("miller-rabin", num))
    for _ in range(rounds):
        a = rng.randrange(2, num - 1)
        x = pow(a, d, num)
        if x == 1 or x == num - 1:
            continue
        for _ in range(s - 1):
            x = x * x % num
            if x == num - 1:
                break
        else:
            return False
    return True


def _pollard_rho(num: int) -> int:
    if num % 2 == 0:
        return 2
    rng = random.Random(derive_seed("pollard-rho", num))
    while True:
        x = rng.randrange(2, num)
        y = x
        c = rng.randrange(1, num)
        d = 1
        while d == 1:
            x = (x * x + c) % num
            y = (y * y + c) % num
            y = (y * y + c) % num
            d = math.gcd(abs(x - y), num)
        if d != num:
            return d


def _prime_factors(num: int) -> set[int]:
    factors: set[int] = set()
    for p in (2, 3):
        while num % p == 0:
            factors.add(p)
            num //= p
    f = 5
    while f * f <= num and f < (1 << 20):
        for p in (f, f + 2):
            while num % p == 0:
                factors.add(p)
                num //= p
        f += 6
    if num > 1:
        if is_probable_prime(num):
            factors.add(num)
        else:
            d = _pollard_rho(num)
            factors |= _prime_factors(d)
            factors |= _prime_factors(num // d)
    return factors


def is_generator(g: int, p: int) -> bool:
    """True iff g generates the full multiplicative group mod prime p."""
    if not 1 <= g < p:
        return False
    order = p - 1
    return all(pow(g, order // q, p) != 1 for q in _prime_factors(order))


class BitGenerator:
    """Replayable bit stream: ``next_bits`` is deterministic given the seed."""

    def next_bits(self, count: int) -> BitString:
        raise NotImplementedError

    def next_int(self, bits: int) -> int:
        return self.next_bits(bits).value

    def reseed(self, seed: object) -> None:
        raise NotImplementedError


class FastBitGenerator(BitGenerator):
    """Deterministic utility stream for high-volume experiments.

    Backed by the stdlib Mersenne Twister; passes basic frequency checks but
    is NOT claimed cryptographically pseudo-random. Integer seeds are fed to
    the engine directly (they are usually ``derive_seed`` outputs already);
    anything else is canonicalized first.
    """

    def __init__(self, seed: object) -> None:
        self._rng = random.Random(seed if isinstance(seed, int) else derive_seed("fast", seed))

    def next_bits(self, count: int) -> BitString:
        if count < 0:
            raise ValueError("count must be >= 0")
        return BitString(count, self._rng.getrandbits(count) if count else 0)

    def next_int(self, bits: int) -> int:
        return self._rng.getrandbits(bits) if bits else 0

    def reseed(self, seed: object) -> None:
        self._rng.seed(seed if isinstance(seed, int) else derive_seed("fast", seed))


def fast_generator(seed: object) -> FastBitGenerator:
    """Fast seeded stream for experiments (replayable, not cryptographic)."""
    return FastBitGenerator(seed)


def _parse_kv(text: str, fields: tuple[str, ...]) -> dict[str, int]:
    values: dict[str, int] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        key, sep, raw = line.partition("=")
        if not sep:
            raise ValueError(f"expected key=value, got {line!r}")
        values[key.strip()] = int(raw)
    missing = [f for f in fields if f not in values]
    if missing:
        raise ValueError(f"missing fields: {', '.join(missing)}")
    return values


@dataclass(frozen=True)
class BmParams:
    """Discrete-log stream parameters: prime p, group generator g, start x0."""

    p: int
    g: int
    x0: int

    def __post_init__(self) -> None:
        if not is_probable_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if not is_generator(self.g, self.p):
            raise ValueError(f"g={self.g} does not generate the group mod {self.p}")
        if not 0 <= self.x0 < self.p:
            raise ValueError(f"x0={self.x0} out of range [0, {self.p})")

    def to_text(self) -> str:
        """Key-value form with decimal integers, one field per line."""
        return f"p={self.p}\ng={self.g}\nx0={self.x0}\n"

    @classmethod
    def from_text(cls, text: str) -> "BmParams":
        kv = _parse_kv(text, ("p", "g", "x0"))
        return cls(p=kv["p"], g=kv["g"], x0=kv["x0"])


@functools.lru_cache(maxsize=8)
def _dlog_table(p: int, g: int) -> dict[int, int]:
    table: dict[int, int] = {}
    x = 1
    for e in range(p - 1):
        table[x] = e
        x = x * g % p
    return table


class BmGenerator(BitGenerator):
    """Discrete-log hard-core bit stream, desk-scale moduli only.

    State update x <- g^x mod p; emitted bit is 1 iff log_g(x) <= (p-1)/2.
    The state never leaves {1..p-1} (0 has no discrete log, so the predicate
    domain is the multiplicative group, not {0..p-1}).
    """

    def __init__(self, params: BmParams) -> None:
        if params.p > BM_MAX_MODULUS:
            raise ValueError(
                f"modulus {params.p} exceeds {BM_MAX_MODULUS}: the hard-core "
                "predicate needs a full discrete-log table"
            )
        self.params = params
        self._table = _dlog_table(params.p, params.g)
        self._x = params.x0
        self._half = (params.p - 1) // 2

    def next_bits(self, count: int) -> BitString:
        if count < 0:
            raise ValueError("count must be >= 0")
        p, g = self.params.p, self.params.g
        value = 0
        x = self._x
        for _ in range(count):
            x = pow(g, x, p)
            value = (value << 1) | (1 if self._table[x] <= self._half else 0)
        self._x = x
        return BitString(count, value)

    def reseed(self, seed: object) -> None:
        self._x = derive_seed("bm-reseed", seed) % self.params.p


def bm_generate(params: BmParams, count: int) -> BitString:
    """First ``count`` bits of the discrete-log stream for ``params``."""
    return BmGenerator(params).next_bits(count)


@dataclass(frozen=True)
class BbsParams:
    """Quadratic-residue stream parameters: Blum primes p, q and seed s."""

    p: int
    q: int
    n: int
    s: int
    x0: int

    def __post_init__(self) -> None:
        for prime in (self.p, self.q):
            if prime % 4 != 3 or not is_probable_prime(prime):
                raise ValueError(f"{prime} is not a prime congruent to 3 mod 4")
        if self.n != self.p * self.q:
            raise ValueError("n must equal p*q")
        if not 1 <= self.s < self.n or math.gcd(self.s, self.n) != 1:
            raise ValueError("s must lie in [1, n) and be coprime to n")
        if self.x0 != self.s * self.s % self.n:
            raise ValueError("x0 must equal s^2 mod n")

    @classmethod
    def create(cls, p: int, q: int, s: int) -> "BbsParams":
        n = p * q
        return cls(p=p, q=q, n=n, s=s, x0=s * s % n)

    def to_text(self) -> str:
        """Key-value form with decimal integers, one field per line."""
        return f"p={self.p}\nq={self.q}\nn={self.n}\ns={self.s}\nx0={self.x0}\n"

    @classmethod
    def from_text(cls, text: str) -> "BbsParams":
        kv = _parse_kv(text, ("p", "q", "n", "s", "x0"))
        return cls(p=kv["p"], q=kv["q"], n=kv["n"], s=kv["s"], x0=kv["x0"])


class BbsGenerator(BitGenerator):
    """Quadratic-residue bit stream: x <- x^2 mod n, emit the LSB of x."""

    def __init__(self, params: BbsParams) -> None:
        self.params = params
        self._x = params.x0

    def next_bits(self, count: int) -> BitString:
        if count < 0:
            raise ValueError("count must be >= 0")
        n = self.params.n
        x = self._x
        value = 0
        for _ in range(count):
            x = x * x % n
            value = (value << 1) | (x & 1)
        self._x = x
        return BitString(count, value)

    def reseed(self, seed: object) -> None:
        n = self.params.n
        s = derive_seed("bbs-reseed", seed) % (n - 1) + 1
        while math.gcd(s, n) != 1:
            s = s + 1 if s < n - 1 else 1
        self._x = s * s % n


def bbs_generate(params: BbsParams, count: int) -> BitString:
    """First ``count`` bits of the quadratic-residue stream for ``params``."""
    return BbsGenerator(params).next_bits(count)


def generate_bbs_params(bit_length: int, entropy: object) -> BbsParams:
    """Draw Blum primes of ``bit_length`` bits and a coprime seed.

    Deterministic given ``entropy``; retries internally until primes are
    found. Distinct primes are preferred but equal ones are accepted when the
    bit length admits only one candidate.
    """
    if bit_length < 3:
        raise ValueError("bit_length must be >= 3")
    rng = FastBitGenerator(derive_seed("bbs-params", entropy))

    def draw_prime() -> int:
        while True:
            c = rng.next_int(bit_length) | (1 << (bit_length - 1)) | 3
            if is_probable_prime(c):
                return c

    p = draw_prime()
    q = draw_prime()
    for _ in range(64):
        if q != p:
            break
        q = draw_prime()
    n = p * q
    while True:
        s = rng.next_int(2 * bit_length) % (n - 1) + 1
        if math.gcd(s, n) == 1:
            break
    return BbsParams(p=p, q=q, n=n, s=s, x0=s * s % n)

"""Empirical checks behind the minimal-round results.

Three families of checks:

* collision ("BAD") events: how often designated intermediate blocks collide
  across adversarially shaped query pairs, compared against closed-form
  bounds;
* the bit-matrix rank argument that decides which ratios make the widened
  structure mix fully (nonsingular exactly for odd k);
* chi-square uniformity of outputs over freshly keyed instances.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bits import BitString
from .feistel import UfnKind, UfnParams, ideal_ufn
from .prbg import FastBitGenerator, derive_seed
from .stats import chi_square_critical, chi_square_statistic, wilson_halfwidth

__all__ = [
    "secure_rounds",
    "watched_rounds",
    "BadEventSpec",
    "bad_event_bound",
    "BadProbReport",
    "bad_event_counts",
    "estimate_bad_prob",
    "Gf2Matrix",
    "build_ufn2_matrix",
    "gf2_nonsingular",
    "UniformityReport",
    "uniformity_counts",
    "conditional_uniformity_check",
]

_MAX_UNIFORMITY_STATE_BITS = 12


def secure_rounds(kind: UfnKind, k: int) -> int:
    """Minimal round count at which each structure stops being attackable."""
    if kind is UfnKind.BALANCED:
        return 3
    if kind in (UfnKind.SOURCE_HEAVY, UfnKind.TARGET_HEAVY):
        return k + 2
    return 2 * k + 1


def watched_rounds(kind: UfnKind, k: int) -> tuple[int, ...]:
    """Rounds whose intermediate collisions constitute the BAD event."""
    if kind is UfnKind.SOURCE_HEAVY:
        return tuple(range(1, k + 2))
    if kind is UfnKind.TARGET_HEAVY:
        return (k, k + 1)
    if kind is UfnKind.UFN2:
        return tuple(range(k, 2 * k + 1))
    raise ValueError(f"no collision-event definition for kind {kind.value!r}")


@dataclass(frozen=True)
class BadEventSpec:
    """Which structure, which rounds to watch, and how many queries."""

    kind: UfnKind
    rounds_watched: tuple[int, ...]
    m: int

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError("query count m must be >= 1")

    @classmethod
    def for_structure(cls, kind: UfnKind, k: int, m: int) -> "BadEventSpec":
        return cls(kind=kind, rounds_watched=watched_rounds(kind, k), m=m)


def bad_event_bound(kind: UfnKind, n: int, k: int, m: int) -> float:
    """Closed-form upper bound on the collision-event probability."""
    if kind in (UfnKind.SOURCE_HEAVY, UfnKind.UFN2):
        return (k + 1) * m * m / (1 << (n + 1))
    if kind is UfnKind.TARGET_HEAVY:
        return m * m / (1 << n)
    raise ValueError(f"no collision-event bound for kind {kind.value!r}")


def _shaped_queries(
    kind: UfnKind, n: int, k: int, m: int, shaping: str, seed: int
) -> list[BitString]:
    width = (k + 1) * n
    if shaping == "adversarial":
        # Worst case from the bound derivations: all queries share their
        # trailing blocks and differ in one leading block, so collisions
        # hinge entirely on fresh round-function outputs.
        if m > (1 << n):
            raise ValueError(f"m={m} exceeds the 2^{n} distinct values of the varied block")
        varied = 1 if kind is UfnKind.SOURCE_HEAVY else 0
        shift = (k - varied) * n
        return [BitString(width, v << shift) for v in range(m)]
    if shaping == "uniform":
        if m > (1 << width):
            raise ValueError(f"m={m} exceeds the 2^{width} distinct states")
        gen = FastBitGenerator(seed)
        seen: set[int] = set()
        queries = []
        while len(queries) < m:
            v = gen.next_int(width)
            if v not in seen:
                seen.add(v)
                queries.append(BitString(width, v))
        return queries
    raise ValueError(f"unknown shaping {shaping!r}; expected 'adversarial' or 'uniform'")


def bad_event_counts(
    spec: BadEventSpec,
    n: int,
    k: int,
    seed: int,
    start: int,
    count: int,
    shaping: str = "adversarial",
) -> int:
    """Trials in [start, start+count) whose watched rounds saw a collision."""
    params = UfnParams(spec.kind, n, k, secure_rounds(spec.kind, k))
    source_heavy = spec.kind is UfnKind.SOURCE_HEAVY
    hits = 0
    for t in range(start, start + count):
        perm = ideal_ufn(params, derive_seed(seed, "trial", t))
        queries = _shaped_queries(spec.kind, n, k, spec.m, shaping, derive_seed(seed, "queries", t))
        seen: list[set] = [set() for _ in spec.rounds_watched]
        hit = False
        for q in queries:
            states = perm.trace_states(q)
            for j, rd in enumerate(spec.rounds_watched):
                value = states[rd][1:] if source_heavy else states[rd][-1]
                if value in seen[j]:
                    hit = True
                seen[j].add(value)
            if hit:
                break
        if hit:
            hits += 1
    return hits


@dataclass(frozen=True)
class BadProbReport:
    kind: UfnKind
    n: int
    k: int
    m: int
    trials: int
    hits: int
    empirical: float
    ci_halfwidth: float
    bound: float
    shaping: str
    seed: int


def estimate_bad_prob(
    spec: BadEventSpec,
    n: int,
    k: int,
    trials: int,
    seed: int,
    shaping: str = "adversarial",
) -> BadProbReport:
    """Empirical collision-event frequency with a Wilson 95% half-width."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    hits = bad_event_counts(spec, n, k, seed, 0, trials, shaping)
    return BadProbReport(
        kind=spec.kind,
        n=n,
        k=k,
        m=spec.m,
        trials=trials,
        hits=hits,
        empirical=hits / trials,
        ci_halfwidth=wilson_halfwidth(hits, trials),
        bound=bad_event_bound(spec.kind, n, k, spec.m),
        shaping=shaping,
        seed=seed,
    )


@dataclass(frozen=True)
class Gf2Matrix:
    """Square bit matrix; each row is an integer, leftmost column = MSB."""

    size: int
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError("size must be >= 1")
        if len(self.rows) != self.size:
            raise ValueError(f"expected {self.size} rows, got {len(self.rows)}")
        if any(not 0 <= row < (1 << self.size) for row in self.rows):
            raise ValueError("row does not fit the matrix size")

    @classmethod
    def from_lists(cls, rows: list[list[int]]) -> "Gf2Matrix":
        size = len(rows)
        packed = []
        for row in rows:
            if len(row) != size:
                raise ValueError("matrix must be square")
            value = 0
            for bit in row:
                if bit not in (0, 1):
                    raise ValueError("entries must be 0 or 1")
                value = (value << 1) | bit
            packed.append(value)
        return cls(size, tuple(packed))

    def entry(self, i: int, j: int) -> int:
        return (self.rows[i] >> (self.size - 1 - j)) & 1

    def to_lists(self) -> list[list[int]]:
        return [[self.entry(i, j) for j in range(self.size)] for i in range(self.size)]


def build_ufn2_matrix(k: int) -> Gf2Matrix:
    """(k+1) x (k+1) all-ones matrix with zeros on the anti-diagonal.

    This is the matrix carrying the last k+1 fresh round-function values to
    the output blocks of the widened structure; row i is zero exactly in
    column k-i.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    size = k + 1
    full = (1 << size) - 1
    return Gf2Matrix(size, tuple(full ^ (1 << i) for i in range(size)))


def gf2_nonsingular(matrix: Gf2Matrix) -> bool:
    """Full-rank test by elimination with row XOR and interchange only."""
    rows = list(matrix.rows)
    size = matrix.size
    rank = 0
    for col_bit in reversed(range(size)):
        pivot = None
        for r in range(rank, size):
            if (rows[r] >> col_bit) & 1:
                pivot = r
                break
        if pivot is None:
            return False
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for r in range(size):
            if r != rank and ((rows[r] >> col_bit) & 1):
                rows[r] ^= rows[rank]
        rank += 1
    return True


def uniformity_counts(
    kind: UfnKind, n: int, k: int, r: int, seed: int, start: int, count: int
) -> list[int]:
    """Histogram of outputs at a fixed input over freshly keyed instances."""
    params = UfnParams(kind, n, k, r)
    bins = [0] * (1 << params.state_bits)
    probe = BitString(params.state_bits, 0)
    for t in range(start, start + count):
        perm = ideal_ufn(params, derive_seed(seed, "trial", t))
        bins[perm.encrypt(probe).value] += 1
    return bins


@dataclass(frozen=True)
class UniformityReport:
    kind: UfnKind
    n: int
    k: int
    r: int
    trials: int
    discarded: int
    dof: int
    statistic: float
    critical_value: float
    significance: float
    passed: bool


def conditional_uniformity_check(
    kind: UfnKind,
    n: int,
    k: int,
    r: int,
    trials: int,
    seed: int,
    significance: float = 0.01,
) -> UniformityReport:
    """Chi-square goodness-of-fit of outputs against the uniform distribution.

    Each trial keys a fresh instance and contributes one output. A lone query
    admits no cross-query collision, so the conditioning event is vacuous and
    no trial is discarded.
    """
    params = UfnParams(kind, n, k, r)
    if params.state_bits > _MAX_UNIFORMITY_STATE_BITS:
        raise ValueError(
            f"state space of {params.state_bits} bits is too large to bin "
            f"(max {_MAX_UNIFORMITY_STATE_BITS})"
        )
    if trials < 1:
        raise ValueError("trials must be >= 1")
    bins = uniformity_counts(kind, n, k, r, seed, 0, trials)
    statistic = chi_square_statistic(bins)
    dof = len(bins) - 1
    critical = chi_square_critical(dof, significance)
    return UniformityReport(
        kind=kind,
        n=n,
        k=k,
        r=r,
        trials=trials,
        discarded=0,
        dof=dof,
        statistic=statistic,
        critical_value=critical,
        significance=significance,
        passed=statistic < critical,
    )

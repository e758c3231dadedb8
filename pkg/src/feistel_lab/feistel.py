"""Permutation structures built from round-function oracles.

Four round shapes over a state of equal-width sub-blocks:

* ``balanced``: two blocks, round function n -> n.
* ``source-heavy``: k+1 blocks, the k rightmost feed a kn -> n round
  function whose output is XORed into the single left block.
* ``target-heavy``: k+1 blocks, the rightmost feeds an n -> kn round
  function whose output is cut into k slices, one per left block.
* ``ufn2``: like target-heavy but with an n -> n round function whose single
  output is XORed into every left block; this is the shape that widens an
  n-bit block cipher to (k+1)n bits.

Every round is a bijection, so any composition encrypts and decrypts.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

from .bits import BitString, BlockState, partition
from .prbg import FastBitGenerator, derive_seed
from .prf import (
    DEFAULT_TABLE_CAP,
    FunctionOracle,
    GgmFunctionOracle,
    IdealFunctionOracle,
    split_master_key,
)

__all__ = [
    "UfnKind",
    "UfnParams",
    "UfnPermutation",
    "round_balanced",
    "round_source_heavy",
    "round_target_heavy",
    "round_ufn2",
    "ideal_round_oracles",
    "ggm_round_oracles",
    "ideal_ufn",
    "ggm_ufn",
    "extend_block_cipher",
]


class UfnKind(str, Enum):
    BALANCED = "balanced"
    SOURCE_HEAVY = "source-heavy"
    TARGET_HEAVY = "target-heavy"
    UFN2 = "ufn2"


@dataclass(frozen=True)
class UfnParams:
    """One permutation family: structure kind, sub-block width n, ratio k, rounds r.

    The state is (k+1) sub-blocks of n bits. ``balanced`` is the k=1 case and
    rejects other ratios; at k=1 all four kinds coincide block for block.
    """

    kind: UfnKind
    n: int
    k: int
    r: int

    def __post_init__(self) -> None:
        if self.n < 1 or self.k < 1 or self.r < 1:
            raise ValueError("n, k, and r must all be >= 1")
        if self.kind is UfnKind.BALANCED and self.k != 1:
            raise ValueError("balanced structure requires k == 1")

    @property
    def state_bits(self) -> int:
        return (self.k + 1) * self.n

    @property
    def block_count(self) -> int:
        return self.k + 1

    @property
    def round_in_bits(self) -> int:
        return self.k * self.n if self.kind is UfnKind.SOURCE_HEAVY else self.n

    @property
    def round_out_bits(self) -> int:
        return self.k * self.n if self.kind is UfnKind.TARGET_HEAVY else self.n


def _check_oracle(params: UfnParams, f: FunctionOracle) -> None:
    if f.in_bits != params.round_in_bits or f.out_bits != params.round_out_bits:
        raise ValueError(
            f"{params.kind.value} with n={params.n}, k={params.k} needs a "
            f"{params.round_in_bits}->{params.round_out_bits} round function, "
            f"got {f.in_bits}->{f.out_bits}"
        )


def _forward(params: UfnParams, f: FunctionOracle, blocks: tuple[int, ...]) -> tuple[int, ...]:
    n, k = params.n, params.k
    kind = params.kind
    if kind is UfnKind.SOURCE_HEAVY:
        acc = 0
        for b in blocks[1:]:
            acc = (acc << n) | b
        return blocks[1:] + (blocks[0] ^ f.eval_int(acc),)
    if kind is UfnKind.TARGET_HEAVY:
        image = f.eval_int(blocks[-1])
        mask = (1 << n) - 1
        out = [blocks[-1]]
        for i in range(k):
            out.append(blocks[i] ^ ((image >> ((k - 1 - i) * n)) & mask))
        return tuple(out)
    if kind is UfnKind.UFN2:
        image = f.eval_int(blocks[-1])
        return (blocks[-1],) + tuple(b ^ image for b in blocks[:-1])
    left, right = blocks
    return (right, left ^ f.eval_int(right))


def _inverse(params: UfnParams, f: FunctionOracle, blocks: tuple[int, ...]) -> tuple[int, ...]:
    n, k = params.n, params.k
    kind = params.kind
    if kind is UfnKind.SOURCE_HEAVY:
        acc = 0
        for b in blocks[:-1]:
            acc = (acc << n) | b
        return (blocks[-1] ^ f.eval_int(acc),) + blocks[:-1]
    if kind is UfnKind.TARGET_HEAVY:
        image = f.eval_int(blocks[0])
        mask = (1 << n) - 1
        out = []
        for i in range(k):
            out.append(blocks[i + 1] ^ ((image >> ((k - 1 - i) * n)) & mask))
        out.append(blocks[0])
        return tuple(out)
    if kind is UfnKind.UFN2:
        image = f.eval_int(blocks[0])
        return tuple(b ^ image for b in blocks[1:]) + (blocks[0],)
    left, right = blocks
    return (right ^ f.eval_int(left), left)


def _round_state(params: UfnParams, f: FunctionOracle, state: BlockState) -> BlockState:
    _check_oracle(params, f)
    if state.count != params.block_count or state.n != params.n:
        raise ValueError(
            f"expected {params.block_count} blocks of {params.n} bits, "
            f"got {state.count} of {state.n}"
        )
    out = _forward(params, f, tuple(b.value for b in state.blocks))
    return BlockState(tuple(BitString(params.n, v) for v in out))


def round_balanced(f: FunctionOracle, state: BlockState) -> BlockState:
    """(L, R) -> (R, L xor f(R))."""
    return _round_state(UfnParams(UfnKind.BALANCED, state.n, 1, 1), f, state)


def round_source_heavy(f: FunctionOracle, state: BlockState) -> BlockState:
    """(L, R_1..R_k) -> (R_1..R_k, L xor f(R_1 || ... || R_k))."""
    k = state.count - 1
    return _round_state(UfnParams(UfnKind.SOURCE_HEAVY, state.n, k, 1), f, state)


def round_target_heavy(f: FunctionOracle, state: BlockState) -> BlockState:
    """(L_1..L_k, R) -> (R, L_1 xor C_1(f(R)), ..., L_k xor C_k(f(R))).

    C_i is the i-th n-bit slice of f(R), leftmost first.
    """
    k = state.count - 1
    return _round_state(UfnParams(UfnKind.TARGET_HEAVY, state.n, k, 1), f, state)


def round_ufn2(f: FunctionOracle, state: BlockState) -> BlockState:
    """(L_1..L_k, R) -> (R, L_1 xor f(R), ..., L_k xor f(R))."""
    k = state.count - 1
    return _round_state(UfnParams(UfnKind.UFN2, state.n, k, 1), f, state)


class UfnPermutation:
    """An r-round permutation on (k+1)n bits with one oracle per round.

    Round oracles are validated against the structure at build time. Passing
    the same oracle object for several rounds shares one round function
    across them; the distinguishing games here always use independent rounds.
    """

    def __init__(self, params: UfnParams, rounds: Sequence[FunctionOracle]) -> None:
        if len(rounds) != params.r:
            raise ValueError(f"expected {params.r} round oracles, got {len(rounds)}")
        for f in rounds:
            _check_oracle(params, f)
        self.params = params
        self.rounds = tuple(rounds)
        self.query_count = 0

    @property
    def width(self) -> int:
        return self.params.state_bits

    def _split(self, value: int) -> tuple[int, ...]:
        n = self.params.n
        count = self.params.block_count
        mask = (1 << n) - 1
        return tuple((value >> ((count - 1 - i) * n)) & mask for i in range(count))

    def _join(self, blocks: tuple[int, ...]) -> int:
        n = self.params.n
        value = 0
        for b in blocks:
            value = (value << n) | b
        return value

    def encrypt(self, x: BitString) -> BitString:
        if x.width != self.width:
            raise ValueError(f"expected {self.width}-bit input, got {x.width}")
        blocks = self._split(x.value)
        for f in self.rounds:
            blocks = _forward(self.params, f, blocks)
        return BitString(self.width, self._join(blocks))

    def decrypt(self, y: BitString) -> BitString:
        if y.width != self.width:
            raise ValueError(f"expected {self.width}-bit input, got {y.width}")
        blocks = self._split(y.value)
        for f in reversed(self.rounds):
            blocks = _inverse(self.params, f, blocks)
        return BitString(self.width, self._join(blocks))

    def query(self, x: BitString) -> BitString:
        """Permutation-oracle interface: forward queries only."""
        self.query_count += 1
        return self.encrypt(x)

    def trace_states(self, x: BitString) -> list[tuple[int, ...]]:
        """Block tuples before round 1 and after each round (r+1 entries)."""
        if x.width != self.width:
            raise ValueError(f"expected {self.width}-bit input, got {x.width}")
        blocks = self._split(x.value)
        states = [blocks]
        for f in self.rounds:
            blocks = _forward(self.params, f, blocks)
            states.append(blocks)
        return states

    def as_block_state(self, x: BitString) -> BlockState:
        return partition(x, self.params.n)


def ideal_round_oracles(
    params: UfnParams, seed: object, max_entries: int = DEFAULT_TABLE_CAP
) -> list[IdealFunctionOracle]:
    """Independent lazily-sampled round functions, one per round.

    The round index is mixed into each oracle's seed so rounds never share a
    stream.
    """
    in_bits = params.round_in_bits
    out_bits = params.round_out_bits
    return [
        IdealFunctionOracle(
            in_bits,
            out_bits,
            FastBitGenerator(derive_seed("ideal-fn", seed, "round", i)),
            max_entries,
        )
        for i in range(params.r)
    ]


def ggm_round_oracles(
    params: UfnParams, master: BitString, mode: str = "fast"
) -> list[GgmFunctionOracle]:
    """Tree-walk round functions keyed by equal slices of a master key."""
    keys = split_master_key(master, params.r)
    return [
        GgmFunctionOracle(
            params.round_in_bits,
            params.round_out_bits,
            key,
            mode,
            salt=derive_seed("ggm-round", i),
        )
        for i, key in enumerate(keys)
    ]


def ideal_ufn(
    params: UfnParams, seed: object, max_entries: int = DEFAULT_TABLE_CAP
) -> UfnPermutation:
    return UfnPermutation(params, ideal_round_oracles(params, seed, max_entries))


def ggm_ufn(params: UfnParams, master: BitString, mode: str = "fast") -> UfnPermutation:
    return UfnPermutation(params, ggm_round_oracles(params, master, mode))


def extend_block_cipher(
    round_cipher: Callable[[int], FunctionOracle],
    n: int,
    k: int,
    rounds: int | None = None,
    allow_even_k: bool = False,
) -> UfnPermutation:
    """Widen an n-bit block cipher to a (k+1)n-bit permutation.

    ``round_cipher(i)`` must return an independently keyed n -> n instance for
    round i. Even ratios are rejected: with k even, the XOR of all state
    blocks is preserved by every round, so a single query distinguishes the
    result from a random permutation regardless of the round count. Pass
    ``allow_even_k=True`` only to reproduce that failure in experiments.
    """
    if k % 2 == 0 and not allow_even_k:
        raise ValueError(
            f"k={k} is even: the XOR of all blocks would be invariant, giving a "
            "single-query distinguisher; use odd k (or allow_even_k=True for experiments)"
        )
    r = 2 * k + 1 if rounds is None else rounds
    params = UfnParams(UfnKind.UFN2, n, k, r)
    oracles = [round_cipher(i) for i in range(r)]
    return UfnPermutation(params, oracles)

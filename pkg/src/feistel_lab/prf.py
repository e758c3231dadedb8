"""Round-function oracles behind one interface.

Two realizations of a deterministic function I_in -> I_out:

* a lazily sampled ideal random function (memo table filled from a seeded
  bit stream, entries never overwritten), and
* a keyed tree walk: a length-doubling generator is applied once per input
  bit, taking the left or right half of its output, and a finalizer stretches
  the final state to the output width.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .bits import BitString
from .prbg import (
    BbsGenerator,
    BitGenerator,
    FastBitGenerator,
    derive_seed,
    generate_bbs_params,
)

__all__ = [
    "DEFAULT_TABLE_CAP",
    "FunctionOracle",
    "CallableOracle",
    "zero_oracle",
    "IdealFunctionOracle",
    "ideal_oracle",
    "GgmKey",
    "ggm_walk_states",
    "ggm_eval",
    "split_master_key",
    "GgmFunctionOracle",
    "ggm_oracle",
]

DEFAULT_TABLE_CAP = 1 << 24


class FunctionOracle:
    """Deterministic black-box function on fixed-width bit strings."""

    def __init__(self, in_bits: int, out_bits: int) -> None:
        if in_bits < 1 or out_bits < 1:
            raise ValueError("oracle widths must be >= 1")
        self.in_bits = in_bits
        self.out_bits = out_bits

    def eval_int(self, x: int) -> int:
        raise NotImplementedError

    def eval(self, x: BitString) -> BitString:
        if x.width != self.in_bits:
            raise ValueError(f"expected {self.in_bits}-bit input, got {x.width}")
        return BitString(self.out_bits, self.eval_int(x.value))


class CallableOracle(FunctionOracle):
    """Wrap a plain int -> int function; handy for stubs and known functions."""

    def __init__(self, in_bits: int, out_bits: int, fn: Callable[[int], int]) -> None:
        super().__init__(in_bits, out_bits)
        self._fn = fn

    def eval_int(self, x: int) -> int:
        y = self._fn(x)
        if not 0 <= y < (1 << self.out_bits):
            raise ValueError(f"function value {y} does not fit in {self.out_bits} bits")
        return y


def zero_oracle(in_bits: int, out_bits: int) -> CallableOracle:
    return CallableOracle(in_bits, out_bits, lambda _x: 0)


class IdealFunctionOracle(FunctionOracle):
    """Lazily sampled random function.

    Memory grows only with distinct queries; an entry is drawn from the
    entropy stream on first use and never overwritten. Instances mutate their
    table on a miss, so use one instance per worker or lock externally.
    """

    def __init__(
        self,
        in_bits: int,
        out_bits: int,
        entropy: BitGenerator,
        max_entries: int = DEFAULT_TABLE_CAP,
    ) -> None:
        super().__init__(in_bits, out_bits)
        self._entropy = entropy
        self._table: dict[int, int] = {}
        self.max_entries = max_entries

    def eval_int(self, x: int) -> int:
        table = self._table
        hit = table.get(x)
        if hit is not None:
            return hit
        if len(table) >= self.max_entries:
            raise RuntimeError(
                f"memo table reached {self.max_entries} entries; "
                "raise max_entries to allow more distinct queries"
            )
        val = self._entropy.next_int(self.out_bits)
        table[x] = val
        return val

    @property
    def table_size(self) -> int:
        return len(self._table)

    @property
    def payload_bits(self) -> int:
        """Stored payload in bits: one out_bits value per distinct query."""
        return len(self._table) * self.out_bits


def ideal_oracle(
    in_bits: int,
    out_bits: int,
    seed: object,
    max_entries: int = DEFAULT_TABLE_CAP,
) -> IdealFunctionOracle:
    """Fresh lazily-sampled random function, replayable from ``seed``."""
    entropy = FastBitGenerator(derive_seed("ideal-fn", seed))
    return IdealFunctionOracle(in_bits, out_bits, entropy, max_entries)


@dataclass(frozen=True)
class GgmKey:
    """Key with its doubling expander G and output finalizer G'.

    ``expander`` maps a key-width state to twice that width; the left half is
    the 0-branch and the right half the 1-branch. ``finalizer`` maps the final
    state to the output width. Both must be deterministic.
    """

    key: BitString
    expander: Callable[[BitString], BitString]
    finalizer: Callable[[BitString], BitString]


def ggm_walk_states(key: GgmKey, x: BitString) -> list[BitString]:
    """States of the tree walk over the bits of ``x``, initial state first."""
    state = key.key
    width = state.width
    states = [state]
    for i in range(x.width):
        doubled = key.expander(state)
        if doubled.width != 2 * width:
            raise ValueError(
                f"expander produced {doubled.width} bits; expected {2 * width}"
            )
        left, right = doubled.split(width)
        state = right if x.bit(i) else left
        states.append(state)
    return states


def ggm_eval(key: GgmKey, x: BitString) -> BitString:
    """Walk the tree along the bits of ``x`` (left to right) and finalize.

    An empty ``x`` performs no expander steps: the result is the finalized
    key itself.
    """
    return key.finalizer(ggm_walk_states(key, x)[-1])


def split_master_key(master: BitString, rounds: int) -> list[BitString]:
    """Cut a master key into ``rounds`` contiguous equal slices, leftmost first."""
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    if master.width % rounds != 0:
        raise ValueError(f"master width {master.width} is not divisible by {rounds}")
    per = master.width // rounds
    keys = []
    rest = master
    for _ in range(rounds):
        head, rest = rest.split(per)
        keys.append(head)
    return keys


def _fast_stream_fn(out_bits: int, salt: int) -> Callable[[BitString], BitString]:
    def stream(state: BitString) -> BitString:
        return FastBitGenerator(derive_seed(salt, state)).next_bits(out_bits)

    return stream


def _bbs_stream_fn(
    out_bits: int, salt: int, prime_bits: int = 32
) -> Callable[[BitString], BitString]:
    params = generate_bbs_params(prime_bits, derive_seed(salt, "modulus"))

    def stream(state: BitString) -> BitString:
        gen = BbsGenerator(params)
        gen.reseed(derive_seed(salt, state))
        return gen.next_bits(out_bits)

    return stream


_STREAM_MODES = {"fast": _fast_stream_fn, "bbs": _bbs_stream_fn}


class GgmFunctionOracle(FunctionOracle):
    """Keyed tree-walk function with an instrumented generated-bit counter.

    ``mode`` selects the underlying generator for the expander and finalizer:
    ``fast`` (utility stream, default for bulk experiments) or ``bbs``
    (quadratic-residue stream reseeded from the walk state, desk scale).
    Evaluation touches no state except the bit counter; give each worker its
    own instance when that instrumentation matters.
    """

    def __init__(
        self,
        in_bits: int,
        out_bits: int,
        key: BitString,
        mode: str = "fast",
        salt: object = 0,
    ) -> None:
        super().__init__(in_bits, out_bits)
        if key.width < 1:
            raise ValueError("key must be at least one bit wide")
        if mode not in _STREAM_MODES:
            raise ValueError(f"unknown mode {mode!r}; expected one of {sorted(_STREAM_MODES)}")
        make_stream = _STREAM_MODES[mode]
        expand_raw = make_stream(2 * key.width, derive_seed("ggm-expand", salt))
        final_raw = make_stream(out_bits, derive_seed("ggm-final", salt))
        self.bits_generated = 0

        def expander(state: BitString) -> BitString:
            self.bits_generated += 2 * key.width
            return expand_raw(state)

        def finalizer(state: BitString) -> BitString:
            self.bits_generated += out_bits
            return final_raw(state)

        self.key = GgmKey(key, expander, finalizer)
        self.key_bits = key.width
        self.mode = mode

    def eval_int(self, x: int) -> int:
        return ggm_eval(self.key, BitString(self.in_bits, x)).value


def ggm_oracle(
    in_bits: int,
    out_bits: int,
    key: BitString,
    mode: str = "fast",
    salt: object = 0,
) -> GgmFunctionOracle:
    return GgmFunctionOracle(in_bits, out_bits, key, mode, salt)

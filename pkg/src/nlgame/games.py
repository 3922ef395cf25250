"""Group-structured n-player games with bit-exact broadcast accounting.

An instance fixes an ordered partition of the players into groups, a
per-group query bitstring, and a predicate over the groups' final output
strings.  Play proceeds in synchronous steps: everything a player emits in
step t is delivered in step t+1, either to the other members of his group
or broadcast to all n players.  The game is won when the tuple of final
outputs (the empty string for a group that never outputs) satisfies the
predicate.

Broadcast accounting is exact.  A broadcast whose length is fixed by the
strategy's declared schedule costs exactly its payload length; a
variable-length broadcast is framed with one continuation flag per payload
bit plus a terminator (2L + 1 bits for an L-bit payload), keeping every
concatenated step prefix-decodable.  Intra-group messages are free: only
inter-group communication is measured.

Two games are provided.  In the pair game, two chosen players each receive
query "0" and must output differing bits; everyone else forms the
remaining group with query "1" and must stay silent.  In the
parity game, a chosen set C with |C| = 2 (mod 4) must produce single-bit
outputs of odd total parity.  In both, the remaining group's players also
receive the chosen players' identities as auxiliary input; the chosen
players learn nothing beyond their query.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Protocol, Sequence

__all__ = [
    "STEP_LIMIT_DEFAULT",
    "ProtocolViolation",
    "StepLimitExceeded",
    "TapeExhausted",
    "SplitMix64",
    "TapeDraws",
    "Grouping",
    "GameInstance",
    "GameSpec",
    "make_simple_game",
    "make_general_game",
    "Action",
    "Inbox",
    "Player",
    "Strategy",
    "encode_broadcast",
    "decode_step",
    "BroadcastRecord",
    "GroupMessage",
    "StepRecord",
    "Transcript",
    "RunResult",
    "run_game",
    "enumerate_branches",
    "broadcast_complexity",
]

STEP_LIMIT_DEFAULT = 64
_MASK64 = (1 << 64) - 1


class ProtocolViolation(RuntimeError):
    """A group produced more than one final output."""


class StepLimitExceeded(RuntimeError):
    """The run did not halt within the step limit."""


class TapeExhausted(Exception):
    """A forced-outcome tape ran out at a genuine branch point."""

    def __init__(self, p_zero: Fraction) -> None:
        super().__init__(f"tape exhausted at branch with p_zero={p_zero}")
        self.p_zero = p_zero


class SplitMix64:
    """Counter-based 64-bit generator (splitmix64), stable across releases."""

    __slots__ = ("_state",)

    def __init__(self, seed: int) -> None:
        self._state = seed & _MASK64

    def next64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def bits(self, k: int) -> int:
        out = 0
        got = 0
        while got < k:
            take = min(64, k - got)
            out = (out << take) | (self.next64() >> (64 - take))
            got += take
        return out

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection."""
        if n <= 0:
            raise ValueError("below() needs a positive bound")
        k = (n - 1).bit_length() or 1
        while True:
            v = self.bits(k)
            if v < n:
                return v

    def draw(self, p_zero: Fraction) -> int:
        """0 with probability p_zero; certain outcomes consume no randomness."""
        if p_zero >= 1:
            return 0
        if p_zero <= 0:
            return 1
        u = Fraction(self.next64(), 1 << 64)
        return 0 if u < p_zero else 1


class TapeDraws:
    """Replays a fixed outcome tape; raises TapeExhausted at new branches.

    Certain outcomes (p_zero 0 or 1) never consume tape, matching
    SplitMix64.draw, so a tape enumerates exactly the genuine branch
    points of a run.
    """

    __slots__ = ("_tape", "_pos", "log")

    def __init__(self, tape: Sequence[int] = ()) -> None:
        self._tape = tuple(tape)
        self._pos = 0
        self.log: list[tuple[Fraction, int]] = []

    def draw(self, p_zero: Fraction) -> int:
        if p_zero >= 1:
            return 0
        if p_zero <= 0:
            return 1
        if self._pos >= len(self._tape):
            raise TapeExhausted(p_zero)
        bit = self._tape[self._pos]
        self._pos += 1
        self.log.append((p_zero, bit))
        return bit

    def branch_probability(self) -> Fraction:
        prob = Fraction(1)
        for p_zero, bit in self.log:
            prob *= p_zero if bit == 0 else 1 - p_zero
        return prob


@dataclass(frozen=True)
class Grouping:
    """Ordered partition (G_1, ..., G_m) of players 1..n; groups may be empty."""

    groups: tuple[frozenset[int], ...]
    n: int

    def __post_init__(self) -> None:
        seen: set[int] = set()
        for g in self.groups:
            if seen & g:
                raise ValueError("groups must be disjoint")
            seen |= g
        if seen != set(range(1, self.n + 1)):
            raise ValueError("groups must cover players 1..n exactly")

    @property
    def m(self) -> int:
        return len(self.groups)

    def group_of(self, player: int) -> int:
        for gi, g in enumerate(self.groups):
            if player in g:
                return gi
        raise ValueError(f"player {player} not in any group")


@dataclass(frozen=True)
class GameInstance:
    """One (grouping, query, winning-set) triple plus auxiliary knowledge.

    ``chosen`` names the distinguished players (the singleton groups);
    players of group ``aux_group`` receive it as auxiliary input in step 1.
    ``allowed_outputs`` enumerates the winning tuples when the winning set
    is finite.
    """

    grouping: Grouping
    query: tuple[str, ...]
    allowed: Callable[[tuple[str, ...]], bool]
    chosen: tuple[int, ...]
    aux_group: int | None = None
    allowed_outputs: Callable[[], Iterator[tuple[str, ...]]] | None = None
    label: str = ""


@dataclass(frozen=True)
class GameSpec:
    """A family of instances over n players with uniform sampling."""

    name: str
    n: int
    instances: tuple[GameInstance, ...]
    below_analysis_min: bool = False

    def enumerate(self) -> Iterator[GameInstance]:
        return iter(self.instances)

    def sample(self, rng: SplitMix64) -> GameInstance:
        return self.instances[rng.below(len(self.instances))]


_SIMPLE_WINNING = (("0", "1", ""), ("1", "0", ""))


def _simple_allowed(outputs: tuple[str, ...]) -> bool:
    return outputs in _SIMPLE_WINNING


def _simple_enumeration() -> Iterator[tuple[str, ...]]:
    return iter(_SIMPLE_WINNING)


def _general_allowed(k: int) -> Callable[[tuple[str, ...]], bool]:
    def allowed(outputs: tuple[str, ...]) -> bool:
        if len(outputs) != k + 1 or outputs[k] != "":
            return False
        if any(o not in ("0", "1") for o in outputs[:k]):
            return False
        return sum(int(o) for o in outputs[:k]) % 2 == 1

    return allowed


def _general_enumeration(k: int) -> Callable[[], Iterator[tuple[str, ...]]]:
    def enumerate_winning() -> Iterator[tuple[str, ...]]:
        for bits in itertools.product("01", repeat=k):
            if sum(int(b) for b in bits) % 2 == 1:
                yield bits + ("",)

    return enumerate_winning


def make_simple_game(n: int) -> GameSpec:
    """Pair game: every pair (i, j) must output differing bits.

    Defined for n >= 3 (the remaining group must be able to signal); sizes
    3 and 4 are flagged via ``below_analysis_min`` since the classical
    trade-off analysis starts at n = 5.
    """
    if n < 3:
        raise ValueError(f"simple game needs n >= 3, got {n}")
    instances = []
    players = frozenset(range(1, n + 1))
    for i, j in itertools.combinations(range(1, n + 1), 2):
        grouping = Grouping(
            (frozenset({i}), frozenset({j}), players - {i, j}), n
        )
        instances.append(
            GameInstance(
                grouping=grouping,
                query=("0", "0", "1"),
                allowed=_simple_allowed,
                chosen=(i, j),
                aux_group=2,
                allowed_outputs=_simple_enumeration,
                label=f"pair({i},{j})",
            )
        )
    return GameSpec("simple", n, tuple(instances), below_analysis_min=n < 5)


def make_general_game(n: int) -> GameSpec:
    """Parity game: chosen sets C with |C| = 2 (mod 4) output odd parity."""
    if n < 2:
        raise ValueError(f"general game needs n >= 2, got {n}")
    instances = []
    players = frozenset(range(1, n + 1))
    sizes = [k for k in range(2, n + 1) if k % 4 == 2]
    for k in sizes:
        allowed = _general_allowed(k)
        enumeration = _general_enumeration(k)
        for chosen in itertools.combinations(range(1, n + 1), k):
            groups = tuple(frozenset({c}) for c in chosen) + (
                players - set(chosen),
            )
            instances.append(
                GameInstance(
                    grouping=Grouping(groups, n),
                    query=("0",) * k + ("1",),
                    allowed=allowed,
                    chosen=chosen,
                    aux_group=k,
                    allowed_outputs=enumeration,
                    label="C={" + ",".join(map(str, chosen)) + "}",
                )
            )
    return GameSpec("general", n, tuple(instances))


@dataclass(frozen=True)
class Action:
    """What one player emits in one step.

    ``group_message`` goes to the other members of the player's group next
    step; ``broadcast`` goes to all players next step and is the only thing
    that costs bits.  ``broadcast_fixed_length`` declares that the payload
    length is fixed by the protocol phase, so no framing is charged.
    ``output`` claims the group's final output slot; ``halt`` retires the
    player.
    """

    group_message: str | None = None
    broadcast: str | None = None
    broadcast_fixed_length: bool = True
    output: str | None = None
    halt: bool = False


@dataclass(frozen=True)
class Inbox:
    """Everything delivered to one player at the start of one step."""

    step: int
    query: str | None = None
    aux: tuple[int, ...] | None = None
    group_messages: tuple[tuple[int, str], ...] = ()
    broadcasts: tuple[tuple[int, str], ...] = ()


class Player(Protocol):
    def act(self, inbox: Inbox) -> Action: ...


class Strategy:
    """Base strategy: builds one player object per seat for each run."""

    name = "strategy"
    n = 0

    def make_players(self, instance: GameInstance, draws) -> list[Player]:
        raise NotImplementedError

    def empty_group_action(
        self, instance: GameInstance, group_index: int
    ) -> Action | None:
        """Standard behavior injected on behalf of an empty group (sender 0)."""
        return None


def encode_broadcast(payload: str, fixed_length: bool) -> str:
    """Wire form of one broadcast; variable-length payloads get flag bits."""
    if fixed_length:
        return payload
    return "".join("1" + b for b in payload) + "0"


def decode_step(stream: str, schedule: Sequence[tuple[bool, int | None]]) -> list[str]:
    """Split a concatenated step broadcast back into payloads.

    ``schedule`` lists (fixed_length, payload_length or None) per message,
    which every player knows from the protocol phase.  Raises ValueError if
    the stream does not parse exactly.
    """
    payloads = []
    pos = 0
    for fixed, length in schedule:
        if fixed:
            if length is None or pos + length > len(stream):
                raise ValueError("fixed-length message truncated")
            payloads.append(stream[pos : pos + length])
            pos += length
        else:
            bits = []
            while True:
                if pos >= len(stream):
                    raise ValueError("variable-length message missing terminator")
                flag = stream[pos]
                pos += 1
                if flag == "0":
                    break
                if pos >= len(stream):
                    raise ValueError("continuation flag without payload bit")
                bits.append(stream[pos])
                pos += 1
            payloads.append("".join(bits))
    if pos != len(stream):
        raise ValueError("trailing bits after scheduled messages")
    return payloads


@dataclass(frozen=True)
class BroadcastRecord:
    sender: int
    payload: str
    fixed_length: bool

    @property
    def encoded(self) -> str:
        return encode_broadcast(self.payload, self.fixed_length)

    @property
    def bit_cost(self) -> int:
        return len(self.payload) if self.fixed_length else 2 * len(self.payload) + 1


@dataclass(frozen=True)
class GroupMessage:
    sender: int
    group: int
    payload: str


@dataclass(frozen=True)
class StepRecord:
    step: int
    broadcasts: tuple[BroadcastRecord, ...]
    group_messages: tuple[GroupMessage, ...]

    @property
    def concatenated(self) -> str:
        return "".join(r.encoded for r in self.broadcasts)

    @property
    def schedule(self) -> tuple[tuple[bool, int | None], ...]:
        return tuple(
            (r.fixed_length, len(r.payload) if r.fixed_length else None)
            for r in self.broadcasts
        )

    @property
    def payloads(self) -> tuple[str, ...]:
        return tuple(r.payload for r in self.broadcasts)


@dataclass(frozen=True)
class Transcript:
    steps: tuple[StepRecord, ...]
    final_outputs: tuple[str, ...]

    @property
    def broadcast_bits(self) -> int:
        return sum(r.bit_cost for s in self.steps for r in s.broadcasts)

    def to_lines(self) -> list[str]:
        lines = []
        for s in self.steps:
            for r in s.group_messages:
                lines.append(
                    f"step {s.step} | player {r.sender} | scope group | bits {r.payload}"
                )
            for r in s.broadcasts:
                lines.append(
                    f"step {s.step} | player {r.sender} | scope broadcast | bits {r.payload}"
                )
        return lines


@dataclass(frozen=True)
class RunResult:
    won: bool
    transcript: Transcript
    broadcast_bits: int

    def to_text(self) -> str:
        import json

        lines = [
            f"won: {'true' if self.won else 'false'}",
            f"broadcast_bits: {self.broadcast_bits}",
            f"final_outputs: {json.dumps(list(self.transcript.final_outputs))}",
            "transcript:",
        ]
        lines += ["  " + l for l in self.transcript.to_lines()]
        return "\n".join(lines)


def _check_bits(payload: str, what: str) -> None:
    if any(c not in "01" for c in payload):
        raise ValueError(f"{what} must be a 0/1 string, got {payload!r}")


def run_game(
    instance: GameInstance,
    strategy: Strategy,
    draws,
    *,
    step_limit: int = STEP_LIMIT_DEFAULT,
) -> RunResult:
    """Execute one run and judge it.

    Delivers the query (plus auxiliary input for the aux group) in step 1,
    then alternates act/deliver rounds until every player has halted.
    Output slots are claimed in ascending player order; a second output in
    the same group raises :class:`ProtocolViolation`, and exceeding the
    step limit raises :class:`StepLimitExceeded`.
    """
    grouping = instance.grouping
    n = grouping.n
    if getattr(strategy, "n", None) != n:
        raise ValueError(
            f"strategy is for n={getattr(strategy, 'n', None)}, instance has n={n}"
        )
    players = strategy.make_players(instance, draws)
    if len(players) != n:
        raise ValueError("strategy must supply one player per seat")

    group_of = {i: grouping.group_of(i) for i in range(1, n + 1)}
    halted = [False] * (n + 1)
    outputs: dict[int, str] = {}
    steps: list[StepRecord] = []

    pending_group: dict[int, list[tuple[int, str]]] = {g: [] for g in range(grouping.m)}
    pending_broadcasts: list[tuple[int, str]] = []

    halted_all = False
    for t in range(1, step_limit + 1):
        step_broadcasts: list[BroadcastRecord] = []
        step_group_msgs: list[GroupMessage] = []
        next_group: dict[int, list[tuple[int, str]]] = {
            g: [] for g in range(grouping.m)
        }
        next_broadcasts: list[tuple[int, str]] = []

        if t == 1:
            for gi, g in enumerate(grouping.groups):
                if g:
                    continue
                injected = strategy.empty_group_action(instance, gi)
                if injected is None:
                    continue
                if injected.broadcast is None or injected.output is not None:
                    raise ValueError("empty-group action may only broadcast")
                _check_bits(injected.broadcast, "broadcast payload")
                step_broadcasts.append(
                    BroadcastRecord(0, injected.broadcast, injected.broadcast_fixed_length)
                )
                next_broadcasts.append((0, injected.broadcast))

        delivered_broadcasts = tuple(pending_broadcasts)
        for i in range(1, n + 1):
            if halted[i]:
                continue
            gi = group_of[i]
            inbox = Inbox(
                step=t,
                query=instance.query[gi] if t == 1 else None,
                aux=instance.chosen if (t == 1 and gi == instance.aux_group) else None,
                group_messages=tuple(
                    m for m in pending_group[gi] if m[0] != i
                ),
                broadcasts=delivered_broadcasts,
            )
            action = players[i - 1].act(inbox)
            if action.group_message is not None:
                _check_bits(action.group_message, "group message")
                next_group[gi].append((i, action.group_message))
                step_group_msgs.append(GroupMessage(i, gi, action.group_message))
            if action.broadcast is not None:
                _check_bits(action.broadcast, "broadcast payload")
                next_broadcasts.append((i, action.broadcast))
                step_broadcasts.append(
                    BroadcastRecord(i, action.broadcast, action.broadcast_fixed_length)
                )
            if action.output is not None:
                _check_bits(action.output, "final output")
                if gi in outputs:
                    raise ProtocolViolation(
                        f"group {gi} received a second final output from player {i}"
                    )
                outputs[gi] = action.output
            if action.halt:
                halted[i] = True

        steps.append(StepRecord(t, tuple(step_broadcasts), tuple(step_group_msgs)))
        pending_group = next_group
        pending_broadcasts = next_broadcasts
        if all(halted[1:]):
            halted_all = True
            break

    if not halted_all:
        raise StepLimitExceeded(f"run exceeded {step_limit} steps without halting")

    final = tuple(outputs.get(g, "") for g in range(grouping.m))
    transcript = Transcript(tuple(steps), final)
    return RunResult(
        won=bool(instance.allowed(final)),
        transcript=transcript,
        broadcast_bits=transcript.broadcast_bits,
    )


def enumerate_branches(
    instance: GameInstance,
    strategy: Strategy,
    *,
    step_limit: int = STEP_LIMIT_DEFAULT,
) -> Iterator[tuple[RunResult, Fraction]]:
    """All runs with nonzero probability, via depth-first outcome tapes.

    Deterministic strategies yield exactly one branch of probability 1.
    """
    stack: list[tuple[int, ...]] = [()]
    while stack:
        tape = stack.pop()
        draws = TapeDraws(tape)
        try:
            result = run_game(instance, strategy, draws, step_limit=step_limit)
        except TapeExhausted as branch:
            if branch.p_zero > 0:
                stack.append(tape + (0,))
            if branch.p_zero < 1:
                stack.append(tape + (1,))
            continue
        yield result, draws.branch_probability()


def broadcast_complexity(
    spec: GameSpec,
    strategy: Strategy,
    mode: str = "exhaustive",
    *,
    trials: int | None = None,
    seed: int = 0,
) -> tuple[int, bool]:
    """(max broadcast bits, whether every executed run was won).

    Exhaustive mode folds over every instance and every nonzero-probability
    randomness branch; sampled mode draws ``trials`` instances uniformly and
    runs each once.
    """
    max_bits = 0
    all_won = True
    if mode == "exhaustive":
        for instance in spec.enumerate():
            for result, _prob in enumerate_branches(instance, strategy):
                max_bits = max(max_bits, result.broadcast_bits)
                all_won = all_won and result.won
    elif mode == "sampled":
        if not trials or trials < 1:
            raise ValueError("sampled mode needs trials >= 1")
        rng = SplitMix64(seed)
        for _ in range(trials):
            instance = spec.sample(rng)
            result = run_game(instance, strategy, rng)
            max_bits = max(max_bits, result.broadcast_bits)
            all_won = all_won and result.won
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return max_bits, all_won

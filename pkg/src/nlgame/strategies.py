"""Concrete strategies for the pair and parity games.

The quantum strategies share a GHZ state, one qubit per player.  Remaining
players measure diagonally and pool their outcomes inside the group; the
lowest-indexed one broadcasts the parity of the observed count as a single
fixed-length hint bit.  Each chosen player then measures diagonally when
the hint is 1 and circularly when it is 0 and outputs his outcome bit
(0 for the first basis vector).  The classical strategies broadcast either
a label or a best-response hint bit and respond deterministically.

When the remaining group is empty (the parity game may choose everyone),
the execution loop injects the strategy's declared standard broadcast on
the group's behalf: hint bit 0 for the quantum strategy, player 1's label
for the labeling strategy.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, log2
from typing import Callable

from .games import Action, GameInstance, Inbox, ProtocolViolation, Strategy
from .qsim import (
    MeasBasis,
    MeasurementRecord,
    StateVector,
    make_ghz,
    measure_qubit,
    outcome_probability,
)

__all__ = [
    "ClassicalAtomStrategy",
    "StrategyAssignment",
    "best_response_hint_rule",
    "LabelTable",
    "QuantumSharedState",
    "losing_probability_formula",
    "quantum_simple_strategy",
    "quantum_general_strategy",
    "classical_label_strategy",
    "classical_atom_strategy_assignment",
    "strategy_from_name",
    "simple_strategy_losing_mass",
    "general_strategy_forbidden_mass",
    "general_strategy_output_distribution",
]


def losing_probability_formula(n: int) -> Fraction:
    """Best classical losing probability of the pair game under 1-bit hints.

    With n = 4k + r, the value is
    (4 - r) * (k/n) * ((k-1)/(n-1)) + r * ((k+1)/n) * (k/(n-1)),
    the chance that a uniformly chosen pair falls in one class of a
    balanced 4-way split.  Defined for n >= 5.
    """
    if n < 5:
        raise ValueError(f"formula domain starts at n = 5, got {n}")
    k, r = divmod(n, 4)
    return (4 - r) * Fraction(k, n) * Fraction(k - 1, n - 1) + r * Fraction(
        k + 1, n
    ) * Fraction(k, n - 1)


class ClassicalAtomStrategy(enum.Enum):
    """Per-player response to the 1-bit hint in the pair game."""

    CONST0 = "0"
    CONST1 = "1"
    COPY_HINT = "b"
    FLIP_HINT = "nb"

    def respond(self, hint: int) -> int:
        if self is ClassicalAtomStrategy.CONST0:
            return 0
        if self is ClassicalAtomStrategy.CONST1:
            return 1
        if self is ClassicalAtomStrategy.COPY_HINT:
            return hint
        return 1 - hint


def best_response_hint_rule(
    atoms: tuple[ClassicalAtomStrategy, ...],
) -> Callable[[int, int], int]:
    """Hint rule that wins whenever the chosen pair's atoms allow a win."""

    def rule(i: int, j: int) -> int:
        a, b = atoms[i - 1], atoms[j - 1]
        for hint in (0, 1):
            if a.respond(hint) != b.respond(hint):
                return hint
        return 0

    return rule


@dataclass(frozen=True)
class StrategyAssignment:
    """One atom per player plus a total hint rule for the remaining group."""

    atoms: tuple[ClassicalAtomStrategy, ...]
    hint_rule: Callable[[int, int], int]

    @classmethod
    def best_response(
        cls, atoms: tuple[ClassicalAtomStrategy, ...]
    ) -> "StrategyAssignment":
        return cls(atoms=tuple(atoms), hint_rule=best_response_hint_rule(tuple(atoms)))


@dataclass(frozen=True)
class LabelTable:
    """Fixed-length distinct binary labels, one per player (index 1-based)."""

    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.labels:
            raise ValueError("label table must not be empty")
        width = len(self.labels[0])
        if width < 1 or any(len(l) != width for l in self.labels):
            raise ValueError("labels must share one positive length")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("labels must be distinct")

    @property
    def length(self) -> int:
        return len(self.labels[0])

    def label_of(self, player: int) -> str:
        return self.labels[player - 1]

    @classmethod
    def binary(cls, n: int) -> "LabelTable":
        width = max(1, ceil(log2(n)))
        return cls(tuple(format(i, f"0{width}b") for i in range(n)))


class QuantumSharedState:
    """Joint register shared by one run's players; player i owns qubit i."""

    def __init__(self, state: StateVector, draws) -> None:
        self.state = state
        self._draws = draws
        self.records: list[MeasurementRecord] = []
        self._measured: set[int] = set()

    @classmethod
    def ghz(cls, n: int, draws) -> "QuantumSharedState":
        return cls(make_ghz(n), draws)

    def measure(self, qubit: int, basis: MeasBasis) -> int:
        if qubit in self._measured:
            raise ProtocolViolation(f"qubit {qubit} measured twice in one run")
        outcome, collapsed, _p = measure_qubit(self.state, qubit, basis, self._draws)
        self._measured.add(qubit)
        self.records.append(MeasurementRecord(qubit, basis, outcome))
        self.state = collapsed
        return outcome


class _HintedMeasurer:
    """Chosen player: waits for the hint, measures, outputs the outcome."""

    __slots__ = ("_index", "_shared")

    def __init__(self, index: int, shared: QuantumSharedState) -> None:
        self._index = index
        self._shared = shared

    def act(self, inbox: Inbox) -> Action:
        if not inbox.broadcasts:
            return Action()
        hint = inbox.broadcasts[0][1]
        basis = MeasBasis.DIAGONAL if hint == "1" else MeasBasis.CIRCULAR
        outcome = self._shared.measure(self._index, basis)
        return Action(output=str(outcome), halt=True)


class _OutcomeReporter:
    """Remaining player: measures diagonally, reports in-group, halts."""

    __slots__ = ("_index", "_shared")

    def __init__(self, index: int, shared: QuantumSharedState) -> None:
        self._index = index
        self._shared = shared

    def act(self, inbox: Inbox) -> Action:
        outcome = self._shared.measure(self._index, MeasBasis.DIAGONAL)
        return Action(group_message=str(outcome), halt=True)


class _ParityAnnouncer:
    """Lowest-indexed remaining player: pools outcomes, broadcasts parity."""

    __slots__ = ("_index", "_shared", "_own")

    def __init__(self, index: int, shared: QuantumSharedState) -> None:
        self._index = index
        self._shared = shared
        self._own = 0

    def act(self, inbox: Inbox) -> Action:
        if inbox.step == 1:
            self._own = self._shared.measure(self._index, MeasBasis.DIAGONAL)
            return Action(group_message=str(self._own))
        ones = self._own + sum(int(payload) for _, payload in inbox.group_messages)
        return Action(
            broadcast=str(ones % 2), broadcast_fixed_length=True, halt=True
        )


class _QuantumParityStrategy(Strategy):
    def __init__(self, n: int, name: str, fallback_hint: int | None) -> None:
        self.n = n
        self.name = name
        self._fallback_hint = fallback_hint

    def make_players(self, instance: GameInstance, draws) -> list:
        shared = QuantumSharedState.ghz(self.n, draws)
        chosen = set(instance.chosen)
        remaining = [i for i in range(1, self.n + 1) if i not in chosen]
        leader = remaining[0] if remaining else 0
        players = []
        for i in range(1, self.n + 1):
            if i in chosen:
                players.append(_HintedMeasurer(i, shared))
            elif i == leader:
                players.append(_ParityAnnouncer(i, shared))
            else:
                players.append(_OutcomeReporter(i, shared))
        return players

    def empty_group_action(
        self, instance: GameInstance, group_index: int
    ) -> Action | None:
        if self._fallback_hint is None:
            return None
        return Action(broadcast=str(self._fallback_hint), broadcast_fixed_length=True)


def quantum_simple_strategy(n: int) -> Strategy:
    """GHZ strategy for the pair game; 1 broadcast bit, never loses."""
    if n < 3:
        raise ValueError(f"quantum pair strategy needs n >= 3, got {n}")
    return _QuantumParityStrategy(n, "quantum-simple", fallback_hint=None)


def quantum_general_strategy(n: int) -> Strategy:
    """GHZ strategy for the parity game; at most 1 broadcast bit, never loses."""
    if n < 2:
        raise ValueError(f"quantum parity strategy needs n >= 2, got {n}")
    return _QuantumParityStrategy(n, "quantum-general", fallback_hint=0)


class _LabelAnnouncer:
    __slots__ = ("_label_of_target",)

    def __init__(self, label_of_target: str) -> None:
        self._label_of_target = label_of_target

    def act(self, inbox: Inbox) -> Action:
        return Action(
            broadcast=self._label_of_target, broadcast_fixed_length=True, halt=True
        )


class _SilentHalter:
    def act(self, inbox: Inbox) -> Action:
        return Action(halt=True)


class _LabelComparer:
    __slots__ = ("_own_label",)

    def __init__(self, own_label: str) -> None:
        self._own_label = own_label

    def act(self, inbox: Inbox) -> Action:
        if not inbox.broadcasts:
            return Action()
        announced = inbox.broadcasts[0][1]
        return Action(output="1" if announced == self._own_label else "0", halt=True)


class ClassicalLabelStrategy(Strategy):
    """Broadcast one chosen player's label; he outputs 1, the others 0."""

    def __init__(self, n: int, labels: LabelTable) -> None:
        self.n = n
        self.name = "classical-label"
        self.labels = labels

    def make_players(self, instance: GameInstance, draws) -> list:
        chosen = set(instance.chosen)
        remaining = [i for i in range(1, self.n + 1) if i not in chosen]
        leader = remaining[0] if remaining else 0
        target_label = self.labels.label_of(min(instance.chosen))
        players = []
        for i in range(1, self.n + 1):
            if i in chosen:
                players.append(_LabelComparer(self.labels.label_of(i)))
            elif i == leader:
                players.append(_LabelAnnouncer(target_label))
            else:
                players.append(_SilentHalter())
        return players

    def empty_group_action(
        self, instance: GameInstance, group_index: int
    ) -> Action | None:
        return Action(
            broadcast=self.labels.label_of(1), broadcast_fixed_length=True
        )


def classical_label_strategy(n: int) -> Strategy:
    """Labeling strategy: ceil(log2 n) broadcast bits, wins every instance."""
    if n < 2:
        raise ValueError(f"labeling strategy needs n >= 2, got {n}")
    return ClassicalLabelStrategy(n, LabelTable.binary(n))


class _HintAnnouncer:
    __slots__ = ("_rule",)

    def __init__(self, rule: Callable[[int, int], int]) -> None:
        self._rule = rule

    def act(self, inbox: Inbox) -> Action:
        i, j = inbox.aux  # remaining players learn the chosen pair in step 1
        return Action(
            broadcast=str(self._rule(i, j)), broadcast_fixed_length=True, halt=True
        )


class _AtomResponder:
    __slots__ = ("_atom",)

    def __init__(self, atom: ClassicalAtomStrategy) -> None:
        self._atom = atom

    def act(self, inbox: Inbox) -> Action:
        if not inbox.broadcasts:
            return Action()
        hint = int(inbox.broadcasts[0][1])
        return Action(output=str(self._atom.respond(hint)), halt=True)


class ClassicalAtomAssignment(Strategy):
    """Pair-game strategy from per-player atoms plus a hint rule."""

    def __init__(self, assignment: StrategyAssignment) -> None:
        self.n = len(assignment.atoms)
        self.name = "classical-atoms"
        self.assignment = assignment

    def make_players(self, instance: GameInstance, draws) -> list:
        chosen = set(instance.chosen)
        remaining = [i for i in range(1, self.n + 1) if i not in chosen]
        leader = remaining[0] if remaining else 0
        players = []
        for i in range(1, self.n + 1):
            if i in chosen:
                players.append(_AtomResponder(self.assignment.atoms[i - 1]))
            elif i == leader:
                players.append(_HintAnnouncer(self.assignment.hint_rule))
            else:
                players.append(_SilentHalter())
        return players


def classical_atom_strategy_assignment(assignment: StrategyAssignment) -> Strategy:
    """Pair-game strategy for an explicit atom assignment."""
    n = len(assignment.atoms)
    if n < 3:
        raise ValueError(f"atom assignment needs n >= 3 players, got {n}")
    if assignment.hint_rule is None:
        raise ValueError("assignment needs a total hint rule")
    return ClassicalAtomAssignment(assignment)


_ATOM_TOKENS = {a.value: a for a in ClassicalAtomStrategy}


def strategy_from_name(name: str, n: int) -> Strategy:
    """Resolve a CLI strategy name.

    Accepted: ``quantum-simple``, ``quantum-general``, ``classical-label``,
    and ``classical-atoms:<tags>`` with n comma-separated tags from
    {0, 1, b, nb}.
    """
    if name == "quantum-simple":
        return quantum_simple_strategy(n)
    if name == "quantum-general":
        return quantum_general_strategy(n)
    if name == "classical-label":
        return classical_label_strategy(n)
    if name.startswith("classical-atoms:"):
        tags = name[len("classical-atoms:") :].split(",")
        try:
            atoms = tuple(_ATOM_TOKENS[t.strip()] for t in tags)
        except KeyError as bad:
            raise ValueError(
                f"unknown atom tag {bad.args[0]!r}; use 0, 1, b or nb"
            ) from None
        if len(atoms) != n:
            raise ValueError(f"expected {n} atom tags, got {len(atoms)}")
        return classical_atom_strategy_assignment(StrategyAssignment.best_response(atoms))
    raise ValueError(f"unknown strategy {name!r}")


# ---------------------------------------------------------------------------
# Exact certainty sweeps.  These recompute, through outcome_probability and
# with no sampling, the joint probability of every measurement branch the
# quantum strategies can take, so "never loses" is an exact statement.

def simple_strategy_losing_mass(n: int, pair: tuple[int, int]) -> Fraction:
    """Exact probability that the chosen pair outputs equal bits."""
    i, j = pair
    if not (1 <= i < j <= n):
        raise ValueError(f"pair must satisfy 1 <= i < j <= n, got {pair}")
    ghz = make_ghz(n)
    rest = [q for q in range(1, n + 1) if q not in (i, j)]
    total = Fraction(0)
    for outcomes in itertools.product((0, 1), repeat=len(rest)):
        hint = sum(outcomes) % 2
        basis = MeasBasis.DIAGONAL if hint else MeasBasis.CIRCULAR
        base = [(q, MeasBasis.DIAGONAL, m) for q, m in zip(rest, outcomes)]
        for out in (0, 1):
            total += outcome_probability(
                ghz, base + [(i, basis, out), (j, basis, out)]
            )
    return total


def general_strategy_forbidden_mass(n: int, chosen: tuple[int, ...]) -> Fraction:
    """Exact probability that the chosen set outputs even total parity."""
    k = len(chosen)
    if k % 4 != 2:
        raise ValueError(f"chosen set size must be 2 mod 4, got {k}")
    ghz = make_ghz(n)
    rest = [q for q in range(1, n + 1) if q not in chosen]
    total = Fraction(0)
    for outcomes in itertools.product((0, 1), repeat=len(rest)):
        hint = sum(outcomes) % 2
        basis = MeasBasis.DIAGONAL if hint else MeasBasis.CIRCULAR
        base = [(q, MeasBasis.DIAGONAL, m) for q, m in zip(rest, outcomes)]
        for head in itertools.product((0, 1), repeat=k - 1):
            outs = head + (sum(head) % 2,)  # forces even total parity
            total += outcome_probability(
                ghz, base + [(c, basis, o) for c, o in zip(chosen, outs)]
            )
    return total


def general_strategy_output_distribution(
    n: int, chosen: tuple[int, ...]
) -> dict[tuple[int, ...], Fraction]:
    """Exact marginal distribution of the chosen players' output tuple."""
    k = len(chosen)
    ghz = make_ghz(n)
    rest = [q for q in range(1, n + 1) if q not in chosen]
    dist: dict[tuple[int, ...], Fraction] = {
        outs: Fraction(0) for outs in itertools.product((0, 1), repeat=k)
    }
    for outcomes in itertools.product((0, 1), repeat=len(rest)):
        hint = sum(outcomes) % 2
        basis = MeasBasis.DIAGONAL if hint else MeasBasis.CIRCULAR
        base = [(q, MeasBasis.DIAGONAL, m) for q, m in zip(rest, outcomes)]
        for outs in dist:
            dist[outs] += outcome_probability(
                ghz, base + [(c, basis, o) for c, o in zip(chosen, outs)]
            )
    return dist

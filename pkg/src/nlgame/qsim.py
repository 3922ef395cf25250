"""Exact statevector engine for small qubit registers.

Amplitudes are Gaussian integers over a power-of-sqrt(2) denominator, so
every state reachable by GHZ preparation and diagonal/circular measurements
is represented without rounding, and outcome probabilities are exact
``fractions.Fraction`` values.  "This outcome never happens" is a decidable
statement here, not a tolerance judgement.

Conventions: qubits are numbered 1..n and qubit 1 is the most significant
bit of an amplitude index, so index ``0b10`` of a 2-qubit register means
qubit 1 is |1> and qubit 2 is |0>.  No floating-point arithmetic occurs in
this module.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Protocol, Sequence

__all__ = [
    "QUBIT_CAP",
    "ExactnessError",
    "DrawSource",
    "ExactAmplitude",
    "MeasBasis",
    "MeasurementRecord",
    "StateVector",
    "make_ghz",
    "basis_state",
    "measure_qubit",
    "outcome_probability",
]

# Registers above this size are refused to bound memory (2**n amplitudes).
QUBIT_CAP = 20


class ExactnessError(ArithmeticError):
    """A value left the exactly representable set."""


class DrawSource(Protocol):
    """Source of outcome bits: returns 0 with probability ``p_zero``."""

    def draw(self, p_zero: Fraction) -> int: ...


class ExactAmplitude:
    """Complex number (re + im*i) / sqrt(2)**scale with integer re, im.

    Instances are kept in canonical form: while both integers are even and
    the scale is at least 2, everything is divided by 2; an exact zero is
    stored at scale 0.  Canonical forms are unique, so equality and hashing
    are structural.
    """

    __slots__ = ("_re", "_im", "_scale")

    def __init__(self, re: int, im: int = 0, scale: int = 0) -> None:
        if scale < 0:
            raise ValueError("sqrt2 scale must be non-negative")
        if re == 0 and im == 0:
            scale = 0
        else:
            while scale >= 2 and re % 2 == 0 and im % 2 == 0:
                re //= 2
                im //= 2
                scale -= 2
        self._re = re
        self._im = im
        self._scale = scale

    @property
    def re_int(self) -> int:
        return self._re

    @property
    def im_int(self) -> int:
        return self._im

    @property
    def sqrt2_scale(self) -> int:
        return self._scale

    @classmethod
    def zero(cls) -> "ExactAmplitude":
        return cls(0)

    @classmethod
    def one(cls) -> "ExactAmplitude":
        return cls(1)

    @classmethod
    def inv_sqrt2(cls, power: int = 1) -> "ExactAmplitude":
        """1 / sqrt(2)**power."""
        return cls(1, 0, power)

    def is_zero(self) -> bool:
        return self._re == 0 and self._im == 0

    def conjugate(self) -> "ExactAmplitude":
        return ExactAmplitude(self._re, -self._im, self._scale)

    def abs_squared(self) -> Fraction:
        return Fraction(self._re * self._re + self._im * self._im, 1 << self._scale)

    def scaled_by_sqrt2(self, power: int) -> "ExactAmplitude":
        """Multiply by sqrt(2)**power (power may be negative)."""
        if power <= 0:
            return ExactAmplitude(self._re, self._im, self._scale - power)
        if self._scale >= power:
            return ExactAmplitude(self._re, self._im, self._scale - power)
        k = power - self._scale
        return ExactAmplitude(self._re << k, self._im << k, k)

    @staticmethod
    def _coerce(value) -> "ExactAmplitude | None":
        if isinstance(value, ExactAmplitude):
            return value
        if isinstance(value, int):
            return ExactAmplitude(value)
        return None

    def __add__(self, other) -> "ExactAmplitude":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        a, b = (self, other) if self._scale >= other._scale else (other, self)
        d = a._scale - b._scale
        if d % 2:
            raise ExactnessError(
                "sum of amplitudes with odd sqrt2-scale mismatch is not representable"
            )
        f = 1 << (d // 2)
        return ExactAmplitude(a._re + b._re * f, a._im + b._im * f, a._scale)

    __radd__ = __add__

    def __neg__(self) -> "ExactAmplitude":
        return ExactAmplitude(-self._re, -self._im, self._scale)

    def __sub__(self, other) -> "ExactAmplitude":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "ExactAmplitude":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "ExactAmplitude":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return ExactAmplitude(
            self._re * other._re - self._im * other._im,
            self._re * other._im + self._im * other._re,
            self._scale + other._scale,
        )

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return (
            self._re == other._re
            and self._im == other._im
            and self._scale == other._scale
        )

    def __hash__(self) -> int:
        return hash((self._re, self._im, self._scale))

    def __repr__(self) -> str:
        return f"ExactAmplitude({self._re}, {self._im}, {self._scale})"


class MeasBasis(enum.Enum):
    COMPUTATIONAL = "computational"
    DIAGONAL = "diagonal"
    CIRCULAR = "circular"


# Single-qubit basis vectors as ((re0, im0), (re1, im1), shared sqrt2 scale).
_BASIS_COMPONENTS = {
    (MeasBasis.COMPUTATIONAL, 0): ((1, 0), (0, 0), 0),
    (MeasBasis.COMPUTATIONAL, 1): ((0, 0), (1, 0), 0),
    (MeasBasis.DIAGONAL, 0): ((1, 0), (1, 0), 1),
    (MeasBasis.DIAGONAL, 1): ((1, 0), (-1, 0), 1),
    (MeasBasis.CIRCULAR, 0): ((1, 0), (0, 1), 1),
    (MeasBasis.CIRCULAR, 1): ((1, 0), (0, -1), 1),
}


@dataclass(frozen=True)
class MeasurementRecord:
    qubit_index: int
    basis: MeasBasis
    outcome: int


_ZERO = ExactAmplitude(0)


class StateVector:
    """Dense register of exact amplitudes with squared norm exactly 1."""

    __slots__ = ("_n", "_amps", "_support")

    def __init__(
        self,
        num_qubits: int,
        amplitudes: Sequence[ExactAmplitude],
        *,
        cap: int = QUBIT_CAP,
        validate_norm: bool = True,
        support: Sequence[int] | None = None,
    ) -> None:
        if num_qubits < 1 or num_qubits > cap:
            raise ValueError(f"num_qubits must be in [1, {cap}], got {num_qubits}")
        amps = tuple(amplitudes)
        if len(amps) != 1 << num_qubits:
            raise ValueError("amplitude count must be 2**num_qubits")
        self._n = num_qubits
        self._amps = amps
        if support is None:
            # full scan; internal callers that already know the nonzero
            # indices pass them to keep collapse cost proportional to support
            self._support = tuple(i for i, a in enumerate(amps) if not a.is_zero())
        else:
            self._support = tuple(sorted(support))
        if validate_norm and self.norm_squared() != 1:
            raise ValueError("state vector must have squared norm exactly 1")

    @property
    def num_qubits(self) -> int:
        return self._n

    @property
    def amplitudes(self) -> tuple[ExactAmplitude, ...]:
        return self._amps

    @property
    def support(self) -> tuple[int, ...]:
        """Indices of nonzero amplitudes, ascending."""
        return self._support

    def amplitude(self, index: int) -> ExactAmplitude:
        return self._amps[index]

    def norm_squared(self) -> Fraction:
        total = Fraction(0)
        for i in self._support:
            total += self._amps[i].abs_squared()
        return total

    def dump_lines(self) -> list[str]:
        """One line per nonzero amplitude: ``index_bits re_int im_int scale``."""
        return [
            f"{i:0{self._n}b} {self._amps[i].re_int} {self._amps[i].im_int} "
            f"{self._amps[i].sqrt2_scale}"
            for i in self._support
        ]

    def __eq__(self, other) -> bool:
        if not isinstance(other, StateVector):
            return NotImplemented
        return self._n == other._n and self._amps == other._amps

    def __hash__(self) -> int:
        return hash((self._n, self._amps))

    def __repr__(self) -> str:
        return f"StateVector(num_qubits={self._n}, support={len(self._support)})"


def make_ghz(n: int, *, cap: int = QUBIT_CAP) -> StateVector:
    """(|0...0> + |1...1>) / sqrt(2) on n qubits; n = 1 gives (|0> + |1>) / sqrt(2)."""
    if n < 1 or n > cap:
        raise ValueError(f"GHZ register size must be in [1, {cap}], got {n}")
    amps = [ExactAmplitude.zero()] * (1 << n)
    amps[0] = ExactAmplitude.inv_sqrt2()
    amps[(1 << n) - 1] = ExactAmplitude.inv_sqrt2()
    return StateVector(
        n, amps, cap=cap, validate_norm=False, support=(0, (1 << n) - 1)
    )


def basis_state(basis: MeasBasis, bit: int) -> StateVector:
    """Single-qubit basis vector for ``basis`` with outcome label ``bit``."""
    if bit not in (0, 1):
        raise ValueError("bit must be 0 or 1")
    (r0, i0), (r1, i1), s = _BASIS_COMPONENTS[(basis, bit)]
    return StateVector(
        1,
        [ExactAmplitude(r0, i0, s), ExactAmplitude(r1, i1, s)],
        validate_norm=False,
    )


def _accumulate(acc: dict, key: int, re: int, im: int, scale: int) -> None:
    # Accumulates Gaussian-integer terms over a common sqrt2 scale per key.
    if re == 0 and im == 0:
        return
    entry = acc.get(key)
    if entry is None:
        acc[key] = [re, im, scale]
        return
    ere, eim, esc = entry
    if ere == 0 and eim == 0:
        entry[0] = re
        entry[1] = im
        entry[2] = scale
        return
    if esc == scale:
        entry[0] = ere + re
        entry[1] = eim + im
        return
    d = esc - scale
    if d % 2:
        raise ExactnessError("mixed sqrt2-scale parity: state outside the exact set")
    if d > 0:
        f = 1 << (d // 2)
        entry[0] = ere + re * f
        entry[1] = eim + im * f
    else:
        f = 1 << (-d // 2)
        entry[0] = ere * f + re
        entry[1] = eim * f + im
        entry[2] = scale


def _power_of_two_exponent(p: Fraction) -> int:
    # p == 2**-t for integer t >= 0, else ExactnessError.
    if p.numerator != 1:
        raise ExactnessError(f"renormalization needs a power-of-two probability, got {p}")
    den = p.denominator
    if den & (den - 1):
        raise ExactnessError(f"renormalization needs a power-of-two probability, got {p}")
    return den.bit_length() - 1


def measure_qubit(
    state: StateVector,
    qubit_index: int,
    basis: MeasBasis,
    draws: DrawSource,
) -> tuple[int, StateVector, Fraction]:
    """Projective measurement of one qubit.

    Samples the outcome with its exact Born probability using ``draws``,
    and returns ``(outcome, collapsed_state, probability_of_outcome)``.
    The collapsed state keeps the measured qubit, left in the basis vector
    of the observed outcome, and is renormalized exactly (the reachable
    states here only ever need a sqrt(2)-power renormalization; anything
    else raises :class:`ExactnessError`).
    """
    n = state.num_qubits
    if qubit_index < 1 or qubit_index > n:
        raise ValueError(f"qubit index must be in [1, {n}], got {qubit_index}")
    pos = n - qubit_index
    mask = 1 << pos

    # support doubles with every measured qubit, so this loop dominates run
    # cost; it stays on plain ints and mutable [re, im, scale] entries
    amps = state.amplitudes
    coeff0: dict[int, list] = {}
    coeff1: dict[int, list] = {}
    branches = (
        (coeff0, _BASIS_COMPONENTS[(basis, 0)]),
        (coeff1, _BASIS_COMPONENTS[(basis, 1)]),
    )
    for idx in state.support:
        a = amps[idx]
        are = a._re
        aim = a._im
        asc = a._scale
        v = (idx >> pos) & 1
        base = idx & ~mask
        for acc, comp in branches:
            cre, cim = comp[v]
            if cre == 0 and cim == 0:
                continue
            # conj(component) * amplitude
            tre = cre * are + cim * aim
            tim = cre * aim - cim * are
            tsc = asc + comp[2]
            entry = acc.get(base)
            if entry is None:
                acc[base] = [tre, tim, tsc]
                continue
            d = entry[2] - tsc
            if d == 0:
                entry[0] += tre
                entry[1] += tim
            elif d % 2:
                raise ExactnessError(
                    "mixed sqrt2-scale parity: state outside the exact set"
                )
            elif d > 0:
                f = 1 << (d // 2)
                entry[0] += tre * f
                entry[1] += tim * f
            else:
                f = 1 << (-d // 2)
                entry[0] = entry[0] * f + tre
                entry[1] = entry[1] * f + tim
                entry[2] = tsc

    probs = {}
    for b, acc in ((0, coeff0), (1, coeff1)):
        # integer numerators grouped by scale, one Fraction per scale
        by_scale: dict[int, int] = {}
        for re, im, sc in acc.values():
            if re or im:
                by_scale[sc] = by_scale.get(sc, 0) + re * re + im * im
        total = Fraction(0)
        for sc, num in by_scale.items():
            total += Fraction(num, 1 << sc)
        probs[b] = total
    if probs[0] + probs[1] != 1:
        raise ExactnessError("measurement branches do not sum to 1")

    outcome = draws.draw(probs[0])
    p = probs[outcome]
    t = _power_of_two_exponent(p)

    (r0, i0), (r1, i1), cs = _BASIS_COMPONENTS[(basis, outcome)]
    out_comps = ((0, r0, i0), (1, r1, i1))
    new_amps = [_ZERO] * (1 << n)
    written = []
    for base, (re, im, sc) in (coeff0 if outcome == 0 else coeff1).items():
        if re == 0 and im == 0:
            continue
        sc2 = sc + cs - t
        for v, cre, cim in out_comps:
            if cre == 0 and cim == 0:
                continue
            re2 = re * cre - im * cim
            im2 = re * cim + im * cre
            if sc2 >= 0:
                amp = ExactAmplitude(re2, im2, sc2)
            else:
                # multiplying by the sqrt(2) overshoot keeps integers exact
                amp = ExactAmplitude(re2 << -sc2, im2 << -sc2, -sc2)
            idx = base | (v << pos)
            new_amps[idx] = amp
            written.append(idx)
    collapsed = StateVector(n, new_amps, validate_norm=False, support=written)
    return outcome, collapsed, p


def outcome_probability(
    state: StateVector,
    assignment: Iterable[tuple[int, MeasBasis, int]],
) -> Fraction:
    """Exact probability of a joint measurement outcome.

    ``assignment`` lists ``(qubit_index, basis, outcome_bit)`` with each
    qubit listed at most once.  Unlisted qubits are marginalized over, so a
    partial assignment yields the marginal probability of the listed
    outcomes.
    """
    n = state.num_qubits
    factors = []
    listed = 0
    for qubit, basis, bit in assignment:
        if qubit < 1 or qubit > n:
            raise ValueError(f"qubit index must be in [1, {n}], got {qubit}")
        if bit not in (0, 1):
            raise ValueError("outcome bit must be 0 or 1")
        pos = n - qubit
        if listed & (1 << pos):
            raise ValueError(f"qubit {qubit} listed twice in assignment")
        listed |= 1 << pos
        (r0, i0), (r1, i1), s = _BASIS_COMPONENTS[(basis, bit)]
        # store conjugated components: probability uses <v|state>
        factors.append((pos, r0, -i0, r1, -i1, s))

    keep = ~listed & ((1 << n) - 1)
    amps = state.amplitudes
    acc: dict[int, list] = {}
    for idx in state.support:
        a = amps[idx]
        fre, fim, fsc = a.re_int, a.im_int, a.sqrt2_scale
        dead = False
        for pos, r0, i0, r1, i1, s in factors:
            if (idx >> pos) & 1:
                cre, cim = r1, i1
            else:
                cre, cim = r0, i0
            if cre == 0 and cim == 0:
                dead = True
                break
            fre, fim = fre * cre - fim * cim, fre * cim + fim * cre
            fsc += s
        if dead:
            continue
        _accumulate(acc, idx & keep, fre, fim, fsc)

    total = Fraction(0)
    for re, im, sc in acc.values():
        if re or im:
            total += Fraction(re * re + im * im, 1 << sc)
    return total

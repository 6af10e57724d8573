"""Exact single-party and two-party boxes.

A box is an input/output device described by a conditional outcome
distribution.  A :class:`LocalBox` holds a table ``p(a|x)`` for one party;
a :class:`BipartiteBox` holds ``p(ab|xy)`` for two parties (Alice gets
``x`` and outputs ``a``, Bob gets ``y`` and outputs ``b``).

Every probability in a table is an exact :class:`fractions.Fraction`.
Construction validates nonnegativity and normalization exactly, and all
comparisons in this module are exact equalities; floats are rejected at
the door so that no rounding can leak into a derivation.

Special families used throughout the package:

* deterministic boxes ``a = f(x)`` (:class:`DetLocalBox`),
* the four reversible single-bit strategies ``a = alpha*x XOR beta``
  (:class:`SBox`),
* the eight extremal nonlocal correlations with
  ``a XOR b = (x XOR alpha)(y XOR beta) XOR delta`` (:class:`PRBox`).
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import SignallingError, ValidationError, ZeroProbabilityError

Prob = Fraction

_HALF = Fraction(1, 2)


def as_prob(value: Fraction | int | str) -> Fraction:
    """Coerce ``value`` to an exact probability in [0, 1].

    Accepts Fractions, ints and strings such as ``"3/8"``; floats are
    rejected because they would contaminate exact arithmetic.
    """
    if isinstance(value, float):
        raise ValidationError(
            f"probabilities must be exact rationals, got float {value!r}"
        )
    if isinstance(value, Fraction):
        frac = value
    elif isinstance(value, (int, str)):
        try:
            frac = Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"not a rational literal: {value!r}") from exc
    else:
        raise ValidationError(f"cannot interpret {value!r} as a probability")
    if not 0 <= frac <= 1:
        raise ValidationError(f"probability {frac} outside [0, 1]")
    return frac


def _bit(value: int, name: str) -> int:
    if value not in (0, 1):
        raise ValidationError(f"{name} must be 0 or 1, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class LocalBox:
    """Single-party box: ``table[x][a]`` is the exact probability p(a|x)."""

    table: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        try:
            rows = tuple(tuple(as_prob(p) for p in row) for row in self.table)
        except TypeError as exc:
            raise ValidationError("local box table must be nested sequences") from exc
        if not rows or any(not row for row in rows):
            raise ValidationError("local box table must be non-empty")
        width = len(rows[0])
        if any(len(row) != width for row in rows):
            raise ValidationError("every input row must list the same outcomes")
        for x, row in enumerate(rows):
            total = sum(row)
            if total != 1:
                raise ValidationError(f"row x={x} sums to {total}, expected 1")
        object.__setattr__(self, "table", rows)

    @property
    def num_inputs(self) -> int:
        return len(self.table)

    @property
    def num_outputs(self) -> int:
        return len(self.table[0])

    def prob(self, x: int, a: int) -> Fraction:
        return self.table[x][a]

    @property
    def is_deterministic(self) -> bool:
        return all(p in (0, 1) for row in self.table for p in row)


@dataclass(frozen=True)
class DetLocalBox:
    """Deterministic strategy ``a = strategy[x]`` over ``num_outputs`` outcomes."""

    strategy: tuple[int, ...]
    num_outputs: int

    def __post_init__(self) -> None:
        strategy = tuple(int(a) for a in self.strategy)
        if not strategy:
            raise ValidationError("deterministic box needs at least one input")
        if self.num_outputs < 1:
            raise ValidationError("deterministic box needs at least one outcome")
        for x, a in enumerate(strategy):
            if not 0 <= a < self.num_outputs:
                raise ValidationError(
                    f"strategy value {a} at x={x} outside range(0, {self.num_outputs})"
                )
        object.__setattr__(self, "strategy", strategy)

    @property
    def num_inputs(self) -> int:
        return len(self.strategy)

    def as_local_box(self) -> LocalBox:
        rows = tuple(
            tuple(Fraction(1 if a == fx else 0) for a in range(self.num_outputs))
            for fx in self.strategy
        )
        return LocalBox(rows)


def enumerate_det_boxes(num_inputs: int, num_outputs: int) -> list[DetLocalBox]:
    """All deterministic boxes on the given alphabet, in lexicographic
    order of the strategy tuple ``(f(0), f(1), ...)``."""
    if num_inputs < 1 or num_outputs < 1:
        raise ValidationError("alphabet sizes must be at least 1")
    return [
        DetLocalBox(strategy, num_outputs)
        for strategy in itertools.product(range(num_outputs), repeat=num_inputs)
    ]


@dataclass(frozen=True)
class SBox:
    """Reversible single-bit strategy ``a = alpha*x XOR beta``.

    The four instances are the deterministic vertices of the one-bit
    local square; ``beta`` is the output at x=0 and ``alpha`` is the
    slope that decides whether the input is echoed into the output.
    """

    alpha: int
    beta: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", _bit(self.alpha, "alpha"))
        object.__setattr__(self, "beta", _bit(self.beta, "beta"))

    def output(self, x: int) -> int:
        return (self.alpha * _bit(x, "x")) ^ self.beta

    @property
    def index(self) -> int:
        """Canonical position 2*alpha + beta in the S-box family."""
        return 2 * self.alpha + self.beta

    @property
    def label(self) -> str:
        return f"S{self.alpha}{self.beta}"

    def as_det_box(self) -> DetLocalBox:
        return DetLocalBox((self.output(0), self.output(1)), 2)

    def as_local_box(self) -> LocalBox:
        return self.as_det_box().as_local_box()

    @classmethod
    def from_local_box(cls, box: LocalBox) -> "SBox":
        if box.num_inputs != 2 or box.num_outputs != 2 or not box.is_deterministic:
            raise ValidationError(
                "only deterministic 2-input/2-output boxes match an S box"
            )
        f0 = 0 if box.prob(0, 0) == 1 else 1
        f1 = 0 if box.prob(1, 0) == 1 else 1
        return cls(alpha=f0 ^ f1, beta=f0)


@dataclass(frozen=True)
class BipartiteBox:
    """Two-party box: ``table[x][y][a][b]`` is the exact p(ab|xy).

    Construction enforces nonnegative entries and exact normalization
    for every input pair; it does *not* enforce no-signalling, which is
    a separate predicate (:func:`is_no_signalling`).
    """

    table: tuple[tuple[tuple[tuple[Fraction, ...], ...], ...], ...]

    def __post_init__(self) -> None:
        try:
            cells = tuple(
                tuple(
                    tuple(tuple(as_prob(p) for p in row_b) for row_b in block_a)
                    for block_a in block_y
                )
                for block_y in self.table
            )
        except TypeError as exc:
            raise ValidationError("bipartite table must be nested sequences") from exc
        if not cells or any(not y_block for y_block in cells):
            raise ValidationError("bipartite table must be non-empty")
        y_dim = len(cells[0])
        a_dim = len(cells[0][0]) if y_dim else 0
        b_dim = len(cells[0][0][0]) if a_dim else 0
        for x, block_y in enumerate(cells):
            if len(block_y) != y_dim:
                raise ValidationError("ragged table: y dimension varies with x")
            for y, block_a in enumerate(block_y):
                if len(block_a) != a_dim or any(len(r) != b_dim for r in block_a):
                    raise ValidationError("ragged table: outcome dimensions vary")
                total = sum(p for row in block_a for p in row)
                if total != 1:
                    raise ValidationError(
                        f"entries for (x={x}, y={y}) sum to {total}, expected 1"
                    )
        object.__setattr__(self, "table", cells)

    @property
    def num_inputs_alice(self) -> int:
        return len(self.table)

    @property
    def num_inputs_bob(self) -> int:
        return len(self.table[0])

    @property
    def num_outputs_alice(self) -> int:
        return len(self.table[0][0])

    @property
    def num_outputs_bob(self) -> int:
        return len(self.table[0][0][0])

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return (
            self.num_inputs_alice,
            self.num_inputs_bob,
            self.num_outputs_alice,
            self.num_outputs_bob,
        )

    def prob(self, x: int, y: int, a: int, b: int) -> Fraction:
        return self.table[x][y][a][b]


def product_box(alice: LocalBox, bob: LocalBox) -> BipartiteBox:
    """Uncorrelated pair: p(ab|xy) = p(a|x) * p(b|y)."""
    table = tuple(
        tuple(
            tuple(
                tuple(alice.prob(x, a) * bob.prob(y, b) for b in range(bob.num_outputs))
                for a in range(alice.num_outputs)
            )
            for y in range(bob.num_inputs)
        )
        for x in range(alice.num_inputs)
    )
    return BipartiteBox(table)


@dataclass(frozen=True)
class PRBox:
    """Extremal nonlocal correlation with uniform marginals.

    Outputs satisfy ``a XOR b = (x XOR alpha)(y XOR beta) XOR delta``
    with probability one, each consistent pair occurring with
    probability 1/2.  ``alpha`` and ``beta`` shift which input pair
    carries the anticorrelation, ``delta`` flips the output parity.
    """

    alpha: int
    beta: int
    delta: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", _bit(self.alpha, "alpha"))
        object.__setattr__(self, "beta", _bit(self.beta, "beta"))
        object.__setattr__(self, "delta", _bit(self.delta, "delta"))

    @property
    def label(self) -> str:
        return f"PR{self.alpha}{self.beta}{self.delta}"

    def parity(self, x: int, y: int) -> int:
        """The forced value of a XOR b on inputs (x, y)."""
        return ((x ^ self.alpha) & (y ^ self.beta)) ^ self.delta

    def as_bipartite_box(self) -> BipartiteBox:
        table = tuple(
            tuple(
                tuple(
                    tuple(
                        _HALF if (a ^ b) == self.parity(x, y) else Fraction(0)
                        for b in (0, 1)
                    )
                    for a in (0, 1)
                )
                for y in (0, 1)
            )
            for x in (0, 1)
        )
        return BipartiteBox(table)


# ---------------------------------------------------------------------------
# marginals and conditioning
# ---------------------------------------------------------------------------


# pure function of the table, and conditioning-heavy callers re-ask for
# the same box many times, so the scan is memoized
@functools.lru_cache(maxsize=512)
def _no_signalling_scan(box: BipartiteBox) -> tuple[str, ...]:
    problems: list[str] = []
    X, Y, A, B = box.shape
    for x in range(X):
        for a in range(A):
            sums = [sum(box.table[x][y][a]) for y in range(Y)]
            if any(s != sums[0] for s in sums):
                problems.append(
                    f"Alice marginal p(a={a}|x={x}) depends on Bob's input: "
                    + ", ".join(f"y={y}: {s}" for y, s in enumerate(sums))
                )
    for y in range(Y):
        for b in range(B):
            sums = [
                sum(box.table[x][y][a][b] for a in range(A)) for x in range(X)
            ]
            if any(s != sums[0] for s in sums):
                problems.append(
                    f"Bob marginal p(b={b}|y={y}) depends on Alice's input: "
                    + ", ".join(f"x={x}: {s}" for x, s in enumerate(sums))
                )
    return tuple(problems)


def no_signalling_violations(box: BipartiteBox) -> list[str]:
    """Human-readable list of marginal-dependence violations (empty iff
    the box is no-signalling)."""
    return list(_no_signalling_scan(box))


def is_no_signalling(box: BipartiteBox) -> bool:
    """True iff each party's marginal is independent of the other's input."""
    return not no_signalling_violations(box)


def _require_no_signalling(box: BipartiteBox, op: str) -> None:
    problems = no_signalling_violations(box)
    if problems:
        raise SignallingError(f"{op} needs a no-signalling box: " + "; ".join(problems))


def alice_marginal(box: BipartiteBox) -> LocalBox:
    """Alice's reduced box p(a|x).

    By no-signalling the sum over Bob's outcomes is the same for every
    y; we read it off at y=0.
    """
    _require_no_signalling(box, "alice_marginal")
    rows = tuple(
        tuple(sum(box.table[x][0][a]) for a in range(box.num_outputs_alice))
        for x in range(box.num_inputs_alice)
    )
    return LocalBox(rows)


def bob_outcome_distribution(box: BipartiteBox, y: int) -> tuple[Fraction, ...]:
    """Bob's outcome distribution p(b|y); x-independent by no-signalling
    (read off at x=0)."""
    _require_no_signalling(box, "bob_outcome_distribution")
    if not 0 <= y < box.num_inputs_bob:
        raise ValidationError(f"y={y} outside range(0, {box.num_inputs_bob})")
    A = box.num_outputs_alice
    return tuple(
        sum(box.table[0][y][a][b] for a in range(A))
        for b in range(box.num_outputs_bob)
    )


def condition_on_bob(box: BipartiteBox, y: int, b: int) -> LocalBox:
    """Alice's conditional box p(a|x; y,b) after Bob measured y and saw b."""
    _require_no_signalling(box, "condition_on_bob")
    if not 0 <= y < box.num_inputs_bob:
        raise ValidationError(f"y={y} outside range(0, {box.num_inputs_bob})")
    if not 0 <= b < box.num_outputs_bob:
        raise ValidationError(f"b={b} outside range(0, {box.num_outputs_bob})")
    A = box.num_outputs_alice
    p_b = sum(box.table[0][y][a][b] for a in range(A))
    if p_b == 0:
        raise ZeroProbabilityError(
            f"p(b={b}|y={y}) = 0: conditional state undefined"
        )
    rows = tuple(
        tuple(box.table[x][y][a][b] / p_b for a in range(A))
        for x in range(box.num_inputs_alice)
    )
    return LocalBox(rows)

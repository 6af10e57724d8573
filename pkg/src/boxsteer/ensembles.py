"""Weighted ensembles of boxes and their reductions.

An :class:`Ensemble` is a finite convex combination of deterministic
single-party boxes; :func:`mix` collapses it to the box it realizes.
Only deterministic constituents are supported: mixed constituents can
always be refined into deterministic ones without changing anything
observable.

A :class:`NonlocalEnsemble` is a convex combination of two-party
members over the one-bit scenario: uncorrelated pairs of S boxes and
extremal PR correlations.  When Bob measures ``y``, each member leaves
Alice in a definite S box; :func:`posterior_alice_reduction` computes
the resulting single-party ensemble together with a provenance record
per (member, Bob outcome) pair, which downstream code uses for referee
bookkeeping and for Bob's-knowledge arguments.

Duplicate members are merged and zero weights dropped on construction,
so equality of member tuples is canonical up to ordering;
:func:`ensembles_equal` compares regardless of order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Sequence, TypeVar, Union

from .boxes import (
    BipartiteBox,
    LocalBox,
    PRBox,
    SBox,
    as_prob,
    product_box,
)
from .errors import ValidationError

_K = TypeVar("_K", bound=Hashable)


def _merge_weighted(pairs: Iterable[tuple[Fraction, _K]]) -> list[tuple[Fraction, _K]]:
    # first-occurrence order, duplicates merged, exact zeros dropped
    order: list[_K] = []
    totals: dict[_K, Fraction] = {}
    for weight, key in pairs:
        if key in totals:
            totals[key] += weight
        else:
            totals[key] = weight
            order.append(key)
    return [(totals[k], k) for k in order if totals[k] != 0]


@dataclass(frozen=True)
class Ensemble:
    """Convex combination of deterministic single-party boxes.

    ``members`` is a tuple of (weight, box) pairs; weights are exact,
    nonnegative and sum to one.
    """

    members: tuple[tuple[Fraction, LocalBox], ...]

    def __post_init__(self) -> None:
        pairs = []
        for entry in self.members:
            try:
                weight, box = entry
            except (TypeError, ValueError) as exc:
                raise ValidationError(
                    "ensemble members must be (weight, box) pairs"
                ) from exc
            if not isinstance(box, LocalBox):
                raise ValidationError(f"ensemble member {box!r} is not a LocalBox")
            pairs.append((as_prob(weight), box))
        if not pairs:
            raise ValidationError("ensemble needs at least one member")
        shape = (pairs[0][1].num_inputs, pairs[0][1].num_outputs)
        for _, box in pairs:
            if (box.num_inputs, box.num_outputs) != shape:
                raise ValidationError("ensemble members must share the same alphabet")
            if not box.is_deterministic:
                raise ValidationError(
                    "ensemble constituents must be deterministic boxes"
                )
        merged = _merge_weighted((w, box) for w, box in pairs)
        total = sum(w for w, _ in merged)
        if total != 1:
            raise ValidationError(f"ensemble weights sum to {total}, expected 1")
        object.__setattr__(
            self, "members", tuple((w, box) for w, box in merged)
        )

    @property
    def cardinality(self) -> int:
        return len(self.members)

    @property
    def num_inputs(self) -> int:
        return self.members[0][1].num_inputs

    @property
    def num_outputs(self) -> int:
        return self.members[0][1].num_outputs

    def weight_of(self, box: LocalBox) -> Fraction:
        for w, member in self.members:
            if member == box:
                return w
        return Fraction(0)


def mix(ensemble: Ensemble) -> LocalBox:
    """The box realized by the ensemble: the weighted sum of members."""
    X, A = ensemble.num_inputs, ensemble.num_outputs
    rows = [[Fraction(0)] * A for _ in range(X)]
    for weight, box in ensemble.members:
        for x in range(X):
            for a in range(A):
                rows[x][a] += weight * box.prob(x, a)
    return LocalBox(tuple(tuple(row) for row in rows))


def realizes(ensemble: Ensemble, target: LocalBox) -> bool:
    """True iff the ensemble mixes exactly to ``target``."""
    if (ensemble.num_inputs, ensemble.num_outputs) != (
        target.num_inputs,
        target.num_outputs,
    ):
        raise ValidationError("ensemble and target box have different alphabets")
    return mix(ensemble) == target


def ensembles_equal(first: Ensemble, second: Ensemble) -> bool:
    """Order-insensitive equality of merged member weights."""
    return dict((box, w) for w, box in first.members) == dict(
        (box, w) for w, box in second.members
    )


# ---------------------------------------------------------------------------
# two-party ensembles over the one-bit scenario
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProductMember:
    """Weighted uncorrelated pair: Alice holds one S box, Bob another."""

    weight: Fraction
    alice: SBox
    bob: SBox

    def __post_init__(self) -> None:
        object.__setattr__(self, "weight", as_prob(self.weight))
        if not isinstance(self.alice, SBox) or not isinstance(self.bob, SBox):
            raise ValidationError("product member factors must be S boxes")

    @property
    def label(self) -> str:
        return f"{self.alice.label}x{self.bob.label}"

    def as_bipartite_box(self) -> BipartiteBox:
        return product_box(self.alice.as_local_box(), self.bob.as_local_box())


@dataclass(frozen=True)
class PRMember:
    """Weighted extremal nonlocal correlation."""

    weight: Fraction
    box: PRBox

    def __post_init__(self) -> None:
        object.__setattr__(self, "weight", as_prob(self.weight))
        if not isinstance(self.box, PRBox):
            raise ValidationError("PR member must wrap a PRBox")

    @property
    def label(self) -> str:
        return self.box.label

    def as_bipartite_box(self) -> BipartiteBox:
        return self.box.as_bipartite_box()


Member = Union[ProductMember, PRMember]


@dataclass(frozen=True)
class NonlocalEnsemble:
    """Convex combination of product members and PR members.

    Members carry a stable position: products first, then PR members,
    each group in construction order after duplicate merging.
    """

    products: tuple[ProductMember, ...]
    prs: tuple[PRMember, ...]

    def __post_init__(self) -> None:
        products = tuple(self.products)
        prs = tuple(self.prs)
        if not all(isinstance(m, ProductMember) for m in products):
            raise ValidationError("products must be ProductMember instances")
        if not all(isinstance(m, PRMember) for m in prs):
            raise ValidationError("prs must be PRMember instances")
        merged_products = _merge_weighted(
            (m.weight, (m.alice, m.bob)) for m in products
        )
        merged_prs = _merge_weighted((m.weight, m.box) for m in prs)
        total = sum(w for w, _ in merged_products) + sum(w for w, _ in merged_prs)
        if total != 1:
            raise ValidationError(f"member weights sum to {total}, expected 1")
        object.__setattr__(
            self,
            "products",
            tuple(ProductMember(w, alice, bob) for w, (alice, bob) in merged_products),
        )
        object.__setattr__(
            self, "prs", tuple(PRMember(w, box) for w, box in merged_prs)
        )

    @classmethod
    def from_weights(
        cls,
        products: dict[tuple[tuple[int, int], tuple[int, int]], Fraction | int | str]
        | None = None,
        prs: dict[tuple[int, int, int], Fraction | int | str] | None = None,
    ) -> "NonlocalEnsemble":
        """Build from ``{((i,j),(k,l)): weight}`` and ``{(alpha,beta,delta): weight}``."""
        product_members = tuple(
            ProductMember(as_prob(w), SBox(*ij), SBox(*kl))
            for (ij, kl), w in (products or {}).items()
        )
        pr_members = tuple(
            PRMember(as_prob(w), PRBox(*abd)) for abd, w in (prs or {}).items()
        )
        return cls(product_members, pr_members)

    @property
    def members(self) -> tuple[Member, ...]:
        return self.products + self.prs

    def member(self, member_id: int) -> Member:
        members = self.members
        if not 0 <= member_id < len(members):
            raise ValidationError(
                f"member_id {member_id} outside range(0, {len(members)})"
            )
        return members[member_id]

    def product_totals(self) -> dict[tuple[int, int], Fraction]:
        """Aggregate product weight per Alice factor (alpha, beta)."""
        totals: dict[tuple[int, int], Fraction] = {}
        for m in self.products:
            key = (m.alice.alpha, m.alice.beta)
            totals[key] = totals.get(key, Fraction(0)) + m.weight
        return {k: v for k, v in totals.items() if v != 0}

    def pr_totals(self) -> dict[int, Fraction]:
        """Aggregate PR weight per beta parameter."""
        totals: dict[int, Fraction] = {}
        for m in self.prs:
            totals[m.box.beta] = totals.get(m.box.beta, Fraction(0)) + m.weight
        return {k: v for k, v in totals.items() if v != 0}


def mix_nonlocal(ensemble: NonlocalEnsemble) -> BipartiteBox:
    """The two-party box realized by the ensemble."""
    acc = [[[[Fraction(0)] * 2 for _ in range(2)] for _ in range(2)] for _ in range(2)]
    for member in ensemble.members:
        box = member.as_bipartite_box()
        for x in range(2):
            for y in range(2):
                for a in range(2):
                    for b in range(2):
                        acc[x][y][a][b] += member.weight * box.prob(x, y, a, b)
    return BipartiteBox(
        tuple(
            tuple(tuple(tuple(acc[x][y][a]) for a in range(2)) for y in range(2))
            for x in range(2)
        )
    )


def constituent_after_measurement(member: Member, y: int, b: int) -> SBox:
    """Alice's definite S box once Bob has measured ``y`` and seen ``b``.

    For a product member the answer is just Alice's factor.  For a PR
    member the forced parity relation turns Alice's output into an
    affine function of x with slope ``y XOR beta`` and intercept
    ``alpha*(y XOR beta) XOR delta XOR b``.
    """
    if isinstance(member, ProductMember):
        return member.alice
    if isinstance(member, PRMember):
        slope = y ^ member.box.beta
        intercept = (member.box.alpha * slope) ^ member.box.delta ^ b
        return SBox(slope, intercept)
    raise ValidationError(f"unknown member type {member!r}")


@dataclass(frozen=True)
class ReductionRecord:
    """One provenance entry of a reduction.

    ``bob_outcome`` is None for product members: Bob's outcome there is
    produced by his own factor and carries no information about which
    member the round used.  PR members split into one record per Bob
    outcome, each with half the member weight.
    """

    member_id: int
    bob_outcome: int | None
    constituent: SBox
    weight: Fraction


@dataclass(frozen=True)
class AliceReduction:
    """Alice's ensemble after Bob's input ``input_choice``, with provenance."""

    input_choice: int
    ensemble: Ensemble
    records: tuple[ReductionRecord, ...]

    def constituent_weights(self) -> dict[SBox, Fraction]:
        totals: dict[SBox, Fraction] = {}
        for record in self.records:
            totals[record.constituent] = (
                totals.get(record.constituent, Fraction(0)) + record.weight
            )
        return {k: v for k, v in totals.items() if v != 0}


def posterior_alice_reduction(ensemble: NonlocalEnsemble, y: int) -> AliceReduction:
    """Reduce a two-party ensemble to Alice's ensemble for Bob input ``y``."""
    if y not in (0, 1):
        raise ValidationError(f"y must be 0 or 1, got {y!r}")
    records: list[ReductionRecord] = []
    for member_id, member in enumerate(ensemble.members):
        if isinstance(member, ProductMember):
            records.append(
                ReductionRecord(member_id, None, member.alice, member.weight)
            )
        else:
            half = member.weight / 2
            for b in (0, 1):
                records.append(
                    ReductionRecord(
                        member_id, b, constituent_after_measurement(member, y, b), half
                    )
                )
    members = [(r.weight, r.constituent.as_local_box()) for r in records]
    return AliceReduction(y, Ensemble(tuple(members)), tuple(records))


def posterior_alice_ensemble(ensemble: NonlocalEnsemble, y: int) -> Ensemble:
    """The merged single-party ensemble Bob's input ``y`` prepares for Alice."""
    return posterior_alice_reduction(ensemble, y).ensemble

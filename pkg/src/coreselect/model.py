"""Small combinatorial auction instances solved by exhaustive search.

Bids use XOR semantics: each bidder names alternative bundles and wins at
most one of them (winning none is worth zero). Instances are capped at 12
bidders and 8 goods, so every optimisation in this module is an exact
enumeration over feasible assignments.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable

MAX_BIDDERS = 12
MAX_GOODS = 8

# Welfare gaps at or below this count as exact ties for the winner search.
TIE_TOLERANCE = 1e-12

LLG_GOODS = ("g1", "g2")


class SizeLimitError(ValueError):
    """Instance exceeds the exhaustive-search scale caps."""


class InvalidCoalitionError(ValueError):
    """A coalition names a bidder id the instance does not contain."""


@dataclass(frozen=True)
class Bid:
    bundle: frozenset[str]
    value: float


@dataclass(frozen=True)
class Bidder:
    id: int
    bids: tuple[Bid, ...]


@dataclass(frozen=True)
class LlgBidProfile:
    """Bid triple of the local-local-global domain.

    ``a`` and ``b`` are the local bidders' bids on good 1 and good 2;
    ``g`` is the global bidder's bid on the package of both goods.
    """

    a: float
    b: float
    g: float

    def __post_init__(self) -> None:
        for name in ("a", "b", "g"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"LLG bid {name} must be finite and non-negative, got {value}")

    def swapped(self) -> "LlgBidProfile":
        """Profile with the two local bids exchanged."""
        return LlgBidProfile(self.b, self.a, self.g)

    def locals_win(self) -> bool:
        """True when the two locals jointly beat the global bid (ties go to the locals)."""
        return self.a + self.b >= self.g

    def to_instance(self) -> "AuctionInstance":
        return llg_instance(self.a, self.b, self.g)


@dataclass(frozen=True)
class AuctionInstance:
    """An auction with named goods and XOR bidders with ids 1..n, in order."""

    goods: tuple[str, ...]
    bidders: tuple[Bidder, ...]

    def __post_init__(self) -> None:
        if len(set(self.goods)) != len(self.goods):
            raise ValueError("duplicate good identifiers")
        if len(self.goods) > MAX_GOODS:
            raise SizeLimitError(f"at most {MAX_GOODS} goods supported, got {len(self.goods)}")
        if len(self.bidders) > MAX_BIDDERS:
            raise SizeLimitError(f"at most {MAX_BIDDERS} bidders supported, got {len(self.bidders)}")
        ids = [bidder.id for bidder in self.bidders]
        if ids != list(range(1, len(ids) + 1)):
            raise ValueError(f"bidder ids must be 1..n in order, got {ids}")
        declared = set(self.goods)
        for bidder in self.bidders:
            for bid in bidder.bids:
                if not bid.bundle:
                    raise ValueError(f"bidder {bidder.id} bids on an empty bundle")
                if not bid.bundle <= declared:
                    raise ValueError(
                        f"bidder {bidder.id} bids on undeclared goods {sorted(bid.bundle - declared)}"
                    )
                if not math.isfinite(bid.value) or bid.value < 0:
                    raise ValueError(
                        f"bidder {bidder.id} has a bid value that is not a finite non-negative number"
                    )

    @property
    def n(self) -> int:
        return len(self.bidders)

    @property
    def m(self) -> int:
        return len(self.goods)

    def bidder_ids(self) -> tuple[int, ...]:
        return tuple(bidder.id for bidder in self.bidders)

    def bid_value(self, bidder_id: int, bundle: frozenset[str]) -> float:
        """Value the bidder declared for exactly this bundle (0 if empty or unlisted)."""
        if not bundle:
            return 0.0
        best = 0.0
        for bid in self.bidders[bidder_id - 1].bids:
            if bid.bundle == bundle and bid.value > best:
                best = bid.value
        return best


@dataclass
class Allocation:
    """A feasible assignment of bundles to bidders and the welfare it realises."""

    assignment: dict[int, frozenset[str]]
    welfare: float

    def bundle_for(self, bidder_id: int) -> frozenset[str]:
        return self.assignment.get(bidder_id, frozenset())

    def winners(self) -> tuple[int, ...]:
        return tuple(i for i, bundle in sorted(self.assignment.items()) if bundle)


def llg_instance(a: float, b: float, g: float) -> AuctionInstance:
    """Three-bidder LLG shorthand: locals bid on one good each, the global bidder on both."""
    return AuctionInstance(
        goods=LLG_GOODS,
        bidders=(
            Bidder(1, (Bid(frozenset({"g1"}), float(a)),)),
            Bidder(2, (Bid(frozenset({"g2"}), float(b)),)),
            Bidder(3, (Bid(frozenset({"g1", "g2"}), float(g)),)),
        ),
    )


def _bidder_options(bidder: Bidder, good_index: dict[str, int]):
    """Candidate awards for one bidder, in canonical order.

    Positive-value bundles come first, sorted by their good indices, then the
    empty award. Zero-value bundles are never awarded (winning them is
    indistinguishable from winning nothing). Duplicate bundles keep the
    highest value.
    """
    best_by_key: dict[tuple[int, ...], tuple[float, frozenset[str]]] = {}
    for bid in bidder.bids:
        if bid.value <= 0.0:
            continue
        key = tuple(sorted(good_index[good] for good in bid.bundle))
        current = best_by_key.get(key)
        if current is None or bid.value > current[0]:
            best_by_key[key] = (bid.value, bid.bundle)
    options = []
    for key in sorted(best_by_key):
        value, bundle = best_by_key[key]
        mask = 0
        for index in key:
            mask |= 1 << index
        options.append((mask, value, bundle))
    options.append((0, 0.0, frozenset()))
    return options


def _exhaustive_best(
    instance: AuctionInstance, allowed: set[int]
) -> tuple[float, dict[int, frozenset[str]]]:
    """Welfare-maximal feasible assignment among the allowed bidders.

    Ties are broken toward the lexicographically smallest assignment vector
    over bidder ids, with non-empty bundles ordered before the empty award,
    so lower bidder ids win ties and at an exact locals/global welfare tie in
    LLG the locals win.
    """
    active = [bidder for bidder in instance.bidders if bidder.id in allowed]
    good_index = {good: i for i, good in enumerate(instance.goods)}
    options = [_bidder_options(bidder, good_index) for bidder in active]

    suffix_max = [0.0] * (len(active) + 1)
    for i in range(len(active) - 1, -1, -1):
        suffix_max[i] = suffix_max[i + 1] + max(value for _, value, _ in options[i])

    best_welfare = -1.0
    best_choice: list[frozenset[str]] | None = None
    choice: list[frozenset[str]] = [frozenset()] * len(active)

    def walk(idx: int, used_mask: int, welfare: float) -> None:
        nonlocal best_welfare, best_choice
        if idx == len(active):
            # Enumeration follows the canonical option order, so the first
            # assignment reaching a welfare level is the tie-break winner.
            if welfare > best_welfare + TIE_TOLERANCE:
                best_welfare = welfare
                best_choice = choice.copy()
            return
        if welfare + suffix_max[idx] < best_welfare - TIE_TOLERANCE:
            return
        for mask, value, bundle in options[idx]:
            if mask & used_mask:
                continue
            choice[idx] = bundle
            walk(idx + 1, used_mask | mask, welfare + value)
        choice[idx] = frozenset()

    walk(0, 0, 0.0)
    assert best_choice is not None
    assignment = {bidder.id: frozenset() for bidder in instance.bidders}
    for bidder, bundle in zip(active, best_choice):
        assignment[bidder.id] = bundle
    return max(best_welfare, 0.0), assignment


def winner_determination(instance: AuctionInstance) -> Allocation:
    """Efficient allocation of the full instance, with deterministic tie-breaking."""
    welfare, assignment = _exhaustive_best(instance, set(instance.bidder_ids()))
    return Allocation(assignment, welfare)


def _validated_coalition(instance: AuctionInstance, coalition: Iterable[int]) -> set[int]:
    ids = set(coalition)
    unknown = ids - set(instance.bidder_ids())
    if unknown:
        raise InvalidCoalitionError(f"unknown bidder ids in coalition: {sorted(unknown)}")
    return ids


def coalitional_value(instance: AuctionInstance, coalition: Iterable[int]) -> float:
    """Welfare the coalition achieves on its own, all other bids set to zero."""
    ids = _validated_coalition(instance, coalition)
    welfare, _ = _exhaustive_best(instance, ids)
    return welfare


def realized_welfare(
    instance: AuctionInstance, coalition: Iterable[int], allocation: Allocation
) -> float:
    """Total bid value the coalition receives under the given (efficient) allocation."""
    ids = _validated_coalition(instance, coalition)
    return sum(instance.bid_value(i, allocation.bundle_for(i)) for i in ids)


def coalition_value_table(instance: AuctionInstance) -> list[float]:
    """Coalitional value of every bidder subset, indexed by bitmask (bit i = bidder id i+1)."""
    n = instance.n
    table = [0.0] * (1 << n)
    for mask in range(1, 1 << n):
        ids = {i + 1 for i in range(n) if mask >> i & 1}
        table[mask] = _exhaustive_best(instance, ids)[0]
    return table


def instance_from_dict(data: dict) -> AuctionInstance:
    """Build an instance from the JSON object layout.

    Expected shape::

        {"goods": ["g1", "g2"],
         "bidders": [{"id": 1, "bids": [{"bundle": ["g1"], "value": 0.4}]}, ...]}
    """
    try:
        goods = tuple(str(good) for good in data["goods"])
        bidders = []
        for entry in data["bidders"]:
            bids = tuple(
                Bid(frozenset(str(good) for good in bid["bundle"]), float(bid["value"]))
                for bid in entry["bids"]
            )
            bidders.append(Bidder(int(entry["id"]), bids))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed instance object: {exc}") from exc
    bidders.sort(key=lambda bidder: bidder.id)
    return AuctionInstance(goods, tuple(bidders))


def instance_from_json(text: str) -> AuctionInstance:
    return instance_from_dict(json.loads(text))


def instance_to_dict(instance: AuctionInstance) -> dict:
    order = {good: i for i, good in enumerate(instance.goods)}
    return {
        "goods": list(instance.goods),
        "bidders": [
            {
                "id": bidder.id,
                "bids": [
                    {"bundle": sorted(bid.bundle, key=order.get), "value": bid.value}
                    for bid in bidder.bids
                ],
            }
            for bidder in instance.bidders
        ],
    }


def instance_to_json(instance: AuctionInstance, indent: int | None = None) -> str:
    return json.dumps(instance_to_dict(instance), indent=indent)

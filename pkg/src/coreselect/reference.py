"""Reference-point payment and payoff vectors computed from the exhaustive engine.

Six rules are supported: first price, VCG, and Shapley payments/payoffs with
and without the auctioneer counted as a player. Shapley payments are the
bidder's accepted bid value minus her payoff and are deliberately not clamped,
so losing bidders can carry a negative entry; the vectors are reference points
for a later core projection, not final prices.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import permutations
from math import factorial

from .model import (
    AuctionInstance,
    SizeLimitError,
    coalition_value_table,
    winner_determination,
)

PERMUTATION_ORACLE_MAX_BIDDERS = 6


class ReferenceRule(Enum):
    """The six reference-point rules, tagged with their command-line names."""

    FIRST_PRICE = "first-price"
    VCG = "vcg"
    SHAPLEY_PAYMENT_NO_AUCTIONEER = "shapley-no-auctioneer"
    SHAPLEY_PAYOFF_NO_AUCTIONEER = "shapley-payoff-no-auctioneer"
    SHAPLEY_PAYMENT_WITH_AUCTIONEER = "shapley-with-auctioneer"
    SHAPLEY_PAYOFF_WITH_AUCTIONEER = "shapley-payoff-with-auctioneer"

    @property
    def is_shapley(self) -> bool:
        return self.value.startswith("shapley")

    @property
    def is_payoff(self) -> bool:
        return "payoff" in self.value

    @property
    def with_auctioneer(self) -> bool:
        return "with-auctioneer" in self.value


@dataclass(frozen=True)
class PaymentVector:
    """Per-bidder payments or payoffs, indexed by bidder id (id i at position i-1)."""

    values: tuple[float, ...]
    kind: str = "payment"

    def for_bidder(self, bidder_id: int) -> float:
        return self.values[bidder_id - 1]

    def __getitem__(self, index: int) -> float:
        return self.values[index]

    def __iter__(self):
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)


def first_price(instance: AuctionInstance) -> PaymentVector:
    """Winners pay their accepted bid; losers pay nothing."""
    allocation = winner_determination(instance)
    return PaymentVector(
        tuple(instance.bid_value(i, allocation.bundle_for(i)) for i in instance.bidder_ids())
    )


def vcg(instance: AuctionInstance) -> PaymentVector:
    """Each bidder pays the externality she imposes on the others."""
    allocation = winner_determination(instance)
    full = (1 << instance.n) - 1
    table = coalition_value_table(instance)
    values = []
    for i in instance.bidder_ids():
        others_value = table[full & ~(1 << (i - 1))]
        others_realized = sum(
            instance.bid_value(j, allocation.bundle_for(j))
            for j in instance.bidder_ids()
            if j != i
        )
        values.append(others_value - others_realized)
    return PaymentVector(tuple(values))


def _shapley_weights(n: int, with_auctioneer: bool) -> list[float]:
    if with_auctioneer:
        return [
            factorial(s + 1) * factorial(n - s - 1) / factorial(n + 1) for s in range(n)
        ]
    return [factorial(s) * factorial(n - s - 1) / factorial(n) for s in range(n)]


def _payoffs_from_table(table: list[float], n: int, with_auctioneer: bool) -> tuple[float, ...]:
    weights = _shapley_weights(n, with_auctioneer)
    payoffs = []
    for i in range(n):
        bit = 1 << i
        total = 0.0
        for mask in range(1 << n):
            if mask & bit:
                continue
            total += weights[mask.bit_count()] * (table[mask | bit] - table[mask])
        payoffs.append(total)
    return tuple(payoffs)


def shapley_payoffs(instance: AuctionInstance, with_auctioneer: bool = False) -> PaymentVector:
    """Subset-weighted average marginal contribution of each bidder.

    With ``with_auctioneer`` the auctioneer is an extra player whose absence
    zeroes every coalition, which only changes the subset weights for the
    bidders themselves.
    """
    table = coalition_value_table(instance)
    return PaymentVector(_payoffs_from_table(table, instance.n, with_auctioneer), kind="payoff")


def shapley_payments(instance: AuctionInstance, with_auctioneer: bool = False) -> PaymentVector:
    """Accepted-bid value minus the Shapley payoff, computed on reported bids."""
    allocation = winner_determination(instance)
    payoffs = shapley_payoffs(instance, with_auctioneer)
    values = tuple(
        instance.bid_value(i, allocation.bundle_for(i)) - payoffs.for_bidder(i)
        for i in instance.bidder_ids()
    )
    return PaymentVector(values)


def auctioneer_payoff(instance: AuctionInstance) -> float:
    """Shapley payoff of the auctioneer when counted as a player.

    Coalitions without the auctioneer are worth nothing, so her marginal
    contribution to a bidder set S is the coalitional value of S itself.
    """
    n = instance.n
    table = coalition_value_table(instance)
    total = 0.0
    for mask in range(1 << n):
        s = mask.bit_count()
        total += factorial(s) * factorial(n - s) / factorial(n + 1) * table[mask]
    return total


def shapley_payoffs_by_enumeration(
    instance: AuctionInstance, with_auctioneer: bool = False
) -> PaymentVector:
    """Average marginal contribution over every arrival order.

    Independent cross-check for the subset-weighted computation; factorial in
    the bidder count, so capped at 6 bidders.
    """
    n = instance.n
    if n > PERMUTATION_ORACLE_MAX_BIDDERS:
        raise SizeLimitError(
            f"permutation oracle supports at most {PERMUTATION_ORACLE_MAX_BIDDERS} bidders"
        )
    table = coalition_value_table(instance)
    totals = [0.0] * n
    if not with_auctioneer:
        for order in permutations(range(n)):
            mask = 0
            for i in order:
                totals[i] += table[mask | (1 << i)] - table[mask]
                mask |= 1 << i
        count = factorial(n)
    else:
        auctioneer = n
        for order in permutations(range(n + 1)):
            mask = 0
            arrived = False
            for i in order:
                if i == auctioneer:
                    arrived = True
                    continue
                if arrived:
                    totals[i] += table[mask | (1 << i)] - table[mask]
                mask |= 1 << i
        count = factorial(n + 1)
    return PaymentVector(tuple(total / count for total in totals), kind="payoff")


def auctioneer_payoff_by_enumeration(instance: AuctionInstance) -> float:
    """Arrival-order average of the auctioneer's marginal contribution (at most 6 bidders)."""
    n = instance.n
    if n > PERMUTATION_ORACLE_MAX_BIDDERS:
        raise SizeLimitError(
            f"permutation oracle supports at most {PERMUTATION_ORACLE_MAX_BIDDERS} bidders"
        )
    table = coalition_value_table(instance)
    total = 0.0
    for order in permutations(range(n + 1)):
        mask = 0
        for i in order:
            if i == n:
                total += table[mask]
                break
            mask |= 1 << i
    return total / factorial(n + 1)


def reference_point(instance: AuctionInstance, rule: ReferenceRule) -> PaymentVector:
    """Evaluate one of the six reference rules on an instance."""
    if rule is ReferenceRule.FIRST_PRICE:
        return first_price(instance)
    if rule is ReferenceRule.VCG:
        return vcg(instance)
    if rule.is_payoff:
        return shapley_payoffs(instance, rule.with_auctioneer)
    return shapley_payments(instance, rule.with_auctioneer)

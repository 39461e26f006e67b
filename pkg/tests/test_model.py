import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coreselect import (
    AuctionInstance,
    Bid,
    Bidder,
    InvalidCoalitionError,
    LlgBidProfile,
    SizeLimitError,
    coalition_value_table,
    coalitional_value,
    instance_from_json,
    instance_to_json,
    llg_instance,
    realized_welfare,
    winner_determination,
)
from helpers import instances

G1 = frozenset({"g1"})
G2 = frozenset({"g2"})
BOTH = frozenset({"g1", "g2"})


class TestWinnerDetermination:
    def test_locals_win(self):
        allocation = winner_determination(llg_instance(0.4, 0.5, 0.8))
        assert allocation.assignment == {1: G1, 2: G2, 3: frozenset()}
        assert allocation.welfare == pytest.approx(0.9, abs=1e-12)

    def test_global_wins(self):
        allocation = winner_determination(llg_instance(0.2, 0.3, 0.9))
        assert allocation.assignment == {1: frozenset(), 2: frozenset(), 3: BOTH}
        assert allocation.welfare == pytest.approx(0.9, abs=1e-12)

    def test_zero_bids_award_nothing(self):
        allocation = winner_determination(llg_instance(0.0, 0.0, 0.0))
        assert allocation.assignment == {1: frozenset(), 2: frozenset(), 3: frozenset()}
        assert allocation.welfare == 0.0

    def test_exact_tie_goes_to_locals(self):
        allocation = winner_determination(llg_instance(0.4, 0.4, 0.8))
        assert allocation.winners() == (1, 2)

    def test_zero_valued_local_stays_out(self):
        allocation = winner_determination(llg_instance(0.0, 0.5, 0.3))
        assert allocation.assignment == {1: frozenset(), 2: G2, 3: frozenset()}
        assert allocation.welfare == pytest.approx(0.5)

    def test_identical_single_good_bids_tiebreak_to_lower_id(self):
        instance = AuctionInstance(
            ("g1",),
            (Bidder(1, (Bid(G1, 0.5),)), Bidder(2, (Bid(G1, 0.5),))),
        )
        allocation = winner_determination(instance)
        assert allocation.assignment == {1: G1, 2: frozenset()}

    def test_duplicate_bundle_bids_keep_best_value(self):
        instance = AuctionInstance(
            ("g1",),
            (Bidder(1, (Bid(G1, 0.3), Bid(G1, 0.7))),),
        )
        allocation = winner_determination(instance)
        assert allocation.welfare == pytest.approx(0.7)
        assert instance.bid_value(1, G1) == 0.7

    def test_determinism(self):
        instance = llg_instance(0.7, 0.7, 1.4)
        assert winner_determination(instance) == winner_determination(instance)


class TestCoalitionalValue:
    def test_local_and_global(self):
        instance = llg_instance(0.4, 0.5, 0.8)
        assert coalitional_value(instance, {1, 3}) == pytest.approx(0.8)
        assert coalitional_value(instance, {1, 2}) == pytest.approx(0.9)

    def test_empty_coalition(self):
        assert coalitional_value(llg_instance(0.4, 0.5, 0.8), set()) == 0.0

    def test_unknown_bidder(self):
        with pytest.raises(InvalidCoalitionError):
            coalitional_value(llg_instance(0.4, 0.5, 0.8), {1, 9})

    def test_table_matches_direct_computation(self):
        instance = llg_instance(0.6, 0.7, 1.0)
        table = coalition_value_table(instance)
        ids = instance.bidder_ids()
        for mask in range(1 << instance.n):
            coalition = {ids[i] for i in range(instance.n) if mask >> i & 1}
            assert table[mask] == pytest.approx(coalitional_value(instance, coalition), abs=1e-12)


class TestRealizedWelfare:
    def test_on_locals_win(self):
        instance = llg_instance(0.4, 0.5, 0.8)
        allocation = winner_determination(instance)
        assert realized_welfare(instance, {2, 3}, allocation) == pytest.approx(0.5)

    def test_on_global_win(self):
        instance = llg_instance(0.2, 0.3, 0.9)
        allocation = winner_determination(instance)
        assert realized_welfare(instance, {1, 2}, allocation) == 0.0

    def test_full_coalition_equals_welfare(self):
        instance = llg_instance(1.1, 0.2, 0.9)
        allocation = winner_determination(instance)
        assert realized_welfare(instance, {1, 2, 3}, allocation) == pytest.approx(
            allocation.welfare
        )


class TestValidation:
    def test_too_many_goods(self):
        goods = tuple(f"g{i}" for i in range(9))
        with pytest.raises(SizeLimitError):
            AuctionInstance(goods, ())

    def test_too_many_bidders(self):
        bidders = tuple(Bidder(i, ()) for i in range(1, 14))
        with pytest.raises(SizeLimitError):
            AuctionInstance(("g1",), bidders)

    def test_non_dense_ids(self):
        with pytest.raises(ValueError):
            AuctionInstance(("g1",), (Bidder(2, ()),))

    def test_undeclared_good(self):
        with pytest.raises(ValueError):
            AuctionInstance(("g1",), (Bidder(1, (Bid(frozenset({"gX"}), 1.0),)),))

    def test_negative_value(self):
        with pytest.raises(ValueError):
            AuctionInstance(("g1",), (Bidder(1, (Bid(G1, -0.1),)),))

    def test_negative_llg_bid(self):
        with pytest.raises(ValueError):
            LlgBidProfile(-0.1, 0.5, 1.0)


class TestJson:
    def test_round_trip(self):
        instance = llg_instance(0.4, 0.5, 0.8)
        assert instance_from_json(instance_to_json(instance)) == instance

    def test_documented_shape(self):
        text = json.dumps(
            {
                "goods": ["g1", "g2"],
                "bidders": [
                    {"id": 1, "bids": [{"bundle": ["g1"], "value": 0.4}]},
                    {"id": 2, "bids": [{"bundle": ["g2"], "value": 0.5}]},
                    {"id": 3, "bids": [{"bundle": ["g1", "g2"], "value": 0.8}]},
                ],
            }
        )
        assert instance_from_json(text) == llg_instance(0.4, 0.5, 0.8)

    def test_malformed_object(self):
        with pytest.raises(ValueError):
            instance_from_json('{"goods": ["g1"]}')


@settings(max_examples=60, deadline=None)
@given(instance=instances(), data=st.data())
def test_coalitional_value_monotone(instance, data):
    ids = list(instance.bidder_ids())
    small = data.draw(st.sets(st.sampled_from(ids)) if ids else st.just(set()))
    extra = data.draw(st.sets(st.sampled_from(ids)) if ids else st.just(set()))
    large = small | extra
    assert coalitional_value(instance, small) <= coalitional_value(instance, large) + 1e-12


@settings(max_examples=60, deadline=None)
@given(instance=instances(), data=st.data())
def test_realized_welfare_at_most_coalitional_value(instance, data):
    ids = list(instance.bidder_ids())
    coalition = data.draw(st.sets(st.sampled_from(ids)) if ids else st.just(set()))
    allocation = winner_determination(instance)
    assert realized_welfare(instance, coalition, allocation) <= coalitional_value(
        instance, coalition
    ) + 1e-12


@settings(max_examples=60, deadline=None)
@given(instance=instances())
def test_welfare_equals_grand_coalition_value(instance):
    allocation = winner_determination(instance)
    assert allocation.welfare == pytest.approx(
        coalitional_value(instance, instance.bidder_ids()), abs=1e-12
    )


@settings(max_examples=60, deadline=None)
@given(instance=instances())
def test_allocation_feasible_and_welfare_consistent(instance):
    allocation = winner_determination(instance)
    used: set[str] = set()
    total = 0.0
    for bidder_id, bundle in allocation.assignment.items():
        assert not (used & bundle)
        used |= bundle
        total += instance.bid_value(bidder_id, bundle)
    assert allocation.welfare == pytest.approx(total, abs=1e-12)

"""Shared strategies and generators for the test suite."""

from __future__ import annotations

import random

from hypothesis import strategies as st

from coreselect import AuctionInstance, Bid, Bidder, LlgBidProfile


def bounded_floats(low: float = 0.0, high: float = 2.0):
    return st.floats(low, high, allow_nan=False, allow_infinity=False)


@st.composite
def llg_profiles(draw, g_low: float = 0.1, g_high: float = 2.0) -> LlgBidProfile:
    g = draw(bounded_floats(g_low, g_high))
    a = draw(bounded_floats(0.0, 2 * g))
    b = draw(bounded_floats(0.0, 2 * g))
    return LlgBidProfile(a, b, g)


@st.composite
def instances(draw, max_bidders: int = 4, max_goods: int = 3) -> AuctionInstance:
    m = draw(st.integers(1, max_goods))
    goods = tuple(f"g{k}" for k in range(1, m + 1))
    n = draw(st.integers(1, max_bidders))
    bidders = []
    for i in range(1, n + 1):
        bundles = draw(
            st.lists(
                st.frozensets(st.sampled_from(goods), min_size=1),
                max_size=3,
                unique=True,
            )
        )
        bids = tuple(Bid(bundle, draw(bounded_floats(0.0, 5.0))) for bundle in bundles)
        bidders.append(Bidder(i, bids))
    return AuctionInstance(goods, tuple(bidders))


def random_xor_instance(rng: random.Random, max_bidders: int = 5, max_goods: int = 4) -> AuctionInstance:
    m = rng.randint(1, max_goods)
    goods = tuple(f"g{k}" for k in range(1, m + 1))
    n = rng.randint(1, max_bidders)
    bidders = []
    for i in range(1, n + 1):
        bids = []
        seen = set()
        for _ in range(rng.randint(0, 3)):
            bundle = frozenset(good for good in goods if rng.random() < 0.5)
            if not bundle or bundle in seen:
                continue
            seen.add(bundle)
            bids.append(Bid(bundle, rng.uniform(0.0, 1.0)))
        bidders.append(Bidder(i, tuple(bids)))
    return AuctionInstance(goods, tuple(bidders))

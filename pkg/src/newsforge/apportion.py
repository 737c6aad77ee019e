"""Largest-remainder (Hamilton) apportionment of an integer total over weighted keys."""
from __future__ import annotations

from math import floor
from typing import Mapping, TypeVar

K = TypeVar("K")


def largest_remainder(weights: Mapping[K, float], total: int) -> dict[K, int]:
    """Split ``total`` integer units over ``weights`` proportionally.

    Every key receives floor(total * weight / sum(weights)); the leftover units
    go one each to the keys with the largest fractional remainders. Remainder
    ties are broken by ascending key so the allocation is deterministic.

    Zero-weight keys receive 0. Raises ValueError on negative weights or a
    negative total; an all-zero weighting only supports total == 0.
    """
    if total < 0:
        raise ValueError(f"total must be non-negative, got {total}")
    if any(w < 0 for w in weights.values()):
        raise ValueError("weights must be non-negative")
    weight_sum = sum(weights.values())
    if weight_sum == 0:
        if total == 0:
            return {k: 0 for k in weights}
        raise ValueError("cannot apportion a positive total over all-zero weights")

    shares = {k: total * w / weight_sum for k, w in weights.items()}
    result = {k: floor(s) for k, s in shares.items()}
    leftover = total - sum(result.values())
    by_remainder = sorted(weights, key=lambda k: (-(shares[k] - result[k]), k))
    for k in by_remainder[:leftover]:
        result[k] += 1
    return result


def largest_remainder_capped(
    weights: Mapping[K, float], total: int, caps: Mapping[K, int]
) -> dict[K, int]:
    """Largest-remainder apportionment where key k may receive at most caps[k].

    Overflow beyond a cap is re-apportioned over the keys that still have
    headroom, repeating until the total is placed. Raises ValueError when the
    caps cannot absorb ``total``.
    """
    if sum(caps.get(k, 0) for k in weights) < total:
        raise ValueError("caps sum to less than the requested total")
    result: dict[K, int] = {k: 0 for k in weights}
    remaining = total
    while remaining > 0:
        open_keys = [k for k in weights if result[k] < caps.get(k, 0)]
        positive = {k: weights[k] for k in open_keys if weights[k] > 0}
        # Positive-weight keys may all be full; fall back to uniform weights.
        share = largest_remainder(positive or {k: 1.0 for k in open_keys}, remaining)
        for k, extra in share.items():
            take = min(extra, caps.get(k, 0) - result[k])
            result[k] += take
            remaining -= take
    return result

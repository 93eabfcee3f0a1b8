"""Distribution divergences used for training and scoring.

``cost`` is the L1 training objective (twice the total-variation distance);
``chi_squared`` is the reporting metric. Mass landing on bins where the ground
truth is zero cannot enter chi-squared and is reported separately as leakage.
"""
from __future__ import annotations

from .simulator import Distribution


def _check_widths(p_dist: Distribution, gt: Distribution):
    if p_dist.n_bits != gt.n_bits:
        raise ValueError(f"bit-width mismatch: {p_dist.n_bits} vs {gt.n_bits}")


def cost(p_dist: Distribution, gt: Distribution) -> float:
    """Sum of |P - P_gt| over all basis bins."""
    _check_widths(p_dist, gt)
    keys = set(p_dist.probs) | set(gt.probs)
    return sum(abs(p_dist.prob(k) - gt.prob(k)) for k in keys)


def chi_squared(p_dist: Distribution, gt: Distribution) -> float:
    """Sum of (P - P_gt)^2 / P_gt over bins where P_gt > 0."""
    _check_widths(p_dist, gt)
    total = 0.0
    for key, pg in gt.probs.items():
        if pg > 0.0:
            total += (p_dist.prob(key) - pg) ** 2 / pg
    return total


def leakage(p_dist: Distribution, gt: Distribution) -> float:
    """Probability mass of p_dist on bins where the ground truth is zero."""
    _check_widths(p_dist, gt)
    return float(sum(p for key, p in p_dist.probs.items() if gt.prob(key) == 0.0))

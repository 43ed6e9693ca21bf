"""Shaped reward: distance guidance plus crash-depth penalty.

reward = (1 - beta) * exp(-gui_scale * D^2) + beta * (exp(-obp_scale * sigma) - 1)
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass
class RewardParams:
    beta: float = 0.5
    gui_scale: float = 5.0
    obp_scale: float = 100.0

    def __post_init__(self):
        if self.gui_scale <= 0.0 or self.obp_scale <= 0.0:
            raise ValueError("gui_scale and obp_scale must be positive")


def guidance(dist, params: RewardParams):
    """Target guidance term, 1 at the target decaying with squared distance."""
    return math.exp(-params.gui_scale * dist * dist)


def obstacle_penalty(sigma, params: RewardParams):
    """Crash penalty in (-1, 0]; 0 when the move never entered an obstacle."""
    return math.exp(-params.obp_scale * sigma) - 1.0


def reward(dist, sigma, params: RewardParams):
    return ((1.0 - params.beta) * guidance(dist, params)
            + params.beta * obstacle_penalty(sigma, params))

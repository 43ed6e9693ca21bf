"""3D navigation world: kinematics, collision resolution, target dynamics.

The arena is the unit cube.  One action is a spherical step (rho, phi, psi):
rho is the radial distance, phi the polar angle from +Z, psi the azimuth.
Note: phi = 0 moves straight up, phi = pi straight down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .errors import EpisodeDoneError, UnsatisfiableWorldError
from .geometry import Obstacle

TARGET_STATIC = "static"
TARGET_MOVING = "moving"

OUTCOME_IN_PROGRESS = "in_progress"
OUTCOME_REACHED = "reached"
OUTCOME_TIMED_OUT = "timed_out"

# Retreat distance (world units) from an obstacle face after a blocked move.
COLLISION_MARGIN = 1e-4

_MAX_REJECTION_ATTEMPTS = 10_000


@dataclass
class WorldSpec:
    """Immutable description of an episode world."""

    obstacles: list = field(default_factory=list)
    target_mode: str = TARGET_STATIC
    target_speed: float = 0.0
    rho_min: float = 0.0
    rho_max: float = 0.2
    reach_radius: float = 0.05
    max_steps: int = 100
    terminal_on_crash: bool = False

    def __post_init__(self):
        if self.target_mode not in (TARGET_STATIC, TARGET_MOVING):
            raise ValueError(f"unknown target_mode {self.target_mode!r}")
        if not (0.0 <= self.rho_min <= self.rho_max <= 1.0):
            raise ValueError("need 0 <= rho_min <= rho_max <= 1")
        if self.reach_radius <= 0.0:
            raise ValueError("reach_radius must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if self.target_speed < 0.0:
            raise ValueError("target_speed must be >= 0")

    @property
    def action_low(self):
        return np.array([self.rho_min, 0.0, 0.0])

    @property
    def action_high(self):
        return np.array([self.rho_max, math.pi, 2.0 * math.pi])


@dataclass
class EpisodeState:
    """Mutable per-episode state (single writer)."""

    uav: np.ndarray
    target: np.ndarray
    step_index: int = 0
    last_sigma: float = 0.0
    done: bool = False
    outcome: str = OUTCOME_IN_PROGRESS
    # moving-target bookkeeping: current waypoint and the trajectory rng
    waypoint: np.ndarray | None = None
    traj_rng: np.random.Generator | None = None


def distance(u, d):
    """Euclidean distance between two 3D points."""
    return float(np.linalg.norm(np.asarray(u, dtype=float) - np.asarray(d, dtype=float)))


def displacement(action):
    """Cartesian displacement of one spherical step (rho, phi, psi)."""
    rho, phi, psi = action
    sin_phi = math.sin(phi)
    return np.array([rho * sin_phi * math.cos(psi),
                     rho * sin_phi * math.sin(psi),
                     rho * math.cos(phi)])


def sample_free_point(rng, obstacles):
    """Uniform point in the unit cube, rejection-sampled out of the obstacles."""
    for _ in range(_MAX_REJECTION_ATTEMPTS):
        p = rng.uniform(0.0, 1.0, size=3)
        if not geometry.point_in_any_obstacle(p, obstacles):
            return p
    raise UnsatisfiableWorldError(
        f"no free point found in {_MAX_REJECTION_ATTEMPTS} attempts")


def reset(spec: WorldSpec, seed: int) -> EpisodeState:
    """Start a fresh episode; deterministic in (spec, seed)."""
    ss = np.random.SeedSequence(seed)
    pos_seed, traj_seed = ss.spawn(2)
    rng = np.random.default_rng(pos_seed)
    uav = sample_free_point(rng, spec.obstacles)
    target = sample_free_point(rng, spec.obstacles)
    state = EpisodeState(uav=uav, target=target)
    if spec.target_mode == TARGET_MOVING:
        state.traj_rng = np.random.default_rng(traj_seed)
        state.waypoint = sample_free_point(state.traj_rng, spec.obstacles)
    return state


def move_target(target, state: EpisodeState, spec: WorldSpec):
    """Advance a moving target one step along its random-waypoint trajectory."""
    if spec.target_speed == 0.0:
        return target
    to_wp = state.waypoint - target
    dist_wp = float(np.linalg.norm(to_wp))
    if dist_wp <= spec.target_speed:
        # arrive and pick the next waypoint
        new = state.waypoint.copy()
        state.waypoint = sample_free_point(state.traj_rng, spec.obstacles)
        return new
    new = target + to_wp * (spec.target_speed / dist_wp)
    if geometry.point_in_any_obstacle(new, spec.obstacles):
        # path between free waypoints clipped an obstacle: reroute instead
        state.waypoint = sample_free_point(state.traj_rng, spec.obstacles)
        return target
    return new


def observe(state: EpisodeState):
    """State vector fed to the agent: [uav xyz, target xyz]."""
    return np.concatenate([state.uav, state.target])


def step(state: EpisodeState, action, spec: WorldSpec):
    """Apply one action in place.  Returns (state, sigma, reached).

    The intended endpoint is clamped to the unit cube; if the clamped
    segment enters an obstacle the UAV stops just outside the first face
    hit.  Collisions are penalized via sigma but (by default) do not end
    the episode.
    """
    if state.done:
        raise EpisodeDoneError("step() called on a finished episode")

    start = state.uav
    intended = np.clip(start + displacement(action), 0.0, 1.0)
    sigma = geometry.crash_depth(start, intended, spec.obstacles)
    if sigma > 0.0:
        t_hit = geometry.first_entry(start, intended, spec.obstacles)
        seg_len = float(np.linalg.norm(intended - start))
        t_stop = max(0.0, t_hit - COLLISION_MARGIN / seg_len)
        state.uav = start + t_stop * (intended - start)
    else:
        state.uav = intended

    if spec.target_mode == TARGET_MOVING:
        state.target = move_target(state.target, state, spec)

    state.step_index += 1
    state.last_sigma = sigma
    reached = distance(state.uav, state.target) <= spec.reach_radius
    crashed_out = spec.terminal_on_crash and sigma > 0.0
    if reached:
        state.done = True
        state.outcome = OUTCOME_REACHED
    elif crashed_out or state.step_index >= spec.max_steps:
        state.done = True
        state.outcome = OUTCOME_TIMED_OUT
    return state, sigma, reached

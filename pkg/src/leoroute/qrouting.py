"""Distributed per-satellite Q-routing.

Every satellite owns a table of state-action values. The state a packet
sees at satellite i is its destination gateway plus a 3-level congestion
code for each of the four neighbour slots: 0 = short queue and high
capacity, 1 = short queue and low capacity, 2 = long queue or no usable
link. Actions are the four ISL directions plus delivery to the local
gateway; delivery is forced whenever the satellite currently serves the
packet's destination, so the table effectively learns over the ISL
slots.

After a neighbour receives a packet it sends exactly one feedback value
(its own masked max Q for the packet's destination, plus its measured
queue delay) back over the reverse link; the sender folds that into the
one-step value update. Exploration is epsilon-greedy with a per-agent
exponential decay.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Protocol, Sequence

from .links import LinkState

NUM_CODES = 3
NUM_ACTIONS = 5            # 4 ISL slots + deliver
DELIVER = 4
CODE_BASE = NUM_CODES ** 4  # states per destination


@dataclass(frozen=True)
class QLearningParams:
    learning_rate: float = 0.1
    discount: float = 0.9
    eps_initial: float = 1.0
    eps_min: float = 0.01
    eps_decay_steps: float = 500.0     # per-agent decisions to shrink by 1/e
    w_queue: float = 1.0               # weight on the queue-time penalty
    w_distance: float = 1.0            # weight on the progress term
    r_delivery: float = 10.0
    r_loop: float = -10.0
    queue_code_threshold: int = 25     # neighbour occupancy (packets) coded "long"
    capacity_split_bps: float | None = None  # None: median modcod rate at runtime
    initial_q: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.learning_rate <= 1.0:
            raise ValueError("learning_rate must be in (0, 1]")
        if not 0.0 <= self.discount < 1.0:
            raise ValueError("discount must be in [0, 1)")
        if self.queue_code_threshold <= 0:
            raise ValueError("queue_code_threshold must be positive")
        if self.capacity_split_bps is not None and self.capacity_split_bps <= 0:
            raise ValueError("capacity_split_bps must be positive")


@dataclass(frozen=True)
class AgentState:
    """Observed state at one satellite for one packet."""

    destination: int
    codes: tuple[int, int, int, int]

    def key(self) -> int:
        c = self.codes
        return (((self.destination * NUM_CODES + c[0]) * NUM_CODES + c[1])
                * NUM_CODES + c[2]) * NUM_CODES + c[3]

    @staticmethod
    def from_key(key: int) -> "AgentState":
        codes = []
        for _ in range(4):
            codes.append(key % NUM_CODES)
            key //= NUM_CODES
        return AgentState(key, tuple(reversed(codes)))


class FeedbackMessage(NamedTuple):
    """Single per-packet feedback from the receiving satellite."""

    from_sat: int
    to_sat: int
    max_q: float
    queue_delay_s: float


@dataclass
class QTable:
    """State-action values of one satellite agent.

    Entries are created on first touch at ``initial_q``; ``values`` maps
    a packed state key to a list of one value per action.
    """

    owner: int
    initial_q: float = 0.0
    values: dict[int, list[float]] = field(default_factory=dict)

    def action_values(self, key: int) -> list[float]:
        vals = self.values.get(key)
        if vals is None:
            vals = [self.initial_q] * NUM_ACTIONS
            self.values[key] = vals
        return vals

    def max_over(self, key: int, slots: Sequence[int]) -> float:
        vals = self.values.get(key)
        if vals is None or not slots:
            return self.initial_q if slots else 0.0
        return max(vals[s] for s in slots)


def encode_codes(i: int, links: LinkState, occupancy: Sequence[int],
                 queue_threshold: int, capacity_split_bps: float) -> tuple[int, int, int, int]:
    """Per-slot congestion codes for satellite i's four neighbour slots."""
    nbr = links.neighbors[i]
    rate = links.nbr_rate[i]
    codes = []
    for s in range(4):
        j = nbr[s]
        if j < 0 or occupancy[j] >= queue_threshold:
            codes.append(2)
        elif rate[s] >= capacity_split_bps:
            codes.append(0)
        else:
            codes.append(1)
    return tuple(codes)


def encode_state(i: int, destination: int, links: LinkState,
                 occupancy: Sequence[int], params: QLearningParams,
                 capacity_split_bps: float | None = None) -> AgentState:
    split = capacity_split_bps
    if split is None:
        split = params.capacity_split_bps
    if split is None:
        raise ValueError("capacity split threshold not resolved")
    return AgentState(destination,
                      encode_codes(i, links, occupancy, params.queue_code_threshold, split))


class UniformSource(Protocol):
    def random(self) -> float: ...


def select_action(values: Sequence[float], feasible: Sequence[int], eps: float,
                  rng: UniformSource) -> int:
    """Epsilon-greedy over the feasible action slots.

    Exploits by argmax with ties broken in fixed slot order; infeasible
    slots are never selected regardless of their values.
    """
    if not feasible:
        raise ValueError("no feasible action")
    if eps > 0.0 and rng.random() < eps:
        return feasible[int(rng.random() * len(feasible)) % len(feasible)]
    best = feasible[0]
    best_v = values[best]
    for s in feasible[1:]:
        v = values[s]
        if v > best_v:
            best, best_v = s, v
    return best


def compute_reward(*, delivered: bool, looped: bool, queue_delay_s: float,
                   progress_km: float, source_dest_km: float,
                   params: QLearningParams) -> float:
    """Immediate reward for forwarding one packet to one neighbour.

    Exactly one case applies, checked in the order delivery > loop >
    shaped. The shaped reward penalises the next hop's queue time
    (exponentially, in seconds) and pays for slant-range progress toward
    the destination, normalised by the source-destination range.
    """
    if delivered:
        return params.r_delivery
    if looped:
        return params.r_loop
    r_queue = params.w_queue * (1.0 - 10.0 ** queue_delay_s)
    r_dist = params.w_distance * (progress_km + source_dest_km) / source_dest_km
    return r_queue + r_dist


def update_q(value: float, reward: float, feedback_max: float,
             alpha: float, gamma: float) -> float:
    """One-step value update folding in the neighbour's own best value."""
    return (1.0 - alpha) * value + alpha * (reward + gamma * feedback_max)


def decay_epsilon(step: int, params: QLearningParams) -> float:
    """Exploration rate after a given number of per-agent decisions."""
    if step < 0:
        raise ValueError("step must be >= 0")
    return max(params.eps_min,
               params.eps_initial * math.exp(-step / params.eps_decay_steps))

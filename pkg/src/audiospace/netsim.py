"""Deterministic lossy-datagram network between grouped devices.

The network is a discrete-event queue seeded once; identical seeds and
identical send sequences reproduce identical deliveries, byte for byte.
Randomness is consumed in a fixed order per destination (loss first,
then latency, then duplication, then the duplicate's latency; nothing
is drawn for a lost copy), and destinations are visited in ascending
device id, so results never depend on dict iteration order.

Reordering is not simulated directly; it emerges whenever jitter lets a
later datagram overtake an earlier one.  Ties on delivery time keep
submission order.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass

DEFAULT_BEACON_PERIOD_MS = 1000


class NetworkConfigError(ValueError):
    pass


@dataclass(frozen=True)
class NetworkModel:
    """Network behavior knobs; the default is a perfect instant network."""

    seed: int = 0
    latency_ms: tuple[int, int] = (0, 0)
    loss_prob: float = 0.0
    dup_prob: float = 0.0
    beacon_period_ms: int = DEFAULT_BEACON_PERIOD_MS

    def __post_init__(self):
        lo, hi = self.latency_ms
        if lo < 0 or hi < lo:
            raise NetworkConfigError(f"latency range [{lo}, {hi}] is not sane")
        if not 0.0 <= self.loss_prob <= 1.0:
            raise NetworkConfigError(f"loss_prob {self.loss_prob} outside [0, 1]")
        if not 0.0 <= self.dup_prob <= 1.0:
            raise NetworkConfigError(f"dup_prob {self.dup_prob} outside [0, 1]")
        if self.beacon_period_ms <= 0:
            raise NetworkConfigError("beacon_period_ms must be positive")

    @property
    def is_identity(self) -> bool:
        """True when nothing is lost, duplicated, or delayed."""
        return self.loss_prob == 0.0 and self.dup_prob == 0.0 and self.latency_ms == (0, 0)


@dataclass
class NetworkStats:
    sends: int = 0
    copies_offered: int = 0  # one per (datagram, destination) pair
    copies_dropped: int = 0
    copies_duplicated: int = 0
    delivered: int = 0


@dataclass(frozen=True)
class Delivery:
    deliver_at_ms: int
    dest_id: int
    datagram: bytes


class Network:
    """In-flight datagram queue for one simulation run."""

    def __init__(self, model: NetworkModel, group_of: dict[int, int]):
        self.model = model
        self.group_of = dict(group_of)
        self._rng = random.Random(model.seed)
        self._heap: list[tuple[int, int, int, bytes]] = []
        self._tie = 0
        self.stats = NetworkStats()
        members: dict[int, list[int]] = {}
        for device_id in sorted(self.group_of):
            members.setdefault(self.group_of[device_id], []).append(device_id)
        self._members = members

    def _schedule(self, now_ms: int, dest_id: int, datagram: bytes) -> None:
        latency = self._rng.randint(*self.model.latency_ms)
        heapq.heappush(self._heap, (now_ms + latency, self._tie, dest_id, datagram))
        self._tie += 1

    def send(self, sender_id: int, datagram: bytes, now_ms: int) -> None:
        """Broadcast a datagram to every other member of the sender's group."""
        self.stats.sends += 1
        group = self.group_of.get(sender_id)
        if group is None:
            return
        for dest_id in self._members[group]:
            if dest_id == sender_id:
                continue
            self.stats.copies_offered += 1
            if self._rng.random() < self.model.loss_prob:
                self.stats.copies_dropped += 1
                continue
            self._schedule(now_ms, dest_id, datagram)
            if self._rng.random() < self.model.dup_prob:
                self.stats.copies_duplicated += 1
                self._schedule(now_ms, dest_id, datagram)

    def peek(self) -> int | None:
        """Delivery time of the earliest in-flight datagram, if any."""
        return self._heap[0][0] if self._heap else None

    def advance(self, to_ms: int) -> list[Delivery]:
        """Pop every delivery due at or before to_ms, in delivery order."""
        out: list[Delivery] = []
        while self._heap and self._heap[0][0] <= to_ms:
            deliver_at, _, dest_id, datagram = heapq.heappop(self._heap)
            out.append(Delivery(deliver_at, dest_id, datagram))
            self.stats.delivered += 1
        return out

    @property
    def pending(self) -> int:
        return len(self._heap)

"""Paired-guidebook shared-audio protocol engine.

Devices in a group implicitly share whatever they play; companions
overhear each other at a listener-chosen volume, one clip at a time,
kept in sync by a tiny datagram protocol that survives loss through
periodic beacons.  This package models the devices, the protocol, and
the network, and ships an independent reference renderer so the whole
thing can be checked end to end.
"""

from .catalog import Catalog, hit_test, load_catalog, resolve_clip
from .device import DeviceState, VolumeLevel, render_at
from .engine import RunResult, run_simulation
from .fuzz import fuzz_decode, generate_scenario, run_fuzz
from .logdiff import diff_logs
from .metrics import compute_metrics
from .netsim import Network, NetworkModel
from .oracle import run_oracle
from .renderlog import RenderLog, log_from_jsonl
from .scenario import Scenario, load_scenario

__version__ = "0.1.0"

__all__ = [
    "Catalog",
    "DeviceState",
    "Network",
    "NetworkModel",
    "RenderLog",
    "RunResult",
    "Scenario",
    "VolumeLevel",
    "compute_metrics",
    "diff_logs",
    "fuzz_decode",
    "generate_scenario",
    "hit_test",
    "load_catalog",
    "load_scenario",
    "log_from_jsonl",
    "render_at",
    "resolve_clip",
    "run_fuzz",
    "run_oracle",
    "run_simulation",
    "__version__",
]

"""Discrete-event VANET routing simulator: AODV, DSR and GPSR over a unit-disk channel."""

from .config import PRESETS, ScenarioConfig, load_config, preset
from .engine import Simulator
from .experiments import SweepSpec, run_one, run_sweep
from .metrics import MetricsReport, PacketLedger, compute_report
from .network import Network

__version__ = "0.1.0"

__all__ = ["PRESETS", "ScenarioConfig", "load_config", "preset", "Simulator", "SweepSpec",
           "run_one", "run_sweep", "MetricsReport", "PacketLedger", "compute_report", "Network"]

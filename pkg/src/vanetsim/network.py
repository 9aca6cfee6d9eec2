"""Wires engine, mobility, channel, routing agent and traffic into one run."""

from __future__ import annotations

from typing import TextIO

from .aodv import Aodv, AodvConfig
from .channel import Channel, ChannelParams
from .config import ScenarioConfig
from .dsr import Dsr, DsrConfig
from .engine import Simulator
from .gpsr import Gpsr, GpsrConfig
from .metrics import MetricsReport, PacketLedger, compute_report
from .mobility import MobilityModel, MobilityParams
from .packets import Packet
from .traffic import CbrFlow, CbrTraffic, build_flows


class Network:
    """One simulation instance.

    ``positions`` pins nodes to a static layout (mobility disabled);
    ``flows=[]`` builds an idle network for hand-driven tests.
    """

    def __init__(self, cfg: ScenarioConfig, positions=None, flows: list[CbrFlow] | None = None,
                 protocol_config=None, trace: TextIO | None = None, log_events: bool = False):
        self.cfg = cfg
        self.sim = sim = Simulator(cfg.seed, log_events=log_events)
        params = MobilityParams((cfg.area_width, cfg.area_height), cfg.pause,
                                cfg.speed_min, cfg.speed_max)
        self.mobility = MobilityModel(cfg.nodes, params, sim.stream("mobility"), sim,
                                      start_positions=positions)
        if positions is not None:
            self.mobility.set_static(positions)
        self.ledger = PacketLedger()
        self.channel = Channel(sim, self.mobility, ChannelParams(cfg.range, cfg.bitrate, cfg.jitter),
                               cfg.queue_length, self.ledger, sim.stream("jitter"), trace)
        self.agent = make_agent(cfg, sim, self.channel, self.ledger, protocol_config)
        if flows is None:
            flows = build_flows(cfg.connections, cfg.nodes, sim.stream("traffic"), cfg.cbr_rate,
                                cfg.packet_size, (0.0, min(10.0, cfg.sim_time)),
                                cfg.sim_time)
        self.flows = flows
        self.traffic = CbrTraffic(sim, flows, self.ledger, self.agent.originate)

    def inject(self, src: int, dst: int, t: float | None = None, size: int | None = None,
               flow_id: int = -1) -> int:
        """Originate a single data packet at ``t`` (default: now); returns its id."""
        size = self.cfg.packet_size if size is None else size
        t = self.sim.now if t is None else t
        rec = self.ledger.register(flow_id, src, dst, size, t)

        def _go():
            self.agent.originate(src, Packet(rec.pkt_id, flow_id, src, dst, size, t))

        self.sim.schedule(t, _go)
        return rec.pkt_id

    def run(self, until: float | None = None) -> MetricsReport:
        self.sim.run_until(self.cfg.sim_time if until is None else until)
        self.ledger.check_conservation()
        return self.report()

    def report(self) -> MetricsReport:
        return compute_report(self.ledger, 0.0, self.cfg.sim_time)


def make_agent(cfg: ScenarioConfig, sim, channel, ledger, protocol_config=None):
    if cfg.protocol == "AODV":
        return Aodv(sim, channel, ledger, protocol_config or AodvConfig())
    if cfg.protocol == "DSR":
        return Dsr(sim, channel, ledger, protocol_config or DsrConfig())
    gcfg = protocol_config or GpsrConfig(planarization=cfg.planarization,
                                         reroute_on_failure=cfg.gpsr_reroute)
    return Gpsr(sim, channel, ledger, gcfg)

"""Gateway flood-attack mitigation toolkit.

QDTP traffic shaping, a windowed attack detector model, the adaptive
drop/skip mitigation machine, its closed-form cost model, and a
deterministic simulator tying them together.
"""
from .aam import AamConfig, AamState, MitigationOutcome, aam_step, run_mitigation
from .costmodel import (CostParams, CostReport, brute_force_m, exact_windows, expected_drops,
                        expected_overhead, expected_reprocessing, expected_windows, mstar_curve,
                        optimal_cost, optimal_m, total_cost)
from .detector import DetectorConfig, Verdict, WindowVerdict, classify_packet, window_verdict
from .errors import (ConfigError, InvalidInputError, InvariantError, OrderingError, ParseError,
                     VerificationError)
from .qdtp import QdtpConfig, QdtpState, delay_recursion, forward_one, shape_trace
from .scenario import load_scenario
from .sim import CostWeights, Scenario, SimResult, realized_cost, run_replications, run_scenario, sweep_m
from .traffic import (BenignSourceConfig, Constant, FloodConfig, Geometric, Label, PacketRecord,
                      Uniform, generate_benign, generate_flood, merge_traces)

__version__ = "0.1.0"

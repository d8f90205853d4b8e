"""Exact simulation and convergence checks for pulse-coupled oscillator networks."""
from .engine import (EPS_FIRE, EventRecord, NetworkConfig, NetworkState, StopRule, Trace,
                     apply_event, next_event, run, simulate_fixed_step)
from .exceptions import (AssumptionViolationError, ConfigError, ContractViolationError,
                         InvalidArgumentError, PCOError)
from .phase import (EPS_GEOM, TWO_PI, CircularArc, arc_contains, diameter, shortest_arc,
                    sync_error, wrap)
from .prc import (CertificationReport, OscillatorProfile, PhaseResponseCurve, check_assumption1,
                  eval_prc, eval_ptc, eval_ptc_iter, is_delay_advance)
from .topology import (Topology, in_neighbors, is_rooted, is_strongly_connected,
                       isolated_source_groups, roots)

__version__ = "0.1.0"

__all__ = [
    "EPS_FIRE",
    "EventRecord",
    "NetworkConfig",
    "NetworkState",
    "StopRule",
    "Trace",
    "apply_event",
    "next_event",
    "run",
    "simulate_fixed_step",
    "AssumptionViolationError",
    "ConfigError",
    "ContractViolationError",
    "InvalidArgumentError",
    "PCOError",
    "EPS_GEOM",
    "TWO_PI",
    "CircularArc",
    "arc_contains",
    "diameter",
    "shortest_arc",
    "sync_error",
    "wrap",
    "CertificationReport",
    "OscillatorProfile",
    "PhaseResponseCurve",
    "check_assumption1",
    "eval_prc",
    "eval_ptc",
    "eval_ptc_iter",
    "is_delay_advance",
    "Topology",
    "in_neighbors",
    "is_rooted",
    "is_strongly_connected",
    "isolated_source_groups",
    "roots",
]

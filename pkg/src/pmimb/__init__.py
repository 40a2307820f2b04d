"""Per-phase parameter imbalance models for PM synchronous machines.

The package models a three-phase permanent-magnet synchronous machine
whose per-phase resistances, inductances and magnet flux linkages may
differ, derives the rotor-frame voltage signature of each imbalance
family in closed form, verifies the closed forms against a brute-force
phase-frame simulation, and inverts measured signatures back to
per-phase deviations.
"""

from .errors import (ConfigError, IdentifiabilityError, InputError,
                     SimulationError)
from .harmonics import (HarmonicDecomposition, WaveformComparison,
                        check_angle_coverage, compare_waveforms, demodulate)
from .identify import (IdentificationResult, fit_flux, fit_resistance,
                       invert_phasor)
from .imbalance import (DqVoltageDelta, SecondHarmonicPhasor, compose_total,
                        flux_coeffs, flux_delta, inductance_coeffs,
                        inductance_delta, resistance_coeffs,
                        resistance_delta)
from .machine import (ImbalanceDecomposition, MachineParameters,
                      OperatingPoint, decompose, electrical_time_constant,
                      flux_linkages, ideal_dq_nonsalient, ideal_dq_salient,
                      phase_voltages, synchronous_inductance, torque_abc,
                      transient_window, zero_sequence_voltage)
from .refsim import (SimConfig, TimeSeries, balanced_voltage_command,
                     predict_current_ripple, run_current_fed,
                     run_voltage_fed, steady_state_window)
from .scenario import Scenario, parse_scenario
from .transforms import (BETA, AbcVector, Dq0Vector, park_forward,
                         park_inverse, phase_angles)

__version__ = "0.1.0"

__all__ = [
    "AbcVector",
    "BETA",
    "ConfigError",
    "Dq0Vector",
    "DqVoltageDelta",
    "HarmonicDecomposition",
    "IdentifiabilityError",
    "IdentificationResult",
    "ImbalanceDecomposition",
    "InputError",
    "MachineParameters",
    "OperatingPoint",
    "Scenario",
    "SecondHarmonicPhasor",
    "SimConfig",
    "SimulationError",
    "TimeSeries",
    "WaveformComparison",
    "balanced_voltage_command",
    "check_angle_coverage",
    "compare_waveforms",
    "compose_total",
    "decompose",
    "demodulate",
    "electrical_time_constant",
    "fit_flux",
    "fit_resistance",
    "flux_coeffs",
    "flux_delta",
    "flux_linkages",
    "ideal_dq_nonsalient",
    "ideal_dq_salient",
    "inductance_coeffs",
    "inductance_delta",
    "invert_phasor",
    "park_forward",
    "park_inverse",
    "parse_scenario",
    "phase_angles",
    "phase_voltages",
    "predict_current_ripple",
    "resistance_coeffs",
    "resistance_delta",
    "run_current_fed",
    "run_voltage_fed",
    "steady_state_window",
    "synchronous_inductance",
    "torque_abc",
    "transient_window",
    "zero_sequence_voltage",
]

"""Command-line front end.

    pmimb <subcommand> --scenario <path> [--out <dir>]

Subcommands: ``coeffs`` (closed-form imbalance coefficients), ``simulate``
(reference simulation to CSV), ``compare`` (closed-form model against the
reference simulation), ``identify`` (recover deviations from waveforms).
Exit codes: 0 success, 2 configuration error, 3 runtime error. Every
failure prints a single ``error: ...`` line to stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigError, IdentifiabilityError, InputError, \
    SimulationError
from .harmonics import compare_waveforms
from .identify import fit_flux, fit_resistance
from .imbalance import (compose_total, flux_coeffs, flux_delta,
                        inductance_coeffs, inductance_delta,
                        resistance_coeffs, resistance_delta)
from .machine import OperatingPoint, decompose, ideal_dq_nonsalient
from .refsim import TimeSeries, run_current_fed, run_voltage_fed
from .scenario import Scenario, parse_scenario

_JOBS = ("coeffs", "simulate", "compare", "identify")

# Sections each job reads; others present in the file draw a warning.
_RELEVANT = {
    "coeffs": {"machine", "imbalance", "outputs"},
    "simulate": {"machine", "imbalance", "operating_point", "sim", "outputs"},
    "compare": {"machine", "imbalance", "operating_point", "sim", "outputs"},
    "identify": {"machine", "imbalance", "operating_point", "sim", "outputs",
                 "identify"},
}


def write_csv(ts: TimeSeries, path, channels=None, stride=1):
    """Write a time series as CSV: header ``t,theta,<channels>``.

    Values carry 17 significant digits so a read-back reproduces every
    sample exactly.
    """
    names = ts.names if channels is None else list(channels)
    for name in names:
        if name not in ts.channels:
            raise ConfigError(f"channel {name!r} is not in this time series "
                              f"(available: {', '.join(ts.names)})")
    columns = [ts.t, ts.theta] + [ts.channels[name] for name in names]
    header = ",".join(["t", "theta"] + names)
    sel = slice(None, None, stride)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(header + "\n")
        for row in zip(*(col[sel] for col in columns)):
            handle.write(",".join(f"{v:.17g}" for v in row) + "\n")


def read_csv(path):
    """Read a write_csv file back as {column name: array}."""
    with open(path, encoding="utf-8") as handle:
        header = handle.readline().strip()
        if not header:
            raise InputError(f"{path}: empty file")
        names = header.split(",")
        try:
            data = np.loadtxt(handle, delimiter=",", ndmin=2)
        except ValueError as exc:
            raise InputError(f"{path}: {exc}") from None
    if data.shape[0] == 0 or data.shape[1] != len(names):
        raise InputError(f"{path}: rows do not match header")
    return {name: data[:, idx] for idx, name in enumerate(names)}


def _write_summary(path, entries):
    with open(path, "w", encoding="utf-8", newline="") as handle:
        for key, value in entries:
            handle.write(f"{key}: {value}\n")


def _config_echo(scenario: Scenario):
    return [(f"config.{key}", value) for key, value in scenario.resolved]


def _fmt(value):
    return repr(float(value))


def _coefficient_entries(scenario: Scenario):
    dec = decompose(scenario.machine)
    res = resistance_coeffs(dec.d_r)
    flx = flux_coeffs(dec.d_lam)
    ind_l, ind_m = inductance_coeffs(dec.d_l, dec.d_m)
    entries = [
        ("nominal.r", _fmt(dec.nominal_r)),
        ("nominal.l", _fmt(dec.nominal_l)),
        ("nominal.m", _fmt(dec.nominal_m)),
        ("nominal.lam", _fmt(dec.nominal_lam)),
    ]
    for name, triple in (("d_r", dec.d_r), ("d_l", dec.d_l),
                         ("d_m", dec.d_m), ("d_lam", dec.d_lam)):
        entries.append((f"deviation.{name}",
                        ", ".join(_fmt(v) for v in triple)))
    entries += [
        ("resistance.s", _fmt(sum(dec.d_r))),
        ("resistance.k", _fmt(res.k)),
        ("resistance.phi", _fmt(res.phi)),
        ("flux.s", _fmt(sum(dec.d_lam))),
        ("flux.k", _fmt(flx.k)),
        ("flux.phi", _fmt(flx.phi)),
        ("inductance.s", _fmt(sum(dec.d_l) + sum(dec.d_m))),
        ("inductance.k_l", _fmt(ind_l.k)),
        ("inductance.phi_l", _fmt(ind_l.phi)),
        ("inductance.k_m", _fmt(ind_m.k)),
        ("inductance.phi_m", _fmt(ind_m.phi)),
    ]
    return entries


def _simulate(scenario: Scenario):
    if scenario.sim.mode == "voltage-fed":
        return run_voltage_fed(scenario.machine,
                               (scenario.v_d, scenario.v_q),
                               scenario.omega_e, scenario.sim)
    return run_current_fed(scenario.machine,
                           (scenario.i_d, scenario.i_q),
                           scenario.omega_e, scenario.sim,
                           i_0=scenario.i_0)


def _analytic_dq(scenario: Scenario, theta):
    """Closed-form (v_d, v_q) waveforms at the commanded currents."""
    dec = decompose(scenario.machine)
    op = OperatingPoint(theta=theta, omega_e=scenario.omega_e,
                        i_d=scenario.i_d, i_q=scenario.i_q,
                        i_0=scenario.i_0)
    ideal = ideal_dq_nonsalient(dec.nominal_r,
                                dec.nominal_l + dec.nominal_m,
                                dec.nominal_lam,
                                scenario.machine.pole_pairs, op)
    total = compose_total(
        ideal[:2],
        resistance_delta(dec.d_r, op),
        flux_delta(dec.d_lam, scenario.omega_e, theta),
        inductance_delta(dec.d_l, dec.d_m, op),
    )
    return ideal, total


def _job_coeffs(scenario: Scenario, out_dir: Path):
    summary = out_dir / scenario.summary_name
    _write_summary(summary, [("job", "coeffs")] + _coefficient_entries(scenario)
                   + _config_echo(scenario))
    return [summary]


def _job_simulate(scenario: Scenario, out_dir: Path):
    ts = _simulate(scenario)
    csv_path = out_dir / scenario.csv_name
    write_csv(ts, csv_path, scenario.channels, scenario.stride)
    entries = [
        ("job", "simulate"),
        ("simulate.mode", scenario.sim.mode),
        ("simulate.samples", str(ts.t.size)),
        ("simulate.t_end", _fmt(ts.t[-1])),
        ("simulate.csv", csv_path.name),
    ]
    for name in ("i_d", "i_q", "t_e"):
        half = ts.channels[name][ts.t.size // 2:]
        entries.append((f"simulate.mean_{name}", _fmt(np.mean(half))))
    _write_summary(out_dir / scenario.summary_name,
                   entries + _config_echo(scenario))
    return [csv_path, out_dir / scenario.summary_name]


def _job_compare(scenario: Scenario, out_dir: Path):
    if scenario.sim.mode != "current-fed":
        raise ConfigError(
            "compare requires sim.mode = current-fed: the closed forms "
            "take prescribed currents"
        )
    ts = _simulate(scenario)
    _, (v_d_model, v_q_model) = _analytic_dq(scenario, ts.theta)
    metrics_d = compare_waveforms(ts.channels["v_d"], v_d_model)
    metrics_q = compare_waveforms(ts.channels["v_q"], v_q_model)

    csv_path = out_dir / scenario.csv_name
    out = TimeSeries(ts.t, ts.theta, {
        "v_d_sim": ts.channels["v_d"],
        "v_q_sim": ts.channels["v_q"],
        "v_d_model": np.broadcast_to(v_d_model, ts.t.shape).copy(),
        "v_q_model": np.broadcast_to(v_q_model, ts.t.shape).copy(),
    })
    write_csv(out, csv_path, stride=scenario.stride)

    entries = [("job", "compare")]
    for axis, metrics in (("v_d", metrics_d), ("v_q", metrics_q)):
        entries.append((f"compare.{axis}.max_abs_error",
                        _fmt(metrics.max_abs_error)))
        entries.append((f"compare.{axis}.rms_error", _fmt(metrics.rms_error)))
        entries.append((f"compare.{axis}.relative_rms",
                        "n/a" if metrics.relative_rms is None
                        else _fmt(metrics.relative_rms)))
    entries += _coefficient_entries(scenario)
    _write_summary(out_dir / scenario.summary_name,
                   entries + _config_echo(scenario))
    return [csv_path, out_dir / scenario.summary_name]


def _job_identify(scenario: Scenario, out_dir: Path):
    if scenario.family not in ("resistance", "flux"):
        raise ConfigError(
            f"identify supports families resistance and flux, "
            f"not {scenario.family!r}"
        )
    if scenario.i_0 != 0.0:
        raise ConfigError("identify assumes operating_point.i_0 = 0")
    if scenario.identify_source is not None:
        source = Path(scenario.identify_source)
        if not source.is_absolute():
            source = out_dir / source
        data = read_csv(source)
        for needed in ("theta", "v_d", "v_q"):
            if needed not in data:
                raise InputError(
                    f"{source}: column {needed!r} is required for identify"
                )
        theta = data["theta"]
        v_d_meas = data["v_d"]
        v_q_meas = data["v_q"]
        source_label = str(source)
    else:
        if scenario.sim.mode != "current-fed":
            raise ConfigError(
                "identify without source_csv requires sim.mode = current-fed"
            )
        ts = _simulate(scenario)
        theta = ts.theta
        v_d_meas = ts.channels["v_d"]
        v_q_meas = ts.channels["v_q"]
        source_label = "simulated"

    dec = decompose(scenario.machine)
    op = OperatingPoint(theta=theta, omega_e=scenario.omega_e,
                        i_d=scenario.i_d, i_q=scenario.i_q)
    ideal_d, ideal_q, _ = ideal_dq_nonsalient(
        dec.nominal_r, dec.nominal_l + dec.nominal_m, dec.nominal_lam,
        scenario.machine.pole_pairs, op)
    dv_d = v_d_meas - ideal_d
    dv_q = v_q_meas - ideal_q

    if scenario.family == "resistance":
        result = fit_resistance(dv_d, dv_q, scenario.i_d, scenario.i_q, theta)
        injected = dec.d_r
    else:
        result = fit_flux(dv_d, dv_q, scenario.omega_e, theta)
        injected = dec.d_lam

    recovered = np.array(result.per_phase)
    error = float(np.max(np.abs(recovered - np.array(injected))))
    entries = [
        ("job", "identify"),
        ("identify.family", result.family),
        ("identify.source", source_label),
        ("identify.s", _fmt(result.s)),
        ("identify.k", _fmt(result.phasor.k)),
        ("identify.phi", _fmt(result.phasor.phi)),
        ("identify.fit_residual_rms", _fmt(result.fit_residual_rms)),
    ]
    for phase, value in zip("abc", result.per_phase):
        entries.append((f"identify.recovered_{phase}", _fmt(value)))
    for phase, value in zip("abc", injected):
        entries.append((f"identify.injected_{phase}", _fmt(value)))
    entries.append(("identify.max_abs_error", _fmt(error)))
    summary = out_dir / scenario.summary_name
    _write_summary(summary, entries + _config_echo(scenario))
    return [summary]


_RUNNERS = {
    "coeffs": _job_coeffs,
    "simulate": _job_simulate,
    "compare": _job_compare,
    "identify": _job_identify,
}


def run_scenario(scenario: Scenario, job, out_dir):
    """Execute one job and write its artifacts under out_dir."""
    if job not in _RUNNERS:
        raise ConfigError(f"unknown job {job!r}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for section in scenario.sections:
        if section not in _RELEVANT[job]:
            print(f"warning: section [{section}] is ignored by the "
                  f"{job} job", file=sys.stderr)
    return _RUNNERS[job](scenario, out_dir)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pmimb",
        description="Per-phase imbalance models for PM synchronous machines",
    )
    sub = parser.add_subparsers(dest="job", required=True)
    for job, text in (
        ("coeffs", "closed-form imbalance coefficients"),
        ("simulate", "reference simulation to CSV"),
        ("compare", "closed-form model vs reference simulation"),
        ("identify", "recover deviations from waveforms"),
    ):
        p = sub.add_parser(job, help=text)
        p.add_argument("--scenario", required=True, help="scenario file")
        p.add_argument("--out", default=".", help="output directory")
    args = parser.parse_args(argv)

    try:
        scenario = parse_scenario(args.scenario)
        artifacts = run_scenario(scenario, args.job, args.out)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InputError, IdentifiabilityError, SimulationError,
            OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    for path in artifacts:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface.

Subcommands: `run` one scenario to CSV + report (+ figures), `sweep` a
parameter axis across runs, `validate` the numerics against known-good
answers, and `convert` lab-frame cavity parameters into simulation units.
Exit codes: 0 success, 1 usage error, 2 numerical or validation failure.
"""

import argparse
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import observables, oracle
from .errors import BlockadeError, CatalogError, ScenarioParseError
from .fock import coherent_density, fock_density
from .lindblad import IntegratorOptions, StepStats, propagate
from .model import (
    DriveSpec,
    DriveTone,
    PhysicalParams,
    SystemParams,
    drive_amplitude,
    params_from_physical,
)
from .observables import compute_series, evaluate_criteria, window_average
from .scenarios import Scenario, builtin, builtin_names, load

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2

_SIG = ".12g"    # significant digits for CSV cells


@dataclass
class RunReport:
    """What one `run` produced."""

    scenario: str
    criteria: observables.CriteriaReport
    outputs: list[Path]
    duration: float
    step_stats: StepStats


class _Parser(argparse.ArgumentParser):
    """argparse variant whose usage errors exit with code 1, not 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _scenario_from_arg(arg: str) -> Scenario:
    path = Path(arg)
    if path.suffix or path.exists():
        return load(path)
    return builtin(arg)


def _parse_assignment(text: str) -> tuple[str, str]:
    if "=" not in text:
        raise ValueError(f"--set expects key=value, got {text!r}")
    key, value = text.split("=", 1)
    return key.strip(), value.strip()


def apply_overrides(scenario: Scenario, assignments: list[str]) -> Scenario:
    """Apply `--set key=value` pairs; keys mirror the scenario-file format.

    Tones support indexed forms: epsK / detK adjust tone K, toneK=amp,det
    replaces it (or appends when K equals the current tone count).
    """
    params = scenario.params
    opts = scenario.options
    tones = list(scenario.drive.tones)
    t_end, target_n = scenario.t_end, scenario.target_n
    window = list(scenario.window)
    for text in assignments:
        key, value = _parse_assignment(text)
        if key == "u":
            params = replace(params, kerr_u=float(value))
        elif key == "delta":
            params = replace(params, delta=float(value))
        elif key == "dim":
            params = replace(params, dim=int(value))
        elif key == "t_end":
            t_end = float(value)
        elif key == "target_n":
            target_n = int(value)
        elif key == "window_start":
            window[0] = float(value)
        elif key == "window_end":
            window[1] = float(value)
        elif key == "abs_tol":
            opts = replace(opts, abs_tol=float(value))
        elif key == "rel_tol":
            opts = replace(opts, rel_tol=float(value))
        elif key == "max_step":
            opts = replace(opts, max_step=float(value))
        elif key == "output_interval":
            opts = replace(opts, output_interval=float(value))
        elif key == "tail_tol":
            opts = replace(opts, truncation_tail_tol=float(value))
        elif key.startswith("eps") and key[3:].isdigit():
            idx = int(key[3:])
            if idx >= len(tones):
                raise ValueError(f"{key}: drive has only {len(tones)} tones")
            tones[idx] = DriveTone(float(value), tones[idx].det)
        elif key.startswith("det") and key[3:].isdigit():
            idx = int(key[3:])
            if idx >= len(tones):
                raise ValueError(f"{key}: drive has only {len(tones)} tones")
            tones[idx] = DriveTone(tones[idx].amplitude, float(value))
        elif key.startswith("tone") and key[4:].isdigit():
            idx = int(key[4:])
            parts = value.split(",")
            if len(parts) != 2:
                raise ValueError(f"{key} expects 'amplitude,detuning', got {value!r}")
            tone = DriveTone(float(parts[0]), float(parts[1]))
            if idx == len(tones):
                tones.append(tone)
            elif idx < len(tones):
                tones[idx] = tone
            else:
                raise ValueError(f"{key}: drive has only {len(tones)} tones")
        else:
            raise ValueError(f"unknown --set key {key!r}")
    return Scenario(
        name=scenario.name,
        params=params,
        drive=DriveSpec(tuple(tones)),
        t_end=t_end,
        target_n=target_n,
        window=(window[0], window[1]),
        options=opts,
    )


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format(x, _SIG) if isinstance(x, float) else str(x) for x in row))
    path.write_text("\n".join(lines) + "\n", newline="\n")


def _report_text(scenario: Scenario, rep, stats: StepStats) -> str:
    p = scenario.params
    tones = ", ".join(
        f"{tone.amplitude:g} @ {tone.det:g}" for tone in scenario.drive.tones
    )
    lines = [
        f"scenario: {scenario.name}",
        f"target order: {scenario.target_n}",
        f"kerr U: {p.kerr_u:g}   delta: {p.delta:g}   dim: {p.dim}   gamma: {p.gamma:g}",
        f"tones (amplitude @ detuning): {tones}",
        f"t_end: {scenario.t_end:g}   output interval: {scenario.options.output_interval:g}",
        "",
        f"correlation criterion, averaged over gamma*t in "
        f"[{rep.window[0]:g}, {rep.window[1]:.6g}]:",
    ]
    for order in sorted(rep.g_avg):
        lines.append(f"  g({order}) = {rep.g_avg[order]:.6g}  [{rep.g_status[order]}]")
    lines.append(f"  verdict: {'PASS' if rep.g_criterion_pass else 'FAIL'}")
    lines += ["", f"distribution criterion at gamma*t = {rep.evaluation_time:g}:"]
    for n in sorted(rep.p_ratio):
        lines.append(f"  P{n}/Poisson{n} = {rep.p_ratio[n]:.6g}  [{rep.p_status[n]}]")
    lines.append(f"  verdict: {'PASS' if rep.p_criterion_pass else 'FAIL'}")
    lines += [
        "",
        f"integration: {stats.accepted} accepted / {stats.rejected} rejected steps",
        f"max trace drift before renormalization: {stats.max_trace_drift:.3e}",
        f"max top-two-level population: {stats.max_tail:.3e}",
        f"near-equality band: {rep.band:g}",
    ]
    return "\n".join(lines) + "\n"


def run_scenario(scenario: Scenario, out_dir: Path, plot: bool = True) -> RunReport:
    """Propagate one scenario and write series, envelope, report, figures."""
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    rho0 = fock_density(0, scenario.params.dim)
    traj = propagate(rho0, scenario.t_end, scenario.params, scenario.drive, scenario.options)
    series = compute_series(traj)
    period = math.pi / scenario.params.kerr_u if scenario.params.kerr_u > 0 else math.inf
    rep = evaluate_criteria(series, scenario.target_n, scenario.window, period)

    written: list[Path] = []
    try:
        n_max = series.n_max
        header = (
            ["t", "mean_n"]
            + [f"P{n}" for n in range(n_max + 1)]
            + [f"Q{n}" for n in range(n_max + 1)]
            + [f"g{o}" for o in sorted(series.g)]
        )
        rows = []
        for i, t in enumerate(series.times):
            row = [float(t), float(series.mean_n[i])]
            row += [float(x) for x in series.p[i]]
            row += [float(x) for x in series.poisson[i]]
            row += [float(series.g[o][i]) for o in sorted(series.g)]
            rows.append(row)
        series_path = out_dir / f"{scenario.name}_series.csv"
        _write_csv(series_path, header, rows)
        written.append(series_path)

        env = np.abs(
            [drive_amplitude(t, scenario.drive) for t in series.times]
        ) ** 2
        env_path = out_dir / f"{scenario.name}_envelope.csv"
        _write_csv(env_path, ["t", "abs_eps_sq"],
                   [[float(t), float(e)] for t, e in zip(series.times, env)])
        written.append(env_path)

        report_path = out_dir / f"{scenario.name}_report.txt"
        report_path.write_text(_report_text(scenario, rep, traj.step_stats), newline="\n")
        written.append(report_path)

        if plot:
            from . import plots

            written.append(plots.plot_correlations(
                series, out_dir / f"{scenario.name}_gn.png", title=scenario.name))
            written.append(plots.plot_distributions(
                series, out_dir / f"{scenario.name}_pn.png", title=scenario.name))
            written.append(plots.plot_envelope(
                series.times, env, out_dir / f"{scenario.name}_envelope.png",
                title=scenario.name))
    except BaseException:
        for path in written:
            path.unlink(missing_ok=True)
        raise
    return RunReport(
        scenario=scenario.name,
        criteria=rep,
        outputs=written,
        duration=time.perf_counter() - t0,
        step_stats=traj.step_stats,
    )


SWEEP_AXES = ("u", "dim", "t_end")   # plus eps0, eps1, ... for tone amplitudes


def _sweep_variant(scenario: Scenario, axis: str, value: float) -> Scenario:
    if axis == "u":
        # Keep ladder-matched drives on the ladder: detunings scale with U.
        old_u = scenario.params.kerr_u
        tones = scenario.drive.tones
        if old_u > 0:
            tones = tuple(
                DriveTone(t.amplitude, t.det * value / old_u) for t in tones
            )
        return replace(
            scenario,
            params=replace(scenario.params, kerr_u=value),
            drive=DriveSpec(tones),
        )
    if axis == "dim":
        return replace(scenario, params=replace(scenario.params, dim=int(value)))
    if axis == "t_end":
        return replace(scenario, t_end=value)
    if axis.startswith("eps") and axis[3:].isdigit():
        idx = int(axis[3:])
        tones = list(scenario.drive.tones)
        if idx >= len(tones):
            raise ValueError(f"axis {axis}: drive has only {len(tones)} tones")
        tones[idx] = DriveTone(value, tones[idx].det)
        return replace(scenario, drive=DriveSpec(tuple(tones)))
    raise ValueError(
        f"unknown sweep axis {axis!r}; use one of {', '.join(SWEEP_AXES)} or epsK"
    )


def _sweep_worker(payload):
    scenario, out_dir, plot = payload
    try:
        return run_scenario(scenario, out_dir, plot=plot), None
    except (BlockadeError, ValueError) as exc:
        return None, f"{type(exc).__name__}: {exc}"


def run_sweep(
    scenario: Scenario,
    axis: str,
    values: list[float],
    out_dir: Path,
    jobs: int = 1,
    plot: bool = True,
):
    """Run one scenario per axis value; failures are recorded, not fatal."""
    out_dir.mkdir(parents=True, exist_ok=True)
    payloads = []
    for value in values:
        point_dir = out_dir / f"{axis}={value:g}"
        variant = _sweep_variant(scenario, axis, value)
        payloads.append((variant, point_dir, plot))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_worker, payloads))
    else:
        results = [_sweep_worker(p) for p in payloads]

    orders = observables.DEFAULT_ORDERS
    header = ["value"] + [f"g{o}" for o in orders] + ["g_criterion", "p_criterion", "status"]
    rows = []
    g_series = {o: [] for o in orders}
    ok_values = []
    for value, (report, error) in zip(values, results):
        if report is None:
            note = f"error: {error}".replace(",", ";").replace("\n", " ")
            rows.append([float(value)] + [math.nan] * len(orders) + ["", "", note])
            continue
        rep = report.criteria
        rows.append(
            [float(value)]
            + [float(rep.g_avg[o]) for o in orders]
            + ["pass" if rep.g_criterion_pass else "fail",
               "pass" if rep.p_criterion_pass else "fail", "ok"]
        )
        ok_values.append(value)
        for o in orders:
            g_series[o].append(rep.g_avg[o])
    summary = out_dir / f"sweep_{scenario.name}_{axis}.csv"
    _write_csv(summary, header, rows)
    if plot and ok_values:
        from . import plots

        plots.plot_sweep(
            ok_values, {o: np.array(g_series[o]) for o in orders}, axis,
            out_dir / f"sweep_{scenario.name}_{axis}.png", title=scenario.name)
    return results, summary


# --- validation -----------------------------------------------------------

@dataclass
class Check:
    name: str
    expected: str
    actual: str
    ok: bool


def _quick_checks() -> list[Check]:
    checks = []

    # free decay of |1><1| against the exact exponential
    params = SystemParams(delta=0.0, kerr_u=7.0, dim=6)
    silent = DriveSpec.from_pairs([(0.0, 0.0)])
    traj = propagate(fock_density(1, 6), 5.0, params, silent)
    dev = float(np.max(np.abs(traj.states[:, 1, 1].real - np.exp(-traj.times))))
    checks.append(Check("fock decay |1>", "max dev < 1e-6", f"{dev:.2e}", dev < 1e-6))

    # damped coherent state stays Poissonian with mean |alpha|^2 e^{-t}
    params = SystemParams(delta=0.0, kerr_u=0.0, dim=15)
    traj = propagate(coherent_density(0.3, 15), 3.0, params, silent)
    worst = 0.0
    for i in (0, len(traj.times) // 2, len(traj.times) - 1):
        nbar = 0.09 * math.exp(-traj.times[i])
        ref = observables.poisson_distribution(nbar, 9)
        worst = max(worst, float(np.max(np.abs(
            observables.photon_distribution(traj.states[i])[:10] - ref))))
    checks.append(Check("damped coherent Poisson", "max dev < 1e-6", f"{worst:.2e}",
                        worst < 1e-6))

    # coherent-state correlations are exactly one
    rho = coherent_density(0.4, 20)
    dev = max(abs(observables.g_n(rho, o) - 1.0) for o in (2, 3, 4, 5))
    checks.append(Check("coherent g(2..5) = 1", "dev < 1e-8", f"{dev:.2e}", dev < 1e-8))

    # weak-drive steady state vs second-order perturbation theory
    params = SystemParams(delta=0.0, kerr_u=10.0, dim=12)
    ss = oracle.steady_state(oracle.liouvillian(params, 0.01))
    g2 = observables.g_n(ss, 2)
    g2_ref = 0.25 / (100.0 + 0.25)
    rel = abs(g2 / g2_ref - 1.0)
    checks.append(Check("perturbative g(2)", f"{g2_ref:.4e} +- 5%", f"{g2:.4e}", rel < 0.05))
    nbar = observables.mean_photon(ss)
    rel = abs(nbar / 4e-4 - 1.0)
    checks.append(Check("perturbative mean n", "4.0e-04 +- 5%", f"{nbar:.4e}", rel < 0.05))

    # drive envelope peaks: |sum eps_k|^2 at t = 0, period pi/U
    for name, peak in (("fig1", 0.04), ("fig5", 0.09)):
        sc = builtin(name)
        period = math.pi / sc.params.kerr_u
        grid = np.linspace(0.0, period, 2001)
        env = np.abs([drive_amplitude(t, sc.drive) for t in grid]) ** 2
        dev = abs(float(env.max()) - peak)
        shift = np.abs([drive_amplitude(t + period, sc.drive) for t in grid]) ** 2
        per_dev = float(np.max(np.abs(env - shift)))
        ok = dev < 1e-6 and per_dev < 1e-9
        checks.append(Check(f"{name} envelope", f"peak {peak}, period pi/U",
                            f"peak dev {dev:.1e}, period dev {per_dev:.1e}", ok))
    return checks


def _full_checks() -> list[Check]:
    checks = []

    # adaptive integrator against the piecewise-exponential reference
    sc = builtin("fig1")
    params = replace(sc.params, dim=12)
    rho0 = fock_density(0, 12)
    rk = propagate(rho0, 5.0, params, sc.drive, sc.options)
    slice_dt = math.pi / params.kerr_u / 250.0
    pw = oracle.piecewise_exponential_propagate(rho0, 5.0, params, sc.drive, slice_dt)
    dist = oracle.trace_distance(rk.states[-1], pw.states[-1])
    checks.append(Check("integrator vs exponential reference", "trace distance < 1e-6",
                        f"{dist:.2e}", dist < 1e-6))

    # steady state reached by plain long-time propagation
    params = SystemParams(delta=0.0, kerr_u=10.0, dim=12)
    drive = DriveSpec.from_pairs([(0.01, 0.0)])
    opts = IntegratorOptions(abs_tol=1e-13, rel_tol=1e-10, max_step=0.1,
                             output_interval=0.5)
    traj = propagate(fock_density(0, 12), 50.0, params, drive, opts)
    g2 = observables.g_n(traj.states[-1], 2)
    g2_ref = 0.25 / (100.0 + 0.25)
    rel = abs(g2 / g2_ref - 1.0)
    checks.append(Check("long-time propagated g(2)", f"{g2_ref:.4e} +- 5%",
                        f"{g2:.4e}", rel < 0.05))

    # two-tone versus single-tone enhancement
    single = builtin("fig4_single")
    double = builtin("fig4_double")
    window = (10.0, 14.0)
    means = {}
    for sc in (single, double):
        traj = propagate(fock_density(0, sc.params.dim), sc.t_end, sc.params,
                         sc.drive, sc.options)
        series = compute_series(traj)
        means[sc.name] = window_average(series.times, series.mean_n, window)
    ratio = means["fig4_double"] / means["fig4_single"]
    checks.append(Check("two-tone photon enhancement", "ratio 2.6 +- 0.3",
                        f"{ratio:.3f}", abs(ratio - 2.6) < 0.3))
    return checks


def cmd_validate(full: bool) -> int:
    checks = _quick_checks()
    if full:
        checks += _full_checks()
    width = max(len(c.name) for c in checks)
    failed = 0
    for c in checks:
        status = "PASS" if c.ok else "FAIL"
        print(f"[{status}] {c.name:<{width}}  expected {c.expected}  got {c.actual}")
        failed += 0 if c.ok else 1
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_NUMERICAL


def cmd_convert(args) -> int:
    powers = tuple(args.power_w or ())
    phys = PhysicalParams(
        wavelength=args.wavelength_nm * 1e-9,
        quality_factor=args.q,
        v_eff=args.veff_um3 * 1e-18,
        n1=args.n1,
        n2=args.n2,
        input_powers=powers,
    )
    conv = params_from_physical(phys)
    print(f"omega_a = {conv.omega_a:.6e} rad/s")
    print(f"gamma   = {conv.gamma:.6e} rad/s")
    print(f"U       = {conv.kerr_u:.6e} rad/s")
    print(f"U/gamma = {conv.u_over_gamma:.6g}")
    for i, eps in enumerate(conv.eps_over_gamma):
        print(f"eps{i}/gamma = {eps:.6g}   (P = {powers[i]:g} W)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="blockade-lab",
                     description="Driven Kerr resonator: simulate, sweep, validate, convert.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario (builtin name or file path)")
    p_run.add_argument("scenario")
    p_run.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p_run.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a scenario key (repeatable)")
    p_run.add_argument("--no-plot", action="store_true", help="skip figure rendering")

    p_sweep = sub.add_parser("sweep", help="run a scenario across one parameter axis")
    p_sweep.add_argument("scenario")
    p_sweep.add_argument("--axis", required=True,
                         help="u, dim, t_end, or epsK for tone K's amplitude")
    p_sweep.add_argument("--values", required=True, help="comma-separated axis values")
    p_sweep.add_argument("--out", type=Path, default=Path("."))
    p_sweep.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    p_sweep.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p_sweep.add_argument("--no-plot", action="store_true")

    p_val = sub.add_parser("validate", help="check the numerics against known answers")
    p_val.add_argument("--full", action="store_true",
                       help="add the slow reference-propagator comparisons")

    p_conv = sub.add_parser("convert", help="physical cavity parameters -> gamma units")
    p_conv.add_argument("--wavelength-nm", type=float, required=True)
    p_conv.add_argument("--q", type=float, required=True)
    p_conv.add_argument("--veff-um3", type=float, required=True)
    p_conv.add_argument("--n1", type=float, required=True)
    p_conv.add_argument("--n2", type=float, required=True)
    p_conv.add_argument("--power-w", type=float, action="append",
                        help="input power per tone (repeatable)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    try:
        if args.command == "run":
            scenario = apply_overrides(_scenario_from_arg(args.scenario), args.set)
            report = run_scenario(scenario, args.out, plot=not args.no_plot)
            rep = report.criteria
            print(f"{scenario.name}: correlation criterion "
                  f"{'PASS' if rep.g_criterion_pass else 'FAIL'}, distribution criterion "
                  f"{'PASS' if rep.p_criterion_pass else 'FAIL'} "
                  f"({report.duration:.1f} s)")
            for path in report.outputs:
                print(f"  wrote {path}")
            return EXIT_OK
        if args.command == "sweep":
            scenario = apply_overrides(_scenario_from_arg(args.scenario), args.set)
            values = [float(v) for v in args.values.split(",") if v.strip()]
            if not values:
                raise ValueError("--values must list at least one number")
            if args.jobs < 1:
                raise ValueError("--jobs must be at least 1")
            results, summary = run_sweep(scenario, args.axis, values, args.out,
                                         jobs=args.jobs, plot=not args.no_plot)
            failures = 0
            for value, (report, error) in zip(values, results):
                if report is None:
                    print(f"  {args.axis}={value:g}: FAILED ({error})")
                    failures += 1
                else:
                    rep = report.criteria
                    print(f"  {args.axis}={value:g}: g "
                          f"{'pass' if rep.g_criterion_pass else 'fail'}, P "
                          f"{'pass' if rep.p_criterion_pass else 'fail'}")
            print(f"wrote {summary}")
            return EXIT_OK if failures == 0 else EXIT_NUMERICAL
        if args.command == "validate":
            return cmd_validate(args.full)
        if args.command == "convert":
            return cmd_convert(args)
    except (CatalogError, ScenarioParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BlockadeError as exc:
        print(f"error: scenario failed: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()

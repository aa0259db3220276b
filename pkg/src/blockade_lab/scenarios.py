"""Bundled scenario catalog and the flat key/value scenario-file format.

A scenario pins everything one run needs: system parameters, drive tones,
how long to integrate, which blockade order to test, and the evaluation
window. The bundled entries cover the standard two- and three-tone
configurations; files let users define their own.
"""

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import CatalogError, ScenarioParseError
from .lindblad import IntegratorOptions
from .model import DriveSpec, SystemParams

log = logging.getLogger(__name__)

_INT_KEYS = ("abs_tol", "rel_tol", "max_step", "output_interval", "tail_tol")


@dataclass(frozen=True)
class Scenario:
    name: str
    params: SystemParams
    drive: DriveSpec
    t_end: float
    target_n: int
    window: tuple[float, float]
    options: IntegratorOptions = field(default_factory=IntegratorOptions)

    def __post_init__(self):
        if not self.t_end > 0:
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        lo, hi = self.window
        if not (0 <= lo < hi <= self.t_end):
            raise ValueError(f"window {self.window} must satisfy 0 <= start < end <= t_end")
        if self.target_n < 2:
            raise ValueError(f"target order must be at least 2, got {self.target_n}")


def _entry(name, kerr_u, amps, dets, target, dim=15, delta=0.0):
    return Scenario(
        name=name,
        params=SystemParams(delta=delta, kerr_u=kerr_u, dim=dim),
        drive=DriveSpec.from_pairs(zip(amps, dets)),
        t_end=15.0,
        target_n=target,
        window=(10.0, 14.0),
    )


def _catalog() -> dict[str, Scenario]:
    entries = [
        _entry("fig1", 10.0, (0.1, 0.1), (0.0, 20.0), 2),
        _entry("fig2a", 10.0, (0.1, 0.2), (0.0, 20.0), 2),
        _entry("fig2b", 10.0, (0.2, 0.1), (0.0, 20.0), 2),
        _entry("fig3a", 3.0, (0.1, 0.1), (0.0, 6.0), 2),
        _entry("fig3b", 5.0, (0.1, 0.1), (0.0, 10.0), 2),
        _entry("fig3c", 10.0, (0.1, 0.1), (0.0, 20.0), 2),
        # Single strong tone at the two-photon resonance (frame anchored to
        # that tone, so the resonator detuning is -U) versus the two-tone
        # drive of the same target order.
        _entry("fig4_single", 10.0, (1.2,), (0.0,), 2, dim=20, delta=-10.0),
        _entry("fig4_double", 10.0, (0.5, 0.7), (0.0, 20.0), 2, dim=20),
        _entry("fig5", 10.0, (0.1, 0.1, 0.1), (0.0, 20.0, 40.0), 3),
        _entry("fig6a", 10.0, (0.1, 0.1, 0.2), (0.0, 20.0, 40.0), 3),
        _entry("fig6b", 10.0, (0.1, 0.2, 0.1), (0.0, 20.0, 40.0), 3),
        _entry("fig6c", 10.0, (0.1, 0.2, 0.2), (0.0, 20.0, 40.0), 3),
        _entry("fig7a", 3.0, (0.1, 0.1, 0.1), (0.0, 6.0, 12.0), 3),
        _entry("fig7b", 5.0, (0.1, 0.1, 0.1), (0.0, 10.0, 20.0), 3),
        _entry("fig7c", 10.0, (0.1, 0.1, 0.1), (0.0, 20.0, 40.0), 3),
    ]
    return {s.name: s for s in entries}


_CATALOG = _catalog()


def builtin_names() -> list[str]:
    return sorted(_CATALOG)


def builtin(name: str) -> Scenario:
    """Fetch one bundled scenario by name."""
    try:
        return _CATALOG[name]
    except KeyError:
        raise CatalogError(
            f"unknown scenario {name!r}; available: {', '.join(builtin_names())}"
        ) from None


def save(scenario: Scenario, path) -> None:
    """Write a scenario to the flat key/value text format."""
    lines = [
        "# scenario definition (rates in units of gamma, times in 1/gamma)",
        f"name = {scenario.name}",
        f"u = {scenario.params.kerr_u!r}",
        f"delta = {scenario.params.delta!r}",
        f"dim = {scenario.params.dim}",
        f"t_end = {scenario.t_end!r}",
        f"window_start = {scenario.window[0]!r}",
        f"window_end = {scenario.window[1]!r}",
        f"target_n = {scenario.target_n}",
    ]
    for tone in scenario.drive.tones:
        lines.append(f"tone = {tone.amplitude!r}, {tone.det!r}")
    opts = scenario.options
    lines += [
        "",
        "# integrator",
        f"abs_tol = {opts.abs_tol!r}",
        f"rel_tol = {opts.rel_tol!r}",
        f"max_step = {opts.max_step!r}",
        f"output_interval = {opts.output_interval!r}",
        f"tail_tol = {opts.truncation_tail_tol!r}",
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_float(value, lineno, key):
    try:
        return float(value)
    except ValueError:
        raise ScenarioParseError(f"line {lineno}: {key} expects a number, got {value!r}") from None


def load(path) -> Scenario:
    """Parse a scenario file; raises ScenarioParseError with line context."""
    path = Path(path)
    raw: dict[str, tuple[str, int]] = {}
    tones: list[tuple[float, float, int]] = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ScenarioParseError(f"line {lineno}: expected 'key = value', got {text!r}")
        key, value = (part.strip() for part in text.split("=", 1))
        if key == "tone":
            parts = [p.strip() for p in value.split(",")]
            if len(parts) != 2:
                raise ScenarioParseError(
                    f"line {lineno}: tone expects 'amplitude, detuning', got {value!r}"
                )
            tones.append(
                (
                    _parse_float(parts[0], lineno, "tone amplitude"),
                    _parse_float(parts[1], lineno, "tone detuning"),
                    lineno,
                )
            )
        elif key in ("name", "u", "delta", "dim", "t_end", "window_start", "window_end",
                     "target_n", *_INT_KEYS):
            if key in raw:
                raise ScenarioParseError(f"line {lineno}: duplicate key {key!r}")
            raw[key] = (value, lineno)
        else:
            raise ScenarioParseError(f"line {lineno}: unknown key {key!r}")

    for required in ("u", "t_end", "window_start", "window_end", "target_n"):
        if required not in raw:
            raise ScenarioParseError(f"{path.name}: missing required key {required!r}")
    if not tones:
        raise ScenarioParseError(f"{path.name}: at least one tone line is required")

    def get_float(key, default=None):
        if key not in raw:
            return default
        return _parse_float(raw[key][0], raw[key][1], key)

    def get_int(key, default=None):
        if key not in raw:
            return default
        value, lineno = raw[key]
        try:
            return int(value)
        except ValueError:
            raise ScenarioParseError(f"line {lineno}: {key} expects an integer, got {value!r}") from None

    if set(raw) & set(_INT_KEYS):
        options = IntegratorOptions(
            abs_tol=get_float("abs_tol", 1e-10),
            rel_tol=get_float("rel_tol", 1e-8),
            max_step=get_float("max_step", 0.01),
            output_interval=get_float("output_interval", 0.01),
            truncation_tail_tol=get_float("tail_tol", 1e-8),
        )
    else:
        log.info("%s: no integrator keys given, using defaults", path.name)
        options = IntegratorOptions()

    try:
        return Scenario(
            name=raw.get("name", (path.stem, 0))[0],
            params=SystemParams(
                delta=get_float("delta", 0.0),
                kerr_u=get_float("u"),
                dim=get_int("dim", 15),
            ),
            drive=DriveSpec.from_pairs((a, d) for a, d, _ in tones),
            t_end=get_float("t_end"),
            target_n=get_int("target_n"),
            window=(get_float("window_start"), get_float("window_end")),
            options=options,
        )
    except ValueError as exc:
        raise ScenarioParseError(f"{path.name}: {exc}") from exc


def with_overrides(scenario: Scenario, **changes) -> Scenario:
    """Return a copy of `scenario` with top-level fields replaced."""
    return replace(scenario, **changes)

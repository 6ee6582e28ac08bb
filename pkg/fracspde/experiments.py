# Copyright 2023 c0fec0de
#
# This file is part of fracspde.
#
# fracspde is free software: you can redistribute it and/or modify it under
# the terms of the GNU Lesser General Public License as published by the Free
# Software Foundation, either version 3 of the License, or (at your option) any
# later version.
#
# fracspde is distributed in the hope that it will be useful, but WITHOUT
# ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS
# FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
#
# You should have received a copy of the GNU Lesser General Public License along
# with fracspde. If not, see <https://www.gnu.org/licenses/>.

"""
Experiment Driver.

:any:`run` executes one :any:`ExperimentConfig` and writes its artifacts into ``output_dir``:

* ``manifest.json``: the fully resolved configuration, the package version and the seed lineage.
  A manifest is itself a valid configuration file and reproduces the run.
* ``summary.json``: pass/fail per check.
* the result CSVs of the command and a ``<name>_report.csv`` with one row per check.
  Diagnostics, which never fail a run, go to ``<name>_diagnostics.csv``.
"""

import json
import math
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError
from scipy import special

from ._basemodel import BaseModel
from ._util import LOGGER
from .appconfig import AppConfig
from .artifacts import (
    FRONT_FIELDS,
    KERNEL_FIELDS,
    ML_FIELDS,
    MOMENT_FIELDS,
    RENEWAL_FIELDS,
    CheckResult,
    summarize,
    write_csv,
    write_json,
    write_report,
)
from .const import TARGET_REL_ERR_DEFAULT
from .datamodel import (
    BoundaryPolicy,
    Command,
    ExperimentConfig,
    InitialCondition,
    InitialKind,
    MLParams,
    ModelParams,
    NonlinearityKind,
    NonlinearitySpec,
    SpaceTimeGrid,
    SubordinatorParams,
    Suite,
    Tolerances,
)
from .exceptions import InvalidExperimentConfigError
from .kernel import (
    build_kernel_table,
    c_star,
    c_star_bound,
    c_star_integral,
    green_exp_moment,
    green_exp_moment_quadrature,
    green_kernel,
    green_kernel_spectral,
    green_l2_norm,
)
from .renewal import (
    Forcing,
    Ordering,
    RenewalProblem,
    Scheme,
    check_supersolution,
    picard_gamma,
    picard_iterate,
    renewal_asymptote,
    solve_renewal,
    solve_tilted,
    tilt_constant,
    tilted_kernel_mass,
    weighted_sup_norm,
)
from .spde_sim import (
    SEED_LINEAGE,
    FieldEnsemble,
    adaptedness_check,
    convexity_diagnostic,
    correlation_limit,
    corollary_constant,
    envelope_check,
    estimate_front,
    estimate_lyapunov,
    front_bounds,
    isometry_check,
    l2_energy_check,
    lower_bound_rate,
    moment_curve,
    region_indicator_check,
    replica_correlation,
    second_moment_renewal,
    simulate,
    weighted_young_constant,
)
from .special_fn import ml_bounds, mittag_leffler
from .subordinator import (
    inverse_subordinator_expectation,
    inverse_subordinator_laplace,
    inverse_subordinator_mass,
    inverse_subordinator_mgf,
    inverse_subordinator_moment,
    stable_density_mass,
    stable_density_values,
    unit_clock_density,
)

if sys.version_info < (3, 10):  # pragma: no cover
    from importlib_metadata import PackageNotFoundError, version
else:  # pragma: no cover
    from importlib.metadata import PackageNotFoundError, version

Checks = List[CheckResult]

_FRONT_REPLICAS_MAX = 2000
_INTERIOR_CELLS = 5
_CORRELATION_STREAMS = 100
_CORRELATION_DRAWS = 4096
_EXACT = 1e-12


def package_version() -> str:
    """Installed package version."""
    try:
        return version("fracspde")
    except PackageNotFoundError:  # pragma: no cover
        return "0.0.0"


class RunResult(BaseModel):
    """
    Outcome Of :any:`run`.

    Attributes:
        command: Executed command.
        output_dir: Artifact directory.
        checks: All checks, diagnostics excluded.
        files: Written files.
    """

    command: Command
    output_dir: Path
    checks: Tuple[CheckResult, ...] = ()
    files: Tuple[Path, ...] = ()

    @property
    def passed(self) -> bool:
        """All checks passed."""
        return all(check.passed for check in self.checks)

    @property
    def failed(self) -> Tuple[str, ...]:
        """Names of the failed checks."""
        return tuple(check.check for check in self.checks if not check.passed)


def load_experiment_config(path: Optional[Path] = None) -> ExperimentConfig:
    """
    Load an experiment configuration from the JSON file ``path``.

    ``path`` may also point to a ``manifest.json`` of an earlier run.
    Without ``path`` the defaults are returned.

    Raises:
        InvalidExperimentConfigError: Unreadable file, invalid JSON, unknown keys or invalid values.
    """
    if path is None:
        return ExperimentConfig()
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise InvalidExperimentConfigError(path, str(exc)) from exc
    if isinstance(data, dict) and "config" in data and "version" in data:
        data = data["config"]
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        raise InvalidExperimentConfigError(path, str(exc)) from exc


def parse_tolerances(tolerances: Tolerances, items: Sequence[str]) -> Tolerances:
    """
    Apply ``NAME=VALUE`` overrides.

    >>> parse_tolerances(Tolerances(), ["mass_abs=1e-3", "picard_iterations=80"])
    Tolerances(mass_abs=0.001, picard_iterations=80)
    """
    kwargs = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep or not name.strip():
            raise InvalidExperimentConfigError(None, f"tolerance override must be NAME=VALUE, got {item!r}")
        kwargs[name.strip()] = value
    try:
        return tolerances.model_copy_fromstr(kwargs)
    except ValueError as exc:
        raise InvalidExperimentConfigError(None, f"tolerance override {exc}") from exc


def apply_overrides(
    config: ExperimentConfig,
    command: Optional[Command] = None,
    suite: Optional[Suite] = None,
    seed: Optional[int] = None,
    output_dir: Optional[Path] = None,
    replicas: Optional[int] = None,
    tolerances: Sequence[str] = (),
) -> ExperimentConfig:
    """
    Override file values by command line values.

    >>> apply_overrides(ExperimentConfig(), seed=7, replicas=10).seed
    7
    """
    update: dict = {}
    if command is not None:
        update["command"] = command
    if suite is not None:
        update["suite"] = suite
    if seed is not None:
        update["seed"] = seed
    if output_dir is not None:
        update["output_dir"] = output_dir
    if replicas is not None:
        update["replicas"] = replicas
    if tolerances:
        update["tolerances"] = parse_tolerances(config.tolerances, tolerances)
    if not update:
        return config
    try:
        return config.model_copy(update=update)
    except ValidationError as exc:
        raise InvalidExperimentConfigError(None, str(exc)) from exc


def manifest(config: ExperimentConfig) -> dict:
    """Manifest echoing the resolved configuration."""
    return {
        "version": package_version(),
        "config": config.model_dump(mode="json"),
        "seed_lineage": {"seed": config.seed, "replicas": config.replicas, "derivation": SEED_LINEAGE},
    }


class _Outcome:
    def __init__(self):
        self.checks: Checks = []
        self.diagnostics: Checks = []
        self.files: List[Path] = []

    def report(self, output_dir: Path, name: str):
        self.files.append(write_report(output_dir / f"{name}_report.csv", self.checks))
        if self.diagnostics:
            self.files.append(write_report(output_dir / f"{name}_diagnostics.csv", self.diagnostics))


def run(config: ExperimentConfig, threads: Optional[int] = None) -> RunResult:
    """
    Execute ``config`` and write its artifacts.

    Raises:
        DomainError, AccuracyError, TruncationError, UnsupportedConfigurationError, DivergenceError,
        EstimationError: Numerical failure of the named operation.
    """
    output_dir = Path(config.output_dir)
    LOGGER.info("run %s into %s", config.command.value, output_dir)
    files = [write_json(output_dir / "manifest.json", manifest(config))]
    checks: Checks = []
    diagnostics: Checks = []
    if config.command == Command.VERIFY:
        suites = [suite for suite in Suite if suite != Suite.ALL] if config.suite == Suite.ALL else [config.suite]
        for suite in suites:
            LOGGER.info("verify suite %s", suite.value)
            outcome = _SUITES[suite](config, threads)
            outcome.report(output_dir, suite.value)
            checks.extend(outcome.checks)
            diagnostics.extend(outcome.diagnostics)
            files.extend(outcome.files)
    else:
        outcome = _COMMANDS[config.command](config, output_dir, threads)
        outcome.report(output_dir, config.command.value)
        checks.extend(outcome.checks)
        diagnostics.extend(outcome.diagnostics)
        files.extend(outcome.files)
    summary = summarize(checks)
    summary["command"] = config.command.value
    summary["diagnostics"] = {check.check: check.passed for check in diagnostics}
    files.append(write_json(output_dir / "summary.json", summary))
    result = RunResult(command=config.command, output_dir=output_dir, checks=tuple(checks), files=tuple(files))
    LOGGER.info("run %s: %d checks, %d failed", config.command.value, len(checks), len(result.failed))
    return result


def _target_rel_err() -> float:
    return float(AppConfig().options.target_rel_err or TARGET_REL_ERR_DEFAULT)


def _interior_cells(grid: SpaceTimeGrid, count: int = _INTERIOR_CELLS) -> List[int]:
    return [grid.nx * (index + 1) // (count + 1) for index in range(count)]


def _z_scores(estimate: np.ndarray, reference: np.ndarray, stderr: np.ndarray) -> np.ndarray:
    deviation = np.abs(estimate - reference)
    exact = deviation <= _EXACT * np.maximum(np.abs(reference), 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        scores = np.where(stderr > 0, deviation / stderr, math.inf)
    return np.where(exact, 0.0, scores)


# ---------------------------------------------------------------------------- commands


def _ml_rows(config: ExperimentConfig) -> Tuple[List[dict], int]:
    settings = config.ml
    target = _target_rel_err()
    rows = []
    violations = 0
    for beta in settings.betas:
        ml = MLParams(beta=beta, target_rel_err=target)
        for x in np.geomspace(settings.x_min, settings.x_max, settings.points):
            value = mittag_leffler(ml, -x)
            lower = upper = None
            if beta < 1:
                lower, upper = ml_bounds(beta, float(x))
                violations += not lower <= value <= upper
            rows.append({"beta": beta, "z": float(-x), "value": value, "lower": lower, "upper": upper})
    return rows, violations


def _ml(config: ExperimentConfig, output_dir: Path, threads: Optional[int]) -> _Outcome:
    outcome = _Outcome()
    rows, violations = _ml_rows(config)
    outcome.files.append(write_csv(output_dir / "ml_table.csv", rows, ML_FIELDS))
    outcome.checks.append(CheckResult.flag("special_fn.sandwich", violations == 0, value=violations))
    return outcome


def _kernel_table_checks(params: ModelParams, grid: SpaceTimeGrid, tolerances: Tolerances, threads, outcome):
    table = build_kernel_table(params, grid.dt, grid.dx, grid.nt, grid.nx, threads=threads)
    mass_error = float(np.max(np.abs(table.mass_row - 1.0)))
    outcome.checks.append(CheckResult.below("kernel.table_mass", mass_error, tolerances.mass_abs))
    times = grid.dt * np.arange(1, grid.nt + 1)
    reference = c_star(params) * times**-params.theta
    l2_error = float(np.max(np.abs(table.l2_row / reference - 1.0)))
    outcome.checks.append(CheckResult.below("kernel.table_l2_rows", l2_error, tolerances.l2_row_rel))
    return table


def _kernel(config: ExperimentConfig, output_dir: Path, threads: Optional[int]) -> _Outcome:
    outcome = _Outcome()
    table = _kernel_table_checks(config.params, config.grid, config.tolerances, threads, outcome)
    outcome.files.append(write_csv(output_dir / "kernel_table.csv", table.records(), KERNEL_FIELDS))
    return outcome


def _renewal(config: ExperimentConfig, output_dir: Path, threads: Optional[int]) -> _Outcome:
    outcome = _Outcome()
    settings = config.renewal
    horizon = settings.horizon / tilt_constant(settings.b, settings.theta)
    problem = RenewalProblem(
        a=Forcing.constant(settings.a),
        b=settings.b,
        theta=settings.theta,
        t_grid=tuple(np.linspace(horizon / settings.points, horizon, settings.points)),
    )
    solution = solve_renewal(problem, scheme=Scheme.EXPONENTIAL)
    outcome.files.append(write_csv(output_dir / "renewal.csv", solution.records(), RENEWAL_FIELDS))
    outcome.checks.append(
        CheckResult.compare(
            "renewal.asymptote",
            float(solution.tilted[-1]),
            renewal_asymptote(problem),
            config.tolerances.renewal_rel,
            relative=True,
        )
    )
    outcome.diagnostics.append(CheckResult.flag("renewal.drift", True, value=solution.drift))
    return outcome


def _oracle_checks(ensemble: FieldEnsemble, cells: Sequence[int], label: str, se_bands: float, outcome: _Outcome):
    times = ensemble.times[1:]
    exact = second_moment_renewal(ensemble.params, ensemble.sigma, ensemble.u0, times).f
    for cell in cells:
        curve = moment_curve(ensemble, 2, cell)
        scores = _z_scores(curve.estimate[1:], exact, curve.stderr[1:])
        worst = float(np.max(scores))
        outcome.checks.append(
            CheckResult(
                check=f"spde_sim.renewal_oracle[{label} x={curve.x}]",
                value=worst,
                reference=0.0,
                tolerance=se_bands,
                passed=worst <= se_bands,
            )
        )


def _oracle_applicable(config: ExperimentConfig) -> bool:
    return (
        config.nonlinearity.kind == NonlinearityKind.LINEAR
        and config.initial.is_constant
        and config.params.l2_admissible
        and config.params.theta < 1
    )


def _simulate(config: ExperimentConfig, output_dir: Path, threads: Optional[int]) -> _Outcome:
    outcome = _Outcome()
    grid = config.grid
    cells = _interior_cells(grid)
    ensemble = simulate(
        config.params,
        grid,
        config.initial.sample(grid),
        config.nonlinearity,
        config.seed,
        config.replicas,
        threads=threads,
        cells=cells,
    )
    rows = [row for cell in cells for row in moment_curve(ensemble, 2, cell).records()]
    outcome.files.append(write_csv(output_dir / "moments.csv", rows, MOMENT_FIELDS))
    if _oracle_applicable(config):
        _oracle_checks(ensemble, cells, f"beta={config.params.beta}", config.tolerances.se_bands, outcome)
    energy = l2_energy_check(ensemble, config.tolerances.epsilon, se_bands=config.tolerances.se_bands)
    outcome.checks.append(CheckResult.flag("spde_sim.l2_energy", energy.passed, value=energy.rate))
    return outcome


def _front_checks(
    params: ModelParams,
    grid: SpaceTimeGrid,
    sigma: NonlinearitySpec,
    initial: InitialCondition,
    config: ExperimentConfig,
    threads: Optional[int],
    outcome: _Outcome,
) -> List[dict]:
    tolerances = config.tolerances
    bounds = front_bounds(params, sigma)
    outcome.diagnostics.append(
        CheckResult(
            check="spde_sim.front_threshold_displays",
            value=bounds.threshold,
            reference=bounds.threshold_derived,
            passed=bounds.displays_agree,
        )
    )
    outcome.diagnostics.append(
        CheckResult.flag("spde_sim.positive_front_threshold", True, value=bounds.positive_threshold)
    )
    replicas = min(config.replicas, _FRONT_REPLICAS_MAX)
    if replicas < config.replicas:
        LOGGER.info("fronts: replicas capped at %d", replicas)
    ensemble = simulate(params, grid, initial.sample(grid), sigma, config.seed, replicas, threads=threads)
    thetas = sorted(config.fronts.thetas or (0.1, bounds.threshold, 2.0 * bounds.threshold))
    fronts = [estimate_front(ensemble, theta, window=config.fronts.window) for theta in thetas]
    rows = [row for front in fronts for row in front.records()]

    late = fronts[0].t >= 0.5 * grid.t_max
    for front in fronts:
        if front.theta > bounds.threshold:
            worst = float(np.max(front.proxy[late]))
            outcome.checks.append(
                CheckResult(check=f"spde_sim.front_negative[theta={front.theta!r}]", value=worst, passed=worst < 0)
            )
    slow, fast = fronts[0], fronts[-1]
    width = 2.0 * math.sqrt(slow.window_stderr**2 + fast.window_stderr**2)
    gap = slow.window_mean - fast.window_mean
    outcome.checks.append(
        CheckResult(
            check="spde_sim.front_separation",
            value=gap,
            reference=tolerances.ci_widths * width,
            passed=bool(gap >= tolerances.ci_widths * width),
        )
    )
    envelope = envelope_check(ensemble, tolerances.envelope_factor * bounds.c_min, se_bands=tolerances.se_bands)
    outcome.checks.append(
        CheckResult(
            check="spde_sim.envelope",
            value=float(envelope.violations),
            reference=0.0,
            passed=envelope.passed,
        )
    )
    return rows


def _fronts(config: ExperimentConfig, output_dir: Path, threads: Optional[int]) -> _Outcome:
    outcome = _Outcome()
    rows = _front_checks(
        config.params, config.grid, config.nonlinearity, config.initial, config, threads, outcome
    )
    outcome.files.append(write_csv(output_dir / "fronts.csv", rows, FRONT_FIELDS))
    return outcome


# ---------------------------------------------------------------------------- verification suites


def _verify_special_fn(config: ExperimentConfig, threads: Optional[int]) -> _Outcome:
    outcome = _Outcome()
    _, violations = _ml_rows(config)
    outcome.checks.append(CheckResult.flag("special_fn.sandwich", violations == 0, value=violations))
    target = _target_rel_err()
    xs = np.geomspace(config.ml.x_min, config.ml.x_max, config.ml.points)
    for beta in config.ml.betas:
        ml = MLParams(beta=beta, target_rel_err=target)
        outcome.checks.append(CheckResult.flag(f"special_fn.zero[beta={beta!r}]", mittag_leffler(ml, 0.0) == 1.0))
        values = np.array([mittag_leffler(ml, -x) for x in xs])
        outcome.checks.append(
            CheckResult.flag(f"special_fn.decreasing[beta={beta!r}]", bool(np.all(np.diff(values) < 0)))
        )
    half = MLParams(beta=0.5, target_rel_err=target)
    worst = max(abs(mittag_leffler(half, -x) / special.erfcx(x) - 1.0) for x in np.geomspace(1e-2, 1e2, 41))
    outcome.checks.append(CheckResult.below("special_fn.half_order", float(worst), 10.0 * target))
    return outcome


def _verify_subordinator(config: ExperimentConfig, threads: Optional[int]) -> _Outcome:
    outcome = _Outcome()
    tolerances = config.tolerances
    for beta in (0.3, 0.5, 0.7):
        p = SubordinatorParams(beta=beta)
        for lam in (0.5, 1.0, 2.0):
            outcome.checks.append(
                CheckResult.compare(
                    f"subordinator.laplace[beta={beta} lambda={lam}]",
                    inverse_subordinator_laplace(p, 1.0, lam),
                    lam ** (beta - 1.0) * math.exp(-(lam**beta)),
                    tolerances.laplace_rel,
                    relative=True,
                )
            )
        for k in (1, 2):
            outcome.checks.append(
                CheckResult.compare(
                    f"subordinator.moment[beta={beta} k={k}]",
                    inverse_subordinator_expectation(p, 1.0, lambda x, k=k: x**k),
                    inverse_subordinator_moment(p, 1.0, k),
                    tolerances.laplace_rel,
                    relative=True,
                )
            )
        outcome.checks.append(
            CheckResult.compare(
                f"subordinator.mgf[beta={beta}]",
                inverse_subordinator_expectation(p, 1.0, lambda x: math.exp(-x)),
                inverse_subordinator_mgf(p, -1.0, 1.0),
                tolerances.laplace_rel,
                relative=True,
            )
        )
        outcome.checks.append(
            CheckResult.compare(
                f"subordinator.stable_mass[beta={beta}]", stable_density_mass(p), 1.0, tolerances.mass_abs
            )
        )
        mass, _ = inverse_subordinator_mass(p)
        outcome.checks.append(
            CheckResult.compare(f"subordinator.clock_mass[beta={beta}]", mass, 1.0, tolerances.mass_abs)
        )
        nonnegative = bool(
            np.all(stable_density_values(beta, np.geomspace(1e-3, 1e3, 200)) >= 0)
            and np.all(unit_clock_density(beta, np.linspace(0.0, 10.0, 200)) >= 0)
        )
        outcome.checks.append(CheckResult.flag(f"subordinator.nonnegative[beta={beta}]", nonnegative))
    return outcome


def _verify_kernel(config: ExperimentConfig, threads: Optional[int]) -> _Outcome:
    outcome = _Outcome()
    tolerances = config.tolerances
    gauss = ModelParams()
    xs = np.linspace(-10.0, 10.0, 200)
    for t in (0.25, 1.0, 4.0):
        exact = np.exp(-(xs**2) / (4.0 * t)) / math.sqrt(4.0 * math.pi * t)
        values = np.array([green_kernel(gauss, t, float(x)) for x in xs])
        outcome.checks.append(
            CheckResult.below(f"kernel.gaussian[t={t}]", float(np.max(np.abs(values - exact))), tolerances.gaussian_abs)
        )
    for t in (0.5, 1.0, 2.0):
        outcome.checks.append(
            CheckResult.compare(
                f"kernel.l2_identity[t={t}]",
                green_l2_norm(gauss, t),
                (8.0 * math.pi * t) ** -0.5,
                tolerances.l2_rel,
                relative=True,
            )
        )
    times = np.geomspace(0.25, 4.0, 9)
    for beta, alpha in ((0.5, 2.0), (0.75, 2.0), (0.5, 1.5)):
        params = ModelParams(beta=beta, alpha=alpha)
        norms = np.array([green_l2_norm(params, float(t)) for t in times])
        slope = float(np.polyfit(np.log(times), np.log(norms), 1)[0])
        label = f"beta={beta} alpha={alpha}"
        outcome.checks.append(
            CheckResult.compare(f"kernel.l2_slope[{label}]", slope, -params.theta, tolerances.slope_abs)
        )
        scaled = norms * times**params.theta
        spread = float(np.ptp(scaled) / np.mean(scaled))
        outcome.checks.append(CheckResult.below(f"kernel.l2_scaling[{label}]", spread, 1e-3))

    params = config.params
    if params.d == 1:
        rng = np.random.default_rng(config.seed)
        worst = 0.0
        valid = True
        for _ in range(tolerances.spectral_samples):
            t, x = float(rng.uniform(0.25, 2.0)), float(rng.uniform(-3.0, 3.0))
            value = green_kernel(params, t, x)
            reference = green_kernel_spectral(params, t, x)
            worst = max(worst, abs(value - reference) / abs(reference))
            valid = valid and value >= 0 and green_kernel(params, t, -x) == value
        outcome.checks.append(CheckResult.below("kernel.spectral_agreement", worst, tolerances.spectral_rel))
        outcome.checks.append(CheckResult.flag("kernel.nonnegative_symmetric", valid))

    for beta in (0.5, 0.75):
        params_beta = ModelParams(beta=beta)
        for lam in (0.5, 1.0):
            for s in (0.5, 1.0):
                outcome.checks.append(
                    CheckResult.compare(
                        f"kernel.exp_moment[beta={beta} lambda={lam} s={s}]",
                        green_exp_moment_quadrature(params_beta, lam, s),
                        green_exp_moment(params_beta, lam, s),
                        tolerances.exp_moment_rel,
                        relative=True,
                    )
                )
        outcome.checks.append(
            CheckResult.below(
                f"kernel.c_star_cap[beta={beta}]", c_star_integral(params_beta), c_star_bound(params_beta)
            )
        )
    if params.alpha == 2.0 and params.d == 1 and params.simulation_admissible:
        _kernel_table_checks(params, config.grid, tolerances, threads, outcome)
    return outcome


def _verify_renewal(config: ExperimentConfig, threads: Optional[int]) -> _Outcome:
    outcome = _Outcome()
    tolerances = config.tolerances
    points = config.renewal.points
    for theta in (0.25, 0.5, 0.75):
        horizon = 8.0 / tilt_constant(1.0, theta)
        problem = RenewalProblem(
            a=Forcing.constant(1.0), b=1.0, theta=theta, t_grid=tuple(np.linspace(horizon / points, horizon, points))
        )
        solution = solve_renewal(problem, scheme=Scheme.EXPONENTIAL)
        outcome.checks.append(
            CheckResult.compare(
                f"renewal.asymptote[theta={theta}]",
                float(solution.tilted[-1]),
                1.0 / (1.0 - theta),
                tolerances.renewal_rel,
                relative=True,
            )
        )
        outcome.checks.append(
            CheckResult.compare(
                f"renewal.tilted_mass[theta={theta}]", tilted_kernel_mass(1.0, theta), 1.0, tolerances.mass_abs
            )
        )
        deviation = float(np.max(np.abs(solve_tilted(problem) / solution.tilted - 1.0)))
        outcome.checks.append(
            CheckResult.below(f"renewal.tilted_equivalence[theta={theta}]", deviation, tolerances.tilted_rel)
        )
        # the rectangle error grows like c·t, so the schemes are compared over a shorter horizon
        short = problem.model_copy(update={"t_grid": tuple(np.linspace(horizon / (4 * points), horizon / 4, points))})
        rectangle = solve_renewal(short).f
        exponential = solve_renewal(short, scheme=Scheme.EXPONENTIAL).f
        outcome.checks.append(
            CheckResult.below(
                f"renewal.scheme_agreement[theta={theta}]",
                float(np.max(np.abs(rectangle / exponential - 1.0))),
                tolerances.renewal_rel,
            )
        )

    settings = config.renewal
    c = tilt_constant(settings.b, settings.theta)
    horizon = 4.0 / c
    times = tuple(np.linspace(horizon / points, horizon, points))
    low = RenewalProblem(a=Forcing.constant(1.0), b=settings.b, theta=settings.theta, t_grid=times)
    high = RenewalProblem(a=Forcing.constant(2.0), b=settings.b, theta=settings.theta, t_grid=times)
    ordered = bool(np.all(solve_renewal(low, refine=False).f <= solve_renewal(high, refine=False).f))
    outcome.checks.append(CheckResult.flag("renewal.forcing_monotone", ordered))

    exact = solve_renewal(low, refine=False).f
    scale = float(np.max(exact))
    for name, start, ordering in (
        ("above", 1.5 * exact, Ordering.SUPERSOLUTION),
        ("below", np.zeros_like(exact), Ordering.SUBSOLUTION),
    ):
        iterates = np.array(picard_iterate(start, low, tolerances.picard_iterations))
        steps = np.diff(iterates, axis=0)
        sign = -1.0 if name == "above" else 1.0
        monotone = bool(np.all(sign * steps >= -_EXACT * scale))
        outcome.checks.append(CheckResult.flag(f"renewal.picard_monotone[{name}]", monotone))
        errors = np.max(np.abs(iterates - exact), axis=1) / scale
        outcome.checks.append(
            CheckResult.below(f"renewal.picard_converged[{name}]", float(errors[-1]), tolerances.picard_sup)
        )
        report = check_supersolution(start, low)
        outcome.checks.append(
            CheckResult.flag(
                f"renewal.comparison[{name}]", report.ordering == ordering and report.comparison_holds
            )
        )
        gamma = picard_gamma(settings.b, settings.theta)
        first = weighted_sup_norm(iterates[1] - exact, np.asarray(times), gamma)
        second = weighted_sup_norm(iterates[2] - exact, np.asarray(times), gamma)
        outcome.diagnostics.append(
            CheckResult(
                check=f"renewal.picard_contraction[{name}]",
                value=second / first if first > 0 else 0.0,
                reference=0.5,
                passed=second <= 0.5 * first + _EXACT * scale,
            )
        )
    return outcome


def _linear_sigma(config: ExperimentConfig) -> NonlinearitySpec:
    sigma = config.nonlinearity
    if sigma.kind == NonlinearityKind.LINEAR and sigma.lam > 0:
        return sigma
    return NonlinearitySpec(lam=1.0)


def _ensemble_checks(ensemble: FieldEnsemble, label: str, tolerances: Tolerances, outcome: _Outcome):
    isometry = isometry_check(ensemble, se_bands=tolerances.se_bands)
    outcome.checks.append(
        CheckResult(
            check=f"spde_sim.isometry[{label}]",
            value=isometry.estimate,
            reference=isometry.expected,
            tolerance=tolerances.se_bands * isometry.stderr,
            passed=isometry.passed,
        )
    )
    energy = l2_energy_check(ensemble, tolerances.epsilon, se_bands=tolerances.se_bands)
    outcome.checks.append(CheckResult.flag(f"spde_sim.l2_energy[{label}]", energy.passed, value=energy.rate))
    final = ensemble.fields[:, -1, :]
    mean = float(np.mean(final))
    stderr = 0.0
    if ensemble.replicas > 1:
        stderr = float(np.std(np.mean(final, axis=1), ddof=1) / math.sqrt(ensemble.replicas))
    outcome.checks.append(
        CheckResult.compare(f"spde_sim.mean[{label}]", mean, 1.0, tolerances.se_bands * stderr + _EXACT)
    )


def _growth_checks(
    ensemble: FieldEnsemble, cells: Sequence[int], label: str, tolerances: Tolerances, outcome: _Outcome
):
    t_max = ensemble.grid.t_max
    window = (0.5 * t_max, t_max)
    fitted = estimate_lyapunov(moment_curve(ensemble, 2, cells), window=window)
    bound = lower_bound_rate(ensemble.params, ensemble.sigma.cone)
    outcome.checks.append(
        CheckResult(
            check=f"spde_sim.lyapunov_lower_bound[{label}]",
            value=fitted.rate,
            reference=bound,
            tolerance=tolerances.lower_bound_frac * bound,
            passed=fitted.rate >= (1.0 - tolerances.lower_bound_frac) * bound,
        )
    )
    convexity = convexity_diagnostic(
        {p: moment_curve(ensemble, p, cells) for p in (2, 4, 6)}, window=window, se_bands=tolerances.se_bands
    )
    outcome.diagnostics.append(CheckResult.flag("spde_sim.convexity", convexity.convex))
    outcome.diagnostics.append(CheckResult.flag("spde_sim.ratio_nondecreasing", convexity.ratio_nondecreasing))


def _verify_spde_sim(config: ExperimentConfig, threads: Optional[int]) -> _Outcome:
    outcome = _Outcome()
    tolerances = config.tolerances
    unit = ModelParams()
    outcome.checks.append(CheckResult.compare("spde_sim.lower_bound_rate", lower_bound_rate(unit, 1.0), 0.125, _EXACT))
    outcome.checks.append(
        CheckResult.compare(
            "spde_sim.weighted_young", weighted_young_constant(1.0, 1.0, 1.0, 2.0), math.pi**-0.25, _EXACT
        )
    )
    for beta in (0.5, 0.75, 1.0):
        outcome.checks.append(
            CheckResult.compare(
                f"spde_sim.corollary_constant[beta={beta}]",
                weighted_young_constant(beta, 1.0, 1.0, 2.0 ** (1.0 / beta)),
                corollary_constant(beta, 1.0, 1.0),
                _EXACT,
                relative=True,
            )
        )
    outcome.checks.append(
        CheckResult.compare(
            "spde_sim.front_threshold",
            front_bounds(unit, NonlinearitySpec(lam=1.0)).threshold,
            2.0 / math.sqrt(math.pi),
            _EXACT,
        )
    )

    grid = config.grid.model_copy(update={"boundary_policy": BoundaryPolicy.PERIODIC})
    cells = _interior_cells(grid)
    for beta in (1.0, 0.75, 0.5):
        params = config.params.model_copy(update={"beta": beta, "alpha": 2.0, "d": 1})
        table = build_kernel_table(params, grid.dt, grid.dx, grid.nt, grid.nx, threads=threads)
        for lam in (0.5, 1.0):
            case = NonlinearitySpec(lam=lam)
            label = f"beta={beta},lambda={lam}"
            ensemble = simulate(
                params, grid, np.ones(grid.nx), case, config.seed, config.replicas, threads, cells=cells, table=table
            )
            _oracle_checks(ensemble, cells, label, tolerances.se_bands, outcome)
            _ensemble_checks(ensemble, label, tolerances, outcome)
            if beta == 1.0 and lam == 1.0:
                _growth_checks(ensemble, cells, label, tolerances, outcome)
                adapted = adaptedness_check(ensemble, grid.nt // 2, threads=threads, table=table)
                outcome.checks.append(
                    CheckResult.flag(f"spde_sim.adaptedness[{label}]", adapted.passed, value=adapted.level)
                )

    sigma = _linear_sigma(config)
    front_params = config.params.model_copy(update={"beta": 0.5, "alpha": 2.0, "d": 1})
    front_grid = config.grid.model_copy(update={"boundary_policy": BoundaryPolicy.ZERO_PADDED})
    initial = InitialCondition(kind=InitialKind.INDICATOR, half_width=1.0)
    _front_checks(front_params, front_grid, sigma, initial, config, threads, outcome)

    region = region_indicator_check(config.grid, 1.0, seed=config.seed)
    outcome.checks.append(CheckResult.flag("spde_sim.region_covering", region.passed, value=region.union_violations))
    outcome.diagnostics.append(
        CheckResult.flag("spde_sim.region_product", region.product_violations == 0, value=region.product_violations)
    )
    streams = max(2, min(config.replicas, _CORRELATION_STREAMS))
    correlation = replica_correlation(config.seed, streams, _CORRELATION_DRAWS)
    outcome.checks.append(
        CheckResult.below(
            "spde_sim.replica_independence", correlation, correlation_limit(streams, _CORRELATION_DRAWS)
        )
    )
    return outcome


_COMMANDS: Dict[Command, Callable[[ExperimentConfig, Path, Optional[int]], _Outcome]] = {
    Command.ML: _ml,
    Command.KERNEL: _kernel,
    Command.RENEWAL: _renewal,
    Command.SIMULATE: _simulate,
    Command.FRONTS: _fronts,
}

_SUITES: Dict[Suite, Callable[[ExperimentConfig, Optional[int]], _Outcome]] = {
    Suite.SPECIAL_FN: _verify_special_fn,
    Suite.SUBORDINATOR: _verify_subordinator,
    Suite.KERNEL: _verify_kernel,
    Suite.RENEWAL: _verify_renewal,
    Suite.SPDE_SIM: _verify_spde_sim,
}

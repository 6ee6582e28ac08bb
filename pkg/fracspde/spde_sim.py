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
Monte Carlo Simulation Of The Stochastic Time-Fractional Heat Equation.

The mild solution

    u_t(x) = (G_t * u_0)(x) + ∫_0^t ∫ G_{t-s}(x-y) σ(u_s(y)) W(ds dy)

is simulated for ``d = 1`` and ``α = 2`` on a :any:`SpaceTimeGrid`. Besides the simulator this module
estimates moments, Lyapunov exponents, weighted norms and intermittency fronts and evaluates the closed-form
rates and bounds those estimates are compared against.

>>> round(lower_bound_rate(ModelParams(), 1.0), 12)
0.125
>>> round(weighted_young_constant(1.0, 1.0, 1.0, 2.0), 7)
0.7511255
"""

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Iterator, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import ConfigDict
from scipy import fft

from ._basemodel import BaseModel
from ._quadrature import checked_quad, panel_rule
from ._util import LOGGER, readonly
from .appconfig import AppConfig
from .const import GRID_TAIL_LIMIT
from .datamodel import BoundaryPolicy, ModelParams, NonlinearityKind, NonlinearitySpec, SpaceTimeGrid
from .exceptions import DivergenceError, DomainError, EstimationError, TruncationError, UnsupportedConfigurationError
from .kernel import KernelTable, build_kernel_table, c_star, green_kernel_values, kernel_tail_mass
from .renewal import Forcing, RenewalProblem, RenewalSolution, solve_renewal

Region = Union[int, Sequence[int]]

SEED_LINEAGE = "numpy.random.SeedSequence(seed, spawn_key=(replica,))"
"""Derivation of the noise stream of every replica, echoed into manifests."""

_REPLICA_CHUNK = 64
_MIN_FIT_POINTS = 5
_SLACK = 1e-9
_UNIT_PANELS = 64
_UNIT_WIDTH = 40.0


def _check_simulation(what: str, params: ModelParams):
    if params.alpha != 2.0 or params.d != 1:
        raise DomainError(what, params, "requires alpha=2 and d=1")


def _replica_rng(seed: int, replica: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(replica,)))


class FieldEnsemble:
    """
    Simulated Replicas Of The Mild Solution.

    All arrays are read-only.

    Attributes:
        fields: ``(replicas, nt+1, cells)`` field values. Level 0 is the initial data.
        cells: Recorded cell indices.
        deterministic: ``(nt+1, nx)`` noise-free part ``G_t * u0``.
        noise_variance: ``(nt,)`` L² mass of the kernel over the time cells ``((n-1)dt, n dt]``.
        step_variance: ``(nx,)`` variance of the first stochastic increment per unit ``σ²``.
        energy: ``(replicas, nt+1)`` squared L² norm of every replica over the whole domain.
    """

    def __init__(
        self,
        params: ModelParams,
        grid: SpaceTimeGrid,
        sigma: NonlinearitySpec,
        u0: np.ndarray,
        seed: int,
        fields: np.ndarray,
        cells: np.ndarray,
        deterministic: np.ndarray,
        noise_variance: np.ndarray,
        step_variance: np.ndarray,
        energy: np.ndarray,
    ):
        self.params = params
        self.grid = grid
        self.sigma = sigma
        self.seed = seed
        self.u0 = readonly(u0)
        self.fields = readonly(fields)
        self.cells = np.array(cells, dtype=int)
        self.cells.flags.writeable = False
        self.deterministic = readonly(deterministic)
        self.noise_variance = readonly(noise_variance)
        self.step_variance = readonly(step_variance)
        self.energy = readonly(energy)

    @property
    def replicas(self) -> int:
        """Number of replicas."""
        return self.fields.shape[0]

    @property
    def times(self) -> np.ndarray:
        """Time levels."""
        return self.grid.times()

    @property
    def x(self) -> np.ndarray:
        """Centers of the recorded cells."""
        return self.grid.centers()[self.cells]

    def positions(self, x: Region) -> np.ndarray:
        """Positions of the grid cells ``x`` within :any:`cells`."""
        wanted = np.atleast_1d(np.asarray(x, dtype=int))
        if wanted.size == 0:
            raise EstimationError("FieldEnsemble", "empty region")
        positions = np.searchsorted(self.cells, wanted)
        positions = np.minimum(positions, self.cells.size - 1)
        if np.any(self.cells[positions] != wanted):
            raise EstimationError("FieldEnsemble", f"cells {wanted.tolist()} are not all recorded")
        return positions

    def second_moment(self) -> Tuple[np.ndarray, np.ndarray]:
        """Replica mean of ``u²`` per level and recorded cell, with jackknife standard error."""
        return _jackknife(np.square(self.fields))

    def __repr__(self):
        return (
            f"FieldEnsemble({self.params!r}, {self.grid!r}, {self.sigma!r}, seed={self.seed}, "
            f"replicas={self.replicas}, cells={self.cells.size})"
        )


class _ConvolutionPlan:
    """Spatial convolution with a symmetric kernel by real FFT, circular or zero-padded."""

    def __init__(self, grid: SpaceTimeGrid):
        nx = grid.nx
        self.nx = nx
        if grid.boundary_policy == BoundaryPolicy.PERIODIC:
            self.size = nx
            self.offsets = np.arange(-(nx // 2), nx - nx // 2)
        else:
            self.size = fft.next_fast_len(2 * nx - 1, real=True)
            self.offsets = np.arange(-(nx - 1), nx)
        self.index = self.offsets % self.size

    def used(self, row: np.ndarray) -> np.ndarray:
        """Entries of the nonnegative-offset ``row`` at the offsets the plan uses."""
        return row[np.abs(self.offsets)]

    def spectrum(self, row: np.ndarray, scale: float = 1.0) -> np.ndarray:
        kernel = np.zeros(self.size)
        kernel[self.index] = scale * self.used(row)
        return fft.rfft(kernel)

    def forward(self, values: np.ndarray) -> np.ndarray:
        return fft.rfft(values, n=self.size, axis=-1)

    def backward(self, spectrum: np.ndarray) -> np.ndarray:
        return fft.irfft(spectrum, n=self.size, axis=-1)[..., : self.nx]


def _noise_variance(table: KernelTable, params: ModelParams) -> np.ndarray:
    theta = params.theta
    dt = table.dt
    constant = float(table.l2_row[0]) * dt**theta
    levels = np.arange(table.nt + 1) * dt
    return constant * np.diff(levels ** (1.0 - theta)) / (1.0 - theta)


def _noise_spectra(plan: _ConvolutionPlan, table: KernelTable, variance: np.ndarray) -> np.ndarray:
    spectra = []
    for row, mass in zip(table.values, variance):
        energy = float(np.sum(np.square(plan.used(row))))
        spectra.append(plan.spectrum(row, math.sqrt(mass / energy)))
    return np.array(spectra)


def _deterministic(plan: _ConvolutionPlan, table: KernelTable, u0: np.ndarray, periodic: bool) -> np.ndarray:
    levels = table.nt + 1
    if np.all(u0 == u0[0]):
        # G_t has mass one on the line
        return np.tile(u0, (levels, 1))
    initial = plan.forward(u0)
    rows = [u0]
    for mass, total in zip(table.cell_mass, table.mass_row):
        norm = float(np.sum(plan.used(mass))) if periodic else float(total)
        rows.append(plan.backward(plan.spectrum(mass, 1.0 / norm) * initial))
    return np.array(rows)


def _first_step(plan: _ConvolutionPlan, table: KernelTable, variance: np.ndarray) -> np.ndarray:
    """Spectrum of the squared first-level profile convolved with the domain indicator."""
    row = table.values[0]
    energy = float(np.sum(np.square(plan.used(row))))
    squared = plan.spectrum(np.square(row), variance[0] / energy)
    return squared * plan.forward(np.ones(plan.nx))


def _simulate_chunk(
    chunk: range,
    seed: int,
    sigma: NonlinearitySpec,
    plan: _ConvolutionPlan,
    deterministic: np.ndarray,
    spectra: np.ndarray,
    cells: np.ndarray,
    dx: float,
    noise_levels: int,
) -> Tuple[np.ndarray, np.ndarray]:
    nt = spectra.shape[0]
    count = len(chunk)
    noise = np.stack([_replica_rng(seed, replica).standard_normal((nt, plan.nx)) for replica in chunk])
    # the full stream is drawn first, truncation must not shift later draws
    noise[:, noise_levels:] = 0.0
    fields = np.empty((count, nt + 1, cells.size))
    history = np.empty((count, nt, spectra.shape[1]), dtype=complex)
    current = np.tile(deterministic[0], (count, 1))
    energy = np.empty((count, nt + 1))
    fields[:, 0] = current[:, cells]
    energy[:, 0] = np.sum(np.square(current), axis=1) * dx
    for level in range(1, nt + 1):
        # σ is taken at the previous level, the history sum pairs level l with kernel row level-l
        history[:, level - 1] = plan.forward(sigma.sigma(current) * noise[:, level - 1])
        stochastic = np.einsum("rlf,lf->rf", history[:, :level], spectra[level - 1 :: -1])
        current = deterministic[level] + plan.backward(stochastic)
        fields[:, level] = current[:, cells]
        energy[:, level] = np.sum(np.square(current), axis=1) * dx
    return fields, energy


def simulate(
    params: ModelParams,
    grid: SpaceTimeGrid,
    u0: np.ndarray,
    sigma: NonlinearitySpec,
    seed: int,
    replicas: int,
    threads: Optional[int] = None,
    cells: Optional[Sequence[int]] = None,
    table: Optional[KernelTable] = None,
    noise_levels: Optional[int] = None,
) -> FieldEnsemble:
    """
    Simulate ``replicas`` independent copies of the mild solution.

    The deterministic part is the kernel-table convolution of ``u0`` with normalized cell masses.
    The stochastic part sums the whole history: the increment of level ``l`` enters level ``m`` through the
    kernel profile of ``(m-l)·dt``, scaled so that its squared sum equals the exact L² mass of the kernel over
    that time cell. ``σ`` is evaluated at the earlier level, so level ``m`` only depends on the noise of the
    levels below ``m``.

    Replica ``r`` draws its noise from ``SeedSequence(seed, spawn_key=(r,))``. Replicas are processed in fixed
    batches, concurrently up to the ``threads`` option, so results do not depend on the worker count.

    Args:
        params: Equation parameters, ``α = 2`` and ``d = 1``.
        grid: Lattice.
        u0: Initial cell values.
        sigma: Noise coefficient.
        seed: Seed in ``[0, 2**64)``.
        replicas: Number of replicas.

    Keyword Args:
        threads: Worker cap.
        cells: Recorded cells, all by default.
        table: Precomputed kernel table matching ``grid``.
        noise_levels: Keep the noise of the first ``noise_levels`` time steps only and set the rest to zero.
            The draws are unchanged, so levels ``0..noise_levels`` match the untruncated run bit for bit.

    Raises:
        DomainError: Parameters, initial data, seed or ``noise_levels`` outside their domain.
        TruncationError: More than ``1e-3`` of the kernel mass leaves the domain at ``t_max``.
    """
    _check_simulation("simulate", params)
    u0 = np.asarray(u0, dtype=float)
    if u0.shape != (grid.nx,) or not np.all(np.isfinite(u0)):
        raise DomainError("simulate", u0.shape, f"requires {grid.nx} finite initial values")
    if not 0 <= seed < 2**64:
        raise DomainError("simulate", seed, "seed must be a 64-bit unsigned integer")
    if replicas < 1:
        raise DomainError("simulate", replicas, "requires at least one replica")
    if noise_levels is None:
        noise_levels = grid.nt
    elif not 0 <= noise_levels <= grid.nt:
        raise DomainError("simulate", noise_levels, f"noise_levels must lie in 0..{grid.nt}")
    tail = kernel_tail_mass(params, grid.t_max, 0.5 * grid.length)
    if tail > GRID_TAIL_LIMIT:
        raise TruncationError("simulate", tail, GRID_TAIL_LIMIT, "Widen the spatial domain.")
    recorded = np.arange(grid.nx) if cells is None else np.unique(np.asarray(cells, dtype=int))
    if recorded.size == 0 or recorded[0] < 0 or recorded[-1] >= grid.nx:
        raise DomainError("simulate", cells, f"recorded cells must lie in 0..{grid.nx - 1}")
    if table is None:
        table = build_kernel_table(params, grid.dt, grid.dx, grid.nt, grid.nx, threads=threads)
    elif table.nt != grid.nt or table.nx != grid.nx or table.dt != grid.dt or table.dx != grid.dx:
        raise DomainError("simulate", table, "kernel table does not match the grid")

    plan = _ConvolutionPlan(grid)
    periodic = grid.boundary_policy == BoundaryPolicy.PERIODIC
    deterministic = _deterministic(plan, table, u0, periodic)
    variance = _noise_variance(table, params)
    spectra = _noise_spectra(plan, table, variance)
    step_variance = plan.backward(_first_step(plan, table, variance))

    if sigma.is_zero:
        LOGGER.info("simulate: sigma vanishes, %d replicas are deterministic", replicas)
        fields = np.tile(deterministic[:, recorded], (replicas, 1, 1))
        energy = np.tile(np.sum(np.square(deterministic), axis=1) * grid.dx, (replicas, 1))
    else:
        workers = AppConfig().threads(threads)
        chunks = [range(start, min(start + _REPLICA_CHUNK, replicas)) for start in range(0, replicas, _REPLICA_CHUNK)]
        LOGGER.info("simulate: %d replicas in %d batches with %d threads", replicas, len(chunks), workers)
        with ThreadPoolExecutor(max_workers=workers) as executor:
            parts = list(
                executor.map(
                    lambda chunk: _simulate_chunk(
                        chunk, seed, sigma, plan, deterministic, spectra, recorded, grid.dx, noise_levels
                    ),
                    chunks,
                )
            )
        fields = np.concatenate([part[0] for part in parts])
        energy = np.concatenate([part[1] for part in parts])
    return FieldEnsemble(
        params, grid, sigma, u0, seed, fields, recorded, deterministic, variance, step_variance, energy
    )


def _jackknife(values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Replica mean along axis 0 with its leave-one-out standard error."""
    count = values.shape[0]
    total = np.sum(values, axis=0)
    mean = total / count
    if count < 2:
        return mean, np.full_like(mean, math.nan)
    leave_one_out = (total - values) / (count - 1)
    spread = np.sum(np.square(leave_one_out - np.mean(leave_one_out, axis=0)), axis=0)
    return mean, np.sqrt((count - 1) / count * spread)


def _check_order(what: str, p: int):
    if p < 2 or p % 2:
        raise DomainError(what, p, "moment order must be an even integer >= 2")


def _describe(e: FieldEnsemble, x: Region) -> str:
    wanted = np.atleast_1d(np.asarray(x, dtype=int))
    centers = e.grid.centers()
    if wanted.size == 1:
        return repr(float(centers[wanted[0]]))
    return f"region[{float(centers[wanted.min()])!r}:{float(centers[wanted.max()])!r}]"


def _moment_samples(e: FieldEnsemble, p: int, x: Region) -> np.ndarray:
    positions = e.positions(x)
    return np.mean(np.abs(e.fields[:, :, positions]) ** p, axis=2)


class MomentPoint(BaseModel):
    """Moment Estimate At One Level."""

    t: float
    x: str
    p: int
    estimate: float
    stderr: float
    replicas: int


class MomentCurve(BaseModel):
    """
    Moment Estimates Over Time.

    Attributes:
        t: Times.
        x: Cell center or region descriptor.
        p: Moment order.
        estimate: Replica averages of ``|u|^p``.
        stderr: Jackknife standard errors.
        replicas: Number of replicas.
        seed: Simulation seed.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    t: np.ndarray
    x: str
    p: int
    estimate: np.ndarray
    stderr: np.ndarray
    replicas: int
    seed: Optional[int] = None

    @staticmethod
    def from_values(t, estimate, stderr=None, p: int = 2, x: str = "exact") -> "MomentCurve":
        """
        Curve from known values, for instance a renewal solution.

        >>> MomentCurve.from_values([1.0, 2.0], [1.0, 1.0]).stderr
        array([0., 0.])
        """
        estimate = np.asarray(estimate, dtype=float)
        stderr = np.zeros_like(estimate) if stderr is None else np.asarray(stderr, dtype=float)
        return MomentCurve(t=np.asarray(t, dtype=float), x=x, p=p, estimate=estimate, stderr=stderr, replicas=0)

    def records(self) -> Iterator[dict]:
        """Rows ``t, x, p, estimate, stderr, replicas, seed`` for export."""
        for t, estimate, stderr in zip(self.t, self.estimate, self.stderr):
            yield {
                "t": float(t),
                "x": self.x,
                "p": self.p,
                "estimate": float(estimate),
                "stderr": float(stderr),
                "replicas": self.replicas,
                "seed": self.seed,
            }


def estimate_moment(e: FieldEnsemble, p: int, t: int, x: Region) -> MomentPoint:
    """
    Replica average of ``|u(t, x)|^p`` with jackknife standard error.

    Args:
        e: Ensemble.
        p: Even moment order.
        t: Time level.
        x: Cell index, or a sequence of cell indices whose spatial average is estimated.

    Raises:
        DomainError: Odd order or level outside the grid.
        EstimationError: Empty region or unrecorded cells.
    """
    _check_order("estimate_moment", p)
    if not 0 <= t <= e.grid.nt:
        raise DomainError("estimate_moment", t, f"time level must lie in 0..{e.grid.nt}")
    mean, stderr = _jackknife(_moment_samples(e, p, x)[:, t])
    return MomentPoint(
        t=float(e.times[t]),
        x=_describe(e, x),
        p=p,
        estimate=float(mean),
        stderr=float(stderr),
        replicas=e.replicas,
    )


def moment_curve(e: FieldEnsemble, p: int, x: Region) -> MomentCurve:
    """:any:`estimate_moment` at every level."""
    _check_order("moment_curve", p)
    mean, stderr = _jackknife(_moment_samples(e, p, x))
    return MomentCurve(
        t=e.times, x=_describe(e, x), p=p, estimate=mean, stderr=stderr, replicas=e.replicas, seed=e.seed
    )


def second_moment_renewal(
    params: ModelParams, sigma: NonlinearitySpec, u0_const: Union[float, np.ndarray], t_grid: Sequence[float]
) -> RenewalSolution:
    """
    Exact second moment for ``σ(u) = λu`` and constant initial data.

    ``E|u_t(x)|²`` does not depend on ``x`` and solves ``f(t) = u0² + C*λ² ∫_0^t f(s)(t-s)^{-βd/α} ds``.

    Raises:
        UnsupportedConfigurationError: Non-constant ``u0`` or nonlinear ``σ``.
    """
    if sigma.kind != NonlinearityKind.LINEAR:
        raise UnsupportedConfigurationError("second_moment_renewal", "requires sigma(u) = lambda u")
    values = np.atleast_1d(np.asarray(u0_const, dtype=float))
    if np.any(values != values[0]):
        raise UnsupportedConfigurationError("second_moment_renewal", "requires constant initial data")
    u0 = float(values[0])
    b = c_star(params) * sigma.lam**2 if sigma.lam else 0.0
    problem = RenewalProblem(
        a=Forcing.constant(u0**2), b=b, theta=params.theta, t_grid=tuple(float(t) for t in t_grid)
    )
    return solve_renewal(problem)


class LyapunovEstimate(BaseModel):
    """
    Fitted Growth Rate Of A Log-Moment.

    Attributes:
        rate: Least-squares slope of ``log E|u|^p`` over the window.
        stderr: Standard error propagated from the moment standard errors.
        intercept: Fitted intercept.
        window: Time window of the fit.
        points: Number of fitted points.
        sensitivity: Slope over the second half of the window minus ``rate``.
    """

    rate: float
    stderr: float
    intercept: float
    window: Tuple[float, float]
    points: int
    sensitivity: float


def _slope(times: np.ndarray, logs: np.ndarray) -> Tuple[float, np.ndarray]:
    centered = times - np.mean(times)
    coefficients = centered / np.sum(np.square(centered))
    return float(coefficients @ logs), coefficients


def estimate_lyapunov(curve: MomentCurve, window: Optional[Tuple[float, float]] = None) -> LyapunovEstimate:
    """
    Growth rate of ``log E|u_t|^p`` by least squares.

    Args:
        curve: Moment curve.

    Keyword Args:
        window: Fit window, the final tenth of the horizon by default.

    Raises:
        EstimationError: Fewer than 5 points in the window or nonpositive moments.

    >>> curve = MomentCurve.from_values(np.linspace(0, 10, 101), np.exp(0.25 * np.linspace(0, 10, 101)))
    >>> round(estimate_lyapunov(curve).rate, 10)
    0.25
    """
    t = np.asarray(curve.t, dtype=float)
    if window is None:
        window = (t[0] + 0.9 * (t[-1] - t[0]), float(t[-1]))
    lower, upper = window
    mask = (t >= lower - _SLACK * abs(lower)) & (t <= upper + _SLACK * abs(upper))
    if np.count_nonzero(mask) < _MIN_FIT_POINTS:
        raise EstimationError("estimate_lyapunov", f"fewer than {_MIN_FIT_POINTS} points in window {window!r}")
    estimate = curve.estimate[mask]
    if np.any(estimate <= 0):
        raise EstimationError("estimate_lyapunov", f"nonpositive moment estimates in window {window!r}")
    times = t[mask]
    logs = np.log(estimate)
    rate, coefficients = _slope(times, logs)
    relative = np.nan_to_num(curve.stderr[mask] / estimate)
    stderr = float(np.sqrt(np.sum(np.square(coefficients * relative))))
    half = times.size // 2
    sensitivity = _slope(times[half:], logs[half:])[0] - rate if times.size - half >= 3 else math.nan
    LOGGER.debug("estimate_lyapunov: rate %r +- %r over %r", rate, stderr, window)
    return LyapunovEstimate(
        rate=rate,
        stderr=stderr,
        intercept=float(np.mean(logs) - rate * np.mean(times)),
        window=(float(lower), float(upper)),
        points=int(times.size),
        sensitivity=sensitivity,
    )


def lower_bound_rate(params: ModelParams, L_sigma: float) -> float:
    """
    Lower bound ``[C* L_σ² Γ(1-βd/α)]^{1/(1-βd/α)}`` of the second-moment Lyapunov exponent.

    Raises:
        DomainError: ``d ≥ 2α``, ``βd/α ≥ 1`` or negative ``L_sigma``.
    """
    theta = params.theta
    if not params.l2_admissible or theta >= 1:
        raise DomainError("lower_bound_rate", params, "requires d < 2 alpha and beta d / alpha < 1")
    if L_sigma < 0:
        raise DomainError("lower_bound_rate", L_sigma, "requires L_sigma >= 0")
    if L_sigma == 0:
        return 0.0
    return (c_star(params) * L_sigma**2 * math.gamma(1.0 - theta)) ** (1.0 / (1.0 - theta))


def weighted_norm(e: FieldEnsemble, gamma: float, c: float) -> float:
    """``sup_{t,x} [exp(-γt + cx) E|u_t(x)|²]^{1/2}`` over the recorded lattice."""
    if gamma <= 0:
        raise DomainError("weighted_norm", gamma, "requires gamma > 0")
    moment, _ = e.second_moment()
    weights = np.exp(-gamma * e.times[:, None] + c * e.x[None, :])
    return math.sqrt(float(np.max(weights * moment)))


def _check_rate_args(what: str, beta: float, nu: float):
    if not 0 < beta <= 1 or nu <= 0:
        raise DomainError(what, (beta, nu), "requires 0 < beta <= 1 and nu > 0")


def weighted_young_constant(beta: float, nu: float, c: float, gamma: float) -> float:
    """
    Constant ``C(c, γ, β)`` of the weighted Young inequality.

    ``sqrt(2^{β/2-1} / (√ν Γ(1-β/2) γ^{1-β/2}) / (1 - νc²γ^{-β}))``

    Raises:
        DivergenceError: ``γ^β ≤ νc²``.
    """
    _check_rate_args("weighted_young_constant", beta, nu)
    if gamma <= 0:
        raise DomainError("weighted_young_constant", gamma, "requires gamma > 0")
    ratio = nu * c**2 * gamma**-beta
    if ratio >= 1:
        raise DivergenceError("weighted_young_constant", (nu * c**2) ** (1.0 / beta), "requires gamma^beta > nu c^2")
    base = 2.0 ** (0.5 * beta - 1.0) / (math.sqrt(nu) * math.gamma(1.0 - 0.5 * beta) * gamma ** (1.0 - 0.5 * beta))
    return math.sqrt(base / (1.0 - ratio))


def corollary_constant(beta: float, nu: float, c: float) -> float:
    """
    :any:`weighted_young_constant` at ``γ = (2νc²)^{1/β}``.

    >>> math.isclose(corollary_constant(0.5, 1.0, 1.0), weighted_young_constant(0.5, 1.0, 1.0, 4.0))
    True
    """
    _check_rate_args("corollary_constant", beta, nu)
    if c <= 0:
        raise DomainError("corollary_constant", c, "requires c > 0")
    radicand = 2.0 ** (0.5 * beta + 0.5 - 1.0 / beta) / (
        nu ** (1.0 / beta) * math.gamma(1.0 - 0.5 * beta) * c ** (2.0 / beta - 1.0)
    )
    return math.sqrt(radicand)


def admissible_c0(beta: float, nu: float) -> float:
    """
    ``c₀ = sqrt(2^{β/2+1/2-1/β} / (ν^{1/β} Γ(1-β/2)))``.
    Rates ``c`` with ``c^{1/β-1/2} > Lip_σ c₀`` are admissible.

    >>> round(admissible_c0(1.0, 1.0), 7)
    0.7511255
    """
    _check_rate_args("admissible_c0", beta, nu)
    return math.sqrt(2.0 ** (0.5 * beta + 0.5 - 1.0 / beta) / (nu ** (1.0 / beta) * math.gamma(1.0 - 0.5 * beta)))


def smallest_admissible_c(beta: float, nu: float, lip: float) -> float:
    """
    Infimum ``(Lip_σ c₀)^{2β/(2-β)}`` of the admissible envelope rates.

    >>> round(smallest_admissible_c(1.0, 1.0, 1.0), 7)
    0.5641896
    """
    return (lip * admissible_c0(beta, nu)) ** (2.0 * beta / (2.0 - beta))


class EnvelopeReport(BaseModel):
    """
    Result of :any:`envelope_check`.

    Attributes:
        c: Envelope rate.
        c_min: Smallest admissible rate.
        growth: Temporal growth ``(2νc²)^{1/β}``.
        a_fit: Envelope constant.
        cells: Number of checked lattice points.
        violations: Lattice points above the envelope beyond the Monte Carlo band.
        fraction: Fraction of lattice points below the envelope.
        failing: First failing ``(t, x)``.
    """

    c: float
    c_min: float
    growth: float
    a_fit: float
    cells: int
    violations: int
    fraction: float
    failing: Tuple[Tuple[float, float], ...] = ()

    @property
    def passed(self) -> bool:
        """No violations."""
        return self.violations == 0


def _check_front_hypotheses(what: str, e: FieldEnsemble):
    if not e.sigma.vanishes_at_zero:
        raise DomainError(what, e.sigma, "requires sigma(0) = 0")
    if e.u0[0] != 0 or e.u0[-1] != 0:
        raise DomainError(what, "u0", "requires compactly supported initial data")


def envelope_check(e: FieldEnsemble, c: float, a_fit: Optional[float] = None, se_bands: float = 3.0) -> EnvelopeReport:
    """
    Compare ``E|u_t(x)|²`` against ``A exp(-c|x| + (2νc²)^{1/β} t)``.

    ``a_fit`` defaults to the smallest constant satisfying the envelope at ``t = 0``.

    Raises:
        DomainError: Inadmissible ``c`` (the threshold is part of the message), ``σ(0) ≠ 0``
            or initial data not vanishing at the domain ends.
    """
    _check_front_hypotheses("envelope_check", e)
    beta, nu = e.params.beta, e.params.nu
    c_min = smallest_admissible_c(beta, nu, e.sigma.lipschitz)
    if not c > c_min:
        raise DomainError("envelope_check", c, f"requires c > {c_min!r}")
    growth = (2.0 * nu * c**2) ** (1.0 / beta)
    if a_fit is None:
        a_fit = float(np.max(np.square(e.u0) * np.exp(c * np.abs(e.grid.centers()))))
    moment, stderr = e.second_moment()
    bound = a_fit * np.exp(-c * np.abs(e.x)[None, :] + growth * e.times[:, None])
    excess = moment - se_bands * np.nan_to_num(stderr) > bound * (1.0 + _SLACK)
    levels, positions = np.nonzero(excess)
    failing = tuple((float(e.times[m]), float(e.x[j])) for m, j in zip(levels[:20], positions[:20]))
    violations = int(levels.size)
    if violations:
        LOGGER.info("envelope_check: %d cells above the envelope, first at %r", violations, failing[0])
    return EnvelopeReport(
        c=c,
        c_min=c_min,
        growth=growth,
        a_fit=a_fit,
        cells=int(excess.size),
        violations=violations,
        fraction=1.0 - violations / excess.size,
        failing=failing,
    )


class FrontEstimate(BaseModel):
    """
    Finite-Time Front Proxy.

    Attributes:
        theta: Speed.
        t: Times above 0.
        proxy: ``(1/t) log sup_{|x|>θt} E|u_t(x)|²``.
        window: Start of the averaging window.
        window_mean: Proxy averaged over the window.
        window_stderr: Jackknife standard error of ``window_mean``.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    theta: float
    t: np.ndarray
    proxy: np.ndarray
    window: float
    window_mean: float
    window_stderr: float

    def records(self) -> Iterator[dict]:
        """Rows ``theta, t, proxy`` for export."""
        for t, proxy in zip(self.t, self.proxy):
            yield {"theta": self.theta, "t": float(t), "proxy": float(proxy)}


def estimate_front(e: FieldEnsemble, theta: float, window: float = 0.5) -> FrontEstimate:
    """
    Front proxy of ``lim sup (1/t) sup_{|x|>θt} log E|u_t(x)|²`` at every level above 0.

    The limit itself is never claimed, the final ``window`` fraction of the horizon is averaged instead.

    Raises:
        TruncationError: ``{|x| > θt}`` holds no recorded cell at some level.
        EstimationError: A level has no positive second moment, or leave-one-out moment, beyond ``θt``.
    """
    if theta < 0:
        raise DomainError("estimate_front", theta, "requires theta >= 0")
    _check_front_hypotheses("estimate_front", e)
    times = e.times[1:]
    distance = np.abs(e.x)
    squares = np.square(e.fields[:, 1:])
    count = e.replicas
    total = np.sum(squares, axis=0)
    moment = total / count
    in_window = times >= (1.0 - window) * e.grid.t_max - _SLACK
    proxy = np.empty(times.size)
    leave_one_out = np.zeros(count)
    with np.errstate(divide="ignore", invalid="ignore"):
        for level, t in enumerate(times):
            region = distance > theta * t
            if not np.any(region):
                raise TruncationError(
                    "estimate_front", float(theta * t), float(distance.max()), "Region |x| > theta t leaves the domain."
                )
            peak = np.max(moment[level, region])
            reduced = None
            if in_window[level] and count > 1:
                reduced = np.max((total[level, region] - squares[:, level, region]) / (count - 1), axis=1)
            if peak <= 0 or (reduced is not None and np.any(reduced <= 0)):
                raise EstimationError(
                    "estimate_front", f"no positive second moment beyond theta t at level {level + 1}"
                )
            proxy[level] = np.log(peak) / t
            if reduced is not None:
                leave_one_out += np.log(reduced) / t
        window_mean = float(np.mean(proxy[in_window]))
        if count > 1:
            leave_one_out /= np.count_nonzero(in_window)
            spread = np.sum(np.square(leave_one_out - np.mean(leave_one_out)))
            window_stderr = float(np.sqrt((count - 1) / count * spread))
        else:
            window_stderr = math.nan
    LOGGER.debug("estimate_front(theta=%r): %r +- %r", theta, window_mean, window_stderr)
    return FrontEstimate(
        theta=theta,
        t=times,
        proxy=proxy,
        window=window,
        window_mean=window_mean,
        window_stderr=window_stderr,
    )


class FrontBounds(BaseModel):
    """
    Front Speeds.

    Attributes:
        c0: Admissibility constant.
        c_min: Smallest admissible envelope rate.
        threshold: ``2^{1/β}(Lip_σ c₀)^{4/(2-β)} / (Lip_σ c₀)^{2β/(2-β)}``.
            Beyond it the front is negative.
        threshold_derived: ``(2ν)^{1/β} c_min^{2/β-1}``, the speed at which the envelope exponent vanishes.
        displays_agree: Both thresholds coincide.
        positive_threshold: Speed below which the front is positive.
    """

    c0: float
    c_min: float
    threshold: float
    threshold_derived: float
    displays_agree: bool
    positive_threshold: float


def front_bounds(params: ModelParams, sigma: NonlinearitySpec) -> FrontBounds:
    """
    Upper and lower front speeds.

    Raises:
        DomainError: ``d ≠ 1``, ``α ≠ 2`` or ``Lip_σ = 0``.

    >>> bounds = front_bounds(ModelParams(), NonlinearitySpec(lam=1.0))
    >>> round(bounds.threshold, 7), round(bounds.positive_threshold, 7)
    (1.1283792, 0.1591549)
    """
    _check_simulation("front_bounds", params)
    lip = sigma.lipschitz
    if lip <= 0:
        raise DomainError("front_bounds", lip, "requires Lip_sigma > 0")
    beta, nu = params.beta, params.nu
    c0 = admissible_c0(beta, nu)
    scaled = lip * c0
    threshold = 2.0 ** (1.0 / beta) * scaled ** (4.0 / (2.0 - beta)) / scaled ** (2.0 * beta / (2.0 - beta))
    c_min = smallest_admissible_c(beta, nu, lip)
    derived = (2.0 * nu) ** (1.0 / beta) * c_min ** (2.0 / beta - 1.0)
    agree = math.isclose(threshold, derived, rel_tol=1e-12)
    if not agree:
        LOGGER.info("front_bounds: displayed threshold %r differs from derived %r", threshold, derived)
    return FrontBounds(
        c0=c0,
        c_min=c_min,
        threshold=threshold,
        threshold_derived=derived,
        displays_agree=agree,
        positive_threshold=positive_front_threshold(params, sigma.cone),
    )


class EnergyReport(BaseModel):
    """
    Result of :any:`l2_energy_check`.

    Attributes:
        epsilon: Bound parameter.
        rate: Exponent of the bound.
        t: Times.
        energy: Estimated ``E||u_t||²``.
        stderr: Jackknife standard errors.
        bound: ``ε^{-1}||u0||² exp(rate t)``.
        passed: Bound holds at every level within the Monte Carlo band.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    epsilon: float
    rate: float
    t: np.ndarray
    energy: np.ndarray
    stderr: np.ndarray
    bound: np.ndarray
    passed: bool


def l2_energy_check(e: FieldEnsemble, epsilon: float, se_bands: float = 3.0) -> EnergyReport:
    """
    Compare ``E||u_t||²`` with ``ε^{-1}||u0||² exp([C* Γ(1-θ) Lip_σ² / (1-ε)]^{1/(1-θ)} t)``, ``θ = βd/α``.

    Raises:
        DomainError: ``ε`` outside (0, 1).
    """
    if not 0 < epsilon < 1:
        raise DomainError("l2_energy_check", epsilon, "requires 0 < epsilon < 1")
    params = e.params
    theta = params.theta
    lip = e.sigma.lipschitz
    dx = e.grid.dx
    rate = (c_star(params) * math.gamma(1.0 - theta) * lip**2 / (1.0 - epsilon)) ** (1.0 / (1.0 - theta))
    energy, stderr = _jackknife(e.energy)
    bound = float(np.sum(np.square(e.u0)) * dx) / epsilon * np.exp(rate * e.times)
    passed = bool(np.all(energy - se_bands * np.nan_to_num(stderr) <= bound * (1.0 + _SLACK)))
    return EnergyReport(
        epsilon=epsilon, rate=rate, t=e.times, energy=energy, stderr=stderr, bound=bound, passed=passed
    )


class ConvexityReport(BaseModel):
    """
    Result of :any:`convexity_diagnostic`.

    Attributes:
        orders: Moment orders ``k``.
        rates: Estimated ``η(k)``.
        stderr: Standard errors of ``η(k)``.
        convex: ``η`` is convex in ``k`` within the bands.
        ratio_nondecreasing: ``η(k)/k`` is non-decreasing within the bands.
        strict: ``η(k)/k`` increases strictly beyond the bands.
    """

    orders: Tuple[int, ...]
    rates: Tuple[float, ...]
    stderr: Tuple[float, ...]
    convex: bool
    ratio_nondecreasing: bool
    strict: bool


def convexity_from_rates(rates: Mapping[int, Tuple[float, float]], se_bands: float = 3.0) -> ConvexityReport:
    """
    Convexity diagnostic for given ``k -> (η(k), standard error)``.

    >>> report = convexity_from_rates({2: (4.0, 0.0), 4: (16.0, 0.0), 6: (36.0, 0.0)})
    >>> report.convex, report.ratio_nondecreasing, report.strict
    (True, True, True)
    """
    orders = sorted(rates)
    if len(orders) < 3:
        raise EstimationError("convexity_diagnostic", "requires at least three moment orders")
    eta = np.array([rates[k][0] for k in orders], dtype=float)
    se = np.array([rates[k][1] for k in orders], dtype=float)
    ks = np.array(orders, dtype=float)
    slack = _SLACK * max(1.0, float(np.max(np.abs(eta))))

    convex = True
    for i in range(1, len(orders) - 1):
        share = (ks[i] - ks[i - 1]) / (ks[i + 1] - ks[i - 1])
        chord = eta[i - 1] + share * (eta[i + 1] - eta[i - 1])
        band = se_bands * math.sqrt(se[i - 1] ** 2 + se[i] ** 2 + se[i + 1] ** 2)
        convex = convex and bool(eta[i] <= chord + band + slack)

    ratio = eta / ks
    ratio_se = se / ks
    bands = se_bands * (ratio_se[1:] + ratio_se[:-1])
    steps = np.diff(ratio)
    return ConvexityReport(
        orders=tuple(orders),
        rates=tuple(float(value) for value in eta),
        stderr=tuple(float(value) for value in se),
        convex=convex,
        ratio_nondecreasing=bool(np.all(steps >= -bands - slack)),
        strict=bool(np.all(steps > bands + slack)),
    )


def convexity_diagnostic(
    curves: Mapping[int, MomentCurve], window: Optional[Tuple[float, float]] = None, se_bands: float = 3.0
) -> ConvexityReport:
    """Fit ``η(k)`` per moment curve and run :any:`convexity_from_rates`."""
    rates = {}
    for k, curve in curves.items():
        estimate = estimate_lyapunov(curve, window=window)
        rates[k] = (estimate.rate, estimate.stderr)
    return convexity_from_rates(rates, se_bands=se_bands)


class IsometryReport(BaseModel):
    """
    Result of :any:`isometry_check`.

    Attributes:
        estimate: Variance of the first stochastic increment.
        stderr: Jackknife standard error.
        expected: ``σ(u0)² w₁``.
        passed: Agreement within the bands.
    """

    estimate: float
    stderr: float
    expected: float
    passed: bool


def isometry_check(e: FieldEnsemble, se_bands: float = 3.0) -> IsometryReport:
    """
    Variance of the first increment against the cell-integrated L² mass ``w₁`` of the kernel.

    Raises:
        UnsupportedConfigurationError: Non-constant initial data.
    """
    if np.any(e.u0 != e.u0[0]):
        raise UnsupportedConfigurationError("isometry_check", "requires constant initial data")
    weight = float(e.noise_variance[0])
    coefficient = float(e.sigma.sigma(e.u0[:1])[0]) ** 2
    increments = np.square(e.fields[:, 1] - e.deterministic[1, e.cells]) / e.step_variance[e.cells]
    mean, stderr = _jackknife(np.mean(increments, axis=1) * weight)
    expected = coefficient * weight
    passed = bool(abs(float(mean) - expected) <= se_bands * float(np.nan_to_num(stderr)) + _SLACK * expected)
    return IsometryReport(estimate=float(mean), stderr=float(stderr), expected=expected, passed=passed)


class AdaptednessReport(BaseModel):
    """
    Result of :any:`adaptedness_check`.

    Attributes:
        level: Last time level whose noise was kept.
        prefix_equal: Levels ``0..level`` of the replay are bitwise equal to the ensemble.
        suffix_changed: Some later level differs. Always false if ``σ`` vanishes or ``level`` is the last level.
    """

    level: int
    prefix_equal: bool
    suffix_changed: bool

    @property
    def passed(self) -> bool:
        """The truncated noise leaves the earlier levels untouched."""
        return self.prefix_equal


def adaptedness_check(
    e: FieldEnsemble, level: int, threads: Optional[int] = None, table: Optional[KernelTable] = None
) -> AdaptednessReport:
    """
    Replay ``e`` with the noise after time step ``level`` set to zero and compare.

    A level ``m`` field may only depend on the noise of the steps below ``m``, so levels ``0..level`` must be
    reproduced exactly.

    Keyword Args:
        threads: Worker cap.
        table: Precomputed kernel table matching the grid of ``e``.

    Raises:
        DomainError: ``level`` outside ``0..nt``.
    """
    replay = simulate(
        e.params,
        e.grid,
        e.u0,
        e.sigma,
        e.seed,
        e.replicas,
        threads=threads,
        cells=e.cells,
        table=table,
        noise_levels=level,
    )
    prefix_equal = bool(np.array_equal(replay.fields[:, : level + 1], e.fields[:, : level + 1]))
    suffix_changed = not np.array_equal(replay.fields[:, level + 1 :], e.fields[:, level + 1 :])
    LOGGER.info("adaptedness_check: level %d, prefix equal %s, suffix changed %s", level, prefix_equal, suffix_changed)
    return AdaptednessReport(level=level, prefix_equal=prefix_equal, suffix_changed=suffix_changed)


class RegionReport(BaseModel):
    """
    Result of :any:`region_indicator_check`.

    Attributes:
        samples: Number of sampled lattice tuples.
        union_violations: Tuples with ``|x| ≥ θt`` where neither ``|x-y| ≥ θ(t-s)`` nor ``|y| ≥ θs`` holds.
        product_violations: Tuples with ``|x-y| ≥ θ(t-s)`` and ``|y| ≥ θs`` but ``|x| < θt``.
    """

    samples: int
    union_violations: int
    product_violations: int

    @property
    def passed(self) -> bool:
        """The covering ``{|x| ≥ θt} ⊂ {|x-y| ≥ θ(t-s)} ∪ {|y| ≥ θs}`` holds on every sample."""
        return self.union_violations == 0


def region_indicator_check(grid: SpaceTimeGrid, theta: float, samples: int = 10000, seed: int = 0) -> RegionReport:
    """
    Sample lattice tuples ``s < t`` and ``x, y`` and count violations of the region splitting.

    Both indicator forms are counted. Only the covering form follows from the triangle inequality.
    """
    if theta < 0:
        raise DomainError("region_indicator_check", theta, "requires theta >= 0")
    rng = np.random.default_rng(seed)
    centers = grid.centers()
    upper = rng.integers(1, grid.nt + 1, size=samples)
    lower = (rng.random(samples) * upper).astype(int)
    t, s = upper * grid.dt, lower * grid.dt
    x = centers[rng.integers(0, grid.nx, size=samples)]
    y = centers[rng.integers(0, grid.nx, size=samples)]
    tolerance = _SLACK * grid.length
    outer = np.abs(x) >= theta * t
    first = np.abs(x - y) >= theta * (t - s) - tolerance
    second = np.abs(y) >= theta * s - tolerance
    union = int(np.count_nonzero(outer & ~(first | second)))
    product = int(np.count_nonzero(first & second & (np.abs(x) < theta * t - tolerance)))
    return RegionReport(samples=samples, union_violations=union, product_violations=product)


def replica_correlation(seed: int, replicas: int, draws: int = 4096) -> float:
    """Largest absolute correlation between the noise streams of consecutive replicas."""
    if replicas < 2 or draws < 2:
        raise DomainError("replica_correlation", (replicas, draws), "requires two replicas and two draws")
    streams = np.array([_replica_rng(seed, replica).standard_normal(draws) for replica in range(replicas)])
    correlations = [np.corrcoef(streams[r], streams[r + 1])[0, 1] for r in range(replicas - 1)]
    return float(np.max(np.abs(correlations)))


def correlation_limit(replicas: int, draws: int, se_bands: float = 3.0) -> float:
    """
    Acceptance limit for :any:`replica_correlation`, corrected for the number of compared pairs.

    >>> round(correlation_limit(2, 10000), 6)
    0.03
    """
    pairs = max(replicas - 1, 1)
    return max(se_bands, math.sqrt(2.0 * math.log(2.0 * pairs)) + 1.0) / math.sqrt(draws)


def _unit_square_integral(params: ModelParams, lower: float, power: int) -> float:
    """``∫_lower^∞ z^power G_1(z)² dz``."""
    upper = lower + _UNIT_WIDTH * math.sqrt(params.nu)
    nodes, weights = panel_rule(np.linspace(lower, upper, _UNIT_PANELS + 1))
    values = green_kernel_values(params, 1.0, nodes)
    return float(weights @ (nodes**power * np.square(values)))


def tail_energy(params: ModelParams, theta: float, t: float) -> float:
    """
    ``∫_{x>θt} G_t(x)² dx`` via ``G_t(x) = t^{-β/2} G_1(x t^{-β/2})``.

    >>> round(2 * tail_energy(ModelParams(), 0.0, 1.0), 7)
    0.1994711
    """
    _check_simulation("tail_energy", params)
    if t <= 0 or theta < 0:
        raise DomainError("tail_energy", (theta, t), "requires theta >= 0 and t > 0")
    half = 0.5 * params.beta
    return t**-half * _unit_square_integral(params, theta * t ** (1.0 - half), 0)


def tail_energy_laplace(params: ModelParams, theta: float, lam: float) -> float:
    """``∫_0^∞ exp(-λt) tail_energy(θ, t) dt``."""
    if lam < 0 or (lam == 0 and theta <= 0):
        raise DomainError("tail_energy_laplace", (theta, lam), "requires lam > 0, or lam = 0 with theta > 0")

    def integrand(t: float) -> float:
        return math.exp(-lam * t) * tail_energy(params, theta, t) if t > 0 else 0.0

    value, _ = checked_quad(integrand, 0.0, math.inf, "tail_energy_laplace", epsabs=1e-10, epsrel=1e-8)
    return value


def positive_front_threshold(params: ModelParams, L_sigma: float) -> float:
    """
    Speed ``L_σ² ∫_0^∞ z G_1(z)² dz / (1-β/2)`` below which the lower front is positive.

    Below it ``L_σ² ∫_0^∞ tail_energy(θ, t) dt`` exceeds one.
    """
    _check_simulation("positive_front_threshold", params)
    if L_sigma < 0:
        raise DomainError("positive_front_threshold", L_sigma, "requires L_sigma >= 0")
    return L_sigma**2 * _unit_square_integral(params, 0.0, 1) / (1.0 - 0.5 * params.beta)

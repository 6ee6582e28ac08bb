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
Renewal Equation With Power-Law Kernel.

    f(t) = a(t) + ∫_0^t f(s) g(t-s) ds,    g(τ) = b τ^{-θ},  0 < θ < 1.

With the tilt constant ``c = (b Γ(1-θ))^{1/(1-θ)}`` the tilted kernel ``exp(-cτ) g(τ)`` is a probability
density and ``exp(-ct) f(t)`` converges to ``c / (1-θ) ∫_0^∞ a(y) exp(-cy) dy``.

>>> round(tilt_constant(1.0, 0.5), 8)
3.14159265
"""

import enum
import math
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ConfigDict, Field, model_validator
from scipy import linalg, special

from ._basemodel import BaseModel
from ._quadrature import checked_quad
from ._util import LOGGER, readonly
from .const import RENEWAL_MAX_STEPS
from .exceptions import AccuracyError, DomainError

_START_STEPS = 64
_RESIDUAL_TOL = 1e-9


class Forcing:
    """
    Nonnegative forcing ``a(t)``.

    Either constant, a closed-form callable, or samples linearly interpolated (constant beyond the ends).

    >>> Forcing.constant(2.0)(np.array([0.0, 5.0]))
    array([2., 2.])
    >>> Forcing.from_samples([0.0, 1.0], [1.0, 0.0])(np.array([0.5, 3.0]))
    array([0.5, 0. ])
    """

    def __init__(self, func: Callable[[np.ndarray], np.ndarray], name: str, value: Optional[float] = None):
        self._func = func
        self.name = name
        self.value = value

    @staticmethod
    def constant(value: float) -> "Forcing":
        """Constant forcing ``a ≡ value``."""
        value = float(value)
        if value < 0:
            raise DomainError("Forcing", value, "forcing must be nonnegative")
        return Forcing(lambda t: np.full(np.shape(t), value), f"constant({value!r})", value)

    @staticmethod
    def from_callable(func: Callable[[float], float], name: str = "callable") -> "Forcing":
        """Closed-form forcing, evaluated pointwise."""
        return Forcing(np.vectorize(func, otypes=[float]), name)

    @staticmethod
    def from_samples(times: Sequence[float], values: Sequence[float]) -> "Forcing":
        """Sampled forcing with linear interpolation."""
        times = readonly(times)
        values = readonly(values)
        if times.shape != values.shape or times.size < 2 or np.any(np.diff(times) <= 0):
            raise DomainError("Forcing", times.size, "requires matching, strictly increasing samples")
        return Forcing(lambda t: np.interp(t, times, values), f"samples({times.size})")

    @property
    def is_constant(self) -> bool:
        """``True`` for constant forcing."""
        return self.value is not None

    def __call__(self, t) -> np.ndarray:
        return np.asarray(self._func(np.asarray(t, dtype=float)), dtype=float)

    def __repr__(self):
        return f"Forcing({self.name})"


class Scheme(str, enum.Enum):
    """Product-integration scheme."""

    RECTANGLE = "rectangle"
    """Kernel integrated exactly per cell against piecewise constant ``f``, implicit in the current cell."""

    EXPONENTIAL = "exponential"
    """Tilted kernel ``exp(-cτ) b τ^{-θ}`` integrated exactly per cell, solving for ``exp(-ct) f``."""


def _check_kernel(what: str, b: float, theta: float, positive: bool = True):
    if not 0 < theta < 1:
        raise DomainError(what, theta, "requires 0 < theta < 1")
    if b < 0 or (positive and b == 0) or not math.isfinite(b):
        raise DomainError(what, b, "requires b > 0" if positive else "requires b >= 0")


class RenewalProblem(BaseModel):
    """
    Renewal Problem.

    Args:
        a: Nonnegative, non-increasing forcing.
        b: Kernel amplitude.
        theta: Kernel exponent in (0, 1).
        t_grid: Strictly increasing output times above 0.

    Raises:
        DomainError: ``theta`` outside (0, 1), or forcing negative or increasing on the grid.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    a: Forcing
    b: float = Field(ge=0)
    theta: float
    t_grid: Tuple[float, ...]

    @model_validator(mode="after")
    def _check(self):
        _check_kernel("RenewalProblem", self.b, self.theta, positive=False)
        times = np.asarray(self.t_grid)
        if times.size < 1 or times[0] <= 0 or np.any(np.diff(times) <= 0):
            raise DomainError("RenewalProblem", self.t_grid[:3], "t_grid must be strictly increasing above 0")
        values = self.a(np.concatenate(([0.0], times)))
        if np.any(values < 0) or np.any(np.diff(values) > 1e-12 * max(float(values[0]), 1.0)):
            raise DomainError("RenewalProblem", self.a, "forcing must be nonnegative and non-increasing")
        return self

    @property
    def times(self) -> np.ndarray:
        """Output times as array."""
        return np.asarray(self.t_grid, dtype=float)

    @property
    def c(self) -> float:
        """Tilt constant, 0 without kernel."""
        return tilt_constant(self.b, self.theta) if self.b > 0 else 0.0


class RenewalSolution(BaseModel):
    """
    Sampled Renewal Solution.

    Attributes:
        t: Output times.
        f: Solution values.
        c: Tilt constant.
        tilted: ``exp(-ct) f(t)``.
        asymptote: Limit of ``exp(-ct) f(t)``.
        drift: Slope of ``tilted`` over the last tenth of the horizon.
        steps: Number of uniform steps of the accepted solve, 0 for the exact grid solve.
        change: Relative change of the last refinement.
        scheme: Scheme used.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    t: np.ndarray
    f: np.ndarray
    c: float
    tilted: np.ndarray
    asymptote: float
    drift: float
    steps: int = 0
    change: float = 0.0
    scheme: Scheme = Scheme.RECTANGLE

    def records(self):
        """Rows ``t, f, tilted`` for export."""
        for t, f, tilted in zip(self.t, self.f, self.tilted):
            yield {"t": float(t), "f": float(f), "tilted": float(tilted)}


def tilt_constant(b: float, theta: float) -> float:
    """
    ``c = (b Γ(1-θ))^{1/(1-θ)}``.

    >>> round(tilt_constant(2.0, 0.5) / math.pi, 12)
    4.0
    """
    _check_kernel("tilt_constant", b, theta)
    return (b * math.gamma(1.0 - theta)) ** (1.0 / (1.0 - theta))


def picard_gamma(b: float, theta: float) -> float:
    """
    Weight ``γ = (2bΓ(1-θ))^{1/(1-θ)}`` at which one Picard step halves :any:`weighted_sup_norm`.

    ``∫_0^∞ exp(-γτ) b τ^{-θ} dτ = b Γ(1-θ) γ^{θ-1} = 1/2``.

    >>> round(picard_gamma(1.0, 0.5) / math.pi, 12)
    4.0
    """
    _check_kernel("picard_gamma", b, theta)
    return (2.0 * b * math.gamma(1.0 - theta)) ** (1.0 / (1.0 - theta))


def weighted_sup_norm(h: np.ndarray, t: np.ndarray, gamma: float) -> float:
    """
    ``sup_t exp(-γt) |h(t)|``.

    >>> weighted_sup_norm(np.array([1.0, 2.0]), np.array([0.0, 1.0]), 0.0)
    2.0
    """
    with np.errstate(under="ignore"):
        return float(np.max(np.exp(-gamma * np.asarray(t)) * np.abs(h)))


def tilted_kernel_mass(b: float, theta: float) -> float:
    """
    ``∫_0^∞ exp(-cτ) b τ^{-θ} dτ`` by quadrature.

    >>> round(tilted_kernel_mass(1.0, 0.5), 9)
    1.0
    """
    c = tilt_constant(b, theta)
    near, _ = checked_quad(
        lambda tau: b * math.exp(-c * tau), 0.0, 1.0, "tilted_kernel_mass", epsabs=1e-13, weight="alg", wvar=(-theta, 0)
    )
    far, _ = checked_quad(lambda tau: b * tau**-theta * math.exp(-c * tau), 1.0, math.inf, "tilted_kernel_mass")
    return near + far


def _cell_weights(problem: RenewalProblem, step: float, count: int, scheme: Scheme) -> np.ndarray:
    k = np.arange(count + 1, dtype=float)
    if scheme == Scheme.EXPONENTIAL:
        # b c^{θ-1} Γ(1-θ) = 1: the weights are increments of the regularized incomplete gamma function
        lower = special.gammainc(1.0 - problem.theta, problem.c * step * k)
        return np.diff(lower)
    exponent = 1.0 - problem.theta
    powers = k**exponent
    return problem.b * step**exponent * np.diff(powers) / exponent


def _march(forcing: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """``x_n = F_n + Σ_{j=1}^{n} w_{n-j} x_j`` for ``n ≥ 1`` and ``x_0 = F_0``."""
    count = forcing.size - 1
    x = np.empty(count + 1)
    x[0] = forcing[0]
    diagonal = 1.0 - weights[0]
    for n in range(1, count + 1):
        history = float(np.dot(weights[n - 1 : 0 : -1], x[1:n])) if n > 1 else 0.0
        x[n] = (forcing[n] + history) / diagonal
    return x


def _uniform_solve(problem: RenewalProblem, count: int, scheme: Scheme) -> Tuple[np.ndarray, np.ndarray]:
    horizon = problem.t_grid[-1]
    step = horizon / count
    nodes = step * np.arange(count + 1)
    weights = _cell_weights(problem, step, count, scheme)
    forcing = problem.a(nodes)
    if scheme == Scheme.EXPONENTIAL:
        tilted = _march(np.exp(-problem.c * nodes) * forcing, weights)
        return nodes, np.exp(problem.c * nodes) * tilted
    return nodes, _march(forcing, weights)


def _first_count(problem: RenewalProblem) -> int:
    count = _START_STEPS
    exponent = 1.0 - problem.theta
    # the implicit diagonal weight must stay well below 1
    while problem.b * (problem.t_grid[-1] / count) ** exponent / exponent > 0.5:
        count *= 2
    return count


def _grid_matrix(problem: RenewalProblem) -> np.ndarray:
    """``Ω[n, j] = ∫_{t_{j-1}}^{t_j} b (t_n - s)^{-θ} ds`` with ``t_0 = 0``, lower triangular."""
    times = problem.times
    left = np.concatenate(([0.0], times[:-1]))
    exponent = 1.0 - problem.theta
    upper = np.clip(times[:, None] - left[None, :], 0.0, None) ** exponent
    lower = np.clip(times[:, None] - times[None, :], 0.0, None) ** exponent
    return np.tril(problem.b * (upper - lower) / exponent)


def _refined(
    problem: RenewalProblem, solve: Callable[[int], Tuple[np.ndarray, np.ndarray]], tol: float, what: str
) -> Tuple[np.ndarray, int, float]:
    """Double the uniform step count until the values on ``t_grid`` change by at most ``tol``, relative."""
    times = problem.times
    count = _first_count(problem)
    previous: Optional[np.ndarray] = None
    change = math.inf
    while count <= RENEWAL_MAX_STEPS:
        nodes, values = solve(count)
        current = np.interp(times, nodes, values)
        if previous is not None:
            change = float(np.max(np.abs(current - previous) / np.maximum(np.abs(current), 1e-300)))
            LOGGER.debug("%s: %d steps, relative change %.3e", what, count, change)
            if change <= tol:
                return current, count, change
        previous = current
        count *= 2
    best = float(previous[-1]) if previous is not None else math.nan
    raise AccuracyError(what, best, change)


def _solution(problem: RenewalProblem, f: np.ndarray, steps: int, change: float, scheme: Scheme) -> RenewalSolution:
    times = problem.times
    c = problem.c
    with np.errstate(under="ignore"):
        tilted = np.exp(-c * times) * f
    tail = times >= 0.9 * times[-1]
    drift = 0.0
    if np.count_nonzero(tail) >= 2:
        drift = float(np.polyfit(times[tail], tilted[tail], 1)[0])
    return RenewalSolution(
        t=readonly(times),
        f=readonly(f),
        c=c,
        tilted=readonly(tilted),
        asymptote=renewal_asymptote(problem),
        drift=drift,
        steps=steps,
        change=change,
        scheme=scheme,
    )


def solve_renewal(
    problem: RenewalProblem, scheme: Scheme = Scheme.RECTANGLE, refine: bool = True, tol: float = 1e-3
) -> RenewalSolution:
    """
    Solve the renewal equation by product integration.

    With ``refine`` the uniform step count is doubled until the solution on ``t_grid`` changes by less
    than ``tol`` (relative). Without, the equation is solved on ``t_grid`` itself.

    Raises:
        AccuracyError: No convergence up to the largest step count.

    >>> problem = RenewalProblem(a=Forcing.constant(1.0), b=0.0, theta=0.5, t_grid=(0.5, 1.0))
    >>> solve_renewal(problem).f
    array([1., 1.])
    """
    scheme = Scheme(scheme)
    times = problem.times
    if problem.b == 0:
        return _solution(problem, problem.a(times), 0, 0.0, scheme)
    if not refine:
        system = np.eye(times.size) - _grid_matrix(problem)
        f = linalg.solve_triangular(system, problem.a(times), lower=True)
        return _solution(problem, f, 0, 0.0, scheme)
    f, count, change = _refined(problem, lambda count: _uniform_solve(problem, count, scheme), tol, "solve_renewal")
    return _solution(problem, f, count, change, scheme)


def _tilted_weights(problem: RenewalProblem, step: float, count: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Weights of the near and the far node of every lag cell for piecewise linear ``f̃`` against ``g̃``.

    With ``M0`` and ``M1`` the zeroth and first moment of ``g̃`` over ``[kΔ, (k+1)Δ]``, the near weight is
    ``(k+1) M0 - M1/Δ`` and the far weight ``M1/Δ - k M0``.
    """
    theta = problem.theta
    k = np.arange(count + 1, dtype=float)
    scaled = problem.c * step * k
    mass = np.diff(special.gammainc(1.0 - theta, scaled))
    # ∫ τ g̃ = (1-θ)/c · ΔP(2-θ, cτ) since b Γ(1-θ) c^{θ-1} = 1
    first = (1.0 - theta) / (problem.c * step) * np.diff(special.gammainc(2.0 - theta, scaled))
    return k[1:] * mass - first, first - k[:-1] * mass


def _tilted_solve(problem: RenewalProblem, count: int) -> Tuple[np.ndarray, np.ndarray]:
    step = problem.t_grid[-1] / count
    nodes = step * np.arange(count + 1)
    near, far = _tilted_weights(problem, step, count)
    weights = near.copy()
    weights[1:] += far[:-1]
    with np.errstate(under="ignore"):
        forcing = np.exp(-problem.c * nodes) * problem.a(nodes)
    x = np.empty(count + 1)
    x[0] = forcing[0]
    diagonal = 1.0 - weights[0]
    for n in range(1, count + 1):
        history = float(np.dot(weights[1:n], x[n - 1 : 0 : -1])) if n > 1 else 0.0
        x[n] = (forcing[n] + history + far[n - 1] * x[0]) / diagonal
    return nodes, x


def solve_tilted(problem: RenewalProblem, tol: float = 1e-3) -> np.ndarray:
    """
    Solve the tilted equation ``f̃ = ã + f̃ * g̃`` on ``t_grid`` with ``ã = exp(-ct) a`` and ``g̃ = exp(-cτ) g``.

    ``g̃`` is a probability density. ``f̃`` is taken piecewise linear on a uniform grid and integrated against
    the exact cell moments of ``g̃``, a discretization independent of both ``solve_renewal`` schemes. The step
    count is doubled until ``f̃`` on ``t_grid`` changes by at most ``tol``, relative.

    Returns:
        ``exp(-ct) f(t)`` on ``t_grid``.

    Raises:
        AccuracyError: No convergence up to the largest step count.

    >>> problem = RenewalProblem(a=Forcing.constant(1.0), b=1.0, theta=0.5, t_grid=(1.0,))
    >>> bool(abs(solve_tilted(problem)[0] - math.exp(-math.pi) * special.erfcx(-math.sqrt(math.pi))) < 1e-2)
    True
    """
    if problem.b == 0:
        return problem.a(problem.times)
    tilted, _, _ = _refined(problem, lambda count: _tilted_solve(problem, count), tol, "solve_tilted")
    return tilted


def renewal_asymptote(problem: RenewalProblem) -> float:
    """
    ``lim exp(-ct) f(t) = c / (1-θ) ∫_0^∞ a(y) exp(-cy) dy``.

    Closed form ``a / (1-θ)`` for constant forcing.

    Raises:
        DomainError: The forcing integral diverges.

    >>> problem = RenewalProblem(a=Forcing.constant(5.0), b=1.0, theta=0.25, t_grid=(1.0,))
    >>> round(renewal_asymptote(problem), 6)
    6.666667
    """
    if problem.b == 0:
        return float(problem.a(np.array([problem.t_grid[-1]]))[0])
    theta = problem.theta
    if problem.a.is_constant:
        return problem.a.value / (1.0 - theta)
    c = problem.c

    def integrand(y: float) -> float:
        return float(problem.a(np.array([y]))[0]) * math.exp(-c * y)

    value, _ = checked_quad(integrand, 0.0, math.inf, "renewal_asymptote", epsabs=1e-12)
    if not math.isfinite(value):
        raise DomainError("renewal_asymptote", value, "forcing integral diverges")
    return c / (1.0 - theta) * value


def picard_iterate(f0: np.ndarray, problem: RenewalProblem, n_iters: int) -> List[np.ndarray]:
    """
    Picard iterates ``f^{(k+1)} = a + Ω f^{(k)}`` on ``t_grid``, ``k = 0..n_iters``.

    ``Ω`` is the product-integration matrix of ``solve_renewal(problem, refine=False)``, whose
    solution is the fixed point. Starting at a supersolution the iterates decrease, at a
    subsolution they increase.
    """
    f0 = np.asarray(f0, dtype=float)
    if f0.shape != problem.times.shape or np.any(f0 < 0):
        raise DomainError("picard_iterate", f0.shape, "requires a nonnegative sample per grid time")
    matrix = _grid_matrix(problem)
    forcing = problem.a(problem.times)
    iterates = [f0]
    for _ in range(n_iters):
        iterates.append(forcing + matrix @ iterates[-1])
    return iterates


class Ordering(str, enum.Enum):
    """Classification of a candidate function."""

    SOLUTION = "solution"
    SUPERSOLUTION = "supersolution"
    SUBSOLUTION = "subsolution"
    NEITHER = "neither"


class OrderingReport(BaseModel):
    """
    Result of :any:`check_supersolution`.

    Attributes:
        ordering: Classification of the candidate.
        residual_min: Smallest ``h - a - h*g`` on the grid.
        residual_max: Largest ``h - a - h*g`` on the grid.
        comparison_holds: The implied ordering against the solution holds at every grid point.
    """

    ordering: Ordering
    residual_min: float
    residual_max: float
    comparison_holds: bool


def check_supersolution(h: np.ndarray, problem: RenewalProblem, tol: float = _RESIDUAL_TOL) -> OrderingReport:
    """
    Classify ``h`` as super- or subsolution and verify the comparison theorem.

    A supersolution satisfies ``h ≥ a + h*g`` and lies above the solution, a subsolution the reverse.
    """
    h = np.asarray(h, dtype=float)
    if h.shape != problem.times.shape or np.any(h < 0):
        raise DomainError("check_supersolution", h.shape, "requires a nonnegative sample per grid time")
    forcing = problem.a(problem.times)
    residual = h - forcing - _grid_matrix(problem) @ h
    slack = tol * (np.abs(h) + forcing + 1e-300)
    solution = solve_renewal(problem, refine=False).f
    above = bool(np.all(h >= solution - slack))
    below = bool(np.all(h <= solution + slack))
    if np.all(np.abs(residual) <= slack):
        ordering, holds = Ordering.SOLUTION, above and below
    elif np.all(residual >= -slack):
        ordering, holds = Ordering.SUPERSOLUTION, above
    elif np.all(residual <= slack):
        ordering, holds = Ordering.SUBSOLUTION, below
    else:
        ordering, holds = Ordering.NEITHER, True
    return OrderingReport(
        ordering=ordering,
        residual_min=float(np.min(residual)),
        residual_max=float(np.max(residual)),
        comparison_holds=holds,
    )

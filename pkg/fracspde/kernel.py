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
Fundamental Solution Of The Time-Fractional Heat Equation.

``G_t(x)`` is the density of ``X(E_t)``: an isotropic α-stable process ``X`` with
``E[exp(iξ·X(s))] = exp(-sν|ξ|^α)``, run at the inverse subordinator clock ``E_t``.
By conditioning on the clock

    G_t(x) = ∫_0^∞ p_{X(s)}(x) f_{E_t}(s) ds,

and in Fourier space ``Ĝ_t(ξ) = E_β(-ν t^β |ξ|^α)``. Both routes are implemented and serve as
oracles of each other.

>>> params = ModelParams()
>>> round(green_kernel(params, 1.0, 0.0), 7)
0.2820948
>>> round(c_star(params), 7)
0.1994711
"""

import math
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import Iterator, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import interpolate, special

from ._quadrature import checked_quad, graded_edges, log_trapezoid, panel_rule, richardson
from ._util import LOGGER, readonly
from .appconfig import AppConfig
from .const import KERNEL_TABLE_TAIL_LIMIT, SPECTRAL_EPSABS, SUBORDINATION_EPSABS
from .datamodel import MLParams, ModelParams
from .exceptions import DomainError, TruncationError, UnsupportedConfigurationError
from .special_fn import mittag_leffler, mittag_leffler_decay
from .subordinator import clock_truncation, unit_clock_density

Point = Union[float, Sequence[float]]

_CLOCK_PANELS = 24
_CLOCK_GRADED = 50
_CLOCK_MAX_POWER = 8.0
_TABLE_POINTS = 600
_TABLE_LOW = 1e-3
_TABLE_HIGH = 50.0
_NEAR_TERMS = 4
_FAR_TERMS = 30


def _radius(x: Point) -> float:
    return float(np.linalg.norm(np.atleast_1d(np.asarray(x, dtype=float))))


def _check_time(what: str, t: float):
    if not (math.isfinite(t) and t > 0):
        raise DomainError(what, t, "requires t > 0")


def _check_general_alpha(what: str, params: ModelParams):
    if params.alpha not in (1.0, 2.0) and params.d != 1:
        raise UnsupportedConfigurationError(what, f"alpha={params.alpha} requires d=1, got d={params.d}")


def _standard_near(alpha: float, y: np.ndarray) -> np.ndarray:
    # (1/(πα)) Σ_k (-1)^k Γ((2k+1)/α) y^{2k} / (2k)!
    ks = np.arange(_NEAR_TERMS)
    coefs = (-1.0) ** ks * np.exp(special.gammaln((2 * ks + 1) / alpha) - special.gammaln(2 * ks + 1.0))
    return np.polynomial.polynomial.polyval(y * y, coefs) / (math.pi * alpha)


def _standard_far(alpha: float, y: np.ndarray) -> np.ndarray:
    # (1/π) Σ_{k≥1} (-1)^{k+1} Γ(αk+1) sin(παk/2) / k! · y^{-αk-1}
    ks = np.arange(1, _FAR_TERMS + 1, dtype=float)
    sines = np.sin(0.5 * math.pi * alpha * ks)
    logs = special.gammaln(alpha * ks + 1.0) - special.gammaln(ks + 1.0)
    coefs = np.concatenate(([0.0], (-1.0) ** (ks + 1) * sines * np.exp(logs)))
    return np.polynomial.polynomial.polyval(y**-alpha, coefs) / (math.pi * y)


def _standard_quad(alpha: float, y: float) -> float:
    cutoff = 40.0 ** (1.0 / alpha)
    if y * cutoff <= _TABLE_HIGH:
        value, _ = checked_quad(
            lambda xi: math.cos(xi * y) * math.exp(-(xi**alpha)),
            0.0,
            cutoff,
            "stable_pdf",
            epsabs=1e-13,
            epsrel=1e-10,
            limit=400,
        )
    else:
        value, _ = checked_quad(
            lambda xi: math.exp(-(xi**alpha)),
            0.0,
            math.inf,
            "stable_pdf",
            epsabs=1e-13,
            limit=400,
            weight="cos",
            wvar=y,
        )
    return value / math.pi


@lru_cache(maxsize=16)
def _standard_table(alpha: float) -> interpolate.CubicSpline:
    LOGGER.debug("stable_pdf: tabulating the standard density for alpha=%r", alpha)
    ys = np.geomspace(_TABLE_LOW, _TABLE_HIGH, _TABLE_POINTS)
    values = np.array([_standard_quad(alpha, y) for y in ys])
    return interpolate.CubicSpline(np.log(ys), np.log(values))


def _standard_stable(alpha: float, y: np.ndarray) -> np.ndarray:
    """Density of the symmetric α-stable law with characteristic function ``exp(-|ξ|^α)``."""
    y = np.abs(np.asarray(y, dtype=float))
    result = np.empty_like(y)
    near = y < _TABLE_LOW
    far = y > _TABLE_HIGH
    mid = ~(near | far)
    if np.any(near):
        result[near] = _standard_near(alpha, y[near])
    if np.any(far):
        result[far] = _standard_far(alpha, y[far])
    if np.any(mid):
        result[mid] = np.exp(_standard_table(alpha)(np.log(y[mid])))
    return result


def _pdf_radial(params: ModelParams, s: np.ndarray, r: np.ndarray) -> np.ndarray:
    """``p_{X(s)}`` at radius ``r``, broadcasting ``s`` against ``r``."""
    alpha, nu, d = params.alpha, params.nu, params.d
    with np.errstate(under="ignore"):
        if alpha == 2.0:
            return (4.0 * math.pi * nu * s) ** (-0.5 * d) * np.exp(-(r * r) / (4.0 * nu * s))
        if alpha == 1.0:
            scale = nu * s
            norm = math.exp(special.gammaln(0.5 * (d + 1)) - 0.5 * (d + 1) * math.log(math.pi))
            return norm * scale / (scale * scale + r * r) ** (0.5 * (d + 1))
        scale = (nu * s) ** (1.0 / alpha)
        return _standard_stable(alpha, r / scale) / scale


def stable_pdf(params: ModelParams, s: float, x: Point) -> float:
    """
    Density of ``X(s)`` at ``x``.

    Closed forms for ``α = 2`` (Gaussian, variance ``2νs`` per axis) and ``α = 1`` (Cauchy), numeric
    Fourier inversion otherwise (``d = 1`` only).

    >>> round(stable_pdf(ModelParams(), 1.0, 0.0), 7)
    0.2820948
    >>> round(stable_pdf(ModelParams(alpha=1.0), 1.0, 0.0), 7)
    0.3183099
    """
    _check_time("stable_pdf", s)
    _check_general_alpha("stable_pdf", params)
    r = _radius(x)
    if params.alpha not in (1.0, 2.0) and r == 0:
        return math.gamma(1.0 + 1.0 / params.alpha) / (math.pi * (params.nu * s) ** (1.0 / params.alpha))
    return float(_pdf_radial(params, np.array(s), np.array(r)))


def _clock_power(params: ModelParams) -> float:
    ratio = params.d / params.alpha
    if ratio < 1:
        return min(1.0 / (1.0 - ratio), _CLOCK_MAX_POWER)
    return 2.0


@lru_cache(maxsize=64)
def _clock_rule(beta: float, power: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Nodes ``σ_q`` and weights ``W_q`` with ``∫_0^∞ h(σ) M_β(σ) dσ ≈ Σ_q W_q h(σ_q)``.

    ``σ = v^power`` removes the ``σ^{-d/α}`` singularity of ``h`` at the origin.
    """
    if beta == 1.0:
        return readonly([1.0]), readonly([1.0])
    upper = clock_truncation(beta) ** (1.0 / power)
    nodes, weights = panel_rule(graded_edges(upper, _CLOCK_PANELS, _CLOCK_GRADED), order=16)
    sigma = nodes**power
    clock = weights * power * nodes ** (power - 1.0) * unit_clock_density(beta, sigma)
    return readonly(sigma), readonly(clock)


def clock_rule(params: ModelParams) -> Tuple[np.ndarray, np.ndarray]:
    """
    Quadrature rule of the unit clock ``E_1`` adapted to ``params``.

    >>> sigma, weights = clock_rule(ModelParams(beta=0.5))
    >>> round(float(weights.sum()), 8)
    1.0
    """
    return _clock_rule(params.beta, _clock_power(params))


def green_kernel_values(params: ModelParams, t: float, r: np.ndarray) -> np.ndarray:
    """
    Vectorized ``G_t`` at radii ``r`` by a fixed subordination rule.

    At the origin ``G_t(0) = (νt^β)^{-1/2} / (2Γ(1-β/2))`` for ``α = 2``, ``d = 1``:

    >>> round(float(green_kernel_values(ModelParams(beta=0.5), 1.0, np.array([0.0]))[0]), 5)
    0.40802
    """
    _check_time("green_kernel", t)
    _check_general_alpha("green_kernel", params)
    r = np.abs(np.asarray(r, dtype=float))
    if params.beta == 1.0:
        return _pdf_radial(params, np.array(t), r)
    sigma, weights = clock_rule(params)
    s = t**params.beta * sigma
    matrix = _pdf_radial(params, s[None, :], r.reshape(-1, 1))
    return (matrix @ weights).reshape(r.shape)


def green_kernel(params: ModelParams, t: float, x: Point) -> float:
    """
    ``G_t(x)`` by adaptive quadrature of the subordination integral.

    ``x = 0`` with ``d ≥ α`` is a pole and yields ``inf``.

    Raises:
        DomainError: ``t ≤ 0``.
        AccuracyError: Quadrature did not converge.
    """
    _check_time("green_kernel", t)
    _check_general_alpha("green_kernel", params)
    r = _radius(x)
    if params.beta == 1.0:
        return stable_pdf(params, t, r)
    if r == 0 and params.d >= params.alpha:
        return math.inf
    clock_scale = t**params.beta
    beta = params.beta

    def integrand(sigma: float) -> float:
        if sigma <= 0:
            return 0.0
        density = float(_pdf_radial(params, np.array(clock_scale * sigma), np.array(r)))
        return density * float(unit_clock_density(beta, np.array([sigma]))[0])

    near, _ = checked_quad(integrand, 0.0, 1.0, "green_kernel", epsabs=SUBORDINATION_EPSABS)
    far, _ = checked_quad(integrand, 1.0, math.inf, "green_kernel", epsabs=SUBORDINATION_EPSABS)
    return near + far


def _fourier_symbol(params: ModelParams, t: float):
    beta = params.beta
    rate = params.nu * t**beta

    def symbol(xi: float) -> float:
        return float(mittag_leffler_decay(beta, np.array([rate * xi**params.alpha]))[0])

    return symbol


def green_kernel_spectral(params: ModelParams, t: float, x: Point) -> float:
    """
    ``G_t(x)`` by Fourier inversion of ``E_β(-ν t^β |ξ|^α)``.

    ``d = 1`` uses the cosine transform, ``d = 3`` the radial sine transform.

    Raises:
        UnsupportedConfigurationError: Other dimensions.

    >>> round(green_kernel_spectral(ModelParams(beta=0.5), 1.0, 0.0), 5)
    0.40802
    """
    _check_time("green_kernel_spectral", t)
    r = _radius(x)
    symbol = _fourier_symbol(params, t)
    if params.d == 1:
        if r == 0:
            if params.alpha <= 1:
                return math.inf
            value, _ = checked_quad(symbol, 0.0, math.inf, "green_kernel_spectral", epsabs=SPECTRAL_EPSABS)
        else:
            value, _ = checked_quad(
                symbol, 0.0, math.inf, "green_kernel_spectral", epsabs=SPECTRAL_EPSABS, weight="cos", wvar=r
            )
        return value / math.pi
    if params.d == 3:
        if r == 0:
            return math.inf
        value, _ = checked_quad(
            lambda xi: xi * symbol(xi),
            0.0,
            math.inf,
            "green_kernel_spectral",
            epsabs=SPECTRAL_EPSABS,
            weight="sin",
            wvar=r,
        )
        return value / (2.0 * math.pi**2 * r)
    raise UnsupportedConfigurationError("green_kernel_spectral", f"d={params.d}, supported are d=1 and d=3")


def _check_l2(what: str, params: ModelParams):
    if not params.l2_admissible:
        raise DomainError(what, params.d, f"requires d < 2*alpha = {2 * params.alpha!r}")


def c_star_integral(params: ModelParams) -> float:
    """``∫_0^∞ z^{d/α-1} E_β(-z)^2 dz``."""
    _check_l2("c_star", params)
    power = params.d / params.alpha
    if params.beta == 1.0:
        return math.gamma(power) * 2.0**-power
    ml = MLParams(beta=params.beta)

    def square(z: float) -> float:
        return mittag_leffler(ml, -z) ** 2

    near, _ = checked_quad(square, 0.0, 1.0, "c_star", epsabs=1e-12, weight="alg", wvar=(power - 1.0, 0.0))
    far, _ = checked_quad(lambda z: z ** (power - 1.0) * square(z), 1.0, math.inf, "c_star", epsabs=1e-12)
    return near + far


def c_star(params: ModelParams) -> float:
    """
    Constant ``C*`` with ``∫ G_t(x)^2 dx = C* t^{-βd/α}``.

    ``C* = ν^{-d/α} · 2π^{d/2} / (α Γ(d/2)) · (2π)^{-d} · ∫_0^∞ z^{d/α-1} E_β(-z)^2 dz``

    Raises:
        DomainError: ``d ≥ 2α``.

    >>> round(c_star(ModelParams(nu=4.0)) * math.sqrt(32 * math.pi), 10)
    1.0
    """
    d, alpha = params.d, params.alpha
    integral = c_star_integral(params)
    sphere = 2.0 * math.pi ** (0.5 * d) / (alpha * math.gamma(0.5 * d))
    return params.nu ** (-d / alpha) * sphere * (2.0 * math.pi) ** (-d) * integral


def c_star_bound(params: ModelParams) -> float:
    """
    Cap ``B(d/α, 2-d/α) Γ(1+β)^{d/α}`` of :any:`c_star_integral`.

    From ``E_β(-z) ≤ 1 / (1 + z/Γ(1+β))``.

    >>> c_star_integral(ModelParams(beta=0.5)) <= c_star_bound(ModelParams(beta=0.5))
    True
    """
    _check_l2("c_star_bound", params)
    power = params.d / params.alpha
    return float(special.beta(power, 2.0 - power)) * math.gamma(1.0 + params.beta) ** power


def _spatial_scale(params: ModelParams, t: float) -> float:
    return (params.nu * t**params.beta) ** (1.0 / params.alpha)


def _radial_integral(func, lower: float, upper: float, step: float = 0.1) -> float:
    coarse = log_trapezoid(func, lower, upper, step)
    fine = log_trapezoid(func, lower, upper, step / 2)
    return richardson(coarse, fine)


def _sphere_area(d: int) -> float:
    return 2.0 * math.pi ** (0.5 * d) / math.gamma(0.5 * d)


def green_l2_norm(params: ModelParams, t: float) -> float:
    """
    ``∫ G_t(x)^2 dx`` by direct spatial quadrature in polar coordinates.

    >>> round(green_l2_norm(ModelParams(), 4.0), 7)
    0.0997356
    """
    _check_time("green_l2_norm", t)
    _check_l2("green_l2_norm", params)
    d = params.d
    scale = _spatial_scale(params, t)
    upper = 40.0 * scale if params.alpha == 2.0 else 1e6 * scale

    def density(r: np.ndarray) -> np.ndarray:
        return r ** (d - 1) * green_kernel_values(params, t, r) ** 2

    value = _sphere_area(d) * _radial_integral(density, 1e-10 * scale, upper)
    LOGGER.debug("green_l2_norm(%r, %r) = %r", params, t, value)
    return value


def _lambda_square(lam: Point) -> float:
    return float(np.sum(np.square(np.atleast_1d(np.asarray(lam, dtype=float)))))


def green_exp_moment(params: ModelParams, lam: Point, s: float) -> float:
    """
    ``∫ exp(λ·x) G_s(x) dx = E_β(ν|λ|^2 s^β)`` for ``α = 2``.

    Raises:
        UnsupportedConfigurationError: ``α ≠ 2``.

    >>> round(green_exp_moment(ModelParams(beta=0.5), 1.0, 1.0), 5)
    5.00898
    """
    if params.alpha != 2.0:
        raise UnsupportedConfigurationError("green_exp_moment", f"alpha={params.alpha}, requires alpha=2")
    _check_time("green_exp_moment", s)
    return mittag_leffler(MLParams(beta=params.beta), params.nu * _lambda_square(lam) * s**params.beta)


def green_exp_moment_quadrature(params: ModelParams, lam: float, s: float) -> float:
    """``∫ exp(λx) G_s(x) dx`` by spatial quadrature, ``d = 1``."""
    if params.d != 1:
        raise UnsupportedConfigurationError("green_exp_moment_quadrature", f"d={params.d}, requires d=1")
    _check_time("green_exp_moment_quadrature", s)
    scale = _spatial_scale(params, s)

    def density(r: np.ndarray) -> np.ndarray:
        return 2.0 * np.cosh(lam * r) * green_kernel_values(params, s, r)

    upper = 40.0 * scale
    while float(density(np.array([upper]))[0]) * upper > 1e-16:
        upper *= 2.0
    return _radial_integral(density, 1e-10 * scale, upper, step=0.05)


def kernel_tail_mass(params: ModelParams, t: float, bound: float) -> float:
    """
    ``∫_{|x|>bound} G_t(x) dx`` for ``α = 2``, ``d = 1``.

    >>> round(kernel_tail_mass(ModelParams(), 1.0, 0.0), 12)
    1.0
    """
    if params.alpha != 2.0 or params.d != 1:
        raise UnsupportedConfigurationError("kernel_tail_mass", "requires alpha=2 and d=1")
    _check_time("kernel_tail_mass", t)
    sigma, weights = clock_rule(params)
    spread = 2.0 * np.sqrt(params.nu * t**params.beta * sigma)
    return float(special.erfc(bound / spread) @ weights)


class KernelTable:
    """
    Precomputed ``G_{i·dt}(j·dx)`` for ``i = 1..nt`` and ``|j| ≤ nx``.

    Only nonnegative offsets are stored, as ``G`` is symmetric. All arrays are read-only.

    Attributes:
        values: ``(nt, nx+1)`` pointwise kernel values.
        cell_mass: ``(nt, nx+1)`` kernel mass of the cell ``[(j-1/2)dx, (j+1/2)dx]``.
        mass_row: ``(nt,)`` total mass, cell masses plus both tails.
        l2_row: ``(nt,)`` ``∫ G^2 dx``.
        tail_mass: ``(nt,)`` mass beyond ``(nx+1/2)dx`` on both sides.
    """

    def __init__(self, params, dt, dx, values, cell_mass, mass_row, l2_row, tail_mass):
        self.params: ModelParams = params
        self.dt: float = dt
        self.dx: float = dx
        self.values = readonly(values)
        self.cell_mass = readonly(cell_mass)
        self.mass_row = readonly(mass_row)
        self.l2_row = readonly(l2_row)
        self.tail_mass = readonly(tail_mass)

    @property
    def nt(self) -> int:
        """Number of time levels."""
        return self.values.shape[0]

    @property
    def nx(self) -> int:
        """Largest offset."""
        return self.values.shape[1] - 1

    def value(self, i: int, j: int) -> float:
        """``G_{i·dt}(j·dx)``."""
        if not 1 <= i <= self.nt:
            raise IndexError(f"time level {i} outside 1..{self.nt}")
        return float(self.values[i - 1, abs(j)])

    def profile(self, i: int) -> np.ndarray:
        """Row ``i`` over offsets ``-nx..nx``."""
        row = self.values[i - 1]
        return np.concatenate((row[:0:-1], row))

    def records(self) -> Iterator[dict]:
        """Rows ``i, j, t, x, G`` for export."""
        for i in range(1, self.nt + 1):
            for j in range(-self.nx, self.nx + 1):
                yield {"i": i, "j": j, "t": i * self.dt, "x": j * self.dx, "G": self.value(i, j)}

    def __repr__(self):
        return f"KernelTable({self.params!r}, dt={self.dt!r}, dx={self.dx!r}, nt={self.nt}, nx={self.nx})"


def _cell_masses(params: ModelParams, t: float, dx: float, nx: int) -> Tuple[np.ndarray, float]:
    sigma, weights = clock_rule(params)
    spread = 2.0 * np.sqrt(params.nu * t**params.beta * sigma)
    edges = (np.arange(nx + 2) - 0.5) * dx
    edges[0] = 0.0
    tails = special.erfc(edges[:, None] / spread[None, :]) @ weights
    # erfc at 0 counts both sides, the inner cell is split in halves
    masses = 0.5 * (tails[:-1] - tails[1:])
    masses[0] = tails[0] - tails[1]
    return masses, float(tails[-1])


def _table_row(params: ModelParams, t: float, dx: float, nx: int):
    offsets = np.arange(nx + 1) * dx
    values = green_kernel_values(params, t, offsets)
    cell_mass, tail = _cell_masses(params, t, dx, nx)
    mass = float(cell_mass[0] + 2.0 * np.sum(cell_mass[1:]) + tail)
    return values, cell_mass, mass, green_l2_norm(params, t), tail


def build_kernel_table(
    params: ModelParams, dt: float, dx: float, nt: int, nx: int, threads: Optional[int] = None
) -> KernelTable:
    """
    Tabulate the kernel for the simulator.

    Rows are independent and computed concurrently, capped by the ``threads`` option.

    Raises:
        DomainError: ``d ≠ 1`` or the simulation condition ``d < min(2, 1/β)α`` is violated.
        UnsupportedConfigurationError: ``α ≠ 2``.
        TruncationError: More than ``1e-4`` of the mass at the last time lies beyond the table.

    >>> table = build_kernel_table(ModelParams(), 0.25, 0.5, 4, 16)
    >>> table.nt, table.nx
    (4, 16)
    """
    if params.d != 1:
        raise DomainError("build_kernel_table", params.d, "requires d=1")
    if not params.simulation_admissible:
        raise DomainError("build_kernel_table", params, "requires d < min(2, 1/beta) alpha")
    if params.alpha != 2.0:
        raise UnsupportedConfigurationError("build_kernel_table", f"alpha={params.alpha}, requires alpha=2")
    if dt <= 0 or dx <= 0 or nt < 1 or nx < 1:
        raise DomainError("build_kernel_table", (dt, dx, nt, nx), "requires positive steps and sizes")
    workers = AppConfig().threads(threads)
    LOGGER.info("build_kernel_table(%r): nt=%d nx=%d with %d threads", params, nt, nx, workers)
    times = dt * np.arange(1, nt + 1)
    with ThreadPoolExecutor(max_workers=workers) as executor:
        rows = list(executor.map(lambda t: _table_row(params, float(t), dx, nx), times))
    values, cell_mass, mass_row, l2_row, tail_mass = (np.array(column) for column in zip(*rows))
    if tail_mass[-1] > KERNEL_TABLE_TAIL_LIMIT:
        raise TruncationError(
            "build_kernel_table", float(tail_mass[-1]), KERNEL_TABLE_TAIL_LIMIT, "Widen the spatial domain."
        )
    return KernelTable(params, dt, dx, values, cell_mass, mass_row, l2_row, tail_mass)

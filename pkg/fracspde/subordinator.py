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
Stable Subordinator And Its Inverse.

``D`` is the β-stable subordinator with ``E[exp(-s D_1)] = exp(-s^β)``, ``g_β`` the density of ``D_1``.
The inverse subordinator ``E_t`` is the first passage time of ``D`` above ``t``. It has the density

    f_{E_t}(x) = t / β · x^{-1-1/β} · g_β(t x^{-1/β}),

which is ``t^{-β} M_β(x t^{-β})`` with the Wright function ``M_β``.

>>> p = SubordinatorParams(beta=0.5)
>>> round(stable_density(p, 1.0), 7)
0.2196956
>>> round(inverse_subordinator_density(p, 1.0, 2.0), 7)
0.2075537
"""

import math
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
from numpy.polynomial import polynomial
from scipy import special

from ._quadrature import checked_quad, graded_edges, panel_rule
from ._util import LOGGER
from .datamodel import MLParams, SubordinatorParams
from .exceptions import AccuracyError, DomainError
from .special_fn import mittag_leffler

_COEF_TERMS = 4096
_COEF_FLOOR = -42.0
_KANTER_PANELS = 16
_KANTER_GRADED = 40
_LOG_MAX = 700.0
_CHERNOFF_EXPONENT = 30.0


@lru_cache(maxsize=64)
def _series_coefficients(beta: float, shift: int, power_shift: int) -> np.ndarray:
    """
    Signed ``Γ(β(k+shift)) sin(πβ(k+shift)) / (π (k+power_shift)!)`` for ``k = 0, 1, ...``.

    Truncated once the magnitudes dropped below ``exp(-42)`` for good.
    """
    ks = np.arange(_COEF_TERMS, dtype=float)
    arg = beta * (ks + shift)
    sines = np.sin(math.pi * arg)
    with np.errstate(divide="ignore"):
        logs = special.gammaln(arg) + np.log(np.abs(sines)) - math.log(math.pi) - special.gammaln(ks + power_shift + 1)
    alive = np.nonzero(logs >= _COEF_FLOOR)[0]
    count = int(alive[-1]) + 2 if alive.size else 1
    if count >= _COEF_TERMS:
        raise AccuracyError("subordinator series", math.nan, float(np.exp(logs[-1])))
    coefs = np.sign(sines[:count]) * np.exp(logs[:count])
    coefs.flags.writeable = False
    return coefs


def _wright_series(beta: float, sigma: np.ndarray) -> np.ndarray:
    # M_β(σ) = Σ_k (-σ)^k / (k! Γ(1-β-βk)), 1/Γ(1-x) = Γ(x) sin(πx) / π
    coefs = _series_coefficients(beta, 1, 0)
    signs = np.where(np.arange(coefs.size) % 2 == 1, -1.0, 1.0)
    return polynomial.polyval(sigma, signs * coefs)


def _stable_series(beta: float, u: np.ndarray) -> np.ndarray:
    # g_β(u) = u^{-1} Σ_{k≥1} (-1)^{k+1} β Γ(βk) sin(πβk) / (π (k-1)!) · u^{-βk}
    coefs = _series_coefficients(beta, 1, 0)
    signs = np.where(np.arange(coefs.size) % 2 == 1, -1.0, 1.0)
    coefs = np.concatenate(([0.0], beta * signs * coefs))
    return polynomial.polyval(u**-beta, coefs) / u


def _stable_tail_series(beta: float, upper: float) -> float:
    # ∫_U^∞ g_β = Σ_{k≥1} (-1)^{k+1} Γ(βk) sin(πβk) / (π k!) · U^{-βk}
    coefs = _series_coefficients(beta, 1, 1)
    signs = np.where(np.arange(coefs.size) % 2 == 1, -1.0, 1.0)
    coefs = np.concatenate(([0.0], signs * coefs))
    return float(polynomial.polyval(upper**-beta, coefs))


@lru_cache(maxsize=64)
def _kanter_rule(beta: float, order: int) -> Tuple[np.ndarray, np.ndarray, float]:
    nodes, weights = panel_rule(graded_edges(math.pi, _KANTER_PANELS, _KANTER_GRADED), order=order)
    q = 1.0 / (1.0 - beta)
    log_a = beta * q * np.log(np.sin(beta * nodes)) + np.log(np.sin((1.0 - beta) * nodes)) - q * np.log(np.sin(nodes))
    a = np.exp(np.minimum(log_a, _LOG_MAX))
    a0 = beta ** (beta * q) * (1.0 - beta)
    a.flags.writeable = False
    return a, weights, a0


def _log_kanter(beta: float, u: np.ndarray, order: int = 16) -> np.ndarray:
    """
    ``log g_β(u)`` for ``0 < u < 1`` by Kanter's integral.

        g_β(u) = β / ((1-β) π) · u^{-1/(1-β)} ∫_0^π A(φ) exp(-A(φ) u^{-β/(1-β)}) dφ

    ``A`` increases from ``A(0) = β^{β/(1-β)} (1-β)``, so the integrand concentrates near 0 for small ``u``.
    """
    a, weights, a0 = _kanter_rule(beta, order)
    q = 1.0 / (1.0 - beta)
    s = u ** (-beta * q)
    with np.errstate(under="ignore", over="ignore"):
        integrand = a[None, :] * np.exp(-np.maximum(a[None, :] - a0, 0.0) * s[:, None])
    integral = integrand @ weights
    with np.errstate(divide="ignore"):
        return math.log(beta * q / math.pi) - q * np.log(u) - a0 * s + np.log(integral)


def stable_density_values(beta: float, u: np.ndarray) -> np.ndarray:
    """
    Vectorized ``g_β(u)``, zero for ``u ≤ 0``.

    >>> np.round(stable_density_values(0.5, np.array([-1.0, 0.5, 1.0])), 7)
    array([0.       , 0.4839414, 0.2196956])
    """
    if not 0 < beta < 1:
        raise DomainError("stable_density", beta, "requires 0 < beta < 1")
    u = np.asarray(u, dtype=float)
    result = np.zeros_like(u)
    large = u >= 1.0
    small = (u > 0) & ~large
    if np.any(large):
        result[large] = _stable_series(beta, u[large])
    if np.any(small):
        with np.errstate(under="ignore"):
            result[small] = np.exp(_log_kanter(beta, u[small]))
    return np.maximum(result, 0.0)


def stable_density(p: SubordinatorParams, u: float) -> float:
    """
    One-sided β-stable density ``g_β(u)``.

    Above ``u = 1`` the convergent series in ``u^{-β}`` is summed. Below, Kanter's integral is
    evaluated with two Gauss-Legendre orders whose agreement certifies the result.

    Raises:
        DomainError: ``u`` is not finite.
        AccuracyError: The two quadrature orders disagree.

    >>> stable_density(SubordinatorParams(beta=0.5), -1.0)
    0.0
    """
    u = float(u)
    if not math.isfinite(u):
        raise DomainError("stable_density", u, "argument must be finite")
    if u <= 0:
        return 0.0
    if u >= 1.0:
        return float(stable_density_values(p.beta, np.array([u]))[0])
    coarse = math.exp(float(_log_kanter(p.beta, np.array([u]), order=16)[0]))
    fine = math.exp(float(_log_kanter(p.beta, np.array([u]), order=32)[0]))
    if abs(fine - coarse) > 1e3 * p.target_rel_err * fine + 1e-300:
        raise AccuracyError("stable_density", fine, abs(fine - coarse))
    return fine


def unit_clock_density(beta: float, sigma: np.ndarray) -> np.ndarray:
    """
    Vectorized density of ``E_1``, the Wright function ``M_β(σ)``.

    >>> np.round(unit_clock_density(0.5, np.array([0.0, 2.0])), 7)
    array([0.5641896, 0.2075537])
    """
    if not 0 < beta < 1:
        raise DomainError("unit_clock_density", beta, "requires 0 < beta < 1")
    sigma = np.asarray(sigma, dtype=float)
    result = np.zeros_like(sigma)
    near = (sigma >= 0) & (sigma <= 1.0)
    far = sigma > 1.0
    if np.any(near):
        result[near] = _wright_series(beta, sigma[near])
    if np.any(far):
        tail = sigma[far]
        log_g = _log_kanter(beta, tail ** (-1.0 / beta))
        with np.errstate(under="ignore"):
            result[far] = np.exp(log_g - math.log(beta) - (1.0 + 1.0 / beta) * np.log(tail))
    return np.maximum(result, 0.0)


def inverse_subordinator_density(p: SubordinatorParams, t: float, x: float) -> float:
    """
    Density ``f_{E_t}(x)`` of the inverse subordinator, zero for ``x ≤ 0``.

    Raises:
        DomainError: ``t ≤ 0``.

    >>> p = SubordinatorParams(beta=0.3)
    >>> inverse_subordinator_density(p, 1.0, -0.5)
    0.0
    """
    if not (math.isfinite(t) and t > 0):
        raise DomainError("inverse_subordinator_density", t, "requires t > 0")
    if x <= 0:
        return 0.0
    scale = t**-p.beta
    return scale * float(unit_clock_density(p.beta, np.array([x * scale]))[0])


def inverse_subordinator_moment(p: SubordinatorParams, s: float, k: float) -> float:
    """
    ``E[E_s^k] = Γ(1+k) s^{βk} / Γ(1+βk)`` for ``k > -1``.

    >>> p = SubordinatorParams(beta=0.5)
    >>> round(inverse_subordinator_moment(p, 1.0, 1.0), 7)
    1.1283792
    >>> inverse_subordinator_moment(p, 1.0, 0.0)
    1.0
    """
    if not (math.isfinite(s) and s > 0):
        raise DomainError("inverse_subordinator_moment", s, "requires s > 0")
    if not k > -1:
        raise DomainError("inverse_subordinator_moment", k, "requires k > -1")
    return math.exp(special.gammaln(1.0 + k) - special.gammaln(1.0 + p.beta * k) + p.beta * k * math.log(s))


def inverse_subordinator_mgf(p: SubordinatorParams, w: float, s: float) -> float:
    """
    ``E[exp(w E_s)] = E_β(w s^β)``.

    >>> inverse_subordinator_mgf(SubordinatorParams(beta=0.5), 0.0, 3.0)
    1.0
    """
    if not (math.isfinite(s) and s > 0):
        raise DomainError("inverse_subordinator_mgf", s, "requires s > 0")
    ml = MLParams(beta=p.beta, target_rel_err=p.target_rel_err)
    return mittag_leffler(ml, w * s**p.beta)


def _scalar_clock(beta: float) -> Callable[[float], float]:
    def density(sigma: float) -> float:
        return float(unit_clock_density(beta, np.array([sigma]))[0])

    return density


def inverse_subordinator_expectation(p: SubordinatorParams, t: float, func: Callable[[float], float]) -> float:
    """
    ``E[func(E_t)]`` by adaptive quadrature over the density.

    >>> p = SubordinatorParams(beta=0.5)
    >>> round(inverse_subordinator_expectation(p, 1.0, lambda x: x), 6)
    1.128379
    """
    if not (math.isfinite(t) and t > 0):
        raise DomainError("inverse_subordinator_expectation", t, "requires t > 0")
    scale = t**p.beta
    clock = _scalar_clock(p.beta)

    def integrand(sigma: float) -> float:
        return func(sigma * scale) * clock(sigma)

    near, _ = checked_quad(integrand, 0.0, 1.0, "inverse_subordinator_expectation", epsabs=1e-12)
    far, _ = checked_quad(integrand, 1.0, math.inf, "inverse_subordinator_expectation", epsabs=1e-12)
    return near + far


def inverse_subordinator_laplace(p: SubordinatorParams, u: float, lam: float) -> float:
    """
    ``∫_0^∞ exp(-λt) f_{E_t}(u) dt`` by quadrature. Equals ``λ^{β-1} exp(-u λ^β)``.

    >>> p = SubordinatorParams(beta=0.5)
    >>> round(inverse_subordinator_laplace(p, 1.0, 1.0), 6) == round(math.exp(-1.0), 6)
    True
    """
    if not (u > 0 and lam > 0):
        raise DomainError("inverse_subordinator_laplace", (u, lam), "requires u > 0 and lambda > 0")
    clock = _scalar_clock(p.beta)

    def integrand(t: float) -> float:
        if t <= 0:
            return 0.0
        scale = t**-p.beta
        return math.exp(-lam * t) * scale * clock(u * scale)

    knee = u ** (1.0 / p.beta)
    near, _ = checked_quad(integrand, 0.0, knee, "inverse_subordinator_laplace", epsabs=1e-12)
    far, _ = checked_quad(integrand, knee, math.inf, "inverse_subordinator_laplace", epsabs=1e-12)
    return near + far


def stable_density_mass(p: SubordinatorParams) -> float:
    """
    ``∫_0^∞ g_β``: quadrature on (0, 1] plus the exact tail series beyond 1.

    >>> round(stable_density_mass(SubordinatorParams(beta=0.5)), 8)
    1.0
    """
    beta = p.beta
    edges = graded_edges(1.0, 8, 30)
    nodes, weights = panel_rule(edges, order=16)
    body = float(stable_density_values(beta, nodes) @ weights)
    tail = _stable_tail_series(beta, 1.0)
    LOGGER.debug("stable_density_mass(%r): body %r, tail %r", beta, body, tail)
    return body + tail


def clock_truncation(beta: float, t: float = 1.0) -> float:
    """
    Truncation point ``X`` of the density of ``E_t`` with ``P(E_t > X) ≤ exp(-30)``.

    Chernoff: ``P(E_1 > X) ≤ E_β(1) exp(-X)``.
    """
    log_mgf = math.log(mittag_leffler(MLParams(beta=beta), 1.0)) if beta < 1 else 1.0
    return (log_mgf + _CHERNOFF_EXPONENT) * t**beta


def inverse_subordinator_mass(p: SubordinatorParams, t: float = 1.0) -> Tuple[float, float]:
    """
    ``∫_0^∞ f_{E_t}``: quadrature up to :any:`clock_truncation` and the Chernoff bound of the rest.

    Returns:
        ``(mass, tail_bound)``

    >>> mass, bound = inverse_subordinator_mass(SubordinatorParams(beta=0.5))
    >>> round(mass, 8), bound < 1e-12
    (1.0, True)
    """
    if not (math.isfinite(t) and t > 0):
        raise DomainError("inverse_subordinator_mass", t, "requires t > 0")
    upper = clock_truncation(p.beta, t)
    nodes, weights = panel_rule(np.linspace(0.0, upper, 65), order=16)
    scale = t**-p.beta
    mass = float(scale * unit_clock_density(p.beta, nodes * scale) @ weights)
    return mass, math.exp(-_CHERNOFF_EXPONENT)

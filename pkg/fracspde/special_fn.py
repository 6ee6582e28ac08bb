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
Mittag-Leffler And Gamma Functions.

The Mittag-Leffler function ``E_β(z) = Σ_k z^k / Γ(1 + βk)`` replaces the exponential in
time-fractional equations. For ``z ≤ 0`` it is squeezed by

    1 / (1 + Γ(1-β) x)  ≤  E_β(-x)  ≤  1 / (1 + x / Γ(1+β)),

which :any:`ml_bounds` exposes as a first class check.

>>> from fracspde.datamodel import MLParams
>>> round(mittag_leffler(MLParams(beta=0.5), -1.0), 7)
0.4275836
"""

import math
from functools import lru_cache
from typing import Tuple

import mpmath as mp
import numpy as np
from scipy import integrate, special

from ._util import LOGGER
from .datamodel import MLParams
from .exceptions import AccuracyError, DomainError

_EXP_MAX = 709.0
_ASYMPTOTIC_TERMS = 200
_SERIES_MAX_TERMS = 2**20
_EPS = 2.2e-16


def gamma_fn(x: float) -> float:
    """
    Gamma function for ``x > 0``.

    >>> gamma_fn(1.0)
    1.0
    >>> round(gamma_fn(0.5), 10)
    1.7724538509
    >>> gamma_fn(0.0)
    Traceback (most recent call last):
      ...
    fracspde.exceptions.DomainError: gamma_fn: 0.0 is outside the domain: requires finite x > 0.
    """
    if not (math.isfinite(x) and x > 0):
        raise DomainError("gamma_fn", x, "requires finite x > 0")
    return float(special.gamma(x))


def ml_bounds(beta: float, x: float) -> Tuple[float, float]:
    """
    Two-sided bound of ``E_β(-x)``.

    Args:
        beta: Order in (0, 1).
        x: Positive argument.

    Returns:
        ``(1 / (1 + Γ(1-β) x), 1 / (1 + x / Γ(1+β)))``

    >>> lower, upper = ml_bounds(0.5, 1.0)
    >>> round(lower, 5), round(upper, 5)
    (0.36079, 0.46984)
    """
    if not 0 < beta < 1:
        raise DomainError("ml_bounds", beta, "requires 0 < beta < 1")
    if not (math.isfinite(x) and x > 0):
        raise DomainError("ml_bounds", x, "requires x > 0")
    lower = 1.0 / (1.0 + gamma_fn(1.0 - beta) * x)
    upper = 1.0 / (1.0 + x / gamma_fn(1.0 + beta))
    return lower, upper


def mittag_leffler(p: MLParams, z: float) -> float:
    """
    Mittag-Leffler function ``E_β(z)`` with relative error below ``p.target_rel_err``.

    Small arguments are summed as power series, in double precision if the cancellation
    allows it and with :any:`mpmath` otherwise. Large negative arguments use the asymptotic
    expansion, as long as its remainder bound meets the accuracy goal.

    Args:
        p: Order and accuracy goal.
        z: Finite real argument.

    Raises:
        DomainError: ``z`` is not finite.
        AccuracyError: The result is not representable or the goal cannot be met.

    >>> mittag_leffler(MLParams(beta=0.7), 0.0)
    1.0
    >>> round(mittag_leffler(MLParams(beta=1.0), 1.0), 9)
    2.718281828
    """
    z = float(z)
    if not math.isfinite(z):
        raise DomainError("mittag_leffler", z, "argument must be finite")
    return _mittag_leffler(p.beta, z, p.target_rel_err)


@lru_cache(maxsize=8192)
def _mittag_leffler(beta: float, z: float, tol: float) -> float:
    if z == 0.0:
        return 1.0
    if beta == 1.0:
        if z > _EXP_MAX:
            raise AccuracyError("mittag_leffler", math.inf, math.inf)
        return math.exp(z)
    if z < 0:
        value = _asymptotic(beta, -z, tol)
        if value is not None:
            return value
    return _series(beta, z, tol)


def _asymptotic(beta: float, x: float, tol: float):
    """
    ``E_β(-x) = Σ_{k=1}^{K} (-1)^{k+1} x^{-k} / Γ(1-βk) + R_K`` or ``None`` if the remainder bound stays too large.

    ``|R_K| ≤ Γ(β(K+1)) x^{-K-1} / (π m)`` with ``m = sin(πβ)`` for ``cos(πβ) < 0`` and ``m = 1`` otherwise.
    """
    log_x = math.log(x)
    margin = math.sin(math.pi * beta) if math.cos(math.pi * beta) < 0 else 1.0
    terms = []
    previous = math.inf
    for k in range(1, _ASYMPTOTIC_TERMS + 1):
        # 1/Γ(1-βk) = Γ(βk) sin(πβk) / π
        sin_k = math.sin(math.pi * beta * k)
        if sin_k != 0.0:
            log_term = special.gammaln(beta * k) + math.log(abs(sin_k)) - math.log(math.pi) - k * log_x
            sign = (-1.0) ** (k + 1) * math.copysign(1.0, sin_k)
            terms.append(sign * math.exp(log_term))
        bound = math.exp(special.gammaln(beta * (k + 1)) - (k + 1) * log_x) / (math.pi * margin)
        value = math.fsum(terms)
        if value > 0 and bound <= 0.1 * tol * value:
            LOGGER.debug("mittag_leffler(%r, %r): asymptotic with %d terms, bound %.3e", beta, -x, k, bound)
            return value
        if bound > previous:
            break
        previous = bound
    return None


def _series(beta: float, z: float, tol: float) -> float:
    x = abs(z)
    log_x = math.log(x)
    log_scale = math.log(ml_bounds(beta, x)[0]) if z < 0 else None
    count = 64
    while True:
        ks = np.arange(count, dtype=float)
        log_gamma = special.gammaln(1.0 + beta * ks)
        logs = ks * log_x - log_gamma
        log_max = float(np.max(logs))
        threshold = math.log(tol) + (log_max if log_scale is None else log_scale) - 5.0
        if logs[-1] < logs[-2] and logs[-1] < threshold:
            break
        count *= 2
        if count > _SERIES_MAX_TERMS:
            signs = np.where(ks % 2 == 1, -1.0, 1.0) if z < 0 else np.ones_like(ks)
            with np.errstate(over="ignore"):
                partial = float(np.sum(signs * np.exp(np.minimum(logs, _EXP_MAX))))
            raise AccuracyError("mittag_leffler", partial, math.exp(min(float(logs[-1]), _EXP_MAX)))
    if z > 0 and log_max > _EXP_MAX:
        raise AccuracyError("mittag_leffler", math.inf, math.inf)
    magnitudes = np.exp(logs - log_max)
    log_sum_abs = log_max + math.log(math.fsum(magnitudes))
    # rounding of exp(log term) is proportional to the size of the log
    rounding = _EPS * float(np.sum(magnitudes * (2.0 + np.abs(ks * log_x) + log_gamma))) * math.exp(log_max)
    reference = math.exp(log_sum_abs) if log_scale is None else math.exp(log_scale)
    if rounding <= 0.1 * tol * reference:
        signs = np.where(ks % 2 == 1, -1.0, 1.0) if z < 0 else np.ones_like(ks)
        value = math.fsum(signs * np.exp(logs))
        LOGGER.debug("mittag_leffler(%r, %r): float series with %d terms", beta, z, count)
    else:
        value = _series_mp(beta, z, count, log_sum_abs)
    if not math.isfinite(value):
        raise AccuracyError("mittag_leffler", value, math.inf)
    return value


def _series_mp(beta: float, z: float, count: int, log_sum_abs: float) -> float:
    dps = max(int(math.ceil(log_sum_abs / math.log(10.0))), 0) + 25
    LOGGER.debug("mittag_leffler(%r, %r): extended series with %d terms at %d digits", beta, z, count, dps)
    with mp.workdps(dps):
        arg = mp.mpf(z)
        order = mp.mpf(beta)
        power = mp.mpf(1)
        total = mp.mpf(0)
        for k in range(count):
            total += power * mp.rgamma(1 + order * k)
            power *= arg
        return float(total)


@lru_cache(maxsize=64)
def _decay_step(beta: float) -> float:
    # strip of analyticity of the integrand in log(r): poles at ±iπ(1-β)/β, growth beyond ±iπ/2
    width = 0.9 * min(math.pi / 2, math.pi * (1.0 - beta) / beta)
    return 2 * math.pi * width / 37.0


def mittag_leffler_decay(beta: float, x: np.ndarray) -> np.ndarray:
    """
    Vectorized ``E_β(-x)`` for ``x ≥ 0``.

    Uses the completely monotone representation

        E_β(-x) = ∫_0^∞ exp(-r x^{1/β}) sin(πβ) r^{β-1} / (π (r^{2β} + 2 r^β cos(πβ) + 1)) dr

    integrated by the trapezoid rule in ``log(r)``. All terms are positive, so there is no cancellation.

    >>> np.round(mittag_leffler_decay(0.5, np.array([0.0, 1.0])), 7)
    array([1.       , 0.4275836])
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise DomainError("mittag_leffler_decay", x, "requires finite x >= 0")
    if not 0 < beta <= 1:
        raise DomainError("mittag_leffler_decay", beta, "requires 0 < beta <= 1")
    if beta == 1.0:
        return np.exp(-x)
    result = np.ones_like(x)
    positive = x > 0
    if not np.any(positive):
        return result
    s = x[positive] ** (1.0 / beta)
    log_floor = math.log1p(gamma_fn(1.0 - beta) * float(np.max(x)))
    lower = (math.log(1e-17 * beta) - log_floor) / beta - math.log(float(np.max(s)))
    upper = min((39.0 + log_floor) / beta, math.log((40.0 + log_floor) / float(np.min(s))))
    upper = max(upper, lower + 1.0)
    step = _decay_step(beta)
    logs = np.linspace(lower, upper, int(math.ceil((upper - lower) / step)) + 1)
    w = np.exp(beta * logs)
    kernel = math.sin(math.pi * beta) / math.pi * w / (w * w + 2.0 * w * math.cos(math.pi * beta) + 1.0)
    radii = np.exp(logs)
    with np.errstate(under="ignore"):
        integrand = np.exp(-np.outer(s, radii)) * kernel[None, :]
    result[positive] = integrate.trapezoid(integrand, logs, axis=-1)
    return result


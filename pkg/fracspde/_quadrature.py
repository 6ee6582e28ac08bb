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

"""Quadrature Helpers."""

from functools import lru_cache
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from ._util import LOGGER
from .exceptions import AccuracyError


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Gauss-Legendre nodes and weights on [-1, 1].

    >>> nodes, weights = gauss_legendre(4)
    >>> round(float(weights.sum()), 12)
    2.0
    """
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


def panel_rule(edges: Sequence[float], order: int = 16) -> Tuple[np.ndarray, np.ndarray]:
    """
    Composite Gauss-Legendre rule over consecutive ``edges``.

    >>> nodes, weights = panel_rule([0.0, 1.0, 3.0], order=4)
    >>> round(float(np.sum(weights * nodes**2)), 12)
    9.0
    """
    edges = np.asarray(edges, dtype=float)
    ref_nodes, ref_weights = gauss_legendre(order)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (lo + half * (ref_nodes[None, :] + 1.0)).ravel()
    weights = (half * ref_weights[None, :]).ravel()
    return nodes, weights


def graded_edges(upper: float, panels: int, graded: int, ratio: float = 0.5) -> np.ndarray:
    """
    Panel edges on [0, ``upper``] with the first of ``panels`` uniform panels split geometrically.

    >>> graded_edges(4.0, 4, 2)
    array([0.  , 0.25, 0.5 , 1.  , 2.  , 3.  , 4.  ])
    """
    uniform = np.linspace(0.0, upper, panels + 1)
    first = uniform[1] * ratio ** np.arange(graded, 0, -1)
    return np.concatenate(([0.0], first, uniform[1:]))


def checked_quad(
    func: Callable,
    lower: float,
    upper: float,
    what: str,
    epsabs: float = 1e-10,
    epsrel: float = 1e-10,
    limit: int = 200,
    accept: Optional[float] = None,
    **kwargs,
) -> Tuple[float, float]:
    """
    :any:`scipy.integrate.quad` which raises :any:`AccuracyError` instead of warning.

    The result is accepted if quad reports no problem, or if its error estimate is below ``accept``
    (``100 * max(epsabs, epsrel * |value|)`` by default).

    >>> value, error = checked_quad(lambda x: x * x, 0.0, 1.0, "square")
    >>> round(value, 12)
    0.333333333333
    """
    result = integrate.quad(func, lower, upper, epsabs=epsabs, epsrel=epsrel, limit=limit, full_output=1, **kwargs)
    value, error = float(result[0]), float(result[1])
    if accept is None:
        accept = 100 * max(epsabs, epsrel * abs(value))
    if not np.isfinite(value) or (len(result) > 3 and error > accept):
        LOGGER.debug("%s: quad on [%r, %r] failed: %s", what, lower, upper, result[3] if len(result) > 3 else "")
        raise AccuracyError(what, value, error)
    return value, error


def log_trapezoid(func: Callable[[np.ndarray], np.ndarray], lower: float, upper: float, step: float) -> float:
    """
    Trapezoid rule for ``∫ func(r) dr`` on [``lower``, ``upper``] in the variable ``log(r)``.

    Integrands which decay at both ends converge geometrically in ``step``.

    >>> round(log_trapezoid(lambda r: np.exp(-r), 1e-12, 60.0, 0.05), 10)
    1.0
    """
    count = int(np.ceil((np.log(upper) - np.log(lower)) / step))
    logs = np.linspace(np.log(lower), np.log(upper), count + 1)
    radii = np.exp(logs)
    values = func(radii) * radii
    return float(integrate.trapezoid(values, logs))


def richardson(coarse: float, fine: float, order: int = 2) -> float:
    """
    Richardson extrapolation of two results at steps ``h`` and ``h/2``.

    >>> richardson(1.0, 4.0)
    5.0
    """
    return fine + (fine - coarse) / (2**order - 1)

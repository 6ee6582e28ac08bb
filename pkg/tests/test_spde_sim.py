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

"""Simulator And Estimator Testing."""

import math

import numpy as np
from pytest import approx, fixture, mark, raises
from scipy import special

from fracspde.datamodel import BoundaryPolicy, InitialCondition, ModelParams, NonlinearitySpec, SpaceTimeGrid
from fracspde.exceptions import DivergenceError, DomainError, EstimationError, TruncationError
from fracspde.kernel import build_kernel_table
from fracspde.spde_sim import (
    FieldEnsemble,
    MomentCurve,
    adaptedness_check,
    convexity_from_rates,
    corollary_constant,
    correlation_limit,
    envelope_check,
    estimate_front,
    estimate_lyapunov,
    estimate_moment,
    front_bounds,
    isometry_check,
    l2_energy_check,
    lower_bound_rate,
    moment_curve,
    positive_front_threshold,
    region_indicator_check,
    replica_correlation,
    second_moment_renewal,
    simulate,
    tail_energy_laplace,
    weighted_norm,
    weighted_young_constant,
)

PARAMS = ModelParams(beta=0.5)
SIGMA = NonlinearitySpec(lam=1.0)
PERIODIC = SpaceTimeGrid(x_min=-8, x_max=8, nx=64, nt=16, boundary_policy=BoundaryPolicy.PERIODIC)
PADDED = SpaceTimeGrid(x_min=-8, x_max=8, nx=64, nt=16)


@fixture(scope="module")
def ensemble():
    """Linear noise, constant initial data, periodic domain."""
    return simulate(PARAMS, PERIODIC, np.ones(PERIODIC.nx), SIGMA, seed=3, replicas=200)


@fixture(scope="module")
def localized():
    """Linear noise, indicator initial data, zero-padded domain."""
    u0 = InitialCondition(kind="indicator", half_width=1.0).sample(PADDED)
    return simulate(PARAMS, PADDED, u0, SIGMA, seed=5, replicas=100)


def test_shape(ensemble):
    """One record per replica, level and cell."""
    assert ensemble.fields.shape == (200, 17, 64)
    assert ensemble.energy.shape == (200, 17)
    assert ensemble.replicas == 200
    assert ensemble.times[-1] == 1.0
    assert ensemble.x[0] == -7.875
    assert np.all(ensemble.fields[:, 0] == 1.0)
    with raises(ValueError):
        ensemble.fields[0, 0, 0] = 0.0


def test_deterministic_seed():
    """Same seed, same fields, regardless of the worker count."""
    first = simulate(PARAMS, PERIODIC, np.ones(64), SIGMA, seed=11, replicas=70, threads=1)
    second = simulate(PARAMS, PERIODIC, np.ones(64), SIGMA, seed=11, replicas=70, threads=4)
    other = simulate(PARAMS, PERIODIC, np.ones(64), SIGMA, seed=12, replicas=70, threads=1)
    assert np.array_equal(first.fields, second.fields)
    assert np.array_equal(first.energy, second.energy)
    assert not np.array_equal(first.fields, other.fields)


def test_replica_prefix():
    """A replica does not depend on the total number of replicas."""
    small = simulate(PARAMS, PERIODIC, np.ones(64), SIGMA, seed=2, replicas=3)
    large = simulate(PARAMS, PERIODIC, np.ones(64), SIGMA, seed=2, replicas=66)
    assert small.fields == approx(large.fields[:3], rel=1e-12)


def test_adaptedness():
    """Zeroing the noise after a step leaves all earlier levels bit for bit unchanged."""
    e = simulate(PARAMS, PERIODIC, np.ones(64), SIGMA, seed=9, replicas=70)
    for level in (0, 5, 15):
        report = adaptedness_check(e, level)
        assert report.level == level
        assert report.prefix_equal
        assert report.suffix_changed
        assert report.passed
    last = adaptedness_check(e, 16)
    assert last.passed
    assert not last.suffix_changed
    truncated = simulate(PARAMS, PERIODIC, np.ones(64), SIGMA, seed=9, replicas=70, noise_levels=5)
    assert np.array_equal(truncated.fields[:, :6], e.fields[:, :6])
    assert not np.array_equal(truncated.fields[:, 6], e.fields[:, 6])
    with raises(DomainError):
        adaptedness_check(e, 17)
    with raises(DomainError):
        simulate(PARAMS, PERIODIC, np.ones(64), SIGMA, seed=9, replicas=2, noise_levels=-1)


@mark.parametrize("lam", [0.5, 1.0])
@mark.parametrize("beta", [1.0, 0.75, 0.5])
def test_renewal_oracle(beta, lam):
    """Linear noise and constant data: the simulated second moment solves the renewal equation."""
    params = ModelParams(beta=beta)
    sigma = NonlinearitySpec(lam=lam)
    e = simulate(params, PERIODIC, np.ones(64), sigma, seed=21, replicas=400, cells=[16, 32, 48])
    exact = second_moment_renewal(params, sigma, 1.0, e.times[1:]).f
    assert np.all(np.diff(exact) > 0)
    for cell in e.cells:
        curve = moment_curve(e, 2, int(cell))
        scores = np.abs(curve.estimate[1:] - exact) / curve.stderr[1:]
        assert np.max(scores) <= 4.0


def test_noise_free():
    """σ ≡ 0 leaves constant initial data untouched."""
    e = simulate(PARAMS, PADDED, np.ones(64), NonlinearitySpec(lam=0.0), seed=0, replicas=4)
    assert np.all(e.fields == 1.0)
    assert e.energy == approx(np.full((4, 17), 16.0))
    point = estimate_moment(e, 2, 16, 10)
    assert (point.estimate, point.stderr) == (1.0, 0.0)


def test_cells():
    """Only the requested cells are recorded."""
    e = simulate(PARAMS, PERIODIC, np.ones(64), SIGMA, seed=1, replicas=2, cells=[40, 10, 20])
    assert e.fields.shape == (2, 17, 3)
    assert e.cells.tolist() == [10, 20, 40]
    assert e.positions([20, 40]).tolist() == [1, 2]
    assert e.energy.shape == (2, 17)
    with raises(EstimationError):
        e.positions(11)
    with raises(EstimationError):
        estimate_moment(e, 2, 1, [])


def test_mean(ensemble):
    """The stochastic integral has mean zero."""
    assert float(np.mean(ensemble.fields[:, -1])) == approx(1.0, abs=0.25)


def test_isometry(ensemble):
    """The first increment has the variance of the kernel L² mass."""
    report = isometry_check(ensemble, se_bands=4.0)
    assert report.expected == approx(float(ensemble.noise_variance[0]))
    assert report.passed


def test_energy(ensemble):
    """The L² energy stays below its exponential bound."""
    report = l2_energy_check(ensemble, 0.5, se_bands=4.0)
    assert report.passed
    assert report.bound[0] == approx(32.0)
    assert report.rate > 0
    with raises(DomainError):
        l2_energy_check(ensemble, 1.0)


def test_moments(ensemble):
    """Moment estimates and their export."""
    point = estimate_moment(ensemble, 2, 0, 32)
    assert point.estimate == 1.0
    assert point.x == "0.125"
    curve = moment_curve(ensemble, 2, [30, 31, 32, 33])
    assert curve.x == "region[-0.375:0.375]"
    assert curve.estimate.shape == (17,)
    assert np.all(curve.stderr[1:] > 0)
    records = list(curve.records())
    assert len(records) == 17
    assert records[0]["seed"] == 3
    with raises(DomainError):
        estimate_moment(ensemble, 3, 1, 32)
    with raises(DomainError):
        estimate_moment(ensemble, 2, 17, 32)


def test_single_replica():
    """One replica has no standard error."""
    e = simulate(PARAMS, PERIODIC, np.ones(64), SIGMA, seed=0, replicas=1)
    assert math.isnan(estimate_moment(e, 2, 4, 10).stderr)


def test_second_moment_renewal():
    """β = 1 and λ = 1 give E|u_t|² = E_{1/2}(√(t/8))."""
    times = np.linspace(0.1, 2.0, 20)
    solution = second_moment_renewal(ModelParams(), SIGMA, 1.0, times)
    assert solution.f == approx(special.erfcx(-np.sqrt(times / 8.0)), rel=1e-2)
    flat = second_moment_renewal(PARAMS, NonlinearitySpec(lam=0.0), 2.0, times)
    assert flat.f == approx(np.full(20, 4.0))


def test_lyapunov():
    """Least-squares growth rate."""
    t = np.linspace(0.0, 4.0, 41)
    curve = MomentCurve.from_values(t, 2.0 * np.exp(0.5 * t))
    estimate = estimate_lyapunov(curve, window=(2.0, 4.0))
    assert estimate.rate == approx(0.5)
    assert estimate.intercept == approx(math.log(2.0))
    assert estimate.points == 21
    assert estimate.sensitivity == approx(0.0, abs=1e-9)
    assert estimate.stderr == 0.0
    with raises(EstimationError):
        estimate_lyapunov(curve, window=(3.9, 4.0))
    with raises(EstimationError):
        estimate_lyapunov(MomentCurve.from_values(t, np.zeros_like(t)))


def test_rates():
    """Closed-form rates and constants."""
    assert lower_bound_rate(ModelParams(), 1.0) == approx(0.125)
    assert lower_bound_rate(ModelParams(), 2.0) == approx(2.0)
    # the displayed rate falls with the diffusivity
    assert lower_bound_rate(ModelParams(nu=4.0), 1.0) < lower_bound_rate(ModelParams(), 1.0)
    assert lower_bound_rate(PARAMS, 0.0) == 0.0
    with raises(DomainError):
        lower_bound_rate(PARAMS, -1.0)
    with raises(DomainError):
        lower_bound_rate(ModelParams(d=4), 1.0)
    assert weighted_young_constant(1.0, 1.0, 1.0, 2.0) == approx(math.pi**-0.25)
    for beta, nu, c in ((0.5, 1.0, 1.0), (0.75, 2.0, 0.5)):
        gamma = (2.0 * nu * c**2) ** (1.0 / beta)
        assert corollary_constant(beta, nu, c) == approx(weighted_young_constant(beta, nu, c, gamma))
    with raises(DivergenceError):
        weighted_young_constant(1.0, 1.0, 1.0, 1.0)


def test_front_bounds():
    """Both threshold displays coincide for ν = 1 only."""
    bounds = front_bounds(ModelParams(), SIGMA)
    assert bounds.threshold == approx(2.0 / math.sqrt(math.pi))
    assert bounds.displays_agree
    assert bounds.positive_threshold == approx(1.0 / (2.0 * math.pi), rel=1e-7)
    assert not front_bounds(ModelParams(beta=0.5, nu=2.0), SIGMA).displays_agree
    with raises(DomainError):
        front_bounds(PARAMS, NonlinearitySpec(lam=0.0))


def test_positive_threshold():
    """Positive front speed scales with L_σ²."""
    single = positive_front_threshold(PARAMS, 1.0)
    assert positive_front_threshold(PARAMS, 2.0) == approx(4.0 * single)
    assert tail_energy_laplace(ModelParams(), 0.0, 1.0) == approx(0.5 / math.sqrt(8.0), rel=1e-6)


def test_envelope(localized):
    """Second moments stay below the exponential envelope."""
    bounds = front_bounds(PARAMS, SIGMA)
    report = envelope_check(localized, 1.5 * bounds.c_min, se_bands=4.0)
    assert report.c_min == approx(bounds.c_min)
    assert report.cells == 17 * 64
    assert report.passed
    assert report.fraction == 1.0
    with raises(DomainError):
        envelope_check(localized, 0.5 * bounds.c_min)


def test_front(localized):
    """Fast fronts have a negative proxy."""
    front = estimate_front(localized, 6.0)
    assert front.window_mean < 0
    assert math.isfinite(front.window_stderr)
    assert front.t.shape == (16,)
    assert len(list(front.records())) == 16
    with raises(TruncationError):
        estimate_front(localized, 10.0)
    with raises(DomainError):
        estimate_front(localized, -1.0)


def test_front_vanishing(localized):
    """A region without positive second moment is an estimation error, not a silent -inf."""
    e = localized
    silent = FieldEnsemble(
        e.params,
        e.grid,
        e.sigma,
        e.u0,
        e.seed,
        np.zeros_like(e.fields),
        e.cells,
        e.deterministic,
        e.noise_variance,
        e.step_variance,
        e.energy,
    )
    with raises(EstimationError) as info:
        estimate_front(silent, 1.0)
    assert "at level 1" in str(info.value)


def test_front_hypotheses(ensemble):
    """Fronts need compactly supported initial data."""
    with raises(DomainError):
        estimate_front(ensemble, 1.0)
    with raises(DomainError):
        envelope_check(ensemble, 10.0)


def test_weighted_norm():
    """exp(-γt + cx) weighted sup norm."""
    e = simulate(PARAMS, PADDED, np.ones(64), NonlinearitySpec(lam=0.0), seed=0, replicas=2)
    assert weighted_norm(e, 1.0, 0.0) == approx(1.0)
    assert weighted_norm(e, 1.0, 1.0) == approx(math.exp(0.5 * 7.875))
    with raises(DomainError):
        weighted_norm(e, 0.0, 0.0)


def test_convexity():
    """Convexity of η(k) and monotonicity of η(k)/k."""
    report = convexity_from_rates({2: (1.0, 0.0), 4: (4.0, 0.0), 6: (9.0, 0.0)})
    assert report.convex
    assert report.ratio_nondecreasing
    assert report.strict
    report = convexity_from_rates({2: (4.0, 0.0), 4: (10.0, 0.0), 6: (12.0, 0.0)})
    assert not report.convex
    assert not report.ratio_nondecreasing
    report = convexity_from_rates({2: (4.0, 1.0), 4: (10.0, 1.0), 6: (12.0, 1.0)})
    assert report.convex
    with raises(EstimationError):
        convexity_from_rates({2: (1.0, 0.0), 4: (4.0, 0.0)})


def test_region():
    """The region covering holds on every sampled tuple."""
    report = region_indicator_check(PADDED, 1.0, samples=5000, seed=1)
    assert report.samples == 5000
    assert report.union_violations == 0
    assert report.passed


def test_replica_independence():
    """Noise streams of consecutive replicas are uncorrelated."""
    assert replica_correlation(0, 20, 4096) < correlation_limit(20, 4096)
    with raises(DomainError):
        replica_correlation(0, 1, 4096)


def test_simulate_domain():
    """Invalid simulations are refused."""
    ones = np.ones(64)
    with raises(DomainError):
        simulate(ModelParams(alpha=1.5), PADDED, ones, SIGMA, seed=0, replicas=1)
    with raises(DomainError):
        simulate(PARAMS, PADDED, np.ones(63), SIGMA, seed=0, replicas=1)
    with raises(DomainError):
        simulate(PARAMS, PADDED, ones, SIGMA, seed=-1, replicas=1)
    with raises(DomainError):
        simulate(PARAMS, PADDED, ones, SIGMA, seed=0, replicas=0)
    with raises(DomainError):
        simulate(PARAMS, PADDED, ones, SIGMA, seed=0, replicas=1, cells=[64])
    narrow = SpaceTimeGrid(x_min=-1, x_max=1, nx=16, nt=8)
    with raises(TruncationError):
        simulate(ModelParams(), narrow, np.ones(16), SIGMA, seed=0, replicas=1)
    table = build_kernel_table(PARAMS, 0.125, PADDED.dx, 8, 64)
    with raises(DomainError):
        simulate(PARAMS, PADDED, ones, SIGMA, seed=0, replicas=1, table=table)

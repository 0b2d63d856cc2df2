#  Author(s):  hyperkin contributors
#  Created on: 2026-10
#
# Copyright (c) 2026 hyperkin contributors
# Released under MIT License

"""Weighted Fréchet mean in the Poincaré ball and the weighted midpoint
built on it.

The mean minimises F(μ) = Σ wᵢ·d²(μ, hᵢ) with the fixed-point iteration

    μ ← exp_μ(η · Σ wᵢ · log_μ(hᵢ))

started at one of the input points.  The iteration is unrolled on the tape,
so gradients reach the points and the weights.
"""

import dataclasses
import logging

import numpy

from hyperkin import tensor as T
from hyperkin.errors import ConfigError, DomainError, EmptyInputError, ShapeError
from hyperkin.manifold import ManifoldPoint, coords

logger = logging.getLogger(__name__)

WEIGHT_TOLERANCE = 1e-8


@dataclasses.dataclass
class FrechetConfig:
    max_iter: int = 50
    tol: float = 1e-5
    step: float = 1.0
    weight_temperature: float = 1.0
    tangent_approx: bool = False
    record_history: bool = False

    def __post_init__(self):
        if self.max_iter < 1:
            raise ConfigError('max_iter must be at least 1')
        if not self.tol > 0.0:
            raise ConfigError('tol must be positive')
        if not 0.0 < self.step <= 2.0:
            raise ConfigError('step must lie in (0, 2]')
        if not self.weight_temperature > 0.0:
            raise ConfigError('weight_temperature must be positive')


@dataclasses.dataclass
class PartWeights:
    """Softmax-normalised weights over the part axis (last axis of ``w``)."""
    w: T.Tensor


@dataclasses.dataclass
class FrechetResult:
    mean: ManifoldPoint
    iterations: int
    converged: bool
    history: list = dataclasses.field(default_factory = list)


def _unsqueeze(t, axis):
    shape = list(t.shape)
    shape.insert(axis if axis >= 0 else len(shape) + axis + 1, 1)
    return t.reshape(tuple(shape))


def stack_points(points):
    """Stack a list of ManifoldPoints (each (..., d)) into (..., N, d)."""
    if isinstance(points, ManifoldPoint):
        return points.coords
    if isinstance(points, T.Tensor):
        return points
    points = list(points)
    if not points:
        raise EmptyInputError('empty list of points')
    return T.stack([coords(p) for p in points], axis = -2)


def part_weights(points, ball, temperature = 1.0):
    """w_p = softmax_p(d(0, h_p) / temperature); parts farther from the origin
    weigh more."""
    h = stack_points(points)
    if h.shape[-2] == 0:
        raise EmptyInputError('empty list of points')
    return PartWeights(T.softmax(ball.dist0(h) / temperature, axis = -1))


def _weights_tensor(weights):
    if isinstance(weights, PartWeights):
        weights = weights.w
    w = T.as_tensor(weights)
    if numpy.any(w.data < 0.0):
        raise DomainError('weights must be nonnegative', value = float(numpy.min(w.data)))
    total = numpy.sum(w.data, axis = -1)
    if numpy.any(numpy.abs(total - 1.0) > WEIGHT_TOLERANCE):
        raise DomainError('weights must sum to 1', value = float(total.reshape(-1)[0]))
    return w


def frechet_objective(mu, points, weights, ball):
    """F(μ) = Σ w·d²(μ, h) on raw values, one entry per batch element."""
    h = stack_points(points).data
    w = _weights_tensor(weights).data
    mu = coords(mu).data
    d = ball.dist_array(mu[..., None, :], h)
    return numpy.sum(w * d * d, axis = -1)


def frechet_mean(points, weights, cfg, ball, init_index = 0, init = None):
    """Weighted Fréchet mean of ``points`` ((..., N, d) or a list).

    The iteration starts at ``points[..., init_index, :]`` unless a starting
    point ``init`` is given.

    Stops when every batch element moved less than ``cfg.tol`` in geodesic
    distance, or after ``cfg.max_iter`` iterations; non-convergence is
    reported in the result, not raised.
    """
    h = stack_points(points)
    w = _weights_tensor(weights)
    if h.shape[-2] == 0:
        raise EmptyInputError('empty list of points')
    if w.shape[-1] != h.shape[-2]:
        raise ShapeError('one weight per point is needed', w.shape, h.shape)
    w = _unsqueeze(w, -1)

    if cfg.tangent_approx:
        v = (w * ball.logmap0(h).coords).sum(axis = -2)
        return FrechetResult(ball.expmap0(v), 1, True)

    mu = h[..., init_index, :] if init is None else coords(init)
    history = [mu.data.copy()] if cfg.record_history else []
    converged = False
    iterations = 0
    for iterations in range(1, cfg.max_iter + 1):
        logs = ball.logmap(_unsqueeze(mu, -2), h).coords
        v = (w * logs).sum(axis = -2)
        mu_next = ball.expmap(mu, cfg.step * v).coords
        delta = ball.dist_array(mu_next.data, numpy.broadcast_to(mu.data, mu_next.shape))
        mu = mu_next
        if cfg.record_history:
            history.append(mu.data.copy())
        if numpy.all(delta < cfg.tol):
            converged = True
            break
    if not converged:
        logger.debug('frechet mean did not converge in %d iterations', cfg.max_iter)
    return FrechetResult(ManifoldPoint(mu, ball), iterations, converged, history)


def weighted_midpoint(values, weights, cfg, ball):
    """Weighted midpoint of ``values`` (..., T, d) for every weight row of
    ``weights`` (..., P, T), returned as (..., P, d).  Defined as the
    weighted Fréchet mean of the values."""
    v = stack_points(values)
    w = _weights_tensor(weights)
    if w.shape[-1] != v.shape[-2]:
        raise ShapeError('one weight per value is needed', w.shape, v.shape)
    # start from the tangent-space mean so zero-weight values never matter
    start = ball.expmap0((_unsqueeze(w, -1) * _unsqueeze(ball.logmap0(v).coords, -3)).sum(axis = -2))
    return frechet_mean(_unsqueeze(v, -3), w, cfg, ball, init = start)

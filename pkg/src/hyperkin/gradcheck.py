#  Author(s):  hyperkin contributors
#  Created on: 2026-10
#
# Copyright (c) 2026 hyperkin contributors
# Released under MIT License

"""Analytic gradients against central finite differences, for every
registered differentiable operation and for the geometric building blocks
composed from them."""

import dataclasses
import logging

import numpy

from hyperkin import tensor as T
from hyperkin.frechet import FrechetConfig, frechet_mean, weighted_midpoint
from hyperkin.layers import (AlphaSchedule, ContrastiveHead, HyperbolicAttention, HyperbolicProjection,
                             alpha, contrastive_loss, pooled_align, token_align)
from hyperkin.manifold import Dist, PoincareBall

logger = logging.getLogger(__name__)

THRESHOLD = 1e-4
STEP = 1e-6


@dataclasses.dataclass
class GradCheckRow:
    name: str
    group: str
    error: float
    passed: bool


@dataclasses.dataclass
class GradReport:
    rows: list
    threshold: float

    @property
    def passed(self):
        return all(row.passed for row in self.rows)

    @property
    def failures(self):
        return [row for row in self.rows if not row.passed]

    def format(self):
        lines = ['%-16s %-9s %-12s %s' % ('case', 'group', 'rel. error', 'status')]
        for row in self.rows:
            lines.append('%-16s %-9s %-12.3e %s' % (row.name, row.group, row.error,
                                                     'ok' if row.passed else 'FAILED'))
        lines.append(('all %d cases passed' % len(self.rows)) if self.passed
                     else ('%d of %d cases failed' % (len(self.failures), len(self.rows))))
        return '\n'.join(lines)


def relative_error(analytic, numeric):
    analytic, numeric = numpy.asarray(analytic), numpy.asarray(numeric)
    scale = max(numpy.linalg.norm(analytic), numpy.linalg.norm(numeric), 1e-8)
    return float(numpy.linalg.norm(analytic - numeric) / scale)


def weighted_sum(out):
    """Scalar reduction of every output entry, with weights fixed by the shape."""
    out = T.as_tensor(out)
    rng = numpy.random.default_rng(out.size + 7 * out.ndim)
    return (out * rng.uniform(0.5, 1.5, size = out.shape)).sum()


def tape_error(function, inputs, step = STEP):
    """Worst relative error, over the inputs, between tape gradients of the
    scalar ``function(*inputs)`` and central differences."""
    inputs = [numpy.asarray(x, dtype = numpy.float64) for x in inputs]
    tensors = [T.Tensor(x, requires_grad = True) for x in inputs]
    with T.GradTape() as tape:
        tape.watch(*tensors)
        tape.backward(function(*tensors))
    worst = 0.0
    for i, t in enumerate(tensors):
        def partial(x, i = i):
            args = [T.Tensor(a) for a in inputs]
            args[i] = x
            return function(*args)
        numeric = T.finite_difference_grad(partial, inputs[i], step).data
        analytic = t.grad if t.grad is not None else numpy.zeros_like(inputs[i])
        worst = max(worst, relative_error(analytic, numeric))
    return worst


def _scalar(function):
    return lambda *args: weighted_sum(function(*args))


def _rng():
    return numpy.random.default_rng(1234)


def _points(rng, shape, radius = 0.4):
    x = rng.normal(size = shape)
    return radius * x / (1.0 + numpy.linalg.norm(x, axis = -1, keepdims = True))


def _op_cases():
    rng = _rng()
    a = rng.uniform(0.5, 1.5, size = (3, 4)) * rng.choice([-1.0, 1.0], size = (3, 4))
    b = rng.uniform(0.5, 1.5, size = (4,))
    positive = rng.uniform(0.5, 2.0, size = (3, 4))
    unit = rng.uniform(-0.8, 0.8, size = (3, 4))
    distinct = numpy.arange(12.0).reshape(3, 4) / 7.0 + rng.uniform(0.0, 0.01, size = (3, 4))
    mask = numpy.array([[True, True, False, True]] * 3)
    condition = rng.uniform(size = (3, 4)) > 0.5
    u, v = _points(rng, (3, 4)), _points(rng, (3, 4))
    return {
        'add': (_scalar(lambda x, y: x + y), [a, b]),
        'sub': (_scalar(lambda x, y: x - y), [a, b]),
        'mul': (_scalar(lambda x, y: x * y), [a, b]),
        'div': (_scalar(lambda x, y: x / y), [a, b]),
        'neg': (_scalar(lambda x: -x), [a]),
        'tanh': (_scalar(T.tanh), [a]),
        'artanh': (_scalar(T.artanh), [unit]),
        'exp': (_scalar(T.exp), [a]),
        'log': (_scalar(T.log), [positive]),
        'sigmoid': (_scalar(T.sigmoid), [a]),
        'relu': (_scalar(T.relu), [a]),
        'sqrt': (_scalar(T.sqrt), [positive]),
        'clampmin': (_scalar(lambda x: T.clamp_min(x, 0.0)), [a]),
        'clampmax': (_scalar(lambda x: T.clamp_max(x, 0.0)), [a]),
        'matmul': (_scalar(T.matmul), [a, rng.normal(size = (4, 2))]),
        'einsum': (_scalar(lambda x, w, adj: T.einsum('nctv,kco,kvw->notw', x, w, adj)),
                   [rng.normal(size = (2, 3, 2, 4)), rng.normal(size = (2, 3, 2)), rng.uniform(size = (2, 4, 4))]),
        'sum': (_scalar(lambda x: x.sum(axis = 1)), [a]),
        'mean': (_scalar(lambda x: x.mean(axis = 0)), [a]),
        'max': (_scalar(lambda x: x.max(axis = 1)), [distinct]),
        'softmax': (_scalar(lambda x: T.softmax(x, axis = -1, mask = mask)), [a]),
        'log_softmax': (_scalar(lambda x: T.log_softmax(x, axis = -1, mask = mask)), [a]),
        'reshape': (_scalar(lambda x: x.reshape(2, 6)), [a]),
        'transpose': (_scalar(lambda x: x.transpose()), [a]),
        'getitem': (_scalar(lambda x: x[numpy.array([0, 2, 0])]), [a]),
        'concat': (_scalar(lambda x, y: T.concat([x, y], axis = 0)), [a, unit]),
        'stack': (_scalar(lambda x, y: T.stack([x, y], axis = 1)), [a, unit]),
        'pad': (_scalar(lambda x: T.pad(x, ((1, 0), (0, 2)))), [a]),
        'where': (_scalar(lambda x, y: T.where(condition, x, y)), [a, unit]),
        'dist': (_scalar(lambda x, y, c: Dist.apply(x, y, c)), [u, v, numpy.array(0.8)]),
    }


def _ball(c = 0.8):
    return PoincareBall(init_c = c, learnable = False)


def _manifold_cases():
    rng = _rng()
    ball = _ball()
    x, y = _points(rng, (3, 4)), _points(rng, (3, 4))
    tangent = rng.normal(scale = 0.5, size = (3, 4))
    return {
        'mobius_add': (_scalar(lambda p, q: ball.mobius_add(p, q).coords), [x, y]),
        'expmap0': (_scalar(lambda t: ball.expmap0(t).coords), [tangent]),
        'logmap0': (_scalar(lambda p: ball.logmap0(p).coords), [x]),
        'expmap': (_scalar(lambda p, t: ball.expmap(p, t).coords), [x, tangent]),
        'logmap': (_scalar(lambda p, q: ball.logmap(p, q).coords), [x, y]),
        'mobius_matvec': (_scalar(lambda m, p: ball.mobius_matvec(m, p).coords),
                          [numpy.eye(4) + 0.1 * rng.normal(size = (4, 4)), x]),
        'dist0': (_scalar(ball.dist0), [x]),
        'clip_tangent': (_scalar(lambda t: ball.clip_tangent(t).coords), [4.0 * tangent]),
    }


def _frechet_cases():
    rng = _rng()
    ball = _ball(1.0)
    cfg = FrechetConfig(max_iter = 5, tol = 1e-300)
    points = _points(rng, (2, 3, 3))
    logits = rng.normal(size = (2, 3))
    target = _points(rng, (2, 3))
    values = _points(rng, (4, 3))
    rows = rng.normal(size = (2, 4))

    def mean_distance(p, l):
        mu = frechet_mean(p, T.softmax(l, axis = -1), cfg, ball).mean
        return ball.dist(mu, target).sum()

    def midpoint(v, l):
        return weighted_midpoint(v, T.softmax(l, axis = -1), cfg, ball).mean.coords

    return {
        'frechet_mean': (mean_distance, [points, logits]),
        'weighted_midpoint': (_scalar(midpoint), [values, rows]),
    }


def _layer_cases():
    rng = _rng()
    ball = _ball(1.0)
    cfg = FrechetConfig(max_iter = 5, tol = 1e-300)
    proj = HyperbolicProjection(3, 4, ball, numpy.random.default_rng(5))
    attn = HyperbolicAttention(4, ball)
    head = ContrastiveHead(0.5, 0.1, 0.2)
    sched = AlphaSchedule(0.7, 10)
    mask = numpy.array([[True, True, False]])

    def contrast(p, t):
        return contrastive_loss(ball.point(p), ball.point(t), head, ball)

    def token(h, e):
        aligned = token_align(h, e, mask, proj, attn, cfg, ball)
        return ball.dist(aligned.parts.coords, aligned.contexts.coords).sum()

    def pooled(h, e):
        pose, text = pooled_align(h, e, mask, proj, cfg, ball)
        return ball.dist(pose.coords, text.coords).sum()

    def blend(logit):
        sched.logit_alpha = logit
        return alpha(3, sched)

    return {
        'projection': (_scalar(lambda x: proj(x).coords), [rng.normal(size = (2, 3))]),
        'contrastive': (contrast, [_points(rng, (3, 4)), _points(rng, (3, 4))]),
        'token_align': (token, [_points(rng, (1, 2, 4)), rng.normal(size = (1, 3, 3))]),
        'pooled_align': (pooled, [_points(rng, (1, 4, 4)), rng.normal(size = (1, 3, 3))]),
        'alpha': (blend, [numpy.array(0.3)]),
    }


def _dist_grad_error(pairs = 100, curvatures = (0.1, 1.0, 2.0)):
    """Closed-form distance gradient of :meth:`PoincareBall.dist_grad`
    against central differences of the distance."""
    rng = _rng()
    worst = 0.0
    for c in curvatures:
        ball = _ball(c)
        for _ in range(pairs):
            u = _points(rng, (3,), 0.6 / numpy.sqrt(c))
            v = _points(rng, (3,), 0.6 / numpy.sqrt(c))
            analytic = ball.dist_grad(u, v).coords.data
            numeric = T.finite_difference_grad(lambda x: ball.dist(x, v), u).data
            worst = max(worst, relative_error(analytic, numeric))
    return worst


def cases():
    groups = [('op', _op_cases()), ('manifold', _manifold_cases()), ('frechet', _frechet_cases()),
              ('layers', _layer_cases())]
    return [(name, group, function, inputs) for group, table in groups for name, (function, inputs) in table.items()]


def check_grads(threshold = THRESHOLD):
    """Run every case; every registered op without a case is reported as a
    failure."""
    rows = []
    covered = set()
    for name, group, function, inputs in cases():
        error = tape_error(function, inputs)
        logger.debug('%s: relative error %.3e', name, error)
        rows.append(GradCheckRow(name, group, error, error < threshold))
        if group == 'op':
            covered.add(name)
    error = _dist_grad_error()
    rows.append(GradCheckRow('dist_grad', 'manifold', error, error < threshold))
    for name in sorted(set(T.OPS) - covered):
        rows.append(GradCheckRow(name, 'op', float('inf'), False))
    return GradReport(rows, threshold)

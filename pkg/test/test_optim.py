#  Author(s):  hyperkin contributors
#  Created on: 2026-10
#
# Copyright (c) 2026 hyperkin contributors
# Released under MIT License

import math

import numpy
import pytest

from hyperkin import tensor as T
from hyperkin.errors import ConfigError
from hyperkin.manifold import PoincareBall
from hyperkin.nn import parameter
from hyperkin.optim import (Optimizer, ParamGroup, adamw_step, clip_global_grad_norm, cosine_lr,
                            radam_step)


class TestAdamW:

    def test_zero_gradient_no_decay(self, rng):
        p = parameter(rng.normal(size = 3))
        start = p.data.copy()
        p.grad = numpy.zeros(3)
        adamw_step(ParamGroup('euclidean', [p], lr = 0.1, weight_decay = 0.0))
        numpy.testing.assert_array_equal(p.data, start)

    def test_first_step(self):
        p = parameter(1.0)
        p.grad = numpy.array(1.0)
        adamw_step(ParamGroup('euclidean', [p], lr = 0.01, weight_decay = 0.0))
        # m̂ = 1 and v̂ = 1 after bias correction
        assert p.item() == pytest.approx(1.0 - 0.01 / (1.0 + 1e-8), abs = 1e-10)

    def test_decoupled_decay(self, rng):
        p = parameter(rng.normal(size = 4))
        start = p.data.copy()
        p.grad = numpy.zeros(4)
        adamw_step(ParamGroup('euclidean', [p], lr = 0.1, weight_decay = 0.5))
        numpy.testing.assert_allclose(p.data, start * (1.0 - 0.1 * 0.5), atol = 1e-15)

    def test_missing_gradient_is_skipped(self):
        p = parameter([1.0, 2.0])
        adamw_step(ParamGroup('euclidean', [p], lr = 0.1))
        numpy.testing.assert_array_equal(p.data, [1.0, 2.0])


class TestRiemannianAdam:

    def test_step_from_origin(self):
        ball = PoincareBall(init_c = 1.0, learnable = False)
        p = ball.parameter(numpy.zeros(2))
        g = numpy.array([0.3, -0.4])
        p.grad = g.copy()
        lr = 0.05
        radam_step(ParamGroup('riemannian', [p], lr = lr))
        # λ at the origin is 2, so the Riemannian gradient is g / 4
        rgrad = g / 4.0
        expected = ball.expmap0(-lr * rgrad / (numpy.abs(rgrad) + 1e-8)).coords.data
        numpy.testing.assert_allclose(p.data, expected, atol = 1e-10)

    def test_stays_inside_under_adversarial_steps(self):
        c = 1.0
        ball = PoincareBall(init_c = c, learnable = False)
        p = ball.parameter(numpy.array([0.5, 0.5]))
        group = ParamGroup('riemannian', [p], lr = 0.5)
        for _ in range(10000):
            p.grad = -numpy.ones(2)
            radam_step(group)
            assert math.sqrt(c) * numpy.linalg.norm(p.data) < 1.0
        assert numpy.all(numpy.isfinite(p.data))

    def test_log_curvature_takes_an_adam_step(self):
        ball = PoincareBall(init_c = 1.0, learnable = True)
        ball.log_c.grad = numpy.array(2.0)
        radam_step(ParamGroup('riemannian', [ball.log_c], lr = 0.01))
        assert ball.log_c.item() == pytest.approx(-0.01, abs = 1e-9)

    def test_riemannian_groups_take_no_decay(self):
        with pytest.raises(ConfigError):
            ParamGroup('riemannian', [], lr = 0.1, weight_decay = 0.01)

    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            ParamGroup('sgd', [], lr = 0.1)


class TestClipping:

    def test_small_norm_unchanged(self):
        p = parameter([0.0, 0.0])
        p.grad = numpy.array([0.3, 0.4])
        assert clip_global_grad_norm([p], 1.0) == 1.0
        numpy.testing.assert_array_equal(p.grad, [0.3, 0.4])

    def test_large_norm(self):
        p = parameter([0.0, 0.0])
        p.grad = numpy.array([0.0, 4.0])
        assert clip_global_grad_norm([p], 1.0) == pytest.approx(0.25)
        numpy.testing.assert_allclose(p.grad, [0.0, 1.0])

    def test_mixed_shapes(self, rng):
        params = [parameter(numpy.zeros(s)) for s in [(3,), (2, 2), ()]]
        for p in params:
            p.grad = 5.0 * rng.normal(size = p.shape)
        clip_global_grad_norm(params, 1.0)
        total = math.sqrt(sum(float(numpy.sum(p.grad ** 2)) for p in params))
        assert total == pytest.approx(1.0, abs = 1e-9)


class TestSchedule:

    def test_warmup(self):
        assert cosine_lr(0, 100, 1.0, warmup_steps = 10) == pytest.approx(0.1)
        assert cosine_lr(9, 100, 1.0, warmup_steps = 10) == pytest.approx(1.0)

    def test_cosine(self):
        assert cosine_lr(10, 110, 1.0, warmup_steps = 10) == pytest.approx(1.0)
        assert cosine_lr(60, 110, 1.0, warmup_steps = 10) == pytest.approx(0.5)
        assert cosine_lr(110, 110, 1.0, warmup_steps = 10, min_lr = 0.1) == pytest.approx(0.1)


def test_optimizer_trains_a_quadratic():
    ball = PoincareBall(init_c = 1.0, learnable = False)
    w = parameter([2.0, -1.0])
    b = ball.parameter([0.3, 0.0])
    target = numpy.array([0.0, 0.2])
    opt = Optimizer([ParamGroup('euclidean', [w], lr = 0.05, weight_decay = 0.0),
                     ParamGroup('riemannian', [b], lr = 0.05)])
    for _ in range(300):
        opt.zero_grad()
        with T.GradTape() as tape:
            tape.watch(w, b)
            d = ball.dist(b, target)
            tape.backward((w * w).sum() + d * d)
        opt.clip()
        opt.step()
    assert numpy.linalg.norm(w.data) < 0.1
    assert ball.dist_array(b.data, target) < 0.1


def test_set_lr_scales_every_group():
    groups = [ParamGroup('euclidean', [], lr = 0.2), ParamGroup('riemannian', [], lr = 0.01)]
    Optimizer(groups).set_lr(0.5)
    assert [g.lr for g in groups] == [pytest.approx(0.1), pytest.approx(0.005)]


def test_clip_spans_every_group():
    ball = PoincareBall(init_c = 1.0, learnable = False)
    a = parameter([0.0])
    b = ball.parameter([0.0])
    a.grad = numpy.array([3.0])
    b.grad = numpy.array([4.0])
    opt = Optimizer([ParamGroup('euclidean', [a], lr = 0.1, grad_clip_norm = 1.0),
                     ParamGroup('riemannian', [b], lr = 0.1, grad_clip_norm = 1.0)])
    assert opt.clip() == pytest.approx(0.2)
    total = math.sqrt(float(a.grad[0] ** 2 + b.grad[0] ** 2))
    assert total == pytest.approx(1.0, abs = 1e-12)
    numpy.testing.assert_allclose([a.grad[0], b.grad[0]], [0.6, 0.8])


def test_adamw_matches_reference_trajectory():
    curvature = numpy.array([1.0, 4.0, 0.25])
    lr, wd, beta1, beta2, eps = 0.1, 0.01, 0.9, 0.999, 1e-8
    p = parameter([1.0, -2.0, 0.5])
    group = ParamGroup('euclidean', [p], lr = lr, weight_decay = wd)

    x = numpy.array([1.0, -2.0, 0.5])
    m = numpy.zeros(3)
    v = numpy.zeros(3)
    for t in range(1, 11):
        # f = ½ Σ k·x²
        g = curvature * x
        x = x * (1.0 - lr * wd)
        m = beta1 * m + (1.0 - beta1) * g
        v = beta2 * v + (1.0 - beta2) * g * g
        x = x - lr * (m / (1.0 - beta1 ** t)) / (numpy.sqrt(v / (1.0 - beta2 ** t)) + eps)

        p.grad = curvature * p.data
        adamw_step(group)
        numpy.testing.assert_allclose(p.data, x, rtol = 1e-12, atol = 1e-14)


@pytest.mark.parametrize('seed', range(5))
def test_riemannian_adam_reaches_random_targets(seed):
    rng = numpy.random.default_rng(seed)
    ball = PoincareBall(init_c = 1.0, learnable = False)
    direction = rng.normal(size = 2)
    target = rng.uniform(0.1, 0.7) * direction / numpy.linalg.norm(direction)
    b = ball.parameter(numpy.zeros(2))
    group = ParamGroup('riemannian', [b], lr = 0.05)
    opt = Optimizer([group])
    steps = 2000
    for step in range(steps):
        opt.set_lr(cosine_lr(step, steps, 1.0))
        opt.zero_grad()
        with T.GradTape() as tape:
            tape.watch(b)
            d = ball.dist(b, target)
            tape.backward(d * d)
        opt.step()
    assert ball.dist_array(b.data, target) < 1e-3

#  Author(s):  hyperkin contributors
#  Created on: 2026-10
#
# Copyright (c) 2026 hyperkin contributors
# Released under MIT License

import math

import numpy
import pytest

from hyperkin import tensor as T
from hyperkin.errors import ConfigError, DomainError, EmptyInputError, NumericalError
from hyperkin.frechet import FrechetConfig
from hyperkin.layers import (AlphaSchedule, ContrastiveHead, HyperbolicAttention, HyperbolicProjection,
                             alpha, contrastive_loss, masked_mean, pooled_align, project, token_align,
                             total_loss)
from hyperkin.manifold import PoincareBall


@pytest.fixture
def disk():
    return PoincareBall(init_c = 1.0, learnable = False)


@pytest.fixture
def identity_proj(disk, rng):
    return HyperbolicProjection(2, 2, disk, rng, init = 'identity')


def line_points(disk, positions):
    """Points of a 1-D ball at the given signed geodesic distances from the origin."""
    return disk.point(numpy.tanh(numpy.asarray(positions, dtype = float) / 2.0)[:, None])


class TestProjection:

    def test_origin(self, identity_proj):
        numpy.testing.assert_array_equal(project(numpy.zeros(2), identity_proj).coords.data, [0.0, 0.0])

    def test_radius(self, disk, identity_proj):
        h = project(numpy.array([0.5, 0.0]), identity_proj)
        assert disk.dist0(h).item() == pytest.approx(0.5, abs = 1e-9)

    def test_scale_doubles_tangent(self, disk, identity_proj):
        x = numpy.array([0.2, 0.1])
        before = disk.logmap0(identity_proj(x)).coords.data
        identity_proj.log_scale.assign(math.log(2.0))
        after = disk.logmap0(identity_proj(x)).coords.data
        numpy.testing.assert_allclose(after, 2.0 * before, atol = 1e-9)
        assert identity_proj.scale == pytest.approx(2.0)

    def test_long_features_are_clipped(self, disk, identity_proj):
        h = identity_proj(numpy.array([[40.0, 0.0]]))
        assert disk.dist0(h).item() < 1.0

    def test_non_finite_input(self, identity_proj):
        with pytest.raises(NumericalError):
            identity_proj(numpy.array([numpy.nan, 0.0]))


class TestContrastiveLoss:

    def test_hand_evaluated_pair(self, disk):
        head = ContrastiveHead(init_tau = 1.0, init_margin = 0.0, label_smoothing = 0.0)
        pose = line_points(disk, [0.0, -1.5])
        text = line_points(disk, [0.5, -2.0])
        loss = contrastive_loss(pose, text, head, disk).item()
        assert loss == pytest.approx(-math.log(math.exp(-0.5) / (math.exp(-0.5) + math.exp(-2.0))), abs = 1e-4)
        assert loss == pytest.approx(0.20141, abs = 1e-4)

    def test_single_pair_is_zero(self, disk):
        head = ContrastiveHead(label_smoothing = 0.0)
        assert contrastive_loss(line_points(disk, [0.3]), line_points(disk, [1.0]), head, disk).item() == 0.0

    def test_margin_never_decreases_loss(self, disk, rng):
        pose = disk.point(0.3 * rng.uniform(-1, 1, size = (4, 3)))
        text = disk.point(0.3 * rng.uniform(-1, 1, size = (4, 3)))
        head = ContrastiveHead()
        losses = []
        for m in (0.0, 0.2, 0.5, 1.0):
            head.margin.assign(m)
            losses.append(contrastive_loss(pose, text, head).item())
        assert losses == sorted(losses)

    def test_negative_margin_is_clamped(self, disk, rng):
        pose = disk.point(0.3 * rng.uniform(-1, 1, size = (3, 2)))
        text = disk.point(0.3 * rng.uniform(-1, 1, size = (3, 2)))
        head = ContrastiveHead(init_margin = 0.0)
        zero = contrastive_loss(pose, text, head).item()
        head.margin.assign(-0.5)
        assert contrastive_loss(pose, text, head).item() == zero

    def test_per_part_average(self, disk, rng):
        pose = 0.3 * rng.uniform(-1, 1, size = (3, 4, 2))
        text = 0.3 * rng.uniform(-1, 1, size = (3, 4, 2))
        head = ContrastiveHead()
        joint = contrastive_loss(disk.point(pose), disk.point(text), head).item()
        parts = [contrastive_loss(disk.point(pose[:, p]), disk.point(text[:, p]), head).item() for p in range(4)]
        assert joint == pytest.approx(numpy.mean(parts), abs = 1e-12)

    def test_joint_permutation(self, disk, rng):
        pose = 0.3 * rng.uniform(-1, 1, size = (6, 3))
        text = 0.3 * rng.uniform(-1, 1, size = (6, 3))
        head = ContrastiveHead()
        order = rng.permutation(6)
        before = contrastive_loss(disk.point(pose), disk.point(text), head).item()
        after = contrastive_loss(disk.point(pose[order]), disk.point(text[order]), head).item()
        assert after == pytest.approx(before, rel = 1e-12, abs = 1e-15)

    def test_perfect_alignment_bound(self, disk):
        head = ContrastiveHead(init_tau = 0.5, init_margin = 0.0, label_smoothing = 0.0)
        tau = head.tau().item()
        losses, bounds = [], []
        for d in (2.0, 5.0, 10.0):
            # three matched pairs, every cross distance at least d
            points = line_points(disk, [-d, 0.0, d])
            losses.append(contrastive_loss(points, points, head, disk).item())
            bounds.append(math.log(1.0 + 2.0 * math.exp(-d / tau)))
        for loss, bound in zip(losses, bounds):
            assert 0.0 < loss <= bound + 1e-12
        assert losses[0] > losses[1] > losses[2]
        assert bounds[0] > bounds[1] > bounds[2]

    def test_empty_batch(self, disk):
        with pytest.raises(EmptyInputError):
            contrastive_loss(disk.point(numpy.zeros((0, 2))), disk.point(numpy.zeros((0, 2))), ContrastiveHead())

    def test_temperature_stays_in_range(self):
        head = ContrastiveHead()
        for raw in (-1e3, 0.0, 1e3):
            head.log_tau.assign(raw)
            assert 0.01 <= head.tau().item() <= 2.01
        with pytest.raises(DomainError):
            head.set_temperature(5.0)


class TestTokenAlign:

    def test_equidistant_keys_give_uniform_weights(self, disk, identity_proj):
        attn = HyperbolicAttention(2, disk)
        tokens = numpy.array([[0.3, 0.0], [0.0, 0.3], [-0.3, 0.0]])
        aligned = token_align(numpy.zeros((1, 2)), tokens, numpy.ones(3, dtype = bool), identity_proj, attn,
                              FrechetConfig(), disk)
        numpy.testing.assert_allclose(aligned.weights.data, numpy.full((1, 3), 1 / 3), atol = 1e-9)

    def test_masked_tokens_are_ignored(self, disk, identity_proj, rng):
        attn = HyperbolicAttention(2, disk)
        parts = 0.2 * rng.uniform(-1, 1, size = (4, 2))
        tokens = rng.normal(size = (5, 2))
        mask = numpy.array([True, True, False, True, False])
        first = token_align(parts, tokens, mask, identity_proj, attn, FrechetConfig(), disk)
        assert numpy.all(first.weights.data[:, ~mask] == 0.0)
        tokens[~mask] = rng.normal(size = (2, 2))
        second = token_align(parts, tokens, mask, identity_proj, attn, FrechetConfig(), disk)
        numpy.testing.assert_allclose(first.contexts.coords.data, second.contexts.coords.data, atol = 1e-15)

    def test_weight_rows_sum_to_one(self, disk, identity_proj, rng):
        attn = HyperbolicAttention(2, disk)
        aligned = token_align(0.2 * rng.uniform(-1, 1, size = (2, 4, 2)), rng.normal(size = (2, 3, 2)),
                              numpy.array([[True, True, True], [True, False, False]]), identity_proj, attn,
                              FrechetConfig(), disk)
        numpy.testing.assert_allclose(aligned.weights.data.sum(axis = -1), 1.0, atol = 1e-12)
        assert aligned.contexts.shape == (2, 4, 2)

    def test_sharp_attention_selects_nearest_value(self, disk, identity_proj):
        attn = HyperbolicAttention(2, disk)
        attn.set_temperature(1e-4)
        tokens = numpy.array([[0.4, 0.0], [0.0, 0.4], [-0.4, 0.0]])
        query = numpy.array([[0.05, 0.3]])
        aligned = token_align(query, tokens, numpy.ones(3, dtype = bool), identity_proj, attn,
                              FrechetConfig(), disk)
        nearest = identity_proj(tokens[1]).coords.data
        assert disk.dist_array(aligned.contexts.coords.data[0], nearest) < 1e-4

    def test_empty_mask(self, disk, identity_proj):
        with pytest.raises(EmptyInputError):
            token_align(numpy.zeros((1, 2)), numpy.ones((2, 2)), numpy.zeros(2, dtype = bool), identity_proj,
                        HyperbolicAttention(2, disk), FrechetConfig(), disk)


class TestPooledAlign:

    def test_identical_parts(self, disk, identity_proj):
        parts = numpy.tile([0.1, -0.2], (4, 1))
        pose, _ = pooled_align(parts, numpy.ones((2, 2)), numpy.ones(2, dtype = bool), identity_proj,
                               FrechetConfig(), disk)
        numpy.testing.assert_allclose(pose.coords.data, [0.1, -0.2], atol = 1e-9)

    def test_single_token(self, disk, identity_proj):
        tokens = numpy.array([[0.3, 0.1], [5.0, 5.0]])
        _, text = pooled_align(numpy.zeros((4, 2)), tokens, numpy.array([True, False]), identity_proj,
                               FrechetConfig(), disk)
        numpy.testing.assert_allclose(text.coords.data, identity_proj(tokens[0]).coords.data, atol = 1e-12)

    def test_symmetric_parts(self, disk, identity_proj):
        r = 0.3
        parts = numpy.array([[r, 0.0], [-r, 0.0], [0.0, r], [0.0, -r]])
        pose, _ = pooled_align(parts, numpy.ones((1, 2)), numpy.ones(1, dtype = bool), identity_proj,
                               FrechetConfig(tol = 1e-10), disk)
        numpy.testing.assert_allclose(pose.coords.data, [0.0, 0.0], atol = 1e-6)

    def test_empty_mask(self):
        with pytest.raises(EmptyInputError):
            masked_mean(numpy.ones((2, 3)), numpy.zeros(2, dtype = bool))


class TestAlpha:

    def test_initial_value(self):
        assert alpha(0, AlphaSchedule(0.7, 100)).item() == pytest.approx(0.8)

    def test_lower_clamp(self):
        sched = AlphaSchedule(0.0, 100, logit_init = -50.0)
        assert alpha(0, sched).item() == pytest.approx(0.1)

    def test_upper_clamp(self):
        sched = AlphaSchedule(0.9, 100, logit_init = 50.0)
        assert alpha(100, sched).item() == 1.0

    def test_listing_variant(self):
        sched = AlphaSchedule(0.9, 100, logit_init = 50.0, variant = 'listing')
        assert alpha(100, sched).item() == 0.99
        assert alpha(50, AlphaSchedule(0.5, 100, variant = 'listing')).item() == pytest.approx(0.5 + 0.025 + 0.1)

    def test_ramp(self):
        sched = AlphaSchedule(0.5, 10)
        assert alpha(10, sched).item() - alpha(0, sched).item() == pytest.approx(0.1)

    def test_step_outside_schedule(self):
        sched = AlphaSchedule(0.7, 10)
        for step in (-1, 11):
            with pytest.raises(ConfigError):
                alpha(step, sched)

    def test_zero_steps(self):
        with pytest.raises(ConfigError):
            AlphaSchedule(0.7, 0)
        sched = AlphaSchedule(0.7, 1)
        sched.total_steps = 0
        with pytest.raises(ConfigError):
            alpha(0, sched)


class TestTotalLoss:

    def test_language_only(self):
        assert total_loss(T.Tensor(1.7), T.Tensor(9.0), 1.0).item() == 1.7

    def test_blend(self):
        assert total_loss(T.Tensor(2.0), T.Tensor(4.0), 0.5).item() == 3.0

    def test_derivative(self):
        grad = T.finite_difference_grad(lambda ce: total_loss(ce, T.Tensor(4.0), 0.3), T.Tensor(2.0))
        assert grad.item() == pytest.approx(0.3, abs = 1e-8)

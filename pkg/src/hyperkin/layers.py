#  Author(s):  hyperkin contributors
#  Created on: 2026-10
#
# Copyright (c) 2026 hyperkin contributors
# Released under MIT License

"""Hyperbolic projection, the two pose/text alignment strategies, the
geodesic contrastive loss and the α blend between the language loss and the
hyperbolic regulariser."""

import dataclasses
import logging
import math

import numpy

from hyperkin import tensor as T
from hyperkin.errors import ConfigError, DomainError, EmptyInputError, NumericalError, ShapeError
from hyperkin.frechet import FrechetConfig, frechet_mean, part_weights, stack_points, weighted_midpoint
from hyperkin.manifold import ManifoldPoint, coords
from hyperkin.nn import Linear, Module, parameter

logger = logging.getLogger(__name__)

TAU_FLOOR = 0.01
TAU_RANGE = 2.0


def _logit(p):
    return math.log(p / (1.0 - p))


class HyperbolicProjection(Module):
    """h = expmap0(clip(s · (x W + b))), with s = exp(log_scale)."""
    def __init__(self, d_in, d_hyp, ball, rng, init = 'xavier'):
        super().__init__()
        self.linear = Linear(d_in, d_hyp, rng, bias = True, init = init)
        self.log_scale = parameter(0.0)
        self.ball = ball

    @property
    def scale(self):
        return math.exp(self.log_scale.item())

    def tangent(self, x):
        """Scaled tangent vector at the origin, before clipping."""
        x = T.as_tensor(x)
        if not numpy.all(numpy.isfinite(x.data)):
            raise NumericalError('projection input has non-finite values')
        return T.exp(self.log_scale) * self.linear(x)

    def __call__(self, x):
        return self.ball.expmap0(self.ball.clip_tangent(self.tangent(x)))


def project(x, layer):
    return layer(x)


class HyperbolicAttention(Module):
    """Keys are the Möbius affine image M ⊗ v ⊕ b of the values; scores are
    negative geodesic distances divided by a learnable temperature."""
    def __init__(self, d_hyp, ball, init_tau = 1.0):
        super().__init__()
        self.m_key = parameter(numpy.eye(d_hyp))
        self.b_key = ball.parameter(numpy.zeros(d_hyp))
        self.log_tau_attn = parameter(math.log(init_tau))
        self.ball = ball

    @property
    def tau(self):
        return math.exp(self.log_tau_attn.item())

    def set_temperature(self, tau):
        if not tau > 0.0:
            raise DomainError('attention temperature must be positive', value = tau)
        self.log_tau_attn.assign(math.log(tau))

    def keys(self, values):
        return self.ball.mobius_add(self.ball.mobius_matvec(self.m_key, values), self.b_key)

    def weights(self, queries, values, mask):
        """Attention weights (..., P, T) of queries (..., P, d) over values
        (..., T, d); masked tokens get exactly 0."""
        k = coords(self.keys(values))
        q = coords(queries)
        q = q.reshape(q.shape[:-1] + (1, q.shape[-1]))
        k = k.reshape(k.shape[:-2] + (1,) + k.shape[-2:])
        scores = -self.ball.dist(q, k) / T.exp(self.log_tau_attn)
        mask = numpy.asarray(mask, dtype = bool)
        return T.softmax(scores, axis = -1, mask = mask[..., None, :])


class ContrastiveHead(Module):
    """Temperature τ = 2·sigmoid(log_tau) + 0.01 and margin m = max(margin, 0)
    of the geodesic InfoNCE loss."""
    def __init__(self, init_tau = 0.5, init_margin = 0.1, label_smoothing = 0.2):
        super().__init__()
        if not 0.0 <= label_smoothing < 1.0:
            raise ConfigError('label smoothing must lie in [0, 1)')
        self.log_tau = parameter(0.0)
        self.margin = parameter(float(init_margin))
        self.label_smoothing = label_smoothing
        self.set_temperature(init_tau)

    def set_temperature(self, tau):
        if not TAU_FLOOR < tau < TAU_FLOOR + TAU_RANGE:
            raise DomainError('temperature outside the reachable range (0.01, 2.01)', value = tau)
        self.log_tau.assign(_logit((tau - TAU_FLOOR) / TAU_RANGE))

    def tau(self):
        return TAU_RANGE * T.sigmoid(self.log_tau) + TAU_FLOOR

    def clamped_margin(self):
        return T.clamp_min(self.margin, 0.0)


def info_nce_from_distances(distances, head):
    """Smoothed cross-entropy of the rows of -D/τ against the diagonal, with
    the margin subtracted from off-diagonal logits.  Leading axes of
    ``distances`` (..., B, B) are averaged."""
    d = T.as_tensor(distances)
    if d.ndim < 2 or d.shape[-1] != d.shape[-2]:
        raise ShapeError('distance matrix must be square', d.shape)
    b = d.shape[-1]
    if b == 0:
        raise EmptyInputError('contrastive loss needs at least one pair')
    off_diagonal = 1.0 - numpy.eye(b)
    logits = -d / head.tau() - head.clamped_margin() * off_diagonal
    log_p = T.log_softmax(logits, axis = -1)
    eps = head.label_smoothing
    target = (1.0 - eps) * numpy.eye(b) + eps / b
    return -(log_p * target).sum(axis = -1).mean()


def contrastive_loss(pose_batch, text_batch, head, ball = None):
    """Geodesic InfoNCE between B pose and B text points.

    Points of shape (B, d) give one loss; (B, P, d) gives one loss per part,
    averaged over the parts.
    """
    if ball is None:
        ball = pose_batch.manifold
    p, t = coords(pose_batch), coords(text_batch)
    if p.shape != t.shape:
        raise ShapeError('pose and text batches differ', p.shape, t.shape)
    if p.shape[0] == 0:
        raise EmptyInputError('contrastive loss needs at least one pair')
    if p.ndim == 3:
        p = p.transpose(1, 0, 2)
        t = t.transpose(1, 0, 2)
    elif p.ndim != 2:
        raise ShapeError('contrastive loss expects (B, d) or (B, P, d) points', p.shape)
    rows = p.reshape(p.shape[:-1] + (1, p.shape[-1]))
    cols = t.reshape(t.shape[:-2] + (1,) + t.shape[-2:])
    return info_nce_from_distances(ball.dist(rows, cols), head)


def masked_mean(tokens, mask):
    """Mean over the token axis (-2) of ``tokens`` restricted to ``mask``."""
    tokens = T.as_tensor(tokens)
    mask = numpy.asarray(mask, dtype = numpy.float64)
    counts = mask.sum(axis = -1, keepdims = True)
    if numpy.any(counts == 0.0):
        raise EmptyInputError('text mask has no valid token')
    return (tokens * mask[..., None]).sum(axis = -2) / counts


def pooled_align(part_points, text_tokens, text_mask, text_proj, cfg = None, ball = None):
    """Pooled strategy: the pose is the Fréchet mean of the parts weighted by
    their distance to the origin; the text is the projection of the masked
    mean of its token states.  Returns (pose, text) ManifoldPoints."""
    cfg = cfg or FrechetConfig()
    ball = ball or text_proj.ball
    text = text_proj(masked_mean(text_tokens, text_mask))
    return pooled_pose(part_points, cfg, ball), text


def pooled_pose(part_points, cfg, ball):
    h = stack_points(part_points)
    return frechet_mean(h, part_weights(h, ball, cfg.weight_temperature), cfg, ball).mean


@dataclasses.dataclass
class TokenAlignment:
    parts: ManifoldPoint
    contexts: ManifoldPoint
    weights: T.Tensor


def token_align(part_points, text_tokens, text_mask, text_proj, attn, cfg = None, ball = None):
    """Token strategy: every part embedding h_p attends over the projected
    token states and is paired with its attention midpoint c_p."""
    cfg = cfg or FrechetConfig()
    ball = ball or text_proj.ball
    mask = numpy.asarray(text_mask, dtype = bool)
    if numpy.any(~numpy.any(mask, axis = -1)):
        raise EmptyInputError('text mask has no valid token')
    h = stack_points(part_points)
    values = text_proj(text_tokens)
    weights = attn.weights(h, values, mask)
    contexts = weighted_midpoint(values, weights, cfg, ball).mean
    return TokenAlignment(ManifoldPoint(h, ball), contexts, weights)


class AlphaSchedule(Module):
    """α(step) = clamp(alpha_init + rate·progress + 0.2·sigmoid(logit_alpha),
    0.1, upper).

    The default ``equation`` variant ramps with rate 0.1 up to 1.0; the
    ``listing`` variant ramps with rate 0.05 up to 0.99.
    """
    variants = {'equation': (0.1, 1.0), 'listing': (0.05, 0.99)}
    lower = 0.1

    def __init__(self, alpha_init = 0.7, total_steps = 1, logit_init = 0.0, variant = 'equation'):
        super().__init__()
        if variant not in self.variants:
            raise ConfigError('unknown alpha variant ' + repr(variant))
        if total_steps <= 0:
            raise ConfigError('alpha schedule needs total_steps > 0')
        self.alpha_init = alpha_init
        self.total_steps = int(total_steps)
        self.logit_alpha = parameter(float(logit_init))
        self.variant = variant

    @property
    def upper(self):
        return self.variants[self.variant][1]


def alpha(step, sched):
    if sched.total_steps <= 0:
        raise ConfigError('alpha schedule needs total_steps > 0')
    if not 0 <= step <= sched.total_steps:
        raise ConfigError('alpha step %s outside [0, %d]' % (step, sched.total_steps))
    rate, upper = sched.variants[sched.variant]
    progress = step / sched.total_steps
    raw = sched.alpha_init + rate * progress + 0.2 * T.sigmoid(sched.logit_alpha)
    return T.clamp(raw, sched.lower, upper)


def total_loss(ce, hyp_reg, a):
    return a * ce + (1.0 - a) * hyp_reg

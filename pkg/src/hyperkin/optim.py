#  Author(s):  hyperkin contributors
#  Created on: 2026-10
#
# Copyright (c) 2026 hyperkin contributors
# Released under MIT License

"""AdamW for Euclidean parameters and Riemannian Adam for points of a
Poincaré ball (and its log-curvature).

Riemannian Adam keeps its moments in ambient coordinates and reuses them at
the new point; no parallel transport is applied.
"""

import dataclasses
import logging
import math

import numpy

from hyperkin import tensor as T
from hyperkin.errors import ConfigError
from hyperkin.manifold import ManifoldParameter

logger = logging.getLogger(__name__)

KINDS = ('euclidean', 'riemannian')


@dataclasses.dataclass
class ParamGroup:
    """Parameters sharing one update rule.

    kind : 'euclidean' (AdamW) or 'riemannian' (Riemannian Adam)
    weight_decay : defaults to 0.01 for euclidean groups, 0 for riemannian
    state : per-parameter Adam moments, keyed by ``id``
    """
    kind: str
    params: list
    lr: float
    betas: tuple = (0.9, 0.999)
    eps: float = 1e-8
    weight_decay: float = None
    grad_clip_norm: float = 1.0
    state: dict = dataclasses.field(default_factory = dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError('unknown parameter group kind ' + repr(self.kind))
        if self.weight_decay is None:
            self.weight_decay = 0.01 if self.kind == 'euclidean' else 0.0
        if self.kind == 'riemannian' and self.weight_decay != 0.0:
            raise ConfigError('riemannian groups take no weight decay')
        if not self.lr > 0.0:
            raise ConfigError('learning rate must be positive')
        self.base_lr = self.lr


def _moments(group, p, grad):
    state = group.state.setdefault(id(p), {'step': 0,
                                            'exp_avg': numpy.zeros_like(p.data),
                                            'exp_avg_sq': numpy.zeros_like(p.data)})
    beta1, beta2 = group.betas
    state['step'] += 1
    state['exp_avg'] = beta1 * state['exp_avg'] + (1.0 - beta1) * grad
    state['exp_avg_sq'] = beta2 * state['exp_avg_sq'] + (1.0 - beta2) * grad * grad
    m_hat = state['exp_avg'] / (1.0 - beta1 ** state['step'])
    v_hat = state['exp_avg_sq'] / (1.0 - beta2 ** state['step'])
    return m_hat / (numpy.sqrt(v_hat) + group.eps)


def adamw_step(group):
    """Adam with decoupled weight decay: p ← p·(1 − lr·wd) − lr·m̂/(√v̂ + eps)."""
    for p in group.params:
        if p.grad is None:
            continue
        direction = _moments(group, p, p.grad)
        p.assign(p.data * (1.0 - group.lr * group.weight_decay) - group.lr * direction)


def radam_step(group, ball = None):
    """Riemannian Adam.  Ball points follow the exponential map of the
    rescaled gradient g / λ_x² and are projected back into the ball; any
    other tensor of the group (the log-curvature) takes a plain Adam step.
    """
    for p in group.params:
        if p.grad is None:
            continue
        if not isinstance(p, ManifoldParameter):
            p.assign(p.data - group.lr * _moments(group, p, p.grad))
            continue
        manifold = p.ball if ball is None else ball
        c = manifold.c_value
        x = p.data
        lam = 2.0 / (1.0 - c * numpy.sum(x * x, axis = -1, keepdims = True))
        rgrad = p.grad / (lam * lam)
        step = manifold.clip_tangent(T.Tensor(-group.lr * _moments(group, p, rgrad)))
        moved = manifold.expmap(T.Tensor(x), step)
        p.assign(manifold.project_to_ball(moved).coords.data)


def clip_global_grad_norm(params, max_norm = 1.0):
    """Rescale every gradient so the global L2 norm is at most ``max_norm``.
    Returns the scale applied."""
    grads = [p.grad for p in params if p.grad is not None]
    total = math.sqrt(sum(float(numpy.sum(g * g)) for g in grads))
    if total <= max_norm or total == 0.0:
        return 1.0
    scale = max_norm / total
    for p in params:
        if p.grad is not None:
            p.grad = p.grad * scale
    logger.debug('gradients clipped by %g', scale)
    return scale


def cosine_lr(step, total_steps, base_lr, warmup_steps = 0, min_lr = 0.0):
    """Linear warmup over ``warmup_steps`` then cosine annealing to ``min_lr``."""
    if warmup_steps > 0 and step < warmup_steps:
        return base_lr * (step + 1) / warmup_steps
    span = max(total_steps - warmup_steps, 1)
    progress = min(max(step - warmup_steps, 0) / span, 1.0)
    return min_lr + 0.5 * (base_lr - min_lr) * (1.0 + math.cos(math.pi * progress))


class Optimizer:
    """Steps a list of :class:`ParamGroup`, each with its own rule."""
    def __init__(self, groups):
        self.groups = list(groups)

    def zero_grad(self):
        for group in self.groups:
            for p in group.params:
                p.zero_grad()

    def clip(self):
        """One global clip over every group; the bound is the smallest
        ``grad_clip_norm`` any group sets."""
        norms = [g.grad_clip_norm for g in self.groups if g.grad_clip_norm is not None]
        if not norms:
            return 1.0
        params = [p for g in self.groups for p in g.params]
        return clip_global_grad_norm(params, min(norms))

    def set_lr(self, factor):
        for group in self.groups:
            group.lr = group.base_lr * factor

    def step(self):
        for group in self.groups:
            if group.kind == 'euclidean':
                adamw_step(group)
            else:
                radam_step(group)

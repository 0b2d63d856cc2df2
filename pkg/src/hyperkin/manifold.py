#  Author(s):  hyperkin contributors
#  Created on: 2026-10
#
# Copyright (c) 2026 hyperkin contributors
# Released under MIT License

"""Poincaré ball with learnable curvature.

All operations work on the last axis and broadcast over the leading ones.
Distances follow d(u, v) = (2/√c)·artanh(√c‖(−u) ⊕ v‖) and the origin maps are
chosen so that d(0, expmap0(v)) = ‖v‖ exactly:

    expmap0(v) = tanh(√c‖v‖/2) · v / (√c‖v‖)
    logmap0(y) = (2/√c) · artanh(√c‖y‖) · y / ‖y‖

The maps at a base point x translate the origin maps with Möbius addition,
expmap(x, v) = x ⊕ expmap0(v) and logmap(x, y) = logmap0((−x) ⊕ y).
"""

import math

import numpy

from hyperkin import tensor as T
from hyperkin.errors import DomainError, NumericalError, ShapeError
from hyperkin.nn import Module


class ManifoldPoint:
    """Point strictly inside the ball, ``coords`` of shape (..., d)."""
    __slots__ = ('coords', 'manifold')

    def __init__(self, coords, manifold):
        self.coords = coords
        self.manifold = manifold

    @property
    def shape(self):
        return self.coords.shape

    def __repr__(self):
        return 'ManifoldPoint(' + repr(self.coords.data) + ')'


class TangentVector:
    """Vector in the tangent space at ``base_point`` (None is the origin)."""
    __slots__ = ('coords', 'base_point', 'degenerate')

    def __init__(self, coords, base_point = None, degenerate = None):
        self.coords = coords
        self.base_point = base_point
        self.degenerate = degenerate

    @property
    def shape(self):
        return self.coords.shape

    def __repr__(self):
        return 'TangentVector(' + repr(self.coords.data) + ')'


class ManifoldParameter(T.Tensor):
    """Learnable point of a ball, updated by Riemannian Adam."""
    def __init__(self, data, ball):
        super().__init__(data, requires_grad = True)
        self.ball = ball


def coords(x):
    if isinstance(x, (ManifoldPoint, TangentVector)):
        return x.coords
    return T.as_tensor(x)


def _check_finite(x, what):
    if not numpy.all(numpy.isfinite(x.data)):
        raise NumericalError(what + ' has non-finite coordinates')


def _same_dim(u, v):
    if u.shape[-1] != v.shape[-1]:
        raise ShapeError('points live in different dimensions', u.shape, v.shape)


def _mobius_add_arrays(u, v, c, eps_div):
    uv = numpy.sum(u * v, axis = -1, keepdims = True)
    uu = numpy.sum(u * u, axis = -1, keepdims = True)
    vv = numpy.sum(v * v, axis = -1, keepdims = True)
    num = (1.0 + 2.0 * c * uv + c * vv) * u + (1.0 - c * uu) * v
    return num / (1.0 + 2.0 * c * uv + c * c * uu * vv + eps_div)


def distance_partials(u, v, c):
    """Closed-form partial derivatives of d(u, v) with respect to u, v and c,
    on numpy arrays.

    Written with the conformal factors λ_x = 2/(1 − c‖x‖²):

        ∇_u d = √c·λ_u·λ_v / √(γ² − 1) · [(u − v) + c‖u − v‖²·u / (1 − c‖u‖²)]

    where γ − 1 = c‖u − v‖²·λ_u·λ_v / 2, and ∇_v d swaps the roles of u and v.
    Coincident pairs get the zero subgradient and are flagged in the last
    return value.
    """
    uu = numpy.sum(u * u, axis = -1, keepdims = True)
    vv = numpy.sum(v * v, axis = -1, keepdims = True)
    diff = u - v
    dd = numpy.sum(diff * diff, axis = -1, keepdims = True)
    lam_u = 2.0 / (1.0 - c * uu)
    lam_v = 2.0 / (1.0 - c * vv)
    gamma_m1 = 0.5 * c * dd * lam_u * lam_v
    root = numpy.sqrt(gamma_m1 * (gamma_m1 + 2.0))
    degenerate = root <= 1e-300
    safe_root = numpy.where(degenerate, 1.0, root)
    sqrt_c = math.sqrt(c) if numpy.ndim(c) == 0 else numpy.sqrt(c)
    scale = numpy.where(degenerate, 0.0, sqrt_c * lam_u * lam_v / safe_root)
    grad_u = scale * (diff + 0.5 * c * dd * lam_u * u)
    grad_v = scale * (-diff + 0.5 * c * dd * lam_v * v)
    dist = numpy.arccosh(1.0 + gamma_m1) / sqrt_c
    dgamma_dc = 0.5 * dd * lam_u * lam_v * (1.0 + 0.5 * c * uu * lam_u + 0.5 * c * vv * lam_v)
    grad_c = numpy.where(degenerate, 0.0, -0.5 * dist / c + dgamma_dc / (sqrt_c * safe_root))
    return grad_u, grad_v, grad_c[..., 0], degenerate[..., 0]


@T.register('dist')
class Dist(T.Function):
    """Geodesic distance with its closed-form backward (see
    :func:`distance_partials`)."""
    def forward(self, u, v, c, eps_div = 1e-15):
        self.u, self.v, self.c = u, v, c
        w = _mobius_add_arrays(-u, v, c, eps_div)
        z = math.sqrt(c) * numpy.sqrt(numpy.sum(w * w, axis = -1))
        return 2.0 / math.sqrt(c) * numpy.arctanh(numpy.minimum(z, T.ARTANH_BOUND))

    def backward(self, grad):
        grad_u, grad_v, grad_c, _ = distance_partials(self.u, self.v, self.c)
        g = grad[..., None]
        return g * grad_u, g * grad_v, grad * grad_c


class PoincareBall(Module):
    """Poincaré ball of curvature −c, c = exp(log_c).

    init_c : initial curvature magnitude
    learnable : when False, log_c is frozen (Euclidean-baseline mode)
    eps_boundary : relative margin kept from the boundary by projections
    eps_div : guard added to Möbius denominators
    """
    def __init__(self, init_c = 1.0, learnable = True, eps_boundary = 1e-5, eps_div = 1e-15):
        super().__init__()
        if not (init_c > 0.0 and math.isfinite(init_c)):
            raise DomainError('curvature must be positive and finite', value = init_c)
        self.log_c = T.Tensor(math.log(init_c), requires_grad = learnable)
        self.eps_boundary = eps_boundary
        self.eps_div = eps_div
        self.clip_eps = 1e-5

    @property
    def learnable(self):
        return self.log_c.requires_grad

    @property
    def c(self):
        return T.exp(self.log_c)

    @property
    def c_value(self):
        return math.exp(self.log_c.item())

    @property
    def radius(self):
        return 1.0 / math.sqrt(self.c_value)

    def point(self, x):
        return ManifoldPoint(coords(x), self)

    def parameter(self, data):
        return ManifoldParameter(self._project_array(numpy.asarray(data, dtype = numpy.float64)), self)

    def origin(self, dim):
        return ManifoldPoint(T.zeros(dim), self)

    def _project_array(self, x):
        sqrt_c = math.sqrt(self.c_value)
        n = numpy.linalg.norm(x, axis = -1, keepdims = True)
        limit = 1.0 - self.eps_boundary
        outside = sqrt_c * n >= limit
        safe = numpy.where(outside, n, 1.0)
        return numpy.where(outside, x * (limit / sqrt_c) / safe, x)

    def _check_inside(self, x, what):
        sqrt_norm = math.sqrt(self.c_value) * numpy.linalg.norm(x.data, axis = -1)
        if numpy.any(sqrt_norm >= 1.0):
            raise DomainError(what + ' lies on or outside the ball boundary',
                              value = float(numpy.max(sqrt_norm)))

    def conformal_factor(self, x):
        x = coords(x)
        return 2.0 / (1.0 - self.c * (x * x).sum(axis = -1, keepdims = True))

    def project_to_ball(self, x):
        x = coords(x)
        _check_finite(x, 'point')
        sqrt_c = T.sqrt(self.c)
        n = T.norm(x, floor = self.eps_div)
        limit = 1.0 - self.eps_boundary
        outside = math.sqrt(self.c_value) * n.data >= limit
        if not numpy.any(outside):
            return ManifoldPoint(x, self)
        return ManifoldPoint(T.where(outside, x * (limit / (sqrt_c * n)), x), self)

    def clip_tangent(self, v):
        base = v.base_point if isinstance(v, TangentVector) else None
        v = coords(v)
        _check_finite(v, 'tangent vector')
        scale = T.clamp_min(T.sqrt(self.c) * T.norm(v, floor = self.eps_div) + self.clip_eps, 1.0)
        return TangentVector(v / scale, base)

    def mobius_add(self, u, v):
        u, v = coords(u), coords(v)
        _same_dim(u, v)
        c = self.c
        uv = (u * v).sum(axis = -1, keepdims = True)
        uu = (u * u).sum(axis = -1, keepdims = True)
        vv = (v * v).sum(axis = -1, keepdims = True)
        num = (1.0 + 2.0 * c * uv + c * vv) * u + (1.0 - c * uu) * v
        den = 1.0 + 2.0 * c * uv + c * c * uu * vv + self.eps_div
        return self.project_to_ball(num / den)

    def dist(self, u, v):
        u, v = coords(u), coords(v)
        _same_dim(u, v)
        self._check_inside(u, 'first point')
        self._check_inside(v, 'second point')
        return Dist.apply(u, v, self.c, eps_div = self.eps_div)

    def dist_array(self, u, v):
        """Distance on raw numpy coordinates, outside of any tape."""
        c = self.c_value
        w = _mobius_add_arrays(-numpy.asarray(u), numpy.asarray(v), c, self.eps_div)
        z = math.sqrt(c) * numpy.linalg.norm(w, axis = -1)
        return 2.0 / math.sqrt(c) * numpy.arctanh(numpy.minimum(z, T.ARTANH_BOUND))

    def dist0(self, x):
        """d(0, x), composed from primitives."""
        x = coords(x)
        self._check_inside(x, 'point')
        sqrt_c = T.sqrt(self.c)
        return 2.0 / sqrt_c * T.artanh(sqrt_c * T.norm(x, keepdims = False, floor = 0.0))

    def dist_grad(self, u, v):
        """Euclidean gradient of d(u, v) with respect to u, flagged where u = v."""
        u, v = coords(u), coords(v)
        _same_dim(u, v)
        grad_u, _, _, degenerate = distance_partials(u.data, v.data, self.c_value)
        return TangentVector(T.Tensor(grad_u), None, degenerate)

    def expmap0(self, v, clip = False):
        if clip:
            v = self.clip_tangent(v)
        v = coords(v)
        _check_finite(v, 'tangent vector')
        sqrt_c = T.sqrt(self.c)
        n = T.norm(v, floor = self.eps_div)
        return self.project_to_ball(T.tanh(0.5 * sqrt_c * n) * v / (sqrt_c * n))

    def logmap0(self, x):
        x = coords(x)
        _check_finite(x, 'point')
        self._check_inside(x, 'point')
        sqrt_c = T.sqrt(self.c)
        n = T.norm(x, floor = self.eps_div)
        return TangentVector(2.0 * T.artanh(sqrt_c * n) * x / (sqrt_c * n))

    def expmap(self, x, v, clip = False):
        base = coords(x)
        moved = self.expmap0(v, clip = clip)
        return self.mobius_add(base, moved)

    def logmap(self, x, y):
        base = coords(x)
        w = self.mobius_add(-base, coords(y))
        return TangentVector(self.logmap0(w).coords, ManifoldPoint(base, self))

    def mobius_matvec(self, m, x):
        m = coords(m)
        x = coords(x)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[1] != x.shape[-1]:
            raise ShapeError('mobius_matvec needs a square matrix matching the point', m.shape, x.shape)
        v = self.logmap0(x).coords
        flat = v.reshape(-1, v.shape[-1])
        return self.expmap0(T.matmul(flat, m.transpose()).reshape(v.shape))

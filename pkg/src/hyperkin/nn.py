#  Author(s):  hyperkin contributors
#  Created on: 2026-10
#
# Copyright (c) 2026 hyperkin contributors
# Released under MIT License

import numpy

from hyperkin import tensor as T
from hyperkin.errors import ShapeError


def parameter(data):
    return T.Tensor(data, requires_grad = True)


class Module:
    """Container of parameters and sub-modules.  Parameters are the
    attributes holding a :class:`Tensor` with ``requires_grad``; children are
    attributes holding a Module, or a list/dict of Modules.  A parameter shared
    by several children (the ball curvature for instance) is listed once, under
    the first name it is found with.
    """
    def __init__(self):
        self.training = True

    def named_parameters(self, prefix = '', seen = None):
        if seen is None:
            seen = set()
        for name, value in vars(self).items():
            for child_name, child in _children(name, value):
                full = prefix + child_name
                if isinstance(child, T.Tensor):
                    if child.requires_grad and id(child) not in seen:
                        seen.add(id(child))
                        yield full, child
                elif isinstance(child, Module):
                    yield from child.named_parameters(full + '.', seen)

    def parameters(self):
        return [p for _, p in self.named_parameters()]

    def modules(self):
        yield self
        for name, value in vars(self).items():
            for _, child in _children(name, value):
                if isinstance(child, Module):
                    yield from child.modules()

    def train(self, mode = True):
        for m in self.modules():
            m.training = mode
        return self

    def eval(self):
        return self.train(False)

    def zero_grad(self):
        for p in self.parameters():
            p.zero_grad()

    def state_dict(self):
        state = {name: p.data.copy() for name, p in self.named_parameters()}
        for m_name, m in self.named_modules():
            for key, value in m.buffers().items():
                state[m_name + key] = value.copy()
        return state

    def load_state_dict(self, state):
        for name, p in self.named_parameters():
            if name not in state:
                raise KeyError('missing parameter ' + name)
            p.assign(state[name])
        for m_name, m in self.named_modules():
            for key in m.buffers():
                if m_name + key in state:
                    m.load_buffer(key, state[m_name + key])

    def named_modules(self, prefix = ''):
        yield prefix, self
        for name, value in vars(self).items():
            for child_name, child in _children(name, value):
                if isinstance(child, Module):
                    yield from child.named_modules(prefix + child_name + '.')

    def buffers(self):
        return {}

    def load_buffer(self, key, value):
        pass


def _children(name, value):
    if isinstance(value, (list, tuple)):
        return [(name + '.' + str(i), v) for i, v in enumerate(value)]
    if isinstance(value, dict):
        return [(name + '.' + str(k), v) for k, v in value.items()]
    return [(name, value)]


class Linear(Module):
    """y = x W + b over the last axis of ``x``."""
    def __init__(self, d_in, d_out, rng, bias = True, init = 'xavier'):
        super().__init__()
        if init == 'xavier':
            bound = numpy.sqrt(6.0 / (d_in + d_out))
            weight = rng.uniform(-bound, bound, size = (d_in, d_out))
        elif init == 'zeros':
            weight = numpy.zeros((d_in, d_out))
        elif init == 'identity':
            weight = numpy.eye(d_in, d_out)
        else:
            raise ValueError('unknown init ' + str(init))
        self.weight = parameter(weight)
        self.bias = parameter(numpy.zeros(d_out)) if bias else None

    def __call__(self, x):
        x = T.as_tensor(x)
        if x.ndim == 0 or x.shape[-1] != self.weight.shape[0]:
            raise ShapeError('linear input width mismatch', x.shape, self.weight.shape)
        flat = x.reshape(-1, x.shape[-1])
        y = T.matmul(flat, self.weight).reshape(x.shape[:-1] + (self.weight.shape[1],))
        return y + self.bias if self.bias is not None else y


class Embedding(Module):
    def __init__(self, count, dim, rng):
        super().__init__()
        self.weight = parameter(rng.normal(0.0, dim ** -0.5, size = (count, dim)))

    def __call__(self, ids):
        return self.weight[numpy.asarray(ids, dtype = numpy.int64)]


class BatchNorm(Module):
    """Per-channel normalisation of (N, C, T, V) features.  In training mode
    statistics come from the valid frames of the batch (``frame_mask`` of
    shape (N, T)); running statistics are used in eval mode.
    """
    def __init__(self, channels, momentum = 0.1, eps = 1e-5):
        super().__init__()
        self.gamma = parameter(numpy.ones((1, channels, 1, 1)))
        self.beta = parameter(numpy.zeros((1, channels, 1, 1)))
        self.momentum = momentum
        self.eps = eps
        self.running_mean = numpy.zeros((1, channels, 1, 1))
        self.running_var = numpy.ones((1, channels, 1, 1))

    def buffers(self):
        return {'running_mean': self.running_mean, 'running_var': self.running_var}

    def load_buffer(self, key, value):
        setattr(self, key, numpy.array(value, dtype = numpy.float64))

    def __call__(self, x, frame_mask = None):
        if self.training:
            if frame_mask is None:
                weights = numpy.ones((x.shape[0], 1, x.shape[2], 1))
            else:
                weights = numpy.asarray(frame_mask, dtype = numpy.float64)[:, None, :, None]
            count = weights.sum() * x.shape[3]
            mean = (x * weights).sum(axis = (0, 2, 3), keepdims = True) / count
            centered = x - mean
            var = (centered * centered * weights).sum(axis = (0, 2, 3), keepdims = True) / count
            self.running_mean = (1.0 - self.momentum) * self.running_mean + self.momentum * mean.data
            self.running_var = (1.0 - self.momentum) * self.running_var + self.momentum * var.data
            normalized = centered / T.sqrt(var + self.eps)
        else:
            normalized = (x - self.running_mean) / numpy.sqrt(self.running_var + self.eps)
        return normalized * self.gamma + self.beta

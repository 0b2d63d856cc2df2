#  Author(s):  hyperkin contributors
#  Created on: 2026-10
#
# Copyright (c) 2026 hyperkin contributors
# Released under MIT License

"""Dense float64 tensors with tape-based reverse-mode differentiation.

Every operation is a :class:`Function` subclass registered under a name in
:data:`OPS`.  A :class:`GradTape` records the functions executed on tensors it
watches; :meth:`GradTape.backward` replays them in reverse.  There is no
global tape, the tape travels with the tensors that were recorded on it.

    with GradTape() as tape:
        tape.watch(w)
        loss = (w * w).sum()
        tape.backward(loss)
"""

import logging
import string

import numpy

from hyperkin.errors import DomainError, EmptyInputError, NumericalError, ShapeError, TapeError

logger = logging.getLogger(__name__)

ARTANH_BOUND = 1.0 - 1e-12
LOG_FLOOR = 1e-300

# name -> Function subclass, consumed by gradcheck for its coverage report
OPS = {}


def register(name):
    def decorator(cls):
        if name in OPS:
            raise RuntimeWarning('operation ' + name + ' already registered')
        cls.name = name
        OPS[name] = cls
        return cls
    return decorator


def unbroadcast(grad, shape):
    """Sum out the axes numpy broadcasting added so that ``grad`` has ``shape``."""
    shape = tuple(shape)
    if grad.shape == shape:
        return grad
    while grad.ndim > len(shape):
        grad = grad.sum(axis = 0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis = axis, keepdims = True)
    return grad


class GradTape:
    """Ordered record of the functions executed on watched tensors.

    A tape is active between ``__enter__`` and ``__exit__``.  Leaves must be
    registered with :meth:`watch`; any result computed from a watched tensor
    is recorded.  Nodes are visited exactly once, in reverse execution order,
    by :meth:`backward`.
    """
    def __init__(self):
        self.nodes = []
        self.active = False
        self.__watched = []

    def __enter__(self):
        self.active = True
        return self

    def __exit__(self, exc_type, exc, tb):
        self.active = False
        for leaf in self.__watched:
            leaf._tape = None
        self.__watched = []
        self.nodes = []
        return False

    def watch(self, *tensors):
        if not self.active:
            raise TapeError('can\'t watch tensors on an inactive tape')
        for t in tensors:
            if not t.requires_grad:
                continue
            if t._tape is not None and t._tape is not self:
                raise TapeError('tensor is already watched by another tape')
            if t._tape is None:
                t._tape = self
                self.__watched.append(t)
        return tensors[0] if len(tensors) == 1 else tensors

    def record(self, function, output):
        self.nodes.append((function, output))

    def backward(self, loss):
        if loss.data.size != 1:
            raise TapeError('backward needs a scalar loss, got shape ' + str(loss.shape))
        if not self.active or loss._tape is not self:
            raise TapeError('loss is not on an active tape')
        seed = numpy.ones_like(loss.data)
        if loss._function is None:
            loss._accumulate(seed)
            return
        grads = {id(loss): seed}
        for function, output in reversed(self.nodes):
            grad = grads.pop(id(output), None)
            if grad is None:
                continue
            input_grads = function.backward(grad)
            for inp, inp_grad in zip(function.inputs, input_grads):
                if inp_grad is None or not inp.requires_grad or inp._tape is not self:
                    continue
                inp_grad = unbroadcast(numpy.asarray(inp_grad, dtype = numpy.float64), inp.shape)
                if inp._function is None:
                    inp._accumulate(inp_grad)
                elif id(inp) in grads:
                    grads[id(inp)] = grads[id(inp)] + inp_grad
                else:
                    grads[id(inp)] = inp_grad


def _active_tape(tensors):
    tape = None
    for t in tensors:
        if t.requires_grad and t._tape is not None and t._tape.active:
            if tape is not None and t._tape is not tape:
                raise TapeError('operation mixes tensors from two different tapes')
            tape = t._tape
    return tape


class Function:
    """Base class of differentiable operations.

    ``forward`` receives numpy arrays and returns one array; ``backward``
    receives the gradient of the output and returns one gradient (or None)
    per input.
    """
    name = None
    check_finite = True

    def forward(self, *arrays, **kwargs):
        raise NotImplementedError

    def backward(self, grad):
        raise NotImplementedError

    @classmethod
    def apply(cls, *inputs, **kwargs):
        inputs = tuple(as_tensor(i) for i in inputs)
        function = cls()
        out = numpy.asarray(function.forward(*(i.data for i in inputs), **kwargs), dtype = numpy.float64)
        if cls.check_finite and not numpy.all(numpy.isfinite(out)):
            raise NumericalError(cls.name + ' produced non-finite values')
        result = Tensor._wrap(out)
        tape = _active_tape(inputs)
        if tape is not None:
            function.inputs = inputs
            result.requires_grad = True
            result._tape = tape
            result._function = function
            tape.record(function, result)
        return result


class Tensor:
    """Dense float64 array, row-major, with an optional gradient buffer.

    shape : tuple of dimension sizes
    data : numpy float64 buffer
    requires_grad : whether the tensor takes part in differentiation
    grad : numpy buffer of the same shape as data, populated by backward
    """
    __array_priority__ = 1000

    def __init__(self, data, requires_grad = False):
        self.data = numpy.array(data, dtype = numpy.float64)
        self.requires_grad = bool(requires_grad)
        self.grad = None
        self._tape = None
        self._function = None

    @classmethod
    def _wrap(cls, array):
        t = cls.__new__(Tensor)
        t.data = array
        t.requires_grad = False
        t.grad = None
        t._tape = None
        t._function = None
        return t

    def _accumulate(self, grad):
        if grad.shape != self.data.shape:
            raise ShapeError('gradient does not match tensor', grad.shape, self.data.shape)
        self.grad = grad.copy() if self.grad is None else self.grad + grad

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    def __len__(self):
        return len(self.data)

    def __repr__(self):
        return 'Tensor(' + repr(self.data) + ', requires_grad=' + str(self.requires_grad) + ')'

    def item(self):
        return float(self.data.reshape(-1)[0]) if self.data.size == 1 else self.data.item()

    def numpy(self):
        return self.data.copy()

    def detach(self):
        return Tensor._wrap(self.data)

    def zero_grad(self):
        self.grad = None

    def assign(self, array):
        """In-place parameter update, only legal outside of an active tape."""
        if self._tape is not None and self._tape.active:
            raise TapeError('can\'t modify a tensor watched by an active tape')
        array = numpy.asarray(array, dtype = numpy.float64)
        if array.shape != self.data.shape:
            raise ShapeError('assignment changes the shape', self.data.shape, array.shape)
        self.data = array.copy()

    # operators
    def __add__(self, other):
        return Add.apply(self, other)

    def __radd__(self, other):
        return Add.apply(other, self)

    def __sub__(self, other):
        return Sub.apply(self, other)

    def __rsub__(self, other):
        return Sub.apply(other, self)

    def __mul__(self, other):
        return Mul.apply(self, other)

    def __rmul__(self, other):
        return Mul.apply(other, self)

    def __truediv__(self, other):
        return Div.apply(self, other)

    def __rtruediv__(self, other):
        return Div.apply(other, self)

    def __neg__(self):
        return Neg.apply(self)

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, index):
        return GetItem.apply(self, index = index)

    def sum(self, axis = None, keepdims = False):
        return reduce(self, 'sum', axis, keepdims)

    def mean(self, axis = None, keepdims = False):
        return reduce(self, 'mean', axis, keepdims)

    def max(self, axis = None, keepdims = False):
        return reduce(self, 'max', axis, keepdims)

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return Reshape.apply(self, shape = shape)

    def transpose(self, *axes):
        if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])
        return Transpose.apply(self, axes = axes or None)


def as_tensor(value):
    if isinstance(value, Tensor):
        return value
    return Tensor._wrap(numpy.asarray(value, dtype = numpy.float64))


def zeros(*shape):
    return Tensor(numpy.zeros(shape))


def ones(*shape):
    return Tensor(numpy.ones(shape))


# internal methods for binary ops
@register('add')
class Add(Function):
    def forward(self, a, b):
        return a + b

    def backward(self, grad):
        return grad, grad


@register('sub')
class Sub(Function):
    def forward(self, a, b):
        return a - b

    def backward(self, grad):
        return grad, -grad


@register('mul')
class Mul(Function):
    def forward(self, a, b):
        self.a, self.b = a, b
        return a * b

    def backward(self, grad):
        return grad * self.b, grad * self.a


@register('div')
class Div(Function):
    def forward(self, a, b):
        if numpy.any(b == 0.0):
            raise DomainError('division by zero', value = 0.0)
        self.a, self.b = a, b
        return a / b

    def backward(self, grad):
        return grad / self.b, -grad * self.a / (self.b * self.b)


@register('neg')
class Neg(Function):
    def forward(self, a):
        return -a

    def backward(self, grad):
        return (-grad,)


# internal methods for unary ops
@register('tanh')
class Tanh(Function):
    def forward(self, a):
        self.out = numpy.tanh(a)
        return self.out

    def backward(self, grad):
        return (grad * (1.0 - self.out * self.out),)


@register('artanh')
class Artanh(Function):
    def forward(self, a):
        outside = numpy.abs(a) > 1.0
        if numpy.any(outside):
            raise DomainError('artanh argument outside [-1, 1]', value = float(a[outside].flat[0]))
        self.x = numpy.clip(a, -ARTANH_BOUND, ARTANH_BOUND)
        return numpy.arctanh(self.x)

    def backward(self, grad):
        return (grad / (1.0 - self.x * self.x),)


@register('exp')
class Exp(Function):
    def forward(self, a):
        self.out = numpy.exp(a)
        return self.out

    def backward(self, grad):
        return (grad * self.out,)


@register('log')
class Log(Function):
    def forward(self, a):
        if numpy.any(a < 0.0):
            raise DomainError('log of a negative value', value = float(a[a < 0.0].flat[0]))
        self.x = numpy.maximum(a, LOG_FLOOR)
        return numpy.log(self.x)

    def backward(self, grad):
        return (grad / self.x,)


@register('sigmoid')
class Sigmoid(Function):
    def forward(self, a):
        # split by sign so exp never overflows
        e = numpy.exp(-numpy.abs(a))
        self.out = numpy.where(a >= 0.0, 1.0 / (1.0 + e), e / (1.0 + e))
        return self.out

    def backward(self, grad):
        return (grad * self.out * (1.0 - self.out),)


@register('relu')
class Relu(Function):
    def forward(self, a):
        self.positive = a > 0.0
        return numpy.where(self.positive, a, 0.0)

    def backward(self, grad):
        return (grad * self.positive,)


@register('sqrt')
class Sqrt(Function):
    def forward(self, a):
        if numpy.any(a < -1e-12):
            raise DomainError('sqrt of a negative value', value = float(a[a < -1e-12].flat[0]))
        self.out = numpy.sqrt(numpy.maximum(a, 0.0))
        return self.out

    def backward(self, grad):
        safe = numpy.where(self.out > 0.0, self.out, 1.0)
        return (numpy.where(self.out > 0.0, 0.5 * grad / safe, 0.0),)


@register('clampmin')
class ClampMin(Function):
    def forward(self, a, bound = 0.0):
        self.keep = a >= bound
        return numpy.where(self.keep, a, bound)

    def backward(self, grad):
        return (grad * self.keep,)


@register('clampmax')
class ClampMax(Function):
    def forward(self, a, bound = 0.0):
        self.keep = a <= bound
        return numpy.where(self.keep, a, bound)

    def backward(self, grad):
        return (grad * self.keep,)


_BINARY = {'add': Add, 'sub': Sub, 'mul': Mul, 'div': Div}
_UNARY = {'tanh': Tanh, 'artanh': Artanh, 'exp': Exp, 'log': Log, 'sigmoid': Sigmoid,
          'relu': Relu, 'sqrt': Sqrt}


def elementwise(a, op, other = None):
    """Apply the elementwise operation ``op`` to ``a``.

    Binary operations (add, sub, mul, div) take the second operand in
    ``other``; clampmin and clampmax take their scalar bound in ``other``.
    """
    if op in _BINARY:
        if other is None:
            raise ValueError(op + ' needs a second operand')
        return _BINARY[op].apply(a, other)
    if op in _UNARY:
        return _UNARY[op].apply(a)
    if op == 'clampmin':
        return ClampMin.apply(a, bound = float(other))
    if op == 'clampmax':
        return ClampMax.apply(a, bound = float(other))
    raise ValueError('unknown elementwise operation: ' + str(op))


def tanh(a):
    return Tanh.apply(a)


def artanh(a):
    return Artanh.apply(a)


def exp(a):
    return Exp.apply(a)


def log(a):
    return Log.apply(a)


def sigmoid(a):
    return Sigmoid.apply(a)


def relu(a):
    return Relu.apply(a)


def sqrt(a):
    return Sqrt.apply(a)


def clamp_min(a, bound):
    return ClampMin.apply(a, bound = float(bound))


def clamp_max(a, bound):
    return ClampMax.apply(a, bound = float(bound))


def clamp(a, low, high):
    return ClampMax.apply(ClampMin.apply(a, bound = float(low)), bound = float(high))


# internal methods for linear algebra
@register('matmul')
class MatMul(Function):
    def forward(self, a, b):
        if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
            raise ShapeError('matmul inner dimensions disagree', a.shape, b.shape)
        self.a, self.b = a, b
        return numpy.matmul(a, b)

    def backward(self, grad):
        return (numpy.matmul(grad, numpy.swapaxes(self.b, -1, -2)),
                numpy.matmul(numpy.swapaxes(self.a, -1, -2), grad))


def matmul(a, b):
    return MatMul.apply(a, b)


@register('einsum')
class Einsum(Function):
    """Explicit-output einsum, e.g. ``'nctv,kvw->nctw'``.  An index may appear
    at most once per operand."""
    def forward(self, *arrays, subscripts = None):
        if '->' not in subscripts:
            raise ValueError('einsum needs an explicit output: ' + subscripts)
        lhs, self.out_subs = subscripts.replace(' ', '').split('->')
        self.in_subs = lhs.split(',')
        if len(self.in_subs) != len(arrays):
            raise ShapeError('einsum operand count does not match ' + subscripts,
                             *[a.shape for a in arrays])
        for subs, array in zip(self.in_subs, arrays):
            if len(set(subs)) != len(subs) or len(subs) != array.ndim:
                raise ShapeError('einsum subscripts ' + subs + ' do not fit operand', array.shape)
        self.arrays = arrays
        return numpy.einsum(subscripts, *arrays, optimize = True)

    def backward(self, grad):
        grads = []
        for i, subs in enumerate(self.in_subs):
            others = [self.in_subs[j] for j in range(len(self.arrays)) if j != i]
            operands = [grad] + [self.arrays[j] for j in range(len(self.arrays)) if j != i]
            available = set(self.out_subs).union(*[set(o) for o in others])
            kept = ''.join(s for s in subs if s in available)
            g = numpy.einsum(','.join([self.out_subs] + others) + '->' + kept, *operands, optimize = True)
            if kept != subs:
                # index summed only inside this operand: broadcast back
                for axis, s in enumerate(subs):
                    if s not in available:
                        g = numpy.expand_dims(g, axis)
                g = numpy.broadcast_to(g, self.arrays[i].shape).copy()
            grads.append(g)
        return tuple(grads)


def einsum(subscripts, *operands):
    return Einsum.apply(*operands, subscripts = subscripts)


# internal methods for reductions
def _check_axis(a, axis):
    if a.size == 0:
        raise EmptyInputError('reduction over an empty tensor')
    if axis is None:
        return None
    axes = axis if isinstance(axis, tuple) else (axis,)
    for ax in axes:
        if not -a.ndim <= ax < a.ndim:
            raise ShapeError('reduction axis ' + str(ax) + ' out of range', a.shape)
        if a.shape[ax] == 0:
            raise EmptyInputError('reduction over an empty axis ' + str(ax))
    return axis


@register('sum')
class Sum(Function):
    def forward(self, a, axis = None, keepdims = False):
        self.shape, self.axis, self.keepdims = a.shape, _check_axis(a, axis), keepdims
        return numpy.sum(a, axis = axis, keepdims = keepdims)

    def backward(self, grad):
        if self.axis is not None and not self.keepdims:
            grad = numpy.expand_dims(grad, self.axis)
        return (numpy.broadcast_to(grad, self.shape),)


@register('mean')
class Mean(Function):
    def forward(self, a, axis = None, keepdims = False):
        self.shape, self.axis, self.keepdims = a.shape, _check_axis(a, axis), keepdims
        out = numpy.mean(a, axis = axis, keepdims = keepdims)
        self.count = a.size // max(numpy.size(out), 1)
        return out

    def backward(self, grad):
        if self.axis is not None and not self.keepdims:
            grad = numpy.expand_dims(grad, self.axis)
        return (numpy.broadcast_to(grad, self.shape) / self.count,)


@register('max')
class Max(Function):
    def forward(self, a, axis = None, keepdims = False):
        self.axis, self.keepdims = _check_axis(a, axis), keepdims
        out = numpy.max(a, axis = axis, keepdims = True)
        hits = (a == out)
        # ties share the gradient
        self.route = hits / numpy.sum(hits, axis = axis, keepdims = True)
        return out if keepdims else numpy.squeeze(out, axis = axis) if axis is not None else out.reshape(())

    def backward(self, grad):
        if self.axis is not None and not self.keepdims:
            grad = numpy.expand_dims(grad, self.axis)
        return (grad * self.route,)


_REDUCE = {'sum': Sum, 'mean': Mean, 'max': Max}


def reduce(a, op, axis = None, keepdims = False):
    if op not in _REDUCE:
        raise ValueError('unknown reduction: ' + str(op))
    return _REDUCE[op].apply(a, axis = axis, keepdims = keepdims)


# internal methods for softmax
def _mask_array(mask, shape):
    if mask is None:
        return None
    mask = mask.data if isinstance(mask, Tensor) else mask
    mask = numpy.asarray(mask).astype(bool)
    try:
        return numpy.broadcast_to(mask, shape)
    except ValueError:
        raise ShapeError('mask does not broadcast against its input', mask.shape, shape)


def _check_rows(mask, axis):
    if mask is None:
        return
    empty = ~numpy.any(mask, axis = axis)
    if numpy.any(empty):
        row = tuple(int(i) for i in numpy.argwhere(empty)[0])
        raise EmptyInputError('softmax row ' + str(row) + ' is fully masked')


@register('softmax')
class Softmax(Function):
    def forward(self, a, axis = -1, mask = None):
        mask = _mask_array(mask, a.shape)
        _check_rows(mask, axis)
        self.axis = axis
        shifted = a if mask is None else numpy.where(mask, a, -numpy.inf)
        shifted = shifted - numpy.max(shifted, axis = axis, keepdims = True)
        e = numpy.exp(shifted)
        self.out = e / numpy.sum(e, axis = axis, keepdims = True)
        return self.out

    def backward(self, grad):
        s = self.out
        return (s * (grad - numpy.sum(grad * s, axis = self.axis, keepdims = True)),)


@register('log_softmax')
class LogSoftmax(Function):
    def forward(self, a, axis = -1, mask = None):
        mask = _mask_array(mask, a.shape)
        _check_rows(mask, axis)
        self.axis, self.mask = axis, mask
        shifted = a if mask is None else numpy.where(mask, a, -numpy.inf)
        shifted = shifted - numpy.max(shifted, axis = axis, keepdims = True)
        lse = numpy.log(numpy.sum(numpy.exp(shifted), axis = axis, keepdims = True))
        out = shifted - lse
        self.soft = numpy.exp(out)
        if mask is not None:
            out = numpy.where(mask, out, 0.0)
        return out

    def backward(self, grad):
        if self.mask is not None:
            grad = numpy.where(self.mask, grad, 0.0)
        return (grad - self.soft * numpy.sum(grad, axis = self.axis, keepdims = True),)


def softmax(a, axis = -1, mask = None):
    """Softmax along ``axis``; entries where ``mask`` is False get exactly 0.
    Raises :class:`EmptyInputError` when a row has no unmasked entry."""
    return Softmax.apply(a, axis = axis, mask = mask)


def log_softmax(a, axis = -1, mask = None):
    return LogSoftmax.apply(a, axis = axis, mask = mask)


# internal methods for shape manipulation
@register('reshape')
class Reshape(Function):
    def forward(self, a, shape = None):
        self.shape = a.shape
        return a.reshape(shape)

    def backward(self, grad):
        return (grad.reshape(self.shape),)


@register('transpose')
class Transpose(Function):
    def forward(self, a, axes = None):
        self.axes = axes
        return numpy.transpose(a, axes)

    def backward(self, grad):
        if self.axes is None:
            return (numpy.transpose(grad),)
        return (numpy.transpose(grad, numpy.argsort(self.axes)),)


@register('getitem')
class GetItem(Function):
    def forward(self, a, index = None):
        self.shape, self.index = a.shape, index
        return a[index]

    def backward(self, grad):
        out = numpy.zeros(self.shape)
        if _basic_index(self.index):
            out[self.index] = grad
        else:
            numpy.add.at(out, self.index, grad)
        return (out,)


def _basic_index(index):
    parts = index if isinstance(index, tuple) else (index,)
    return all(p is None or p is Ellipsis or isinstance(p, (int, numpy.integer, slice)) for p in parts)


@register('concat')
class Concat(Function):
    def forward(self, *arrays, axis = 0):
        self.axis = axis
        self.splits = numpy.cumsum([a.shape[axis] for a in arrays])[:-1]
        return numpy.concatenate(arrays, axis = axis)

    def backward(self, grad):
        return tuple(numpy.split(grad, self.splits, axis = self.axis))


@register('stack')
class Stack(Function):
    def forward(self, *arrays, axis = 0):
        self.axis = axis
        return numpy.stack(arrays, axis = axis)

    def backward(self, grad):
        return tuple(numpy.moveaxis(grad, self.axis, 0))


@register('pad')
class Pad(Function):
    def forward(self, a, pad_width = None):
        self.slices = tuple(slice(before, before + size) for (before, _), size in zip(pad_width, a.shape))
        return numpy.pad(a, pad_width)

    def backward(self, grad):
        return (grad[self.slices],)


@register('where')
class Where(Function):
    def forward(self, a, b, condition = None):
        self.condition = numpy.asarray(condition, dtype = bool)
        return numpy.where(self.condition, a, b)

    def backward(self, grad):
        return grad * self.condition, grad * ~self.condition


def concat(tensors, axis = 0):
    return Concat.apply(*tensors, axis = axis)


def stack(tensors, axis = 0):
    return Stack.apply(*tensors, axis = axis)


def pad(a, pad_width):
    return Pad.apply(a, pad_width = tuple(tuple(p) for p in pad_width))


def where(condition, a, b):
    condition = condition.data if isinstance(condition, Tensor) else condition
    return Where.apply(a, b, condition = numpy.asarray(condition, dtype = bool))


def norm(a, axis = -1, keepdims = True, floor = 1e-15):
    """Euclidean norm along ``axis``, floored so its gradient exists at 0."""
    return sqrt(clamp_min((a * a).sum(axis = axis, keepdims = keepdims), floor * floor))


def backward(loss):
    """Populate ``grad`` on every watched leaf reachable from ``loss``."""
    if not isinstance(loss, Tensor) or loss.data.size != 1:
        raise TapeError('backward needs a scalar loss')
    if loss._tape is None:
        raise TapeError('loss is not on an active tape')
    loss._tape.backward(loss)


def finite_difference_grad(f, x, h = 1e-6):
    """Central-difference estimate of the gradient of the scalar function
    ``f`` at ``x``, one coordinate at a time.

    :param f: callable taking a :class:`Tensor` and returning a scalar
    :param x: point of evaluation
    :param h: step size
    :return: :class:`Tensor` of the shape of ``x``
    """
    x0 = as_tensor(x).data
    grad = numpy.zeros_like(x0)
    flat = grad.reshape(-1)
    for i in range(x0.size):
        plus = x0.copy().reshape(-1)
        minus = x0.copy().reshape(-1)
        plus[i] += h
        minus[i] -= h
        f_plus = _scalar(f(Tensor(plus.reshape(x0.shape))))
        f_minus = _scalar(f(Tensor(minus.reshape(x0.shape))))
        flat[i] = (f_plus - f_minus) / (2.0 * h)
    return Tensor(grad)


def _scalar(value):
    if isinstance(value, Tensor):
        return value.item()
    return float(value)

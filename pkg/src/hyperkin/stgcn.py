#  Author(s):  hyperkin contributors
#  Created on: 2026-10
#
# Copyright (c) 2026 hyperkin contributors
# Released under MIT License

"""Spatio-temporal graph convolution over multi-part 2D skeletons.

Features are laid out (N, C, T, V): batch, channels, frames, joints.  The
body stream is encoded first; its features at the anchor joint of every other
part are added, detached, to that part before the fusion temporal layer.
"""

import dataclasses
import logging

import numpy

from hyperkin import tensor as T
from hyperkin.errors import ConfigError, EmptyInputError, ShapeError
from hyperkin.nn import BatchNorm, Linear, Module, parameter

logger = logging.getLogger(__name__)

PARTS = ('body', 'left_hand', 'right_hand', 'face')

# short names used in exported tables
PART_LABELS = {'body': 'body', 'left_hand': 'left', 'right_hand': 'right', 'face': 'face'}

# body joint added to each part stream: wrists for the hands, head for the face
BODY_ANCHORS = {'left_hand': 7, 'right_hand': 8, 'face': 1}

_ALIASES = {'left': 'left_hand', 'right': 'right_hand', 'hand': 'left_hand', 'face_all': 'face'}


def _body_layout():
    torso = [(0, i) for i in range(1, 5)]
    arms = [(3, 5), (5, 7), (4, 6), (6, 8)]
    return 9, torso + arms, 0


def _hand_layout():
    fingers = [[0, 1, 2, 3, 4], [0, 5, 6, 7, 8], [0, 9, 10, 11, 12],
               [0, 13, 14, 15, 16], [0, 17, 18, 19, 20]]
    return 21, [(f[i], f[i + 1]) for f in fingers for i in range(len(f) - 1)], 0


def _face_layout():
    return 16, [(i, (i + 1) % 16) for i in range(16)], 8


_LAYOUTS = {
    'body': _body_layout,
    'left_hand': _hand_layout,
    'right_hand': _hand_layout,
    'face': _face_layout,
}


@dataclasses.dataclass
class SkeletonGraph:
    """Skeleton topology of one part.

    hop : shortest path lengths capped at ``max_hop``, ``inf`` when farther
    A : (K, V, V) adjacency kernels, A[k, v, w] weighs joint v in the
        aggregate of joint w
    """
    layout: str
    num_nodes: int
    edges: list
    center: int
    hop: numpy.ndarray
    A: numpy.ndarray
    strategy: str = 'uniform'
    max_hop: int = 1


def canonical_layout(layout):
    layout = _ALIASES.get(layout, layout)
    if layout not in _LAYOUTS:
        raise ConfigError('unknown skeleton layout ' + repr(layout))
    return layout


def hop_distance(num_nodes, edges, max_hop = 1):
    """Shortest path length, up to ``max_hop``, for every pair of joints."""
    adj = numpy.zeros((num_nodes, num_nodes))
    for i, j in edges:
        adj[i, j] = adj[j, i] = 1.0
    hop = numpy.full_like(adj, numpy.inf)
    reach = [numpy.linalg.matrix_power(adj, d) > 0 for d in range(max_hop + 1)]
    for d in range(max_hop, -1, -1):
        hop[reach[d]] = d
    return hop


def build_graph(layout, strategy = 'uniform', max_hop = 1):
    layout = canonical_layout(layout)
    num_nodes, neighbours, center = _LAYOUTS[layout]()
    edges = [(i, i) for i in range(num_nodes)] + neighbours
    hop = hop_distance(num_nodes, edges, max_hop)
    reachable = numpy.isfinite(hop)
    if strategy == 'uniform':
        A = reachable.astype(numpy.float64)
    elif strategy == 'distance':
        A = numpy.where(reachable, 1.0 / (numpy.where(reachable, hop, 0.0) + 1.0), 0.0)
    else:
        raise ConfigError('unknown adjacency strategy ' + repr(strategy))
    A = A / (A.sum(axis = 1, keepdims = True) + 1e-6)
    return SkeletonGraph(layout, num_nodes, edges, center, hop, A[None], strategy, max_hop)


def spatial_gcn(x, A, weights):
    """y[n, o, t, w] = Σ_k Σ_c Σ_v x[n, c, t, v] · W[k, c, o] · A[k, v, w]."""
    x, A, weights = T.as_tensor(x), T.as_tensor(A), T.as_tensor(weights)
    if x.ndim != 4 or A.ndim != 3 or weights.ndim != 3:
        raise ShapeError('spatial_gcn expects x (N,C,T,V), A (K,V,V), W (K,C,O)',
                         x.shape, A.shape, weights.shape)
    if x.shape[3] != A.shape[1] or A.shape[1] != A.shape[2]:
        raise ShapeError('joint count does not match the graph', x.shape, A.shape)
    if weights.shape[0] != A.shape[0] or weights.shape[1] != x.shape[1]:
        raise ShapeError('graph weights do not match kernels or channels', weights.shape, A.shape)
    return T.einsum('nctv,kco,kvw->notw', x, weights, A)


def _mask_frames(x, frame_mask):
    if frame_mask is None:
        return x
    return x * numpy.asarray(frame_mask, dtype = numpy.float64)[:, None, :, None]


def _channel_bias(bias):
    return bias.reshape(1, bias.shape[0], 1, 1)


class GraphConv(Module):
    """K spatial kernels, batch norm and ReLU.  With ``adaptive`` the
    adjacency kernels are learned, starting from the graph's."""
    def __init__(self, c_in, c_out, graph, rng, adaptive = False, norm = True, init = 'xavier'):
        super().__init__()
        k = graph.A.shape[0]
        if init == 'zeros':
            weights = numpy.zeros((k, c_in, c_out))
        else:
            bound = numpy.sqrt(6.0 / (c_in + c_out))
            weights = rng.uniform(-bound, bound, size = (k, c_in, c_out))
        self.weights = parameter(weights)
        self.bias = parameter(numpy.zeros(c_out))
        self.A = parameter(graph.A) if adaptive else T.Tensor(graph.A)
        self.bn = BatchNorm(c_out) if norm else None

    def __call__(self, x, frame_mask = None):
        y = spatial_gcn(x, self.A, self.weights) + _channel_bias(self.bias)
        if self.bn is not None:
            y = self.bn(y, frame_mask)
        return T.relu(y)


class TemporalConv(Module):
    """Convolution along frames with kernel ``t_kernel`` and same padding;
    output length is ⌈T / stride⌉."""
    def __init__(self, c_in, c_out, rng, t_kernel = 3, stride = 1, norm = True, init = 'xavier'):
        super().__init__()
        if t_kernel % 2 != 1:
            raise ConfigError('temporal kernel size must be odd')
        if init == 'zeros':
            weights = numpy.zeros((t_kernel, c_in, c_out))
        else:
            bound = numpy.sqrt(6.0 / (t_kernel * (c_in + c_out)))
            weights = rng.uniform(-bound, bound, size = (t_kernel, c_in, c_out))
        self.weights = parameter(weights)
        self.bias = parameter(numpy.zeros(c_out))
        self.t_kernel = t_kernel
        self.stride = stride
        self.bn = BatchNorm(c_out) if norm else None

    def __call__(self, x, frame_mask = None):
        x = _mask_frames(x, frame_mask)
        frames = x.shape[2]
        out_frames = (frames - 1) // self.stride + 1
        pad = (self.t_kernel - 1) // 2
        padded = T.pad(x, ((0, 0), (0, 0), (pad, pad), (0, 0)))
        y = None
        for j in range(self.t_kernel):
            window = padded[:, :, j:j + self.stride * (out_frames - 1) + 1:self.stride, :]
            term = T.einsum('nctv,co->notv', window, self.weights[j])
            y = term if y is None else y + term
        y = y + _channel_bias(self.bias)
        if self.bn is not None:
            y = self.bn(y, downsample_mask(frame_mask, self.stride))
        return y


def downsample_mask(frame_mask, stride):
    if frame_mask is None or stride == 1:
        return frame_mask
    return numpy.asarray(frame_mask)[:, ::stride]


class StgcnBlock(Module):
    def __init__(self, c_in, c_out, graph, rng, t_kernel = 3, stride = 1, residual = True,
                 adaptive = False, norm = True, init = 'xavier'):
        super().__init__()
        self.gcn = GraphConv(c_in, c_out, graph, rng, adaptive = adaptive, norm = norm, init = init)
        self.tcn = TemporalConv(c_out, c_out, rng, t_kernel = t_kernel, stride = stride, norm = norm, init = init)
        self.stride = stride
        if not residual:
            self.res = None
        elif c_in == c_out and stride == 1:
            self.res = 'identity'
        else:
            self.res = Linear(c_in, c_out, rng, init = init)

    def residual(self, x):
        if self.res is None:
            return 0.0
        if self.res == 'identity':
            return x
        x = x[:, :, ::self.stride, :]
        return self.res(x.transpose(0, 2, 3, 1)).transpose(0, 3, 1, 2)

    def __call__(self, x, frame_mask = None):
        y = self.tcn(self.gcn(x, frame_mask), frame_mask)
        return T.relu(y + self.residual(x))


class PartEncoder(Module):
    """Input projection of (x, y) keypoints, a stack of ST-GCN blocks and the
    fusion temporal layer applied after the body context is added."""
    def __init__(self, layout, d_gcn, rng, blocks = 2, strategy = 'uniform', max_hop = 1,
                 adaptive = False, norm = True, init = 'xavier'):
        super().__init__()
        self.layout = canonical_layout(layout)
        self.graph = build_graph(self.layout, strategy, max_hop)
        self.input_proj = Linear(2, d_gcn, rng, init = init)
        self.blocks = [StgcnBlock(d_gcn, d_gcn, self.graph, rng, adaptive = adaptive, norm = norm, init = init)
                       for _ in range(blocks)]
        self.fusion = TemporalConv(d_gcn, d_gcn, rng, norm = norm, init = init)
        self.d_gcn = d_gcn

    def spatial(self, keypoints, frame_mask = None):
        """Per-joint features (N, C, T, V) before the fusion layer."""
        keypoints = T.as_tensor(keypoints)
        if keypoints.ndim != 4 or keypoints.shape[-1] != 2:
            raise ShapeError('keypoints must be (N, T, V, 2)', keypoints.shape)
        if keypoints.shape[2] != self.graph.num_nodes:
            raise ShapeError(self.layout + ' keypoints have the wrong joint count', keypoints.shape)
        x = self.input_proj(keypoints).transpose(0, 3, 1, 2)
        x = _mask_frames(x, frame_mask)
        for block in self.blocks:
            x = block(x, frame_mask)
        return x

    def fuse(self, x, frame_mask = None):
        """Fusion layer, then mean over joints: (N, C, T, V) -> (N, T, C)."""
        y = T.relu(self.fusion(x, frame_mask))
        return y.mean(axis = 3).transpose(0, 2, 1)


def pool_frames(z, frame_mask = None):
    """Mean over the valid frames of (N, T, C) features."""
    if frame_mask is None:
        return z.mean(axis = 1)
    mask = numpy.asarray(frame_mask, dtype = numpy.float64)
    counts = mask.sum(axis = 1, keepdims = True)
    if numpy.any(counts == 0.0):
        raise EmptyInputError('a sequence has no valid frame')
    return (z * mask[:, :, None]).sum(axis = 1) / counts


def encode_parts(keypoints, encoders, frame_mask = None):
    """Encode every part; returns ({part: Z (N, T, d_gcn)}, {part: f̄ (N, d_gcn)}).

    The body stream is encoded first and its features at the anchor joints
    are added to the other parts as constants.
    """
    if 'body' not in keypoints:
        raise ShapeError('the body stream is required')
    for part, kp in keypoints.items():
        if numpy.shape(T.as_tensor(kp).data)[1] == 0:
            raise EmptyInputError(part + ' sequence has no frames')
    body_x = encoders['body'].spatial(keypoints['body'], frame_mask)
    body_ctx = body_x.detach()
    features = {'body': encoders['body'].fuse(body_x, frame_mask)}
    for part in PARTS[1:]:
        if part not in keypoints:
            continue
        x = encoders[part].spatial(keypoints[part], frame_mask)
        joint = body_ctx[:, :, :, BODY_ANCHORS[part]:BODY_ANCHORS[part] + 1]
        features[part] = encoders[part].fuse(x + joint, frame_mask)
    pooled = {part: pool_frames(z, frame_mask) for part, z in features.items()}
    return features, pooled


class PartFusion(Module):
    """Concatenation of the part features followed by a linear map to the
    decoder width."""
    def __init__(self, d_gcn, d_model, rng, parts = len(PARTS), init = 'xavier'):
        super().__init__()
        self.linear = Linear(parts * d_gcn, d_model, rng, init = init)

    def __call__(self, features):
        return fuse_for_decoder(features, self)


def fuse_for_decoder(features, fusion):
    if isinstance(features, dict):
        features = [features[p] for p in PARTS if p in features]
    features = [T.as_tensor(z) for z in features]
    frames = {z.shape[1] for z in features}
    if len(frames) != 1:
        raise ShapeError('part features disagree on the frame count', *[z.shape for z in features])
    return fusion.linear(T.concat(features, axis = -1))

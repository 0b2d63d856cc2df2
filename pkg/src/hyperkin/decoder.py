#  Author(s):  hyperkin contributors
#  Created on: 2026-10
#
# Copyright (c) 2026 hyperkin contributors
# Released under MIT License

import logging
import math

import numpy

from hyperkin import tensor as T
from hyperkin.errors import EmptyInputError, ShapeError
from hyperkin.nn import Embedding, Linear, Module, parameter

logger = logging.getLogger(__name__)


def prefix_mixing(mask):
    """(B, L, L) causal averaging weights over the valid positions of
    ``mask`` (B, L); row i averages the valid positions j ≤ i."""
    mask = numpy.asarray(mask, dtype = numpy.float64)
    length = mask.shape[1]
    causal = numpy.tril(numpy.ones((length, length)))
    weights = causal[None] * mask[:, None, :]
    counts = weights.sum(axis = -1, keepdims = True)
    return weights / numpy.where(counts > 0.0, counts, 1.0)


class ToyDecoder(Module):
    """One-layer sequence decoder: token and position embeddings, a causal
    running mean, cross-attention over the fused pose sequence and a token
    classifier.

    The final-layer token states without pose context (:meth:`text_states`)
    are the Euclidean text embeddings used by the alignment strategies.
    """
    def __init__(self, vocab_size, d_model, max_len, rng):
        super().__init__()
        self.embed = Embedding(vocab_size, d_model, rng)
        self.position = parameter(rng.normal(0.0, 0.02, size = (max_len, d_model)))
        self.query = Linear(d_model, d_model, rng)
        self.key = Linear(d_model, d_model, rng)
        self.value = Linear(d_model, d_model, rng)
        self.hidden = Linear(d_model, d_model, rng)
        self.out = Linear(d_model, vocab_size, rng)
        self.d_model = d_model
        self.max_len = max_len

    def _prefix(self, tokens, mask):
        tokens = numpy.asarray(tokens)
        if tokens.ndim != 2:
            raise ShapeError('token ids must be (B, L)', tokens.shape)
        if tokens.shape[1] > self.max_len:
            raise ShapeError('sentence longer than the decoder supports', tokens.shape)
        x = self.embed(tokens) + self.position[:tokens.shape[1]]
        return T.einsum('bij,bjd->bid', prefix_mixing(mask), x)

    def _layer(self, x):
        return T.relu(self.hidden(x)) + x

    def text_states(self, tokens, mask):
        return self._layer(self._prefix(tokens, mask))

    def cross_attend(self, x, memory, frame_mask):
        q, k, v = self.query(x), self.key(memory), self.value(memory)
        scores = T.einsum('bld,btd->blt', q, k) / math.sqrt(self.d_model)
        attn = T.softmax(scores, axis = -1, mask = numpy.asarray(frame_mask, dtype = bool)[:, None, :])
        return T.einsum('blt,btd->bld', attn, v)

    def states(self, tokens, mask, memory, frame_mask):
        x = self._prefix(tokens, mask)
        return self._layer(x + self.cross_attend(x, memory, frame_mask))

    def logits(self, tokens, mask, memory, frame_mask):
        return self.out(self.states(tokens, mask, memory, frame_mask))

    def distribution(self, tokens, mask, memory, frame_mask):
        return T.softmax(self.logits(tokens, mask, memory, frame_mask), axis = -1)


def _shifted(tokens, token_mask):
    tokens = numpy.asarray(tokens)
    token_mask = numpy.asarray(token_mask, dtype = bool)
    if tokens.shape[1] < 2:
        raise ShapeError('teacher forcing needs sentences of two tokens or more', tokens.shape)
    return tokens[:, :-1], token_mask[:, :-1], tokens[:, 1:], token_mask[:, 1:]


def teacher_forced_loss(decoder, tokens, token_mask, memory, frame_mask, smoothing = 0.2):
    """Next-token cross-entropy with label smoothing, averaged over the valid
    target positions."""
    inputs, in_mask, targets, target_mask = _shifted(tokens, token_mask)
    if not numpy.any(target_mask):
        raise EmptyInputError('no target token to predict')
    log_p = T.log_softmax(decoder.logits(inputs, in_mask, memory, frame_mask), axis = -1)
    vocab = log_p.shape[-1]
    target = (1.0 - smoothing) * numpy.eye(vocab)[targets] + smoothing / vocab
    per_token = -(log_p * target).sum(axis = -1)
    weights = target_mask.astype(numpy.float64)
    return (per_token * weights).sum() / weights.sum()


def token_accuracy(decoder, tokens, token_mask, memory, frame_mask):
    """Fraction of valid target positions whose argmax prediction is right."""
    inputs, in_mask, targets, target_mask = _shifted(tokens, token_mask)
    predicted = numpy.argmax(decoder.distribution(inputs, in_mask, memory, frame_mask).data, axis = -1)
    return float(numpy.sum((predicted == targets) & target_mask) / numpy.sum(target_mask))

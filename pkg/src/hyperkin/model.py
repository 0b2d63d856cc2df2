#  Author(s):  hyperkin contributors
#  Created on: 2026-10
#
# Copyright (c) 2026 hyperkin contributors
# Released under MIT License

"""Pose-to-text model: part encoders, fusion, toy decoder and the hyperbolic
regulariser selected by the training strategy."""

import dataclasses
import logging

import numpy

from hyperkin import tensor as T
from hyperkin.decoder import ToyDecoder, teacher_forced_loss, token_accuracy
from hyperkin.frechet import FrechetConfig
from hyperkin.layers import (AlphaSchedule, ContrastiveHead, HyperbolicAttention, HyperbolicProjection,
                             alpha, contrastive_loss, pooled_align, pooled_pose, token_align, total_loss)
from hyperkin.manifold import ManifoldPoint, PoincareBall
from hyperkin.nn import Module
from hyperkin.optim import ParamGroup
from hyperkin.stgcn import PARTS, PartEncoder, PartFusion, encode_parts

logger = logging.getLogger(__name__)


@dataclasses.dataclass
class StepOutput:
    total: T.Tensor
    ce: T.Tensor
    hyp: T.Tensor
    alpha: float


class PoseTextModel(Module):
    def __init__(self, cfg, vocab_size, max_len, rng):
        super().__init__()
        self.strategy = cfg.strategy
        self.alignment = cfg.alignment
        if cfg.euclidean:
            self.ball = PoincareBall(init_c = cfg.euclidean_c, learnable = False)
        else:
            self.ball = PoincareBall(init_c = cfg.init_c, learnable = cfg.learnable_c)
        self.encoders = {part: PartEncoder(part, cfg.d_gcn, rng, blocks = cfg.gcn_blocks,
                                           strategy = cfg.graph_strategy, adaptive = cfg.adaptive_graph)
                         for part in PARTS}
        self.fusion = PartFusion(cfg.d_gcn, cfg.d_model, rng)
        self.decoder = ToyDecoder(vocab_size, cfg.d_model, max_len, rng)
        self.part_proj = {part: HyperbolicProjection(cfg.d_gcn, cfg.d_hyp, self.ball, rng) for part in PARTS}
        self.text_proj = HyperbolicProjection(cfg.d_model, cfg.d_hyp, self.ball, rng)
        self.attn = HyperbolicAttention(cfg.d_hyp, self.ball)
        self.head = ContrastiveHead(cfg.tau_init, cfg.margin_init, cfg.contrastive_smoothing)
        self.alpha_schedule = AlphaSchedule(cfg.alpha_init, 1, variant = cfg.alpha_variant)
        self.frechet = FrechetConfig(max_iter = cfg.frechet_max_iter, tol = cfg.frechet_tol,
                                     tangent_approx = cfg.tangent_approx)
        self.label_smoothing = cfg.label_smoothing

    # internal methods for parameter groups
    def _riemannian(self):
        params = [self.attn.b_key]
        if self.ball.learnable:
            params.append(self.ball.log_c)
        return params

    def param_groups(self, cfg):
        riemannian = {id(p) for p in self._riemannian()}
        euclidean = [p for p in self.parameters() if id(p) not in riemannian]
        return [ParamGroup('euclidean', euclidean, cfg.lr, weight_decay = cfg.weight_decay,
                           grad_clip_norm = cfg.grad_clip_norm),
                ParamGroup('riemannian', self._riemannian(), cfg.hyp_lr, grad_clip_norm = cfg.grad_clip_norm)]

    def encode(self, batch):
        """Per-part features, pooled summaries and the fused decoder memory."""
        features, pooled = encode_parts(batch.keypoints, self.encoders, batch.frame_mask)
        return features, pooled, self.fusion(features)

    def part_points(self, pooled):
        """Hyperbolic part embeddings h_p stacked as (B, P, d_hyp)."""
        return T.stack([self.part_proj[part](pooled[part]).coords for part in PARTS], axis = -2)

    def regulariser(self, h, batch):
        if self.alignment == 'none':
            return T.Tensor(0.0)
        states = self.decoder.text_states(batch.tokens, batch.token_mask)
        if self.alignment == 'pooled':
            pose, text = pooled_align(h, states, batch.token_mask, self.text_proj, self.frechet, self.ball)
            return contrastive_loss(pose, text, self.head, self.ball)
        aligned = token_align(h, states, batch.token_mask, self.text_proj, self.attn, self.frechet, self.ball)
        return contrastive_loss(aligned.parts, aligned.contexts, self.head, self.ball)

    def losses(self, batch, step):
        _, pooled, memory = self.encode(batch)
        ce = teacher_forced_loss(self.decoder, batch.tokens, batch.token_mask, memory, batch.frame_mask,
                                 self.label_smoothing)
        a = alpha(step, self.alpha_schedule)
        if self.alignment == 'none':
            return StepOutput(ce, ce, T.Tensor(0.0), a.item())
        hyp = self.regulariser(self.part_points(pooled), batch)
        return StepOutput(total_loss(ce, hyp, a), ce, hyp, a.item())

    # internal methods for evaluation
    def candidate_texts(self, sentence_tokens, sentence_mask):
        """Projected candidate sentences: pooled text points (L, d) and token
        values (L, n, d)."""
        states = self.decoder.text_states(sentence_tokens, sentence_mask)
        mask = numpy.asarray(sentence_mask, dtype = numpy.float64)
        pooled = (states * mask[..., None]).sum(axis = -2) / mask.sum(axis = -1, keepdims = True)
        return self.text_proj(pooled), states

    def retrieval_distances(self, h, sentence_tokens, sentence_mask):
        """(B, L) pose-to-sentence distances used for retrieval."""
        text, states = self.candidate_texts(sentence_tokens, sentence_mask)
        if self.alignment == 'token':
            hb = h.reshape(h.shape[0], 1, h.shape[1], h.shape[2])
            tokens = states.reshape((1,) + states.shape)
            aligned = token_align(hb, tokens, numpy.asarray(sentence_mask, dtype = bool)[None],
                                  self.text_proj, self.attn, self.frechet, self.ball)
            return self.ball.dist(aligned.parts.coords, aligned.contexts.coords).mean(axis = -1)
        p = pooled_pose(h, self.frechet, self.ball).coords
        return self.ball.dist(p.reshape(p.shape[0], 1, p.shape[1]), text.coords.reshape((1,) + text.shape))

    def evaluate(self, batch, sentence_tokens, sentence_mask):
        """Retrieval ranks, token accuracy and per-part radii on ``batch``."""
        _, pooled, memory = self.encode(batch)
        h = self.part_points(pooled)
        distances = self.retrieval_distances(h, sentence_tokens, sentence_mask).data
        order = numpy.argsort(distances, axis = -1, kind = 'stable')
        rank = numpy.argmax(order == batch.labels[:, None], axis = -1)
        radii = self.ball.dist0(h).data
        return {
            'top1': float(numpy.mean(rank < 1)),
            'top5': float(numpy.mean(rank < 5)),
            'token_accuracy': token_accuracy(self.decoder, batch.tokens, batch.token_mask, memory,
                                             batch.frame_mask),
            'radii': {part: float(numpy.mean(radii[:, i])) for i, part in enumerate(PARTS)},
            'ranks': rank,
        }

    def embeddings(self, batch):
        _, pooled, _ = self.encode(batch)
        return ManifoldPoint(self.part_points(pooled), self.ball)


def build_model(cfg, dataset, rng):
    max_len = dataset.tokens.shape[1]
    return PoseTextModel(cfg, len(dataset.vocab), max_len, rng)

#  Author(s):  hyperkin contributors
#  Created on: 2026-10
#
# Copyright (c) 2026 hyperkin contributors
# Released under MIT License

"""Training loop, evaluation and the metrics file.

Metrics files are JSON lines: a header
``{"format": "hyperkin-metrics", "version": 1, "config": {...}}`` followed by
one record per epoch.  They hold no timestamps, so identical configurations
give byte-identical files.
"""

import dataclasses
import json
import logging
import math
import os

import numpy

from hyperkin import tensor as T
from hyperkin.checkpoint import checkpoint_config, read_checkpoint, save_checkpoint
from hyperkin.config import dump_config
from hyperkin.data import load_dataset
from hyperkin.errors import NumericalError, TrainingError
from hyperkin.model import build_model
from hyperkin.optim import Optimizer, cosine_lr
from hyperkin.stgcn import PARTS

logger = logging.getLogger(__name__)

METRICS_FORMAT = 'hyperkin-metrics'
METRICS_VERSION = 1


@dataclasses.dataclass
class TrainResult:
    model: object
    metrics: list
    metrics_path: str
    checkpoint_path: str

    @property
    def final(self):
        return self.metrics[-1]

    @property
    def c_trajectory(self):
        return [m['c'] for m in self.metrics]


def chunks(indices, size):
    return [indices[i:i + size] for i in range(0, len(indices), size)]


def evaluate(model, dataset, batch_size = 32, split = 'eval', noise = 0.0, rng = None):
    """Retrieval top-1/top-5, token accuracy and mean part radii over a split.
    With ``noise`` > 0, Gaussian noise drawn from ``rng`` is added to the
    keypoints first."""
    was_training = model.training
    model.eval()
    sentence_tokens, sentence_mask = dataset.sentence_batch()
    indices = dataset.indices(split)
    totals = {'top1': 0.0, 'top5': 0.0, 'token_accuracy': 0.0}
    radii = {part: 0.0 for part in PARTS}
    ranks = []
    for chunk in chunks(indices, batch_size):
        batch = dataset.batch(chunk)
        if noise > 0.0:
            batch = batch.with_noise(noise, rng)
        result = model.evaluate(batch, sentence_tokens, sentence_mask)
        for key in totals:
            totals[key] += result[key] * len(chunk)
        for part in PARTS:
            radii[part] += result['radii'][part] * len(chunk)
        ranks.append(result['ranks'])
    model.train(was_training)
    count = float(len(indices))
    metrics = {key: value / count for key, value in totals.items()}
    metrics['radii'] = {part: value / count for part, value in radii.items()}
    metrics['ranks'] = numpy.concatenate(ranks) if ranks else numpy.zeros(0, dtype = numpy.int64)
    return metrics


def _dump_batch(out_dir, batch, step, reason):
    path = os.path.join(out_dir, 'nan_dump_step' + str(step) + '.npz')
    arrays = {'kp_' + part: kp for part, kp in batch.keypoints.items()}
    with open(path, 'wb') as f:
        numpy.savez(f, frame_mask = batch.frame_mask, tokens = batch.tokens, token_mask = batch.token_mask,
                    labels = batch.labels, ids = batch.ids, reason = numpy.array(reason), **arrays)
    return path


def train_step(model, optimizer, batch, step, out_dir):
    """One optimisation step; returns the step losses.  Non-finite values
    abort training with a dump of the offending batch."""
    optimizer.zero_grad()
    try:
        with T.GradTape() as tape:
            tape.watch(*model.parameters())
            out = model.losses(batch, step)
            if not all(math.isfinite(v) for v in (out.total.item(), out.ce.item(), out.hyp.item())):
                raise NumericalError('non-finite loss')
            tape.backward(out.total)
    except NumericalError as e:
        dump = _dump_batch(out_dir, batch, step, str(e))
        raise TrainingError('training diverged at step ' + str(step) + ': ' + str(e), dump)
    optimizer.clip()
    optimizer.step()
    return out


def _write_line(f, record):
    f.write(json.dumps(record, sort_keys = True) + '\n')
    f.flush()


def train(cfg, dataset = None, out_dir = None, prefix = ''):
    """Train the model selected by ``cfg`` and write ``<prefix>metrics.jsonl``
    and ``<prefix>model.npz`` to ``out_dir`` (default ``cfg.out``)."""
    cfg.validate()
    out_dir = out_dir or cfg.out
    os.makedirs(out_dir, exist_ok = True)
    if dataset is None:
        dataset = load_dataset(cfg.dataset)
    rng = numpy.random.default_rng(cfg.seed)
    model = build_model(cfg, dataset, rng)
    optimizer = Optimizer(model.param_groups(cfg))

    train_indices = dataset.indices('train')
    per_epoch = len(chunks(train_indices, cfg.batch_size))
    total_steps = cfg.epochs * per_epoch
    warmup = min(cfg.warmup_epochs * per_epoch, max(total_steps - 1, 0))
    model.alpha_schedule.total_steps = total_steps

    metrics = []
    metrics_path = os.path.join(out_dir, prefix + 'metrics.jsonl')
    with open(metrics_path, 'w', encoding = 'utf-8', newline = '\n') as f:
        _write_line(f, {'format': METRICS_FORMAT, 'version': METRICS_VERSION, 'config': dump_config(cfg),
                        'c_init': model.ball.c_value})
        step = 0
        for epoch in range(1, cfg.epochs + 1):
            model.train()
            sums = {'ce': 0.0, 'hyp': 0.0}
            alphas = []
            for chunk in chunks(rng.permutation(train_indices), cfg.batch_size):
                factor = cosine_lr(step, total_steps, 1.0, warmup_steps = warmup)
                optimizer.set_lr(factor)
                out = train_step(model, optimizer, dataset.batch(chunk), step, out_dir)
                sums['ce'] += out.ce.item()
                sums['hyp'] += out.hyp.item()
                alphas.append(out.alpha)
                step += 1
            ev = evaluate(model, dataset, cfg.batch_size)
            record = {'epoch': epoch, 'step': step,
                      'ce': sums['ce'] / per_epoch, 'hyp': sums['hyp'] / per_epoch,
                      'alpha': alphas[-1], 'alpha_min': min(alphas), 'alpha_max': max(alphas),
                      'c': model.ball.c_value, 'lr_factor': factor,
                      'top1': ev['top1'], 'top5': ev['top5'], 'token_accuracy': ev['token_accuracy'],
                      'radii': ev['radii']}
            metrics.append(record)
            _write_line(f, record)
            logger.info('epoch %d: ce %.4f hyp %.4f alpha %.3f c %.4f top1 %.3f radii %s',
                        epoch, record['ce'], record['hyp'], record['alpha'], record['c'], record['top1'],
                        ' '.join('%s=%.3f' % (p, r) for p, r in record['radii'].items()))
    checkpoint_path = save_checkpoint(os.path.join(out_dir, prefix + 'model.npz'), model, cfg,
                                      extra = {'epochs': cfg.epochs, 'final': _plain(metrics[-1])})
    return TrainResult(model, metrics, metrics_path, checkpoint_path)


def _plain(record):
    return {k: v for k, v in record.items() if not isinstance(v, numpy.ndarray)}


def read_metrics(path):
    """Header and epoch records of a metrics file."""
    with open(path, encoding = 'utf-8') as f:
        lines = [json.loads(line) for line in f if line.strip()]
    return lines[0], lines[1:]


def load_model(path, dataset = None):
    """Rebuild the model of a checkpoint; returns (model, cfg, dataset)."""
    state, manifest = read_checkpoint(path)
    cfg = checkpoint_config(manifest)
    if dataset is None:
        dataset = load_dataset(cfg.dataset)
    model = build_model(cfg, dataset, numpy.random.default_rng(cfg.seed))
    model.load_state_dict(state)
    return model.eval(), cfg, dataset

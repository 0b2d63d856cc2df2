#  Author(s):  hyperkin contributors
#  Created on: 2026-10
#
# Copyright (c) 2026 hyperkin contributors
# Released under MIT License

"""Synthetic multi-part skeleton sequences paired with templated sentences.

Classes are organised in coarse groups.  The body motion is shared by every
class of a group while the hands and face carry the class-specific motion at
a finer spatial scale, so the label hierarchy is visible in the geometry.

File format (JSON lines, UTF-8, keys sorted):

    {"format": "hyperkin-dataset", "version": 1, "config": {...},
     "vocab": [...], "sentences": [[...], ...], "joints": {part: V}}
    {"id": 0, "label": 3, "group": 3, "length": 28, "split": "train",
     "tokens": [...], "keypoints": {part: base64 float32 (T, V, 2)}}
    ...
"""

import base64
import dataclasses
import json
import logging

import numpy

from hyperkin.errors import ConfigError
from hyperkin.stgcn import PARTS, build_graph

logger = logging.getLogger(__name__)

FORMAT = 'hyperkin-dataset'
VERSION = 1

PAD, BOS, EOS = 0, 1, 2
SPECIALS = ('<pad>', '<bos>', '<eos>')
FILLERS = ('the', 'sign', 'means', 'now')
MAX_VOCAB = 64

# spatial scale of every part relative to the body
PART_SCALE = {'body': 1.0, 'left_hand': 0.15, 'right_hand': 0.15, 'face': 0.1}


@dataclasses.dataclass
class SyntheticDataset:
    """Padded arrays of a generated dataset.

    keypoints : {part: (S, T, V, 2)}, zero on padded frames
    frame_mask : (S, T) valid frames
    tokens, token_mask : (S, L) token ids and valid positions
    sentences : token ids of every label's sentence
    """
    keypoints: dict
    frame_mask: numpy.ndarray
    labels: numpy.ndarray
    groups: numpy.ndarray
    tokens: numpy.ndarray
    token_mask: numpy.ndarray
    split: numpy.ndarray
    vocab: list
    sentences: list
    config: dict

    def __len__(self):
        return len(self.labels)

    @property
    def num_classes(self):
        return len(self.sentences)

    def indices(self, split):
        return numpy.flatnonzero(self.split == split)

    def batch(self, index):
        index = numpy.asarray(index)
        return Batch({p: kp[index] for p, kp in self.keypoints.items()}, self.frame_mask[index],
                     self.labels[index], self.tokens[index], self.token_mask[index], index)

    def sentence_batch(self):
        """Every label's sentence as padded (L, n) ids and mask."""
        width = max(len(s) for s in self.sentences)
        tokens = numpy.full((len(self.sentences), width), PAD, dtype = numpy.int64)
        for i, s in enumerate(self.sentences):
            tokens[i, :len(s)] = s
        return tokens, tokens != PAD


@dataclasses.dataclass
class Batch:
    keypoints: dict
    frame_mask: numpy.ndarray
    labels: numpy.ndarray
    tokens: numpy.ndarray
    token_mask: numpy.ndarray
    ids: numpy.ndarray

    def __len__(self):
        return len(self.labels)

    def with_noise(self, sigma, rng):
        """Copy with Gaussian noise of std ``sigma`` on the valid keypoints."""
        if sigma == 0.0:
            return self
        mask = self.frame_mask[:, :, None, None]
        noisy = {p: kp + sigma * rng.standard_normal(kp.shape) * mask for p, kp in self.keypoints.items()}
        return dataclasses.replace(self, keypoints = noisy)


def build_vocab(cfg):
    words = list(SPECIALS) + list(FILLERS)
    words += ['group' + str(g) for g in range(cfg.num_groups)]
    words += ['word' + str(c) for c in range(cfg.num_classes)]
    if len(words) > MAX_VOCAB:
        raise ConfigError('vocabulary of ' + str(len(words)) + ' tokens exceeds ' + str(MAX_VOCAB)
                          + ', use fewer classes')
    return words


def label_sentence(label, cfg, vocab):
    """Token ids of the sentence of ``label``; the length varies with the label."""
    index = {w: i for i, w in enumerate(vocab)}
    words = ['the', 'sign', 'group' + str(label % cfg.num_groups), 'means', 'word' + str(label)]
    if label % 2:
        words.append('now')
    return [BOS] + [index[w] for w in words] + [EOS]


def _rest_pose(layout):
    """Rest coordinates of a part: a radial layout of its graph around the
    center joint, scaled by hop distance."""
    graph = build_graph(layout, max_hop = graph_depth(layout))
    hop = graph.hop[graph.center]
    count = graph.num_nodes
    angles = numpy.linspace(0.0, 2.0 * numpy.pi, count, endpoint = False)
    radius = numpy.where(numpy.isfinite(hop), hop, 0.0) / max(numpy.max(hop[numpy.isfinite(hop)]), 1.0)
    return numpy.stack([radius * numpy.cos(angles), radius * numpy.sin(angles)], axis = -1)


def graph_depth(layout):
    return {'body': 3, 'left_hand': 4, 'right_hand': 4, 'face': 8}[layout]


@dataclasses.dataclass
class _Prototype:
    amplitude: numpy.ndarray
    frequency: numpy.ndarray
    phase: numpy.ndarray


def _prototype(rng, joints):
    return _Prototype(rng.uniform(0.2, 1.0, size = (joints, 2)),
                      rng.uniform(0.5, 2.0, size = (joints, 2)),
                      rng.uniform(0.0, 2.0 * numpy.pi, size = (joints, 2)))


def _motion(proto, times):
    return proto.amplitude * numpy.sin(2.0 * numpy.pi * proto.frequency * times[:, None, None] + proto.phase)


def _sample_part(rest, proto, length, frames, scale, cfg, rng):
    warp = rng.uniform(-0.1, 0.1)
    s = numpy.linspace(0.0, 1.0, length)
    times = s + warp * numpy.sin(numpy.pi * s)
    jitter = _Prototype(rng.normal(0.0, cfg.noise, size = rest.shape),
                        rng.uniform(0.2, 0.5, size = rest.shape),
                        rng.uniform(0.0, 2.0 * numpy.pi, size = rest.shape))
    seq = scale * (rest + 0.3 * _motion(proto, times) + _motion(jitter, times))
    out = numpy.zeros((frames, rest.shape[0], 2))
    out[:length] = seq
    return out


def generate(cfg):
    """Build the dataset of ``cfg`` in memory; deterministic in ``cfg.seed``."""
    cfg.validate()
    rng = numpy.random.default_rng(cfg.seed)
    vocab = build_vocab(cfg)
    sentences = [label_sentence(label, cfg, vocab) for label in range(cfg.num_classes)]
    rest = {part: _rest_pose(part) for part in PARTS}
    body_protos = [_prototype(rng, rest['body'].shape[0]) for _ in range(cfg.num_groups)]
    part_protos = {part: [_prototype(rng, rest[part].shape[0]) for _ in range(cfg.num_classes)]
                   for part in PARTS[1:]}

    count = cfg.num_classes * cfg.samples_per_class
    keypoints = {part: numpy.zeros((count, cfg.frames, rest[part].shape[0], 2)) for part in PARTS}
    frame_mask = numpy.zeros((count, cfg.frames), dtype = bool)
    labels = numpy.zeros(count, dtype = numpy.int64)
    split = numpy.empty(count, dtype = object)
    i = 0
    for label in range(cfg.num_classes):
        group = label % cfg.num_groups
        for k in range(cfg.samples_per_class):
            length = int(rng.integers(cfg.frames - cfg.frames // 4, cfg.frames + 1))
            keypoints['body'][i] = _sample_part(rest['body'], body_protos[group], length, cfg.frames,
                                                PART_SCALE['body'], cfg, rng)
            for part in PARTS[1:]:
                seq = _sample_part(rest[part], part_protos[part][label], length, cfg.frames,
                                   PART_SCALE[part], cfg, rng)
                # anchor-normalised on the part-local joint 0
                seq[:length] -= seq[:length, :1]
                keypoints[part][i] = seq
            frame_mask[i, :length] = True
            labels[i] = label
            split[i] = 'eval' if k % cfg.eval_every == cfg.eval_every - 1 else 'train'
            i += 1
    width = max(len(s) for s in sentences)
    tokens = numpy.full((count, width), PAD, dtype = numpy.int64)
    for j, label in enumerate(labels):
        tokens[j, :len(sentences[label])] = sentences[label]
    config = {'seed': cfg.seed, 'num_classes': cfg.num_classes, 'num_groups': cfg.num_groups,
              'samples_per_class': cfg.samples_per_class, 'frames': cfg.frames, 'noise': cfg.noise,
              'eval_every': cfg.eval_every}
    return SyntheticDataset(keypoints, frame_mask, labels, labels % cfg.num_groups, tokens,
                            tokens != PAD, split.astype(str), vocab, sentences, config)


def _encode_array(array):
    return base64.b64encode(numpy.ascontiguousarray(array, dtype = '<f4').tobytes()).decode('ascii')


def _decode_array(text, shape):
    return numpy.frombuffer(base64.b64decode(text), dtype = '<f4').astype(numpy.float64).reshape(shape)


def save_dataset(dataset, path):
    joints = {part: int(kp.shape[2]) for part, kp in dataset.keypoints.items()}
    header = {'format': FORMAT, 'version': VERSION, 'config': dataset.config,
              'vocab': dataset.vocab, 'sentences': dataset.sentences, 'joints': joints}
    with open(path, 'w', encoding = 'utf-8', newline = '\n') as f:
        f.write(json.dumps(header, sort_keys = True) + '\n')
        for i in range(len(dataset)):
            length = int(dataset.frame_mask[i].sum())
            record = {'id': i, 'label': int(dataset.labels[i]), 'group': int(dataset.groups[i]),
                      'length': length, 'split': str(dataset.split[i]),
                      'tokens': [int(t) for t in dataset.tokens[i][dataset.token_mask[i]]],
                      'keypoints': {p: _encode_array(kp[i]) for p, kp in dataset.keypoints.items()}}
            f.write(json.dumps(record, sort_keys = True) + '\n')
    logger.info('wrote %d samples to %s', len(dataset), path)
    return path


def load_dataset(path):
    with open(path, encoding = 'utf-8') as f:
        header = json.loads(f.readline())
        if header.get('format') != FORMAT:
            raise ConfigError(str(path) + ' is not a hyperkin dataset')
        if header.get('version') != VERSION:
            raise ConfigError('unsupported dataset version ' + repr(header.get('version')))
        records = [json.loads(line) for line in f if line.strip()]
    frames = header['config']['frames']
    joints = header['joints']
    count = len(records)
    keypoints = {p: numpy.zeros((count, frames, v, 2)) for p, v in joints.items()}
    frame_mask = numpy.zeros((count, frames), dtype = bool)
    width = max(len(s) for s in header['sentences'])
    tokens = numpy.full((count, width), PAD, dtype = numpy.int64)
    labels = numpy.zeros(count, dtype = numpy.int64)
    groups = numpy.zeros(count, dtype = numpy.int64)
    split = []
    for i, r in enumerate(records):
        for p, v in joints.items():
            keypoints[p][i] = _decode_array(r['keypoints'][p], (frames, v, 2))
        frame_mask[i, :r['length']] = True
        tokens[i, :len(r['tokens'])] = r['tokens']
        labels[i], groups[i] = r['label'], r['group']
        split.append(r['split'])
    return SyntheticDataset(keypoints, frame_mask, labels, groups, tokens, tokens != PAD,
                            numpy.array(split), header['vocab'], header['sentences'], header['config'])


def gen_data(cfg, path = None):
    """Generate and persist the dataset of ``cfg``; returns the dataset."""
    dataset = generate(cfg)
    save_dataset(dataset, path or cfg.dataset)
    return dataset

#  Author(s):  hyperkin contributors
#  Created on: 2026-10
#
# Copyright (c) 2026 hyperkin contributors
# Released under MIT License

import numpy
import pytest

from hyperkin.config import TrainConfig
from hyperkin.data import generate, save_dataset


@pytest.fixture
def rng():
    return numpy.random.default_rng(42)


@pytest.fixture
def tiny_cfg(tmp_path):
    """Smallest configuration that still exercises every module."""
    return TrainConfig(num_classes = 4, num_groups = 2, samples_per_class = 5, frames = 6,
                       d_gcn = 4, d_model = 4, d_hyp = 4, gcn_blocks = 1, epochs = 2, warmup_epochs = 1,
                       batch_size = 8, lr = 3e-3, frechet_max_iter = 10,
                       dataset = str(tmp_path / 'dataset.jsonl'), out = str(tmp_path / 'runs')).validate()


@pytest.fixture
def tiny_dataset(tiny_cfg):
    dataset = generate(tiny_cfg)
    save_dataset(dataset, tiny_cfg.dataset)
    return dataset

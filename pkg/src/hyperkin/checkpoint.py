#  Author(s):  hyperkin contributors
#  Created on: 2026-10
#
# Copyright (c) 2026 hyperkin contributors
# Released under MIT License

"""Checkpoints are ``.npz`` archives of named float64 arrays plus a
``__manifest__`` entry holding a JSON document:

    {"format": "hyperkin-checkpoint", "version": 1, "config": {...},
     "tensors": {name: shape}, "extra": {...}}
"""

import json
import logging

import numpy

from hyperkin.config import TrainConfig, dump_config
from hyperkin.errors import ConfigError

logger = logging.getLogger(__name__)

FORMAT = 'hyperkin-checkpoint'
VERSION = 1
MANIFEST = '__manifest__'


def save_checkpoint(path, model, cfg, extra = None):
    state = model.state_dict()
    manifest = {'format': FORMAT, 'version': VERSION, 'config': dump_config(cfg),
                'tensors': {name: list(array.shape) for name, array in state.items()},
                'extra': extra or {}}
    arrays = dict(state)
    arrays[MANIFEST] = numpy.array(json.dumps(manifest, sort_keys = True))
    with open(path, 'wb') as f:
        numpy.savez(f, **arrays)
    logger.info('checkpoint written to %s', path)
    return path


def read_checkpoint(path):
    """Return (state, manifest) of the checkpoint at ``path``."""
    try:
        archive = numpy.load(path, allow_pickle = False)
    except ValueError as e:
        raise ConfigError(str(path) + ' is not a readable checkpoint: ' + str(e))
    if not hasattr(archive, 'files'):
        raise ConfigError(str(path) + ' is not an npz archive')
    with archive:
        if MANIFEST not in archive.files:
            raise ConfigError(str(path) + ' has no manifest')
        manifest = json.loads(str(archive[MANIFEST]))
        if manifest.get('format') != FORMAT:
            raise ConfigError(str(path) + ' is not a hyperkin checkpoint')
        if manifest.get('version') != VERSION:
            raise ConfigError('unsupported checkpoint version ' + repr(manifest.get('version')))
        state = {name: archive[name] for name in manifest['tensors']}
    return state, manifest


def checkpoint_config(manifest):
    return TrainConfig(**manifest['config']).validate()

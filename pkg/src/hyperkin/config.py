#  Author(s):  hyperkin contributors
#  Created on: 2026-10
#
# Copyright (c) 2026 hyperkin contributors
# Released under MIT License

"""Training and data-generation settings, loaded from flat ``key = value``
files."""

import configparser
import dataclasses
import logging

from hyperkin.errors import ConfigError

logger = logging.getLogger(__name__)

STRATEGIES = ('pooled', 'token', 'euclidean_pooled', 'euclidean_token', 'none')
SECTION = 'hyperkin'


@dataclasses.dataclass
class TrainConfig:
    # alignment
    strategy: str = 'token'
    d_hyp: int = 64
    init_c: float = 1.5
    learnable_c: bool = True
    euclidean_c: float = 1e-3
    alpha_init: float = 0.7
    alpha_variant: str = 'equation'
    tau_init: float = 0.5
    margin_init: float = 0.1
    contrastive_smoothing: float = 0.2
    frechet_max_iter: int = 50
    frechet_tol: float = 1e-5
    tangent_approx: bool = False

    # encoder and decoder
    d_gcn: int = 32
    d_model: int = 32
    gcn_blocks: int = 2
    graph_strategy: str = 'uniform'
    adaptive_graph: bool = False

    # optimisation
    label_smoothing: float = 0.2
    lr: float = 3e-5
    hyp_lr: float = 1e-3
    weight_decay: float = 0.01
    grad_clip_norm: float = 1.0
    warmup_epochs: int = 5
    epochs: int = 20
    batch_size: int = 32
    seed: int = 42

    # synthetic data
    num_classes: int = 20
    num_groups: int = 4
    samples_per_class: int = 40
    frames: int = 32
    noise: float = 0.01
    eval_every: int = 5

    # files
    dataset: str = 'dataset.jsonl'
    out: str = 'runs'
    workers: int = 1

    # analytic against finite-difference gradients
    gradcheck_threshold: float = 1e-4

    @property
    def euclidean(self):
        return self.strategy.startswith('euclidean')

    @property
    def alignment(self):
        """'pooled', 'token' or 'none', with the euclidean prefix removed."""
        return self.strategy.replace('euclidean_', '')

    def validate(self):
        if self.strategy not in STRATEGIES:
            raise ConfigError('unknown strategy ' + repr(self.strategy) + ', expected one of ' + ', '.join(STRATEGIES))
        positive = ('d_hyp', 'init_c', 'euclidean_c', 'tau_init', 'frechet_max_iter', 'frechet_tol',
                    'd_gcn', 'd_model', 'gcn_blocks', 'lr', 'hyp_lr', 'grad_clip_norm',
                    'epochs', 'batch_size', 'num_groups', 'samples_per_class', 'eval_every', 'workers',
                    'gradcheck_threshold')
        for name in positive:
            if not getattr(self, name) > 0:
                raise ConfigError(name + ' must be positive, got ' + repr(getattr(self, name)))
        for name in ('weight_decay', 'margin_init', 'noise', 'warmup_epochs', 'seed'):
            if getattr(self, name) < 0:
                raise ConfigError(name + ' must be nonnegative, got ' + repr(getattr(self, name)))
        for name in ('label_smoothing', 'contrastive_smoothing'):
            if not 0.0 <= getattr(self, name) < 1.0:
                raise ConfigError(name + ' must lie in [0, 1)')
        if not 0.0 <= self.alpha_init <= 1.0:
            raise ConfigError('alpha_init must lie in [0, 1]')
        if self.alpha_variant not in ('equation', 'listing'):
            raise ConfigError('alpha_variant must be equation or listing')
        if self.num_classes < 2:
            raise ConfigError('at least 2 classes are needed')
        if self.frames < 4:
            raise ConfigError('at least 4 frames are needed')
        if self.num_groups > self.num_classes:
            raise ConfigError('more groups than classes')
        if self.graph_strategy not in ('uniform', 'distance'):
            raise ConfigError('graph_strategy must be uniform or distance')
        return self

    def replace(self, **changes):
        return dataclasses.replace(self, **changes).validate()


def _convert(field, text):
    if field.type in (bool, 'bool'):
        lowered = text.strip().lower()
        if lowered in ('1', 'true', 'yes', 'on'):
            return True
        if lowered in ('0', 'false', 'no', 'off'):
            return False
        raise ConfigError(field.name + ' expects a boolean, got ' + repr(text))
    kind = {'int': int, 'float': float, 'str': str}.get(field.type, field.type)
    try:
        return kind(text.strip())
    except ValueError:
        raise ConfigError(field.name + ' expects ' + kind.__name__ + ', got ' + repr(text))


def parse_config(text, base = None):
    """Parse a flat key = value document, with or without a [hyperkin]
    section header, on top of ``base``."""
    parser = configparser.ConfigParser(interpolation = None)
    parser.optionxform = str
    if not text.lstrip().startswith('['):
        text = '[' + SECTION + ']\n' + text
    try:
        parser.read_string(text)
    except configparser.Error as e:
        raise ConfigError('malformed config: ' + str(e))
    unknown_sections = [s for s in parser.sections() if s != SECTION]
    if unknown_sections:
        raise ConfigError('unknown config section ' + repr(unknown_sections[0]))
    fields = {f.name: f for f in dataclasses.fields(TrainConfig)}
    values = {}
    if parser.has_section(SECTION):
        for key, text_value in parser.items(SECTION):
            if key not in fields:
                raise ConfigError('unknown config key ' + repr(key))
            values[key] = _convert(fields[key], text_value)
    return dataclasses.replace(base or TrainConfig(), **values).validate()


def load_config(path = None, overrides = None):
    """Read ``path`` (when given) and apply ``overrides``, a dict of field
    values whose None entries are ignored."""
    cfg = TrainConfig()
    if path is not None:
        with open(path) as f:
            cfg = parse_config(f.read(), cfg)
        logger.info('configuration read from %s', path)
    changes = {k: v for k, v in (overrides or {}).items() if v is not None}
    if changes:
        fields = {f.name for f in dataclasses.fields(TrainConfig)}
        for key in changes:
            if key not in fields:
                raise ConfigError('unknown config key ' + repr(key))
        cfg = dataclasses.replace(cfg, **changes)
    return cfg.validate()


def dump_config(cfg):
    """Plain dict of the config, in field order."""
    return dataclasses.asdict(cfg)

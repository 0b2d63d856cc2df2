#  Author(s):  hyperkin contributors
#  Created on: 2026-10
#
# Copyright (c) 2026 hyperkin contributors
# Released under MIT License

import pathlib

import pytest

from hyperkin.config import TrainConfig, dump_config, load_config, parse_config
from hyperkin.errors import ConfigError

DESK_CFG = pathlib.Path(__file__).resolve().parent.parent / 'config' / 'desk.cfg'


class TestParseConfig:

    def test_defaults(self):
        cfg = parse_config('')
        assert cfg == TrainConfig()
        assert cfg.lr == 3e-5
        assert (cfg.d_hyp, cfg.d_gcn) == (64, 32)

    def test_flat_document(self):
        cfg = parse_config('strategy = pooled\nd_hyp = 8\ninit_c = 0.5\n')
        assert cfg.strategy == 'pooled'
        assert cfg.d_hyp == 8
        assert cfg.init_c == 0.5

    def test_section_header(self):
        assert parse_config('[hyperkin]\nepochs = 3\n').epochs == 3

    @pytest.mark.parametrize('text,expected', [('yes', True), ('off', False), ('1', True), ('False', False)])
    def test_booleans(self, text, expected):
        assert parse_config('learnable_c = ' + text).learnable_c is expected

    def test_unknown_key(self):
        with pytest.raises(ConfigError):
            parse_config('curvature = 1.0')

    def test_unknown_section(self):
        with pytest.raises(ConfigError):
            parse_config('[model]\nd_hyp = 8\n')

    def test_bad_value(self):
        with pytest.raises(ConfigError):
            parse_config('epochs = many')

    def test_bad_boolean(self):
        with pytest.raises(ConfigError):
            parse_config('learnable_c = maybe')

    @pytest.mark.parametrize('text', ['strategy = hybrid', 'init_c = 0', 'alpha_init = 1.5',
                                      'label_smoothing = 1.0', 'num_groups = 50', 'frames = 2'])
    def test_validation(self, text):
        with pytest.raises(ConfigError):
            parse_config(text)


class TestLoadConfig:

    def test_desk_config(self):
        cfg = load_config(DESK_CFG)
        assert cfg.lr == 3e-3
        assert cfg.strategy == 'token'
        assert cfg.num_classes == 20

    def test_overrides(self):
        cfg = load_config(DESK_CFG, {'strategy': 'euclidean_pooled', 'seed': None, 'epochs': 2})
        assert cfg.strategy == 'euclidean_pooled'
        assert cfg.seed == 42
        assert cfg.epochs == 2
        assert cfg.euclidean
        assert cfg.alignment == 'pooled'

    def test_unknown_override(self):
        with pytest.raises(ConfigError):
            load_config(None, {'depth': 3})

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            load_config(tmp_path / 'missing.cfg')


def test_replace_validates():
    with pytest.raises(ConfigError):
        TrainConfig().replace(batch_size = 0)


def test_dump_is_field_ordered():
    dumped = dump_config(TrainConfig())
    assert list(dumped)[:2] == ['strategy', 'd_hyp']
    assert dumped['out'] == 'runs'

#  Author(s):  hyperkin contributors
#  Created on: 2026-10
#
# Copyright (c) 2026 hyperkin contributors
# Released under MIT License

import csv
import math
import os

import numpy
import pytest

from hyperkin import tensor as T
from hyperkin.ablation import ablate_alpha, ablate_curvature, ablate_noise
from hyperkin.checkpoint import read_checkpoint, save_checkpoint
from hyperkin.config import STRATEGIES
from hyperkin.errors import ConfigError, EmptyInputError, TrainingError
from hyperkin.export import disk_coordinates, export_embeddings
from hyperkin.layers import AlphaSchedule
from hyperkin.model import PoseTextModel, StepOutput, build_model
from hyperkin.stgcn import PARTS
from hyperkin.train import evaluate, load_model, read_metrics, train


@pytest.fixture
def trained(tiny_cfg, tiny_dataset):
    return train(tiny_cfg, dataset = tiny_dataset)


class TestTrain:

    @pytest.mark.parametrize('strategy', STRATEGIES)
    def test_losses_are_finite(self, tiny_cfg, tiny_dataset, strategy):
        result = train(tiny_cfg.replace(strategy = strategy), dataset = tiny_dataset)
        assert len(result.metrics) == tiny_cfg.epochs
        for record in result.metrics:
            assert math.isfinite(record['ce'])
            assert math.isfinite(record['hyp'])
            assert 0.1 <= record['alpha_min'] <= record['alpha_max'] <= 1.0

    def test_language_only_strategy(self, tiny_cfg, tiny_dataset):
        result = train(tiny_cfg.replace(strategy = 'none'), dataset = tiny_dataset)
        assert all(record['hyp'] == 0.0 for record in result.metrics)
        assert result.model.alpha_schedule.logit_alpha.item() == AlphaSchedule().logit_alpha.item()

    @pytest.mark.parametrize('strategy', ['euclidean_pooled', 'euclidean_token'])
    def test_euclidean_curvature_is_frozen(self, tiny_cfg, tiny_dataset, strategy):
        result = train(tiny_cfg.replace(strategy = strategy), dataset = tiny_dataset)
        for c in result.c_trajectory:
            assert c == pytest.approx(tiny_cfg.euclidean_c, rel = 1e-12)

    def test_learned_curvature_moves_slowly(self, trained, tiny_cfg):
        assert abs(trained.final['c'] - tiny_cfg.init_c) / tiny_cfg.init_c < 0.5

    def test_metrics_file(self, trained, tiny_cfg):
        header, records = read_metrics(trained.metrics_path)
        assert header['format'] == 'hyperkin-metrics'
        assert header['config']['strategy'] == 'token'
        assert header['c_init'] == pytest.approx(tiny_cfg.init_c)
        assert [r['epoch'] for r in records] == list(range(1, tiny_cfg.epochs + 1))
        assert set(records[-1]['radii']) == set(PARTS)
        assert records[-1]['top5'] >= records[-1]['top1']

    def test_same_config_same_metrics(self, tiny_cfg, tiny_dataset):
        first = train(tiny_cfg, dataset = tiny_dataset)
        with open(first.metrics_path, 'rb') as f:
            expected = f.read()
        second = train(tiny_cfg, dataset = tiny_dataset)
        with open(second.metrics_path, 'rb') as f:
            assert f.read() == expected

    def test_dataset_is_read_from_disk(self, tiny_cfg, tiny_dataset):
        result = train(tiny_cfg, prefix = 'disk_')
        assert os.path.basename(result.metrics_path) == 'disk_metrics.jsonl'
        assert os.path.exists(result.checkpoint_path)

    def test_non_finite_loss_aborts_with_dump(self, tiny_cfg, tiny_dataset, monkeypatch):
        def broken(self, batch, step):
            nan = T.Tensor(float('nan'))
            return StepOutput(nan, nan, nan, 0.7)

        monkeypatch.setattr(PoseTextModel, 'losses', broken)
        with pytest.raises(TrainingError) as info:
            train(tiny_cfg, dataset = tiny_dataset)
        assert info.value.dump_path is not None
        with numpy.load(info.value.dump_path) as dump:
            assert 'kp_body' in dump.files
            assert 'non-finite' in str(dump['reason'])

    @pytest.mark.slow
    def test_language_loss_decreases(self, tiny_cfg, tiny_dataset):
        result = train(tiny_cfg.replace(strategy = 'none', epochs = 8), dataset = tiny_dataset)
        assert result.metrics[-1]['ce'] < result.metrics[0]['ce']


class TestEvaluate:

    def test_retrieval_over_every_sentence(self, tiny_cfg, tiny_dataset, rng):
        model = build_model(tiny_cfg, tiny_dataset, rng)
        metrics = evaluate(model, tiny_dataset, tiny_cfg.batch_size)
        held_out = len(tiny_dataset.indices('eval'))
        assert metrics['ranks'].shape == (held_out,)
        assert numpy.all((metrics['ranks'] >= 0) & (metrics['ranks'] < tiny_cfg.num_classes))
        # four candidate sentences only
        assert metrics['top5'] == 1.0
        assert model.training

    def test_pooled_retrieval(self, tiny_cfg, tiny_dataset, rng):
        model = build_model(tiny_cfg.replace(strategy = 'pooled'), tiny_dataset, rng)
        metrics = evaluate(model, tiny_dataset, tiny_cfg.batch_size)
        assert 0.0 <= metrics['top1'] <= 1.0
        assert all(r > 0.0 for r in metrics['radii'].values())


class TestCheckpoint:

    def test_round_trip(self, trained, tiny_cfg, tiny_dataset):
        model, cfg, _ = load_model(trained.checkpoint_path, tiny_dataset)
        assert cfg == tiny_cfg
        expected = trained.model.state_dict()
        state = model.state_dict()
        assert set(state) == set(expected)
        for name, array in expected.items():
            numpy.testing.assert_array_equal(state[name], array)

    def test_manifest(self, trained):
        state, manifest = read_checkpoint(trained.checkpoint_path)
        assert manifest['format'] == 'hyperkin-checkpoint'
        assert manifest['extra']['epochs'] == 2
        assert set(manifest['tensors']) == set(state)

    def test_not_an_archive(self, tmp_path):
        path = tmp_path / 'model.npz'
        path.write_text('plain text')
        with pytest.raises(ConfigError):
            read_checkpoint(path)

    def test_missing_manifest(self, tmp_path):
        path = tmp_path / 'model.npz'
        with open(path, 'wb') as f:
            numpy.savez(f, weight = numpy.zeros(3))
        with pytest.raises(ConfigError):
            read_checkpoint(path)

    def test_save_returns_path(self, tiny_cfg, tiny_dataset, rng, tmp_path):
        model = build_model(tiny_cfg, tiny_dataset, rng)
        path = str(tmp_path / 'fresh.npz')
        assert save_checkpoint(path, model, tiny_cfg) == path


class TestExport:

    def test_table(self, trained, tiny_cfg, tiny_dataset, tmp_path):
        out = tmp_path / 'embeddings.csv'
        svg = tmp_path / 'disk.svg'
        table = export_embeddings(trained.checkpoint_path, str(out), str(svg), dataset = tiny_dataset)
        assert len(table['sample_id']) == len(tiny_dataset) * len(PARTS)
        # the radius is the geodesic distance to the origin, which logmap0 preserves
        numpy.testing.assert_allclose(table['radius'], numpy.linalg.norm(table['tangent'], axis = 1), rtol = 1e-9)
        assert numpy.all(numpy.linalg.norm(table['pca'], axis = 1) <= 0.95 + 1e-12)
        with open(out, newline = '') as f:
            rows = list(csv.reader(f))
        assert rows[0][:3] == ['sample_id', 'part', 'radius']
        assert len(rows[0]) == 3 + tiny_cfg.d_hyp + 2
        assert len(rows) == len(table['sample_id']) + 1
        assert '<svg' in svg.read_text()

    def test_disk_coordinates(self, rng):
        xy = disk_coordinates(rng.normal(size = (10, 5)))
        assert xy.shape == (10, 2)
        assert numpy.max(numpy.linalg.norm(xy, axis = 1)) == pytest.approx(0.95)

    def test_single_row(self):
        numpy.testing.assert_array_equal(disk_coordinates(numpy.zeros((1, 3))), numpy.zeros((1, 2)))

    def test_no_embedding(self):
        with pytest.raises(EmptyInputError):
            disk_coordinates(numpy.zeros((0, 3)))

    def test_empty_split(self, trained, tiny_dataset, tmp_path):
        out = tmp_path / 'embeddings.csv'
        with pytest.raises(EmptyInputError):
            export_embeddings(trained.checkpoint_path, str(out), dataset = tiny_dataset, split = 'test')
        assert not out.exists()


class TestAblations:

    def test_frozen_curvature_sweep(self, tiny_cfg, tiny_dataset):
        rows = ablate_curvature(tiny_cfg, [0.5, 1.0])
        assert [row['c_init'] for row in rows] == [0.5, 1.0]
        for row in rows:
            assert row['c_final'] == pytest.approx(row['c_init'], rel = 1e-12)
            assert not row['learnable']
            assert len(row['c_trajectory']) == tiny_cfg.epochs
            assert os.path.exists(row['checkpoint'])

    def test_noise_sweep(self, tiny_cfg, tiny_dataset):
        rows = ablate_noise(tiny_cfg, [0.0, 0.05])
        assert [row['sigma'] for row in rows] == [0.0, 0.05]
        assert rows[0]['hyperbolic_degradation'] == 0.0
        assert rows[0]['euclidean_degradation'] == 0.0
        for row in rows:
            assert 0.0 <= row['hyperbolic'] <= 1.0
            assert 0.0 <= row['euclidean'] <= 1.0

    def test_noise_sweep_reuses_checkpoints(self, trained, tiny_cfg, tiny_dataset):
        rows = ablate_noise(tiny_cfg, [0.0], hyp_checkpoint = trained.checkpoint_path,
                            euclid_checkpoint = trained.checkpoint_path)
        assert rows[0]['hyperbolic'] == rows[0]['euclidean']

    def test_alpha_sweep(self, tiny_cfg, tiny_dataset):
        rows = ablate_alpha(tiny_cfg, [0.1, 0.9])
        assert [row['alpha_init'] for row in rows] == [0.1, 0.9]
        for row in rows:
            assert 0.1 <= row['alpha_final'] <= 1.0
            assert os.path.exists(row['checkpoint'])
        assert rows[0]['alpha_final'] < rows[1]['alpha_final']

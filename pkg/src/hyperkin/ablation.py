#  Author(s):  hyperkin contributors
#  Created on: 2026-10
#
# Copyright (c) 2026 hyperkin contributors
# Released under MIT License

"""Curvature, loss-blend and evaluation-noise sweeps.  Independent runs go
to worker processes when ``workers`` > 1."""

import concurrent.futures
import logging
import os

import numpy

from hyperkin.data import load_dataset
from hyperkin.train import evaluate, load_model, train

logger = logging.getLogger(__name__)

CURVATURES = (0.001, 0.1, 0.5, 1.0, 1.5, 2.0)
NOISE_LEVELS = (0.0, 0.01, 0.02, 0.03, 0.04, 0.05)
ALPHAS = (0.1, 0.5, 0.7, 0.9)


def _map(function, jobs, workers):
    if workers <= 1 or len(jobs) <= 1:
        return [function(job) for job in jobs]
    with concurrent.futures.ProcessPoolExecutor(max_workers = workers) as pool:
        return list(pool.map(function, jobs))


def _curvature_run(job):
    cfg, out_dir = job
    result = train(cfg, out_dir = out_dir, prefix = 'c' + repr(cfg.init_c) + '_')
    final = result.final
    return {'c_init': cfg.init_c, 'learnable': cfg.learnable_c, 'c_final': final['c'],
            'top1': final['top1'], 'top5': final['top5'], 'ce': final['ce'], 'hyp': final['hyp'],
            'c_trajectory': result.c_trajectory, 'checkpoint': result.checkpoint_path}


def ablate_curvature(cfg, c_list = CURVATURES, learnable = False, workers = 1, out_dir = None):
    """Train one model per initial curvature.  Frozen runs keep c fixed;
    learnable runs also report the c trajectory."""
    out_dir = out_dir or os.path.join(cfg.out, 'curvature')
    strategy = cfg.alignment if cfg.alignment != 'none' else 'token'
    jobs = [(cfg.replace(strategy = strategy, init_c = float(c), learnable_c = learnable), out_dir)
            for c in c_list]
    rows = _map(_curvature_run, jobs, workers)
    for row in rows:
        logger.info('curvature %g: top1 %.3f final c %.4f', row['c_init'], row['top1'], row['c_final'])
    return rows


def _alpha_run(job):
    cfg, out_dir = job
    result = train(cfg, out_dir = out_dir, prefix = 'alpha' + repr(cfg.alpha_init) + '_')
    final = result.final
    return {'alpha_init': cfg.alpha_init, 'alpha_final': final['alpha'], 'top1': final['top1'],
            'top5': final['top5'], 'ce': final['ce'], 'hyp': final['hyp'], 'checkpoint': result.checkpoint_path}


def ablate_alpha(cfg, alpha_list = ALPHAS, workers = 1, out_dir = None):
    """Train one model per initial loss blend α at the configured curvature."""
    out_dir = out_dir or os.path.join(cfg.out, 'alpha')
    strategy = cfg.alignment if cfg.alignment != 'none' else 'token'
    jobs = [(cfg.replace(strategy = strategy, alpha_init = float(a)), out_dir) for a in alpha_list]
    rows = _map(_alpha_run, jobs, workers)
    for row in rows:
        logger.info('alpha %g: top1 %.3f final alpha %.3f', row['alpha_init'], row['top1'], row['alpha_final'])
    return rows


def _noise_eval(job):
    checkpoint, sigma, seed, batch_size = job
    model, cfg, dataset = load_model(checkpoint)
    metrics = evaluate(model, dataset, batch_size, noise = sigma, rng = numpy.random.default_rng(seed))
    return metrics['top1']


def _degradation(base, value):
    if base == 0.0:
        return 0.0
    return (base - value) / base


def ablate_noise(cfg, sigma_list = NOISE_LEVELS, hyp_checkpoint = None, euclid_checkpoint = None,
                 workers = 1, out_dir = None):
    """Relative top-1 degradation of a hyperbolic and a euclidean model under
    Gaussian keypoint noise.  Missing checkpoints are trained first.  Both
    models see the same noise draws."""
    out_dir = out_dir or os.path.join(cfg.out, 'noise')
    strategy = cfg.alignment if cfg.alignment != 'none' else 'token'
    trainings = []
    if hyp_checkpoint is None:
        trainings.append((cfg.replace(strategy = strategy), 'hyperbolic_'))
    if euclid_checkpoint is None:
        trainings.append((cfg.replace(strategy = 'euclidean_' + strategy), 'euclidean_'))
    if trainings:
        dataset = load_dataset(cfg.dataset)
        for run_cfg, prefix in trainings:
            path = train(run_cfg, dataset = dataset, out_dir = out_dir, prefix = prefix).checkpoint_path
            if prefix == 'hyperbolic_':
                hyp_checkpoint = path
            else:
                euclid_checkpoint = path

    sigmas = [float(s) for s in sigma_list]
    jobs = [(checkpoint, sigma, cfg.seed + i, cfg.batch_size)
            for checkpoint in (hyp_checkpoint, euclid_checkpoint) for i, sigma in enumerate(sigmas)]
    scores = _map(_noise_eval, jobs, workers)
    hyp_scores, euclid_scores = scores[:len(sigmas)], scores[len(sigmas):]
    hyp_base = _noise_eval((hyp_checkpoint, 0.0, cfg.seed, cfg.batch_size)) if 0.0 not in sigmas \
        else hyp_scores[sigmas.index(0.0)]
    euclid_base = _noise_eval((euclid_checkpoint, 0.0, cfg.seed, cfg.batch_size)) if 0.0 not in sigmas \
        else euclid_scores[sigmas.index(0.0)]
    rows = []
    for sigma, h, e in zip(sigmas, hyp_scores, euclid_scores):
        rows.append({'sigma': sigma, 'hyperbolic': h, 'euclidean': e,
                     'hyperbolic_degradation': _degradation(hyp_base, h),
                     'euclidean_degradation': _degradation(euclid_base, e)})
        logger.info('noise %g: hyperbolic %.3f (%.1f%%) euclidean %.3f (%.1f%%)', sigma, h,
                    100.0 * rows[-1]['hyperbolic_degradation'], e, 100.0 * rows[-1]['euclidean_degradation'])
    return rows

#  Author(s):  hyperkin contributors
#  Created on: 2026-10
#
# Copyright (c) 2026 hyperkin contributors
# Released under MIT License

"""``hyperkin`` command line: gen-data, train, ablate-curvature, ablate-alpha,
ablate-noise, export-embeddings and check-grads."""

import argparse
import csv
import json
import logging
import os
import sys

from hyperkin.ablation import ALPHAS, CURVATURES, NOISE_LEVELS, ablate_alpha, ablate_curvature, ablate_noise
from hyperkin.config import STRATEGIES, load_config
from hyperkin.data import gen_data, load_dataset
from hyperkin.errors import HyperkinError
from hyperkin.export import export_embeddings
from hyperkin.gradcheck import check_grads
from hyperkin.train import train

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'
EXIT_ERROR = 1
EXIT_GRADCHECK = 2


def _float_list(text):
    return [float(v) for v in text.split(',') if v.strip()]


def _add_common(parser):
    parser.add_argument('--config', help = 'flat key = value configuration file')
    parser.add_argument('--seed', type = int)
    parser.add_argument('--strategy', choices = STRATEGIES)
    parser.add_argument('--init-c', dest = 'init_c', type = float)
    parser.add_argument('--alpha', dest = 'alpha_init', type = float, help = 'initial alpha of the loss blend')
    parser.add_argument('--epochs', type = int)
    parser.add_argument('--out', help = 'output directory')
    parser.add_argument('--dataset', help = 'dataset file')
    parser.add_argument('--workers', type = int)


def build_parser():
    parser = argparse.ArgumentParser(prog = 'hyperkin', description = __doc__)
    parser.add_argument('--log-level', default = 'WARNING',
                        choices = ['DEBUG', 'INFO', 'WARNING', 'ERROR'])
    commands = parser.add_subparsers(dest = 'command', required = True)

    _add_common(commands.add_parser('gen-data', help = 'generate the synthetic dataset'))
    _add_common(commands.add_parser('train', help = 'train one model'))

    curvature = commands.add_parser('ablate-curvature', help = 'sweep the initial curvature')
    _add_common(curvature)
    curvature.add_argument('--c-list', type = _float_list, default = list(CURVATURES))
    curvature.add_argument('--learnable', action = 'store_true', help = 'learn c instead of freezing it')

    blend = commands.add_parser('ablate-alpha', help = 'sweep the initial loss blend')
    _add_common(blend)
    blend.add_argument('--alpha-list', type = _float_list, default = list(ALPHAS))

    noise = commands.add_parser('ablate-noise', help = 'evaluation noise robustness')
    _add_common(noise)
    noise.add_argument('--sigma-list', type = _float_list, default = list(NOISE_LEVELS))
    noise.add_argument('--hyp-checkpoint')
    noise.add_argument('--euclid-checkpoint')

    export = commands.add_parser('export-embeddings', help = 'write part embeddings of a checkpoint')
    export.add_argument('checkpoint')
    export.add_argument('out_path')
    export.add_argument('--svg', help = 'also draw the Poincaré disk to this SVG file')
    export.add_argument('--config', help = 'configuration whose dataset replaces the checkpoint dataset')
    export.add_argument('--dataset', help = 'dataset file, replaces the checkpoint dataset')
    export.add_argument('--split', choices = ['train', 'eval'], help = 'only the samples of this split')

    grads = commands.add_parser('check-grads', help = 'analytic against finite-difference gradients')
    grads.add_argument('--config', help = 'flat key = value configuration file')
    grads.add_argument('--threshold', dest = 'gradcheck_threshold', type = float,
                       help = 'largest accepted relative error')
    return parser


def _config(args):
    keys = ('seed', 'strategy', 'init_c', 'alpha_init', 'epochs', 'out', 'dataset', 'workers',
            'gradcheck_threshold')
    return load_config(args.config, {k: getattr(args, k, None) for k in keys})


def _write_rows(path, rows):
    columns = [k for k in rows[0] if not isinstance(rows[0][k], list)]
    with open(path, 'w', newline = '') as f:
        writer = csv.DictWriter(f, fieldnames = columns, extrasaction = 'ignore')
        writer.writeheader()
        writer.writerows(rows)
    return path


def run(args):
    if args.command == 'check-grads':
        report = check_grads(_config(args).gradcheck_threshold)
        print(report.format())
        return 0 if report.passed else EXIT_GRADCHECK
    if args.command == 'export-embeddings':
        dataset = None
        if args.config is not None or args.dataset is not None:
            dataset = load_dataset(_config(args).dataset)
        table = export_embeddings(args.checkpoint, args.out_path, svg_path = args.svg, dataset = dataset,
                                  split = args.split)
        print('wrote ' + str(len(table['sample_id'])) + ' rows to ' + args.out_path)
        return 0

    cfg = _config(args)
    if args.command == 'gen-data':
        dataset = gen_data(cfg)
        print('wrote ' + str(len(dataset)) + ' samples to ' + cfg.dataset)
    elif args.command == 'train':
        result = train(cfg)
        final = dict(result.final, checkpoint = result.checkpoint_path, metrics = result.metrics_path)
        print(json.dumps(final, sort_keys = True))
    elif args.command == 'ablate-curvature':
        rows = ablate_curvature(cfg, args.c_list, learnable = args.learnable, workers = cfg.workers)
        os.makedirs(cfg.out, exist_ok = True)
        path = _write_rows(os.path.join(cfg.out, 'curvature_report.csv'), rows)
        for row in rows:
            print('c=%-6g top1=%.3f top5=%.3f ce=%.4f hyp=%.4f final_c=%.4f'
                  % (row['c_init'], row['top1'], row['top5'], row['ce'], row['hyp'], row['c_final']))
        print('report written to ' + path)
    elif args.command == 'ablate-alpha':
        rows = ablate_alpha(cfg, args.alpha_list, workers = cfg.workers)
        os.makedirs(cfg.out, exist_ok = True)
        path = _write_rows(os.path.join(cfg.out, 'alpha_report.csv'), rows)
        for row in rows:
            print('alpha=%-4g top1=%.3f top5=%.3f ce=%.4f hyp=%.4f final_alpha=%.3f'
                  % (row['alpha_init'], row['top1'], row['top5'], row['ce'], row['hyp'], row['alpha_final']))
        print('report written to ' + path)
    elif args.command == 'ablate-noise':
        rows = ablate_noise(cfg, args.sigma_list, args.hyp_checkpoint, args.euclid_checkpoint,
                            workers = cfg.workers)
        os.makedirs(cfg.out, exist_ok = True)
        path = _write_rows(os.path.join(cfg.out, 'noise_report.csv'), rows)
        for row in rows:
            print('sigma=%-5g hyperbolic=%.3f (%+.1f%%) euclidean=%.3f (%+.1f%%)'
                  % (row['sigma'], row['hyperbolic'], -100.0 * row['hyperbolic_degradation'],
                     row['euclidean'], -100.0 * row['euclidean_degradation']))
        print('report written to ' + path)
    return 0


def main(argv = None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level = getattr(logging, args.log_level), format = LOG_FORMAT)
    try:
        return run(args)
    except (HyperkinError, OSError) as e:
        sys.stderr.write(json.dumps({'error': type(e).__name__, 'message': str(e)}) + '\n')
        return EXIT_ERROR


if __name__ == '__main__':
    sys.exit(main())

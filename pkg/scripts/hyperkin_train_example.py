#!/usr/bin/env python

# Author: hyperkin contributors
# Created on: 2026-10
#
# Copyright (c) 2026 hyperkin contributors
# Released under MIT License

# Generate a small synthetic dataset, then train a hyperbolic and a
# euclidean token-aligned model on it and compare their retrieval:
# > python hyperkin_train_example.py <output-directory>

import logging
import os
import sys

import hyperkin
from hyperkin.data import generate, save_dataset


# example of application using train.py
class hyperkin_train_example:

    # configuration
    def configure(self, out_dir):
        logging.basicConfig(level = logging.INFO, format = '%(asctime)s %(levelname)s %(name)s: %(message)s')
        print('configuring hyperkin_train_example in: ' + out_dir)
        os.makedirs(out_dir, exist_ok = True)
        self.cfg = hyperkin.TrainConfig(num_classes = 8, num_groups = 2, samples_per_class = 10,
                                        frames = 12, d_gcn = 8, d_model = 8, d_hyp = 8, gcn_blocks = 1,
                                        epochs = 4, warmup_epochs = 1, batch_size = 16, lr = 3e-3,
                                        dataset = os.path.join(out_dir, 'dataset.jsonl'),
                                        out = out_dir).validate()
        self.dataset = generate(self.cfg)
        save_dataset(self.dataset, self.cfg.dataset)

    def run(self):
        for strategy in ('token', 'euclidean_token'):
            cfg = self.cfg.replace(strategy = strategy)
            result = hyperkin.train(cfg, dataset = self.dataset, prefix = strategy + '_')
            final = result.final
            print('%-16s top1 %.3f  top5 %.3f  final c %.4f' % (strategy, final['top1'], final['top5'], final['c']))
            print('    radii: ' + ', '.join('%s %.3f' % (p, r) for p, r in final['radii'].items()))

# use the class now, i.e. main program
if __name__ == '__main__':
    if (len(sys.argv) != 2):
        print(sys.argv[0], ' requires one argument, i.e. output directory')
    else:
        example = hyperkin_train_example()
        example.configure(sys.argv[1])
        example.run()

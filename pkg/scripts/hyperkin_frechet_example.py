#!/usr/bin/env python

# Author: hyperkin contributors
# Created on: 2026-10
#
# Copyright (c) 2026 hyperkin contributors
# Released under MIT License

# Weighted Fréchet mean of random points of the Poincaré disk, printing
# the objective after every iteration:
# > python hyperkin_frechet_example.py [curvature]

import sys

import numpy

import hyperkin
from hyperkin.frechet import frechet_objective


# example of application using frechet.py
class hyperkin_frechet_example:

    # configuration
    def configure(self, c):
        print('configuring hyperkin_frechet_example for c = ' + str(c))
        self.ball = hyperkin.PoincareBall(init_c = c, learnable = False)
        rng = numpy.random.default_rng(0)
        raw = rng.normal(size = (5, 2))
        self.points = self.ball.project_to_ball(0.8 * raw / (1.0 + numpy.linalg.norm(raw, axis = -1, keepdims = True))
                                                / numpy.sqrt(c)).coords
        self.weights = hyperkin.part_weights(self.points, self.ball)

    def run(self):
        cfg = hyperkin.FrechetConfig(record_history = True)
        result = hyperkin.frechet_mean(self.points, self.weights, cfg, self.ball)
        for k, mu in enumerate(result.history):
            print('iteration %2d  F = %.10f' % (k, frechet_objective(mu, self.points, self.weights, self.ball)))
        print('mean ' + str(result.mean.coords.data) + (' converged' if result.converged else ' not converged')
              + ' after ' + str(result.iterations) + ' iterations')

# use the class now, i.e. main program
if __name__ == '__main__':
    example = hyperkin_frechet_example()
    example.configure(float(sys.argv[1]) if len(sys.argv) > 1 else 1.0)
    example.run()

#  Author(s):  hyperkin contributors
#  Created on: 2026-10
#
# Copyright (c) 2026 hyperkin contributors
# Released under MIT License

import numpy
import pytest

from hyperkin.decoder import ToyDecoder, token_accuracy


@pytest.fixture
def decoder(rng):
    return ToyDecoder(7, 4, 6, rng)


def inputs(rng):
    tokens = rng.integers(0, 7, size = (2, 5))
    mask = numpy.ones((2, 5), dtype = bool)
    mask[1, 3:] = False
    memory = rng.normal(size = (2, 3, 4))
    frame_mask = numpy.array([[True, True, True], [True, True, False]])
    return tokens, mask, memory, frame_mask


def test_distribution_rows_sum_to_one(decoder, rng):
    p = decoder.distribution(*inputs(rng)).data
    assert p.shape == (2, 5, 7)
    assert numpy.all(p >= 0.0)
    numpy.testing.assert_allclose(p.sum(axis = -1), 1.0, atol = 1e-12)


def test_later_tokens_do_not_change_earlier_steps(decoder, rng):
    tokens, mask, memory, frame_mask = inputs(rng)
    before = decoder.distribution(tokens, mask, memory, frame_mask).data
    changed = tokens.copy()
    changed[:, -1] = (changed[:, -1] + 1) % 7
    after = decoder.distribution(changed, mask, memory, frame_mask).data
    numpy.testing.assert_allclose(after[:, :-1], before[:, :-1], atol = 1e-12)


def test_token_accuracy_of_the_predicted_token(decoder, rng):
    _, _, memory, frame_mask = inputs(rng)
    tokens = numpy.zeros((2, 2), dtype = numpy.int64)
    tokens[:, 0] = [3, 5]
    mask = numpy.ones((2, 2), dtype = bool)
    p = decoder.distribution(tokens[:, :1], mask[:, :1], memory, frame_mask).data
    tokens[:, 1] = numpy.argmax(p[:, 0], axis = -1)
    assert token_accuracy(decoder, tokens, mask, memory, frame_mask) == 1.0
    tokens[0, 1] = (tokens[0, 1] + 1) % 7
    assert token_accuracy(decoder, tokens, mask, memory, frame_mask) == 0.5

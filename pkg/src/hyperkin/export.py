#  Author(s):  hyperkin contributors
#  Created on: 2026-10
#
# Copyright (c) 2026 hyperkin contributors
# Released under MIT License

"""Export of the part embeddings of a checkpoint: a CSV table and an
optional Poincaré disk plot."""

import csv
import logging

import numpy
from sklearn.decomposition import PCA

from hyperkin.errors import EmptyInputError
from hyperkin.stgcn import PART_LABELS, PARTS
from hyperkin.train import chunks, load_model

logger = logging.getLogger(__name__)

DISK_FILL = 0.95


def disk_coordinates(tangent):
    """2-D PCA of tangent vectors (n, d), rescaled so the largest norm is
    0.95."""
    tangent = numpy.asarray(tangent)
    if tangent.ndim != 2 or tangent.shape[0] == 0:
        raise EmptyInputError('no embedding to place on the disk')
    n_components = min(2, tangent.shape[0] - 1, tangent.shape[1])
    xy = numpy.zeros((tangent.shape[0], 2))
    if n_components > 0:
        xy[:, :n_components] = PCA(n_components = n_components).fit_transform(tangent)
    largest = numpy.max(numpy.linalg.norm(xy, axis = 1))
    if largest > 0.0:
        xy = xy * (DISK_FILL / largest)
    return xy


def embedding_table(model, dataset, batch_size = 32, split = None):
    """Rows (sample_id, part, radius, tangent (d,)) of every sample of
    ``split`` (all samples when None)."""
    indices = numpy.arange(len(dataset)) if split is None else dataset.indices(split)
    if len(indices) == 0:
        raise EmptyInputError('no sample in split ' + repr(split))
    ids, parts, radii, tangents = [], [], [], []
    for chunk in chunks(indices, batch_size):
        h = model.embeddings(dataset.batch(chunk))
        r = model.ball.dist0(h).data
        t = model.ball.logmap0(h).coords.data
        for row, sample in enumerate(chunk):
            for p, part in enumerate(PARTS):
                ids.append(int(sample))
                parts.append(PART_LABELS[part])
                radii.append(float(r[row, p]))
                tangents.append(t[row, p])
    return ids, parts, numpy.array(radii), numpy.array(tangents)


def plot_disk(path, xy, parts):
    import matplotlib
    matplotlib.use('Agg')
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize = (6, 6))
    ax.add_patch(plt.Circle((0, 0), 1, fill = False, color = 'black', linestyle = '--'))
    parts = numpy.asarray(parts)
    for label in PART_LABELS.values():
        selected = parts == label
        ax.scatter(xy[selected, 0], xy[selected, 1], s = 8, alpha = 0.7, label = label)
    ax.set_xlim(-1.05, 1.05)
    ax.set_ylim(-1.05, 1.05)
    ax.set_aspect('equal')
    ax.legend(loc = 'upper right')
    fig.savefig(path, format = 'svg', bbox_inches = 'tight')
    plt.close(fig)


def export_embeddings(checkpoint, out_path, svg_path = None, dataset = None, split = None):
    """Write the CSV (sample_id, part, radius, t0..t{d-1}, pca_x, pca_y) of a
    checkpoint's part embeddings; returns the table as a dict of columns."""
    model, cfg, dataset = load_model(checkpoint, dataset)
    ids, parts, radii, tangents = embedding_table(model, dataset, cfg.batch_size, split)
    xy = disk_coordinates(tangents)
    with open(out_path, 'w', newline = '') as f:
        writer = csv.writer(f)
        writer.writerow(['sample_id', 'part', 'radius'] + ['t' + str(i) for i in range(tangents.shape[1])]
                        + ['pca_x', 'pca_y'])
        for i in range(len(ids)):
            writer.writerow([ids[i], parts[i], repr(float(radii[i]))] + [repr(float(v)) for v in tangents[i]]
                            + [repr(float(xy[i, 0])), repr(float(xy[i, 1]))])
    logger.info('wrote %d embeddings to %s', len(ids), out_path)
    if svg_path is not None:
        plot_disk(svg_path, xy, parts)
    return {'sample_id': ids, 'part': parts, 'radius': radii, 'tangent': tangents, 'pca': xy}

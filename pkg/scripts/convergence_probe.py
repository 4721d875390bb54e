"""Iterations to convergence and pseudo-label accuracy across blob seeds.

    python3 scripts/convergence_probe.py --d 2 16 --seeds 8
"""

import argparse

import numpy as np

from gtgaug.dataset import ClassCatalog
from gtgaug.evaluation import accuracy
from gtgaug.gtg import GtgConfig, propagate
from gtgaug.synthetic import BlobSpec, class_names, gaussian_blobs, sample_partial_labeling


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=300)
    ap.add_argument("--d", type=int, nargs="+", default=[2, 16])
    ap.add_argument("--m", type=int, default=3)
    ap.add_argument("--separation", type=float, default=6.0)
    ap.add_argument("--fraction", type=float, default=0.05)
    ap.add_argument("--seeds", type=int, default=8)
    ap.add_argument("--eps", type=float, default=1e-5)
    ap.add_argument("--max-iter", type=int, default=1000)
    args = ap.parse_args()

    config = GtgConfig(epsilon=args.eps, max_iterations=args.max_iter)
    catalog = ClassCatalog(tuple(class_names(args.m)))
    print(f"{'d':>3} {'seed':>4} {'iters':>6} {'conv':>5} {'acc':>6}")
    for d in args.d:
        for seed in range(args.seeds):
            features, truth = gaussian_blobs(BlobSpec(args.n, d, args.m, args.separation, seed))
            labeling = sample_partial_labeling(features.ids, truth, catalog, args.fraction, seed)
            result, res = propagate(features, labeling, config)
            unl = np.array([i not in labeling.labeled for i in features.ids])
            acc = accuracy(result.labels[unl], truth[unl])
            print(f"{d:3d} {seed:4d} {res.iterations:6d} {str(res.converged):>5} {acc:6.3f}")


if __name__ == "__main__":
    main()

"""Seed-averaged labeled-fraction sweep on Gaussian blobs.

    python3 scripts/sweep.py --n 600 --d 16 --m 4 --separation 2.5 --seeds 5
"""

import argparse

import numpy as np

from gtgaug.dataset import ClassCatalog
from gtgaug.experiment import METHODS, run_experiment
from gtgaug.gtg import GtgConfig
from gtgaug.synthetic import BlobSpec, class_names, gaussian_blobs


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=600)
    ap.add_argument("--d", type=int, default=16)
    ap.add_argument("--m", type=int, default=4)
    ap.add_argument("--separation", type=float, default=2.5)
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--fractions", default="0.02,0.05,0.10")
    ap.add_argument("--knn", type=int, default=0, help="kNN sparsification for GTG, 0 = dense")
    ap.add_argument("--max-iter", type=int, default=100)
    args = ap.parse_args()

    fractions = [float(f) for f in args.fractions.split(",")]
    config = GtgConfig(sparsify_k=args.knn, max_iterations=args.max_iter)
    catalog = ClassCatalog(tuple(class_names(args.m)))
    acc, iters = {}, []
    for seed in range(args.seeds):
        features, truth = gaussian_blobs(BlobSpec(args.n, args.d, args.m, args.separation, seed))
        for cell in run_experiment(features, truth, catalog, fractions, seed=seed, config=config):
            acc.setdefault((cell["labeled_fraction"], cell["method"]), []).append(cell["accuracy"])
            if cell["method"] == "gtg":
                iters.append(cell["iterations"])

    print("fraction " + " ".join(f"{m:>13}" for m in METHODS))
    for f in fractions:
        row = [acc[(f, m)] for m in METHODS]
        print(f"{f:8.2f} " + " ".join(f"{np.mean(a):7.3f}±{np.std(a):.3f}" for a in row))
    print(f"gtg iterations: median {np.median(iters):.0f}, max {max(iters)}")


if __name__ == "__main__":
    main()

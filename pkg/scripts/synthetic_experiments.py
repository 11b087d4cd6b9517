"""Autoencoder vs. LSH vs. naive sign on clustered synthetic data.

Prints reconstruction-loss curves, P@10 per method and bit size, and the
mean absolute bit correlation with and without the orthogonality penalty.
"""

import argparse

import numpy as np

from binvec.autoencoder import TrainingConfig, binarize_all, bit_correlation, train
from binvec.baselines import lsh_binarize, naive_binarize
from binvec.evaluation import precision_at_k
from binvec.synthetic import clustered_embeddings


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--vectors", type=int, default=1000)
    ap.add_argument("--dim", type=int, default=64)
    ap.add_argument("--clusters", type=int, default=10)
    ap.add_argument("--spread", type=float, default=0.6)
    ap.add_argument("--bits", default="64,128,256")
    args = ap.parse_args()
    bit_sizes = [int(b) for b in args.bits.split(",")]

    prec = {}
    corr = {0.0: [], 1.0: []}
    for seed in range(args.seeds):
        emb, labels = clustered_embeddings(args.vectors, args.dim, args.clusters,
                                           spread=args.spread, seed=seed)
        prec.setdefault(("real", args.dim), []).append(precision_at_k(emb, labels, 10))
        if args.dim % 64 == 0:
            prec.setdefault(("naive", args.dim), []).append(
                precision_at_k(naive_binarize(emb), labels, 10))
        for n in bit_sizes:
            model, report = train(emb, TrainingConfig(seed=seed), n_bits=n)
            if seed == 0:
                curve = " ".join(f"{r:.4f}" for r in report.rec_losses)
                print(f"rec loss, {n} bits, seed 0: {curve}")
            codes = binarize_all(model, emb)
            prec.setdefault(("autoencoder", n), []).append(precision_at_k(codes, labels, 10))
            prec.setdefault(("lsh", n), []).append(
                precision_at_k(lsh_binarize(emb, n, seed=seed), labels, 10))
        for lam in corr:
            model, _ = train(emb, TrainingConfig(seed=seed, lambda_reg=lam), n_bits=bit_sizes[0])
            corr[lam].append(bit_correlation(binarize_all(model, emb).bits()))

    print(f"\nP@10 over {args.seeds} seeds")
    for (method, n), vals in prec.items():
        print(f"  {method:<12} {n:>4}  {np.mean(vals):.4f} +- {np.std(vals):.4f}")
    print(f"\nmean |bit correlation| at {bit_sizes[0]} bits")
    for lam, vals in corr.items():
        print(f"  lambda={lam:g}  {np.mean(vals):.4f}")


if __name__ == "__main__":
    main()

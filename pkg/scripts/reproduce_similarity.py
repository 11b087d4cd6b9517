"""Train 256-bit codes on GloVe 400k/300-d and score the five similarity sets.

Usage:
    python3 scripts/reproduce_table1.py GLOVE_TXT DATA_DIR [--bits 256] [--epochs 5]

DATA_DIR must contain MEN.txt, RW.txt, SimLex.txt, SimVerb.txt and WS353.txt
(``word1 word2 score`` per line). Expect several hours of CPU time.
"""

import argparse
import logging
from pathlib import Path

from binvec.autoencoder import TrainingConfig, binarize_all, train
from binvec.embeddings import clip_to_unit_range, load_text_embeddings
from binvec.evaluation import eval_similarity, fisher_average, load_similarity_dataset

# published GloVe "bin" scores at 256 bits
REFERENCE = {"MEN": 69.4, "RW": 40.7, "SimLex": 37.2, "SimVerb": 22.9, "WS353": 56.6}


def run(glove_path, data_dir, bits=256, epochs=5, seed=0):
    emb = clip_to_unit_range(load_text_embeddings(glove_path))
    model, _ = train(emb, TrainingConfig(epochs=epochs, seed=seed), n_bits=bits)
    codes = binarize_all(model, emb)
    scores, deltas = {}, {}
    for name in REFERENCE:
        ds = load_similarity_dataset(Path(data_dir) / f"{name}.txt", name=name, lowercase=True)
        scores[name] = eval_similarity(codes, ds).rho_x100
        deltas[name] = scores[name] - REFERENCE[name]
    return scores, deltas


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("glove")
    ap.add_argument("data_dir")
    ap.add_argument("--bits", type=int, default=256)
    ap.add_argument("--epochs", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")
    scores, deltas = run(args.glove, args.data_dir, args.bits, args.epochs, args.seed)
    print(f"{'dataset':<8} {'ours':>6} {'ref':>6} {'delta':>6}")
    for name, s in scores.items():
        print(f"{name:<8} {s:6.1f} {REFERENCE[name]:6.1f} {deltas[name]:+6.1f}")
    print(f"Fisher avg {100 * fisher_average([s / 100 for s in scores.values()]):.1f}")
    worst = max(abs(d) for d in deltas.values())
    print("within 3 points" if worst <= 3 else f"max deviation {worst:.1f} points")


if __name__ == "__main__":
    main()

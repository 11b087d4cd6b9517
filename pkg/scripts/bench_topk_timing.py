"""Top-K timing table on random data sized like a 400k x 300 vocabulary.

Runs single-threaded; only the binary/real ratio is meaningful across hosts.
"""

import argparse
import tempfile
from pathlib import Path

from binvec.baselines import lsh_binarize
from binvec.bitcode import serialize_hex
from binvec.embeddings import save_text_embeddings
from binvec.synthetic import random_embeddings
from binvec.topk import bench_topk


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--vocab", type=int, default=400_000)
    ap.add_argument("--dim", type=int, default=300)
    ap.add_argument("--bits", default="64,128,256,512")
    ap.add_argument("--reps", type=int, default=9)
    ap.add_argument("--with-load", action="store_true",
                    help="also time loading from disk (writes temporary files)")
    args = ap.parse_args()
    emb = random_embeddings(args.vocab, args.dim, seed=0)
    with tempfile.TemporaryDirectory() as tmp:
        vec_path = None
        if args.with_load:
            vec_path = Path(tmp) / "vectors.txt"
            save_text_embeddings(emb, vec_path)
        for n in (int(b) for b in args.bits.split(",")):
            be = lsh_binarize(emb, n, seed=0)
            codes_path = None
            if args.with_load:
                codes_path = Path(tmp) / f"codes{n}.hex"
                serialize_hex(be, codes_path)
            report = bench_topk(be, emb, reps=args.reps, codes_path=codes_path,
                                vectors_path=vec_path)
            print(report.to_text())
            print(f"top-10 speedup at {n} bits: {report.speedup(10):.1f}x\n")


if __name__ == "__main__":
    main()

"""``binvec`` command line: train, binarize, reconstruct, eval, query, bench, inspect.

Exit codes: 0 success, 1 usage error, 2 data error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import logging
import re
import sys
from pathlib import Path

import numpy as np

from . import autoencoder as ae
from .baselines import lsh_binarize, naive_binarize
from .bitcode import (ANALOGY_VARIANTS, BinaryEmbedding, BitCode, deserialize_hex,
                      serialize_hex)
from .embeddings import clip_to_unit_range, load_text_embeddings, save_text_embeddings
from .errors import BinvecError, ConfigurationError, DataError, LengthError
from .evaluation import (EvalReport, eval_analogy, eval_similarity,
                         load_analogy_dataset, load_similarity_dataset)
from .topk import bench_topk, topk_binary, topk_real

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_RUNTIME = 0, 1, 2, 3
ALLOWED_BITS = (64, 128, 256, 512)
_HEX = re.compile(r"[0-9a-fA-F]{16}")

log = logging.getLogger("binvec")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _int_list(text, name):
    try:
        values = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"{name}: expected comma-separated integers, got {text!r}") from None
    if not values or any(v < 1 for v in values):
        raise UsageError(f"{name}: values must be positive integers")
    return values


def _float_list(text, name):
    try:
        values = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"{name}: expected comma-separated numbers, got {text!r}") from None
    if not values or any(v < 0 for v in values):
        raise UsageError(f"{name}: values must be non-negative")
    return values


def _check_bits(bits):
    if bits not in ALLOWED_BITS:
        raise UsageError(f"--bits must be one of {', '.join(map(str, ALLOWED_BITS))}; got {bits}")


def _require(args, *names):
    for name in names:
        if getattr(args, name.replace("-", "_")) is None:
            raise UsageError(f"--{name} is required for this mode")


def _require_file(path):
    if not Path(path).is_file():
        raise DataError(f"{path}: no such file")


def is_hex_codes(path) -> bool:
    """True when the file looks like the hex code format rather than text vectors."""
    with open(path, encoding="utf-8") as f:
        header = f.readline().split()
        first = f.readline().split()
    if len(header) != 2 or not all(t.isdigit() for t in header):
        return False
    n_bits = int(header[1])
    if n_bits % 64 or n_bits == 0:
        return False
    if not first:
        return True
    blocks = first[1:]
    return len(blocks) == n_bits // 64 and all(_HEX.fullmatch(b) for b in blocks)


def load_vectors(path):
    _require_file(path)
    if is_hex_codes(path):
        return deserialize_hex(path)
    return load_text_embeddings(path)


# -- subcommands ------------------------------------------------------------

def cmd_train(args, out):
    _check_bits(args.bits)
    lambdas = _float_list(args.lambda_reg, "--lambda-reg")
    configs = [ae.TrainingConfig(batch_size=args.batch_size, epochs=args.epochs,
                                 learning_rate=args.lr, momentum=args.momentum,
                                 lambda_reg=lam, seed=args.seed) for lam in lambdas]
    _require_file(args.input)
    emb = clip_to_unit_range(load_text_embeddings(args.input))

    best = None
    for cfg in configs:
        print(f"training {args.bits}-bit codes on {len(emb)} x {emb.m} "
              f"(lambda_reg={cfg.lambda_reg:g}, seed={cfg.seed})", file=out)
        model, report = ae.train(emb, cfg, n_bits=args.bits)
        for e in report.epochs:
            print(f"epoch {e.epoch:3d}  rec={e.rec_loss:.6f}  reg={e.reg_loss:.6f}  "
                  f"objective={e.objective:.6f}  time={e.seconds:.2f}s", file=out)
        last = report.epochs[-1]
        # unweighted rec + reg is comparable across lambda values
        score = last.rec_loss + last.reg_loss
        if best is None or score < best[0]:
            best = (score, cfg.lambda_reg, model)
    if len(configs) > 1:
        print(f"selected lambda_reg={best[1]:g} (final rec + reg = {best[0]:.6f})", file=out)
    model = best[2]
    if args.model_out:
        ae.save_model(model, args.model_out)
    if args.codes_out:
        serialize_hex(ae.binarize_all(model, emb), args.codes_out)
    return EXIT_OK


def cmd_binarize(args, out):
    if args.method == "autoencoder":
        _require(args, "model")
    elif args.method == "lsh":
        _require(args, "bits")
        _check_bits(args.bits)
    _require_file(args.input)
    emb = load_text_embeddings(args.input)
    if args.method == "autoencoder":
        _require_file(args.model)
        model = ae.load_model(args.model)
        be = ae.binarize_all(model, clip_to_unit_range(emb))
    elif args.method == "naive":
        be = naive_binarize(emb)
    else:
        be = lsh_binarize(emb, args.bits, args.seed)
    serialize_hex(be, args.output)
    print(f"wrote {len(be)} {be.n_bits}-bit codes to {args.output}", file=out)
    return EXIT_OK


def cmd_reconstruct(args, out):
    _require_file(args.model)
    _require_file(args.codes)
    model = ae.load_model(args.model)
    be = deserialize_hex(args.codes)
    if be.n_bits != model.n:
        raise LengthError(f"model decodes {model.n}-bit codes but {args.codes} holds "
                          f"{be.n_bits}-bit codes")
    rec = ae.reconstruct_all(model, be)
    save_text_embeddings(rec, args.output)
    print(f"wrote {len(rec)} reconstructed {rec.m}-d vectors to {args.output}", file=out)
    return EXIT_OK


def cmd_eval(args, out):
    for path in list(args.vectors) + list(args.data):
        _require_file(path)
    loaded = [(path, load_vectors(path)) for path in args.vectors]
    sizes = {v.n_bits for _, v in loaded if isinstance(v, BinaryEmbedding)}
    if len(sizes) > 1:
        raise DataError(f"code files mix sizes {sorted(sizes)}; evaluate one size at a time")
    if args.task == "similarity":
        datasets = [load_similarity_dataset(p, lowercase=args.lowercase) for p in args.data]
    else:
        datasets = [load_analogy_dataset(p, lowercase=args.lowercase) for p in args.data]

    for i, (path, vectors) in enumerate(loaded):
        report = EvalReport()
        for ds in datasets:
            if args.task == "similarity":
                report.similarity.append(eval_similarity(vectors, ds))
            else:
                report.analogy.append(eval_analogy(vectors, ds, args.analogy_variant))
        kind = (f"{vectors.n_bits}-bit codes, Sokal & Michener"
                if isinstance(vectors, BinaryEmbedding) else f"{vectors.m}-d vectors, cosine")
        if i:
            print(file=out)
        if args.format in ("text", "both"):
            print(f"# {path} ({kind})", file=out)
            out.write(report.to_text())
        if args.format in ("records", "both"):
            for line in report.to_records().splitlines():
                print(f"vectors={path} {line}", file=out)
    return EXIT_OK


def _parse_query_hex(text, n_bits):
    tokens = text.replace(",", " ").split()
    if len(tokens) == 1 and len(tokens[0]) > 16 and len(tokens[0]) % 16 == 0:
        tokens = [tokens[0][i:i + 16] for i in range(0, len(tokens[0]), 16)]
    if not all(_HEX.fullmatch(t) for t in tokens):
        raise UsageError("--query-hex must be 16-digit hex blocks, block 0 first")
    code = BitCode([int(t, 16) for t in tokens])
    if code.n_bits != n_bits:
        raise DataError(f"query has {code.n_bits} bits, codes have {n_bits}")
    return code


def cmd_query(args, out):
    if (args.codes is None) == (args.vectors is None):
        raise UsageError("give exactly one of --codes or --vectors")
    if (args.word is None) == (args.query_hex is None):
        raise UsageError("give exactly one of --word or --query-hex")
    if args.k < 1:
        raise UsageError("-k must be positive")
    if args.vectors is not None and args.query_hex is not None:
        raise UsageError("--query-hex only applies to --codes")
    if args.codes is not None:
        _require_file(args.codes)
        be = deserialize_hex(args.codes)
        if args.word is not None:
            if args.word not in be:
                raise DataError(f"unknown word {args.word!r}")
            query = be.get(args.word)
        else:
            query = _parse_query_hex(args.query_hex, be.n_bits)
        result = topk_binary(be, query, args.k)
    else:
        _require_file(args.vectors)
        emb = load_text_embeddings(args.vectors)
        if args.word not in emb:
            raise DataError(f"unknown word {args.word!r}")
        result = topk_real(emb, emb.get(args.word), args.k)
    out.write(result.to_text())
    return EXIT_OK


def cmd_bench(args, out):
    ks = _int_list(args.ks, "--ks")
    if args.reps < 5:
        raise UsageError("--reps must be at least 5")
    _require_file(args.codes)
    _require_file(args.vectors)
    be = deserialize_hex(args.codes)
    emb = load_text_embeddings(args.vectors)
    report = bench_topk(be, emb, ks, args.reps, query_word=args.query_word,
                        codes_path=None if args.no_load else args.codes,
                        vectors_path=None if args.no_load else args.vectors,
                        load_reps=max(5, args.load_reps))
    if args.format in ("text", "both"):
        out.write(report.to_text())
    if args.format in ("records", "both"):
        out.write(report.to_records())
    return EXIT_OK


def cmd_inspect(args, out):
    if args.neighbors < 0:
        raise UsageError("--neighbors must be non-negative")
    _require_file(args.codes)
    be = deserialize_hex(args.codes)
    if args.word not in be:
        raise DataError(f"unknown word {args.word!r}")
    query = be.get(args.word)
    result = topk_binary(be, query, args.neighbors + 1)
    rows = [(args.word, query, 1.0)]
    rows += [(w, be.get(w), s) for w, s in result.entries if w != args.word][:args.neighbors]
    width = max(len(w) for w, _, _ in rows)
    for word, code, score in rows:
        print(f"{word:<{width}}  {code.pattern()}  {score:.4f}", file=out)
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def build_parser():
    p = _Parser(prog="binvec", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("train", help="train the autoencoder and write model + codes")
    t.add_argument("--input", required=True)
    t.add_argument("--bits", type=int, default=256)
    t.add_argument("--epochs", type=int, default=10)
    t.add_argument("--batch-size", type=int, default=75)
    t.add_argument("--lr", type=float, default=0.001)
    t.add_argument("--momentum", type=float, default=0.95)
    t.add_argument("--lambda-reg", default="1",
                   help="a value, or comma-separated values to grid search (e.g. 1,2,4)")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--model-out")
    t.add_argument("--codes-out")
    t.set_defaults(func=cmd_train)

    b = sub.add_parser("binarize", help="write hex codes with one of the binarizers")
    b.add_argument("--method", choices=("autoencoder", "naive", "lsh"), required=True)
    b.add_argument("--model")
    b.add_argument("--bits", type=int)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--input", required=True)
    b.add_argument("--output", required=True)
    b.set_defaults(func=cmd_binarize)

    r = sub.add_parser("reconstruct", help="decode hex codes back to real vectors")
    r.add_argument("--model", required=True)
    r.add_argument("--codes", required=True)
    r.add_argument("--output", required=True)
    r.set_defaults(func=cmd_reconstruct)

    e = sub.add_parser("eval", help="word similarity / analogy evaluation")
    e.add_argument("--vectors", nargs="+", required=True,
                   help="text embeddings or hex code files (detected automatically)")
    e.add_argument("--task", choices=("similarity", "analogy"), required=True)
    e.add_argument("--data", nargs="+", required=True)
    e.add_argument("--analogy-variant", choices=ANALOGY_VARIANTS, default="subfirst")
    e.add_argument("--lowercase", action="store_true")
    e.add_argument("--format", choices=("text", "records", "both"), default="text")
    e.set_defaults(func=cmd_eval)

    q = sub.add_parser("query", help="exact top-K neighbours of a word or code")
    q.add_argument("--codes")
    q.add_argument("--vectors")
    q.add_argument("--word")
    q.add_argument("--query-hex")
    q.add_argument("-k", type=int, default=10)
    q.set_defaults(func=cmd_query)

    bn = sub.add_parser("bench", help="time top-K scans on codes vs. real vectors")
    bn.add_argument("--codes", required=True)
    bn.add_argument("--vectors", required=True)
    bn.add_argument("--ks", default="1,10,50")
    bn.add_argument("--reps", type=int, default=9)
    bn.add_argument("--load-reps", type=int, default=5)
    bn.add_argument("--no-load", action="store_true", help="skip the load + query rows")
    bn.add_argument("--query-word")
    bn.add_argument("--format", choices=("text", "records", "both"), default="text")
    bn.set_defaults(func=cmd_bench)

    i = sub.add_parser("inspect", help="print a code and its neighbours as #/. rows")
    i.add_argument("--codes", required=True)
    i.add_argument("--word", required=True)
    i.add_argument("--neighbors", type=int, default=10)
    i.set_defaults(func=cmd_inspect)
    return p


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=err)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=err)
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=err)
        return EXIT_USAGE
    except ConfigurationError as exc:
        print(f"usage error: {exc}", file=err)
        return EXIT_USAGE
    except (DataError, UnicodeDecodeError) as exc:
        print(f"data error: {exc}", file=err)
        return EXIT_DATA
    except (BinvecError, OSError, FloatingPointError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

import numpy as np


def random_blocks(rng, n_bits, size=None):
    shape = (n_bits // 64,) if size is None else (size, n_bits // 64)
    return rng.integers(0, 2**64, size=shape, dtype=np.uint64)


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p

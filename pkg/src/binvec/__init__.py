"""Binary word embeddings: autoencoder binarization, bitwise similarity and top-K search."""

from .autoencoder import (AutoencoderModel, TrainingConfig, TrainingReport, batch_gradients,
                          binarize_all, decode, encode, init_model, load_model,
                          reconstruct_all, reconstruction_loss, regularization_loss,
                          save_model, train)
from .baselines import lsh_binarize, naive_binarize
from .bitcode import (BinaryEmbedding, BitCode, analogy_code, deserialize_hex, hamming,
                      serialize_hex, sokal_michener)
from .embeddings import (EmbeddingMatrix, clip_to_unit_range, load_text_embeddings,
                         save_text_embeddings)
from .evaluation import (AnalogyDataset, EvalReport, SimilarityDataset, eval_analogy,
                         eval_similarity, fisher_average, spearman)
from .topk import BenchReport, TopKResult, bench_topk, topk_binary, topk_real

__version__ = "0.1.0"

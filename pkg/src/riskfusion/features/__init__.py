"""TF-IDF, PCA, encoder embeddings, Word2Vec and hybrid fusion."""

from .encoders import ENCODER_DIM, MAX_ENCODER_TOKENS, CheckpointEncoder, StubEncoder, make_encoder
from .fusion import FeatureConfig, HybridFeaturizer, fuse, split_fused
from .pca import PCA, RankReductionWarning
from .tfidf import TfidfVectorizer, analyze
from .word2vec import Word2VecEmbedder

__all__ = [
    "ENCODER_DIM",
    "MAX_ENCODER_TOKENS",
    "PCA",
    "CheckpointEncoder",
    "FeatureConfig",
    "HybridFeaturizer",
    "RankReductionWarning",
    "StubEncoder",
    "TfidfVectorizer",
    "Word2VecEmbedder",
    "analyze",
    "fuse",
    "make_encoder",
    "split_fused",
]

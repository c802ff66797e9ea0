"""Cross-language textual similarity detection."""

from ._clsim import (
    METHODS,
    BilingualDictionary,
    ClsimError,
    Corpus,
    EmbeddingSpace,
    MissingResourceError,
    ParseError,
    PreconditionError,
    UnknownTagError,
    evaluate,
    load_corpus,
    load_dictionary,
    load_embeddings,
    load_pos_weights,
    run_evaluate,
    run_fuse,
    score,
    sweep_threshold,
    tune_pos_weights,
)

__all__ = [
    "METHODS",
    "BilingualDictionary",
    "ClsimError",
    "Corpus",
    "EmbeddingSpace",
    "MissingResourceError",
    "ParseError",
    "PreconditionError",
    "UnknownTagError",
    "evaluate",
    "load_corpus",
    "load_dictionary",
    "load_embeddings",
    "load_pos_weights",
    "run_evaluate",
    "run_fuse",
    "score",
    "sweep_threshold",
    "tune_pos_weights",
]

from .bpe import Tokenizer, TokenizerError, train_tokenizer
from .encoding import (
    SENTINEL,
    Batch,
    EncodingError,
    TokenizedExample,
    build_example,
    build_examples,
    insert_line_sentinels,
    pad_batch,
    split_line_sentinels,
)
from .sample import (
    DatasetError,
    DebugSample,
    dataset_stats,
    read_dataset,
    sample_from_record,
    sample_to_record,
    split_by_project,
    write_dataset,
)

__all__ = [
    "Batch",
    "DatasetError",
    "DebugSample",
    "EncodingError",
    "SENTINEL",
    "TokenizedExample",
    "Tokenizer",
    "TokenizerError",
    "build_example",
    "build_examples",
    "dataset_stats",
    "insert_line_sentinels",
    "pad_batch",
    "read_dataset",
    "sample_from_record",
    "sample_to_record",
    "split_by_project",
    "split_line_sentinels",
    "train_tokenizer",
    "write_dataset",
]

"""codemend: joint bug detection, line-level localization, and repair.

A numpy implementation of the full pipeline: mining bug-fix commits into a
function-level dataset, a trainable byte-level BPE tokenizer with line
sentinels, a shared encoder-decoder model with detection / localization /
repair heads trained under a joint loss, and the retrieval + generation
metrics used to evaluate each stage and the end-to-end flow.
"""

__version__ = "0.1.0"

from .patterns import PATTERNS, BugPattern, classify_pattern

__all__ = ["BugPattern", "PATTERNS", "classify_pattern", "__version__"]

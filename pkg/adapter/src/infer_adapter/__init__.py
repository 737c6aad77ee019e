"""Thin batch-inference bridge from NER models to prediction JSONL files.

No scoring or aggregation happens here; the evaluation harness owns the
metric. This package only turns a test file into a prediction file with the
same id sequence.
"""

__version__ = "0.1.0"

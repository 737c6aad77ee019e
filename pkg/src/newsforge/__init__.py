"""newsforge: diversity-enforced synthetic NER dataset pipeline and
exact-match span micro-F1 evaluation harness."""

__version__ = "0.1.0"

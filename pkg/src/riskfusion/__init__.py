"""Suicide-risk severity classification with hybrid encoder + TF-IDF/PCA features."""

__version__ = "0.1.0"

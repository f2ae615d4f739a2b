"""Modular pattern recognition for audio samples and text.

The audio side runs load -> preprocess -> extract -> classify, with
training clusters and classification statistics persisted between runs.
The text side covers character n-gram language identification, Zipf
rank/frequency analysis and probabilistic CYK parsing.
"""

__version__ = "0.1.0"

"""Materializes the neutral embedding cache files for the SDG tagger.

Reads the digest manifest produced by the classifier's build/preflight
commands, extracts the needed word-vector subset from a published embedding
dump, and encodes every required text with a sentence encoder, writing the
word-table and sentence-cache formats the classifier loads. This package
never imports the classifier; the two sides meet only at the file formats.
"""

__version__ = "0.1.0"

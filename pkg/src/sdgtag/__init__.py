"""Training-free multi-label SDG tagging of text paragraphs.

Combines a domain-specific TF-IDF similarity, built once from the 17 SDG
definitions, with pre-computed generic embedding similarities, and turns the
ensemble score into ranked goal labels. Ships an evaluation harness and an
Akoma Ntoso metadata emitter.
"""

__version__ = "0.1.0"

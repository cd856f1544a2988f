"""WILEE: an automated threat-hunting pipeline.

Abstract threat descriptions written in a small Pythonic DSL are
concretized against a store of TTP implementations, compiled into
backend-agnostic hunt queries, matched against event logs, and reported.
Two generators feed the TTP store: an NLP pipeline that drafts DSL from
technique descriptions, and a grammar-guided genetic engine that
perturbs existing implementations and their indicators.
"""

__version__ = "0.1.0"

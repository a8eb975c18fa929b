"""Consistency testing for code LLMs via semantic-preserving mutation.

The toolkit mutates benchmark coding tasks into behavior-equivalent
variants, queries a model on both versions, and classifies divergent
answers with a metamorphic oracle.
"""

__version__ = "0.1.0"

from .app import create_app, SCHEMA_VERSION
from .assignment import AssignmentManager, CorpusExhausted, make_attention_check

__all__ = [
    "create_app",
    "SCHEMA_VERSION",
    "AssignmentManager",
    "CorpusExhausted",
    "make_attention_check",
]

"""Toolkit for studying perceived suspect guilt in local crime reporting.

Pipeline stages: corpus curation -> annotation collection -> agreement
statistics -> jointly supervised rating/rationale models -> evaluation ->
gradient-based attribution.
"""

__version__ = "0.1.0"

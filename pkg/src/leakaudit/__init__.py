"""Leakage auditing for fact-checking corpora.

The package ingests claim/evidence datasets, flags evidence snippets that
give the verdict away (fact-checker URLs, tell-tale phrases), reports
corpus-level leakage and verdict-distribution statistics, and trains a
small hashed n-gram probe to measure how much a verdict classifier leans
on the leaked snippets.
"""

__version__ = "0.1.0"

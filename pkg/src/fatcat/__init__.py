"""fatcat: exact combinatorial models for comparing fat realizations,
unraveled classifying spaces and groupoid cocycles.

Everything is finite and exact: categories come with total composition
tables, simplicial sets are truncated at an explicit degree, homology is
integral via Smith normal form, and every verification returns either an
empty report or a list of named witnesses.
"""

from .errors import EnumerationLimitError, StructureError, Violation

__all__ = ["EnumerationLimitError", "StructureError", "Violation"]

__version__ = "0.1.0"

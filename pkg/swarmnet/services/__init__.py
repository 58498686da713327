"""Service layer package.

One module per domain area; commands call into these and never the other way round.
"""

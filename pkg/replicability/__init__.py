"""Selection-adjusted replicability analysis for original/replication study pairs."""

__version__ = "0.1.0"

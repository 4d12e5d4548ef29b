"""Study table ingestion."""

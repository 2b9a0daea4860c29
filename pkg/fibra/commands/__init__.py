"""Click commands for the fibra CLI."""

"""Task-graph models of interdependent work, with a coordination-index analysis pipeline."""

__version__ = "0.1.0"

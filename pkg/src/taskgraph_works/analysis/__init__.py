"""Coordination-index pipeline over occupational activity and wage tables."""

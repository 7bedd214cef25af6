"""Unit tests for the page replacement simulator."""

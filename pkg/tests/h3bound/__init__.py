"""Tests for the h3bound package."""

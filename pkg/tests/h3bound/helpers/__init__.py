"""Tests for the h3bound helpers."""

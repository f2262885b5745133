"""Command-line workbench for the h3bound library."""

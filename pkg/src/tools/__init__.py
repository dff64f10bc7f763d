"""Scenarios, benchmarks, console reports and the command line."""

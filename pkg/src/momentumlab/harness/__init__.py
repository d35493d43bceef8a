"""Experiment harness: configs, dataset IO, runners, reports, CLI."""

"""Tests for relu_sgd_lab."""

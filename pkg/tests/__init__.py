"""Tests for the cloud component."""

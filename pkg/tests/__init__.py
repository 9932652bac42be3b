"""Tests for so3-consensus."""

"""Test package for drsolve."""

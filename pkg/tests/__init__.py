"""Test suite for the underlay simulator."""

"""C runtime-support templates shipped as package data."""

"""Covert communication metrics under warden noise-power uncertainty."""

__version__ = "0.1.0"

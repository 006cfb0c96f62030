"""Two-tier macro/femto downlink simulator with dynamic frequency reuse."""

__version__ = "0.1.0"

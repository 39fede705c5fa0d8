"""Next-day geomagnetic storm forecasting from SDO solar images."""

__version__ = "0.1.0"

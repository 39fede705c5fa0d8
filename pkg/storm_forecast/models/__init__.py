from .storm import StormClass, STORM_KP_THRESHOLD

__all__ = ["StormClass", "STORM_KP_THRESHOLD"]

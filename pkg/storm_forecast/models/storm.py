from enum import Enum

# Kp at or above this value is a geomagnetic storm (NOAA G1 and up).
STORM_KP_THRESHOLD = 5.0


class StormClass(str, Enum):
    """Binary storm label. STORM is the positive class everywhere."""

    STORM = "storm"
    NO_STORM = "no_storm"

    @property
    def is_storm(self) -> bool:
        return self is StormClass.STORM

    def as_sign(self) -> int:
        """+1 / -1 encoding used by the SVM solver."""
        return 1 if self is StormClass.STORM else -1

    def as_int(self) -> int:
        return 1 if self is StormClass.STORM else 0

    @classmethod
    def from_int(cls, value: int) -> "StormClass":
        return cls.STORM if int(value) == 1 else cls.NO_STORM

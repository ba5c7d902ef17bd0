from enum import Enum

from pydantic import BaseModel, ConfigDict, Field

FIXED16_MIN = -(1 << 15)
FIXED16_MAX = (1 << 15) - 1
ACC48_MIN = -(1 << 47)
ACC48_MAX = (1 << 47) - 1


class Rounding(str, Enum):
    TRUNCATE = "truncate"
    ROUND_HALF_UP = "round-half-up"


class Fixed16(BaseModel):
    """16-bit two's-complement datapath operand (raw integer)."""
    model_config = ConfigDict(frozen=True)

    raw: int = Field(ge=FIXED16_MIN, le=FIXED16_MAX)


class Acc48(BaseModel):
    """48-bit accumulator; overflow records whether the producing op saturated."""
    model_config = ConfigDict(frozen=True)

    raw: int = Field(default=0, ge=ACC48_MIN, le=ACC48_MAX)
    overflow: bool = False


class ScaleSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    right_shift: int = Field(default=0, ge=0, le=47)
    rounding: Rounding = Rounding.TRUNCATE
    saturate: bool = True

from enum import Enum, IntEnum
from typing import Dict

from pydantic import BaseModel, ConfigDict

STATUS_IDLE = 0x00000001
STATUS_DONE = 0x00000002
STATUS_BUSY = 0x00000004
STATUS_ERROR = 0x80000000

CONTROL_OPCODE_MASK = 0x0000000F
CONTROL_START = 0x00000010

REGISTER_WINDOW = 0x100


class EngineState(Enum):
    IDLE = STATUS_IDLE
    BUSY = STATUS_BUSY
    DONE = STATUS_DONE


class Opcode(IntEnum):
    GEMM = 0x1
    CONV = 0x2
    POOL = 0x3
    RELU = 0x4
    LOAD = 0x5
    STORE = 0x6


class RegisterOffset(IntEnum):
    STATUS = 0x00
    CONTROL = 0x04
    M = 0x08
    N = 0x0C
    K = 0x10
    SRC_A = 0x14
    SRC_B = 0x18
    DST = 0x1C
    SCALE = 0x20
    PARAM0 = 0x24
    PARAM1 = 0x28
    PARAM2 = 0x2C
    PARAM3 = 0x30
    PARAM4 = 0x34
    PARAM5 = 0x38
    PARAM6 = 0x3C
    CYCLE_COUNT = 0x40


PARAMETER_OFFSETS = tuple(offset for offset in RegisterOffset if RegisterOffset.M <= offset <= RegisterOffset.PARAM6)

# Parameter registers come out of reset describing a 16x16x16 GEMM over the scratchpad
PARAMETER_RESET_VALUES = {
    RegisterOffset.M: 16,
    RegisterOffset.N: 16,
    RegisterOffset.K: 16,
    RegisterOffset.SRC_A: 0x000,
    RegisterOffset.SRC_B: 0x200,
    RegisterOffset.DST: 0x400,
}

# SCALE register: bits[5:0] right shift, bit 8 round-half-up
SCALE_SHIFT_MASK = 0x3F
SCALE_ROUND_BIT = 0x100


class RegisterSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    offset: int
    name: str
    access: str
    reset: int
    description: str


class RegisterSnapshot(BaseModel):
    model_config = ConfigDict(frozen=True)

    state: EngineState
    status: int
    control: int
    latched_opcode: int
    cycle_count: int
    parameters: Dict[int, int]

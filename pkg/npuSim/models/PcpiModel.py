from enum import IntEnum

from pydantic import BaseModel, ConfigDict, Field, model_validator

CUSTOM0_OPCODE = 0x0B


class PcpiFunction(IntEnum):
    START_OP = 0
    QUERY_STATUS = 1


class PcpiRequest(BaseModel):
    model_config = ConfigDict(frozen=True)

    insn: int = Field(ge=0, le=0xFFFFFFFF)
    rs1: int = Field(default=0, ge=0, le=0xFFFFFFFF)
    rs2: int = Field(default=0, ge=0, le=0xFFFFFFFF)


class PcpiResponse(BaseModel):
    model_config = ConfigDict(frozen=True)

    ready: bool = False
    wr: bool = False
    rd: int = Field(default=0, ge=0, le=0xFFFFFFFF)

    @model_validator(mode="after")
    def check_rd(self):
        if self.rd and not (self.ready and self.wr):
            raise ValueError("rd is only valid with ready and wr asserted")
        return self


class DecodedInstruction(BaseModel):
    model_config = ConfigDict(frozen=True)

    opcode: int
    rd: int
    funct3: int
    rs1: int
    rs2: int
    funct7: int

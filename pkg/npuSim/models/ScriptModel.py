from typing import List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

ADDR = Field(ge=0, le=0xFFFFFFFF)


class WriteCommand(BaseModel):
    model_config = ConfigDict(frozen=True)
    op: Literal["write"] = "write"
    addr: int = ADDR
    word: int = ADDR


class ReadCommand(BaseModel):
    model_config = ConfigDict(frozen=True)
    op: Literal["read"] = "read"
    addr: int = ADDR
    expect: Optional[int] = None


class PollCommand(BaseModel):
    model_config = ConfigDict(frozen=True)
    op: Literal["poll"] = "poll"
    addr: int = ADDR
    mask: int = ADDR
    value: int = ADDR
    timeout: int = Field(gt=0)


class StepCommand(BaseModel):
    model_config = ConfigDict(frozen=True)
    op: Literal["step"] = "step"
    cycles: int = Field(ge=0)


class LoadImageCommand(BaseModel):
    model_config = ConfigDict(frozen=True)
    op: Literal["load-image"] = "load-image"
    path: str
    base: int = ADDR


class DumpImageCommand(BaseModel):
    model_config = ConfigDict(frozen=True)
    op: Literal["dump-image"] = "dump-image"
    path: str
    base: int = ADDR
    length: int = Field(ge=0)


class PcpiIssueCommand(BaseModel):
    """opcode is an engine opcode name, or STATUS for the status query."""
    model_config = ConfigDict(frozen=True)
    op: Literal["pcpi-issue"] = "pcpi-issue"
    opcode: str
    rs1: int = ADDR


class PcpiPollCommand(BaseModel):
    model_config = ConfigDict(frozen=True)
    op: Literal["pcpi-poll"] = "pcpi-poll"
    timeout: int = Field(gt=0)


class DescriptorSpec(BaseModel):
    model_config = ConfigDict(frozen=True)
    src_addr: int = ADDR
    dst_addr: int = ADDR
    length: int = Field(gt=0)
    stride: int = Field(default=0, ge=0)


class DmaCommand(BaseModel):
    model_config = ConfigDict(frozen=True)
    op: Literal["dma"] = "dma"
    chain: List[DescriptorSpec]


class DmaWaitCommand(BaseModel):
    model_config = ConfigDict(frozen=True)
    op: Literal["dma-wait"] = "dma-wait"
    timeout: int = Field(gt=0)


ScriptCommand = Union[
    WriteCommand, ReadCommand, PollCommand, StepCommand, LoadImageCommand, DumpImageCommand,
    PcpiIssueCommand, PcpiPollCommand, DmaCommand, DmaWaitCommand,
]


class ScriptLine(BaseModel):
    model_config = ConfigDict(frozen=True)
    line: int
    command: ScriptCommand = Field(discriminator="op")


class ScriptRunResult(BaseModel):
    exit_status: int
    log_lines: List[str]
    expect_mismatches: int = 0
    poll_timeouts: int = 0
    failed_polls: int = 0
    faults: int = 0
    cycles: int = 0

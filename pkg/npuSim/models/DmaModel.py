from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field


class DmaDescriptor(BaseModel):
    """Scatter-gather record; stride advances the source after each burst (0 = contiguous)."""

    src_addr: int = Field(ge=0, le=0xFFFFFFFF)
    dst_addr: int = Field(ge=0, le=0xFFFFFFFF)
    length: int = Field(gt=0)
    stride: int = Field(default=0, ge=0)
    next: Optional["DmaDescriptor"] = None

    def chain(self):
        """Descriptors in link order; only call on chains already checked for loops."""
        node = self
        while node is not None:
            yield node
            node = node.next


DmaDescriptor.model_rebuild()


class Burst(BaseModel):
    model_config = ConfigDict(frozen=True)

    src_addr: int
    dst_addr: int
    length: int


class TransferStatus(str, Enum):
    IN_FLIGHT = "in-flight"
    DONE = "done"
    FAILED = "failed"


class DmaTicket(BaseModel):
    """Observable snapshot of one submitted chain."""
    model_config = ConfigDict(frozen=True)

    ticket: int
    status: TransferStatus
    bursts_total: int
    bursts_done: int
    bytes_moved: int
    submitted_cycle: int
    finished_cycle: Optional[int] = None
    error: Optional[str] = None


class DmaProgress(BaseModel):
    """What one dma_step did."""
    model_config = ConfigDict(frozen=True)

    cycle: int
    moved: Optional[Burst] = None
    ticket: Optional[int] = None
    stalled: bool = False
    denied: bool = False
    completed: List[int] = []
    failed: List[int] = []
    in_flight: int = 0

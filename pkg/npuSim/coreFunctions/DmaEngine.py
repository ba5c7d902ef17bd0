"""
    Purpose:
    Scatter-gather DMA between main memory and the scratchpad.

    Description:
    - submit() checks the chain for loops, the queue for capacity and (given a bus) every
      burst range against the memory map, then enqueues the bursts of the chain as one
      transfer and returns a ticket.
    - segment() splits a descriptor into bursts of at most dma_burst_size bytes; the
      source advances by stride after each burst, the destination stays packed.
    - dma_step() is one clock: at most one burst moves (round-robin over in-flight
      transfers). A backpressure stall or a lost arbitration retries the same burst
      on the next cycle. A bus fault fails the transfer and frees its slot.
    - Finished transfers stay queryable until collect() hands them out; at most
      FINISHED_HISTORY uncollected results are kept, oldest dropped first.
    - BackpressureSchedule gives reproducible stall patterns (none, periodic, seeded random).

    Created Date: 2026-10-19
    Version: V1
"""

# region Imports
import numpy as np

from npuSim.models.DmaModel import Burst, DmaDescriptor, DmaProgress, DmaTicket, TransferStatus
from npuSim.models.MemoryModel import BusMaster, BusTransaction, TransactionKind
from utils.customerExceptions.cust_exceptions import CyclicChain, QueueFull, SimulationFault
from utils.logger.loggers import get_logger
# endregion

# region Logger
logger_NPU1S01 = get_logger('NPU1S01')
# endregion

DEFAULT_QUEUE_DEPTH = 8
DEFAULT_BURST_SIZE = 64
FINISHED_HISTORY = 256


# region Backpressure
class BackpressureSchedule:
    """
    Deterministic stall pattern indexed by cycle number (cycles start at 1).

    Args:
        period (int): stall every period-th cycle (0 disables periodic stalls).
        probability (float): chance of a stall per cycle for the seeded random pattern.
        seed (int): seed for the random pattern.
    """

    CHUNK = 1024

    def __init__(self, period=0, probability=0.0, seed=0):
        self.period = period
        self.probability = probability
        self.seed = seed
        self._rng = np.random.default_rng(seed)
        self._random_stalls = np.zeros(0, dtype=bool)

    @classmethod
    def none(cls):
        return cls()

    @classmethod
    def every(cls, period):
        return cls(period=period)

    @classmethod
    def random(cls, probability, seed=0):
        return cls(probability=probability, seed=seed)

    def stalled(self, cycle):
        if self.period and cycle % self.period == 0:
            return True
        if self.probability <= 0.0:
            return False
        while cycle >= self._random_stalls.size:
            self._random_stalls = np.concatenate([self._random_stalls, self._rng.random(self.CHUNK) < self.probability])
        return bool(self._random_stalls[cycle])

    def max_stall_run(self, horizon):
        """Longest run of consecutive stalled cycles within cycles 1..horizon."""
        longest = run = 0
        for cycle in range(1, horizon + 1):
            run = run + 1 if self.stalled(cycle) else 0
            longest = max(longest, run)
        return longest
# endregion


# region Segmentation
def check_acyclic(chain: DmaDescriptor):
    seen = set()
    node = chain
    while node is not None:
        if id(node) in seen:
            raise CyclicChain()
        seen.add(id(node))
        node = node.next


def segment(d: DmaDescriptor, burst_size=DEFAULT_BURST_SIZE):
    bursts = []
    moved = 0
    src = d.src_addr
    while moved < d.length:
        length = min(burst_size, d.length - moved)
        bursts.append(Burst(src_addr=src, dst_addr=d.dst_addr + moved, length=length))
        src += d.stride if d.stride else length
        moved += length
    return bursts
# endregion


# region DMA Engine
class _Transfer:
    def __init__(self, ticket, bursts, cycle):
        self.ticket = ticket
        self.bursts = bursts
        self.next_burst = 0
        self.bytes_moved = 0
        self.status = TransferStatus.IN_FLIGHT
        self.submitted_cycle = cycle
        self.finished_cycle = None
        self.error = None

    def snapshot(self):
        return DmaTicket(ticket=self.ticket, status=self.status, bursts_total=len(self.bursts),
                         bursts_done=self.next_burst, bytes_moved=self.bytes_moved,
                         submitted_cycle=self.submitted_cycle, finished_cycle=self.finished_cycle,
                         error=self.error)


class DmaEngine:
    def __init__(self, burst_size=DEFAULT_BURST_SIZE, queue_depth=DEFAULT_QUEUE_DEPTH, backpressure=None):
        self.burst_size = burst_size
        self.queue_depth = queue_depth
        self.backpressure = backpressure or BackpressureSchedule.none()
        self.reset()

    def reset(self):
        self.cycle = 0
        self.in_flight = []
        self.finished = {}
        self.bytes_moved = 0
        self.stall_cycles = 0
        self._next_ticket = 1
        self._rr = 0

    @property
    def busy(self):
        return bool(self.in_flight)

    def submit(self, chain: DmaDescriptor, bus=None) -> int:
        """
        Enqueue a descriptor chain.

        Raises:
            CyclicChain: the chain links back to one of its descriptors.
            QueueFull: queue_depth transfers are already in flight.
            BusFault: a burst source or destination range is unmapped, leaves its region or
                targets a device (when bus is given). Nothing is queued.
        """
        check_acyclic(chain)
        if len(self.in_flight) >= self.queue_depth:
            raise QueueFull(f"DMA queue full ({self.queue_depth} transfers outstanding)")

        bursts = [burst for d in chain.chain() for burst in segment(d, self.burst_size)]
        if bus is not None:
            for burst in bursts:
                bus.check_block(burst.src_addr, burst.length, BusMaster.DMA)
                bus.check_block(burst.dst_addr, burst.length, BusMaster.DMA)
        ticket = self._next_ticket
        self._next_ticket += 1
        self.in_flight.append(_Transfer(ticket, bursts, self.cycle))
        logger_NPU1S01.debug(f"DMA ticket {ticket}: {len(bursts)} bursts queued")
        return ticket

    def status(self, ticket) -> DmaTicket:
        for transfer in self.in_flight:
            if transfer.ticket == ticket:
                return transfer.snapshot()
        return self.finished[ticket].snapshot()

    def collect(self, ticket) -> DmaTicket:
        """Final state of a finished transfer, forgotten afterwards. KeyError when not finished."""
        return self.finished.pop(ticket).snapshot()

    def wants_bus(self):
        """True when the next dma_step would present a burst to the arbiter."""
        return self.busy and not self.backpressure.stalled(self.cycle + 1)

    def bus_request(self):
        transfer = self.in_flight[self._rr % len(self.in_flight)]
        burst = transfer.bursts[transfer.next_burst]
        return BusTransaction(addr=burst.dst_addr, kind=TransactionKind.WRITE32, master=BusMaster.DMA)

    def _finish(self, transfer, status, error=None):
        transfer.status = status
        transfer.error = error
        transfer.finished_cycle = self.cycle
        self.in_flight.remove(transfer)
        self.finished[transfer.ticket] = transfer
        while len(self.finished) > FINISHED_HISTORY:
            del self.finished[next(iter(self.finished))]

    def dma_step(self, bus, granted=True) -> DmaProgress:
        self.cycle += 1
        if not self.in_flight:
            return DmaProgress(cycle=self.cycle)

        if self.backpressure.stalled(self.cycle):
            self.stall_cycles += 1
            return DmaProgress(cycle=self.cycle, stalled=True, in_flight=len(self.in_flight))
        if not granted:
            return DmaProgress(cycle=self.cycle, denied=True, in_flight=len(self.in_flight))

        self._rr %= len(self.in_flight)
        transfer = self.in_flight[self._rr]
        burst = transfer.bursts[transfer.next_burst]
        completed, failed = [], []

        try:
            bus.write_block(burst.dst_addr, bus.read_block(burst.src_addr, burst.length, BusMaster.DMA), BusMaster.DMA)
        except SimulationFault as fault:
            logger_NPU1S01.error(f"DMA ticket {transfer.ticket} failed: {fault}")
            self._finish(transfer, TransferStatus.FAILED, str(fault))
            failed.append(transfer.ticket)
            return DmaProgress(cycle=self.cycle, ticket=transfer.ticket, failed=failed, in_flight=len(self.in_flight))

        transfer.next_burst += 1
        transfer.bytes_moved += burst.length
        self.bytes_moved += burst.length

        if transfer.next_burst == len(transfer.bursts):
            self._finish(transfer, TransferStatus.DONE)
            completed.append(transfer.ticket)
            logger_NPU1S01.debug(f"DMA ticket {transfer.ticket} done at cycle {self.cycle}")
        else:
            self._rr += 1

        return DmaProgress(cycle=self.cycle, moved=burst, ticket=transfer.ticket, completed=completed,
                           failed=failed, in_flight=len(self.in_flight))

    def run_to_completion(self, bus, max_cycles=1_000_000):
        """Step until the queue drains; returns the number of cycles taken."""
        start = self.cycle
        while self.in_flight:
            if self.cycle - start >= max_cycles:
                raise RuntimeError(f"DMA did not drain within {max_cycles} cycles")
            self.dma_step(bus)
        return self.cycle - start
# endregion

import numpy as np
import pytest

from npuSim.coreFunctions.DmaEngine import FINISHED_HISTORY, BackpressureSchedule, DmaEngine, segment
from npuSim.coreFunctions.MemorySystem import MemorySystem
from npuSim.models.DmaModel import DmaDescriptor, TransferStatus
from utils.customerExceptions.cust_exceptions import BusFault, CyclicChain, QueueFull

SCRATCHPAD_BASE = 0x10001000
BURST = 64


@pytest.fixture
def memory():
    return MemorySystem()


def chain_of(*descriptors):
    head = None
    for d in reversed(descriptors):
        head = DmaDescriptor(**d, next=head)
    return head


@pytest.mark.parametrize("length", range(1, 513))
def test_burst_count_law(length):
    d = DmaDescriptor(src_addr=0, dst_addr=SCRATCHPAD_BASE, length=length)
    bursts = segment(d, BURST)
    assert len(bursts) == -(-length // BURST)
    assert sum(b.length for b in bursts) == length


def test_stride_advances_source_only():
    d = DmaDescriptor(src_addr=0x100, dst_addr=SCRATCHPAD_BASE, length=150, stride=0x200)
    assert [(b.src_addr, b.dst_addr, b.length) for b in segment(d, BURST)] == [
        (0x100, SCRATCHPAD_BASE, 64), (0x300, SCRATCHPAD_BASE + 64, 64), (0x500, SCRATCHPAD_BASE + 128, 22)]


def expected_copy(ram, d):
    """Destination bytes of one descriptor, computed burst by burst from a RAM snapshot."""
    out = bytearray()
    step = d.stride or BURST
    for j in range(-(-d.length // BURST)):
        length = min(BURST, d.length - j * BURST)
        out += ram[d.src_addr + j * step:d.src_addr + j * step + length]
    return bytes(out)


SCHEDULES = {
    "none": lambda seed: BackpressureSchedule.none(),
    "every-3": lambda seed: BackpressureSchedule.every(3),
    "random": lambda seed: BackpressureSchedule.random(0.3, seed=seed),
}


@pytest.mark.parametrize("schedule", sorted(SCHEDULES))
def test_random_chains_are_byte_exact(schedule):
    rng = np.random.default_rng(20)
    for trial in range(500):
        memory = MemorySystem()
        ram = rng.integers(0, 256, size=memory.ram.size, dtype=np.uint8).tobytes()
        memory.ram.write_bytes(0, ram)
        dma = DmaEngine(burst_size=BURST, queue_depth=8, backpressure=SCHEDULES[schedule](trial))

        dst_cursor, submitted = 0, []
        for _ in range(int(rng.integers(1, 9))):
            descriptors = []
            for _ in range(int(rng.integers(1, 4))):
                length = int(rng.integers(1, 200))
                stride = 0 if rng.integers(0, 2) else int(rng.integers(BURST, 2 * BURST + 1))
                span = (-(-length // BURST) - 1) * (stride or BURST) + BURST
                src = int(rng.integers(0, memory.ram.size - span))
                descriptors.append(dict(src_addr=src, dst_addr=SCRATCHPAD_BASE + dst_cursor, length=length,
                                        stride=stride))
                dst_cursor += (length + 3) & ~3
            chain = chain_of(*descriptors)
            submitted.append((dma.submit(chain, bus=memory), chain))

        while dma.busy:
            assert len(dma.in_flight) <= 8
            dma.dma_step(memory)

        for ticket, chain in submitted:
            assert dma.status(ticket).status == TransferStatus.DONE
            for d in chain.chain():
                got = memory.read_block(d.dst_addr, d.length)
                assert got == expected_copy(ram, d), (schedule, trial)


def test_queue_depth_is_enforced(memory):
    dma = DmaEngine()
    for _ in range(8):
        dma.submit(DmaDescriptor(src_addr=0, dst_addr=SCRATCHPAD_BASE, length=64), bus=memory)
    with pytest.raises(QueueFull):
        dma.submit(DmaDescriptor(src_addr=0, dst_addr=SCRATCHPAD_BASE, length=64), bus=memory)

    dma.dma_step(memory)
    dma.submit(DmaDescriptor(src_addr=0, dst_addr=SCRATCHPAD_BASE, length=64), bus=memory)


def test_cyclic_chain_is_rejected(memory):
    first = DmaDescriptor(src_addr=0, dst_addr=SCRATCHPAD_BASE, length=4)
    second = DmaDescriptor(src_addr=4, dst_addr=SCRATCHPAD_BASE + 4, length=4, next=first)
    first.next = second
    with pytest.raises(CyclicChain):
        DmaEngine().submit(first, bus=memory)


def test_unmapped_start_address_is_rejected(memory):
    with pytest.raises(BusFault):
        DmaEngine().submit(DmaDescriptor(src_addr=0x40000000, dst_addr=SCRATCHPAD_BASE, length=4), bus=memory)


def test_fault_mid_transfer_fails_the_ticket_and_frees_the_slot(memory):
    dma = DmaEngine()
    # unchecked submit; the second burst runs past the end of main RAM
    ticket = dma.submit(DmaDescriptor(src_addr=0x3FC0, dst_addr=SCRATCHPAD_BASE, length=128))
    dma.run_to_completion(memory)
    status = dma.status(ticket)
    assert status.status == TransferStatus.FAILED
    assert status.bytes_moved == 64
    assert not dma.busy
    assert memory.fault_log[-1].master.value == "Dma"


def test_backpressure_delays_but_loses_nothing(memory):
    memory.ram.write_bytes(0, bytes(range(256)))
    fast = DmaEngine()
    slow = DmaEngine(backpressure=BackpressureSchedule.every(2))
    fast.submit(DmaDescriptor(src_addr=0, dst_addr=SCRATCHPAD_BASE, length=256), bus=memory)
    slow.submit(DmaDescriptor(src_addr=0, dst_addr=SCRATCHPAD_BASE + 0x100, length=256), bus=memory)
    assert fast.run_to_completion(memory) == 4
    # stalls land on even cycles, so the last burst moves on cycle 7
    assert slow.run_to_completion(memory) == 7
    assert slow.stall_cycles == 3
    assert memory.read_block(SCRATCHPAD_BASE + 0x100, 256) == bytes(range(256))


def test_denied_grant_retries_the_same_burst(memory):
    dma = DmaEngine()
    dma.submit(DmaDescriptor(src_addr=0, dst_addr=SCRATCHPAD_BASE, length=64), bus=memory)
    assert dma.dma_step(memory, granted=False).denied
    progress = dma.dma_step(memory)
    assert progress.moved.src_addr == 0
    assert progress.completed == [1]


def test_round_robin_interleaves_transfers(memory):
    dma = DmaEngine()
    first = dma.submit(DmaDescriptor(src_addr=0, dst_addr=SCRATCHPAD_BASE, length=128), bus=memory)
    second = dma.submit(DmaDescriptor(src_addr=0x200, dst_addr=SCRATCHPAD_BASE + 0x200, length=128), bus=memory)
    order = [dma.dma_step(memory).ticket for _ in range(4)]
    assert order == [first, second, first, second]


def test_random_schedule_is_reproducible():
    a = BackpressureSchedule.random(0.5, seed=9)
    b = BackpressureSchedule.random(0.5, seed=9)
    assert [a.stalled(c) for c in range(1, 3000)] == [b.stalled(c) for c in range(1, 3000)]
    assert BackpressureSchedule.every(4).max_stall_run(100) == 1
    assert BackpressureSchedule.none().max_stall_run(100) == 0


@pytest.mark.parametrize("descriptor", [
    dict(src_addr=0x3FC0, dst_addr=SCRATCHPAD_BASE, length=128),
    dict(src_addr=0, dst_addr=SCRATCHPAD_BASE + 0x1FC0, length=128),
    dict(src_addr=0x3E00, dst_addr=SCRATCHPAD_BASE, length=256, stride=256),
    dict(src_addr=0, dst_addr=0x20000000, length=4),
])
def test_out_of_range_bursts_are_rejected_at_submit(memory, descriptor):
    dma = DmaEngine()
    with pytest.raises(BusFault):
        dma.submit(DmaDescriptor(**descriptor), bus=memory)
    assert not dma.busy
    assert memory.read_block(SCRATCHPAD_BASE, 0x2000) == bytes(0x2000)


def test_collect_forgets_finished_transfers(memory):
    dma = DmaEngine()
    ticket = dma.submit(DmaDescriptor(src_addr=0, dst_addr=SCRATCHPAD_BASE, length=64), bus=memory)
    dma.run_to_completion(memory)
    assert dma.collect(ticket).status == TransferStatus.DONE
    assert ticket not in dma.finished
    with pytest.raises(KeyError):
        dma.status(ticket)


def test_uncollected_history_is_bounded(memory):
    dma = DmaEngine()
    tickets = []
    for _ in range(FINISHED_HISTORY + 10):
        tickets.append(dma.submit(DmaDescriptor(src_addr=0, dst_addr=SCRATCHPAD_BASE, length=4), bus=memory))
        dma.run_to_completion(memory)
    assert len(dma.finished) == FINISHED_HISTORY
    assert tickets[0] not in dma.finished
    assert dma.status(tickets[-1]).status == TransferStatus.DONE


@pytest.mark.parametrize("schedule", [
    BackpressureSchedule.every(3),
    BackpressureSchedule.random(0.3, seed=1),
    BackpressureSchedule.random(0.6, seed=2),
])
def test_drain_time_is_bounded_by_the_longest_stall_run(memory, schedule):
    rng = np.random.default_rng(17)
    for _ in range(20):
        length = int(rng.integers(1, 2049))
        dma = DmaEngine(backpressure=schedule)
        dma.submit(DmaDescriptor(src_addr=0, dst_addr=SCRATCHPAD_BASE, length=length), bus=memory)
        bursts = -(-length // BURST)
        cycles = dma.run_to_completion(memory)
        assert cycles >= bursts
        assert cycles <= bursts * (1 + schedule.max_stall_run(cycles))


def test_strided_gather_reads_every_stride(memory):
    source = np.arange(512, dtype=np.uint8)
    memory.ram.write_bytes(0x100, source.tobytes())
    d = DmaDescriptor(src_addr=0x100, dst_addr=SCRATCHPAD_BASE, length=256, stride=128)
    assert [b.src_addr for b in segment(d, BURST)] == [0x100, 0x180, 0x200, 0x280]
    dma = DmaEngine()
    dma.submit(d, bus=memory)
    assert dma.run_to_completion(memory) == 4
    expected = np.concatenate([source[i * 128:i * 128 + 64] for i in range(4)])
    assert memory.read_block(SCRATCHPAD_BASE, 256) == expected.tobytes()

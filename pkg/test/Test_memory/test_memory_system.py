import numpy as np
import pytest

from npuSim.coreFunctions.MemorySystem import BusArbiter, MemorySystem, Scratchpad, arbitrate, decode
from npuSim.models.MemoryModel import (
    DEFAULT_REGIONS, BusMaster, BusTransaction, MemoryMap, Region, RegionKind, TransactionKind, default_memory_map,
)
from utils.customerExceptions.cust_exceptions import AlignmentFault, ArbitrationError, BusFault


@pytest.fixture
def memory():
    return MemorySystem()


def boundary_cases():
    cases = []
    for region in DEFAULT_REGIONS:
        cases.append((region.base, region.kind))
        cases.append((region.limit - 3, region.kind))
        cases.append((region.limit, region.kind))
        if region.base > 0:
            cases.append((region.base - 1, None))
            cases.append((region.base - 4, None))
        cases.append((region.limit + 1, None))
    return cases


@pytest.mark.parametrize("addr, kind", boundary_cases())
def test_memory_map_boundaries(addr, kind):
    memory_map = default_memory_map()
    if kind is None:
        with pytest.raises(BusFault):
            decode(memory_map, addr)
    else:
        assert decode(memory_map, addr).kind == kind


@pytest.mark.parametrize("addr", [0x40000000, 0xFFFFFFFC, 0x00004000, 0x10003000])
def test_unmapped_addresses_fault_and_are_logged(memory, addr):
    with pytest.raises(BusFault):
        memory.read32(addr)
    assert memory.fault_log[-1].addr == addr
    assert memory.fault_log[-1].master == BusMaster.CPU


def test_write_then_read_is_idempotent(memory):
    memory.write32(0x100, 0xCAFEBABE)
    assert memory.read32(0x100) == 0xCAFEBABE
    assert memory.read32(0x100) == 0xCAFEBABE


def test_scratchpad_is_reachable_from_the_bus(memory):
    memory.write32(0x10001000 + 0x20, 0x00050003)
    assert memory.scratchpad.read_elements(0x20, 2).tolist() == [3, 5]


def test_unaligned_access_faults(memory):
    with pytest.raises(AlignmentFault):
        memory.write32(0x102, 1)
    assert "Unaligned" in memory.fault_log[-1].reason


def test_overlapping_regions_are_rejected():
    with pytest.raises(ValueError):
        MemoryMap(regions=[Region(base=0, limit=0xFF, kind=RegionKind.MAIN_RAM),
                           Region(base=0x80, limit=0x1FF, kind=RegionKind.SCRATCHPAD)])


def test_smaller_scratchpad_shrinks_its_window():
    memory_map = default_memory_map(scratchpad_size=1024)
    assert memory_map.region_of(RegionKind.SCRATCHPAD).limit == 0x100013FF
    with pytest.raises(BusFault):
        decode(memory_map, 0x10001400)


def test_block_transfer_cannot_cross_region_end(memory):
    with pytest.raises(BusFault):
        memory.write_block(0x3FFC, b"\x00" * 8)
    with pytest.raises(BusFault):
        memory.read_block(0x10000000, 4)


def test_dual_port_write_is_visible_to_the_same_cycle_read():
    spm = Scratchpad(64)
    values = spm.dual_port_access(engine_offset=0, engine_count=4, bus_offset=4, word=0x00020001)
    assert values.tolist() == [0, 0, 1, 2]


def test_uart_data_and_status(memory):
    memory.write32(0x20000000, ord("A"))
    assert bytes(memory.uart.tx_sink) == b"A"
    assert memory.read32(0x20000004) & 0x1 == 0
    memory.uart.feed(b"z")
    assert memory.read32(0x20000004) & 0x1 == 1
    assert memory.read32(0x20000000) == ord("z")
    assert memory.read32(0x20000000) == 0


def test_arbiter_grants_dma_first():
    cpu = BusTransaction(addr=0, kind=TransactionKind.READ32, master=BusMaster.CPU)
    dma = BusTransaction(addr=4, kind=TransactionKind.WRITE32, master=BusMaster.DMA)
    assert arbitrate([cpu, dma]) == [dma, cpu]
    assert arbitrate([cpu]) == [cpu]
    assert arbitrate([]) == []


def test_arbiter_rejects_two_transactions_from_one_master():
    first = BusTransaction(addr=0, kind=TransactionKind.READ32)
    second = BusTransaction(addr=4, kind=TransactionKind.READ32)
    with pytest.raises(ArbitrationError):
        arbitrate([first, second])


def test_arbiter_counts_cpu_stalls(memory):
    cpu = BusTransaction(addr=0, kind=TransactionKind.READ32, master=BusMaster.CPU)
    dma = BusTransaction(addr=4, kind=TransactionKind.READ32, master=BusMaster.DMA)
    assert memory.arbiter.grant_cycle([cpu, dma]) is dma
    assert memory.arbiter.grant_cycle([cpu]) is cpu
    assert memory.arbiter.cpu_stall_cycles == 1


def test_image_round_trip(memory, tmp_path):
    image = tmp_path / "in.bin"
    payload = bytes(range(256)) * 3
    image.write_bytes(payload)
    assert memory.load_image(image, 0x10001000) == len(payload)

    dumped = tmp_path / "out.bin"
    memory.dump_image(dumped, 0x10001000, len(payload))
    assert dumped.read_bytes() == payload


def test_reset_clears_memories_and_fault_log(memory):
    memory.write32(0x0, 0x12345678)
    with pytest.raises(BusFault):
        memory.read32(0x50000000)
    memory.reset()
    assert memory.read32(0x0) == 0
    assert memory.fault_log == []


@pytest.mark.parametrize("base, size", [(0x00000000, 0x4000), (0x10001000, 0x2000)])
def test_mixed_word_and_block_traffic_matches_a_byte_model(memory, base, size):
    rng = np.random.default_rng(base & 0xFFFF)
    model = bytearray(size)
    for _ in range(3000):
        action = int(rng.integers(0, 4))
        if action < 2:
            offset = int(rng.integers(0, size // 4)) * 4
            if action == 0:
                word = int(rng.integers(0, 1 << 32))
                memory.write32(base + offset, word)
                model[offset:offset + 4] = word.to_bytes(4, "little")
            else:
                assert memory.read32(base + offset) == int.from_bytes(model[offset:offset + 4], "little")
        else:
            length = int(rng.integers(1, 257))
            offset = int(rng.integers(0, size - length + 1))
            if action == 2:
                payload = rng.integers(0, 256, size=length, dtype=np.uint8).tobytes()
                memory.write_block(base + offset, payload)
                model[offset:offset + length] = payload
            else:
                assert memory.read_block(base + offset, length) == bytes(model[offset:offset + length])
    assert memory.read_block(base, size) == bytes(model)


def test_random_contention_always_grants_someone():
    rng = np.random.default_rng(21)
    arbiter = BusArbiter()
    expected_stalls = 0
    for _ in range(1000):
        pending = []
        if rng.integers(0, 2):
            pending.append(BusTransaction(addr=0, kind=TransactionKind.READ32, master=BusMaster.CPU))
        if rng.integers(0, 2):
            pending.append(BusTransaction(addr=0x10001000, kind=TransactionKind.WRITE32, master=BusMaster.DMA))
        order = rng.permutation(len(pending)).tolist()
        granted = arbiter.grant_cycle([pending[i] for i in order])
        if not pending:
            assert granted is None
            continue
        assert granted is not None
        if any(txn.master == BusMaster.DMA for txn in pending):
            assert granted.master == BusMaster.DMA
            expected_stalls += len(pending) - 1
    assert arbiter.cpu_stall_cycles == expected_stalls


def test_dual_port_same_address_reads_the_new_word():
    spm = Scratchpad(64)
    spm.write32(8, 0x11112222)
    values = spm.dual_port_access(engine_offset=8, engine_count=2, bus_offset=8, word=0xFFFE0003)
    assert values.tolist() == [3, -2]

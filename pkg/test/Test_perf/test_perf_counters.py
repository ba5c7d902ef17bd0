import itertools

import pytest

from npuSim.coreFunctions.Oracles import beat_count
from npuSim.coreFunctions.PerfCounters import (
    COUNTER_LAYOUT, COUNTER_MAX, PerfCounters, achieved_ops_per_sec, buffer_sweep, efficiency, largest_square_gemm,
    min_cycles_gemm, peak_ops_per_sec, scaling_sweep,
)
from npuSim.coreFunctions.Simulator import PERF_COUNTERS_BASE, SCRATCHPAD_BASE, NpuSimulator
from npuSim.models.DmaModel import DmaDescriptor
from npuSim.models.EngineModel import EngineConfig, GemmParams
from npuSim.models.PerfModel import PerfModel
from npuSim.models.RegisterModel import Opcode


# region Analytical Model
@pytest.mark.parametrize("mac_units, ops_per_mac, expected", [
    (16, 2, 3_200_000_000),
    (16, 1, 1_600_000_000),
    (4, 2, 800_000_000),
])
def test_peak_ops_per_sec(mac_units, ops_per_mac, expected):
    assert peak_ops_per_sec(PerfModel(mac_units=mac_units, clock_hz=100_000_000, ops_per_mac=ops_per_mac)) == expected


@pytest.mark.parametrize("shape, expected", [((16, 16, 16, 16), 256), ((1, 1, 1, 16), 1), ((3, 5, 7, 4), 27)])
def test_min_cycles(shape, expected):
    assert min_cycles_gemm(*shape) == expected


def test_min_cycles_rejects_empty_shapes():
    with pytest.raises(ValueError):
        min_cycles_gemm(0, 16, 16, 16)


def test_min_cycles_matches_beat_counting():
    for m, n, k in itertools.product(range(1, 7), repeat=3):
        for mac_units in (4, 8, 16, 32):
            assert min_cycles_gemm(m, n, k, mac_units) == beat_count(m, n, k, mac_units)


@pytest.mark.parametrize("measured, ratio, anomaly", [(256, 1.0, False), (512, 0.5, False), (156, 256 / 156, True)])
def test_efficiency(measured, ratio, anomaly):
    result = efficiency(measured, 16, 16, 16, 16)
    assert result.min_cycles == 256
    assert result.ratio == pytest.approx(ratio)
    assert result.anomaly is anomaly


def test_board_figure_is_flagged():
    assert round(efficiency(156, 16, 16, 16, 16).ratio, 3) == 1.641


def test_achieved_ops_per_sec():
    assert achieved_ops_per_sec(4096, 400, 100_000_000) == pytest.approx(2.048e9)
    assert achieved_ops_per_sec(4096, 0, 100_000_000) == 0.0
# endregion


# region Counters
def test_counter_words_split_into_low_and_high():
    counters = PerfCounters()
    counters.add("mac_ops_retired", (5 << 32) | 7)
    base = COUNTER_LAYOUT["mac_ops_retired"]
    assert counters.reg_read(base) == 7
    assert counters.reg_read(base + 4) == 5


def test_counters_saturate():
    counters = PerfCounters()
    counters.add("total_cycles", COUNTER_MAX)
    counters.add("total_cycles", 10)
    assert counters["total_cycles"] == COUNTER_MAX


def test_counter_window_ignores_writes():
    counters = PerfCounters()
    counters.add("dma_bytes_moved", 64)
    counters.reg_write(COUNTER_LAYOUT["dma_bytes_moved"], 0)
    assert counters["dma_bytes_moved"] == 64


def test_gemm_updates_counters():
    sim = NpuSimulator()
    params = GemmParams(m=8, n=4, k=12, a_addr=0x000, b_addr=0x200, c_addr=0x400)
    sim.program(Opcode.GEMM, params)
    sim.run_until_idle()

    assert sim.perf["mac_ops_retired"] == 8 * 4 * 12
    assert sim.perf["engine_busy_cycles"] == sim.last_result.cycles_total
    assert sim.perf["total_cycles"] == sim.cycle


def test_counter_reads_have_no_side_effects():
    sim = NpuSimulator()
    sim.program(Opcode.GEMM)
    sim.run_until_idle()

    lo = PERF_COUNTERS_BASE + COUNTER_LAYOUT["mac_ops_retired"]
    assert sim.read32(lo) == 4096
    assert sim.read32(lo) == 4096
    assert sim.read32(lo + 4) == 0
    # each read is one bus cycle
    assert sim.read32(PERF_COUNTERS_BASE + COUNTER_LAYOUT["total_cycles"]) == sim.cycle


def test_dma_contention_stalls_the_cpu():
    sim = NpuSimulator()
    sim.submit_dma(DmaDescriptor(src_addr=0, dst_addr=SCRATCHPAD_BASE, length=512))
    sim.read32(0x100)
    assert sim.perf["cpu_stall_cycles"] > 0
    sim.run_until_idle()
    assert sim.perf["dma_bytes_moved"] == 512
# endregion


# region Sweeps
def test_scaling_sweep():
    points = scaling_sweep(EngineConfig())
    assert [p.mac_units for p in points] == [4, 8, 16, 32]
    assert [p.min_cycles for p in points] == [1024, 512, 256, 128]
    assert [p.peak_ops_per_sec for p in points] == [800_000_000, 1_600_000_000, 3_200_000_000, 6_400_000_000]
    assert points[2].cycles_total == 400
    assert all(0 < p.utilization <= 1 for p in points)
    # fixed overhead weighs more on wider arrays
    assert [p.utilization for p in points] == sorted((p.utilization for p in points), reverse=True)


def test_buffer_sweep():
    points = buffer_sweep(EngineConfig())
    assert len(points) == 20
    assert {p.buffer_bytes: p.gemm_dim for p in points if p.mac_units == 16} == {
        512: largest_square_gemm(512), 1024: 13, 2048: 18, 4096: 26, 8192: 36}
    assert largest_square_gemm(512) == 9
    assert all(0 < p.utilization <= 1 for p in points)
# endregion

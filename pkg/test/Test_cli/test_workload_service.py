import configparser
from pathlib import Path
from unittest.mock import patch

import numpy as np
import pytest

from npuSim.coreFunctions.ManifestParser import build_operation, generate_input, parse_manifest_text
from npuSim.models.EngineModel import EngineConfig
from npuSim.models.WorkloadModel import OpKind, OracleOutcome, StagedOperand
from npuSim.services.ReportService import emit_report
from npuSim.services.WorkloadService import run_manifest, run_workload
from utils.customerExceptions.cust_exceptions import ConfigError, ParseError

EXAMPLES = Path(__file__).resolve().parents[2] / "docs" / "examples"
ORACLE_PATH = "npuSim.services.WorkloadService._oracle"

REPORT_SECTIONS = ["report", "config", "op.gemm16", "counters", "throughput", "summary", "anomalies"]


@pytest.fixture
def manifest(tmp_path):
    def write(text):
        path = tmp_path / "workload.ini"
        path.write_text(text)
        return path
    return write


def twenty_ops():
    sections = ["[workload]\nname = twenty\n"]
    for i in range(20):
        if i % 4 == 0:
            sections.append(f"[op.g{i}]\nkind = gemm\nm = {4 + i % 5}\nn = 8\nk = {8 + i}\nshift = 3\n")
        elif i % 4 == 1:
            sections.append(f"[op.r{i}]\nkind = relu\ncount = {32 * i}\ninput = random:-300:300\n")
        elif i % 4 == 2:
            sections.append(f"[op.c{i}]\nkind = conv\nin_h = 6\nin_w = 6\nin_c = 2\nout_c = 3\nkernel_h = 3\n"
                            f"kernel_w = 3\npadding = 1\nshift = 2\nrounding = round-half-up\n")
        else:
            sections.append(f"[op.p{i}]\nkind = pool\nmode = avg\nchannels = 2\nin_h = 8\nin_w = 8\nwindow_h = 2\n"
                            f"window_w = 2\nstride = 2\n")
    return "\n".join(sections)


# region Manifest
def test_parse_manifest_sections():
    parsed = parse_manifest_text((EXAMPLES / "small_net.ini").read_text())
    assert parsed.name == "small-net"
    assert parsed.engine_overrides == {"mac_units": "4"}
    assert [op.kind for op in parsed.ops] == [OpKind.CONV, OpKind.RELU, OpKind.POOL, OpKind.POOL, OpKind.GEMM]
    assert parsed.ops[-1].seed == 42
    assert parsed.ops[0].inputs == {"input": "random:-128:128", "weights": "random:-8:8"}


@pytest.mark.parametrize("text, error", [
    ("kind = gemm\n", ParseError),
    ("[op.a]\nkind = gemm\n[op.a]\nkind = relu\n", ParseError),
    ("[op.a]\nkind = matmul\n", ConfigError),
    ("[op.a]\nkind = relu\ncount = 4\nwidth = 2\n", ConfigError),
    ("[layers]\n", ConfigError),
    ("[workload]\noracle_check = maybe\n", ConfigError),
])
def test_bad_manifests(text, error):
    with pytest.raises(error):
        parse_manifest_text(text)


def test_operands_are_placed_back_to_back():
    op = parse_manifest_text("[op.g]\nkind = gemm\nm = 3\nn = 5\nk = 7\n").ops[0]
    planned = build_operation(op, EngineConfig())
    assert (planned.params.a_addr, planned.params.b_addr, planned.params.c_addr) == (0, 44, 44 + 72)
    assert [operand.shape for operand in planned.operands] == [[3, 7], [7, 5]]


def test_oversized_op_is_a_config_error():
    op = parse_manifest_text("[op.g]\nkind = gemm\nm = 64\nn = 64\nk = 64\n").ops[0]
    with pytest.raises(ConfigError):
        build_operation(op, EngineConfig())


def test_missing_dimension_is_a_config_error():
    op = parse_manifest_text("[op.p]\nkind = pool\nin_h = 4\nin_w = 4\n").ops[0]
    with pytest.raises(ConfigError):
        build_operation(op, EngineConfig())


@pytest.mark.parametrize("text", [
    "[op.g]\nkind = gemm\nm = 4\nn = 4\nk = 4\na_addr = 0\nb_addr = 0\n",
    "[op.g]\nkind = gemm\nm = 4\nn = 4\nk = 4\na_addr = 0x100\nb_addr = 0x11C\n",
    "[op.c]\nkind = conv\nin_h = 4\nin_w = 4\nin_c = 1\nout_c = 1\nkernel_h = 3\nkernel_w = 3\n"
    "input_addr = 0\nweight_addr = 16\n",
])
def test_overlapping_inputs_are_rejected(text):
    op = parse_manifest_text(text).ops[0]
    with pytest.raises(ParseError, match=rf"\[op\.{op.name}\].*overlap"):
        build_operation(op, EngineConfig())


def test_adjacent_inputs_are_accepted():
    op = parse_manifest_text("[op.g]\nkind = gemm\nm = 4\nn = 4\nk = 4\na_addr = 0x100\nb_addr = 0x120\n").ops[0]
    planned = build_operation(op, EngineConfig())
    assert (planned.params.a_addr, planned.params.b_addr) == (0x100, 0x120)


@pytest.mark.parametrize("source, check", [
    ("zeros", lambda x: not x.any()),
    ("constant:-3", lambda x: (x == -3).all()),
    ("random", lambda x: x.min() >= -64 and x.max() < 64),
    ("random:1000:1002", lambda x: set(x.ravel().tolist()) <= {1000, 1001}),
    ("identity", lambda x: x.tolist() == [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]]),
])
def test_generated_inputs(source, check):
    operand = StagedOperand(name="a", offset=0, shape=[3, 4], source=source)
    data = generate_input(operand, np.random.default_rng(0))
    assert data.dtype == np.int16 and data.shape == (3, 4)
    assert check(data)


def test_file_input(tmp_path):
    np.arange(6, dtype="<i2").tofile(tmp_path / "x.bin")
    operand = StagedOperand(name="x", offset=0, shape=[2, 3], source="file:x.bin")
    assert generate_input(operand, np.random.default_rng(0), tmp_path).tolist() == [[0, 1, 2], [3, 4, 5]]
    with pytest.raises(ConfigError):
        generate_input(operand.model_copy(update={"shape": [4, 4]}), np.random.default_rng(0), tmp_path)
# endregion


# region Runs
def test_gemm16_workload():
    result = run_workload(EXAMPLES / "gemm16.ini")
    assert result.success
    run = result.data
    op = run.ops[0]
    assert (op.cycles_compute, op.min_cycles, op.cycles_total, op.busy_cycles) == (256, 256, 400, 400)
    assert op.mac_ops == 4096
    assert op.efficiency == pytest.approx(0.64)
    assert op.oracle == OracleOutcome.PASS
    assert run.exit_status == 0
    assert run.counters.mac_ops_retired == 4096
    assert run.peak_ops_per_sec == 3_200_000_000


def test_identity_conv_workload():
    run = run_workload(EXAMPLES / "conv_identity.ini").data
    assert run.ops[0].oracle == OracleOutcome.PASS
    assert run.ops[0].overflow_count == 0


def test_small_net_workload():
    run = run_workload(EXAMPLES / "small_net.ini", seed=3).data
    assert run.config.mac_units == 4
    assert [op.oracle for op in run.ops] == [OracleOutcome.PASS] * 5
    assert run.exit_status == 0


def test_oracle_mismatch_sets_exit_status():
    with patch(ORACLE_PATH, return_value=[[0]]):
        run = run_workload(EXAMPLES / "gemm16.ini").data
    assert run.ops[0].oracle == OracleOutcome.FAIL
    assert run.oracle_failures == 1
    assert run.exit_status == 1


def test_oracle_check_off_skips_comparison(manifest):
    run = run_workload(manifest("[workload]\noracle_check = false\n[op.r]\nkind = relu\ncount = 8\n")).data
    assert run.ops[0].oracle == OracleOutcome.SKIPPED


def test_empty_workload(manifest):
    run = run_workload(manifest("[workload]\nname = nothing\n")).data
    assert run.ops == []
    assert run.counters.model_dump() == {key: 0 for key in run.counters.model_dump()}
    assert run.achieved_ops_per_sec == 0.0
    assert run.exit_status == 0


@pytest.mark.parametrize("text", [
    "[engine]\nmac_units = 3\n",
    "[engine]\nwarp_size = 32\n",
    "[op.g]\nkind = gemm\nm = 64\nn = 64\nk = 64\n",
])
def test_unusable_workloads_are_rejected(manifest, text):
    result = run_workload(manifest(text))
    assert not result.success
    assert isinstance(result.error, ConfigError)


def test_unparseable_workload_is_rejected(manifest):
    result = run_workload(manifest("no header\n"))
    assert not result.success
    assert isinstance(result.error, ParseError)


def test_overlapping_inputs_fail_the_workload(manifest):
    result = run_workload(manifest("[op.g]\nkind = gemm\nm = 4\nn = 4\nk = 4\na_addr = 0\nb_addr = 8\n"))
    assert not result.success
    assert isinstance(result.error, ParseError)
    assert "op.g" in str(result.error)
# endregion


# region Report
def test_report_sections_and_values():
    text = emit_report(run_workload(EXAMPLES / "gemm16.ini").data)
    report = configparser.ConfigParser(interpolation=None)
    report.read_string(text)
    assert report.sections() == REPORT_SECTIONS
    assert report["op.gemm16"]["cycles_total"] == "400"
    assert report["op.gemm16"]["efficiency"] == "0.6400"
    assert report["op.gemm16"]["fault"] == "n/a"
    assert report["anomalies"]["board_efficiency"] == "1.6410"
    assert report["anomalies"]["board_efficiency_anomaly"] == "true"
    assert report["summary"]["exit_status"] == "0"


def test_same_seed_gives_identical_reports():
    parsed = parse_manifest_text(twenty_ops())
    first = emit_report(run_manifest(parsed, seed=11))
    second = emit_report(run_manifest(parsed, seed=11))
    assert first == second


def test_seed_changes_only_data_dependent_fields():
    parsed = parse_manifest_text(twenty_ops())
    a = emit_report(run_manifest(parsed, seed=1)).splitlines()
    b = emit_report(run_manifest(parsed, seed=2)).splitlines()
    assert len(a) == len(b)
    changed = {x.split(" = ")[0] for x, y in zip(a, b) if x != y}
    assert "output_crc32" in changed
    assert changed <= {"seed", "output_crc32", "overflow_count", "oracle"}
# endregion

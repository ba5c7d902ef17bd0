"""
    Purpose:
    Reads workload manifests (INI documents) and turns each [op.<name>] section into
    engine parameters with scratchpad placement and input data.

    Description:
    - [workload]: name, oracle_check (true/false).
    - [engine]: EngineConfig overrides (field = value).
    - [op.<name>]: kind = gemm|conv|pool|relu, the op's dimensions, optional
      placement offsets, optional seed, and one data source per input operand.
    - Data sources: random, random:<lo>:<hi>, zeros, constant:<v>, identity, file:<path>.
    - Unplaced operands are packed from scratchpad offset 0 in operand order, each
      start aligned to 4 bytes, with the output after the inputs.

    Created Date: 2026-10-19
    Version: V1
"""

# region Imports
import configparser
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from npuSim.coreFunctions.NeuralEngine import plan
from npuSim.models.EngineModel import ConvParams, EngineConfig, GemmParams, PoolMode, PoolParams, ReluParams
from npuSim.models.NumericsModel import FIXED16_MAX, FIXED16_MIN, Rounding, ScaleSpec
from npuSim.models.WorkloadModel import OpKind, OpSpec, PlannedOperation, StagedOperand, WorkloadManifest
from utils.customerExceptions.cust_exceptions import ConfigError, ParseError, SimulationFault
from utils.logger.loggers import get_logger
# endregion

# region Logger
logger_NPU1S01 = get_logger('NPU1S01')
# endregion

OP_SECTION_PREFIX = "op."
DEFAULT_RANDOM_RANGE = (-64, 64)

INPUT_NAMES = {
    OpKind.GEMM: ("a", "b"),
    OpKind.CONV: ("input", "weights"),
    OpKind.POOL: ("input",),
    OpKind.RELU: ("input",),
}

PARAM_NAMES = {
    OpKind.GEMM: {"m", "n", "k", "shift", "rounding", "a_addr", "b_addr", "c_addr"},
    OpKind.CONV: {"in_h", "in_w", "in_c", "out_c", "kernel_h", "kernel_w", "stride", "padding", "shift", "rounding",
                  "input_addr", "weight_addr", "output_addr"},
    OpKind.POOL: {"mode", "window_h", "window_w", "stride", "in_h", "in_w", "channels", "input_addr", "output_addr"},
    OpKind.RELU: {"count", "src_addr", "dst_addr"},
}


# region Manifest Parsing
def _flag(value, where):
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{where}: '{value}' is not a boolean")


def parse_manifest_text(text, base_dir=".") -> WorkloadManifest:
    """
    Raises:
        ParseError: the document is not valid INI (line reported when known).
        ConfigError: unknown section, op kind or key.
    """
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError as e:
        raise ParseError("missing section header", e.lineno, 1)
    except configparser.DuplicateSectionError as e:
        raise ParseError(f"duplicate section [{e.section}]", e.lineno, 1)
    except configparser.DuplicateOptionError as e:
        raise ParseError(f"duplicate key '{e.option}' in [{e.section}]", e.lineno, 1)
    except configparser.ParsingError as e:
        line_no = e.errors[0][0] if e.errors else None
        raise ParseError("malformed line", line_no, 1)

    name, oracle_check = "workload", True
    if parser.has_section("workload"):
        section = parser["workload"]
        name = section.get("name", name).strip()
        oracle_check = _flag(section.get("oracle_check", "true"), "[workload] oracle_check")

    overrides = dict(parser["engine"]) if parser.has_section("engine") else {}

    ops = []
    for section_name in parser.sections():
        if section_name in ("workload", "engine"):
            continue
        if not section_name.startswith(OP_SECTION_PREFIX):
            raise ConfigError(f"Unknown manifest section [{section_name}]")
        ops.append(_parse_op(section_name[len(OP_SECTION_PREFIX):], dict(parser[section_name])))

    return WorkloadManifest(name=name, oracle_check=oracle_check, engine_overrides=overrides, ops=ops,
                            base_dir=str(base_dir))


def _parse_op(name, values) -> OpSpec:
    where = f"[op.{name}]"
    try:
        kind = OpKind(values.pop("kind", "").strip().lower())
    except ValueError:
        raise ConfigError(f"{where}: kind must be one of {[k.value for k in OpKind]}")

    seed = None
    if "seed" in values:
        seed = _int(values.pop("seed"), f"{where} seed")

    inputs = {key: values.pop(key).strip() for key in INPUT_NAMES[kind] if key in values}
    unknown = set(values) - PARAM_NAMES[kind]
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {sorted(unknown)} for a {kind.value} op")
    return OpSpec(name=name, kind=kind, params=values, inputs=inputs, seed=seed)


def parse_manifest(path) -> WorkloadManifest:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ParseError(f"cannot read manifest {path}: {e}")
    return parse_manifest_text(text, base_dir=path.parent)
# endregion


# region Operation Planning
def _int(value, where):
    try:
        return int(str(value).strip(), 0)
    except ValueError:
        raise ConfigError(f"{where}: '{value}' is not an integer")


class _Placer:
    """Hands out 4-byte aligned scratchpad offsets in request order."""

    def __init__(self):
        self.cursor = 0

    def place(self, explicit, nbytes):
        if explicit is not None:
            return explicit
        offset = self.cursor
        self.cursor = (offset + nbytes + 3) & ~3
        return offset


def _scale(p, where):
    try:
        rounding = Rounding(p.get("rounding", Rounding.TRUNCATE.value).strip().lower())
    except ValueError:
        raise ConfigError(f"{where}: rounding must be 'truncate' or 'round-half-up'")
    return ScaleSpec(right_shift=_int(p.get("shift", 0), f"{where} shift"), rounding=rounding)


def _check_disjoint(where, staged):
    # inputs are staged independently and must not share bytes
    spans = sorted((s.offset, s.offset + 2 * int(np.prod(s.shape)), s.name) for s in staged)
    for (_, end, first), (start, _, second) in zip(spans, spans[1:]):
        if start < end:
            raise ParseError(f"{where}: inputs {first} and {second} overlap in the scratchpad")


def build_operation(op: OpSpec, cfg: EngineConfig) -> PlannedOperation:
    """
    Resolve dimensions and placement for one op and check its footprints.

    Raises:
        ConfigError: missing or invalid dimension, or a footprint that does not fit.
        ParseError: two input operands placed over the same scratchpad bytes.
    """
    where = f"[op.{op.name}]"
    p = op.params
    ints = {key: _int(value, f"{where} {key}") for key, value in p.items() if key not in ("rounding", "mode")}
    placer = _Placer()

    def offset(key, nbytes):
        return placer.place(ints.get(key), nbytes)

    try:
        if op.kind == OpKind.GEMM:
            m, n, k = ints["m"], ints["n"], ints["k"]
            shapes = {"a": [m, k], "b": [k, n]}
            a_addr = offset("a_addr", m * k * 2)
            b_addr = offset("b_addr", k * n * 2)
            c_addr = offset("c_addr", m * n * 2)
            params = GemmParams(m=m, n=n, k=k, a_addr=a_addr, b_addr=b_addr, c_addr=c_addr, scale=_scale(p, where))
            operands = {"a": a_addr, "b": b_addr}
            output = StagedOperand(name="c", offset=c_addr, shape=[m, n], source="")
        elif op.kind == OpKind.CONV:
            in_shape = [ints["in_c"], ints["in_h"], ints["in_w"]]
            w_shape = [ints["out_c"], ints["in_c"], ints["kernel_h"], ints["kernel_w"]]
            input_addr = offset("input_addr", int(np.prod(in_shape)) * 2)
            weight_addr = offset("weight_addr", int(np.prod(w_shape)) * 2)
            shaped = ConvParams(in_h=ints["in_h"], in_w=ints["in_w"], in_c=ints["in_c"], out_c=ints["out_c"],
                                kernel_h=ints["kernel_h"], kernel_w=ints["kernel_w"], stride=ints.get("stride", 1),
                                padding=ints.get("padding", 0), input_addr=input_addr, weight_addr=weight_addr,
                                output_addr=0, scale=_scale(p, where))
            out_shape = [shaped.out_c, shaped.out_h, shaped.out_w]
            params = shaped.model_copy(update={"output_addr": offset("output_addr", int(np.prod(out_shape)) * 2)})
            shapes = {"input": in_shape, "weights": w_shape}
            operands = {"input": input_addr, "weights": weight_addr}
            output = StagedOperand(name="output", offset=params.output_addr, shape=out_shape, source="")
        elif op.kind == OpKind.POOL:
            try:
                mode = PoolMode(p.get("mode", PoolMode.MAX.value).strip().lower())
            except ValueError:
                raise ConfigError(f"{where}: mode must be 'max' or 'avg'")
            in_shape = [ints.get("channels", 1), ints["in_h"], ints["in_w"]]
            input_addr = offset("input_addr", int(np.prod(in_shape)) * 2)
            shaped = PoolParams(mode=mode, window_h=ints["window_h"], window_w=ints["window_w"],
                                stride=ints["stride"], in_h=ints["in_h"], in_w=ints["in_w"],
                                channels=ints.get("channels", 1), input_addr=input_addr, output_addr=0)
            out_shape = [shaped.channels, shaped.out_h, shaped.out_w]
            params = shaped.model_copy(update={"output_addr": offset("output_addr", int(np.prod(out_shape)) * 2)})
            shapes = {"input": in_shape}
            operands = {"input": input_addr}
            output = StagedOperand(name="output", offset=params.output_addr, shape=out_shape, source="")
        else:
            count = ints["count"]
            src_addr = offset("src_addr", count * 2)
            params = ReluParams(count=count, src_addr=src_addr, dst_addr=offset("dst_addr", count * 2))
            shapes = {"input": [count]}
            operands = {"input": src_addr}
            output = StagedOperand(name="output", offset=params.dst_addr, shape=[count], source="")
    except KeyError as e:
        raise ConfigError(f"{where}: missing key {e.args[0]}")
    except ValidationError as e:
        raise ConfigError(f"{where}: {e.errors()[0]['msg']}")

    staged = [StagedOperand(name=name, offset=operands[name], shape=shapes[name], source=op.inputs.get(name, "random"))
              for name in INPUT_NAMES[op.kind]]
    _check_disjoint(where, staged)

    try:
        plan(cfg, params, cfg.scratchpad_size)
    except SimulationFault as fault:
        raise ConfigError(f"{where}: {fault}")

    return PlannedOperation(spec=op, params=params, operands=staged, output=output)
# endregion


# region Input Data
def generate_input(operand: StagedOperand, rng: np.random.Generator, base_dir=".") -> np.ndarray:
    """
    Materialise one operand's data as int16 in the operand's shape.

    Raises:
        ConfigError: unknown source, bad range, or a file of the wrong size.
    """
    kind, _, arg = operand.source.partition(":")
    kind = kind.strip().lower()
    shape = tuple(operand.shape)

    if kind == "random":
        lo, hi = DEFAULT_RANDOM_RANGE
        if arg:
            try:
                lo_text, hi_text = arg.split(":")
                lo, hi = int(lo_text, 0), int(hi_text, 0)
            except ValueError:
                raise ConfigError(f"{operand.name}: random range must be random:<lo>:<hi>")
            if not FIXED16_MIN <= lo < hi <= FIXED16_MAX + 1:
                raise ConfigError(f"{operand.name}: random range [{lo}, {hi}) outside int16")
        return rng.integers(lo, hi, size=shape, dtype=np.int64).astype(np.int16)
    if kind == "zeros":
        return np.zeros(shape, dtype=np.int16)
    if kind == "constant":
        value = _int(arg, f"{operand.name} constant")
        if not FIXED16_MIN <= value <= FIXED16_MAX:
            raise ConfigError(f"{operand.name}: constant {value} outside int16")
        return np.full(shape, value, dtype=np.int16)
    if kind == "identity":
        rows = shape[0]
        cols = int(np.prod(shape[1:])) if len(shape) > 1 else 1
        return np.eye(rows, cols, dtype=np.int16).reshape(shape)
    if kind == "file":
        path = Path(arg.strip())
        path = path if path.is_absolute() else Path(base_dir) / path
        try:
            data = np.fromfile(path, dtype="<i2")
        except OSError as e:
            raise ConfigError(f"{operand.name}: cannot read {path}: {e}")
        if data.size != int(np.prod(shape)):
            raise ConfigError(f"{operand.name}: {path} holds {data.size} elements, expected {int(np.prod(shape))}")
        return data.astype(np.int16).reshape(shape)
    raise ConfigError(f"{operand.name}: unknown data source '{operand.source}'")
# endregion

"""
    Purpose:
    Parser for register-transaction scripts: one command per line, '#' starts a comment.

    Description:
    Grammar (documented in docs/script_format.md):
        write      <addr> <word>
        read       <addr> [expect <word>]
        poll       <addr> <mask> <value> <timeout>
        step       <cycles>
        load-image <path> <base>
        dump-image <path> <base> <length>
        pcpi-issue <opcode> <rs1>
        pcpi-poll  <timeout>
        dma        <src> <dst> <length> [<stride>] [-> <src> <dst> <length> [<stride>]]...
        dma-wait   <timeout>
    Addresses, words, masks and rs1 are hexadecimal (0x prefix optional). Counts,
    lengths, strides and timeouts are decimal unless prefixed with 0x.

    Created Date: 2026-10-19
    Version: V1
"""

# region Imports
import re
from pathlib import Path

from pydantic import ValidationError

from npuSim.models.RegisterModel import Opcode
from npuSim.models.ScriptModel import (
    DescriptorSpec, DmaCommand, DmaWaitCommand, DumpImageCommand, LoadImageCommand, PcpiIssueCommand,
    PcpiPollCommand, PollCommand, ReadCommand, ScriptLine, StepCommand, WriteCommand,
)
from utils.customerExceptions.cust_exceptions import ParseError
# endregion

TOKEN = re.compile(r"\S+")
HEX_WORD = re.compile(r"^(0[xX])?[0-9a-fA-F]{1,8}$")
PCPI_OPCODES = {op.name for op in Opcode} | {"STATUS"}


class _Token:
    def __init__(self, text, column):
        self.text = text
        self.column = column


def _tokenize(line):
    return [_Token(m.group(0), m.start() + 1) for m in TOKEN.finditer(line)]


# region Field Parsers
def _hex(token, line_no):
    if not HEX_WORD.match(token.text):
        raise ParseError(f"'{token.text}' is not a 32-bit hexadecimal value", line_no, token.column)
    return int(token.text, 16)


def _count(token, line_no):
    try:
        value = int(token.text, 16) if token.text.lower().startswith("0x") else int(token.text, 10)
    except ValueError:
        raise ParseError(f"'{token.text}' is not a number", line_no, token.column)
    if value < 0:
        raise ParseError(f"'{token.text}' must not be negative", line_no, token.column)
    return value


def _arity(tokens, line_no, allowed):
    if len(tokens) - 1 not in allowed:
        column = tokens[-1].column + len(tokens[-1].text) if len(tokens) > 1 else tokens[0].column
        expected = " or ".join(str(n) for n in sorted(allowed))
        raise ParseError(f"'{tokens[0].text}' takes {expected} argument(s), got {len(tokens) - 1}", line_no, column)
# endregion


# region Commands
def _parse_write(tokens, line_no, base_dir):
    _arity(tokens, line_no, {2})
    return WriteCommand(addr=_hex(tokens[1], line_no), word=_hex(tokens[2], line_no))


def _parse_read(tokens, line_no, base_dir):
    _arity(tokens, line_no, {1, 3})
    expect = None
    if len(tokens) == 4:
        if tokens[2].text.lower() != "expect":
            raise ParseError(f"expected 'expect', got '{tokens[2].text}'", line_no, tokens[2].column)
        expect = _hex(tokens[3], line_no)
    return ReadCommand(addr=_hex(tokens[1], line_no), expect=expect)


def _parse_poll(tokens, line_no, base_dir):
    _arity(tokens, line_no, {4})
    timeout = _count(tokens[4], line_no)
    if timeout == 0:
        raise ParseError("poll timeout must be positive", line_no, tokens[4].column)
    return PollCommand(addr=_hex(tokens[1], line_no), mask=_hex(tokens[2], line_no),
                       value=_hex(tokens[3], line_no), timeout=timeout)


def _parse_step(tokens, line_no, base_dir):
    _arity(tokens, line_no, {1})
    return StepCommand(cycles=_count(tokens[1], line_no))


def _resolve(path_text, base_dir):
    path = Path(path_text)
    return str(path if path.is_absolute() else Path(base_dir) / path)


def _parse_load_image(tokens, line_no, base_dir):
    _arity(tokens, line_no, {2})
    return LoadImageCommand(path=_resolve(tokens[1].text, base_dir), base=_hex(tokens[2], line_no))


def _parse_dump_image(tokens, line_no, base_dir):
    _arity(tokens, line_no, {3})
    return DumpImageCommand(path=_resolve(tokens[1].text, base_dir), base=_hex(tokens[2], line_no),
                            length=_count(tokens[3], line_no))


def _parse_pcpi_issue(tokens, line_no, base_dir):
    _arity(tokens, line_no, {2})
    name = tokens[1].text.upper()
    if name not in PCPI_OPCODES:
        raise ParseError(f"unknown PCPI opcode '{tokens[1].text}'", line_no, tokens[1].column)
    return PcpiIssueCommand(opcode=name, rs1=_hex(tokens[2], line_no))


def _parse_pcpi_poll(tokens, line_no, base_dir):
    _arity(tokens, line_no, {1})
    timeout = _count(tokens[1], line_no)
    if timeout == 0:
        raise ParseError("pcpi-poll timeout must be positive", line_no, tokens[1].column)
    return PcpiPollCommand(timeout=timeout)


def _parse_dma(tokens, line_no, base_dir):
    groups, current = [], []
    for token in tokens[1:]:
        if token.text == "->":
            groups.append(current)
            current = []
        else:
            current.append(token)
    groups.append(current)

    chain = []
    for group in groups:
        if len(group) not in (3, 4):
            column = group[0].column if group else tokens[0].column
            raise ParseError("descriptor needs <src> <dst> <length> [<stride>]", line_no, column)
        length = _count(group[2], line_no)
        if length == 0:
            raise ParseError("descriptor length must be positive", line_no, group[2].column)
        chain.append(DescriptorSpec(src_addr=_hex(group[0], line_no), dst_addr=_hex(group[1], line_no),
                                    length=length, stride=_count(group[3], line_no) if len(group) == 4 else 0))
    return DmaCommand(chain=chain)


def _parse_dma_wait(tokens, line_no, base_dir):
    _arity(tokens, line_no, {1})
    timeout = _count(tokens[1], line_no)
    if timeout == 0:
        raise ParseError("dma-wait timeout must be positive", line_no, tokens[1].column)
    return DmaWaitCommand(timeout=timeout)


COMMANDS = {
    "write": _parse_write,
    "read": _parse_read,
    "poll": _parse_poll,
    "step": _parse_step,
    "load-image": _parse_load_image,
    "dump-image": _parse_dump_image,
    "pcpi-issue": _parse_pcpi_issue,
    "pcpi-poll": _parse_pcpi_poll,
    "dma": _parse_dma,
    "dma-wait": _parse_dma_wait,
}
# endregion


# region Script
def parse_script_text(text, base_dir="."):
    """
    Parse script text into ScriptLine records.

    Raises:
        ParseError: with the 1-based line and column of the first offending token.
    """
    lines = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        tokens = _tokenize(raw.split("#", 1)[0])
        if not tokens:
            continue
        handler = COMMANDS.get(tokens[0].text.lower())
        if handler is None:
            raise ParseError(f"unknown command '{tokens[0].text}'", line_no, tokens[0].column)
        try:
            command = handler(tokens, line_no, base_dir)
        except ValidationError as e:
            raise ParseError(e.errors()[0]["msg"], line_no, tokens[0].column)
        lines.append(ScriptLine(line=line_no, command=command))
    return lines


def parse_script(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ParseError(f"cannot read script {path}: {e}")
    return parse_script_text(text, base_dir=path.parent)
# endregion

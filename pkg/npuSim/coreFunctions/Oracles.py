"""
    Purpose:
    Reference implementations used to check the engine: plain Python integers,
    no numpy, sharing nothing with the datapath code except the scalar requantize rule.

    Description:
    - gemm_oracle: triple loop.
    - conv_oracle: im2col followed by gemm_oracle.
    - pool_oracle: direct sliding window.
    - relu_oracle: scalar map.
    All take and return nested lists / flat lists of ints.

    Created Date: 2026-10-19
    Version: V1
"""

# region Imports
from fractions import Fraction
import math

from npuSim.models.NumericsModel import ACC48_MAX, ACC48_MIN, FIXED16_MAX, FIXED16_MIN, Rounding, ScaleSpec
# endregion


# region Scalar Rules
def requantize_oracle(value, scale: ScaleSpec):
    """Shift-and-round via exact rational arithmetic, then clamp to 16 bits."""
    value = min(max(value, ACC48_MIN), ACC48_MAX)
    exact = Fraction(value, 1 << scale.right_shift)
    if scale.rounding == Rounding.ROUND_HALF_UP:
        rounded = math.floor(exact + Fraction(1, 2))
    else:
        rounded = math.floor(exact)
    if not scale.saturate:
        rounded = (rounded + 0x8000) % 0x10000 - 0x8000
    return min(max(rounded, FIXED16_MIN), FIXED16_MAX)
# endregion


# region Operations
def gemm_oracle(a, b, scale: ScaleSpec = ScaleSpec()):
    m, k, n = len(a), len(b), len(b[0])
    c = [[0] * n for _ in range(m)]
    for i in range(m):
        for j in range(n):
            total = 0
            for t in range(k):
                total += a[i][t] * b[t][j]
            c[i][j] = requantize_oracle(total, scale)
    return c


def im2col(x, kernel_h, kernel_w, stride, padding):
    """x is [c][h][w]; returns (rows, out_h, out_w) with one row per (c, kh, kw) tap."""
    channels, height, width = len(x), len(x[0]), len(x[0][0])
    out_h = (height + 2 * padding - kernel_h) // stride + 1
    out_w = (width + 2 * padding - kernel_w) // stride + 1
    rows = []
    for c in range(channels):
        for i in range(kernel_h):
            for j in range(kernel_w):
                row = []
                for oy in range(out_h):
                    for ox in range(out_w):
                        y = oy * stride + i - padding
                        xx = ox * stride + j - padding
                        row.append(x[c][y][xx] if 0 <= y < height and 0 <= xx < width else 0)
                rows.append(row)
    return rows, out_h, out_w


def conv_oracle(x, w, stride=1, padding=0, scale: ScaleSpec = ScaleSpec()):
    """x [in_c][h][w], w [out_c][in_c][kh][kw] -> [out_c][out_h][out_w]."""
    kernel_h, kernel_w = len(w[0][0]), len(w[0][0][0])
    cols, out_h, out_w = im2col(x, kernel_h, kernel_w, stride, padding)
    flat_w = [[w[o][c][i][j] for c in range(len(w[0])) for i in range(kernel_h) for j in range(kernel_w)]
              for o in range(len(w))]
    flat = gemm_oracle(flat_w, cols, scale)
    return [[flat[o][oy * out_w:(oy + 1) * out_w] for oy in range(out_h)] for o in range(len(w))]


def pool_oracle(x, window_h, window_w, stride, mode="max"):
    """x [c][h][w] -> [c][out_h][out_w]; avg truncates toward zero."""
    out = []
    for plane in x:
        out_h = (len(plane) - window_h) // stride + 1
        out_w = (len(plane[0]) - window_w) // stride + 1
        rows = []
        for oy in range(out_h):
            row = []
            for ox in range(out_w):
                window = [plane[oy * stride + i][ox * stride + j] for i in range(window_h) for j in range(window_w)]
                if mode == "max":
                    row.append(max(window))
                else:
                    total = sum(window)
                    quotient = abs(total) // len(window)
                    row.append(-quotient if total < 0 else quotient)
            rows.append(row)
        out.append(rows)
    return out


def relu_oracle(values):
    return [v if v > 0 else 0 for v in values]


def beat_count(m, n, k, mac_units):
    """Cycles to issue m*n*k MACs, counted one beat at a time."""
    beats, lanes_used = 0, mac_units
    for _ in range(m * n * k):
        if lanes_used == mac_units:
            beats += 1
            lanes_used = 0
        lanes_used += 1
    return beats
# endregion

"""Periodic-box pseudospectral discretization of R^N (N = 1 or 2).

The box is [-L, L)^N with n nodes per axis; the origin is node n/2. Fields
live in value space and are transformed with the real-input FFT. All
integrals are rectangle-rule sums, which are spectrally accurate for smooth
periodic integrands.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

__all__ = [
    "Grid",
    "Field",
    "default_grid",
    "frac_laplacian",
    "apply_L",
    "apply_L_inverse",
    "spectral_derivative",
    "inner",
    "integrate",
    "coefficient_norm_sq",
    "sobolev_quotient",
    "write_field",
    "read_field",
    "write_csv",
]

HEADER = struct.Struct("<qqdd")  # N, n, L, s: 32 bytes


@dataclass(frozen=True, eq=False)
class Grid:
    N: int
    n: int
    L: float

    def __post_init__(self):
        if self.N not in (1, 2):
            raise ValueError(f"only N = 1 or 2 is supported, got {self.N}")
        if self.n < 8 or self.n & (self.n - 1):
            raise ValueError(f"n must be a power of two >= 8, got {self.n}")
        if not self.L > 0:
            raise ValueError(f"L must be positive, got {self.L}")

    @property
    def dx(self) -> float:
        return 2 * self.L / self.n

    @property
    def shape(self) -> tuple:
        return (self.n,) * self.N

    @property
    def cell(self) -> float:
        """Quadrature weight dx^N."""
        return self.dx**self.N

    @cached_property
    def x(self) -> np.ndarray:
        """Node coordinates along one axis, -L, ..., L - dx."""
        return -self.L + self.dx * np.arange(self.n)

    @cached_property
    def coords(self) -> tuple:
        return tuple(np.meshgrid(*([self.x] * self.N), indexing="ij"))

    @cached_property
    def radius(self) -> np.ndarray:
        return np.sqrt(sum(c**2 for c in self.coords))

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """ξ_j = πj/L in FFT order, j = 0..n/2-1, -n/2..-1."""
        return np.pi * np.fft.fftfreq(self.n, d=1.0 / self.n) / self.L

    @cached_property
    def _axes_k(self) -> tuple:
        """Per-axis wavenumbers in the rfftn layout (last axis halved)."""
        full = self.wavenumbers
        half = np.pi * np.arange(self.n // 2 + 1) / self.L
        if self.N == 1:
            return (half,)
        return np.meshgrid(full, half, indexing="ij")

    @cached_property
    def xi_abs(self) -> np.ndarray:
        """|ξ| on the rfftn layout; the Nyquist entry keeps its magnitude πn/(2L)."""
        return np.sqrt(sum(k**2 for k in self._axes_k))

    @cached_property
    def rfft_weights(self) -> np.ndarray:
        """Multiplicity of each rfftn coefficient in the full spectrum."""
        w = np.full(self.xi_abs.shape, 2.0)
        w[..., 0] = 1.0
        w[..., -1] = 1.0
        return w

    def symbol(self, s: float) -> np.ndarray:
        """|ξ|^{2s} on the rfftn layout, with the zero mode mapped to 0."""
        with np.errstate(divide="ignore"):
            out = self.xi_abs ** (2 * s)
        out.flat[0] = 0.0
        return out

    def forward(self, values: np.ndarray) -> np.ndarray:
        return np.fft.rfftn(values)

    def backward(self, coeffs: np.ndarray) -> np.ndarray:
        return np.fft.irfftn(coeffs, s=self.shape, axes=tuple(range(self.N)))

    def apply_symbol(self, values: np.ndarray, symbol: np.ndarray) -> np.ndarray:
        return self.backward(symbol * self.forward(values))

    def field(self, values) -> Field:
        return Field(self, values)

    def __repr__(self):
        return f"Grid(N={self.N}, n={self.n}, L={self.L})"


def default_grid(N: int = 1) -> Grid:
    """n = 8192, L = 256 in 1D; n = 256, L = 64 per axis in 2D."""
    if N == 1:
        return Grid(1, 8192, 256.0)
    return Grid(2, 256, 64.0)


class Field:
    """Real values on a grid. The array is copied and frozen on construction."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values):
        arr = np.array(values, dtype=float).reshape(grid.shape)
        if not np.all(np.isfinite(arr)):
            raise ValueError("field values must be finite")
        arr.flags.writeable = False
        self.grid = grid
        self.values = arr

    def with_values(self, values) -> Field:
        return Field(self.grid, values)

    def __add__(self, other):
        return self.with_values(self.values + _values(other))

    def __sub__(self, other):
        return self.with_values(self.values - _values(other))

    def __mul__(self, c):
        return self.with_values(self.values * _values(c))

    __rmul__ = __mul__

    def __neg__(self):
        return self.with_values(-self.values)

    def norm(self) -> float:
        """L² norm by quadrature."""
        return float(np.sqrt(self.grid.cell * np.sum(self.values**2)))

    def __repr__(self):
        return f"Field({self.grid!r}, max={self.values.max():.6g})"


def _values(x):
    return x.values if isinstance(x, Field) else x


def frac_laplacian(field: Field, s: float) -> Field:
    """(-Δ)^s as the Fourier multiplier |ξ|^{2s}."""
    g = field.grid
    return field.with_values(g.apply_symbol(field.values, g.symbol(s)))


def apply_L(field: Field, s: float) -> Field:
    """(-Δ)^s + 1."""
    g = field.grid
    return field.with_values(g.apply_symbol(field.values, 1 + g.symbol(s)))


def apply_L_inverse(field: Field, s: float) -> Field:
    """((-Δ)^s + 1)^{-1}, the exact inverse of :func:`apply_L` on the grid."""
    g = field.grid
    return field.with_values(g.apply_symbol(field.values, 1 / (1 + g.symbol(s))))


def spectral_derivative(field: Field, axis: int = 0) -> Field:
    """∂/∂x_axis by Fourier differentiation (Nyquist mode zeroed)."""
    g = field.grid
    k = g._axes_k[axis].copy()
    if axis == g.N - 1:
        k[..., -1] = 0.0
    else:
        k[g.n // 2, ...] = 0.0
    return field.with_values(g.backward(1j * k * g.forward(field.values)))


def integrate(field_or_values, grid: Grid | None = None) -> float:
    if isinstance(field_or_values, Field):
        grid, values = field_or_values.grid, field_or_values.values
    else:
        values = field_or_values
    return float(grid.cell * np.sum(values))


def inner(u: Field, v: Field) -> float:
    return float(u.grid.cell * np.sum(u.values * v.values))


def coefficient_norm_sq(field: Field, symbol: np.ndarray | None = None) -> float:
    """∫ m(ξ)|û|² computed from the FFT coefficients (Parseval); m = 1 by default."""
    g = field.grid
    c = np.abs(g.forward(field.values)) ** 2 * g.rfft_weights
    if symbol is not None:
        c = c * symbol
    return float(g.cell * np.sum(c) / g.n**g.N)


def sobolev_quotient(u: Field, s: float, p: float) -> float:
    """∫(1+|ξ|^{2s})|û|² / (∫|u|^{2p})^{1/p}."""
    den = integrate(np.abs(u.values) ** (2 * p), u.grid)
    if den == 0:
        raise ZeroDivisionError("sobolev_quotient of the zero field")
    num = coefficient_norm_sq(u, 1 + u.grid.symbol(s))
    return num / den ** (1 / p)


def write_field(path, field: Field, s: float) -> None:
    """Binary dump: 32-byte little-endian header (N, n, L, s) then float64 values."""
    g = field.grid
    with open(path, "wb") as fh:
        fh.write(HEADER.pack(g.N, g.n, float(g.L), float(s)))
        fh.write(np.ascontiguousarray(field.values, dtype="<f8").tobytes())


def read_field(path):
    """Inverse of :func:`write_field`; returns ``(field, s)``."""
    raw = Path(path).read_bytes()
    N, n, L, s = HEADER.unpack_from(raw)
    grid = Grid(int(N), int(n), float(L))
    values = np.frombuffer(raw, dtype="<f8", offset=HEADER.size)
    if values.size != n**N:
        raise ValueError(f"expected {n**N} values, found {values.size}")
    return Field(grid, values), s


def write_csv(path, field: Field) -> None:
    """Two-column (x, value) CSV for a 1D field, 17 significant digits."""
    if field.grid.N != 1:
        raise ValueError("CSV export is only defined for N = 1")
    data = np.column_stack([field.grid.x, field.values])
    np.savetxt(path, data, delimiter=",", header="x,value", comments="", fmt="%.17g")

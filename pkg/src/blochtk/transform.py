"""Desk-scale Bloch-Floquet transform on compactly supported 1-D samples.

U f(r, k) = sum_m f(r + m*gamma) e^{-i k m gamma} for r in one base cell;
the sum is finite because the samples live on a truncation box (f is treated
as 0 outside).  Inversion is the uniform average over the reciprocal cell,
which is exact once the k-grid resolves every occupied shell.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError
from .lattice import Lattice1D


@dataclass(frozen=True)
class SampledFunction:
    lattice: Lattice1D
    x0: float
    spacing: float
    samples: np.ndarray

    def __post_init__(self):
        cells = self.lattice.gamma / self.spacing
        if abs(cells - round(cells)) > 1e-9:
            raise ValueError("grid spacing must divide the period exactly")
        if self.samples.ndim != 1:
            raise ValueError("one-dimensional samples expected")

    @property
    def per_cell(self) -> int:
        return int(round(self.lattice.gamma / self.spacing))

    @property
    def grid(self) -> np.ndarray:
        return self.x0 + np.arange(self.samples.size) * self.spacing

    def norm_squared(self) -> float:
        return float(self.spacing * np.sum(np.abs(self.samples) ** 2))


def from_callable(f, lattice: Lattice1D, cells: int, per_cell: int = 64,
                  x0: float = 0.0) -> SampledFunction:
    """Sample f on `cells` consecutive cells at per_cell points each."""
    h = lattice.gamma / per_cell
    xs = x0 + np.arange(cells * per_cell) * h
    return SampledFunction(lattice, x0, h, np.asarray(f(xs), dtype=complex))


@dataclass(frozen=True)
class TransformField:
    function: SampledFunction
    r_points: np.ndarray
    k_points: np.ndarray
    values: np.ndarray  # shape (len(r_points), len(k_points))
    shells: int


def _cell_stack(f: SampledFunction, shells: int) -> tuple[np.ndarray, np.ndarray]:
    """f(r + m*gamma) for the base-cell r grid, m = -shells..shells, zero-padded."""
    n = f.per_cell
    ms = np.arange(-shells, shells + 1)
    stack = np.zeros((len(ms), n), dtype=complex)
    for row, m in enumerate(ms):
        lo = m * n
        hi = lo + n
        src_lo, src_hi = max(lo, 0), min(hi, f.samples.size)
        if src_lo < src_hi:
            stack[row, src_lo - lo:src_hi - lo] = f.samples[src_lo:src_hi]
    return stack, ms


def _tail_bound(f: SampledFunction, shells: int) -> float:
    n = f.per_cell
    covered = (shells + 1) * n
    tail = f.samples[covered:]
    return float(np.max(np.abs(tail))) if tail.size else 0.0


def bloch_floquet(f: SampledFunction, k_points: np.ndarray,
                  shells: int | None = None) -> TransformField:
    """Transform values on the base cell [x0, x0 + gamma) at the given k points."""
    n_cells = f.samples.size // f.per_cell + (f.samples.size % f.per_cell > 0)
    if shells is None:
        shells = n_cells
    peak = float(np.max(np.abs(f.samples)))
    tail = _tail_bound(f, shells)
    if peak > 0 and tail > 1e-15 * peak:
        raise AccuracyError("samples extend beyond the shell radius",
                            achieved=tail / peak)
    k_points = np.atleast_1d(np.asarray(k_points, dtype=float))
    stack, ms = _cell_stack(f, shells)
    gamma = f.lattice.gamma
    phases = np.exp(-1j * np.outer(ms * gamma, k_points))  # (m, k)
    values = stack.T @ phases  # (r, k)
    rs = f.x0 + np.arange(f.per_cell) * f.spacing
    return TransformField(f, rs, k_points, values, int(shells))


def check_properties(field: TransformField) -> dict:
    """Deviations from r-quasi-periodicity and k-periodicity of the field."""
    f = field.function
    gamma = f.lattice.gamma
    ks = field.k_points
    # r-shift: U f(r + gamma, k) must equal e^{i k gamma} U f(r, k);
    # the shifted column is the same lattice sum with the shells re-indexed
    stack, ms = _cell_stack(f, field.shells + 1)
    phases = np.exp(-1j * np.outer(ms * gamma, ks))
    base = stack.T @ phases
    shifted_stack = stack[1:]           # f(r + gamma + m*gamma) = row for m+1
    shifted = shifted_stack.T @ phases[:-1]
    dev_r = float(np.max(np.abs(shifted - np.exp(1j * ks * gamma) * base)))
    # k-shift by one reciprocal period
    again = bloch_floquet(f, ks + f.lattice.modulus, field.shells)
    dev_k = float(np.max(np.abs(again.values - field.values)))
    scale = max(1e-300, float(np.max(np.abs(field.values))))
    return {"r_quasiperiodicity": dev_r / scale, "k_periodicity": dev_k / scale}


def invert(field: TransformField, quadrature_n: int = 64,
           tol: float | None = None) -> tuple[SampledFunction, float]:
    """Reciprocal-cell average reconstruction; returns (samples, max error)."""
    f = field.function
    gamma = f.lattice.gamma
    if quadrature_n < 2 * field.shells + 1:
        raise ValueError("quadrature must resolve every occupied shell")
    ks = (f.lattice.modulus / quadrature_n) * np.arange(quadrature_n) - math.pi / gamma
    fine = bloch_floquet(f, ks, field.shells)
    n = f.per_cell
    n_cells = -(-f.samples.size // n)
    rec = np.zeros(n_cells * n, dtype=complex)
    for m in range(n_cells):
        weights = np.exp(1j * ks * m * gamma) / quadrature_n
        rec[m * n:(m + 1) * n] = fine.values @ weights
    rec = rec[:f.samples.size]
    err = float(np.max(np.abs(rec - f.samples)))
    if tol is not None and err > tol:
        raise AccuracyError("inversion error above tolerance", achieved=err)
    return SampledFunction(f.lattice, f.x0, f.spacing, rec), err


def parseval_deviation(field: TransformField, quadrature_n: int = 64) -> float:
    """Relative gap between cell-summed |f|^2 and the k-averaged field energy."""
    f = field.function
    ks = (f.lattice.modulus / quadrature_n) * np.arange(quadrature_n)
    fine = bloch_floquet(f, ks, field.shells)
    lhs = f.norm_squared()
    rhs = float(f.spacing * np.sum(np.abs(fine.values) ** 2) / quadrature_n)
    return abs(lhs - rhs) / max(lhs, 1e-300)

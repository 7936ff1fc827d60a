"""Fundamental-system propagation for  -y'' + W y' + V y = lam y.

The two-column fundamental system X(x) (X(a) = I in the (y, y') phase
variables) is advanced with an embedded Dormand-Prince 5(4) pair on plain
tuples of four complex scalars.  Coefficient breakpoints are hard segment
boundaries: within a segment the frozen analytic expression is used, so
stage evaluations at a segment's right endpoint see the left limit.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np

from .coeffs import PeriodicCoefficient
from .errors import IntegrationError
from .lattice import Lattice1D

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

_MAX_STEPS = 2_000_000


@dataclass(frozen=True)
class Problem1D:
    """One-dimensional problem -y'' + W y' + V y = lam y with period-gamma W, V."""
    lattice: Lattice1D
    w: PeriodicCoefficient
    v: PeriodicCoefficient

    def __post_init__(self):
        g = self.lattice.gamma
        for c in (self.w, self.v):
            if abs(c.period - g) > 1e-12 * g:
                raise ValueError("coefficient period must equal the lattice period")


def system_matrix(p: Problem1D, lam: complex, x: float) -> np.ndarray:
    """First-order system matrix [[0, 1], [V(x) - lam, W(x)]] at x."""
    return np.array([[0.0, 1.0], [p.v.evaluate(x) - lam, p.w.evaluate(x)]],
                    dtype=complex)


@dataclass(frozen=True)
class TransferMatrix:
    """Propagator of (y, y') from x=a to x=b, with a worst-case error estimate."""
    matrix: np.ndarray
    a: float
    b: float
    error_estimate: float
    steps: int

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        if abs(self.a - other.b) > 1e-12 * (1.0 + abs(self.a)):
            raise ValueError("transfer matrices do not compose: interval mismatch")
        return TransferMatrix(self.matrix @ other.matrix, other.a, self.b,
                              self.error_estimate + other.error_estimate,
                              self.steps + other.steps)


def _segment_fn(coeff: PeriodicCoefficient, s0: float, s1: float):
    """Scalar evaluator valid on [s0, s1], frozen to one analytic piece."""
    if coeff.kind != "piecewise":
        return coeff.evaluator()
    mid = 0.5 * (s0 + s1)
    m = math.floor(mid / coeff.period)
    xr = mid - m * coeff.period
    starts = [s[0] for s in coeff.segments]
    expr = coeff.segments[bisect.bisect_right(starts, xr) - 1][2]
    shift = m * coeff.period
    return lambda x, _e=expr, _s=shift: _e.at(x - _s)


def _checkpoints(w, v, a, b, outputs):
    pts = {a, b}
    pts.update(w.breakpoints_in(a, b))
    pts.update(v.breakpoints_in(a, b))
    breaks = sorted(pts)
    if outputs is not None:
        pts.update(float(t) for t in outputs)
    merged = sorted(pts)
    dedup = [merged[0]]
    for t in merged[1:]:
        if t - dedup[-1] > 1e-14 * max(1.0, abs(b - a)):
            dedup.append(t)
    return dedup, breaks


class _Stepper:
    """Controlled DP5(4) stepping of a 4-component complex state."""

    def __init__(self, rtol: float, atol: float, span: float):
        self.rtol = rtol
        self.atol = atol
        self.h = None
        self.span = span
        self.err_acc = 0.0
        self.steps = 0

    def advance(self, f, x0, x1, y):
        """Integrate y' = f(x, y) from x0 to x1 (x1 > x0). Returns final state."""
        rtol, atol = self.rtol, self.atol
        h = self.h if self.h is not None else (x1 - x0) / 16.0
        h = min(h, x1 - x0)
        x = x0
        k = [None] * 7
        while x < x1:
            if self.steps > _MAX_STEPS:
                raise IntegrationError("step budget exhausted", location=x)
            if h < 1e-14 * self.span:
                raise IntegrationError("step size underflow", location=x)
            h = min(h, x1 - x)
            k[0] = f(x, y)
            for i in range(1, 7):
                a = _A[i]
                yi = tuple(y[j] + h * sum(a[m] * k[m][j] for m in range(i))
                           for j in range(4))
                k[i] = f(x + _C[i] * h, yi)
            ynew = tuple(y[j] + h * sum(_B5[m] * k[m][j] for m in range(7))
                         for j in range(4))
            emax = 0.0
            rel = 0.0
            for j in range(4):
                e = abs(h * sum(_E[m] * k[m][j] for m in range(7)))
                sc = atol + rtol * max(abs(y[j]), abs(ynew[j]))
                rel = max(rel, e / sc)
                emax = max(emax, e)
            self.steps += 1
            if rel <= 1.0:
                x += h
                y = ynew
                self.err_acc += emax
                h *= min(5.0, max(0.2, 0.9 * rel ** -0.2 if rel > 0 else 5.0))
            else:
                h *= max(0.2, 0.9 * rel ** -0.2)
        self.h = h
        return y


def _solve_path(w: PeriodicCoefficient, v: PeriodicCoefficient, lam: complex,
                a: float, b: float, y0, rtol: float, atol: float, outputs=None):
    """Advance the 4-state from a to b, recording values at the output points."""
    if b <= a:
        raise ValueError("need b > a")
    checkpoints, breaks = _checkpoints(w, v, a, b, outputs)
    want = None
    if outputs is not None:
        want = [float(t) for t in outputs]
        recorded = [None] * len(want)
    tol = 1e-12 * max(1.0, abs(b - a))

    def _record(t, state):
        i = bisect.bisect_left(want, t - tol)
        if i < len(want) and abs(want[i] - t) <= tol:
            recorded[i] = state

    stepper = _Stepper(rtol, atol, b - a)
    y = tuple(complex(c) for c in y0)
    seg_idx = 0
    fw = fv = None
    seg_end = -math.inf
    x = checkpoints[0]
    if want is not None:
        _record(x, y)
    for x1 in checkpoints[1:]:
        if x1 > seg_end:  # crossed into the next smooth piece
            while seg_idx + 1 < len(breaks) and breaks[seg_idx + 1] <= x + 1e-14 * (b - a):
                seg_idx += 1
            s0, s1 = breaks[seg_idx], breaks[seg_idx + 1]
            fw = _segment_fn(w, s0, s1)
            fv = _segment_fn(v, s0, s1)
            seg_end = s1

            def f(t, u, _fw=fw, _fv=fv, _lam=lam):
                ww = _fw(t)
                vv = _fv(t) - _lam
                return (u[1], ww * u[1] + vv * u[0], u[3], ww * u[3] + vv * u[2])
        y = stepper.advance(f, x, x1, y)
        x = x1
        if want is not None:
            _record(x1, y)
    result = recorded if want is not None else None
    return y, result, stepper.err_acc, stepper.steps


def propagate_fundamental(w: PeriodicCoefficient, v: PeriodicCoefficient,
                          lam: complex, a: float = 0.0, b: float | None = None,
                          rtol: float = 1e-10, atol: float = 1e-12) -> TransferMatrix:
    """Transfer matrix of the fundamental system from a to b (default one period of V)."""
    if b is None:
        b = a + v.period
    y, _, err, steps = _solve_path(w, v, lam, a, b, (1, 0, 0, 1), rtol, atol)
    m = np.array([[y[0], y[2]], [y[1], y[3]]], dtype=complex)
    norm = max(1.0, float(np.max(np.abs(m))))
    return TransferMatrix(m, a, b, max(err, 1e-15) * norm, steps)


def fundamental_on_grid(w: PeriodicCoefficient, v: PeriodicCoefficient,
                        lam: complex, xs: np.ndarray,
                        rtol: float = 1e-10, atol: float = 1e-12) -> np.ndarray:
    """X(x) at each grid point, normalized to X(xs[0]) = I.  xs must be increasing."""
    xs = np.asarray(xs, dtype=float)
    if xs.size < 2 or np.any(np.diff(xs) <= 0):
        raise ValueError("output grid must be strictly increasing with >= 2 points")
    _, rec, _, _ = _solve_path(w, v, lam, xs[0], xs[-1], (1, 0, 0, 1),
                               rtol, atol, outputs=xs)
    out = np.empty((xs.size, 2, 2), dtype=complex)
    for i, y in enumerate(rec):
        if y is None:
            raise IntegrationError("output point was not reached", location=xs[i])
        out[i] = [[y[0], y[2]], [y[1], y[3]]]
    return out


def propagate_solution(w: PeriodicCoefficient, v: PeriodicCoefficient,
                       lam: complex, y0: tuple[complex, complex], xs: np.ndarray,
                       rtol: float = 1e-10, atol: float = 1e-12) -> np.ndarray:
    """(y, y') samples along xs for the initial data y0 = (y(xs[0]), y'(xs[0]))."""
    grid = fundamental_on_grid(w, v, lam, xs, rtol, atol)
    vec = np.array(y0, dtype=complex)
    return grid @ vec


def propagate(p: Problem1D, lam: complex, x0: float, x1: float,
              rtol: float = 1e-10, atol: float = 1e-12) -> TransferMatrix:
    """Transfer matrix of problem p from x0 to x1."""
    return propagate_fundamental(p.w, p.v, lam, x0, x1, rtol, atol)


def solution_samples(p: Problem1D, lam: complex, init: tuple[complex, complex],
                     grid: np.ndarray, rtol: float = 1e-10,
                     atol: float = 1e-12) -> np.ndarray:
    """(psi, psi') pairs on the grid for initial data at grid[0]."""
    return propagate_solution(p.w, p.v, lam, init, grid, rtol, atol)

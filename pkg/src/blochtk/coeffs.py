"""Period-gamma coefficient functions W and V.

A coefficient is either a constant, a finite Fourier series, or a piecewise
expression built from a closed catalog of segment forms (polynomial,
second-order rational pole, exponential-trig).  Segments are left-closed /
right-open, so evaluation at a breakpoint returns the right-limit value.
All values are immutable; evaluation is pure.
"""
from __future__ import annotations

import bisect
import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import AccuracyError

_BREAK_TOL = 1e-14


@dataclass(frozen=True)
class Polynomial:
    """c0 + c1*x + c2*x**2 + ..."""
    coefficients: tuple[complex, ...]

    def at(self, x: float) -> complex:
        acc = 0.0 + 0.0j
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def many(self, x: np.ndarray) -> np.ndarray:
        acc = np.zeros_like(x, dtype=complex)
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def is_real(self) -> bool:
        return all(complex(c).imag == 0.0 for c in self.coefficients)


@dataclass(frozen=True)
class RationalPole:
    """alpha/(x - beta)**2 + delta/(x - beta); the pole must lie off the segment."""
    alpha: complex
    beta: float
    delta: complex

    def at(self, x: float) -> complex:
        u = x - self.beta
        return self.alpha / (u * u) + self.delta / u

    def many(self, x: np.ndarray) -> np.ndarray:
        u = x - self.beta
        return self.alpha / (u * u) + self.delta / u

    def is_real(self) -> bool:
        return complex(self.alpha).imag == 0.0 and complex(self.delta).imag == 0.0


@dataclass(frozen=True)
class ExpTrig:
    """amplitude * exp(rate*x) * cos(frequency*x + phase)."""
    amplitude: complex
    rate: complex
    frequency: float
    phase: float = 0.0

    def at(self, x: float) -> complex:
        return self.amplitude * cmath.exp(self.rate * x) * math.cos(self.frequency * x + self.phase)

    def many(self, x: np.ndarray) -> np.ndarray:
        return self.amplitude * np.exp(self.rate * x) * np.cos(self.frequency * x + self.phase)

    def is_real(self) -> bool:
        return complex(self.amplitude).imag == 0.0 and complex(self.rate).imag == 0.0


_EXPRESSION_TYPES = (Polynomial, RationalPole, ExpTrig)


@dataclass(frozen=True)
class PeriodicCoefficient:
    period: float
    kind: str  # "constant" | "fourier" | "piecewise"
    constant_value: complex | None = None
    fourier_coefficients: tuple[complex, ...] | None = None  # c_{-M} .. c_{M}
    segments: tuple[tuple[float, float, object], ...] | None = None
    real_flag: bool = False

    # -- constructors ------------------------------------------------------
    @classmethod
    def constant(cls, value, period: float) -> "PeriodicCoefficient":
        value = complex(value)
        return cls(period=float(period), kind="constant", constant_value=value,
                   real_flag=(value.imag == 0.0))

    @classmethod
    def fourier(cls, coefficients, period: float) -> "PeriodicCoefficient":
        coeffs = tuple(complex(c) for c in coefficients)
        if len(coeffs) % 2 != 1:
            raise ValueError("fourier coefficients must be indexed -M..M (odd count)")
        m = len(coeffs) // 2
        hermitian = all(
            abs(coeffs[m - i] - coeffs[m + i].conjugate()) <= 1e-15 * (1 + abs(coeffs[m + i]))
            for i in range(m + 1))
        return cls(period=float(period), kind="fourier", fourier_coefficients=coeffs,
                   real_flag=hermitian)

    @classmethod
    def piecewise(cls, breakpoints, expressions, period: float) -> "PeriodicCoefficient":
        period = float(period)
        bps = [float(b) for b in breakpoints]
        if len(bps) != len(expressions) + 1:
            raise ValueError("need one more breakpoint than segment expressions")
        if abs(bps[0]) > _BREAK_TOL or abs(bps[-1] - period) > _BREAK_TOL * max(1.0, period):
            raise ValueError("breakpoints must start at 0 and end at the period")
        if any(b1 <= b0 for b0, b1 in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        segs = []
        for (b0, b1), expr in zip(zip(bps, bps[1:]), expressions):
            if not isinstance(expr, _EXPRESSION_TYPES):
                raise ValueError(f"unsupported segment expression {type(expr).__name__}")
            if isinstance(expr, RationalPole) and b0 <= expr.beta <= b1:
                raise ValueError("rational pole lies inside its segment")
            segs.append((b0, b1, expr))
        real = all(s[2].is_real() for s in segs)
        return cls(period=period, kind="piecewise", segments=tuple(segs), real_flag=real)

    def __post_init__(self):
        if self.period <= 0 or not math.isfinite(self.period):
            raise ValueError("coefficient period must be finite and positive")

    # -- evaluation --------------------------------------------------------
    def _wrap(self, x: float) -> float:
        xr = x - self.period * math.floor(x / self.period)
        if xr >= self.period:  # rounding guard
            xr -= self.period
        return xr

    def _segment_index(self, xr: float, left: bool) -> tuple[int, float]:
        starts = [s[0] for s in self.segments]
        idx = bisect.bisect_right(starts, xr) - 1
        if left:
            b0 = self.segments[idx][0]
            if abs(xr - b0) <= _BREAK_TOL * max(1.0, self.period):
                idx -= 1
                if idx < 0:
                    idx = len(self.segments) - 1
                    xr += self.period
                xr = self.segments[idx][1] + (xr - self.segments[idx][1])
        return idx, xr

    def evaluate(self, x: float, left: bool = False) -> complex:
        """Value of the gamma-periodized coefficient at x.

        At a breakpoint the right-limit value is returned; pass ``left=True``
        for the left limit instead.
        """
        if not math.isfinite(x):
            raise ValueError(f"evaluation point must be finite, got {x!r}")
        if self.kind == "constant":
            return self.constant_value
        xr = self._wrap(x)
        if self.kind == "fourier":
            m = len(self.fourier_coefficients) // 2
            w = 2.0j * math.pi / self.period
            return sum(c * cmath.exp(w * (j - m) * xr)
                       for j, c in enumerate(self.fourier_coefficients))
        if left and xr == 0.0:
            xr = self.period
            idx = len(self.segments) - 1
        else:
            idx, xr = self._segment_index(xr, left)
        return self.segments[idx][2].at(xr)

    def evaluate_array(self, x: np.ndarray) -> np.ndarray:
        """Vectorized right-continuous evaluation."""
        x = np.asarray(x, dtype=float)
        xr = x - self.period * np.floor(x / self.period)
        xr[xr >= self.period] -= self.period
        if self.kind == "constant":
            return np.full_like(xr, self.constant_value, dtype=complex)
        if self.kind == "fourier":
            m = len(self.fourier_coefficients) // 2
            w = 2.0j * math.pi / self.period
            out = np.zeros_like(xr, dtype=complex)
            for j, c in enumerate(self.fourier_coefficients):
                if c != 0:
                    out += c * np.exp(w * (j - m) * xr)
            return out
        out = np.empty_like(xr, dtype=complex)
        starts = np.array([s[0] for s in self.segments])
        idx = np.searchsorted(starts, xr, side="right") - 1
        for i, (_, _, expr) in enumerate(self.segments):
            mask = idx == i
            if mask.any():
                out[mask] = expr.many(xr[mask])
        return out

    def evaluator(self):
        """Fast scalar evaluator (closure) for the integrator hot loop."""
        if self.kind == "constant":
            c = self.constant_value
            return lambda x: c
        if self.kind == "fourier":
            per = self.period
            coeffs = self.fourier_coefficients
            m = len(coeffs) // 2
            if self.real_flag:
                c0 = coeffs[m].real
                terms = [(2.0 * math.pi * j / per, 2.0 * coeffs[m + j].real,
                          -2.0 * coeffs[m + j].imag)
                         for j in range(1, m + 1) if coeffs[m + j] != 0]

                def _eval_real(x, _c0=c0, _terms=terms, _cos=math.cos, _sin=math.sin):
                    v = _c0
                    for w, a, b in _terms:
                        v += a * _cos(w * x) + b * _sin(w * x)
                    return v
                return _eval_real
            w = 2.0j * math.pi / per
            ms = [(j - m, c) for j, c in enumerate(coeffs) if c != 0]

            def _eval_cplx(x, _ms=ms, _w=w, _exp=cmath.exp):
                return sum(c * _exp(_w * n * x) for n, c in _ms)
            return _eval_cplx

        per = self.period
        starts = [s[0] for s in self.segments]
        exprs = [s[2] for s in self.segments]

        def _eval_pw(x, _starts=starts, _exprs=exprs, _per=per,
                     _floor=math.floor, _bisect=bisect.bisect_right):
            xr = x - _per * _floor(x / _per)
            if xr >= _per:
                xr -= _per
            return _exprs[_bisect(_starts, xr) - 1].at(xr)
        return _eval_pw

    # -- integrals and breakpoints ----------------------------------------
    def mean(self) -> complex:
        """(1/gamma) * integral over one period."""
        if self.kind == "constant":
            return self.constant_value
        if self.kind == "fourier":
            return self.fourier_coefficients[len(self.fourier_coefficients) // 2]
        total = 0.0 + 0.0j
        worst = 0.0
        for b0, b1, expr in self.segments:
            re, ere = quad(lambda t: expr.at(t).real, b0, b1, epsabs=1e-13, epsrel=1e-12, limit=200)
            im, eim = quad(lambda t: expr.at(t).imag, b0, b1, epsabs=1e-13, epsrel=1e-12, limit=200)
            total += complex(re, im)
            worst = max(worst, ere, eim)
        value = total / self.period
        if worst / self.period > 1e-10 * (1.0 + abs(value)):
            raise AccuracyError("quadrature for mean did not converge", achieved=worst / self.period)
        return value

    def breakpoints_in(self, a: float, b: float) -> list[float]:
        """All periodized breakpoints in [a, b], sorted, deduplicated."""
        if a > b:
            raise ValueError("need a <= b")
        if self.kind != "piecewise":
            return []
        reps = sorted({s[0] for s in self.segments})
        out = []
        m_lo = math.floor(a / self.period) - 1
        m_hi = math.ceil(b / self.period) + 1
        for m in range(m_lo, m_hi + 1):
            for r in reps:
                t = r + m * self.period
                if a - _BREAK_TOL <= t <= b + _BREAK_TOL:
                    out.append(min(max(t, a), b))
        out.sort()
        dedup: list[float] = []
        for t in out:
            if not dedup or t - dedup[-1] > _BREAK_TOL:
                dedup.append(t)
        return dedup


def is_zero_coefficient(c: PeriodicCoefficient) -> bool:
    """True when the coefficient vanishes identically (checked structurally and on a grid)."""
    if c.kind == "constant":
        return c.constant_value == 0
    if c.kind == "fourier":
        return all(v == 0 for v in c.fourier_coefficients)
    xs = np.linspace(0.0, c.period, 64, endpoint=False)
    return bool(np.max(np.abs(c.evaluate_array(xs))) < 1e-14)


# -- built-in coefficient builders ----------------------------------------

def zero_coefficient(period: float) -> PeriodicCoefficient:
    return PeriodicCoefficient.constant(0.0, period)


def mathieu_potential(q: float) -> PeriodicCoefficient:
    """V(x) = 2*q*cos(2*x) with period pi."""
    return PeriodicCoefficient.fourier([q, 0.0, q], math.pi)


def kronig_penney_potential(v0: float, barrier_width: float, period: float) -> PeriodicCoefficient:
    """Square barrier of height v0 on [0, barrier_width), zero on the rest of the cell."""
    if not 0 < barrier_width < period:
        raise ValueError("barrier width must lie strictly inside the period")
    return PeriodicCoefficient.piecewise(
        [0.0, barrier_width, period],
        [Polynomial((complex(v0),)), Polynomial((0.0 + 0.0j,))],
        period)


def intro_counterexample_potential() -> PeriodicCoefficient:
    """Period-1 potential 2/(x-n-1)**2 - 2/(x-n-1) on n-1 <= x < n (units with hbar**2/2m = 1)."""
    return PeriodicCoefficient.piecewise(
        [0.0, 1.0], [RationalPole(2.0, 2.0, -2.0)], 1.0)


# -- JSON (de)serialization ------------------------------------------------

def _c2j(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _j2c(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    return complex(v[0], v[1])


def coefficient_to_json(c: PeriodicCoefficient) -> dict:
    out = {"period": c.period, "kind": c.kind}
    if c.kind == "constant":
        out["value"] = _c2j(c.constant_value)
    elif c.kind == "fourier":
        out["coefficients"] = [_c2j(v) for v in c.fourier_coefficients]
    else:
        out["breakpoints"] = [s[0] for s in c.segments] + [c.segments[-1][1]]
        segs = []
        for _, _, expr in c.segments:
            if isinstance(expr, Polynomial):
                segs.append({"type": "polynomial",
                             "coefficients": [_c2j(v) for v in expr.coefficients]})
            elif isinstance(expr, RationalPole):
                segs.append({"type": "rational", "alpha": _c2j(expr.alpha),
                             "beta": expr.beta, "delta": _c2j(expr.delta)})
            else:
                segs.append({"type": "exptrig", "amplitude": _c2j(expr.amplitude),
                             "rate": _c2j(expr.rate), "frequency": expr.frequency,
                             "phase": expr.phase})
        out["segments"] = segs
    return out


def coefficient_from_json(spec: dict) -> PeriodicCoefficient:
    kind = spec["kind"]
    period = float(spec["period"])
    if kind == "constant":
        return PeriodicCoefficient.constant(_j2c(spec["value"]), period)
    if kind == "fourier":
        return PeriodicCoefficient.fourier([_j2c(v) for v in spec["coefficients"]], period)
    if kind == "piecewise":
        exprs = []
        for seg in spec["segments"]:
            t = seg["type"]
            if t == "polynomial":
                exprs.append(Polynomial(tuple(_j2c(v) for v in seg["coefficients"])))
            elif t == "rational":
                exprs.append(RationalPole(_j2c(seg["alpha"]), float(seg["beta"]),
                                          _j2c(seg["delta"])))
            elif t == "exptrig":
                exprs.append(ExpTrig(_j2c(seg["amplitude"]), _j2c(seg["rate"]),
                                     float(seg["frequency"]), float(seg.get("phase", 0.0))))
            else:
                raise ValueError(f"unknown segment type {t!r}")
        return PeriodicCoefficient.piecewise(spec["breakpoints"], exprs, period)
    raise ValueError(f"unknown coefficient kind {kind!r}")

"""Hill-discriminant band location and a plane-wave fiber oracle.

Restricted to W = 0 with real V, where D(lam) = tr M(lam) is real, bands are
the maximal intervals with |D| <= 2, and the fiber operators H(k) in a
truncated Fourier basis give a fully independent route to the same spectrum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq, minimize_scalar

from .coeffs import PeriodicCoefficient, is_zero_coefficient
from .errors import AccuracyError
from .floquet import (DEFAULT_TAU_EIG, DEFAULT_TAU_SCALAR, J1, J2,
                      jordan_classify, monodromy)
from .propagate import Problem1D

EDGE_DELEGATION_TOL = 1e-8  # |D -+ 2| below this: Jordan type decides the tag


def _require_real_hill(p: Problem1D):
    if not is_zero_coefficient(p.w):
        raise ValueError("discriminant analysis requires W = 0")
    if not p.v.real_flag:
        raise ValueError("discriminant analysis requires real V")


@dataclass(frozen=True)
class DiscriminantCurve:
    lambdas: np.ndarray
    values: np.ndarray
    problem: Problem1D


@dataclass(frozen=True)
class Band:
    lo: float
    hi: float
    index: int
    edge_kind_lo: str  # "periodic" | "antiperiodic" | "range"
    edge_kind_hi: str
    touching_lo: bool = False
    touching_hi: bool = False

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("band must have positive width")


@dataclass(frozen=True)
class BandStructure:
    bands: tuple[Band, ...]
    lambda_min: float
    lambda_max: float

    def gaps(self) -> list[tuple[float, float]]:
        return [(a.hi, b.lo) for a, b in zip(self.bands, self.bands[1:])
                if b.lo > a.hi]


@dataclass(frozen=True)
class FiberEigenvalues:
    k: float
    eigenvalues: np.ndarray
    truncation: int


def discriminant(p: Problem1D, lam: float, rtol: float = 1e-10,
                 atol: float = 1e-12) -> float:
    _require_real_hill(p)
    t = monodromy(p, lam, rtol, atol).trace
    if abs(t.imag) > 1e-9 * max(1.0, abs(t)):
        raise AccuracyError("discriminant came out non-real", achieved=abs(t.imag))
    return float(t.real)


def discriminant_curve(p: Problem1D, lambdas, rtol: float = 1e-10,
                       atol: float = 1e-12) -> DiscriminantCurve:
    lambdas = np.asarray(lambdas, dtype=float)
    vals = np.array([discriminant(p, x, rtol, atol) for x in lambdas])
    return DiscriminantCurve(lambdas, vals, p)


def _refine_crossing(f, a, b):
    # simple sign change: bracketing root solve to near machine precision
    return float(brentq(f, a, b, xtol=1e-13, rtol=8.8817841970012523e-16,
                        maxiter=200))


def _refine_extremum(f, a, b, sign):
    # sign=+1 for a local max, -1 for a local min
    r = minimize_scalar(lambda x: -sign * f(x), bounds=(a, b), method="bounded",
                        options={"xatol": 1e-12})
    return float(r.x), float(sign * -r.fun)


def locate_bands(p: Problem1D, lambda_min: float, lambda_max: float,
                 coarse_n: int = 400, rtol: float = 1e-10,
                 atol: float = 1e-12) -> BandStructure:
    """Bands on [lambda_min, lambda_max] from a coarse scan plus edge refinement.

    Tangencies of D with +-2 (zero-width gaps) are kept as two distinct bands
    with a touching flag on the shared edge.
    """
    _require_real_hill(p)
    if not lambda_min < lambda_max:
        raise ValueError("need lambda_min < lambda_max")
    if coarse_n < 64:
        raise ValueError("coarse grid too sparse (need >= 64)")
    xs = np.linspace(lambda_min, lambda_max, int(coarse_n))
    dv = np.array([discriminant(p, x, rtol, atol) for x in xs])

    def d(lam):
        return discriminant(p, lam, rtol, atol)

    # events: (lambda, kind, touching)
    events: list[tuple[float, str, bool]] = []
    for level, kind in ((2.0, "periodic"), (-2.0, "antiperiodic")):
        g = dv - level
        for i in range(len(xs) - 1):
            if g[i] == 0.0:
                events.append((float(xs[i]), kind, False))
            elif g[i] * g[i + 1] < 0:
                events.append((_refine_crossing(lambda t: d(t) - level,
                                                xs[i], xs[i + 1]), kind, False))
        if g[-1] == 0.0:
            events.append((float(xs[-1]), kind, False))
    # local extrema of D near +-2: either a tangency (zero-width gap) or a
    # narrow gap whose two crossings slipped between coarse grid points
    slope = np.diff(dv)
    for i in range(1, len(slope)):
        if slope[i - 1] == 0 or slope[i] == 0 or slope[i - 1] * slope[i] > 0:
            continue
        sign = 1.0 if slope[i - 1] > 0 else -1.0
        level = 2.0 if sign > 0 else -2.0
        if sign * (dv[i] - level) > 0:
            continue  # grid value already past the level: crossings were seen
        x_star, v_star = _refine_extremum(d, xs[i - 1], xs[i + 1], sign)
        kind = "periodic" if level > 0 else "antiperiodic"
        if any(abs(x_star - e[0]) <= 1e-8 * max(1.0, abs(x_star)) for e in events):
            continue
        if abs(v_star - level) <= EDGE_DELEGATION_TOL:
            events.append((x_star, kind, True))
        elif sign * (v_star - level) > 0:
            events.append((_refine_crossing(lambda t: d(t) - level,
                                            xs[i - 1], x_star), kind, False))
            events.append((_refine_crossing(lambda t: d(t) - level,
                                            x_star, xs[i + 1]), kind, False))
    events.sort(key=lambda e: e[0])
    merged: list[tuple[float, str, bool]] = []
    for e in events:
        if merged and abs(e[0] - merged[-1][0]) <= 1e-9 * max(1.0, abs(e[0])):
            continue
        merged.append(e)

    # walk the intervals between events, keeping those where |D| < 2
    cuts = [(lambda_min, "range", False)] + merged + [(lambda_max, "range", False)]
    bands: list[Band] = []
    for (x0, kind0, touch0), (x1, kind1, touch1) in zip(cuts, cuts[1:]):
        if x1 - x0 <= 1e-9 * max(1.0, abs(x0)):
            continue
        mid = 0.5 * (x0 + x1)
        if abs(d(mid)) < 2.0:
            bands.append(Band(x0, x1, len(bands), kind0, kind1, touch0, touch1))
    # a tangential event splits a band: both sides share the touching edge
    out = []
    for i, b in enumerate(bands):
        tlo = b.touching_lo or (i > 0 and abs(bands[i - 1].hi - b.lo) <= 1e-9 * max(1.0, abs(b.lo)))
        thi = b.touching_hi or (i + 1 < len(bands) and
                                abs(bands[i + 1].lo - b.hi) <= 1e-9 * max(1.0, abs(b.hi)))
        out.append(Band(b.lo, b.hi, i, b.edge_kind_lo, b.edge_kind_hi, tlo, thi))
    return BandStructure(tuple(out), lambda_min, lambda_max)


def sigma_tag_real_axis(p: Problem1D, lam: float, rtol: float = 1e-10,
                        atol: float = 1e-12, tau_eig: float = DEFAULT_TAU_EIG,
                        tau_scalar: float = DEFAULT_TAU_SCALAR) -> dict:
    """Tag lam on the real axis via the discriminant, delegating edges to Jordan."""
    _require_real_hill(p)
    m = monodromy(p, lam, rtol, atol)
    dval = float(m.trace.real)
    edge_dist = min(abs(dval - 2.0), abs(dval + 2.0))
    if edge_dist <= EDGE_DELEGATION_TOL:
        jordan = jordan_classify(m, tau_eig, tau_scalar)
        tag = 1 if jordan == J1 else (2 if jordan == J2 else 3)
        return {"tag": tag, "discriminant": dval, "bounded": tag != 2,
                "rationale": f"band edge (|D -+ 2| = {edge_dist:.2e}), Jordan {jordan}"}
    if abs(dval) < 2.0:
        return {"tag": 3, "discriminant": dval, "bounded": True,
                "rationale": "|D| < 2: conjugate unimodular multipliers"}
    return {"tag": 3, "discriminant": dval, "bounded": False,
            "rationale": "|D| > 2: reciprocal real multipliers"}


def fourier_coefficients(v: PeriodicCoefficient, max_m: int) -> np.ndarray:
    """V_hat_m for |m| <= max_m over the basis e^{2*pi*i*m*x/period}."""
    g = v.period
    out = np.zeros(2 * max_m + 1, dtype=complex)
    if v.kind == "constant":
        out[max_m] = v.constant_value
        return out
    if v.kind == "fourier":
        src = v.fourier_coefficients
        ms = len(src) // 2
        for m in range(-min(ms, max_m), min(ms, max_m) + 1):
            out[max_m + m] = src[ms + m]
        return out
    for m in range(-max_m, max_m + 1):
        total = 0.0 + 0.0j
        for b0, b1, expr in v.segments:
            w = -2.0j * math.pi * m / g
            re, _ = quad(lambda t: (expr.at(t) * np.exp(w * t)).real, b0, b1,
                         epsabs=1e-13, epsrel=1e-12, limit=300)
            im, _ = quad(lambda t: (expr.at(t) * np.exp(w * t)).imag, b0, b1,
                         epsabs=1e-13, epsrel=1e-12, limit=300)
            total += complex(re, im)
        out[max_m + m] = total / g
    return out


def planewave_fiber(p: Problem1D, k: float, m_pw: int = 64,
                    vhat: np.ndarray | None = None) -> FiberEigenvalues:
    """Eigenvalues of the fiber operator at quasimomentum k, Fourier-truncated.

    Independent of the ODE pipeline: dense Hermitian eigensolve of the matrix
    with diagonal (k + 2*pi*m/gamma)^2 and off-diagonal V_hat_{m-m'}.
    """
    _require_real_hill(p)
    if m_pw < 8:
        raise ValueError("plane-wave truncation too small (need >= 8)")
    g = p.lattice.gamma
    if abs(k) > math.pi / g * (1 + 1e-12):
        raise ValueError("k outside the Brillouin interval")
    if vhat is None:
        vhat = fourier_coefficients(p.v, 2 * m_pw)
    n = 2 * m_pw + 1
    h = np.zeros((n, n), dtype=complex)
    ms = np.arange(-m_pw, m_pw + 1)
    h[np.arange(n), np.arange(n)] = (k + 2.0 * math.pi * ms / g) ** 2
    mid = len(vhat) // 2
    for i in range(n):
        for j in range(n):
            dm = ms[i] - ms[j]
            h[i, j] += vhat[mid + dm]
    ev = np.linalg.eigvalsh(h)
    return FiberEigenvalues(k, np.sort(ev.real), m_pw)


def union_check(p: Problem1D, k_grid: int = 201, m_pw: int = 64,
                lambda_max: float = 25.0, bands: BandStructure | None = None,
                coarse_n: int = 400, rtol: float = 1e-10,
                atol: float = 1e-12) -> dict:
    """Compare the k-swept fiber spectra against the discriminant bands."""
    _require_real_hill(p)
    g = p.lattice.gamma
    lambda_min = None
    vhat = fourier_coefficients(p.v, 2 * m_pw)
    ks = np.linspace(-math.pi / g, math.pi / g, int(k_grid))
    levels = None
    for k in ks:
        ev = planewave_fiber(p, float(k), m_pw, vhat).eigenvalues
        levels = ev[None, :] if levels is None else np.vstack([levels, ev])
    # per-branch ranges: lambda_j(k) is continuous, so each branch sweeps an interval
    intervals = [(float(levels[:, j].min()), float(levels[:, j].max()))
                 for j in range(levels.shape[1])
                 if levels[:, j].min() <= lambda_max]
    intervals.sort()
    union: list[list[float]] = []
    for lo, hi in intervals:
        if union and lo <= union[-1][1] + 1e-9 * max(1.0, abs(lo)):
            union[-1][1] = max(union[-1][1], hi)
        else:
            union.append([lo, hi])
    union = [[lo, min(hi, lambda_max)] for lo, hi in union if lo <= lambda_max]
    if bands is None:
        lambda_min = union[0][0] - 1.0
        bands = locate_bands(p, lambda_min, lambda_max, coarse_n, rtol, atol)
    # merge touching discriminant bands for the comparison: the fiber union
    # cannot see zero-width gaps
    dm: list[list[float]] = []
    for b in bands.bands:
        if dm and b.lo <= dm[-1][1] + 1e-8 * max(1.0, abs(b.lo)):
            dm[-1][1] = max(dm[-1][1], b.hi)
        else:
            dm.append([b.lo, b.hi])
    dm = [[lo, min(hi, lambda_max)] for lo, hi in dm if lo < lambda_max]
    n = min(len(dm), len(union))
    worst = 0.0
    pairs = []
    for (alo, ahi), (blo, bhi) in zip(dm[:n], union[:n]):
        dev_lo = abs(alo - blo)
        # edges truncated by lambda_max on either side are not comparable
        dev_hi = 0.0 if (ahi >= lambda_max - 1e-9 or bhi >= lambda_max - 1e-9) \
            else abs(ahi - bhi)
        worst = max(worst, dev_lo, dev_hi)
        pairs.append({"discriminant": [alo, ahi], "fiber": [blo, bhi],
                      "deviation": max(dev_lo, dev_hi)})
    return {"max_edge_discrepancy": worst, "pairs": pairs,
            "count_discriminant": len(dm), "count_fiber": len(union),
            "counts_agree": len(dm) == len(union)}

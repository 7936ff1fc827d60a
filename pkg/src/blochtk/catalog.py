"""Built-in problem registry and the report-only eigenstate fixture."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coeffs import (PeriodicCoefficient, intro_counterexample_potential,
                     kronig_penney_potential, mathieu_potential,
                     zero_coefficient)
from .errors import FormExtractionError
from .floquet import classify
from .lattice import Lattice1D
from .propagate import Problem1D


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    problem: Problem1D
    note: str


def _p(gamma: float, w: PeriodicCoefficient | None, v: PeriodicCoefficient) -> Problem1D:
    lat = Lattice1D(gamma)
    return Problem1D(lat, w if w is not None else zero_coefficient(gamma), v)


def _build_catalog() -> dict[str, CatalogEntry]:
    entries = [
        CatalogEntry("free", _p(2 * math.pi, None, zero_coefficient(2 * math.pi)),
                     "V = 0, period 2*pi"),
        CatalogEntry("constant_v5",
                     _p(1.0, None, PeriodicCoefficient.constant(5.0, 1.0)),
                     "V = 5 constant, period 1"),
        CatalogEntry("mathieu_q1", _p(math.pi, None, mathieu_potential(1.0)),
                     "V = 2*cos(2x), period pi"),
        CatalogEntry("kronig_penney",
                     _p(1.0, None, kronig_penney_potential(10.0, 0.3, 1.0)),
                     "square barrier, height 10, width 0.3, period 1"),
        CatalogEntry("intro_counterexample",
                     _p(1.0, None, intro_counterexample_potential()),
                     "period-1 rational-pole potential of the eigenstate fixture"),
        CatalogEntry("drift_w",
                     _p(1.0, PeriodicCoefficient.constant(0.7 + 0.3j, 1.0),
                        zero_coefficient(1.0)),
                     "nonzero constant W = 0.7 + 0.3i, V = 0"),
    ]
    return {e.name: e for e in entries}


CATALOG: dict[str, CatalogEntry] = _build_catalog()


def catalog_names() -> list[str]:
    return sorted(CATALOG)


def get_problem(name: str) -> Problem1D:
    if name not in CATALOG:
        raise KeyError(f"unknown catalog problem {name!r}")
    return CATALOG[name].problem


# -- eigenstate fixture -----------------------------------------------------
#
# Claimed eigenstate with E = -1 for the period-1 potential
# V(x) = 2/(x-n-1)^2 - 2/(x-n-1) on n-1 <= x < n:
#     psi(x) = e^x (1 - x/(x-n-1))   on the same segment.
# The fixture evaluates the per-segment ODE residual and the continuity of
# psi across the integer breakpoints, and records the classifier output at
# E = -1 next to the claim.  Nothing is asserted either way.

FIXTURE_ENERGY = -1.0


def _fixture_psi(x: np.ndarray, n: int) -> np.ndarray:
    return np.exp(x) * (1.0 - x / (x - n - 1.0))


def _fixture_v(x: np.ndarray, n: int) -> np.ndarray:
    u = x - n - 1.0
    return 2.0 / (u * u) - 2.0 / u


def _segment_residual(n: int, points: int = 512) -> float:
    """max |-psi'' + V psi - E psi| / max |psi| on the open segment (n-1, n)."""
    pad = 1e-3
    xs = np.linspace(n - 1 + pad, n - pad, points)
    h = xs[1] - xs[0]
    psi = _fixture_psi(xs, n)
    d2 = (-psi[4:] + 16 * psi[3:-1] - 30 * psi[2:-2] + 16 * psi[1:-3] - psi[:-4]) / (12 * h * h)
    mid = xs[2:-2]
    res = -d2 + (_fixture_v(mid, n) - FIXTURE_ENERGY) * psi[2:-2]
    return float(np.max(np.abs(res))) / float(np.max(np.abs(psi)))


def intro_fixture_report(rtol: float = 1e-10, atol: float = 1e-12) -> dict:
    """Deterministic report on the eigenstate claim vs the classifier."""
    residuals = {str(n): _segment_residual(n) for n in (0, 1, 2)}
    jumps = {}
    for n in (0, 1, 2):
        left = float(_fixture_psi(np.array([float(n) - 1e-12]), n)[0])
        right = float(_fixture_psi(np.array([float(n)]), n + 1)[0])
        jumps[str(n)] = abs(right - left) / max(abs(left), 1e-300)
    problem = get_problem("intro_counterexample")
    claim = {"energy": FIXTURE_ENERGY,
             "multiplier": math.e,  # e^{1*gamma} with gamma = 1 for psi ~ e^x * periodic
             "form": "linear-growth (double multiplier)"}
    observed: dict = {}
    try:
        result = classify(problem, FIXTURE_ENERGY, grid_n=None, rtol=rtol, atol=atol)
        mu1, mu2 = result.data.multipliers
        observed = {
            "sigma_tag": result.qmap.sigma_tag,
            "jordan": result.data.jordan,
            "multipliers": [[mu1.real, mu1.imag], [mu2.real, mu2.imag]],
            "classes": [[c.representative.real, c.representative.imag]
                        for c in result.qmap.classes],
        }
    except FormExtractionError as exc:
        observed = {"error": str(exc)}
    mu_match = "multipliers" in observed and any(
        abs(complex(*m) - math.e) <= 1e-6 * math.e for m in observed["multipliers"])
    max_jump = max(jumps.values())
    discrepancy = (max_jump > 1e-8) or not mu_match
    return {
        "fixture": "intro_counterexample",
        "claim": claim,
        "segment_residuals": residuals,
        "breakpoint_relative_jumps": jumps,
        "classifier": observed,
        "claimed_multiplier_observed": bool(mu_match),
        "discrepancy_flag": bool(discrepancy),
        "note": "report only: neither the claim nor the classifier output is asserted",
    }

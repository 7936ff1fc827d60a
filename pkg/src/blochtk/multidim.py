"""Separable solutions of -a*Laplacian(Psi) + V*Psi = E*Psi on a d-D lattice.

In the lattice-adapted coordinates xt = A^{-1} r (A built from normalized
primitive vectors) a separable solution factors into 1-D problems along each
direction.  For orthogonal lattices with V(r) = a * sum_j V_j(xt_j) the
factors are constructed by the 1-D pipeline and E = sum_j a*lambda_j; for
general lattices only verification of supplied solutions is offered.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .coeffs import is_zero_coefficient
from .errors import NotExpandableError
from .floquet import SolutionForm, boundedness, classify
from .gridtools import trig_interpolate
from .lattice import LatticeND, Lattice1D, cross_coefficients
from .propagate import Problem1D

ORTHOGONAL_SUM = "orthogonal-sum"
VERIFY_ONLY = "general-verify-only"


@dataclass(frozen=True)
class SeparableProblem:
    lattice: LatticeND
    laplacian_scale: float
    direction_problems: tuple[Problem1D, ...]
    mode: str = ORTHOGONAL_SUM

    def __post_init__(self):
        d = self.lattice.dim
        if len(self.direction_problems) != d:
            raise ValueError("need one direction problem per dimension")
        if self.laplacian_scale <= 0:
            raise ValueError("laplacian scale must be positive")
        if self.mode not in (ORTHOGONAL_SUM, VERIFY_ONLY):
            raise ValueError(f"unknown mode {self.mode!r}")
        for j, dp in enumerate(self.direction_problems):
            if abs(dp.lattice.gamma - self.lattice.norms[j]) > 1e-10 * self.lattice.norms[j]:
                raise ValueError("direction period must equal the primitive-vector length")
            if not is_zero_coefficient(dp.w):
                raise ValueError("direction problems must have W = 0")
        if self.mode == ORTHOGONAL_SUM:
            if any(abs(w) > 1e-12 for w in cross_coefficients(self.lattice).values()):
                raise ValueError("orthogonal-sum mode needs an orthogonal lattice")

    def adapted_coordinates(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(points, dtype=float) @ self.lattice.transform_inv.T

    def potential(self, points: np.ndarray) -> np.ndarray:
        """V(r) = a * sum_j V_j(xt_j) (orthogonal-sum mode only)."""
        if self.mode != ORTHOGONAL_SUM:
            raise ValueError("potential assembly needs orthogonal-sum mode")
        xt = self.adapted_coordinates(points)
        total = np.zeros(xt.shape[:-1], dtype=complex)
        for j, dp in enumerate(self.direction_problems):
            total += dp.v.evaluate_array(np.ascontiguousarray(xt[..., j]))
        return self.laplacian_scale * total


def _part_interpolator(form: SolutionForm, idx: int):
    n = form.grid.size - 1
    period = float(form.grid[-1])
    samples = form.parts[idx][:n]
    return lambda x: trig_interpolate(samples, period, x)


def _factor_evaluator(form: SolutionForm):
    """Callable psi_j(x) for the general 1-D solution encoded by the form."""
    if form.kind == "form3":
        k1, k2 = (c.representative for c in form.classes)
        p1, p2 = _part_interpolator(form, 0), _part_interpolator(form, 1)
        return lambda x: np.exp(1j * k1 * x) * p1(x) + np.exp(1j * k2 * x) * p2(x)
    k0 = form.classes[0].representative
    if form.kind == "form2":
        p1, p2 = _part_interpolator(form, 0), _part_interpolator(form, 1)
        return lambda x: np.exp(1j * k0 * x) * (p1(x) + x * p2(x))
    p0 = _part_interpolator(form, 0)
    return lambda x: np.exp(1j * k0 * x) * p0(x)


@dataclass(frozen=True)
class SeparableSolution:
    problem: SeparableProblem
    factors: tuple[SolutionForm, ...]
    lambdas: tuple[float, ...]
    energies: tuple[float, ...]
    energy: float
    bounded: bool

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Psi at points of shape (..., d)."""
        xt = self.problem.adapted_coordinates(points)
        out = np.ones(xt.shape[:-1], dtype=complex)
        for j, form in enumerate(self.factors):
            out *= _factor_evaluator(form)(np.ascontiguousarray(xt[..., j]))
        return out


def assemble(sp: SeparableProblem, factors, lambdas) -> SeparableSolution:
    """Join per-direction forms into the product solution with E = sum a*lambda_j."""
    factors = tuple(factors)
    lambdas = tuple(float(x) for x in lambdas)
    if len(factors) != sp.lattice.dim or len(lambdas) != len(factors):
        raise ValueError("factor/lambda count must match the dimension")
    energies = tuple(sp.laplacian_scale * x for x in lambdas)
    bounded = all(boundedness(f) for f in factors)
    return SeparableSolution(sp, factors, lambdas, energies,
                             math.fsum(energies), bounded)


def analyze_directions(sp: SeparableProblem, lambdas, grid_n: int = 512,
                       rtol: float = 1e-10, atol: float = 1e-12) -> SeparableSolution:
    """Run the 1-D classification at each lambda_j and assemble the product."""
    forms = [classify(dp, lam, grid_n, rtol, atol).form
             for dp, lam in zip(sp.direction_problems, lambdas)]
    return assemble(sp, forms, lambdas)


def hartree_example(potentials, lambdas, grid_n: int = 512,
                    rtol: float = 1e-10, atol: float = 1e-12) -> SeparableSolution:
    """-Laplacian(Psi) + sum_j V_j(x_j) Psi = E Psi on the orthogonal lattice of the V_j periods."""
    from .coeffs import zero_coefficient
    periods = [v.period for v in potentials]
    lat = LatticeND(np.diag(periods))
    dps = tuple(Problem1D(Lattice1D(g), zero_coefficient(g), v)
                for g, v in zip(periods, potentials))
    sp = SeparableProblem(lat, 1.0, dps, ORTHOGONAL_SUM)
    return analyze_directions(sp, lambdas, grid_n, rtol, atol)


def _axis_second_derivative(values: np.ndarray, axis: int, h: float) -> np.ndarray:
    """4th-order interior second derivative; input carries 2 ghost layers per side."""
    def sl(off):
        idx = [slice(2, -2)] * values.ndim
        idx[axis] = slice(2 + off, values.shape[axis] - 2 + off or None)
        return values[tuple(idx)]
    return (-sl(2) + 16 * sl(1) - 30 * sl(0) + 16 * sl(-1) - sl(-2)) / (12 * h * h)


def residual_nd(sp: SeparableProblem, sol: SeparableSolution | None,
                grid_per_dim: int = 64, probe_box=None,
                evaluator=None, potential=None, energy: float | None = None) -> float:
    """max |−aΔΨ + VΨ − EΨ| / max |Ψ| over the probe box, 4th-order differences.

    Pass evaluator/potential/energy explicitly for verify-only problems with a
    supplied closed-form Psi; otherwise they come from the assembled solution.
    """
    if grid_per_dim < 32:
        raise ValueError("residual grid too coarse (need >= 32 points/dim)")
    d = sp.lattice.dim
    if evaluator is None:
        evaluator = sol.evaluate
    if potential is None:
        potential = sp.potential
    if energy is None:
        energy = sol.energy
    if probe_box is None:
        side = float(np.min(sp.lattice.norms))
        probe_box = [(0.0, side)] * d
    if len(probe_box) != d or any(b1 <= b0 for b0, b1 in probe_box):
        raise ValueError("degenerate probe box")
    n = int(grid_per_dim)
    axes = []
    hs = []
    for b0, b1 in probe_box:
        h = (b1 - b0) / n
        hs.append(h)
        axes.append(b0 + (np.arange(-2, n + 2)) * h)
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    psi = evaluator(mesh)
    interior = tuple([slice(2, -2)] * d)
    lap = np.zeros_like(psi[interior])
    for a in range(d):
        lap += _axis_second_derivative(psi, a, hs[a])
    vv = np.asarray(potential(mesh[interior]))
    res = -sp.laplacian_scale * lap + (vv - energy) * psi[interior]
    return float(np.max(np.abs(res))) / float(np.max(np.abs(psi[interior])))


@dataclass(frozen=True)
class BlochTerm:
    k_tilde: np.ndarray    # per-direction quasimomenta in adapted coordinates
    k_vector: np.ndarray   # quasimomentum d-vector in original coordinates
    part_indices: tuple[int, ...]
    problem: SeparableProblem
    interpolators: tuple

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        xt = self.problem.adapted_coordinates(points)
        out = np.ones(xt.shape[:-1], dtype=complex)
        for j, interp in enumerate(self.interpolators):
            xj = np.ascontiguousarray(xt[..., j])
            out *= np.exp(1j * self.k_tilde[j] * xj) * interp(xj)
        return out


def combination_expand(sol: SeparableSolution) -> list[BlochTerm]:
    """Distribute the factor product into its 2^s pure Bloch terms.

    s counts the two-class factors; every factor must be of Bloch type with
    real classes (bounded case).
    """
    sp = sol.problem
    choices = []
    for form in sol.factors:
        if form.kind == "form2":
            raise NotExpandableError("linear-growth factor cannot be expanded "
                                     "into Bloch terms")
        if any(abs(c.representative.imag) > 1e-6 for c in form.classes):
            raise NotExpandableError("expansion requires real quasimomenta")
        if form.kind == "form3":
            choices.append([(0, form.classes[0].representative.real),
                            (1, form.classes[1].representative.real)])
        else:
            choices.append([(0, form.classes[0].representative.real)])
    a_inv_t = sp.lattice.transform_inv.T
    terms = []
    for combo in itertools.product(*choices):
        idxs = tuple(c[0] for c in combo)
        kt = np.array([c[1] for c in combo], dtype=float)
        interps = tuple(_part_interpolator(f, i) for f, i in zip(sol.factors, idxs))
        terms.append(BlochTerm(kt, a_inv_t @ kt, idxs, sp, interps))
    return terms

"""Monodromy analysis: multipliers, Jordan type, quasimomenta, solution forms.

For -y'' + W y' + V y = lam y with period-gamma coefficients, the monodromy
matrix M (fundamental system over one period) determines everything here:
its eigenvalues are the Floquet multipliers mu = e^{ik*gamma}, their Jordan
structure selects one of three canonical solution shapes, and the periodic
parts are read off from X(x) e^{-Cx} with M = e^{C*gamma}.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .coeffs import is_zero_coefficient
from .errors import FormExtractionError
from .gridtools import periodic_derivatives
from .lattice import (CongruenceClass, Lattice1D, class_distance, class_equal,
                      reduce_quasimomentum)
from .propagate import Problem1D, fundamental_on_grid, propagate_fundamental

# Jordan-detection knobs.  Eigenvalues of a nearly defective 2x2 matrix split
# like sqrt of the matrix perturbation, so the distinctness threshold sits
# well above sqrt(integration error), not at the integration error itself.
DEFAULT_TAU_EIG = 1e-4
DEFAULT_TAU_SCALAR = 1e-8
TOL_PERIODIC = 1e-7

J1, J2, J3 = "J1", "J2", "J3"


@dataclass(frozen=True)
class Monodromy:
    matrix: np.ndarray
    lam: float
    problem: Problem1D
    error_estimate: float
    steps: int
    determinant: complex  # product of segment determinants (cancellation-free)

    @property
    def trace(self) -> complex:
        return self.matrix[0, 0] + self.matrix[1, 1]


@dataclass(frozen=True)
class FloquetData:
    multipliers: tuple[complex, complex]
    jordan: str
    c_matrix: np.ndarray
    quasimomenta: tuple[CongruenceClass, ...]
    coerced: bool = False          # multipliers within tau_eig but not identical
    ill_conditioned: bool = False  # J3 eigenvector matrix cond > 1e8


@dataclass(frozen=True)
class SolutionForm:
    """Canonical solution shape with periodic parts sampled on [0, gamma].

    form1: two Bloch solutions e^{ik0 x} p_j(x), one class.
    form2: e^{ik0 x}(p1(x) + x p2(x)) plus the Bloch solution e^{ik0 x} p2(x).
    form3: two Bloch solutions with distinct classes.
    Parts are jointly normalized; grid has n+1 abscissae including both ends.
    """
    kind: str
    classes: tuple[CongruenceClass, ...]
    grid: np.ndarray
    parts: tuple[np.ndarray, ...]
    periodicity_deviation: float


@dataclass(frozen=True)
class QuasimomentumMap:
    lam: float
    classes: tuple[CongruenceClass, ...]
    sigma_tag: int  # 1, 2, or 3

    def __post_init__(self):
        if len(self.classes) > 2:
            raise ValueError("at most two quasimomentum classes can occur")
        if (len(self.classes) == 2) != (self.sigma_tag == 3):
            raise ValueError("two classes occur exactly for the third tag")


_DET_SEGMENTS = 8


def monodromy(p: Problem1D, lam: float, rtol: float = 1e-10,
              atol: float = 1e-12) -> Monodromy:
    """Monodromy matrix over one period.

    Composed from sub-interval transfer matrices: in strong-growth regimes
    det M cancels catastrophically in the entries of the full-period matrix,
    while the product of the well-scaled segment determinants does not.
    """
    gamma = p.lattice.gamma
    cuts = np.linspace(0.0, gamma, _DET_SEGMENTS + 1)
    mat = np.eye(2, dtype=complex)
    det = 1.0 + 0.0j
    err = 0.0
    steps = 0
    for a, b in zip(cuts, cuts[1:]):
        t = propagate_fundamental(p.w, p.v, lam, float(a), float(b), rtol, atol)
        mat = t.matrix @ mat
        s = t.matrix
        det *= s[0, 0] * s[1, 1] - s[0, 1] * s[1, 0]
        err += t.error_estimate
        steps += t.steps
    return Monodromy(mat, lam, p, err, steps, det)


def multipliers(m: Monodromy | np.ndarray) -> tuple[complex, complex]:
    """Floquet multipliers, ordered by (|mu|, phase) for determinism."""
    if isinstance(m, Monodromy):
        t, d = complex(m.trace), complex(m.determinant)
    else:
        mat = np.asarray(m)
        t = complex(mat[0, 0] + mat[1, 1])
        d = complex(mat[0, 0] * mat[1, 1] - mat[0, 1] * mat[1, 0])
    s = cmath.sqrt(t * t - 4.0 * d)
    if abs(t + s) < abs(t - s):
        s = -s
    big = (t + s) / 2.0
    if big == 0:  # only if t = d = 0, i.e. singular M
        return (0.0 + 0.0j, 0.0 + 0.0j)
    other = d / big
    pair = sorted((big, other), key=lambda z: (abs(z), cmath.phase(z)))
    return (pair[0], pair[1])


def jordan_classify(m: Monodromy | np.ndarray, tau_eig: float = DEFAULT_TAU_EIG,
                    tau_scalar: float = DEFAULT_TAU_SCALAR) -> str:
    mat = m.matrix if isinstance(m, Monodromy) else np.asarray(m)
    mu1, mu2 = multipliers(m)
    if abs(mu1 - mu2) > tau_eig * max(1.0, abs(mu1), abs(mu2)):
        return J3
    mu = (mat[0, 0] + mat[1, 1]) / 2.0
    norm = float(np.linalg.norm(mat))
    if float(np.linalg.norm(mat - mu * np.eye(2))) <= tau_scalar * max(1.0, norm):
        return J1
    return J2


def quasimomentum(mu: complex, lattice: Lattice1D) -> CongruenceClass:
    """Class of k with e^{ik*gamma} = mu, principal branch then strip reduction."""
    if mu == 0:
        raise ValueError("zero multiplier: monodromy is singular")
    k = cmath.log(mu) / (1j * lattice.gamma)
    return reduce_quasimomentum(k, lattice)


def matrix_log(m: Monodromy | np.ndarray, jordan: str,
               gamma: float | None = None) -> tuple[np.ndarray, bool]:
    """C with e^{C*gamma} = M, principal branch.  Returns (C, ill_conditioned)."""
    if isinstance(m, Monodromy):
        mat, gamma = m.matrix, m.problem.lattice.gamma
    else:
        mat = np.asarray(m, dtype=complex)
        if gamma is None:
            raise ValueError("gamma required when passing a bare matrix")
    mu_bar = (mat[0, 0] + mat[1, 1]) / 2.0
    if jordan == J1:
        return (cmath.log(mu_bar) / gamma) * np.eye(2, dtype=complex), False
    if jordan == J2:
        n = mat - mu_bar * np.eye(2)
        return (cmath.log(mu_bar) * np.eye(2) + n / mu_bar) / gamma, False
    mu1, mu2 = multipliers(mat)
    _, vecs = np.linalg.eig(mat)
    # align eigenvector columns with the deterministic multiplier order
    ev = np.linalg.eigvals(mat)
    order = [int(np.argmin(np.abs(ev - mu1)))]
    order.append(1 - order[0])
    s = vecs[:, order]
    cond = float(np.linalg.cond(s))
    c = s @ np.diag([cmath.log(mu1), cmath.log(mu2)]) @ np.linalg.inv(s) / gamma
    return c, cond > 1e8


def floquet_data(m: Monodromy, tau_eig: float = DEFAULT_TAU_EIG,
                 tau_scalar: float = DEFAULT_TAU_SCALAR) -> FloquetData:
    lattice = m.problem.lattice
    mu1, mu2 = multipliers(m)
    jordan = jordan_classify(m, tau_eig, tau_scalar)
    c, illcond = matrix_log(m, jordan)
    if jordan == J3:
        ks = (quasimomentum(mu1, lattice), quasimomentum(mu2, lattice))
        ks = tuple(sorted(ks, key=lambda q: (q.representative.real, q.representative.imag)))
    else:
        # a double multiplier satisfies mu^2 = det M exactly; the determinant
        # is far better conditioned near degeneracy than the eigenvalue split
        mu_bar = cmath.sqrt(m.determinant)
        if (mu_bar.conjugate() * (m.trace / 2.0)).real < 0:
            mu_bar = -mu_bar
        ks = (quasimomentum(mu_bar, lattice),)
    coerced = jordan != J3 and mu1 != mu2
    return FloquetData((mu1, mu2), jordan, c, ks, coerced, illcond)


def _jointly_normalized(parts):
    scale = max(float(np.max(np.abs(q))) for q in parts)
    if scale == 0.0:
        raise FormExtractionError("all extracted parts vanish", deviation=0.0)
    return tuple(q / scale for q in parts)


def periodic_parts(p: Problem1D, lam: float, grid_n: int = 512,
                   data: FloquetData | None = None, rtol: float = 1e-10,
                   atol: float = 1e-12, tol_per: float = TOL_PERIODIC,
                   tau_eig: float = DEFAULT_TAU_EIG,
                   tau_scalar: float = DEFAULT_TAU_SCALAR) -> SolutionForm:
    """Extract the periodic parts of the canonical solutions on a period grid.

    X is sampled over two periods; parts come from X(x) e^{-Cx} and their
    gamma-periodicity is verified against the second cell.
    """
    if grid_n < 8:
        raise ValueError("form-extraction grid too coarse")
    gamma = p.lattice.gamma
    if data is None:
        data = floquet_data(monodromy(p, lam, rtol, atol), tau_eig, tau_scalar)
    n = int(grid_n)
    xs2 = np.arange(2 * n + 1) * (gamma / n)
    big = fundamental_on_grid(p.w, p.v, lam, xs2, rtol, atol)
    sol0 = big[:, 0, :]  # value row of X(x): columns are the two basis solutions

    if data.jordan == J3:
        mu1, mu2 = data.multipliers
        # eigenvectors of M = X(gamma), matched to the ordered multipliers
        mono = big[n]
        w_, vecs = np.linalg.eig(mono)
        i1 = int(np.argmin(np.abs(w_ - mu1)))
        s = vecs[:, [i1, 1 - i1]]
        vals = sol0 @ s  # columns: the two Bloch solutions on the grid
        k1 = quasimomentum(mu1, p.lattice).representative
        k2 = quasimomentum(mu2, p.lattice).representative
        raw = (np.exp(-1j * k1 * xs2) * vals[:, 0],
               np.exp(-1j * k2 * xs2) * vals[:, 1])
        parts = tuple(q / np.max(np.abs(q)) for q in raw)
        classes = (reduce_quasimomentum(k1, p.lattice),
                   reduce_quasimomentum(k2, p.lattice))
        kind = "form3"
    else:
        k0c = data.quasimomenta[0]
        k0 = k0c.representative
        phase = np.exp(-1j * k0 * xs2)
        if data.jordan == J1:
            parts = tuple(_jointly_normalized(
                (phase * sol0[:, 0], phase * sol0[:, 1])))
            classes = (k0c,)
            kind = "form1"
        else:
            mono = big[n]
            mu_bar = (mono[0, 0] + mono[1, 1]) / 2.0
            nprime = (mono - mu_bar * np.eye(2)) / (mu_bar * gamma)
            j = int(np.argmax(np.linalg.norm(nprime, axis=0)))
            v2 = np.eye(2, dtype=complex)[:, j]
            wv = nprime @ v2
            bloch_vals = sol0 @ wv          # e^{ik0 x} p2(x)
            grow_vals = sol0 @ v2           # e^{ik0 x} (p1(x) + x p2(x))
            p2 = phase * bloch_vals
            p1 = phase * grow_vals - xs2 * p2
            parts = _jointly_normalized((p1, p2))
            if float(np.max(np.abs(parts[1]))) < 1e-8:
                raise FormExtractionError(
                    "defective case requires a nonvanishing growth part",
                    deviation=float(np.max(np.abs(parts[1]))))
            classes = (k0c,)
            kind = "form2"

    dev = max(float(np.max(np.abs(q[n:] - q[:n + 1]))) for q in parts)
    if dev > tol_per:
        raise FormExtractionError(
            f"extracted part is not periodic to {tol_per:g} "
            "(branch or Jordan misclassification)", deviation=dev)
    return SolutionForm(kind, classes, xs2[:n + 1],
                        tuple(q[:n + 1].copy() for q in parts), dev)


@dataclass(frozen=True)
class ClassifyResult:
    qmap: QuasimomentumMap
    form: SolutionForm | None
    data: FloquetData
    monodromy: Monodromy


def classify(p: Problem1D, lam: float, grid_n: int | None = 512,
             rtol: float = 1e-10, atol: float = 1e-12,
             tau_eig: float = DEFAULT_TAU_EIG,
             tau_scalar: float = DEFAULT_TAU_SCALAR,
             tol_per: float = TOL_PERIODIC) -> ClassifyResult:
    """Quasimomentum map (and optionally the solution form) at one lam."""
    m = monodromy(p, lam, rtol, atol)
    data = floquet_data(m, tau_eig, tau_scalar)
    if data.jordan == J3 and len(data.quasimomenta) == 2 and \
            class_equal(*data.quasimomenta):
        tag = 1  # defensive: merged classes behave like the scalar case
        classes = (data.quasimomenta[0],)
    elif data.jordan == J3:
        tag, classes = 3, data.quasimomenta
    elif data.jordan == J2:
        tag, classes = 2, data.quasimomenta
    else:
        tag, classes = 1, data.quasimomenta
    qmap = QuasimomentumMap(lam, classes, tag)
    form = None
    if grid_n is not None:
        form = periodic_parts(p, lam, grid_n, data, rtol, atol, tol_per,
                              tau_eig, tau_scalar)
    return ClassifyResult(qmap, form, data, m)


def shifted_operator_residual(p: Problem1D, lam: float,
                              form: SolutionForm) -> list[float]:
    """Max |D^k p - lam p| per part, 4th-order finite differences.

    The linear-growth case additionally enforces its coupled equation:
    D^{k0} p1 = lam p1 + (2ik0 - W) p2 + 2 p2'.
    """
    n = form.grid.size - 1
    if n < 32:
        raise ValueError("residual grid too coarse (need >= 32 points/period)")
    gamma = p.lattice.gamma
    xs = form.grid[:n]
    wv = p.w.evaluate_array(xs)
    vv = p.v.evaluate_array(xs)

    def bloch_residual(k, q, extra=0.0):
        d1, d2 = periodic_derivatives(q, gamma)
        r = -d2 + (wv - 2j * k) * d1 + (1j * k * wv + vv + k * k - lam) * q - extra
        return float(np.max(np.abs(r))) / max(1e-300, float(np.max(np.abs(q))))

    if form.kind == "form2":
        k0 = form.classes[0].representative
        p1, p2 = (q[:n] for q in form.parts)
        res2 = bloch_residual(k0, p2)
        d1p2, _ = periodic_derivatives(p2, gamma)
        coupling = (2j * k0 - wv) * p2 + 2.0 * d1p2
        d1, d2 = periodic_derivatives(p1, gamma)
        r1 = -d2 + (wv - 2j * k0) * d1 + (1j * k0 * wv + vv + k0 * k0 - lam) * p1 - coupling
        scale = max(float(np.max(np.abs(p1))), float(np.max(np.abs(p2))))
        return [float(np.max(np.abs(r1))) / scale, res2]

    ks = form.classes if form.kind == "form3" else form.classes * 2
    return [bloch_residual(k.representative, q[:n])
            for k, q in zip(ks, form.parts)]


def verify_sum_rule(p: Problem1D, lam: float, result: ClassifyResult | None = None,
                    rtol: float = 1e-10, atol: float = 1e-12,
                    tol: float = 1e-8) -> dict:
    """Check the trace/determinant constraint on the emitted quasimomenta.

    Single-class tags: k0 is congruent to mean(W)/(2i) or to that plus half
    the reciprocal period.  Two-class tag: [k1 + k2] = [mean(W)/i].
    """
    if result is None:
        result = classify(p, lam, grid_n=None, rtol=rtol, atol=atol)
    lattice = p.lattice
    wbar = p.w.mean()
    if result.qmap.sigma_tag == 3:
        k1, k2 = (c.representative for c in result.qmap.classes)
        target = reduce_quasimomentum(wbar / 1j, lattice)
        got = reduce_quasimomentum(k1 + k2, lattice)
        dev = class_distance(got, target)
        ok = dev <= tol * max(1.0, abs(target.representative))
        return {"rule": "pair-sum", "ok": bool(ok), "deviation": dev,
                "target": target.representative, "value": got.representative}
    k0 = result.qmap.classes[0]
    base = wbar / 2j
    cands = [reduce_quasimomentum(base, lattice),
             reduce_quasimomentum(base + math.pi / lattice.gamma, lattice)]
    devs = [class_distance(k0, c) for c in cands]
    dev = min(devs)
    ok = dev <= tol * max(1.0, abs(base))
    pick = cands[devs.index(dev)]
    return {"rule": "half-mean", "ok": bool(ok), "deviation": dev,
            "target": pick.representative, "value": k0.representative}


def boundedness(form: SolutionForm, tol_imag: float = 1e-6) -> bool:
    """All solutions bounded on the line: Bloch-type with real classes only."""
    if form.kind == "form2":
        return False
    return all(abs(c.representative.imag) <= tol_imag for c in form.classes)


def p1_zero_check(p: Problem1D, lam: float, form: SolutionForm,
                  tol: float = 1e-7) -> dict:
    """Pure-growth test for the defective case.

    The non-Bloch solution degenerates to x * e^{ik0 x} p2(x) (p1 identically
    zero for some basis choice) exactly when V is constant and k0 = [0].
    A basis shift p1 -> p1 + c*p2 is allowed, so the x-independent part is
    measured after projecting out p2.
    """
    if form.kind != "form2":
        raise ValueError("pure-growth check applies to the defective form only")
    p1, p2 = form.parts
    c = np.vdot(p2, p1) / np.vdot(p2, p2)
    resid = p1 - c * p2
    p1_min = float(np.max(np.abs(resid))) / float(np.max(np.abs(p2)))
    v_const = p.v.kind == "constant" or (
        p.v.kind == "fourier" and all(
            x == 0 for i, x in enumerate(p.v.fourier_coefficients)
            if i != len(p.v.fourier_coefficients) // 2))
    k_zero = class_equal(form.classes[0],
                         reduce_quasimomentum(0.0, p.lattice))
    p1_vanishes = p1_min <= tol
    return {"p1_reducible_to_zero": bool(p1_vanishes),
            "p1_residual_norm": p1_min,
            "v_constant": bool(v_const), "k0_is_zero_class": bool(k_zero),
            "consistent": bool(p1_vanishes == (v_const and k_zero))}


def zero_of_bloch_check(p: Problem1D, lam: float, form: SolutionForm | None = None,
                        grid_n: int = 2048, rtol: float = 1e-10,
                        atol: float = 1e-12) -> dict:
    """Report on zeros of bounded Bloch solutions (real V, W = 0).

    If a solution vanishes somewhere, its class must be [0] or [pi/gamma] and
    the solution is a unimodular constant times a real function.  Report-only.
    """
    if not is_zero_coefficient(p.w) or not p.v.real_flag:
        raise ValueError("zero-of-Bloch check needs real V and W = 0")
    if form is None or form.grid.size - 1 != grid_n:
        form = periodic_parts(p, lam, grid_n, rtol=rtol, atol=atol)
    if form.kind == "form2":
        return {"applicable": False, "reason": "unbounded (linear growth)"}
    gamma = p.lattice.gamma
    reports = []
    # grid resolution limits how close to a zero a sample can land
    tau_zero = 8.0 / grid_n
    half = reduce_quasimomentum(math.pi / gamma, p.lattice)
    origin = reduce_quasimomentum(0.0, p.lattice)
    ks = form.classes if form.kind == "form3" else form.classes * 2
    for kc, part in zip(ks, form.parts):
        if abs(kc.representative.imag) > 1e-6:
            reports.append({"bounded": False})
            continue
        xs = form.grid
        psi = np.exp(1j * kc.representative * xs) * part
        psi = psi / np.max(np.abs(psi))
        zero_found = bool(np.min(np.abs(psi)) <= tau_zero)
        entry = {"bounded": True, "zero_found": zero_found,
                 "min_abs": float(np.min(np.abs(psi)))}
        if zero_found:
            entry["k_in_zero_or_half_class"] = bool(
                class_equal(kc, origin) or class_equal(kc, half))
            theta = -cmath.phase(psi[int(np.argmax(np.abs(psi)))])
            aligned = np.exp(1j * theta) * psi
            entry["max_imag_after_phase"] = float(np.max(np.abs(aligned.imag)))
            entry["real_after_phase"] = bool(entry["max_imag_after_phase"] <= 1e-6)
            # quotient diagnostic: Re p / Im p against tan(kx + const)
            pp = np.exp(1j * theta) * part
            mask = np.abs(pp.imag) > 1e-3 * np.max(np.abs(pp))
            if mask.any() and abs(kc.representative) > 1e-12:
                quot = pp.real[mask] / pp.imag[mask]
                x0 = xs[mask][0]
                c0 = math.atan2(quot[0], 1.0) - kc.representative.real * x0
                ref = np.tan(kc.representative.real * xs[mask] + c0)
                entry["quotient_max_dev"] = float(np.max(np.abs(quot - ref)))
            else:
                entry["quotient_max_dev"] = None
        reports.append(entry)
    return {"applicable": True, "parts": reports}

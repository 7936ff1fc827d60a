"""Lattices, reciprocal lattices and quasimomentum congruence classes.

Quasimomenta are defined modulo 2*pi/gamma.  A congruence class is stored by
the representative whose real part lies in the half-open strip
(-pi/gamma, pi/gamma]; the boundary pi/gamma is kept (anti-periodic
multipliers map deterministically).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateLatticeError

#: default class-equality tolerance, relative to the modulus 2*pi/gamma
TAU_CLASS_REL = 1e-9


@dataclass(frozen=True)
class Lattice1D:
    gamma: float

    def __post_init__(self):
        g = float(self.gamma)
        if not (math.isfinite(g) and g > 0.0):
            raise ValueError(f"lattice period must be finite and positive, got {self.gamma!r}")
        object.__setattr__(self, "gamma", g)

    @property
    def modulus(self) -> float:
        """Reciprocal-lattice spacing 2*pi/gamma."""
        return 2.0 * math.pi / self.gamma

    @property
    def brillouin(self) -> tuple[float, float]:
        """The 1-D Brillouin interval (-pi/gamma, pi/gamma]."""
        half = math.pi / self.gamma
        return (-half, half)


@dataclass(frozen=True)
class CongruenceClass:
    representative: complex
    modulus: float

    def __repr__(self):
        return f"[{self.representative:.6g} mod {self.modulus:.6g}]"


def reduce_quasimomentum(k: complex, lattice: Lattice1D) -> CongruenceClass:
    """Reduce k so that Re(k) lies in (-pi/gamma, pi/gamma]; Im(k) is untouched."""
    k = complex(k)
    if not (math.isfinite(k.real) and math.isfinite(k.imag)):
        raise ValueError(f"quasimomentum must be finite, got {k!r}")
    mod = lattice.modulus
    t = k.real / mod
    m = math.floor(0.5 - t)
    re = k.real + m * mod
    # guard against rounding straddling the strip boundary
    if re > 0.5 * mod:
        re -= mod
    elif re <= -0.5 * mod:
        re += mod
    return CongruenceClass(complex(re, k.imag), mod)


def class_distance(a: CongruenceClass, b: CongruenceClass) -> float:
    """Distance between class representatives after mod reduction of the real part."""
    if abs(a.modulus - b.modulus) > 1e-12 * max(a.modulus, b.modulus):
        raise ValueError("congruence classes have different moduli")
    d = a.representative - b.representative
    dre = d.real - round(d.real / a.modulus) * a.modulus
    return math.hypot(dre, d.imag)


def class_equal(a: CongruenceClass, b: CongruenceClass, tol: float | None = None) -> bool:
    if tol is None:
        tol = TAU_CLASS_REL * a.modulus
    return class_distance(a, b) <= tol


def is_real_class(c: CongruenceClass, tol: float | None = None) -> bool:
    if tol is None:
        tol = TAU_CLASS_REL * c.modulus
    return abs(c.representative.imag) <= tol


class LatticeND:
    """A d-dimensional Bravais lattice.

    ``primitive`` holds the vectors gamma_j as rows.  ``transform`` is the
    matrix A whose rows are gamma_j / ||gamma_j||; ``reciprocal`` holds the
    dual vectors gamma*_j as rows, with gamma*_j . gamma_i = 2*pi*delta_ij.
    Instances are immutable after construction.
    """

    def __init__(self, primitive):
        P = np.array(primitive, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise ValueError("primitive vectors must form a square d x d matrix")
        d = P.shape[0]
        det = np.linalg.det(P)
        scale = max(np.linalg.norm(P, ord=np.inf), 1e-300)
        if abs(det) < 1e-12 * scale**d:
            raise DegenerateLatticeError("primitive vectors are linearly dependent")
        self.primitive = P
        self.reciprocal = 2.0 * math.pi * np.linalg.inv(P).T
        self.norms = np.linalg.norm(P, axis=1)
        self.transform = P / self.norms[:, None]
        self.transform_inv = np.linalg.inv(self.transform)
        for arr in (self.primitive, self.reciprocal, self.norms,
                    self.transform, self.transform_inv):
            arr.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.primitive.shape[0]

    def lattice_1d(self, j: int) -> Lattice1D:
        """The 1-D lattice along the j-th primitive direction (period ||gamma_j||)."""
        return Lattice1D(self.norms[j])


def reciprocal_lattice(lat: LatticeND) -> np.ndarray:
    """Dual vectors gamma*_j as rows of the returned matrix."""
    return lat.reciprocal.copy()


def cross_coefficients(lat: LatticeND) -> dict[tuple[int, int], float]:
    """Symmetric products omega_ij = sum_k a_ik a_jk of the unit rows of A, for i < j."""
    gram = lat.transform @ lat.transform.T
    out = {}
    for i in range(lat.dim):
        for j in range(i + 1, lat.dim):
            w = float(gram[i, j])
            out[(i, j)] = 0.0 if abs(w) < 1e-15 else w
    return out

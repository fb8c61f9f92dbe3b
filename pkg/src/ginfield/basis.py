"""Dirichlet eigenbasis of the unit disk, disk quadrature, Green's function,
and the coefficient algebra of the j^{2s}-weighted Sobolev scale.

The basis functions are indexed by (n, k) with n any integer and k >= 1:
angular harmonic e^{i n phi} times the radial profile J_{|n|}(j_{|n|,k} r),
normalized to unit L^2 norm on the disk.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

from .bessel import RootTable, bessel_j, bessel_j_prime


class DiskDomainError(ValueError):
    """Raised when a point lies outside the closed unit disk."""


class SingularityError(ValueError):
    """Raised when a kernel is evaluated on its diagonal z = w."""


def normalization_constant(n, k, table):
    """C_{n,k} = 1 / (sqrt(pi) J_{|n|+1}(j_{|n|,k})); depends on |n| only."""
    j = table.root(n, k)
    return 1.0 / (math.sqrt(math.pi) * bessel_j(abs(int(n)) + 1, j))


def eval_eigenfunction(n, k, z, table):
    """Basis function value at z (scalar or array), |z| <= 1."""
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    if np.any(r > 1.0 + 1e-12):
        raise DiskDomainError("point outside the closed unit disk")
    j = table.root(n, k)
    c = normalization_constant(n, k, table)
    radial = c * bessel_j(abs(int(n)), j * np.minimum(r, 1.0))
    phase = np.exp(1j * n * np.angle(z))
    out = radial * phase
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class DiskQuadrature:
    """Gauss-Legendre radial rule (weight r absorbed) tensored with a
    uniform angular grid.

    Exact for integrands r^p e^{i m phi} with p <= 2 * radial_order - 2
    and |m| < angular_order / 2 resolved exactly in the angular direction.
    """

    radial_order: int
    angular_order: int
    r: np.ndarray = field(repr=False)
    wr: np.ndarray = field(repr=False)
    theta: np.ndarray = field(repr=False)
    wt: float = field(repr=False)

    @classmethod
    def build(cls, radial_order=120, angular_order=64):
        x, w = leggauss(radial_order)
        r = 0.5 * (x + 1.0)
        wr = 0.5 * w * r  # absorb the r dr weight
        theta = 2.0 * math.pi * np.arange(angular_order) / angular_order
        wt = 2.0 * math.pi / angular_order
        return cls(radial_order, angular_order, r, wr, theta, wt)

    def nodes(self):
        """Complex nodes as a (radial, angular) grid."""
        return self.r[:, None] * np.exp(1j * self.theta[None, :])

    def weights(self):
        return self.wr[:, None] * self.wt * np.ones_like(self.theta)[None, :]


def disk_integrate(f, quad):
    """Integral of f over the unit disk; f maps complex arrays to values."""
    z = quad.nodes()
    vals = np.asarray(f(z))
    return complex(np.sum(vals * quad.weights()))


def green_dirichlet_closed(z, w):
    """Dirichlet Green's function of the disk Laplacian, closed form:
    (1/2pi)(log|z - w| - log|1 - conj(z) w|)."""
    z = complex(z)
    w = complex(w)
    if abs(z) >= 1 or abs(w) >= 1:
        raise DiskDomainError("both points must lie in the open disk")
    if z == w:
        raise SingularityError("Green's function diverges at z = w")
    return (math.log(abs(z - w)) - math.log(abs(1 - np.conj(z) * w))) / (2 * math.pi)


def green_dirichlet_series(z, w, table, n_cut=None, k_cut=None):
    """Eigenfunction expansion -sum e_{n,k}(z) e_{-n,k}(w) / j_{n,k}^2,
    truncated at |n| <= n_cut, k <= k_cut (table bounds by default)."""
    z = complex(z)
    w = complex(w)
    if z == w:
        raise SingularityError("Green's function diverges at z = w")
    n_cut = table.n_max if n_cut is None else n_cut
    k_cut = table.k_max if k_cut is None else k_cut
    rz, tz = abs(z), np.angle(z)
    rw, tw = abs(w), np.angle(w)
    if rz > 1 + 1e-12 or rw > 1 + 1e-12:
        raise DiskDomainError("both points must lie in the closed disk")
    total = 0.0
    for n in range(0, n_cut + 1):
        js = table.roots[n, :k_cut]
        cs = 1.0 / (math.sqrt(math.pi) * bessel_j(n + 1, js))
        term = np.sum(cs**2 * bessel_j(n, js * rz) * bessel_j(n, js * rw) / js**2)
        # e_{n,k}(z) e_{-n,k}(w) + e_{-n,k}(z) e_{n,k}(w): the phases
        # combine to 2 cos(n (theta_z - theta_w)); n = 0 counted once.
        ang = 2.0 * math.cos(n * (tz - tw)) if n > 0 else 1.0
        total += ang * term
    return -total


@dataclass
class CoeffVector:
    """Sparse coefficient vector over basis indices (n, k).

    If real_field, the represented function is real and the entries must
    satisfy entry(-n, k) = conj(entry(n, k)).
    """

    entries: dict
    real_field: bool = False

    def __post_init__(self):
        self.entries = {
            (int(n), int(k)): complex(v) for (n, k), v in self.entries.items()
        }
        for (n, k) in self.entries:
            if k < 1:
                raise ValueError(f"radial index must be >= 1, got ({n}, {k})")
        if self.real_field:
            for (n, k), v in self.entries.items():
                mirror = self.entries.get((-n, k), 0.0)
                if abs(np.conj(v) - mirror) > 1e-10 * max(1.0, abs(v)):
                    raise ValueError(
                        f"real_field vector violates conjugate symmetry at ({n}, {k})"
                    )

    def get(self, n, k):
        return self.entries.get((int(n), int(k)), 0.0 + 0.0j)

    def scale(self, c):
        return CoeffVector(
            {idx: c * v for idx, v in self.entries.items()},
            real_field=self.real_field and float(np.imag(c)) == 0.0,
        )

    def to_json(self):
        recs = [
            {"n": n, "k": k, "re": v.real, "im": v.imag}
            for (n, k), v in sorted(self.entries.items())
        ]
        return json.dumps(recs)

    @classmethod
    def from_json(cls, text, real_field=False):
        recs = json.loads(text)
        return cls(
            {(r["n"], r["k"]): complex(r["re"], r["im"]) for r in recs},
            real_field=real_field,
        )

    def evaluate(self, z, table):
        """Pointwise sum of entries times basis functions (cutoff-tagged by
        the vector's own finite support)."""
        total = np.zeros(np.shape(z), dtype=complex)
        for (n, k), v in self.entries.items():
            total = total + v * eval_eigenfunction(n, k, z, table)
        return total


def sobolev_norm(v, s, table):
    """Squared H^s norm: sum |a_{n,k}|^2 j_{n,k}^{2s}."""
    total = 0.0
    for (n, k), a in v.entries.items():
        j = table.root(n, k)
        total += abs(a) ** 2 * j ** (2.0 * s)
    return total


def pairing(phi, f):
    """Duality pairing sum over (n,k) of phi[n,k] * f[-n,k]."""
    total = 0.0 + 0.0j
    for (n, k), a in phi.entries.items():
        total += a * f.get(-n, k)
    return complex(total)


def basis_matrix(indices, quad, table):
    """Values of the listed basis functions on the quadrature grid,
    flattened to shape (nodes, len(indices))."""
    cols = []
    for (n, k) in indices:
        j = table.root(n, k)
        c = normalization_constant(n, k, table)
        radial = c * bessel_j(abs(n), j * quad.r)
        col = radial[:, None] * np.exp(1j * n * quad.theta)[None, :]
        cols.append(col.ravel())
    return np.column_stack(cols)


def gram_matrix(indices, quad, table):
    """Quadrature Gram matrix of the listed basis functions."""
    E = basis_matrix(indices, quad, table)
    w = quad.weights().ravel()
    return (E.conj().T * w) @ E


def project(f, indices, quad, table):
    """Quadrature Fourier-Bessel coefficients of f on the listed indices."""
    E = basis_matrix(indices, quad, table)
    z = quad.nodes()
    vals = np.asarray(f(z)).ravel()
    w = quad.weights().ravel()
    coeffs = E.conj().T @ (w * vals)
    return CoeffVector(dict(zip(map(tuple, indices), coeffs)))


def eigenfunction_radial_derivative(n, k, r, table):
    """d/dr of the radial profile C_{n,k} J_{|n|}(j r)."""
    j = table.root(n, k)
    c = normalization_constant(n, k, table)
    return c * j * bessel_j_prime(abs(int(n)), j * np.asarray(r, dtype=float))

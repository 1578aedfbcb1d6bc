"""Semisimple Frobenius data on the space of monic polynomials with
vanishing subleading coefficient: canonical coordinates from critical
values, the diagonal flat metric, its potential, and reconstruction of
coefficients from critical points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DegenerateLocus, DegenerateMetric, InvalidInput
from .poly import Polynomial, critical_data


@dataclass(frozen=True)
class CanonicalCoordinates:
    """Ordered critical points rho_i and values u^i = P(rho_i).

    The ordering is lexicographic by (re, im) of rho_i, which fixes one
    sheet of the root-ordering covering.
    """

    rho: tuple
    u: tuple

    @property
    def basis_labels(self):
        return tuple(f"d/du^{i + 1}" for i in range(len(self.u)))


@dataclass(frozen=True)
class MetricData:
    """Diagonal metric entries 1/P''(rho_i) and the potential eta."""

    g: tuple
    eta: complex


@dataclass(frozen=True)
class CellProfile:
    """Collision profile: k lines, m_i critical points on line i of which
    j_i distinct collision groups; q = sum of the j_i."""

    m: tuple
    j: tuple

    def __post_init__(self):
        if len(self.m) == 0 or len(self.m) != len(self.j):
            raise InvalidInput("m and j must be nonempty lists of equal length")
        for mi, ji in zip(self.m, self.j):
            if mi < 1 or not (1 <= ji <= mi):
                raise InvalidInput(f"need 1 <= j_i <= m_i, got m={mi} j={ji}")

    @property
    def k(self) -> int:
        return len(self.m)

    @property
    def q(self) -> int:
        return sum(self.j)


def cell_dimension(profile: CellProfile) -> int:
    """Dimension of the collision cell: q + k."""
    return profile.q + profile.k


def coeffs_from_crit(rho, constant: complex = 0.0) -> Polynomial:
    """Monic degree n+1 polynomial whose derivative is (n+1) * prod(z - rho_i).

    Coefficient i (of z^(n-i)) is (-1)^(i+1) (n+1)/(n-i) sigma_(i+1)(rho);
    the constant term is free.  Requires sum(rho) = 0.
    """
    rho = np.asarray(list(rho), dtype=np.complex128)
    n = rho.shape[0]
    if n < 1:
        raise InvalidInput("need at least one critical point")
    scale = 1.0 + float(np.max(np.abs(rho)))
    if abs(np.sum(rho)) > 1e-9 * scale:
        raise InvalidInput(f"critical points must sum to zero, got {np.sum(rho)}")
    prod = kernels.poly_from_roots(rho)  # prod[k] = (-1)^k sigma_k
    coeffs = np.zeros(n + 2, dtype=np.complex128)
    coeffs[0] = 1.0
    for i in range(1, n):
        coeffs[i + 1] = (n + 1) / (n - i) * prod[i + 1]
    coeffs[n + 1] = constant
    return Polynomial(coeffs)


def _semisimple_crit(p: Polynomial):
    n1 = p.degree
    if n1 < 2:
        raise InvalidInput("need degree at least 2")
    scale = 1.0 + float(np.max(np.abs(p.coeffs)))
    if abs(p.coeffs[1]) > 1e-9 * scale:
        raise InvalidInput("subleading coefficient must vanish (zero-sum chart)")
    cd = critical_data(p)
    for pt, _val, mult in cd.entries:
        if mult > 1:
            return cd, pt
    return cd, None


def canonical_coords(p: Polynomial) -> CanonicalCoordinates:
    """Critical points and values in the fixed lexicographic ordering."""
    cd, repeated = _semisimple_crit(p)
    if repeated is not None:
        raise DegenerateLocus(f"repeated critical point at {repeated}")
    entries = sorted(cd.entries, key=lambda e: (e[0].real, e[0].imag))
    rho = tuple(e[0] for e in entries)
    scale = 1.0 + max(abs(r) for r in rho)
    assert abs(sum(rho)) < 1e-7 * scale
    return CanonicalCoordinates(rho=rho, u=tuple(e[1] for e in entries))


def flat_metric(p: Polynomial) -> MetricData:
    """g_ii = 1/P''(rho_i) and eta = a_1/(n+1).

    a_1 is the coefficient of z^(n-1) in the degree n+1 polynomial.
    """
    cd, repeated = _semisimple_crit(p)
    if repeated is not None:
        raise DegenerateMetric(f"P'' vanishes at critical point {repeated}")
    coords = canonical_coords(p)
    ddc = kernels.derivative_coeffs(kernels.derivative_coeffs(p.coeffs))
    g = []
    scale = 1.0 + float(np.max(np.abs(p.coeffs)))
    for r in coords.rho:
        dd = complex(np.polyval(ddc, r))
        if abs(dd) < 1e-12 * scale:
            raise DegenerateMetric(f"P'' vanishes at critical point {r}")
        g.append(1.0 / dd)
    n1 = p.degree
    eta = complex(p.coeffs[2]) / n1 if n1 >= 2 else 0.0
    return MetricData(g=tuple(g), eta=eta)


def crit_value_jacobian(p: Polynomial) -> np.ndarray:
    """J[i, j] = du^i/da_j on the zero-sum chart: equals rho_i^(n-j-1).

    The envelope relation du^i = (dP)(rho_i) kills the drho terms, so the
    Jacobian is the evaluation of the coefficient monomials at rho_i.
    Columns follow a_1..a_n, i.e. z^(n-1) down to z^0 for degree n+1.
    """
    coords = canonical_coords(p)
    n = len(coords.rho)
    jac = np.empty((n, n), dtype=np.complex128)
    for i, r in enumerate(coords.rho):
        for j in range(n):
            jac[i, j] = r ** (n - 1 - j)
    return jac

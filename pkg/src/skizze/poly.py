"""Monic complex polynomials: construction, root finding, critical data.

The text form used across the CLI, the service and file fixtures is a
comma-separated list of coefficient pairs ``re:im`` from the leading
coefficient down to the constant; the leading pair must be ``1:0``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InvalidInput, NumericFailure

ABERTH_MAX_ITER = 500
ABERTH_STEP_TOL = 1e-14
CLUSTER_VALIDATE_TOL = 1e-9


class Polynomial:
    """Monic polynomial with descending complex128 coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = np.asarray(coeffs, dtype=np.complex128)
        if c.ndim != 1 or c.shape[0] < 2:
            raise InvalidInput("need at least degree 1 (two coefficients)")
        if not np.all(np.isfinite(c.view(np.float64))):
            raise InvalidInput("coefficients must be finite")
        if c[0] != 1.0 + 0.0j:
            raise InvalidInput(f"polynomial must be monic, leading {c[0]}")
        self.coeffs = c

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    def __call__(self, z):
        return np.polyval(self.coeffs, z)

    def derivative_coeffs(self) -> np.ndarray:
        return kernels.derivative_coeffs(self.coeffs)

    def derivative(self) -> "Polynomial":
        """d/dz as a monic polynomial (the leading factor n divided out)."""
        if self.degree < 2:
            raise InvalidInput("derivative of a linear polynomial is constant")
        d = self.derivative_coeffs()
        return Polynomial(d / d[0])

    def __eq__(self, other):
        return isinstance(other, Polynomial) and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __repr__(self):
        return f"Polynomial({format_poly(self)})"


@dataclass(frozen=True)
class RootSet:
    """Roots with multiplicities; multiplicities sum to the degree."""

    entries: tuple  # of (point: complex, multiplicity: int)

    @property
    def points(self):
        return [p for p, _ in self.entries]

    @property
    def total(self) -> int:
        return sum(m for _, m in self.entries)


@dataclass(frozen=True)
class CriticalData:
    """Critical points with values and multiplicities in the derivative."""

    entries: tuple  # of (point: complex, value: complex, multiplicity: int)

    @property
    def points(self):
        return [p for p, _, _ in self.entries]

    @property
    def values(self):
        return [v for _, v, _ in self.entries]

    @property
    def total(self) -> int:
        return sum(m for _, _, m in self.entries)


def parse_poly(text: str) -> Polynomial:
    pairs = [p.strip() for p in text.split(",") if p.strip()]
    if not pairs:
        raise InvalidInput("empty polynomial text")
    coeffs = []
    for pair in pairs:
        try:
            re_s, im_s = pair.split(":")
            coeffs.append(complex(float(re_s), float(im_s)))
        except ValueError as exc:
            raise InvalidInput(f"bad coefficient pair {pair!r}") from exc
    return Polynomial(coeffs)


def _num(x: float) -> str:
    x = float(x)
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def format_poly(p: Polynomial) -> str:
    return ",".join(f"{_num(c.real)}:{_num(c.imag)}" for c in p.coeffs)


def from_roots(roots) -> Polynomial:
    """Monic polynomial whose root multiset equals the input list."""
    if len(roots) == 0:
        raise InvalidInput("root list must be nonempty")
    arr = np.asarray(list(roots), dtype=np.complex128)
    return Polynomial(kernels.poly_from_roots(arr))


def root_bound(p: Polynomial) -> float:
    """Cauchy-type radius: every root has modulus below 1 + max|c_i|."""
    return 1.0 + float(np.max(np.abs(p.coeffs[1:])))


def trace_radius(p: Polynomial) -> float:
    """Circle radius enclosing all roots and critical points with margin."""
    r = root_bound(p)
    if p.degree >= 2:
        r = max(r, root_bound(p.derivative()))
    return 1.5 * r


def _coef_scale(coeffs: np.ndarray) -> float:
    return 1.0 + float(np.max(np.abs(coeffs)))


def _derivative_tower(coeffs: np.ndarray):
    tower = [coeffs]
    c = coeffs
    while c.shape[0] > 1:
        c = kernels.derivative_coeffs(c)
        tower.append(c)
    return tower


def _poly_mag_bound(coeffs: np.ndarray, z: complex) -> float:
    """Crude magnitude scale of a polynomial near z, for relative residuals."""
    a = max(1.0, abs(z))
    return float(np.sum(np.abs(coeffs) * a ** np.arange(coeffs.shape[0] - 1, -1, -1)))


def _validated_center(tower, members, mult: int):
    """Polish a candidate multiple root and check it annihilates the lower
    derivatives; returns the center or None if the cluster is spurious."""
    if mult >= len(tower):
        return None
    target = tower[mult - 1]  # P^(m-1), simple zero at an m-fold root
    dtarget = tower[mult] if mult < len(tower) else None
    if dtarget is None or target.shape[0] < 2:
        return None
    center = complex(np.mean(members))
    z, _ = kernels.newton_root(target, dtarget, center, 60, 1e-15)
    for j in range(mult):
        resid = abs(np.polyval(tower[j], z))
        if resid > CLUSTER_VALIDATE_TOL * _poly_mag_bound(tower[j], z):
            return None
    return z


def _cluster_roots(raw: np.ndarray, coeffs: np.ndarray, radius: float):
    """Two-phase clustering: tight greedy merge, then agglomerative merging
    of wider groups accepted only when a polished center annihilates the
    lower derivatives (multiple roots scatter like eps^(1/m))."""
    n = raw.shape[0]
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(raw[i] - raw[j]) <= radius:
                parent[find(i)] = find(j)

    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(raw[i])
    clusters = [(complex(np.mean(g)), len(g), list(g)) for g in groups.values()]

    tower = _derivative_tower(coeffs)
    # refine every multiple cluster against the derivative tower
    refined = []
    for center, mult, members in clusters:
        if mult >= 2:
            polished = _validated_center(tower, members, mult)
            if polished is not None:
                center = polished
        refined.append((center, mult, members))
    clusters = refined

    wide = radius
    deg = coeffs.shape[0] - 1
    if deg >= 2:
        wide = max(radius, 1e-13 ** (1.0 / (deg + 1)) * _coef_scale(coeffs))
    changed = True
    vetoed = set()
    while changed and len(clusters) > 1:
        changed = False
        order = []
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                d = abs(clusters[i][0] - clusters[j][0])
                if d <= wide and (i, j) not in vetoed:
                    order.append((d, i, j))
        order.sort(key=lambda t: t[0])
        for _, i, j in order:
            ci, mi, gi = clusters[i]
            cj, mj, gj = clusters[j]
            center = _validated_center(tower, gi + gj, mi + mj)
            if center is None:
                vetoed.add((i, j))
                continue
            rest = [clusters[k] for k in range(len(clusters)) if k not in (i, j)]
            clusters = rest + [(center, mi + mj, gi + gj)]
            vetoed = set()
            changed = True
            break
    clusters.sort(key=lambda c: (c[0].real, c[0].imag))
    return [(c, m) for c, m, _ in clusters]


def find_roots(p: Polynomial, tol: float = 1e-8, cluster_radius: float | None = None) -> RootSet:
    """All roots with multiplicities, via simultaneous iteration.

    Near-coincident approximations within the clustering radius merge into
    one root with summed multiplicity.
    """
    n = p.degree
    coeffs = p.coeffs
    if n == 1:
        return RootSet(entries=((complex(-coeffs[1]), 1),))
    bound = root_bound(p)
    if cluster_radius is None:
        cluster_radius = 1e-6 * bound
    k = np.arange(n)
    z = bound * np.exp(2j * np.pi * (k + 0.351) / n + 0.4j)
    z = z.astype(np.complex128)
    _, _converged = kernels.aberth(coeffs, z, ABERTH_MAX_ITER, ABERTH_STEP_TOL)
    scale = _coef_scale(coeffs)
    residuals = np.abs(np.polyval(coeffs, z))
    clusters = _cluster_roots(z, coeffs, cluster_radius)
    for c, m in clusters:
        if m == 1 and abs(np.polyval(coeffs, c)) > tol * scale:
            raise NumericFailure(
                f"root residual {abs(np.polyval(coeffs, c)):.3e} above tolerance "
                f"(max raw residual {residuals.max():.3e})",
                best=[c for c, _ in clusters],
            )
    return RootSet(entries=tuple((c, m) for c, m in clusters))


def critical_data(p: Polynomial, tol: float = 1e-8, cluster_radius: float | None = None) -> CriticalData:
    """Roots of P' with multiplicities, and the values of P there."""
    if p.degree < 2:
        return CriticalData(entries=())
    dp = p.derivative()
    rs = find_roots(dp, tol=tol, cluster_radius=cluster_radius)
    entries = tuple((pt, complex(p(pt)), m) for pt, m in rs.entries)
    return CriticalData(entries=entries)


def deflate(p: Polynomial, root: complex) -> Polynomial:
    """Divide out (z - root) by synthetic division (remainder dropped)."""
    if p.degree < 2:
        raise InvalidInput("cannot deflate a linear polynomial")
    c = p.coeffs
    out = np.empty(c.shape[0] - 1, dtype=np.complex128)
    acc = c[0]
    for i in range(c.shape[0] - 1):
        out[i] = acc
        acc = acc * root + c[i + 1]
    return Polynomial(out)

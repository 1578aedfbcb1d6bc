"""Deformation along paths in coefficient space: wall-event detection,
stratum timelines, and marker-front advection by the normal-velocity law
dX/dt = -(dPhi/dt) grad Phi / |grad Phi|^2 with Phi = Re P or Im P.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import (AdvectionSingular, InvalidInput, NumericFailure,
                     PersistentDegeneracyWarning, UnresolvedCluster)
from .graph import RED
from .poly import CLUSTER_VALIDATE_TOL, Polynomial, _poly_mag_bound, find_roots
from .tracer import TraceConfig, classify, trace

KIND_VALUE_REAL = "critical-value-real"
KIND_VALUE_IMAGINARY = "critical-value-imaginary"
KIND_ROOT_COLLISION = "root-collision"
KIND_CRIT_COLLISION = "critical-point-collision"


@dataclass(frozen=True)
class PathSegment:
    mode: str  # "coeff" | "root"
    c0: np.ndarray | None = None
    c1: np.ndarray | None = None
    r0: np.ndarray | None = None
    r1: np.ndarray | None = None

    def coeffs(self, tau: float) -> np.ndarray:
        if self.mode == "coeff":
            return (1 - tau) * self.c0 + tau * self.c1
        roots = (1 - tau) * self.r0 + tau * self.r1
        return kernels.poly_from_roots(roots)


class CoeffPath:
    """Piecewise path of monic polynomials, t in [0, 1] split uniformly
    over the segments.  Coefficient-linear or root-linear per segment."""

    def __init__(self, segments, mode):
        if not segments:
            raise InvalidInput("path needs at least one segment")
        self.segments = list(segments)
        self.mode = mode
        deg = {s.coeffs(0.0).shape[0] for s in self.segments}
        if len(deg) != 1:
            raise InvalidInput("all path segments must share one degree")
        self.n = deg.pop() - 1

    @classmethod
    def coeff_linear(cls, p0: Polynomial, p1: Polynomial) -> "CoeffPath":
        if p0.degree != p1.degree:
            raise InvalidInput("endpoints must share the degree")
        return cls([PathSegment("coeff", c0=p0.coeffs, c1=p1.coeffs)], "coeff")

    @classmethod
    def root_linear(cls, p0: Polynomial, p1: Polynomial) -> "CoeffPath":
        """Roots interpolated (greedy nearest pairing), then expanded."""
        if p0.degree != p1.degree:
            raise InvalidInput("endpoints must share the degree")
        r0 = _flat_roots(p0)
        r1 = _flat_roots(p1)
        paired = []
        free = list(range(len(r1)))
        for a in r0:
            j = min(free, key=lambda j: abs(r1[j] - a))
            free.remove(j)
            paired.append(r1[j])
        return cls([PathSegment("root", r0=np.array(r0), r1=np.array(paired))], "root")

    @classmethod
    def from_root_waypoints(cls, waypoints) -> "CoeffPath":
        """Piecewise root-linear path through ordered root configurations."""
        pts = [np.asarray(w, dtype=np.complex128) for w in waypoints]
        if len(pts) < 2:
            raise InvalidInput("need at least two waypoints")
        segs = [PathSegment("root", r0=pts[i], r1=pts[i + 1])
                for i in range(len(pts) - 1)]
        return cls(segs, "root")

    def locate(self, t: float):
        k = len(self.segments)
        if not (0.0 <= t <= 1.0):
            raise InvalidInput(f"t={t} outside [0, 1]")
        i = min(int(t * k), k - 1)
        return i, t * k - i

    def poly(self, t: float) -> Polynomial:
        i, tau = self.locate(t)
        return Polynomial(self.segments[i].coeffs(tau))

    def scale(self) -> float:
        out = 1.0
        for s in self.segments:
            out = max(out, float(np.max(np.abs(s.coeffs(0.0)))),
                      float(np.max(np.abs(s.coeffs(1.0)))))
        return out


def _flat_roots(p: Polynomial):
    out = []
    for pt, m in find_roots(p).entries:
        out.extend([pt] * m)
    return out


@dataclass(frozen=True)
class WallEvent:
    t: float
    kind: str
    indices: tuple
    wall_code: str | None = None

    def record(self):
        return {"t": self.t, "kind": self.kind, "indices": list(self.indices),
                **({"wall_code": self.wall_code} if self.wall_code else {})}


@dataclass
class Timeline:
    events: list
    segments: list  # (t0, t1, code)

    def record(self):
        return {
            "events": [e.record() for e in self.events],
            "segments": [{"t0": a, "t1": b, "code": c} for a, b, c in self.segments],
        }


@dataclass
class MarkerFront:
    color: str
    markers: np.ndarray
    t: float


class _Continuation:
    """Critical points and roots continued along the path by warm-started
    simultaneous iteration, with index matching to the previous sample."""

    def __init__(self, path: CoeffPath):
        self.path = path
        self.prev_roots = None
        self.prev_crits = None

    def anchored(self, roots, crits):
        """Evaluator that restarts from a fixed anchor on every call, so
        root searches stay deterministic however the caller jumps in t."""
        def at(t):
            local = _Continuation(self.path)
            local.prev_roots = roots.copy()
            local.prev_crits = crits.copy()
            return local.at(t)
        return at

    def _solve(self, coeffs, prev):
        n = coeffs.shape[0] - 1
        if n == 0:
            return np.empty(0, dtype=np.complex128)

        def cold():
            bound = 1.0 + float(np.max(np.abs(coeffs[1:]))) if n >= 1 else 1.0
            return (bound * np.exp(2j * np.pi * (np.arange(n) + 0.351) / n + 0.4j)
                    ).astype(np.complex128)

        def good(z):
            mag = _poly_mag_bound(coeffs, complex(np.max(np.abs(z))))
            return np.all(np.abs(np.polyval(coeffs, z)) <= 1e-7 * mag)

        z = prev.copy() if prev is not None and prev.shape[0] == n else cold()
        kernels.aberth(coeffs, z, 200, 1e-14)
        if not good(z):
            # warm starts trapped on a symmetry axis cannot converge;
            # restart from the complex ring
            z = cold()
            kernels.aberth(coeffs, z, 500, 1e-14)
            if not good(z):
                raise NumericFailure("continuation solve failed", best=z)
        if prev is not None and prev.shape[0] == n:
            z = _match_order(prev, z)
        return z

    def at(self, t):
        i, tau = self.path.locate(t)
        coeffs = self.path.segments[i].coeffs(tau)
        roots = self._solve(coeffs, self.prev_roots)
        dcoef = kernels.derivative_coeffs(coeffs)
        crits = self._solve(dcoef / dcoef[0], self.prev_crits)
        self.prev_roots = roots
        self.prev_crits = crits
        values = np.array([complex(np.polyval(coeffs, c)) for c in crits])
        return roots, crits, values, coeffs


def _match_order(prev, new):
    """Reorder `new` to follow `prev` (greedy nearest, tightest pair first)."""
    out = np.empty_like(prev)
    pairs = sorted(((abs(new[j] - prev[i]), i, j)
                    for i in range(len(prev)) for j in range(len(new))))
    used_i, used_j = set(), set()
    for _, i, j in pairs:
        if i in used_i or j in used_j:
            continue
        used_i.add(i)
        used_j.add(j)
        out[i] = new[j]
    return out


def _bisect(f, a, b, fa, fb, iters=60):
    for _ in range(iters):
        m = 0.5 * (a + b)
        fm = f(m)
        if fa * fm <= 0:
            b, fb = m, fm
        else:
            a, fa = m, fm
    return 0.5 * (a + b)


def _is_double_point(coeffs, z_pair):
    """Certify a genuine collision: polish the midpoint on the derivative
    and require the polynomial itself to vanish there."""
    tower = [coeffs]
    while tower[-1].shape[0] > 1:
        tower.append(kernels.derivative_coeffs(tower[-1]))
    mid = complex(np.mean(z_pair))
    z, _ = kernels.newton_root(tower[1], tower[2], mid, 60, 1e-15)
    for j in (0, 1):
        if abs(np.polyval(tower[j], z)) > CLUSTER_VALIDATE_TOL * _poly_mag_bound(tower[j], z):
            return False
    return True


def track_walls(path: CoeffPath, tol_t: float = 1e-10, grid: int = 256,
                classify_walls: bool = True, _max_refine: int = 3):
    """Wall events along the path, localized by bisection to ``tol_t``.

    Sign changes of Re/Im of every continued critical value, and distance
    minima of root and critical-point pairs certified as collisions.  The
    scan is repeated on a doubled grid; disagreement refines up to
    ``_max_refine`` times before an unresolved-cluster error.
    """
    _warn_degenerate_endpoints(path)
    for attempt in range(_max_refine):
        ev1 = _scan(path, tol_t, grid << attempt)
        ev2 = _scan(path, tol_t, (grid << attempt) * 2)
        if _events_agree(ev1, ev2, tol_t):
            events = ev2
            break
    else:
        raise UnresolvedCluster(
            f"wall events unstable after refining to grid {grid << _max_refine}")
    if classify_walls:
        events = [
            WallEvent(e.t, e.kind, e.indices, classify(path.poly(e.t))[1])
            for e in events
        ]
    return events


def _events_agree(ev1, ev2, tol_t):
    if [(e.kind, e.indices) for e in ev1] != [(e.kind, e.indices) for e in ev2]:
        return False
    return all(abs(a.t - b.t) <= max(10 * tol_t, 1e-12) for a, b in zip(ev1, ev2))


def _warn_degenerate_endpoints(path):
    for t in (0.0, 1.0):
        coeffs = path.poly(t).coeffs
        if coeffs.shape[0] < 3:
            continue
        dcoef = kernels.derivative_coeffs(coeffs)
        crits = np.roots(dcoef)
        vals = np.polyval(coeffs, crits)
        for v in vals:
            if abs(v.real) <= 1e-9 * (1 + abs(v)) or abs(v.imag) <= 1e-9 * (1 + abs(v)):
                warnings.warn(f"path endpoint at t={t} lies on a wall",
                              PersistentDegeneracyWarning)
                return


def _scan(path: CoeffPath, tol_t, grid):
    n = path.n
    scale = path.scale()
    ts = np.linspace(0.0, 1.0, grid + 1)
    cont = _Continuation(path)
    samples = [cont.at(t) for t in ts]
    events = []

    ncrit = len(samples[0][1])
    ztol = 1e-11 * scale
    # critical-value axis crossings
    for i in range(ncrit):
        for part, kind in ((np.real, KIND_VALUE_IMAGINARY), (np.imag, KIND_VALUE_REAL)):
            f = np.array([part(s[2][i]) for s in samples])
            zero = np.abs(f) <= ztol
            if np.all(zero):
                warnings.warn(
                    f"critical value {i}: {kind} event function is identically ~0 "
                    "(path runs inside a wall)", PersistentDegeneracyWarning)
                continue
            if np.any(zero):
                warnings.warn(
                    f"critical value {i}: {kind} event function vanishes on a "
                    "sub-interval (path partly inside a wall)",
                    PersistentDegeneracyWarning)

            iters = max(20, int(math.log2(max(2.0, 1.0 / (grid * tol_t)))) + 4)
            for j in range(grid):
                if zero[j] or zero[j + 1]:
                    continue
                fa, fb = f[j], f[j + 1]
                if fa * fb < 0:
                    at = cont.anchored(samples[j][0], samples[j][1])

                    def fval(t, i=i, part=part, at=at):
                        return part(at(t)[2][i])

                    t_star = _bisect(fval, ts[j], ts[j + 1], fa, fb, iters=iters)
                    value = complex(at(t_star)[2][i])
                    if abs(value) <= 1e-7 * scale:
                        continue  # a collision in disguise, reported below
                    events.append(WallEvent(t_star, kind, (i,)))
            # entries/exits of the zero zone are stratum changes too
            for j in range(grid):
                if zero[j] == zero[j + 1]:
                    continue
                at = cont.anchored(samples[j][0], samples[j][1])

                def gval(t, i=i, part=part, at=at, ztol=ztol):
                    return abs(part(at(t)[2][i])) - 2 * ztol

                ga, gb = gval(ts[j]), gval(ts[j + 1])
                if ga * gb >= 0:
                    continue
                t_star = _bisect(gval, ts[j], ts[j + 1], ga, gb, iters=iters)
                value = complex(at(t_star)[2][i])
                if abs(value) <= 1e-7 * scale:
                    continue
                events.append(WallEvent(t_star, kind, (i,)))

    # pairwise collisions of roots and of critical points
    for which, kind in ((0, KIND_ROOT_COLLISION), (1, KIND_CRIT_COLLISION)):
        m = len(samples[0][which])
        for i in range(m):
            for j in range(i + 1, m):
                d2 = np.array([abs(s[which][i] - s[which][j]) ** 2 for s in samples])
                for k in range(1, grid):
                    if d2[k] <= d2[k - 1] and d2[k] <= d2[k + 1] and \
                            d2[k] < (1e-2 * scale) ** 2:
                        at = cont.anchored(samples[k - 1][0], samples[k - 1][1])

                        def dist2(t, i=i, j=j, which=which, at=at):
                            s = at(t)
                            return abs(s[which][i] - s[which][j]) ** 2

                        t_star = _golden_min(dist2, ts[k - 1], ts[k + 1], tol_t)
                        roots, crits, _vals, coeffs = at(t_star)
                        pts = roots if which == 0 else crits
                        target = coeffs if which == 0 else \
                            kernels.derivative_coeffs(coeffs) / (path.n)
                        if _is_double_point(target, (pts[i], pts[j])):
                            events.append(WallEvent(t_star, kind, (i, j)))

    events.sort(key=lambda e: (e.t, e.kind, e.indices))
    deduped = []
    for e in events:
        if deduped and deduped[-1].kind == e.kind and deduped[-1].indices == e.indices \
                and abs(deduped[-1].t - e.t) <= max(10 * tol_t, 1e-12):
            continue
        deduped.append(e)
    return deduped


def _golden_min(f, a, b, tol):
    phi = (math.sqrt(5) - 1) / 2
    x1 = b - phi * (b - a)
    x2 = a + phi * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 < f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - phi * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + phi * (b - a)
            f2 = f(x2)
    return 0.5 * (a + b)


def stratum_timeline(path: CoeffPath, tol_t: float = 1e-10,
                     cfg: TraceConfig | None = None) -> Timeline:
    """Classify the path: wall events plus the stratum code per segment."""
    events = track_walls(path, tol_t=tol_t)
    cuts = [0.0] + [e.t for e in events] + [1.0]
    segments = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b - a < 1e-12:
            continue
        mid = 0.5 * (a + b)
        segments.append((a, b, classify(path.poly(mid), cfg)[1]))
    return Timeline(events=events, segments=segments)


def seed_markers(path: CoeffPath, color: str, t: float = 0.0,
                 max_markers: int = 120) -> MarkerFront:
    """Markers subsampled from the traced arcs of one color at time t."""
    s = trace(path.poly(t))
    pts = []
    for arc in s.arcs:
        if arc.color != color:
            continue
        inner = arc.points[1:-1]
        step = max(1, len(inner) // 12)
        pts.extend(inner[::step])
    if len(pts) > max_markers:
        stride = int(math.ceil(len(pts) / max_markers))
        pts = pts[::stride]
    return MarkerFront(color=color, markers=np.array(pts, dtype=np.complex128), t=t)


def advect_front(path: CoeffPath, color: str, time_grid,
                 front: MarkerFront | None = None,
                 steps_per_unit: int = 512, grad_floor: float | None = None):
    """March a marker front through the time grid; returns one MarkerFront
    per grid time.  The window must not contain wall events (split there).
    """
    times = [float(t) for t in time_grid]
    if len(times) < 2 or any(b <= a for a, b in zip(times[:-1], times[1:])):
        raise InvalidInput("time grid must be strictly increasing")
    scale = path.scale()
    if grad_floor is None:
        grad_floor = 1e-9 * scale
    if front is None:
        front = seed_markers(path, color, times[0])
    fronts = [front]
    markers = front.markers.copy()
    empty_c = np.empty(0, dtype=np.complex128)
    for a, b in zip(times[:-1], times[1:]):
        ia, ta = path.locate(a)
        ib, tb = path.locate(b)
        sub = []  # (segment index, tau0, tau1)
        if ia == ib:
            sub.append((ia, ta, tb))
        else:
            sub.append((ia, ta, 1.0))
            sub.extend((i, 0.0, 1.0) for i in range(ia + 1, ib))
            if tb > 0:
                sub.append((ib, 0.0, tb))
        for i, t0, t1 in sub:
            if t1 <= t0:
                continue
            seg = path.segments[i]
            nsteps = max(4, int(math.ceil((t1 - t0) * steps_per_unit)))
            if seg.mode == "coeff":
                status, bad, bad_t = kernels.advect_markers(
                    False, seg.c0, seg.c1, empty_c, empty_c,
                    color == RED, markers, t0, t1, nsteps, grad_floor)
            else:
                status, bad, bad_t = kernels.advect_markers(
                    True, empty_c, empty_c, seg.r0, seg.r1,
                    color == RED, markers, t0, t1, nsteps, grad_floor)
            if status != 0:
                t_global = (i + bad_t) / len(path.segments)
                raise AdvectionSingular(
                    f"gradient below floor at marker {bad}",
                    location=complex(markers[bad]), t=t_global)
        fronts.append(MarkerFront(color=color, markers=markers.copy(), t=b))
    return fronts


def front_residual(path: CoeffPath, front: MarkerFront) -> float:
    """max |level function| over the markers at the front's time."""
    coeffs = path.poly(front.t).coeffs
    vals = np.polyval(coeffs, front.markers)
    f = vals.imag if front.color == RED else vals.real
    return float(np.max(np.abs(f))) if len(f) else 0.0


def hj_residual(path: CoeffPath, marker: complex, velocity: complex, t: float,
                color: str) -> float:
    """|dPhi/dt + v . grad Phi| at the marker for a realized velocity."""
    i, tau = path.locate(t)
    seg = path.segments[i]
    k = len(path.segments)
    if seg.mode == "coeff":
        _p, dp, pt = kernels._path_eval_coeff(seg.c0, seg.c1, complex(marker), tau)
    else:
        _p, dp, pt = kernels._path_eval_roots(seg.r0, seg.r1, complex(marker), tau)
    pt = pt * k  # segment tau runs k times faster than global t
    total = pt + velocity * dp
    return abs(total.imag) if color == RED else abs(total.real)

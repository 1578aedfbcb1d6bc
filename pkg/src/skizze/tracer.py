"""Numerical extraction of the skizze of a polynomial: trace the level
sets Re P = 0 (blue) and Im P = 0 (red), anchor arcs to roots, on-skizze
critical points and boundary leaves, and assemble the combinatorial map.

Vertices are known a priori (roots and critical points are solved first),
so tracing is pure connectivity discovery: every arc is traced from both
of its end ports and the two results must match.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .errors import ConditioningFailure, ExtractionFailure, InvalidInput, StructuralError, TraceFailure
from .graph import BLUE, RED, GaussGraph, Vertex, canonical_code, validate
from .poly import Polynomial, critical_data, find_roots, trace_radius

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class TraceConfig:
    """Step-size and tolerance knobs, mostly relative to the trace radius."""

    radius: float | None = None
    initial_step: float | None = None
    min_step: float | None = None
    max_step: float | None = None
    corrector_tol: float | None = None  # normal-distance tolerance
    snap_radius: float | None = None
    max_steps: int = 40000
    axis_tol: float = 1e-9  # on-skizze test for critical values
    cluster_radius: float | None = None  # root merging before tracing
    seed_doublings: int = 10

    def resolved(self, base_radius: float) -> "ResolvedConfig":
        r = self.radius if self.radius is not None else base_radius
        h0 = self.initial_step if self.initial_step is not None else r / 60.0
        hmin = self.min_step if self.min_step is not None else r * 1e-10
        hmax = self.max_step if self.max_step is not None else r / 25.0
        ctol = self.corrector_tol if self.corrector_tol is not None else r * 1e-11
        snap = self.snap_radius if self.snap_radius is not None else r * 1e-6
        if not (0 < hmin <= h0 <= hmax):
            raise InvalidInput(f"need 0 < min_step <= initial_step <= max_step, got {hmin}, {h0}, {hmax}")
        if snap <= ctol:
            raise InvalidInput("snap radius must exceed corrector tolerance")
        return ResolvedConfig(r, h0, hmin, hmax, ctol, snap, self.max_steps,
                              self.axis_tol, self.cluster_radius, self.seed_doublings)


@dataclass(frozen=True)
class ResolvedConfig:
    radius: float
    h0: float
    hmin: float
    hmax: float
    ctol: float
    snap: float
    max_steps: int
    axis_tol: float
    cluster_radius: float | None
    seed_doublings: int


@dataclass(frozen=True)
class SkizzeVertex:
    id: int
    position: complex
    kind: str  # "root" | "crit"
    mult: int  # root multiplicity, or multiplicity of P' at a crit
    color: str | None = None  # crit vertices are monochromatic


@dataclass(frozen=True)
class Arc:
    color: str
    points: np.ndarray  # polyline traced from end_a
    end_a: tuple  # ("v", vertex id, port index) or ("leaf", slot)
    end_b: tuple
    points_reverse: np.ndarray | None = None  # same arc traced from end_b


@dataclass(frozen=True)
class Skizze:
    poly: Polynomial
    radius: float
    vertices: tuple  # SkizzeVertex
    arcs: tuple  # Arc
    ports: dict  # vertex id -> list of (angle, color) in CCW order
    seeds: tuple  # (slot, angle, color)

    @property
    def n(self):
        return self.poly.degree


def _angle_dist(a, b):
    d = (a - b) % TWO_PI
    return min(d, TWO_PI - d)


def _branch_angles(coef_local: complex, k: int, color: str):
    """Directions of the 2k rays of the local model c (z - z0)^k for one
    color: arg c + k theta = pi/2 (mod pi) for blue, = 0 (mod pi) for red."""
    base = (math.pi / 2 if color == BLUE else 0.0) - np.angle(coef_local)
    return [((base + j * math.pi) / k) % TWO_PI for j in range(2 * k)]


def _derivative_tower(coeffs):
    tower = [np.asarray(coeffs, dtype=np.complex128)]
    while tower[-1].shape[0] > 1:
        tower.append(kernels.derivative_coeffs(tower[-1]))
    return tower


class _Tracer:
    def __init__(self, p: Polynomial, cfg: ResolvedConfig):
        self.p = p
        self.cfg = cfg
        self.coef = p.coeffs
        self.dcoef = kernels.derivative_coeffs(self.coef)
        self.tower = _derivative_tower(self.coef)
        self.n = p.degree

    # --- vertices ---------------------------------------------------------
    def build_vertices(self):
        cfg = self.cfg
        roots = find_roots(self.p, cluster_radius=cfg.cluster_radius)
        verts = []
        soft = []
        for pos, mult in roots.entries:
            verts.append(SkizzeVertex(len(verts), complex(pos), "root", mult))
        if self.n >= 2:
            crits = critical_data(self.p, cluster_radius=cfg.cluster_radius)
            near = max((cfg.cluster_radius or 1e-6 * cfg.radius), 2 * cfg.snap)
            for pos, val, mult in crits.entries:
                if any(abs(pos - v.position) <= near for v in verts if v.kind == "root"):
                    continue  # the derivative zero sitting inside a multiple root
                on_blue = abs(val.real) <= cfg.axis_tol * (1 + abs(val))
                on_red = abs(val.imag) <= cfg.axis_tol * (1 + abs(val))
                if on_blue and on_red:
                    raise ConditioningFailure(
                        f"critical value ~0 at {pos} but no nearby root", location=pos)
                if on_blue:
                    verts.append(SkizzeVertex(len(verts), complex(pos), "crit", mult, BLUE))
                elif on_red:
                    verts.append(SkizzeVertex(len(verts), complex(pos), "crit", mult, RED))
                else:
                    # off-skizze: curves bend hard nearby, clamp steps there
                    soft.append(complex(pos))
        verts.sort(key=lambda v: (v.position.real, v.position.imag))
        self.vertices = [replace(v, id=i) for i, v in enumerate(verts)]
        self.positions = np.array([v.position for v in self.vertices], dtype=np.complex128)
        self.soft = np.array(soft, dtype=np.complex128)

    def build_ports(self):
        """Local branch directions per vertex, CCW; the rotation system."""
        ports = {}
        local_c = {}
        local_k = {}
        for v in self.vertices:
            k = v.mult if v.kind == "root" else v.mult + 1
            c = complex(np.polyval(self.tower[k], v.position)) / math.factorial(k)
            if abs(c) == 0.0:
                raise ConditioningFailure(f"vanishing local coefficient at {v.position}",
                                          location=v.position)
            if v.kind == "root":
                items = [(a, RED) for a in _branch_angles(c, k, RED)]
                items += [(a, BLUE) for a in _branch_angles(c, k, BLUE)]
            else:
                items = [(a, v.color) for a in _branch_angles(c, k, v.color)]
            items.sort()
            ports[v.id] = items
            local_c[v.id] = c
            local_k[v.id] = k
        self.ports = ports
        self.build_vsnap(local_c, local_k)

    def build_vsnap(self, local_c, local_k):
        """Per-vertex capture radii.

        Near a vertex of local order k the evaluation noise floor makes the
        curve unresolvable below ~ (eps * scale / |c|)^(1/k); the capture
        radius must sit a safe factor above that."""
        eps = np.finfo(float).eps
        cluster = self.cfg.cluster_radius or 0.0
        vs = []
        for v in self.vertices:
            a = max(1.0, abs(v.position))
            mag = float(np.polyval(np.abs(self.coef), a))
            floor = (eps * mag / abs(local_c[v.id])) ** (1.0 / local_k[v.id])
            s = max(self.cfg.snap, 10.0 * floor)
            if v.mult >= 2:
                # a merged cluster must be captured at its own extent
                s = max(s, 2.0 * cluster)
            vs.append(min(s, self.cfg.radius / 50.0))
        if len(self.vertices) > 1:
            for i, v in enumerate(self.vertices):
                sep = min(abs(v.position - w.position)
                          for w in self.vertices if w.id != v.id)
                vs[i] = min(vs[i], sep / 3.0)
        self.vsnap = np.array(vs, dtype=np.float64)

    # --- boundary seeds ----------------------------------------------------
    def _level_on_circle(self, radius, theta, color):
        z = radius * np.exp(1j * theta)
        p = np.polyval(self.coef, z)
        return p.imag if color == RED else p.real

    def _seeds_at(self, radius):
        n = self.n
        m = 16 * n
        spacing = math.pi / (2 * n)
        thetas = TWO_PI * (np.arange(m + 1) + 0.27) / m
        found = []
        for color in (RED, BLUE):
            vals = self._level_on_circle(radius, thetas, color)
            hits = []
            for j in range(m):
                a, b = thetas[j], thetas[j + 1]
                fa, fb = vals[j], vals[j + 1]
                if fa == 0.0:
                    fa = 1e-300
                if fa * fb < 0:
                    for _ in range(80):
                        mid = 0.5 * (a + b)
                        fm = self._level_on_circle(radius, np.array([mid]), color)[0]
                        if fa * fm <= 0:
                            b = mid
                        else:
                            a, fa = mid, fm
                    hits.append(0.5 * (a + b) % TWO_PI)
            if len(hits) != 2 * n:
                return None
            found += [(t, color) for t in hits]
        found.sort()
        # colors must alternate around the circle
        for j in range(len(found)):
            if found[j][1] == found[(j + 1) % len(found)][1]:
                return None
        # each seed must sit close to a distinct asymptotic slot of its parity
        seeds = []
        used = set()
        for theta, color in found:
            s = int(round(theta / spacing)) % (4 * n)
            if s in used or _angle_dist(theta, s * spacing) > 0.45 * spacing:
                return None
            if (RED if s % 2 == 0 else BLUE) != color:
                return None
            used.add(s)
            seeds.append((s, theta, color))
        return tuple(sorted(seeds))

    def build_seeds(self):
        radius = self.cfg.radius
        for _ in range(self.cfg.seed_doublings + 1):
            seeds = self._seeds_at(radius)
            if seeds is not None:
                self.radius = radius
                self.seeds = seeds
                return
            radius *= 2
        raise TraceFailure(
            f"boundary seed count/alternation failed up to radius {radius / 2}")

    # --- tracing -----------------------------------------------------------
    def _trace_from(self, z0, dir0, color, origin_idx):
        cfg = self.cfg
        buf = np.empty(cfg.max_steps + 2, dtype=np.complex128)
        is_red = color == RED
        status, npts, vid, zend = kernels.trace_arc(
            self.coef, self.dcoef, is_red, complex(z0), complex(dir0),
            self.radius, self.positions, self.vsnap, self.soft, cfg.snap,
            origin_idx, cfg.h0, cfg.hmin, cfg.hmax, cfg.ctol, cfg.max_steps, buf)
        if status == kernels.STEP_COLLAPSE or status == kernels.SINGULAR_FIELD:
            raise ConditioningFailure(
                f"step collapse while tracing near {zend}", location=zend)
        if status == kernels.MAX_STEPS:
            raise TraceFailure(f"arc exceeded {cfg.max_steps} steps from {z0}")
        return status, buf[:npts].copy(), vid, zend

    def _terminal_port(self, status, pts, vid, zend, color):
        if status == kernels.HIT_VERTEX:
            v = self.vertices[vid]
            approach = pts[-2] if len(pts) >= 2 else zend
            ang = float(np.angle(approach - v.position)) % TWO_PI
            best, bestd = None, None
            for j, (a, c) in enumerate(self.ports[v.id]):
                if c != color:
                    continue
                d = _angle_dist(a, ang)
                if bestd is None or d < bestd:
                    best, bestd = j, d
            if best is None:
                raise ExtractionFailure(f"arc of color {color} hit vertex {v.id} "
                                        f"which has no {color} branch")
            return ("v", v.id, best)
        # boundary exit: nearest same-color seed
        ang = float(np.angle(zend)) % TWO_PI
        best, bestd = None, None
        for s, t, c in self.seeds:
            if c != color:
                continue
            d = _angle_dist(t, ang)
            if bestd is None or d < bestd:
                best, bestd = s, d
        return ("leaf", best)

    def run(self):
        self.build_vertices()
        self.build_ports()
        self.build_seeds()
        cfg = self.cfg
        tasks = {}
        for v in self.vertices:
            for j, (ang, color) in enumerate(self.ports[v.id]):
                r0 = 3.0 * self.vsnap[v.id]
                z0 = v.position + r0 * np.exp(1j * ang)
                z0, ok = kernels._correct(self.coef, self.dcoef, complex(z0),
                                          color == RED, cfg.ctol)
                if not ok:
                    raise ConditioningFailure(
                        f"cannot seed branch at vertex {v.id}", location=v.position)
                tasks[("v", v.id, j)] = (z0, np.exp(1j * ang), color, v.id)
        for s, theta, color in self.seeds:
            z0 = self.radius * np.exp(1j * theta)
            dp = complex(np.polyval(self.dcoef, z0))
            if abs(dp) == 0:
                raise ConditioningFailure("P' vanishes on the trace circle", location=z0)
            t = np.conj(dp) / abs(dp)
            if color == BLUE:
                t = 1j * t
            if (t * np.conj(z0 / abs(z0))).real > 0:
                t = -t
            tasks[("leaf", s)] = (z0, t, color, -1)

        links = {}
        polylines = {}
        for key, (z0, d0, color, origin) in tasks.items():
            status, pts, vid, zend = self._trace_from(z0, d0, color, origin)
            other = self._terminal_port(status, pts, vid, zend, color)
            links[key] = other
            if key[0] == "v":  # anchor the polyline at its start vertex
                pts = np.concatenate(([self.vertices[key[1]].position], pts))
            polylines[key] = pts

        for key, other in links.items():
            if other not in links or links[other] != key:
                raise ExtractionFailure(
                    f"port pairing is not an involution: {key} -> {other} -> "
                    f"{links.get(other)}")

        arcs = []
        done = set()
        for key in sorted(links):
            other = links[key]
            pair = tuple(sorted((key, other)))
            if pair in done:
                continue
            done.add(pair)
            arcs.append(Arc(color=tasks[pair[0]][2], points=polylines[pair[0]],
                            end_a=pair[0], end_b=pair[1],
                            points_reverse=polylines[pair[1]]))
        return Skizze(poly=self.p, radius=self.radius, vertices=tuple(self.vertices),
                      arcs=tuple(arcs), ports=self.ports, seeds=self.seeds)


def trace(p: Polynomial, cfg: TraceConfig | None = None) -> Skizze:
    """Trace the full skizze; retries once with a tighter step on failure."""
    cfg = cfg or TraceConfig()
    base = trace_radius(p)
    resolved = cfg.resolved(base)
    last = None
    for attempt in range(3):
        try:
            return _Tracer(p, resolved).run()
        except (ExtractionFailure, TraceFailure, ConditioningFailure, StructuralError) as exc:
            last = exc
            resolved = ResolvedConfig(
                resolved.radius, resolved.h0 / 4, resolved.hmin,
                resolved.hmax / 4, resolved.ctol / 10, resolved.snap,
                resolved.max_steps * 2, resolved.axis_tol,
                resolved.cluster_radius, resolved.seed_doublings)
    raise last


def extract_graph(s: Skizze) -> GaussGraph:
    """Combinatorial map of a traced skizze; validates before returning."""
    n = s.n
    verts = []
    for v in s.vertices:
        if v.kind == "root":
            verts.append(Vertex(v.id, "root", mult=v.mult, position=v.position))
        else:
            verts.append(Vertex(v.id, "crit", position=v.position))
    leaf_id = {}
    for slot in range(4 * n):
        vid = len(s.vertices) + slot
        leaf_id[slot] = vid
        verts.append(Vertex(vid, "leaf", slot=slot))

    end_vertex = {}
    for arc in s.arcs:
        for end in (arc.end_a, arc.end_b):
            end_vertex[end] = arc

    def port_vertex(end):
        return end[1] if end[0] == "v" else leaf_id[end[1]]

    link = {}
    for arc in s.arcs:
        link[arc.end_a] = arc.end_b
        link[arc.end_b] = arc.end_a

    rotations = {}
    colors = {}
    for v in s.vertices:
        nbrs = []
        for j, (ang, color) in enumerate(s.ports[v.id]):
            key = ("v", v.id, j)
            if key not in link:
                raise ExtractionFailure(f"unused branch {j} at vertex {v.id}")
            w = port_vertex(link[key])
            nbrs.append(w)
            colors[frozenset((v.id, w))] = color
        rotations[v.id] = nbrs
    for slot in range(4 * n):
        key = ("leaf", slot)
        if key not in link:
            raise ExtractionFailure(f"no arc reached leaf slot {slot}")
        w = port_vertex(link[key])
        rotations[leaf_id[slot]] = [w]
        colors[frozenset((leaf_id[slot], w))] = RED if slot % 2 == 0 else BLUE

    try:
        g = GaussGraph(n, verts, rotations, colors)
    except StructuralError as exc:
        raise ExtractionFailure(f"arc assembly is not a simple map: {exc}") from exc
    report = validate(g)
    if not report.ok:
        raise ExtractionFailure(f"traced graph fails validation: {report}")
    return g


def classify(p: Polynomial, cfg: TraceConfig | None = None):
    """Trace and encode: the canonical code is the stratum identifier."""
    g = extract_graph(trace(p, cfg))
    return g, canonical_code(g)


def skizze_record(s: Skizze) -> dict:
    """JSON-ready arc/vertex record for rendering and the service."""
    return {
        "n": s.n,
        "radius": s.radius,
        "vertices": [
            {"id": v.id, "kind": v.kind, "mult": v.mult,
             "position": [v.position.real, v.position.imag],
             **({"color": v.color} if v.color else {})}
            for v in s.vertices
        ],
        "arcs": [
            {"color": a.color,
             "points": [[z.real, z.imag] for z in a.points],
             "ends": [list(a.end_a), list(a.end_b)]}
            for a in s.arcs
        ],
        "seeds": [{"slot": s_, "angle": t, "color": c} for s_, t, c in s.seeds],
    }

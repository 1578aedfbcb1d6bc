"""Hot numeric loops: polynomial evaluation, simultaneous root iteration,
level-curve arc tracing and marker-front advection.

Everything here sticks to the numba-compilable subset of numpy (scalar
loops, preallocated buffers, no Python objects) so the same source runs
jitted or interpreted; :mod:`skizze.backend` decides which.
"""

import numpy as np

from .backend import jit

# trace_arc status codes
HIT_VERTEX = 0
HIT_BOUNDARY = 1
STEP_COLLAPSE = 2
MAX_STEPS = 3
SINGULAR_FIELD = 4


@jit
def horner(coef, z):
    """Evaluate a polynomial with descending complex coefficients."""
    acc = coef[0]
    for i in range(1, coef.shape[0]):
        acc = acc * z + coef[i]
    return acc


@jit
def derivative_coeffs(coef):
    n = coef.shape[0] - 1
    out = np.empty(max(n, 1), dtype=np.complex128)
    if n == 0:
        out[0] = 0.0 + 0.0j
        return out
    for i in range(n):
        out[i] = coef[i] * (n - i)
    return out


@jit
def poly_from_roots(roots):
    """Expand the monic polynomial with the given root multiset."""
    n = roots.shape[0]
    coef = np.zeros(n + 1, dtype=np.complex128)
    coef[0] = 1.0 + 0.0j
    for k in range(n):
        r = roots[k]
        for i in range(k + 1, 0, -1):
            coef[i] = coef[i] - r * coef[i - 1]
    return coef


@jit
def newton_root(coef, dcoef, z0, max_iter, tol):
    """Plain Newton iteration; returns (root, converged)."""
    z = z0
    for _ in range(max_iter):
        p = horner(coef, z)
        dp = horner(dcoef, z)
        if abs(dp) == 0.0:
            return z, False
        step = p / dp
        z = z - step
        if abs(step) <= tol * (1.0 + abs(z)):
            return z, True
    return z, False


@jit
def aberth(coef, z, max_iter, tol_step):
    """Simultaneous root iteration on a monic polynomial.

    ``z`` holds the current approximations and is updated in place.
    Returns (iterations used, converged flag).
    """
    n = z.shape[0]
    dcoef = derivative_coeffs(coef)
    scale = 0.0
    for i in range(n):
        if abs(z[i]) > scale:
            scale = abs(z[i])
    if scale == 0.0:
        scale = 1.0
    for it in range(max_iter):
        max_step = 0.0
        for k in range(n):
            zk = z[k]
            p = horner(coef, zk)
            dp = horner(dcoef, zk)
            if abs(dp) == 0.0:
                # sitting on a critical point: nudge off deterministically
                z[k] = zk + (1e-6 + 1e-6j) * (1.0 + abs(zk))
                max_step = 1.0
                continue
            w = p / dp
            s = 0.0 + 0.0j
            for j in range(n):
                if j != k:
                    d = zk - z[j]
                    if abs(d) > 0.0:
                        s = s + 1.0 / d
            denom = 1.0 - w * s
            if abs(denom) < 1e-30:
                step = w
            else:
                step = w / denom
            z[k] = zk - step
            if abs(step) > max_step:
                max_step = abs(step)
        if max_step < tol_step * scale:
            return it + 1, True
    return max_iter, False


@jit
def _tangent(dcoef, z, is_red, dprev):
    """Unit tangent of the level curve at z, aligned with dprev.

    Along Im P = 0 the tangent is conj(P')/|P'|; along Re P = 0 it is
    i*conj(P')/|P'| (Cauchy-Riemann).  Returns (tangent, |P'|).
    """
    dp = horner(dcoef, z)
    m = abs(dp)
    if m == 0.0:
        return 0.0 + 0.0j, 0.0
    t = dp.conjugate() / m
    if not is_red:
        t = t * 1j
    if t.real * dprev.real + t.imag * dprev.imag < 0.0:
        t = -t
    return t, m


@jit
def _level(coef, z, is_red):
    p = horner(coef, z)
    if is_red:
        return p.imag
    return p.real


@jit
def _mag_bound(coef, z):
    """Magnitude scale of the evaluation: sum |c_i| |z|^(n-i).

    Rounding noise in Horner evaluation is a few eps times this, which is
    the accuracy floor near multiple roots."""
    a = abs(z)
    if a < 1.0:
        a = 1.0
    acc = abs(coef[0])
    for i in range(1, coef.shape[0]):
        acc = acc * a + abs(coef[i])
    return acc


@jit
def _correct(coef, dcoef, z, is_red, ctol):
    """Newton projection back onto the level set along the normal.

    Returns (z_corrected, ok).  ``ctol`` is a distance-like tolerance:
    iteration stops once |f|/|P'| drops below it or |f| reaches the
    floating-point noise floor of the evaluation.
    """
    for _ in range(6):
        p = horner(coef, z)
        dp = horner(dcoef, z)
        m2 = dp.real * dp.real + dp.imag * dp.imag
        if m2 == 0.0:
            return z, False
        if is_red:
            f = p.imag
            grad = dp.conjugate() * 1j
        else:
            f = p.real
            grad = dp.conjugate()
        noise = 1.4e-15 * _mag_bound(coef, z)
        if abs(f) <= ctol * np.sqrt(m2) + noise:
            return z, True
        z = z - f * grad / m2
    p = horner(coef, z)
    dp = horner(dcoef, z)
    if is_red:
        f = p.imag
    else:
        f = p.real
    ok = abs(f) <= ctol * max(abs(dp), 1e-300) + 1.4e-15 * _mag_bound(coef, z)
    return z, ok


@jit
def _seg_point_dist(a, b, p):
    """Distance from point p to segment [a, b]."""
    ab = b - a
    denom = ab.real * ab.real + ab.imag * ab.imag
    if denom == 0.0:
        return abs(p - a)
    ap = p - a
    t = (ap.real * ab.real + ap.imag * ab.imag) / denom
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    return abs(a + t * ab - p)


@jit
def trace_arc(coef, dcoef, is_red, z0, dir0, radius, vertices, vsnap, soft,
              snap, origin_idx, h0, hmin, hmax, ctol, max_steps, out_pts):
    """Predictor-corrector continuation of one level-curve arc.

    Starts at ``z0`` heading along unit ``dir0`` and runs until the arc
    snaps to a registered vertex, exits the trace circle, or fails.
    ``vsnap`` holds per-vertex capture radii (multiple roots need wider
    capture: evaluation noise grows like eps^(1/k) around them), ``snap``
    is the global floor.  ``soft`` holds off-skizze critical points: the
    level curves bend hard near them, so they clamp the step size without
    ever capturing the arc.  ``origin_idx`` suppresses immediate
    re-capture by the start vertex (-1 when starting from the boundary).
    Corrected samples land in ``out_pts``.

    Returns (status, npts, end_vertex_index, z_end).
    """
    nv = vertices.shape[0]
    z = z0
    d = dir0
    h = h0
    cos_turn = 0.94  # ~20 degrees per step
    out_pts[0] = z
    npts = 1
    escape_r = 6.0 * snap
    if origin_idx >= 0:
        escape_r = 6.0 * vsnap[origin_idx]
    escaped = abs(z0) >= radius * 0.999  # boundary starts count as escaped from vertices
    start_from_boundary = escaped
    travelled = 0.0

    while npts < max_steps:
        # distance to nearest vertex / soft obstacle for step clamping
        dv = 1e300
        near_snap = snap
        for i in range(nv):
            if (not escaped) and i == origin_idx:
                continue
            dist = abs(z - vertices[i])
            if dist < dv:
                dv = dist
                near_snap = vsnap[i]
        for i in range(soft.shape[0]):
            dist = abs(z - soft[i])
            if dist < dv:
                dv = dist
                near_snap = snap
        cap = dv / 2.5
        if cap < near_snap * 0.5:
            cap = near_snap * 0.5
        hstep = h
        if hstep > cap:
            hstep = cap
        if hstep > hmax:
            hstep = hmax

        accepted = False
        znew = z
        for _ in range(40):
            if hstep < hmin:
                return STEP_COLLAPSE, npts, -1, z
            k1, m1 = _tangent(dcoef, z, is_red, d)
            if m1 == 0.0:
                return SINGULAR_FIELD, npts, -1, z
            k2, m2 = _tangent(dcoef, z + 0.5 * hstep * k1, is_red, k1)
            k3, m3 = _tangent(dcoef, z + 0.5 * hstep * k2, is_red, k2)
            k4, m4 = _tangent(dcoef, z + hstep * k3, is_red, k3)
            if m2 == 0.0 or m3 == 0.0 or m4 == 0.0:
                hstep = hstep * 0.5
                continue
            zp = z + (hstep / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            zc, ok = _correct(coef, dcoef, zp, is_red, ctol)
            if not ok:
                hstep = hstep * 0.5
                continue
            move = zc - z
            mlen = abs(move)
            if mlen == 0.0:
                hstep = hstep * 0.5
                continue
            dnew = move / mlen
            if dnew.real * d.real + dnew.imag * d.imag < cos_turn:
                hstep = hstep * 0.5
                continue
            # corrector displacement must stay a fraction of the step
            if abs(zc - zp) > 0.3 * mlen + snap:
                hstep = hstep * 0.5
                continue
            znew = zc
            d = dnew
            accepted = True
            break
        if not accepted:
            return STEP_COLLAPSE, npts, -1, z

        travelled += abs(znew - z)
        if not escaped:
            if abs(znew - z0) > escape_r:
                escaped = True

        # vertex capture: nearest vertex within its own snap radius
        best = -1
        bestr = 1e300
        for i in range(nv):
            if (not escaped) and i == origin_idx:
                continue
            dist = _seg_point_dist(z, znew, vertices[i])
            ratio = dist / vsnap[i]
            if ratio < bestr:
                bestr = ratio
                best = i
        if best >= 0 and bestr <= 1.0:
            out_pts[npts] = vertices[best]
            npts += 1
            return HIT_VERTEX, npts, best, vertices[best]

        # boundary exit
        if abs(znew) >= radius and (travelled > 3.0 * h0 or not start_from_boundary):
            a = z
            b = znew
            ab = b - a
            qa = ab.real * ab.real + ab.imag * ab.imag
            qb = 2.0 * (a.real * ab.real + a.imag * ab.imag)
            qc = a.real * a.real + a.imag * a.imag - radius * radius
            disc = qb * qb - 4.0 * qa * qc
            tcross = 1.0
            if disc >= 0.0 and qa > 0.0:
                root = (-qb + np.sqrt(disc)) / (2.0 * qa)
                if 0.0 <= root <= 1.0:
                    tcross = root
            zb = a + tcross * ab
            out_pts[npts] = zb
            npts += 1
            return HIT_BOUNDARY, npts, -1, zb

        z = znew
        out_pts[npts] = z
        npts += 1
        h = hstep * 1.5
        if h > hmax:
            h = hmax

    return MAX_STEPS, npts, -1, z


@jit
def _path_eval_coeff(c0, c1, z, t):
    """P, P' and dP/dt for a coefficient-linear path at (z, t)."""
    n = c0.shape[0]
    p = (1.0 - t) * c0[0] + t * c1[0]
    pt = c1[0] - c0[0]
    dp = 0.0 + 0.0j
    for i in range(1, n):
        dp = dp * z + p
        p = p * z + (1.0 - t) * c0[i] + t * c1[i]
        pt = pt * z + c1[i] - c0[i]
    return p, dp, pt


@jit
def _path_eval_roots(r0, r1, z, t):
    """P, P' and dP/dt for a root-linear path at (z, t)."""
    n = r0.shape[0]
    p = 1.0 + 0.0j
    dp = 0.0 + 0.0j
    pt = 0.0 + 0.0j
    for i in range(n):
        ri = (1.0 - t) * r0[i] + t * r1[i]
        q = 1.0 + 0.0j
        for j in range(n):
            if j != i:
                rj = (1.0 - t) * r0[j] + t * r1[j]
                q = q * (z - rj)
        dp = dp + q
        pt = pt - (r1[i] - r0[i]) * q
        p = p * (z - ri)
    return p, dp, pt


@jit
def advect_markers(use_roots, c0, c1, r0, r1, is_red, markers, t_start, t_end,
                   nsteps, grad_floor):
    """March markers of one colored front through the time window.

    dX/dt = -f_t * grad f / |grad f|^2 with a Newton re-projection onto the
    current level set after every RK4 step.  Returns (status, bad_marker,
    bad_t); status 0 = ok, 4 = gradient below ``grad_floor`` (wall ahead).
    """
    nm = markers.shape[0]
    dt = (t_end - t_start) / nsteps
    for m in range(nm):
        z = markers[m]
        for k in range(nsteps):
            t = t_start + k * dt
            ok = True
            # RK4 stages
            zs = z
            ts = t
            v1 = 0.0 + 0.0j
            v2 = 0.0 + 0.0j
            v3 = 0.0 + 0.0j
            v4 = 0.0 + 0.0j
            for stage in range(4):
                if stage == 0:
                    zs = z
                    ts = t
                elif stage == 1:
                    zs = z + 0.5 * dt * v1
                    ts = t + 0.5 * dt
                elif stage == 2:
                    zs = z + 0.5 * dt * v2
                    ts = t + 0.5 * dt
                else:
                    zs = z + dt * v3
                    ts = t + dt
                if use_roots:
                    _, dp, pt = _path_eval_roots(r0, r1, zs, ts)
                else:
                    _, dp, pt = _path_eval_coeff(c0, c1, zs, ts)
                m2 = dp.real * dp.real + dp.imag * dp.imag
                if np.sqrt(m2) < grad_floor:
                    markers[m] = z
                    return SINGULAR_FIELD, m, t
                if is_red:
                    ft = pt.imag
                    grad = dp.conjugate() * 1j
                else:
                    ft = pt.real
                    grad = dp.conjugate()
                v = -ft * grad / m2
                if stage == 0:
                    v1 = v
                elif stage == 1:
                    v2 = v
                elif stage == 2:
                    v3 = v
                else:
                    v4 = v
            z = z + (dt / 6.0) * (v1 + 2.0 * v2 + 2.0 * v3 + v4)
            # re-project onto the level set at t + dt
            tn = t + dt
            for _ in range(4):
                if use_roots:
                    p, dp, pt = _path_eval_roots(r0, r1, z, tn)
                else:
                    p, dp, pt = _path_eval_coeff(c0, c1, z, tn)
                m2 = dp.real * dp.real + dp.imag * dp.imag
                if np.sqrt(m2) < grad_floor:
                    markers[m] = z
                    return SINGULAR_FIELD, m, tn
                if is_red:
                    f = p.imag
                    grad = dp.conjugate() * 1j
                else:
                    f = p.real
                    grad = dp.conjugate()
                if abs(f) <= 1e-14 * (1.0 + np.sqrt(m2)):
                    break
                z = z - f * grad / m2
            if not ok:
                break
        markers[m] = z
    return 0, -1, t_end

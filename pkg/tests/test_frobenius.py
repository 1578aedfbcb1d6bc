from functools import reduce

import numpy as np
import pytest

from skizze.errors import DegenerateLocus, DegenerateMetric, InvalidInput
from skizze.frobenius import (
    CellProfile,
    canonical_coords,
    cell_dimension,
    coeffs_from_crit,
    crit_value_jacobian,
    flat_metric,
)
from skizze.poly import Polynomial, critical_data, parse_poly


def integrate_product_oracle(rho, constant):
    """Expected coefficients by expanding (n+1)*prod(z-rho_i) with convolve
    and integrating term by term."""
    n = len(rho)
    q = reduce(np.convolve, [np.array([1.0 + 0j, -r]) for r in rho])
    q = (n + 1) * q  # descending, degree n
    out = np.zeros(n + 2, dtype=complex)
    for k in range(n + 1):  # q[k] multiplies z^(n-k)
        power = n - k
        out[k] = q[k] / (power + 1)  # becomes coefficient of z^(power+1)
    out[n + 1] = constant
    return out


def zero_sum_rho(rng, n, spread=1.2):
    rho = spread * (rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n))
    return rho - np.mean(rho)


def test_coeffs_from_crit_cubic():
    p = coeffs_from_crit([1, -1], 0)
    assert np.allclose(p.coeffs, [1, 0, -3, 0])


def test_coeffs_from_crit_all_zero():
    p = coeffs_from_crit([0, 0, 0], 2 + 1j)
    assert np.allclose(p.coeffs, [1, 0, 0, 0, 2 + 1j])


def test_coeffs_from_crit_rejects_nonzero_sum():
    with pytest.raises(InvalidInput):
        coeffs_from_crit([1, 1], 0)


def test_coeffs_from_crit_integration_oracle(rng):
    for n in (2, 3, 5, 8):
        for _ in range(4):
            rho = zero_sum_rho(rng, n)
            c = complex(rng.normal(), rng.normal())
            p = coeffs_from_crit(rho, c)
            expect = integrate_product_oracle(rho, c)
            scale = np.max(np.abs(expect)) + 1.0
            assert np.max(np.abs(p.coeffs - expect)) < 1e-10 * scale


def test_derivative_matches_product(rng):
    rho = zero_sum_rho(rng, 4)
    p = coeffs_from_crit(rho, 0.3j)
    q = reduce(np.convolve, [np.array([1.0 + 0j, -r]) for r in rho]) * 5
    assert np.max(np.abs(p.derivative_coeffs() - q)) < 1e-12 * (1 + np.max(np.abs(q)))


def test_canonical_coords_cubic():
    coords = canonical_coords(parse_poly("1:0,0:0,-3:0,0:0"))
    assert np.allclose(coords.rho, [-1, 1])
    assert np.allclose(coords.u, [2, -2])


def test_canonical_coords_degenerate():
    with pytest.raises(DegenerateLocus):
        canonical_coords(Polynomial([1, 0, 0, 0]))


def test_canonical_coords_imaginary_pair():
    p = parse_poly("1:0,0:0,3:0,0:0")  # z^3 + 3z
    coords = canonical_coords(p)
    assert np.allclose(coords.rho, [-1j, 1j])
    for r, u in zip(coords.rho, coords.u):
        assert abs(p(r) - u) < 1e-12


def test_canonical_coords_requires_zero_sum_chart():
    with pytest.raises(InvalidInput):
        canonical_coords(Polynomial([1, 1, 0, 0.5]))


def test_flat_metric_cubic():
    md = flat_metric(parse_poly("1:0,0:0,-3:0,0:0"))
    assert np.allclose(md.g, [-1 / 6, 1 / 6])
    assert abs(md.eta - (-1)) < 1e-14


def test_flat_metric_degenerate():
    with pytest.raises(DegenerateMetric):
        flat_metric(Polynomial([1, 0, 0, 0, 2]))


def fd_eta_gradient(p, delta_scale=None):
    """Finite-difference d(eta)/d(u^i) via the coefficient chart.

    Central differences in each a_j with critical points re-solved by
    Newton continuation from the base ordering, then J^T x = grad_a eta.
    """
    from skizze import kernels

    base = canonical_coords(p)
    n = len(base.rho)
    n1 = p.degree
    jac = np.empty((n, n), dtype=complex)
    for j in range(n):
        cidx = j + 2  # coefficient of z^(n-1-j)
        delta = np.sqrt(np.finfo(float).eps) * (1.0 + abs(p.coeffs[cidx]))
        u_side = []
        for sign in (+1, -1):
            c = p.coeffs.copy()
            c[cidx] = c[cidx] + sign * delta
            pp = Polynomial(c)
            dc = pp.derivative_coeffs()
            ddc = kernels.derivative_coeffs(dc)
            us = []
            for r in base.rho:
                rr, ok = kernels.newton_root(dc, ddc, complex(r), 50, 1e-14)
                assert ok
                us.append(complex(pp(rr)))
            u_side.append(us)
        jac[:, j] = (np.array(u_side[0]) - np.array(u_side[1])) / (2 * delta)
    grad_a = np.zeros(n, dtype=complex)
    grad_a[0] = 1.0 / n1
    return np.linalg.solve(jac.T, grad_a)


def test_potentiality_finite_difference(rng):
    for n in (2, 3, 4):
        for _ in range(3):
            rho = zero_sum_rho(rng, n)
            p = coeffs_from_crit(rho, complex(rng.normal(), rng.normal()))
            md = flat_metric(p)
            fd = fd_eta_gradient(p)
            rel = np.abs(fd - np.array(md.g)) / np.abs(np.array(md.g))
            assert np.max(rel) < 1e-5


def test_analytic_jacobian_matches_fd(rng):
    rho = zero_sum_rho(rng, 3)
    p = coeffs_from_crit(rho, 0.1)
    jac = crit_value_jacobian(p)
    base = canonical_coords(p)
    for i, r in enumerate(base.rho):
        assert np.allclose(jac[i], [r ** 2, r, 1])


def test_inverse_pair(rng):
    for n in (2, 4, 8):
        rho = zero_sum_rho(rng, n)
        p = coeffs_from_crit(rho, 1.5 - 0.5j)
        cd = critical_data(p)
        got = np.array(sorted(cd.points, key=lambda z: (z.real, z.imag)))
        expect = np.array(sorted(rho, key=lambda z: (z.real, z.imag)))
        assert np.max(np.abs(got - expect)) < 1e-7
        assert abs(p.coeffs[-1] - (1.5 - 0.5j)) < 1e-14


def test_cell_dimension_examples():
    n = 6
    assert cell_dimension(CellProfile(m=(n - 1,), j=(n - 1,))) == n
    assert cell_dimension(CellProfile(m=(1, 1), j=(1, 1))) == 4
    assert cell_dimension(CellProfile(m=(3,), j=(1,))) == 2


def test_cell_profile_validation():
    with pytest.raises(InvalidInput):
        CellProfile(m=(2,), j=(3,))
    with pytest.raises(InvalidInput):
        CellProfile(m=(), j=())
    with pytest.raises(InvalidInput):
        CellProfile(m=(2, 2), j=(1,))

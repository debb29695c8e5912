import numpy as np
import pytest

from lemlab.geometry import mobius
from lemlab.maps import (ZETA, AnalyticDiskMap, Blaschke, Const, boundary_sup, circle_grid,
                         verify_map)


def test_expression_arithmetic():
    e = ZETA * Blaschke(0.3) + 2 - Const(1j) * ZETA
    z = 0.2 + 0.1j
    assert e(z) == pytest.approx(z * mobius(0.3, z) + 2 - 1j * z)
    assert (-e)(z) == pytest.approx(-e(z))
    assert (1 - e)(z) == pytest.approx(1 - e(z))


def test_vectorized_evaluation():
    e = Const(3.0) + ZETA
    out = e(np.array([0.1, 0.2]))
    assert out.shape == (2,) and out[1] == pytest.approx(3.2)


def test_scaling_substitution():
    m = AnalyticDiskMap(ZETA * ZETA, Blaschke(0.5))
    s = m.precomposed_with_scaling(0.5)
    assert s(0.4)[0] == pytest.approx(0.04)
    assert s(0.4)[1] == pytest.approx(mobius(0.5, 0.2))


def test_verify_and_sup():
    m = AnalyticDiskMap(ZETA * Blaschke(0.2), 0.5 * ZETA)
    chk = verify_map(m, [(0j, (0j, 0j)), (0.2, (0j, 0.1))])
    assert chk.residual < 1e-15
    assert chk.boundary_sup == pytest.approx(1.0)
    assert chk.ok()
    wobble = AnalyticDiskMap(0.5 * ZETA + 0.5 * ZETA * ZETA * ZETA * Const(np.exp(0.123j)), 0 * ZETA)
    assert boundary_sup(wobble, 256) >= verify_map(wobble, [], 256).boundary_sup
    with pytest.raises(ValueError):
        verify_map(m, [], 128)


def test_holomorphy_flag():
    assert AnalyticDiskMap(Blaschke(0.2), ZETA).holomorphic
    assert not AnalyticDiskMap(Blaschke(1.2), ZETA).holomorphic


def test_circle_grid():
    g = circle_grid(8)
    assert np.allclose(np.abs(g), 1) and g[2] == pytest.approx(1j)

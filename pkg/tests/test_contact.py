import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sea_delta.contact import SCALE_RESOLUTION_N, ElasticPlane, contact_force, penetration, scale_reading


def test_defaults():
    plane = ElasticPlane()
    assert (plane.z_s, plane.k_c, plane.mu, plane.v_eps) == (-101.0, 2.0, 0.3, 0.5)


@pytest.mark.parametrize("kw", [dict(k_c=0.0), dict(mu=-0.1), dict(v_eps=0.0), dict(resolution=-1.0)])
def test_invalid(kw):
    with pytest.raises(ValueError):
        ElasticPlane(**kw)


def test_no_contact_above_surface():
    assert contact_force(ElasticPlane(), (0.0, 0.0, -100.0), (10.0, 0.0)) == (0.0, 0.0, 0.0)
    assert contact_force(ElasticPlane(), (0.0, 0.0, -101.0)) == (0.0, 0.0, 0.0)


def test_four_mm_press():
    f = contact_force(ElasticPlane(k_c=1.25), (0.0, 0.0, -105.0))
    assert f == pytest.approx((0.0, 0.0, 5.0), abs=1e-12)
    assert penetration(ElasticPlane(), (0.0, 0.0, -105.0)) == 4.0


def test_friction_opposes_motion():
    f = contact_force(ElasticPlane(), (0.0, 0.0, -103.0), (0.0, 10.0))
    assert f.x == 0.0 and f.y < 0.0
    # regularised Coulomb: close to mu * normal once speed >> v_eps
    assert -f.y == pytest.approx(0.3 * f.z, rel=0.05)


def test_scale_quantisation():
    assert SCALE_RESOLUTION_N == pytest.approx(0.04903325)
    plane = ElasticPlane(resolution=SCALE_RESOLUTION_N)
    assert scale_reading(plane, 5.0) == pytest.approx(102 * SCALE_RESOLUTION_N)
    assert scale_reading(ElasticPlane(), 5.0) == 5.0


@given(st.floats(-120.0, -80.0), st.floats(-50.0, 50.0), st.floats(-50.0, 50.0))
def test_friction_bounded_and_antiparallel(z, vx, vy):
    plane = ElasticPlane()
    f = contact_force(plane, (0.0, 0.0, z), (vx, vy))
    tangential = math.hypot(f.x, f.y)
    assert tangential <= plane.mu * f.z + 1e-12
    if f.z > 0 and math.hypot(vx, vy) > 1e-6:
        assert f.x * vx + f.y * vy < 0
        cross = f.x * vy - f.y * vx
        assert abs(cross) <= 1e-9 * (1 + tangential * math.hypot(vx, vy))


@given(st.floats(0.0, 20.0), st.floats(0.0, 20.0))
def test_normal_force_piecewise_linear(d1, d2):
    plane = ElasticPlane()
    f1 = contact_force(plane, (0.0, 0.0, plane.z_s - d1)).z
    f2 = contact_force(plane, (0.0, 0.0, plane.z_s - d2)).z
    assert f1 - f2 == pytest.approx(plane.k_c * (d1 - d2), abs=1e-9)


def test_normal_force_continuous_at_surface():
    plane = ElasticPlane()
    assert contact_force(plane, (0.0, 0.0, plane.z_s - 1e-12)).z < 1e-11

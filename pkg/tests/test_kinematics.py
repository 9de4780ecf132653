import math

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import positions, rotate_z, sample_reachable
from sea_delta.errors import NoIntersection, SingularConfiguration, Unreachable
from sea_delta.kinematics import (JointAngles, RobotGeometry, chain_coefficients, fpk, ipk,
                                  ipk_candidates, is_reachable, loop_residual, select_branch,
                                  virtual_sphere_centers, wrap_angle)

# Reference values from a standalone script that evaluates the closed loop
# |A_i P_i|^2 - l_b^2 directly, scans theta over (-pi, pi] in 1e-4 rad steps
# and bisects every sign change.
THETA_AT_150 = 0.5530731907916668
OTHER_ROOT_AT_150 = -3.0511647355881752
EFG_AT_150 = (8000.0, -24000.0, 5800.0)
CENTRES_AT_03 = (
    (0.0, -126.42691913004847, -23.641616532907165),
    (109.4889236888228, 63.213459565024216, -23.641616532907165),
    (-109.48892368882278, 63.21345956502428, -23.641616532907165),
)
PERTURBED_RESIDUAL = -2429.3599636018516


def independent_residual(geom, chain, theta, p):
    phi = -math.pi / 2 + 2 * math.pi * (chain - 1) / 3
    u = (math.cos(phi), math.sin(phi))
    r = geom.a + geom.l_a * math.cos(theta)
    A = (r * u[0], r * u[1], -geom.l_a * math.sin(theta))
    P = (p[0] + geom.b * u[0], p[1] + geom.b * u[1], p[2])
    return sum((P[k] - A[k]) ** 2 for k in range(3)) - geom.l_b ** 2


def test_geometry_defaults_and_validation():
    g = RobotGeometry()
    assert (g.a, g.b, g.l_a, g.l_b) == (100.0, 50.0, 80.0, 160.0)
    with pytest.raises(ValueError):
        RobotGeometry(a=-1.0)
    with pytest.raises(ValueError):
        RobotGeometry(a=40.0, b=50.0)


def test_coefficients_match_residual_scan(geom):
    p = (0.0, 0.0, -150.0)
    for chain in (1, 2, 3):
        coef = chain_coefficients(geom, p, chain)
        assert coef == pytest.approx(EFG_AT_150, rel=1e-12, abs=1e-9)
        worst = 0.0
        steps = 62832
        for k in range(steps):
            t = -math.pi + 2 * math.pi * (k + 1) / steps
            lhs = coef.E * math.cos(t) + coef.F * math.sin(t) + coef.G
            worst = max(worst, abs(lhs - independent_residual(geom, chain, t, p)))
        assert worst < 1e-8


def test_coefficients_symmetric_on_axis(geom):
    c = [chain_coefficients(geom, (0.0, 0.0, -120.0), i) for i in (1, 2, 3)]
    for other in c[1:]:
        assert other == pytest.approx(c[0], abs=1e-12)


def test_ipk_matches_bisection_oracle(geom):
    theta = ipk(geom, (0.0, 0.0, -150.0))
    assert theta == pytest.approx((THETA_AT_150,) * 3, abs=1e-12)
    for pair in ipk_candidates(geom, (0.0, 0.0, -150.0)):
        assert sorted(pair) == pytest.approx(sorted((THETA_AT_150, OTHER_ROOT_AT_150)), abs=1e-12)


def test_ipk_on_axis_is_symmetric(geom):
    t = ipk(geom, (0.0, 0.0, -105.0))
    assert t.theta1 == pytest.approx(t.theta2, abs=1e-14)
    assert t.theta1 == pytest.approx(t.theta3, abs=1e-14)


def test_ipk_beyond_reach_raises(geom):
    with pytest.raises(Unreachable) as exc:
        ipk(geom, (0.0, 0.0, -400.0))
    assert exc.value.chain in (1, 2, 3)


def test_virtual_sphere_centres(geom):
    c0 = virtual_sphere_centers(geom, (0.0, 0.0, 0.0))
    assert c0[0] == pytest.approx((0.0, -geom.a - geom.l_a + geom.b, 0.0), abs=1e-12)
    c = virtual_sphere_centers(geom, (0.3, 0.3, 0.3))
    for got, want in zip(c, CENTRES_AT_03):
        assert got == pytest.approx(want, abs=1e-12)
    # equal angles: centres are 2pi/3 turns of each other
    assert rotate_z(c[0], 2 * math.pi / 3) == pytest.approx(c[1], abs=1e-12)
    assert rotate_z(c[0], -2 * math.pi / 3) == pytest.approx(c[2], abs=1e-12)


def test_fpk_recovers_pose(geom):
    p = fpk(geom, ipk(geom, (10.0, -5.0, -140.0)))
    assert p == pytest.approx((10.0, -5.0, -140.0), abs=1e-9)


def test_fpk_equal_angles_on_axis(geom):
    p = fpk(geom, (0.4, 0.4, 0.4))
    assert abs(p.x) < 1e-12 and abs(p.y) < 1e-12
    assert p.z < 0


def test_fpk_no_intersection():
    # centres 225 mm apart, spheres only 60 mm in radius
    short = RobotGeometry(l_b=60.0)
    with pytest.raises(NoIntersection):
        fpk(short, (0.0, 0.0, 0.0))


def test_loop_residual_perturbation(geom):
    p = (0.0, 0.0, -150.0)
    t = ipk(geom, p)
    r = loop_residual(geom, (t[0] + 0.1, t[1], t[2]), p)
    assert r[0] == pytest.approx(PERTURBED_RESIDUAL, rel=1e-12)
    assert abs(r[1]) < 1e-9 and abs(r[2]) < 1e-9
    assert r[0] == pytest.approx(independent_residual(geom, 1, t[0] + 0.1, p), rel=1e-12)


def test_branch_selection_prefers_outward_then_previous():
    assert select_branch((0.2, 2.9)) == 0.2
    assert select_branch((0.2, -0.3), prev=-0.25) == -0.3
    assert select_branch((0.2, -0.3)) == 0.2
    assert select_branch((2.0, -2.5)) == 2.0


def test_wrap_angle():
    assert wrap_angle(3 * math.pi) == pytest.approx(math.pi)
    assert wrap_angle(-math.pi) == pytest.approx(math.pi)
    assert wrap_angle(0.5) == 0.5


@given(positions())
def test_round_trip_property(p):
    geom = RobotGeometry()
    assume(is_reachable(geom, p))
    theta = ipk(geom, p)
    back = fpk(geom, theta)
    assert max(abs(a - b) for a, b in zip(back, p)) < 1e-9
    assert max(map(abs, loop_residual(geom, theta, back))) < 1e-9


@given(positions())
def test_both_roots_close_the_loop(p):
    geom = RobotGeometry()
    assume(is_reachable(geom, p))
    for chain, pair in enumerate(ipk_candidates(geom, p), start=1):
        for root in pair:
            t = [0.0, 0.0, 0.0]
            t[chain - 1] = root
            assert abs(loop_residual(geom, t, p)[chain - 1]) < 1e-9


@given(positions())
def test_rotation_permutes_chains(p):
    geom = RobotGeometry()
    assume(is_reachable(geom, p))
    q = rotate_z(p, 2 * math.pi / 3)
    assume(is_reachable(geom, q))
    t = ipk(geom, p)
    s = ipk(geom, q)
    # chain i at p plays the role of chain i+1 at the rotated pose
    assert (s.theta2, s.theta3, s.theta1) == pytest.approx(tuple(t), abs=1e-12)


@given(st.tuples(st.floats(-1.2, 1.2), st.floats(-1.2, 1.2), st.floats(-1.2, 1.2)))
def test_fpk_satisfies_sphere_equations(theta):
    geom = RobotGeometry()
    try:
        p = fpk(geom, theta)
    except (NoIntersection, SingularConfiguration):
        return
    assert max(map(abs, loop_residual(geom, theta, p))) < 1e-9


def test_sampled_workspace_round_trip():
    geom = RobotGeometry()
    for p in sample_reachable(300, seed=7):
        back = fpk(geom, ipk(geom, p))
        assert max(abs(a - b) for a, b in zip(back, p)) < 1e-9


def test_joint_angles_type():
    t = JointAngles(0.1, 0.2, 0.3)
    assert t.theta3 == 0.3 and len(t) == 3

import math
import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from sea_delta.kinematics import RobotGeometry, is_reachable

settings.register_profile("default", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.filter_too_much])
settings.load_profile("default")

BOX = dict(x=(-80.0, 80.0), y=(-80.0, 80.0), z=(-230.0, -40.0))


@pytest.fixture
def geom():
    return RobotGeometry()


def sample_reachable(n, seed=0, geom=None):
    """Uniform rejection samples from the reachable part of a bounding box."""
    geom = geom or RobotGeometry()
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        p = tuple(rng.uniform(*BOX[k]) for k in "xyz")
        if is_reachable(geom, p):
            out.append(p)
    return out


def positions():
    return st.tuples(st.floats(*BOX["x"]), st.floats(*BOX["y"]), st.floats(*BOX["z"]))


def rotate_z(p, angle):
    c, s = math.cos(angle), math.sin(angle)
    return (c * p[0] - s * p[1], s * p[0] + c * p[1], p[2])


# acceptance criterion -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if report.when != "call" or "test_acceptance.py" not in report.nodeid or not name.startswith("test_a"):
        return
    crit = name.split("_")[1].upper()
    if report.failed:
        prev = ACCEPTANCE.get(crit, (False, ""))[1]
        msg = str(report.longrepr.reprcrash.message) if hasattr(report.longrepr, "reprcrash") else "error"
        ACCEPTANCE[crit] = (False, prev or msg.splitlines()[0])


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE, key=lambda c: int(c[1:])):
        ok, detail = ACCEPTANCE[crit]
        terminalreporter.write_line(f"{crit} {'PASS' if ok else 'FAIL'}  {detail}")

"""Scalar 3-vector helpers.

The simulator evaluates kinematics tens of thousands of times per scenario,
so the hot paths work on plain float tuples instead of small numpy arrays.
"""

import math


def add(u, v):
    return (u[0] + v[0], u[1] + v[1], u[2] + v[2])


def sub(u, v):
    return (u[0] - v[0], u[1] - v[1], u[2] - v[2])


def scale(s, u):
    return (s * u[0], s * u[1], s * u[2])


def dot(u, v):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def cross(u, v):
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def norm(u):
    return math.sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2])


def matvec(m, v):
    return tuple(r[0] * v[0] + r[1] * v[1] + r[2] * v[2] for r in m)


def rot_z(angle):
    c, s = math.cos(angle), math.sin(angle)
    return ((c, -s, 0.0), (s, c, 0.0), (0.0, 0.0, 1.0))


def transpose(m):
    return tuple(zip(*m))


def det3(cols):
    """Determinant of the matrix whose columns are ``cols``."""
    return dot(cols[0], cross(cols[1], cols[2]))


def solve_columns(cols, rhs):
    """Solve ``sum_j x_j * cols[j] = rhs`` by Cramer's rule.

    Returns ``(x, det)``; the caller decides what counts as singular.
    """
    c0, c1, c2 = cols
    d = det3(cols)
    if d == 0.0:
        return None, d
    x0 = dot(rhs, cross(c1, c2)) / d
    x1 = dot(c0, cross(rhs, c2)) / d
    x2 = dot(c0, cross(c1, rhs)) / d
    return (x0, x1, x2), d

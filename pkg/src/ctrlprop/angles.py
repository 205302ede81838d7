"""Angles in radians, kept in the canonical range [0, 2*pi)."""

import math

TWO_PI = 2.0 * math.pi
EPS_ANGLE = 1e-12


def normalize_angle(x):
    x = float(x) % TWO_PI
    # a tiny negative input rounds up to exactly 2*pi
    if x >= TWO_PI:
        x = 0.0
    return x


def angle_distance(a, b):
    """Circular distance between two angles."""
    d = (float(a) - float(b)) % TWO_PI
    return min(d, TWO_PI - d)


def angle_close(a, b, eps=EPS_ANGLE):
    return angle_distance(a, b) <= eps


def is_zero(a, eps=EPS_ANGLE):
    return angle_close(a, 0.0, eps)


def is_pi(a, eps=EPS_ANGLE):
    return angle_close(a, math.pi, eps)


def _pi_fraction(x, max_den=64):
    """Return (k, m) with k*pi/m reproducing ``x`` bit-for-bit, or None."""
    for m in range(1, max_den + 1):
        k = round(x * m / math.pi)
        if abs(k * math.pi / m - x) > EPS_ANGLE:
            continue
        if pi_multiple(k, m) == x:
            return k, m
    return None


def pi_multiple(k, m):
    return normalize_angle(k * math.pi / m)


def format_angle(x):
    """Render an angle for the text grammar.

    Exact multiples of pi are printed symbolically (``3*pi/4``); everything
    else uses 17 significant digits so that parsing restores the same float.
    """
    x = float(x)
    if x == 0.0:
        return "0"
    frac = _pi_fraction(x)
    if frac is None:
        return repr(x)
    k, m = frac
    num = "pi" if k == 1 else f"{k}*pi"
    return num if m == 1 else f"{num}/{m}"

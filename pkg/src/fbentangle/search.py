"""Scalar bracketing and golden-section minimisation."""

import math

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def bisect_boundary(inside, x_in, x_out, tol=1e-10, max_iter=200):
    """
    Locate the edge of a region along a line by bisection.

    ``inside(x_in)`` must be true and ``inside(x_out)`` false. Returns the
    pair ``(last_inside, first_outside)`` once they are within ``tol``.
    """
    for _ in range(max_iter):
        if abs(x_out - x_in) <= tol:
            break
        mid = 0.5 * (x_in + x_out)
        if inside(mid):
            x_in = mid
        else:
            x_out = mid
    return x_in, x_out


def find_exit(inside, start, step, limit=1e6):
    """Walk from ``start`` in steps that double until ``inside`` fails; return the first outside point."""
    x = start + step
    while inside(x):
        step *= 2.0
        if abs(step) > limit:
            raise ValueError(f"region appears unbounded beyond {x:.6g}")
        x = start + step
    return x


def golden_section(f, lo, hi, tol=1e-8, max_iter=500):
    """
    Minimise a unimodal function on ``[lo, hi]``.

    Returns ``(x_min, f_min)``; stops when the bracket is narrower than ``tol``.
    """
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a < tol:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    candidates = [(fc, c), (fd, d), (f(x), x)]
    fx, x = min(candidates)
    return x, fx

"""Reference values computed without the package, at 50-digit precision."""

import mpmath as mp
import numpy as np

mp.mp.dps = 50


def field(y, a, gamma, temp, h=0):
    return a * mp.tanh(y / (2 * temp)) - gamma * y + h


def nonzero_root(a, gamma, temp):
    """Positive root of the unskewed field, by bracketing between a/gamma/2 and a/gamma."""
    return mp.findroot(lambda y: field(y, a, gamma, temp), (mp.mpf(1e-6), mp.mpf(a) / gamma + 1), solver="anderson")


def tangency(a, gamma, temp):
    """Solve F = 0 and F_y = 0 jointly for (y, h) on the lower fold (h < 0 branch has y > 0)."""

    def eqs(y, h):
        return [field(y, a, gamma, temp, h), a / (2 * temp) / mp.cosh(y / (2 * temp)) ** 2 - gamma]

    y0 = 2 * temp * mp.acosh(mp.sqrt(mp.mpf(a) / (2 * gamma * temp))) * 1.1
    y, h = mp.findroot(eqs, (y0, -0.5))
    return float(y), float(-h)


def count_roots(a, gamma, temp, h, n=200001):
    """Sign-change count of the field on a dense float grid."""
    R = (a + abs(h)) / gamma + 1.0
    y = np.linspace(-R, R, n)
    f = a * np.tanh(y / (2 * temp)) - gamma * y + h
    s = np.sign(f)
    return int(np.sum(s[:-1] * s[1:] < 0) + np.sum(s == 0))


def numeric_jacobian(fn, r, eps=1e-6):
    r = np.asarray(r, dtype=float)
    n = r.size
    J = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = eps
        J[:, j] = (fn(r + e) - fn(r - e)) / (2 * eps)
    return J

"""Compactly supported C-infinity bump profiles with analytic derivatives.

The mother bump is B(y) = exp(1 - 1/(1 - y^2)) on |y| < 1, zero outside,
normalized so B(0) = 1.  Derivative-scale control in the data builders must
not rest on numerical differentiation, so the first three derivatives are
coded in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _safe_core(y):
    y = np.asarray(y, dtype=float)
    inside = np.abs(y) < 1.0
    w = np.where(inside, 1.0 - y * y, 1.0)
    core = np.where(inside, np.exp(1.0 - 1.0 / w), 0.0)
    return y, inside, w, core


def bump(y):
    """B(y) = exp(1 - 1/(1-y^2)) for |y| < 1, else 0."""
    return _safe_core(y)[3]


def bump_d1(y):
    y, inside, w, core = _safe_core(y)
    return np.where(inside, core * (-2.0 * y) / w ** 2, 0.0)


def bump_d2(y):
    y, inside, w, core = _safe_core(y)
    # d/dy [ -2y/w^2 ] = -2/w^2 - 8 y^2 / w^3 ; plus (-2y/w^2)^2 from the chain
    poly = (-2.0 / w ** 2 - 8.0 * y * y / w ** 3) + (2.0 * y / w ** 2) ** 2
    return np.where(inside, core * poly, 0.0)


def bump_d3(y):
    y, inside, w, core = _safe_core(y)
    a = -2.0 * y / w ** 2                       # a = (ln B)'
    da = -2.0 / w ** 2 - 8.0 * y * y / w ** 3
    d2a = -24.0 * y / w ** 3 - 48.0 * y ** 3 / w ** 4
    # B''' = B (a^3 + 3 a a' + a'')
    return np.where(inside, core * (a ** 3 + 3.0 * a * da + d2a), 0.0)


#: max |B'(y)|, used to size derivative scales of bump data
BUMP_D1_MAX = float(np.max(np.abs(bump_d1(np.linspace(-1, 1, 200001)))))


def smoothstep4(z):
    """C^4 polynomial step: 0 for z <= 0, 1 for z >= 1 (exact outside)."""
    z = np.clip(np.asarray(z, dtype=float), 0.0, 1.0)
    return z ** 5 * (70.0 * z ** 4 - 315.0 * z ** 3 + 540.0 * z ** 2
                     - 420.0 * z + 126.0)


def smoothstep4_d1(z):
    """d/dz of smoothstep4: 630 z^4 (1-z)^4 on [0,1], 0 outside."""
    z = np.asarray(z, dtype=float)
    inside = (z > 0.0) & (z < 1.0)
    zc = np.clip(z, 0.0, 1.0)
    return np.where(inside, 630.0 * zc ** 4 * (1.0 - zc) ** 4, 0.0)


def smoothstep4_int(z):
    """int_0^z smoothstep4: polynomial on [0,1], z - 1/2 beyond."""
    z = np.asarray(z, dtype=float)
    zc = np.clip(z, 0.0, 1.0)
    core = zc ** 6 * (7.0 * zc ** 4 - 35.0 * zc ** 3 + 67.5 * zc ** 2
                      - 60.0 * zc + 21.0)
    return np.where(z >= 1.0, z - 0.5, core)


def smoothstep4_d2(z):
    """Second derivative of smoothstep4: 2520 z^3 (1-z)^3 (1-2z) on [0,1]."""
    z = np.asarray(z, dtype=float)
    inside = (z > 0.0) & (z < 1.0)
    zc = np.clip(z, 0.0, 1.0)
    return np.where(inside,
                    2520.0 * zc ** 3 * (1.0 - zc) ** 3 * (1.0 - 2.0 * zc), 0.0)


@dataclass(frozen=True)
class PlateauProfile:
    """Smoothed N-wave whose derivative sits on an exact plateau.

    The derivative is a smoothstep trapezoid: +slope on the rise interval,
    exactly -slope on [u_down + edge, u_down + edge + plateau] (the
    shock-driving stretch), and 0 outside, all with C^4 joins.  A constant
    driving coefficient makes the mu-dip flat-bottomed, so the discrete
    min over a grid tracks the continuum min all the way down: a localized
    parabolic dip (plain bump profiles) narrows in x like mu and falls
    between grid points long before mu reaches the stopping threshold.

    Amplitude (= slope * (plateau + edge)) stays small while the derivative
    is O(1), which keeps mu(t=0) within O(amplitude^2) of 1.
    """

    slope: float = 1.0
    u_up: float = 0.05
    u_down: float = 0.50
    plateau: float = 0.25
    edge: float = 0.10

    def _trapezoid(self, s, d0):
        e, ell = self.edge, self.plateau
        return smoothstep4((s - d0) / e) - smoothstep4((s - d0 - e - ell) / e)

    def _trapezoid_int(self, s, d0):
        e, ell = self.edge, self.plateau
        return e * (smoothstep4_int((s - d0) / e)
                    - smoothstep4_int((s - d0 - e - ell) / e))

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        return self.slope * (self._trapezoid_int(s, self.u_up)
                             - self._trapezoid_int(s, self.u_down))

    def derivative(self, s):
        s = np.asarray(s, dtype=float)
        return self.slope * (self._trapezoid(s, self.u_up)
                             - self._trapezoid(s, self.u_down))

    def derivative2(self, s):
        s = np.asarray(s, dtype=float)
        e, ell = self.edge, self.plateau

        def dtrap(d0):
            return (smoothstep4_d1((s - d0) / e)
                    - smoothstep4_d1((s - d0 - e - ell) / e)) / e

        return self.slope * (dtrap(self.u_up) - dtrap(self.u_down))

    def derivative3(self, s):
        s = np.asarray(s, dtype=float)
        e, ell = self.edge, self.plateau

        def d2trap(d0):
            return (smoothstep4_d2((s - d0) / e)
                    - smoothstep4_d2((s - d0 - e - ell) / e)) / e ** 2

        return self.slope * (d2trap(self.u_up) - d2trap(self.u_down))

    @property
    def amplitude(self) -> float:
        return self.slope * (self.plateau + self.edge)

    @property
    def support(self):
        return (self.u_up, self.u_down + 2.0 * self.edge + self.plateau)


@dataclass(frozen=True)
class BumpProfile:
    """amplitude * B((s - center) / width): compact support [center +- width]."""

    amplitude: float
    center: float = 0.5
    width: float = 0.25

    def __call__(self, s):
        return self.amplitude * bump((np.asarray(s, dtype=float) - self.center) / self.width)

    def derivative(self, s):
        y = (np.asarray(s, dtype=float) - self.center) / self.width
        return self.amplitude / self.width * bump_d1(y)

    def derivative2(self, s):
        y = (np.asarray(s, dtype=float) - self.center) / self.width
        return self.amplitude / self.width ** 2 * bump_d2(y)

    def derivative3(self, s):
        y = (np.asarray(s, dtype=float) - self.center) / self.width
        return self.amplitude / self.width ** 3 * bump_d3(y)

    @property
    def support(self):
        return (self.center - self.width, self.center + self.width)

    def max_slope(self) -> float:
        return abs(self.amplitude) / self.width * BUMP_D1_MAX

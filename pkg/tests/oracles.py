"""Independent numerical oracles used to derive expected test values.

Everything here is deliberately decoupled from the selftrap package: a
hand-rolled fixed-step classic RK4 integrator, bisection-based zero
crossing location, and high-resolution quadrature. Fixture constants in
the test modules were computed with these routines and then frozen; the
slow derivations can be re-run by calling the functions directly.
"""

from __future__ import annotations

import math

import numpy as np


def packet_ode_rhs(w: float, T: float, u0: float) -> float:
    """Second derivative of the scaled amplitude variable.

    w'' = 4*T*w*ln(w) - 2*u0*w, extended continuously through w = 0
    (w*ln|w| -> 0).
    """
    if w == 0.0:
        return 0.0
    return 4.0 * T * w * math.log(abs(w)) - 2.0 * u0 * w


def rk4_step(q: float, y: tuple[float, float], h: float, T: float, u0: float) -> tuple[float, float]:
    """One classic RK4 step for y = (w, w')."""

    def f(_q, y):
        return (y[1], packet_ode_rhs(y[0], T, u0))

    k1 = f(q, y)
    k2 = f(q + 0.5 * h, (y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]))
    k3 = f(q + 0.5 * h, (y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]))
    k4 = f(q + h, (y[0] + h * k3[0], y[1] + h * k3[1]))
    return (
        y[0] + (h / 6.0) * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + (h / 6.0) * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    )


def rk4_first_zero(T: float, u0: float, h: float, q_max: float = 100.0) -> float:
    """First zero of w for fixed step h, refined by bisection.

    Integrates w'' = 4*T*w*ln(w) - 2*u0*w from w(0)=1, w'(0)=0 until the
    sign change, then bisects on the step fraction, re-taking a single RK4
    step from the last positive state for each probe.
    """
    q, y = 0.0, (1.0, 0.0)
    while y[0] > 0.0:
        y_next = rk4_step(q, y, h, T, u0)
        if y_next[0] <= 0.0:
            break
        q, y = q + h, y_next
        if q > q_max:
            raise RuntimeError(f"no zero crossing before q={q_max}")
    lo, hi = 0.0, h
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        w_mid = rk4_step(q, y, mid, T, u0)[0]
        if w_mid > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-16:
            break
    return q + 0.5 * (lo + hi)


def rk4_halving_zero(T: float, u0: float, h0: float = 0.01, rel_tol: float = 1e-7) -> tuple[float, float]:
    """Step-halving RK4 estimate of the first zero, to ~six matching digits.

    Returns (L_m, last step used).
    """
    h = h0
    prev = rk4_first_zero(T, u0, h)
    for _ in range(20):
        h *= 0.5
        cur = rk4_first_zero(T, u0, h)
        if abs(cur - prev) <= rel_tol * abs(cur):
            return cur, h
        prev = cur
    raise RuntimeError("step-halving did not converge")


def rk4_sample_w(T: float, u0: float, h: float, q_stop: float) -> tuple[np.ndarray, np.ndarray]:
    """Fixed-step RK4 samples of w on [0, q_stop]."""
    n = int(math.ceil(q_stop / h))
    qs = np.empty(n + 1)
    ws = np.empty(n + 1)
    q, y = 0.0, (1.0, 0.0)
    qs[0], ws[0] = q, y[0]
    for i in range(1, n + 1):
        step = min(h, q_stop - q)
        y = rk4_step(q, y, step, T, u0)
        q += step
        qs[i], ws[i] = q, y[0]
    return qs, ws


def trapezoid_oracle(f, a: float, b: float, n: int) -> float:
    """Composite trapezoid quadrature of callable f with n points."""
    x = np.linspace(a, b, n)
    return float(np.trapezoid(f(x), x))


def cos2_entropy_oracle(u_bar0: float = 1.0, n: int = 2**16 + 1) -> float:
    """High-resolution Shannon entropy of the cos^2 box density."""
    k0 = math.sqrt(2.0 * u_bar0)
    L0 = 0.5 * math.pi / k0
    q = np.linspace(-L0, L0, n)
    rho = np.cos(k0 * q) ** 2 / L0
    integrand = np.zeros_like(rho)
    pos = rho > 0.0
    integrand[pos] = rho[pos] * np.log(rho[pos])
    return float(-np.trapezoid(integrand, q))


def gaussian_width(t: float, sigma0: float) -> float:
    """Free-particle Gaussian spreading law (hbar = m = 1).

    sigma(t) = sigma0 * sqrt(1 + (t / (2 sigma0^2))^2)
    """
    return sigma0 * math.sqrt(1.0 + (t / (2.0 * sigma0**2)) ** 2)

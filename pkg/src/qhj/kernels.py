"""Hot loops: complex Riccati integration (DOPRI5) and Numerov sweeps.

These functions are compiled with numba when available (see :mod:`qhj._jit`)
and otherwise run as plain Python; the code is identical in both cases.
The Riccati state is ``y = (P, W)`` with

    P' = -i (P^2 - p^2) / hbar,    W' = P,

so that ``W`` accumulates the momentum integral alongside the solution.
``p^2 = k^2 - U(x)`` with ``U`` given by ascending polynomial coefficients.
"""

from __future__ import annotations

import numpy as np

from ._jit import njit

# Dormand-Prince 5(4) tableau.
C2, C3, C4, C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
A21 = 1.0 / 5.0
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
A61, A62, A63, A64, A65 = (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0,
                           49.0 / 176.0, -5103.0 / 18656.0)
A71, A73, A74, A75, A76 = (35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0,
                           -2187.0 / 6784.0, 11.0 / 84.0)
E1, E3, E4, E5, E6, E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                          -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)
# Dense output (Hairer & Wanner, DOPRI5 contd5).
D1 = -12715105075.0 / 11282082432.0
D3 = 87487479700.0 / 32700410799.0
D4 = -10690763975.0 / 1880347072.0
D5 = 701980252875.0 / 199316789632.0
D6 = -1453857185.0 / 822651844.0
D7 = 69997945.0 / 29380423.0

STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_MAX_STEPS = 2


@njit
def poly_eval(c, x):
    """Horner evaluation of ascending coefficients ``c`` at scalar ``x``."""
    acc = 0.0
    for j in range(c.size - 1, -1, -1):
        acc = acc * x + c[j]
    return acc


@njit
def _rhs(x, P, ucoef, k2, hbar):
    p2 = k2 - poly_eval(ucoef, x)
    return -1j * (P * P - p2) / hbar


@njit
def dopri5_riccati(ucoef, k2, hbar, x0, P0, W0, x_end, rtol, atol, h0, max_steps):
    """Integrate the (P, W) system from ``x0`` to ``x_end``.

    Returns
    -------
    n : int
        Number of accepted steps.
    xs : (n+1,) float array
        Step endpoints (monotone in the integration direction).
    ys : (n+1, 2) complex array
        ``(P, W)`` at the step endpoints.
    dense : (n, 5, 2) complex array
        Continuous-extension coefficients of each step.
    status : int
        ``STATUS_OK``, ``STATUS_UNDERFLOW`` or ``STATUS_MAX_STEPS``.
    """
    cap = max_steps + 1
    xs = np.empty(cap)
    ys = np.empty((cap, 2), dtype=np.complex128)
    dense = np.empty((max_steps, 5, 2), dtype=np.complex128)
    direction = 1.0 if x_end >= x0 else -1.0
    x = x0
    P = P0 + 0j
    W = W0 + 0j
    xs[0] = x
    ys[0, 0] = P
    ys[0, 1] = W
    h = direction * abs(h0)
    k1p = _rhs(x, P, ucoef, k2, hbar)
    k1w = P
    n = 0
    status = STATUS_OK
    fac_old = 1e-4
    while direction * (x_end - x) > 0.0:
        if n >= max_steps:
            status = STATUS_MAX_STEPS
            break
        if direction * (x + h - x_end) > 0.0:
            h = x_end - x
        if abs(h) <= 1e-14 * max(1.0, abs(x)):
            status = STATUS_UNDERFLOW
            break
        # stages (W' = P so the W stages are the P values)
        p2 = P + h * A21 * k1p
        k2p = _rhs(x + C2 * h, p2, ucoef, k2, hbar)
        p3 = P + h * (A31 * k1p + A32 * k2p)
        k3p = _rhs(x + C3 * h, p3, ucoef, k2, hbar)
        p4 = P + h * (A41 * k1p + A42 * k2p + A43 * k3p)
        k4p = _rhs(x + C4 * h, p4, ucoef, k2, hbar)
        p5 = P + h * (A51 * k1p + A52 * k2p + A53 * k3p + A54 * k4p)
        k5p = _rhs(x + C5 * h, p5, ucoef, k2, hbar)
        p6 = P + h * (A61 * k1p + A62 * k2p + A63 * k3p + A64 * k4p + A65 * k5p)
        k6p = _rhs(x + h, p6, ucoef, k2, hbar)
        Pn = P + h * (A71 * k1p + A73 * k3p + A74 * k4p + A75 * k5p + A76 * k6p)
        k7p = _rhs(x + h, Pn, ucoef, k2, hbar)
        k2w, k3w, k4w, k5w, k6w, k7w = p2, p3, p4, p5, p6, Pn
        Wn = W + h * (A71 * k1w + A73 * k3w + A74 * k4w + A75 * k5w + A76 * k6w)
        ep = h * (E1 * k1p + E3 * k3p + E4 * k4p + E5 * k5p + E6 * k6p + E7 * k7p)
        ew = h * (E1 * k1w + E3 * k3w + E4 * k4w + E5 * k5w + E6 * k6w + E7 * k7w)
        sp = atol + rtol * max(abs(P), abs(Pn))
        sw = atol + rtol * max(abs(W), abs(Wn))
        err = np.sqrt(0.5 * ((abs(ep) / sp) ** 2 + (abs(ew) / sw) ** 2))
        if not np.isfinite(err):
            h *= 0.1
            continue
        if err <= 1.0:
            # Lund-stabilised step control
            fac11 = err**0.17
            fac = fac11 / fac_old**0.04 / 0.9
            fac = min(5.0, max(0.1, fac))
            fac_old = max(err, 1e-4)
            # dense output coefficients
            for comp in range(2):
                if comp == 0:
                    y0, y1 = P, Pn
                    a1, a3, a4, a5, a6, a7 = k1p, k3p, k4p, k5p, k6p, k7p
                else:
                    y0, y1 = W, Wn
                    a1, a3, a4, a5, a6, a7 = k1w, k3w, k4w, k5w, k6w, k7w
                ydiff = y1 - y0
                bspl = h * a1 - ydiff
                dense[n, 0, comp] = y0
                dense[n, 1, comp] = ydiff
                dense[n, 2, comp] = bspl
                dense[n, 3, comp] = ydiff - h * a7 - bspl
                dense[n, 4, comp] = h * (D1 * a1 + D3 * a3 + D4 * a4 + D5 * a5 + D6 * a6 + D7 * a7)
            x = x + h
            P = Pn
            W = Wn
            k1p = k7p
            k1w = Pn
            n += 1
            xs[n] = x
            ys[n, 0] = P
            ys[n, 1] = W
            h = h / fac
        else:
            fac = min(10.0, err**0.2 / 0.9)
            h = h / fac
    return n, xs[: n + 1].copy(), ys[: n + 1].copy(), dense[:n].copy(), status


@njit
def dense_eval(xs, dense, xq):
    """Evaluate the continuous extension and its x-derivative at ``xq``.

    ``xs`` are the step endpoints returned by :func:`dopri5_riccati` (either
    increasing or decreasing). Points outside the integrated range are
    clamped to the first or last step and extrapolated by its polynomial.
    """
    m = xq.size
    n = xs.size - 1
    val = np.empty((m, 2), dtype=np.complex128)
    der = np.empty((m, 2), dtype=np.complex128)
    increasing = xs[n] >= xs[0]
    for q in range(m):
        x = xq[q]
        # binary search for the step containing x
        lo = 0
        hi = n
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if (xs[mid] <= x) == increasing:
                lo = mid
            else:
                hi = mid
        i = lo
        h = xs[i + 1] - xs[i]
        th = (x - xs[i]) / h
        th1 = 1.0 - th
        for c in range(2):
            r1 = dense[i, 0, c]
            r2 = dense[i, 1, c]
            r3 = dense[i, 2, c]
            r4 = dense[i, 3, c]
            r5 = dense[i, 4, c]
            A = r3 + th * (r4 + th1 * r5)
            B = r2 + th1 * A
            val[q, c] = r1 + th * B
            dA = r4 + (th1 - th) * r5
            dB = -A + th1 * dA
            der[q, c] = (B + th * dB) / h
    return val, der


@njit
def numerov_sweep(g, h, psi0, psi1):
    """Numerov recursion for ``psi'' + g psi = 0`` on a uniform grid.

    Starts from ``psi[0] = psi0``, ``psi[1] = psi1`` and proceeds in index
    order. The solution is rescaled whenever it exceeds ``1e150`` so that
    it stays finite; only its shape is meaningful.
    """
    n = g.size
    psi = np.empty(n)
    psi[0] = psi0
    psi[1] = psi1
    c = h * h / 12.0
    for i in range(1, n - 1):
        psi[i + 1] = (2.0 * (1.0 - 5.0 * c * g[i]) * psi[i]
                      - (1.0 + c * g[i - 1]) * psi[i - 1]) / (1.0 + c * g[i + 1])
        if abs(psi[i + 1]) > 1e150:
            for j in range(i + 2):
                psi[j] *= 1e-150
    return psi


@njit
def count_sign_changes(psi, i0, i1):
    """Number of sign changes of ``psi[i0:i1]`` ignoring exact zeros."""
    count = 0
    last = 0.0
    for i in range(i0, i1):
        v = psi[i]
        if v != 0.0:
            if last != 0.0 and (v > 0.0) != (last > 0.0):
                count += 1
            last = v
    return count

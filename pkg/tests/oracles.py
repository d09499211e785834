"""Independent oracles used to freeze expected values.

Everything here deliberately avoids the code paths under test: cylinder
functions come from ascending power series in arbitrary precision, linear
algebra from mpmath dense elimination, and integrals from brute-force
rules.
"""

import mpmath as mp
import numpy as np

mp.mp.dps = 40

EULER_GAMMA = mp.euler


def bessel_j_series(n, x):
    """J_n(x) by the ascending power series, arbitrary precision."""
    n = int(n)
    sign = 1
    if n < 0:
        n = -n
        sign = (-1) ** n
    x = mp.mpf(x)
    half = x / 2
    term = half**n / mp.factorial(n)
    total = term
    m = 0
    while True:
        m += 1
        term *= -(half * half) / (m * (m + n))
        total += term
        if abs(term) < mp.mpf(10) ** (-mp.mp.dps) * abs(total):
            break
    return sign * total


def bessel_y0_series(x):
    """Y_0(x) from its series: (2/pi)[(ln(x/2)+gamma) J_0 + sum]."""
    x = mp.mpf(x)
    j0 = bessel_j_series(0, x)
    quarter = (x / 2) ** 2
    term = quarter
    harmonic = mp.mpf(1)
    total = harmonic * term
    m = 1
    while True:
        m += 1
        term *= -quarter / (m * m)
        harmonic += mp.mpf(1) / m
        contribution = harmonic * term
        total += contribution
        if abs(contribution) < mp.mpf(10) ** (-mp.mp.dps) * max(abs(total), 1):
            break
    return (2 / mp.pi) * ((mp.log(x / 2) + EULER_GAMMA) * j0 + total)


def hankel2_mp(n, x):
    """H_n^(2)(x) via mpmath's own Bessel implementations."""
    return complex(mp.besselj(n, x) - 1j * mp.bessely(n, x))


def point_source_field_mp(sources, amplitude, wavenumber, point):
    """Direct extended-precision evaluation of the source superposition."""
    total = mp.mpc(0)
    px, py = mp.mpf(point[0]), mp.mpf(point[1])
    for (sx, sy), phase in sources:
        d = mp.sqrt((px - sx) ** 2 + (py - sy) ** 2)
        total += mp.e ** (-1j * (mp.mpf(wavenumber) * d + phase)) / d
    return complex(mp.mpf(amplitude) * total)


def che_field_mp(values, wavenumber, point):
    """Term-by-term circular-harmonic sum with mpmath Hankel values."""
    r = mp.sqrt(mp.mpf(point[0]) ** 2 + mp.mpf(point[1]) ** 2)
    phi = mp.atan2(point[1], point[0])
    order = (len(values) - 1) // 2
    total = mp.mpc(0)
    for i, a in enumerate(values):
        n = i - order
        h = mp.besselj(n, wavenumber * r) - 1j * mp.bessely(n, wavenumber * r)
        total += mp.mpc(a) * h * mp.e ** (1j * n * phi)
    return complex(total)


def normal_equations_solve_mp(A, lam, b):
    """(A^H A + lam I) x = A^H b by mpmath dense elimination."""
    A_mp = mp.matrix([[mp.mpc(v) for v in row] for row in A])
    b_mp = mp.matrix([mp.mpc(v) for v in b])
    AH = A_mp.H
    G = AH * A_mp
    for i in range(G.rows):
        G[i, i] += mp.mpf(lam)
    x = mp.lu_solve(G, AH * b_mp)
    return np.array([complex(x[i]) for i in range(x.rows)])


def power_iteration_sigma1(A, iterations=500, seed=0):
    """Largest singular value by power iteration on A^H A."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(A.shape[1]) + 1j * rng.standard_normal(A.shape[1])
    v /= np.linalg.norm(v)
    for _ in range(iterations):
        w = A.conj().T @ (A @ v)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
    return float(np.sqrt(np.linalg.norm(A.conj().T @ (A @ v))))


def segment_plane_wave_integral(p0, direction_unit, wavenumber, alpha, half_length):
    """Closed form of int_-h^h e^{-j k d(alpha) . (p0 + l t)} dl."""
    d = np.array([np.cos(alpha), np.sin(alpha)])
    along = float(d @ direction_unit)
    phase0 = np.exp(-1j * wavenumber * float(d @ p0))
    u = wavenumber * along * half_length
    return phase0 * 2.0 * half_length * np.sinc(u / np.pi)


def trapezoid_integral(fn, lo, hi, panels=10000):
    xs = np.linspace(lo, hi, panels + 1)
    return np.trapezoid(fn(xs), xs)

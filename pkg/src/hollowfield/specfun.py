"""Integer-order cylinder functions on the real positive axis.

Every circular-harmonic computation in this package reduces to evaluations
of J_n, Y_n and the second-kind Hankel function H_n^(2) = J_n - i Y_n.
The evaluation itself is delegated to scipy.special (AMOS/cephes), which
comfortably meets the 1e-12 relative-accuracy requirement on the envelope
used here (|n| <= 64, x in [1e-3, 600]).  This module adds the domain
policy: arguments below ``MIN_ARGUMENT`` are rejected rather than
approximated (the sampling geometry never approaches the origin), orders
beyond ``MAX_ORDER`` are rejected, and negative orders are produced from
positive ones through the reflection identities

    J_{-n}(x) = (-1)^n J_n(x),      Y_{-n}(x) = (-1)^n Y_n(x)

so the sign relation holds bitwise.

All functions are pure and safe to call concurrently.
"""

import numpy as np
from scipy import special as _sp

from .errors import DomainError

__all__ = [
    "MAX_ORDER",
    "MIN_ARGUMENT",
    "bessel_j",
    "bessel_y",
    "hankel2",
    "hankel2_orders",
]

MAX_ORDER = 64
MIN_ARGUMENT = 1e-3


def _check_order(n):
    if n != int(n):
        raise DomainError(f"cylinder-function order must be an integer, got {n!r}")
    n = int(n)
    if abs(n) > MAX_ORDER:
        raise DomainError(f"order |{n}| exceeds the supported maximum {MAX_ORDER}")
    return n


def _check_argument(x):
    x = float(x)
    if not np.isfinite(x) or x <= 0.0:
        raise DomainError(f"cylinder-function argument must be positive and finite, got {x!r}")
    if x < MIN_ARGUMENT:
        raise DomainError(
            f"argument {x!r} is below the near-singular floor {MIN_ARGUMENT}; "
            "evaluation this close to the axis is rejected"
        )
    return x


def bessel_j(n, x):
    """Bessel function of the first kind J_n(x) for integer n, x > 0.

    Negative orders use the reflection identity, so ``bessel_j(-n, x)``
    equals ``(-1)**n * bessel_j(n, x)`` bitwise.
    """
    n = _check_order(n)
    x = _check_argument(x)
    value = float(_sp.jv(abs(n), x))
    if n < 0 and n % 2:
        value = -value
    return value


def bessel_y(n, x):
    """Bessel function of the second kind Y_n(x) for integer n, x > 0."""
    n = _check_order(n)
    x = _check_argument(x)
    value = float(_sp.yn(abs(n), x))
    if n < 0 and n % 2:
        value = -value
    return value


def hankel2(n, x):
    """Hankel function of the second kind, H_n^(2)(x) = J_n(x) - i*Y_n(x)."""
    return complex(bessel_j(n, x), -bessel_y(n, x))


def hankel2_orders(max_order, x):
    """H_n^(2)(x) for every order n = -max_order..max_order at once.

    Parameters
    ----------
    max_order : int
        Truncation order N >= 0; rows cover n = -N..N ascending.
    x : array_like
        Positive arguments, all >= ``MIN_ARGUMENT``.

    Returns
    -------
    ndarray, shape (2*max_order+1, len(x)), complex
    """
    max_order = _check_order(max_order)
    if max_order < 0:
        raise DomainError("max_order must be >= 0")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.ndim != 1:
        raise DomainError("x must be one-dimensional")
    if x.size and (not np.all(np.isfinite(x)) or x.min() < MIN_ARGUMENT):
        raise DomainError(
            f"arguments must be finite and >= {MIN_ARGUMENT}; minimum was {x.min()!r}"
        )
    orders = np.arange(max_order + 1)[:, None]
    h_pos = _sp.jv(orders, x[None, :]) - 1j * _sp.yn(orders, x[None, :])
    out = np.empty((2 * max_order + 1, x.size), dtype=complex)
    out[max_order:] = h_pos
    # reflection for the negative-order rows
    signs = np.where(np.arange(1, max_order + 1) % 2, -1.0, 1.0)[:, None]
    out[:max_order] = (signs * h_pos[1:])[::-1]
    return out

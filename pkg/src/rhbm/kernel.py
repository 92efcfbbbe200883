"""Angular average of the Fermi-Dirac connection probability on a circle.

For a pair whose probability is ``1 / (1 + (x / a)**beta)`` with ``x = R * dtheta``
and ``dtheta`` uniform on ``[0, pi]``, the expected probability is

    g(a) = (a / (pi R)) * integral_0^{pi R / a} dt / (1 + t**beta).

With ``s = t**beta / (1 + t**beta)`` the integral is an incomplete beta
function, ``pi / (beta sin(pi / beta)) * I_s(1/beta, 1 - 1/beta)``, which
is what :func:`angular_connection_kernel` evaluates.
"""

from __future__ import annotations

import numpy as np
from scipy import special

TABLE_SIZE = 4096
# range of log(a / (pi R)) covered by KernelTable
_LOG_LO, _LOG_HI = -28.0, 14.0


def _check_beta(beta: float) -> None:
    if not beta > 1.0:
        raise ValueError(f"beta must exceed 1 for the angular average to converge, got {beta}")


def integral_constant(beta: float) -> float:
    """``integral_0^inf dt / (1 + t**beta) = pi / (beta sin(pi / beta))``."""
    _check_beta(beta)
    return np.pi / (beta * np.sin(np.pi / beta))


def angular_connection_kernel(a, beta: float, R: float):
    """Expected connection probability for scale ``a`` under a uniform angle.

    Vectorized over ``a``. ``g(0) = 0`` and ``g`` increases monotonically to 1.
    """
    _check_beta(beta)
    if not R > 0:
        raise ValueError(f"R must be positive, got {R}")
    a = np.asarray(a, dtype=float)
    if np.any(a < 0):
        raise ValueError("kernel scale must be non-negative")
    out = np.zeros_like(a)
    pos = a > 0
    if not np.any(pos):
        return out if out.ndim else float(out)
    ap = a[pos]
    if beta == 2.0:
        X = np.pi * R / ap
        out[pos] = np.arctan(X) / X
        return out if out.ndim else float(out)

    inv = 1.0 / beta
    log_X = np.log(np.pi * R) - np.log(ap)
    t = beta * log_X
    s = special.expit(t)
    s_c = special.expit(-t)
    # complementary form keeps precision when s is close to 1
    frac = np.where(
        s < 0.5,
        special.betainc(inv, 1.0 - inv, s),
        1.0 - special.betainc(1.0 - inv, inv, s_c),
    )
    # for tiny X the integral is ~X itself; betainc underflows before that matters
    small = log_X < -30.0 / beta
    val = integral_constant(beta) * frac * np.exp(-log_X)
    val[small] = 1.0 - np.exp(beta * log_X[small]) / (beta + 1.0)
    out[pos] = np.minimum(val, 1.0)
    return out if out.ndim else float(out)


def linear_kernel_limit(a, beta: float, R: float):
    """Sparse-pair limit ``g(a) ~ a / (R beta sin(pi / beta))``."""
    _check_beta(beta)
    return np.asarray(a, dtype=float) / (R * beta * np.sin(np.pi / beta))


class KernelTable:
    """Tabulated ``log g`` on a uniform grid in ``log a`` for the O(N^2) loops.

    Values inside the table are linearly interpolated in log space; anything
    outside falls back to the exact kernel.
    """

    def __init__(self, beta: float, R: float, size: int = TABLE_SIZE):
        _check_beta(beta)
        self.beta = float(beta)
        self.R = float(R)
        self._offset = np.log(np.pi * self.R)
        self.u = np.linspace(_LOG_LO, _LOG_HI, size) + self._offset
        g = angular_connection_kernel(np.exp(self.u), self.beta, self.R)
        self.log_g = np.log(g)
        self._lo, self._hi = self.u[0], self.u[-1]

    def from_log(self, log_a: np.ndarray) -> np.ndarray:
        """Kernel values given ``log a`` (``-inf`` maps to 0)."""
        log_a = np.asarray(log_a, dtype=float)
        out = np.exp(np.interp(log_a, self.u, self.log_g))
        outside = (log_a < self._lo) | (log_a > self._hi)
        if np.any(outside):
            with np.errstate(under="ignore"):
                out[outside] = angular_connection_kernel(np.exp(log_a[outside]), self.beta, self.R)
        return out

    def __call__(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=float)
        with np.errstate(divide="ignore"):
            return self.from_log(np.log(a))

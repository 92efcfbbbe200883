"""
The angular connection kernel
=============================

Averaging the connection probability over a uniform angle gives g(a), the
expected link probability for a pair with scale a. For small a it is
linear in a; for a comparable to pi R it saturates.
"""

import numpy as np

from rhbm.kernel import KernelTable, angular_connection_kernel, linear_kernel_limit

R = 3000 / (2 * np.pi)
a = np.pi * R * np.logspace(-4, 2, 7)

for beta in (1.5, 2.0, 10.0):
    g = angular_connection_kernel(a, beta, R)
    lin = linear_kernel_limit(a, beta, R)
    print(f"beta={beta:g}")
    for ai, gi, li in zip(a / (np.pi * R), g, lin):
        print(f"  a/(pi R)={ai:8.1e}  g={gi:.6f}  linear={li:.6f}")

# the calibration loops use a log-spaced table of the same function
table = KernelTable(2.0, R)
x = np.pi * R * np.logspace(-8, 4, 10000)
err = np.max(np.abs(table(x) / angular_connection_kernel(x, 2.0, R) - 1))
print(f"table relative error over 12 decades: {err:.1e}")

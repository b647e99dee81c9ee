"""Dense linear algebra kernels: determinants, Pfaffians, selected inverses.

Everything here works on plain numpy arrays. Matrices are small (a few hundred
rows at most) but some callers evaluate them tens of thousands of times, so the
Pfaffian uses outer-product updates instead of elementwise loops.
"""

import numpy as np

from .errors import NearSingular, NotSkew, OddDimension

_SKEW_TOL = 1e-12


def det(a):
    """Determinant as a Python complex.

    Thin wrapper over LU factorization; exists so callers get one audited
    entry point with a fixed return type.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("det expects a square matrix")
    return complex(np.linalg.det(a))


def _check_skew(a):
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise NotSkew("pfaffian expects a square matrix")
    scale = max(1.0, float(np.max(np.abs(a))) if n else 1.0)
    if n and float(np.max(np.abs(a + a.T))) > _SKEW_TOL * scale:
        raise NotSkew("matrix is not antisymmetric to 1e-12")
    if n % 2:
        raise OddDimension("pfaffian needs even dimension, got %d" % n)


def pfaffian(a):
    """Pfaffian of a real antisymmetric matrix.

    Parlett-Reid tridiagonalization with partial pivoting. Each step picks the
    largest entry in the working column, swaps it into place (flipping the
    sign), multiplies the running product by the pivot and clears the rest of
    the column with a rank-two update. Returns 0.0 exactly when a whole
    column vanishes, which is how singular skew matrices surface.
    """
    a = np.array(a, dtype=float, copy=True)
    _check_skew(a)
    n = a.shape[0]
    if n == 0:
        return 1.0
    pf = 1.0
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(a[k + 1:, k])))
        if kp != k + 1:
            a[[k + 1, kp], :] = a[[kp, k + 1], :]
            a[:, [k + 1, kp]] = a[:, [kp, k + 1]]
            pf = -pf
        pivot = a[k, k + 1]
        if pivot == 0.0:
            return 0.0
        pf *= pivot
        if k + 2 < n:
            tau = a[k, k + 2:] / pivot
            col = a[k + 2:, k + 1]
            a[k + 2:, k + 2:] += np.outer(tau, col) - np.outer(col, tau)
    return float(pf)


def inverse_entries(a, pairs):
    """Selected entries of a^{-1}.

    Args:
        a: square matrix, real or complex.
        pairs: iterable of (row, col) index pairs into a^{-1}.

    Returns:
        dict mapping each requested pair to the complex entry.

    Raises:
        NearSingular: smallest singular value below 1e-12 of the largest.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("inverse_entries expects a square matrix")
    pairs = [(int(i), int(j)) for i, j in pairs]
    sv = np.linalg.svd(a, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] < 1e-12 * sv[0]:
        raise NearSingular("matrix is singular to working precision")
    cols = sorted({j for _, j in pairs})
    rhs = np.zeros((a.shape[0], len(cols)), dtype=a.dtype)
    for c, j in enumerate(cols):
        rhs[j, c] = 1.0
    sol = np.linalg.solve(a, rhs)
    where = {j: c for c, j in enumerate(cols)}
    return {(i, j): complex(sol[i, where[j]]) for i, j in pairs}


def fourier_coeffs(f, k_range, grid_points):
    """Trapezoidal Fourier coefficients of a function on the unit circle.

    c_k = (1/M) sum_j f(exp(2 pi i j / M)) exp(-2 pi i j k / M), which is
    exact for trigonometric polynomials of degree below M/2.

    f is either a callable evaluated at the M-th roots of unity, returning
    scalars or arrays of one fixed shape, or a ready array of samples whose
    leading axis runs over those nodes (its length must be grid_points).
    """
    ks = [int(k) for k in k_range]
    m = int(grid_points)
    kmax = max((abs(k) for k in ks), default=0)
    if m < 4 * kmax or m < 1:
        raise ValueError("need at least 4*max|k| grid points, got %d" % m)
    if callable(f):
        nodes = np.exp(2j * np.pi * np.arange(m) / m)
        samples = np.stack([np.asarray(f(z), dtype=complex) for z in nodes])
    else:
        samples = np.asarray(f, dtype=complex)
        if samples.shape[0] != m:
            raise ValueError(
                "sample array has leading length %d, expected %d"
                % (samples.shape[0], m)
            )
    phases = np.exp(-2j * np.pi * np.outer(ks, np.arange(m)) / m) / m
    coeffs = np.tensordot(phases, samples, axes=(1, 0))
    return {k: coeffs[idx] for idx, k in enumerate(ks)}

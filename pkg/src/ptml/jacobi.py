"""Self-contained Hermitian eigensolvers (cyclic Jacobi).

Two variants:

* eigh_jacobi: complex Hermitian (or real symmetric) numpy matrices,
  vectorized row/column updates.  Intended for the dense oracle matrices
  (dimension at most a few thousand, typically <= 64 in tests).

* jacobi_eigenvalues: plain-Python cyclic Jacobi over an arbitrary real
  scalar type (float, mpmath.mpf, Fraction with a sqrt supplied).  Used for
  small high-precision Hankel matrices where float64 round-off would swamp
  the signal.

A Jacobi rotation zeroing A[p,q] uses the unitary that mixes coordinates p
and q; for complex entries the rotation carries the phase of A[p,q].  Cyclic
sweeps over all p < q converge quadratically once the off-diagonal norm is
small.
"""

from __future__ import annotations

import math

import numpy as np


def eigh_jacobi(a: np.ndarray, tol: float = 1e-14, max_sweeps: int = 60):
    """Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.

    Returns (w, v) with columns of v the eigenvectors.  Convergence: the
    off-diagonal Frobenius norm drops below tol times the total norm.
    """
    a = np.asarray(a)
    n = a.shape[0]
    assert a.shape == (n, n)
    A = a.astype(complex).copy()
    V = np.eye(n, dtype=complex)
    norm = np.linalg.norm(A)
    if norm == 0.0 or n == 1:
        w = np.real(np.diag(A))
        order = np.argsort(w)
        return w[order], V[:, order]

    for _ in range(max_sweeps):
        off = math.sqrt(max(0.0, np.linalg.norm(A) ** 2
                            - np.linalg.norm(np.diag(A)) ** 2))
        if off <= tol * norm:
            break
        thresh = off / n  # rotate only elements that matter this sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= thresh * 1e-3:
                    continue
                app = A[p, p].real
                aqq = A[q, q].real
                tau = (aqq - app) / (2.0 * abs(apq))
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = (t * c) * (apq / abs(apq))
                # columns, then rows, then the eigenvector accumulator
                col_p = A[:, p].copy()
                col_q = A[:, q].copy()
                A[:, p] = c * col_p - np.conj(s) * col_q
                A[:, q] = s * col_p + c * col_q
                row_p = A[p, :].copy()
                row_q = A[q, :].copy()
                A[p, :] = c * row_p - s * row_q
                A[q, :] = np.conj(s) * row_p + c * row_q
                A[p, q] = 0.0
                A[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - np.conj(s) * vq
                V[:, q] = s * vp + c * vq
    w = np.real(np.diag(A))
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def jacobi_eigenvalues(rows, sqrt=math.sqrt, tol=1e-30, max_sweeps: int = 80):
    """Eigenvalues (ascending) of a real symmetric matrix of scalars.

    `rows` is a list of lists; entries may be float, mpmath.mpf or any real
    scalar supporting +,-,*,/ and comparison, with a matching `sqrt`.
    `tol` is relative to the Frobenius norm; pick it to match the scalar's
    working precision.
    """
    n = len(rows)
    A = [list(r) for r in rows]
    for i in range(n):
        assert len(A[i]) == n
    if n == 1:
        return [A[0][0]]

    zero = A[0][0] - A[0][0]  # additive zero of the scalar type
    norm2 = zero
    for i in range(n):
        for j in range(n):
            norm2 = norm2 + A[i][j] * A[i][j]
    if norm2 == zero:
        return [zero for _ in range(n)]
    norm = sqrt(norm2)
    one = norm / norm

    for _ in range(max_sweeps):
        off2 = zero
        for i in range(n):
            for j in range(i + 1, n):
                off2 = off2 + 2 * A[i][j] * A[i][j]
        if off2 <= (tol * norm) ** 2:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p][q]
                if apq == zero:
                    continue
                diff = A[q][q] - A[p][p]
                tau = diff / (2 * apq)
                if tau >= zero:
                    t = one / (tau + sqrt(one + tau * tau))
                else:
                    t = -one / (-tau + sqrt(one + tau * tau))
                c = one / sqrt(one + t * t)
                s = t * c
                for i in range(n):
                    aip = A[i][p]
                    aiq = A[i][q]
                    A[i][p] = c * aip - s * aiq
                    A[i][q] = s * aip + c * aiq
                for i in range(n):
                    api = A[p][i]
                    aqi = A[q][i]
                    A[p][i] = c * api - s * aqi
                    A[q][i] = s * api + c * aqi
                A[p][q] = zero
                A[q][p] = zero
    return sorted(A[i][i] for i in range(n))

"""Dense linear algebra, spectral estimates, and deterministic random streams.

Everything here is plain float64 numpy with no hidden state: the eigensolver
is cyclic Jacobi, the spectral norm comes from power iteration, and the
random stream is a counter-based generator (splitmix64 + Box-Muller) whose
output depends only on (seed, position).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "as_vector",
    "as_matrix",
    "matvec",
    "PowerIterationResult",
    "gram_spectral_norm",
    "spectral_norm_sq",
    "jacobi_eigh",
    "SpectralSummary",
    "sym_eig_summary",
    "least_squares_min_norm",
    "GaussianStream",
    "gaussian_stream",
    "save_csv",
    "load_matrix_csv",
    "load_vector_csv",
]

_JACOBI_MAX_DIM = 1024


def as_vector(x) -> np.ndarray:
    """Coerce to a finite 1-D float64 array; reject NaN/Inf."""
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector contains NaN or Inf entries")
    return v


def as_matrix(a) -> np.ndarray:
    """Coerce to a finite 2-D float64 array; reject NaN/Inf."""
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains NaN or Inf entries")
    return m


def matvec(a, x) -> np.ndarray:
    """Matrix-vector product with an explicit dimension check."""
    A = as_matrix(a)
    v = as_vector(x)
    if A.shape[1] != v.shape[0]:
        raise ValueError(
            f"dimension mismatch: matrix is {A.shape[0]}x{A.shape[1]}, "
            f"vector has length {v.shape[0]}"
        )
    return A @ v


class PowerIterationResult(NamedTuple):
    value: float
    converged: bool
    iterations: int


def gram_spectral_norm(a, rel_tol: float = 1e-10, max_iters: int = 100_000) -> PowerIterationResult:
    """Largest eigenvalue of A^T A by power iteration.

    The start vector is the normalized all-ones vector, so the result is
    deterministic. If the iteration cap is hit before the eigenvalue estimate
    stabilizes to `rel_tol`, the best estimate is returned with
    ``converged=False``.
    """
    A = as_matrix(a)
    if not A.any():
        raise ValueError("spectral norm of the zero matrix is not supported")
    n = A.shape[1]
    v = np.full(n, 1.0 / math.sqrt(n))
    lam_prev = -1.0
    lam = 0.0
    for it in range(1, max_iters + 1):
        u = A @ v
        lam = float(u @ u)
        w = A.T @ u
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            # start vector fell in the null space; restart from the first
            # basis vector with a nonzero image (deterministic)
            j = int(np.argmax(np.linalg.norm(A, axis=0)))
            v = np.zeros(n)
            v[j] = 1.0
            lam_prev = -1.0
            continue
        v = w / nw
        if lam_prev >= 0.0 and abs(lam - lam_prev) <= rel_tol * lam:
            return PowerIterationResult(lam, True, it)
        lam_prev = lam
    return PowerIterationResult(lam, False, max_iters)


def spectral_norm_sq(a) -> float:
    """||A||^2, i.e. lambda_max(A^T A). See `gram_spectral_norm` for details."""
    return gram_spectral_norm(a).value


def _check_symmetric(S: np.ndarray) -> None:
    scale = max(1.0, float(np.max(np.abs(S))) if S.size else 0.0)
    asym = float(np.max(np.abs(S - S.T))) if S.size else 0.0
    if asym > 1e-12 * scale:
        raise ValueError(f"matrix is not symmetric (max asymmetry {asym:.3e})")


def jacobi_eigh(s, max_sweeps: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns ``(vals, V)`` with eigenvalues ascending and ``S = V diag(vals) V^T``.
    Sweeps continue until the off-diagonal Frobenius norm drops below
    1e-12 (scaled by the matrix norm so large matrices terminate in float64).
    """
    S = as_matrix(s)
    n = S.shape[0]
    if S.shape[0] != S.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {S.shape}")
    if n > _JACOBI_MAX_DIM:
        raise ValueError(f"dimension {n} exceeds the Jacobi solver cap {_JACOBI_MAX_DIM}")
    _check_symmetric(S)

    M = 0.5 * (S + S.T)
    V = np.eye(n)
    fro = float(np.linalg.norm(M))
    tol = 1e-12 * max(1.0, fro)
    rot_tol = tol / max(1, 2 * n * n)

    def off_norm() -> float:
        od = M - np.diag(np.diag(M))
        return float(np.linalg.norm(od))

    for _ in range(max_sweeps):
        if off_norm() < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = M[p, q]
                if abs(apq) <= rot_tol:
                    continue
                tau = (M[q, q] - M[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                sgn = t * c
                col_p = M[:, p].copy()
                col_q = M[:, q].copy()
                M[:, p] = c * col_p - sgn * col_q
                M[:, q] = sgn * col_p + c * col_q
                row_p = M[p, :].copy()
                row_q = M[q, :].copy()
                M[p, :] = c * row_p - sgn * row_q
                M[q, :] = sgn * row_p + c * row_q
                M[p, q] = 0.0
                M[q, p] = 0.0
                vcol_p = V[:, p].copy()
                vcol_q = V[:, q].copy()
                V[:, p] = c * vcol_p - sgn * vcol_q
                V[:, q] = sgn * vcol_p + c * vcol_q
    else:
        if off_norm() > 1e-10 * max(1.0, fro):
            raise ArithmeticError("Jacobi sweeps failed to converge")

    vals = np.diag(M).copy()
    order = np.argsort(vals, kind="stable")
    return vals[order], V[:, order]


@dataclass(frozen=True)
class SpectralSummary:
    """Extreme eigenvalues of a symmetric matrix.

    ``lambda_min_pp`` is the smallest *strictly positive* eigenvalue, where
    eigenvalues below ``1e-10 * lambda_max`` count as zero; it is ``None``
    when no strictly positive eigenvalue exists.
    """

    lambda_max: float
    lambda_min: float
    lambda_min_pp: float | None

    def __post_init__(self) -> None:
        if self.lambda_min > self.lambda_max:
            raise ValueError("lambda_min exceeds lambda_max")
        if self.lambda_min_pp is not None and not (
            self.lambda_min <= self.lambda_min_pp <= self.lambda_max
        ):
            raise ValueError("lambda_min_pp outside [lambda_min, lambda_max]")


def sym_eig_summary(s) -> SpectralSummary:
    """SpectralSummary of a symmetric matrix via the Jacobi eigensolver."""
    vals, _ = jacobi_eigh(s)
    lam_max = float(vals[-1])
    lam_min = float(vals[0])
    zero_cut = 1e-10 * max(lam_max, 0.0)
    positive = vals[vals > zero_cut]
    lam_pp = float(positive[0]) if positive.size else None
    return SpectralSummary(lam_max, lam_min, lam_pp)


def cholesky_solve(L: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``L L^T z = b`` for a lower-triangular L; b may be (n,) or (n, k)."""
    n = L.shape[0]
    y = np.empty_like(np.asarray(b, dtype=np.float64))
    for i in range(n):
        y[i] = (b[i] - L[i, :i] @ y[:i]) / L[i, i]
    z = np.empty_like(y)
    for i in range(n - 1, -1, -1):
        z[i] = (y[i] - L[i + 1 :, i] @ z[i + 1 :]) / L[i, i]
    return z


def least_squares_min_norm(a, t) -> np.ndarray:
    """Minimum-norm solution of ``A x = t`` for a full-row-rank A.

    Solves ``A A^T z = t`` by Cholesky and returns ``x = A^T z``. Rank
    deficiency (smallest eigenvalue of ``A A^T`` below ``1e-12 * largest``)
    is rejected.
    """
    A = as_matrix(a)
    rhs = as_vector(t)
    if A.shape[0] != rhs.shape[0]:
        raise ValueError(
            f"dimension mismatch: matrix is {A.shape[0]}x{A.shape[1]}, "
            f"target has length {rhs.shape[0]}"
        )
    G = A @ A.T
    G = 0.5 * (G + G.T)
    summary = sym_eig_summary(G)
    if summary.lambda_min <= 1e-12 * summary.lambda_max:
        raise ValueError(
            f"rank-deficient matrix: lambda_min(AA^T) = {summary.lambda_min:.6e}"
        )
    L = np.linalg.cholesky(G)
    z = cholesky_solve(L, rhs)
    x = A.T @ z
    resid = rhs - A @ x
    bound = 1e-10 * (1.0 + float(np.linalg.norm(rhs)))
    if float(np.linalg.norm(resid)) > bound:
        # one step of iterative refinement before giving up
        z = z + cholesky_solve(L, resid)
        x = A.T @ z
        resid = rhs - A @ x
        if float(np.linalg.norm(resid)) > bound:
            raise ArithmeticError(
                f"min-norm solve residual {float(np.linalg.norm(resid)):.3e} "
                f"exceeds bound {bound:.3e}"
            )
    return x


_U64 = np.uint64
_GOLDEN = _U64(0x9E3779B97F4A7C15)
_MIX1 = _U64(0xBF58476D1CE4E5B9)
_MIX2 = _U64(0x94D049BB133111EB)


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _U64(30))) * _MIX1
    z = (z ^ (z >> _U64(27))) * _MIX2
    return z ^ (z >> _U64(31))


class GaussianStream:
    """Deterministic scalar stream: splitmix64 counter generator + Box-Muller.

    The i-th raw word is ``mix(seed + (i+1) * golden)``, so draws depend only
    on the seed and position; identical seeds give identical streams. Derived
    streams use ``seed XOR i`` (see `split`).
    """

    def __init__(self, seed: int):
        self.seed = _U64(int(seed) & 0xFFFFFFFFFFFFFFFF)
        self._pos = 0
        self._spare: float | None = None

    def _raw(self, n: int) -> np.ndarray:
        idx = np.arange(self._pos + 1, self._pos + n + 1, dtype=np.uint64)
        self._pos += n
        with np.errstate(over="ignore"):
            return _mix(self.seed + idx * _GOLDEN)

    def uniform(self, n: int) -> np.ndarray:
        """n doubles strictly inside (0, 1)."""
        return (self._raw(n) >> _U64(11)).astype(np.float64) * 2.0**-53 + 2.0**-54

    def normal(self, shape) -> np.ndarray:
        """Standard normal draws with the given shape (int or tuple)."""
        if isinstance(shape, (int, np.integer)):
            shape = (int(shape),)
        n = int(np.prod(shape)) if shape else 1
        out = np.empty(n)
        start = 0
        if self._spare is not None and n > 0:
            out[0] = self._spare
            self._spare = None
            start = 1
        need = n - start
        if need > 0:
            pairs = (need + 1) // 2
            u = self.uniform(2 * pairs)
            u1 = u[0::2]  # adjacent pairing keeps draws chunking-invariant
            u2 = u[1::2]
            r = np.sqrt(-2.0 * np.log(u1))
            z1 = r * np.cos(2.0 * np.pi * u2)
            z2 = r * np.sin(2.0 * np.pi * u2)
            inter = np.empty(2 * pairs)
            inter[0::2] = z1
            inter[1::2] = z2
            out[start:] = inter[:need]
            if 2 * pairs > need:
                self._spare = float(inter[need])
        return out.reshape(shape)

    def integer_below(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection (no modulo bias)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        span = (1 << 64) - ((1 << 64) % bound)
        while True:
            word = int(self._raw(1)[0])
            if word < span:
                return word % bound

    def subset(self, n: int, k: int) -> np.ndarray:
        """Sorted uniform k-subset of range(n) via partial Fisher-Yates."""
        if not 0 <= k <= n:
            raise ValueError(f"cannot choose {k} of {n}")
        pool = np.arange(n)
        for i in range(k):
            j = i + self.integer_below(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return np.sort(pool[:k])

    def split(self, i: int) -> "GaussianStream":
        """Independent derived stream for trial i (seed XOR i)."""
        return GaussianStream(int(self.seed) ^ int(i))


def gaussian_stream(seed: int) -> GaussianStream:
    """Deterministic standard-normal stream for the given seed."""
    return GaussianStream(seed)


def save_csv(path, array) -> None:
    """Write a vector or matrix as headerless comma-separated rows."""
    a = np.asarray(array, dtype=np.float64)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    if a.ndim != 2:
        raise ValueError(f"expected 1-D or 2-D data, got shape {a.shape}")
    with open(path, "w", encoding="ascii") as fh:
        for row in a:
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")


def load_matrix_csv(path) -> np.ndarray:
    rows = []
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append([float(tok) for tok in line.split(",")])
    if not rows:
        raise ValueError(f"no data in {path}")
    return as_matrix(np.array(rows))


def load_vector_csv(path) -> np.ndarray:
    m = load_matrix_csv(path)
    if m.shape[0] == 1:
        return m[0]
    if m.shape[1] == 1:
        return m[:, 0]
    raise ValueError(f"expected a single row or column in {path}, got {m.shape}")

"""Gaussian graphical model with a uniform bias-variance-coupling form.

The density on a graph ``G`` is proportional to::

    exp( sum_i h_i x_i - xi/2 sum_i x_i^2 - J/2 sum_{(i,j) in E} (x_i - x_j)^2 )

so the precision matrix is ``xi * I + J * L`` with ``L`` the graph Laplacian
and the mean solves ``Q mu = h``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import DegenerateInputError, InputError, NumericalError, ParameterError
from .graph import Graph

Matrix = Union[np.ndarray, sp.spmatrix]

# Above this size a sparse matrix is factorized with sparse LU instead of dense Cholesky.
DENSE_LIMIT = 2000
DENSE_FILL = 0.05


@dataclass(frozen=True, eq=False)
class GgmParams:
    h: np.ndarray
    xi: float
    j: float

    def __post_init__(self):
        h = np.array(self.h, dtype=float).reshape(-1)
        if not np.all(np.isfinite(h)):
            raise ParameterError("bias vector h must be finite")
        h.setflags(write=False)
        object.__setattr__(self, "h", h)
        xi, j = float(self.xi), float(self.j)
        if not np.isfinite(xi) or xi <= 0:
            raise ParameterError(f"xi must be > 0, got {xi}")
        if not np.isfinite(j) or j < 0:
            raise ParameterError(f"j must be >= 0, got {j}")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "j", j)

    @property
    def n(self) -> int:
        return len(self.h)

    def replace(self, **changes) -> "GgmParams":
        values = {"h": self.h, "xi": self.xi, "j": self.j}
        values.update(changes)
        return GgmParams(**values)

    def check_graph(self, g: Graph) -> None:
        if len(self.h) != g.n:
            raise InputError(f"bias vector has {len(self.h)} entries but graph has {g.n} vertices")


@dataclass(frozen=True, eq=False)
class Observation:
    """Full-length value vector plus the sorted set of missing vertices.

    Entries of ``values`` at missing vertices carry no information.
    """

    values: np.ndarray
    missing: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float).reshape(-1)
        missing = np.unique(np.asarray(self.missing, dtype=np.int64).reshape(-1))
        n = len(values)
        if missing.size and (missing[0] < 0 or missing[-1] >= n):
            raise InputError(f"missing index outside 0..{n - 1}")
        observed_mask = np.ones(n, dtype=bool)
        observed_mask[missing] = False
        if not np.all(np.isfinite(values[observed_mask])):
            raise InputError("observed values must be finite")
        values.setflags(write=False)
        missing.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "missing", missing)

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def missing_mask(self) -> np.ndarray:
        mask = np.zeros(self.n, dtype=bool)
        mask[self.missing] = True
        return mask

    @property
    def observed(self) -> np.ndarray:
        return np.flatnonzero(~self.missing_mask)

    @property
    def y(self) -> np.ndarray:
        return self.values[self.observed]


class Factor:
    """Factorization of a symmetric positive-definite matrix.

    Dense Cholesky for dense inputs, small sparse inputs and sparse inputs
    with fill above ``DENSE_FILL``; otherwise sparse LU with a symmetric
    ordering and no pivoting.
    """

    def __init__(self, q: Matrix, overwrite: bool = False):
        self.n = q.shape[0]
        self.dense = (not sp.issparse(q) or self.n <= DENSE_LIMIT
                      or q.nnz > DENSE_FILL * self.n * self.n)
        try:
            if self.dense:
                qd = q.toarray() if sp.issparse(q) else np.asarray(q, dtype=float)
                own = overwrite or qd is not q
                # symmetric: the transpose of a C-ordered array is the Fortran layout LAPACK wants
                if qd.flags.c_contiguous and not qd.flags.f_contiguous:
                    qd = qd.T
                self._chol, _ = sla.cho_factor(qd, lower=True, check_finite=False, overwrite_a=own)
            else:
                self._lu = spla.splu(sp.csc_matrix(q), permc_spec="MMD_AT_PLUS_A",
                                     diag_pivot_thresh=0.0, options={"SymmetricMode": True})
        except (np.linalg.LinAlgError, RuntimeError) as exc:
            raise NumericalError(f"precision matrix is not positive definite: {exc}") from exc

    def solve(self, b: np.ndarray) -> np.ndarray:
        b = np.asarray(b, dtype=float)
        if self.dense:
            return sla.cho_solve((self._chol, True), b, check_finite=False)
        return self._lu.solve(b)

    def logdet(self) -> float:
        if self.dense:
            return 2.0 * float(np.sum(np.log(np.diag(self._chol))))
        return float(np.sum(np.log(np.abs(self._lu.U.diagonal()))))

    def inverse(self) -> np.ndarray:
        return self.solve(np.eye(self.n))

    def whiten_inverse(self, z: np.ndarray) -> np.ndarray:
        """Map standard normals ``z`` (columns) to draws with covariance ``Q^{-1}``.

        Only available on the dense path: solves ``L^T x = z``.
        """
        if not self.dense:
            raise NotImplementedError("whitening needs the dense Cholesky factor")
        return sla.solve_triangular(self._chol, z, lower=True, trans="T", check_finite=False)


@dataclass(frozen=True, eq=False)
class GaussianMoments:
    mean: np.ndarray
    factor: Factor = field(repr=False)

    def cov(self, i: int, j: int) -> float:
        e = np.zeros(self.factor.n)
        e[j] = 1.0
        return float(self.factor.solve(e)[i])

    def covariance(self) -> np.ndarray:
        return self.factor.inverse()

    def variance(self) -> np.ndarray:
        return np.diag(self.covariance()).copy()


def precision_matrix(g: Graph, p: GgmParams) -> sp.csr_matrix:
    """``xi * I + J * L`` as a sparse symmetric matrix."""
    p.check_graph(g)
    q = sp.identity(g.n, format="csr") * p.xi
    if p.j != 0.0 and g.num_edges:
        q = q + p.j * g.laplacian()
    return sp.csr_matrix(q)


def _resolve_precision(g: Graph, p: GgmParams, precision: Matrix | None) -> Matrix:
    if precision is None:
        return precision_matrix(g, p)
    if precision.shape != (g.n, g.n):
        raise InputError("precomputed precision has the wrong shape")
    return precision


def exact_moments(g: Graph, p: GgmParams, precision: Matrix | None = None) -> GaussianMoments:
    q = _resolve_precision(g, p, precision)
    factor = Factor(q)
    return GaussianMoments(mean=factor.solve(p.h), factor=factor)


def conditional_params(g: Graph, p: GgmParams, obs: Observation,
                       precision: Matrix | None = None) -> tuple[Matrix, np.ndarray]:
    """Precision and bias of the missing block given the observed values.

    Returns ``(Q_MM, h_M - Q_MO y)``; the second term equals
    ``h_i + J * sum(y_j for observed neighbours j)``.
    """
    if obs.n != g.n:
        raise InputError(f"observation has {obs.n} entries but graph has {g.n} vertices")
    m = obs.missing
    if m.size == 0:
        raise DegenerateInputError("no missing vertices: nothing to reconstruct")
    q = _resolve_precision(g, p, precision)
    # y with zeros on M, so Q[M, :] @ y_zero equals Q_MO y_O
    y_zero = np.where(obs.missing_mask, 0.0, obs.values)
    if sp.issparse(q):
        rows = sp.csr_matrix(q)[m]
        q_mm = rows[:, m]
    else:
        rows = np.take(q, m, axis=0)
        q_mm = np.take(rows, m, axis=1)
    bias = p.h[m] - rows @ y_zero
    return q_mm, np.asarray(bias, dtype=float)


def sample(g: Graph, p: GgmParams, count: int, seed=None,
           moments: GaussianMoments | None = None) -> np.ndarray:
    """Draw ``count`` exact samples; rows are samples.

    Dense path: ``mu + L^{-T} z`` from the Cholesky factor of the precision.
    Sparse path: ``mu + Q^{-1}(sqrt(xi) z1 + sqrt(J) B^T z2)``, which has
    covariance ``Q^{-1}`` because ``Q = xi I + J B^T B``.
    """
    if count < 1:
        raise InputError("sample count must be >= 1")
    rng = np.random.default_rng(seed)
    if moments is None:
        moments = exact_moments(g, p)
    f = moments.factor
    if f.dense:
        z = rng.standard_normal((g.n, count))
        draws = f.whiten_inverse(z)
    else:
        z1 = rng.standard_normal((g.n, count))
        rhs = np.sqrt(p.xi) * z1
        if p.j > 0 and g.num_edges:
            z2 = rng.standard_normal((g.num_edges, count))
            rhs = rhs + np.sqrt(p.j) * (g.incidence().T @ z2)
        draws = f.solve(rhs)
    return (draws + moments.mean[:, None]).T

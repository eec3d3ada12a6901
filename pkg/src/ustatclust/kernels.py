"""Pairwise kernel evaluation and the shared kernel matrix.

Every statistic downstream is a weighted sum of pairwise kernel values
``phi(x_i, x_j)``, so the full symmetric matrix is computed once per dataset
and shared read-only.  Kernels are coordinate-decomposable: the value for a
pair of L-dimensional vectors is the average of a scalar kernel applied
coordinate by coordinate.  The default scalar kernel is the squared
difference, giving the squared Euclidean distance divided by L.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionError, DomainError, TooSmallError, ValidationError

AVERAGED_SQUARED_EUCLIDEAN = "averaged-squared-euclidean"
AVERAGED_ABSOLUTE = "averaged-absolute"

# name -> coordinate kernel acting elementwise on two equal-shape arrays
_REGISTRY: dict[str, Callable[[np.ndarray, np.ndarray], np.ndarray]] = {
    AVERAGED_SQUARED_EUCLIDEAN: lambda a, b: (a - b) ** 2,
    AVERAGED_ABSOLUTE: lambda a, b: np.abs(a - b),
}


def register_kernel(name: str, phi_star: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> None:
    """Register a user coordinate kernel under ``name``.

    ``phi_star`` must be symmetric in its arguments and must support NumPy
    broadcasting: it is called with array arguments that broadcast against
    each other and must return the broadcast elementwise result.  Symmetry is
    spot-checked on a few random scalars.
    """
    if name in _REGISTRY:
        raise ValidationError(f"kernel name already registered: {name!r}")
    probe = np.random.default_rng(0).normal(size=(4, 2))
    for a, b in probe:
        fwd = float(np.asarray(phi_star(np.array([a]), np.array([b])))[0])
        rev = float(np.asarray(phi_star(np.array([b]), np.array([a])))[0])
        if fwd != rev:
            raise ValidationError(f"kernel {name!r} is not symmetric: phi*({a},{b}) != phi*({b},{a})")
    _REGISTRY[name] = phi_star


@dataclass(frozen=True)
class KernelSpec:
    """Selects the coordinate kernel used to compare two samples.

    ``kind`` is one of the built-in names or a name previously passed to
    :func:`register_kernel`.
    """

    kind: str = AVERAGED_SQUARED_EUCLIDEAN

    def __post_init__(self) -> None:
        if self.kind not in _REGISTRY:
            raise ValidationError(f"unknown kernel kind: {self.kind!r}")

    @property
    def phi_star(self) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
        return _REGISTRY[self.kind]


@dataclass(frozen=True)
class DataMatrix:
    """n samples (rows) by L features (columns) of finite real values."""

    values: np.ndarray
    row_labels: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise DimensionError(f"data must be 2-D, got shape {values.shape}")
        n, length = values.shape
        if n < 2:
            raise TooSmallError(f"need at least 2 samples, got {n}")
        if length < 1:
            raise DimensionError("need at least 1 feature")
        if not np.isfinite(values).all():
            i, j = np.argwhere(~np.isfinite(values))[0]
            raise DomainError(f"non-finite value at row {i}, column {j}")
        labels = list(self.row_labels) if self.row_labels else [f"s{i}" for i in range(n)]
        if len(labels) != n:
            raise DimensionError(f"{len(labels)} labels for {n} rows")
        if len(set(labels)) != n:
            raise ValidationError("row labels are not unique")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "row_labels", labels)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class KernelMatrix:
    """Symmetric matrix of pairwise kernel values with a zero diagonal.

    ``n_features`` records the feature dimension of the data the matrix was
    built from, when known; it is only used to warn about small dimensions.
    """

    phi: np.ndarray
    n_features: int | None = None

    def __post_init__(self) -> None:
        phi = np.ascontiguousarray(self.phi, dtype=np.float64)
        if phi.ndim != 2 or phi.shape[0] != phi.shape[1]:
            raise DimensionError(f"kernel matrix must be square, got shape {phi.shape}")
        if not np.isfinite(phi).all():
            raise DomainError("kernel matrix contains non-finite entries")
        if np.any(phi != phi.T):
            raise ValidationError("kernel matrix is not symmetric")
        if np.any(np.diag(phi) != 0.0):
            raise ValidationError("kernel matrix diagonal must be zero")
        object.__setattr__(self, "phi", phi)

    @property
    def n(self) -> int:
        return self.phi.shape[0]

    def submatrix(self, indices: Sequence[int]) -> "KernelMatrix":
        """Kernel matrix restricted to a subset of samples (order preserved)."""
        ix = np.asarray(indices, dtype=np.intp)
        return KernelMatrix(self.phi[np.ix_(ix, ix)], n_features=self.n_features)

    def pair_total(self) -> float:
        """Sum of kernel values over all unordered pairs."""
        return 0.5 * float(self.phi.sum())


def evaluate_kernel(spec: KernelSpec, x: Sequence[float], y: Sequence[float]) -> float:
    """Average of the coordinate kernel over the L coordinates of ``x`` and ``y``.

    Raises
    ------
    DimensionError
        If the vectors differ in length or are empty.
    DomainError
        If either vector contains a non-finite value.
    """
    xv = np.asarray(x, dtype=np.float64).ravel()
    yv = np.asarray(y, dtype=np.float64).ravel()
    if xv.shape != yv.shape:
        raise DimensionError(f"length mismatch: {xv.shape[0]} vs {yv.shape[0]}")
    if xv.size == 0:
        raise DimensionError("vectors must have at least one coordinate")
    if not (np.isfinite(xv).all() and np.isfinite(yv).all()):
        raise DomainError("non-finite input to kernel evaluation")
    return float(np.mean(spec.phi_star(xv, yv)))


def build_kernel_matrix(data: DataMatrix, spec: KernelSpec | None = None) -> KernelMatrix:
    """Evaluate the kernel on every pair of rows of ``data``.

    The matrix is exactly symmetric by construction (each pair is evaluated
    once and mirrored) and the diagonal is zero by convention; no statistic
    ever reads self-pairs.
    """
    if spec is None:
        spec = KernelSpec()
    values = data.values
    n = values.shape[0]
    phi_star = spec.phi_star
    phi = np.zeros((n, n), dtype=np.float64)
    for i in range(n - 1):
        row = phi_star(values[i + 1 :], values[i]).mean(axis=1)
        phi[i, i + 1 :] = row
        phi[i + 1 :, i] = row
    return KernelMatrix(phi, n_features=data.n_features)

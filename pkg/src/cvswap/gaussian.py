"""Covariance-matrix representation of zero-mean multimode Gaussian states.

Quadratures are interleaved as (x1, p1, x2, p2, ...) with x = a + a^dagger,
so the vacuum covariance is the identity (shot-noise units).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

SYMMETRY_TOL = 1e-12
PHYSICAL_TOL = 1e-9

OMEGA_1 = np.array([[0.0, 1.0], [-1.0, 0.0]])


class UnphysicalStateError(ValueError):
    """Raised when a covariance matrix violates the uncertainty relation."""


def symplectic_form(n: int) -> np.ndarray:
    """Block-diagonal symplectic form for ``n`` modes."""
    if n < 1:
        raise ValueError("symplectic form needs at least one mode")
    return np.kron(np.eye(n), OMEGA_1)


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class GaussianState:
    """Zero-mean Gaussian state given by its 2N x 2N covariance matrix."""

    cov: np.ndarray

    def __post_init__(self):
        cov = np.asarray(self.cov, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
            raise ValueError(f"covariance must be 2N x 2N, got shape {cov.shape}")
        if cov.shape[0] == 0:
            raise ValueError("covariance must describe at least one mode")
        scale = max(1.0, float(np.abs(cov).max()))
        if np.abs(cov - cov.T).max() > SYMMETRY_TOL * scale:
            raise ValueError("covariance matrix is not symmetric")
        object.__setattr__(self, "cov", _freeze(cov))

    @property
    def n_modes(self) -> int:
        return self.cov.shape[0] // 2

    def to_dict(self) -> dict:
        return {"n_modes": self.n_modes, "cov": self.cov.tolist()}

    @classmethod
    def from_dict(cls, data: dict, symmetry_tol: float = 1e-6) -> "GaussianState":
        """Parse the shared ``{"n_modes": N, "cov": [[...]]}`` format.

        Small asymmetries (below ``symmetry_tol``) are averaged away, which is
        what file-borne experimental matrices need.
        """
        try:
            n = int(data["n_modes"])
            cov = np.array(data["cov"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed covariance record: {exc}") from exc
        if cov.shape != (2 * n, 2 * n):
            raise ValueError(f"cov has shape {cov.shape}, expected {(2 * n, 2 * n)} for n_modes={n}")
        asym = np.abs(cov - cov.T).max()
        if asym > symmetry_tol:
            raise ValueError(f"covariance asymmetry {asym:.3g} exceeds {symmetry_tol:g}")
        return cls(0.5 * (cov + cov.T))


@dataclass(frozen=True)
class SqueezerSpec:
    """Single-mode squeezed vacuum with squeezed variance ``v_sq`` and
    anti-squeezed variance ``v_anti``; impure whenever their product exceeds 1."""

    v_sq: float
    v_anti: float
    squeezed_quadrature: str = "amplitude"

    def __post_init__(self):
        if self.squeezed_quadrature not in ("amplitude", "phase"):
            raise ValueError(f"squeezed_quadrature must be 'amplitude' or 'phase', got {self.squeezed_quadrature!r}")
        if not (self.v_sq > 0 and self.v_anti > 0):
            raise ValueError("squeezer variances must be positive")
        if self.v_sq > self.v_anti:
            raise ValueError("squeezed variance exceeds anti-squeezed variance")
        if self.v_sq * self.v_anti < 1 - PHYSICAL_TOL:
            raise UnphysicalStateError(
                f"V*V' = {self.v_sq * self.v_anti:.6g} < 1 violates the uncertainty relation"
            )

    @classmethod
    def pure(cls, r: float, squeezed_quadrature: str = "amplitude") -> "SqueezerSpec":
        return cls(float(np.exp(-2 * r)), float(np.exp(2 * r)), squeezed_quadrature)

    @classmethod
    def from_db(cls, squeezing_db: float, anti_squeezing_db: float,
                squeezed_quadrature: str = "amplitude") -> "SqueezerSpec":
        """Squeezing levels in dB relative to shot noise; the sign is ignored."""
        return cls(10 ** (-abs(squeezing_db) / 10), 10 ** (abs(anti_squeezing_db) / 10),
                   squeezed_quadrature)

    def with_quadrature(self, squeezed_quadrature: str) -> "SqueezerSpec":
        return SqueezerSpec(self.v_sq, self.v_anti, squeezed_quadrature)

    @property
    def variances(self) -> tuple[float, float]:
        """(var x, var p) of the squeezed vacuum."""
        if self.squeezed_quadrature == "amplitude":
            return (self.v_sq, self.v_anti)
        return (self.v_anti, self.v_sq)


@dataclass(frozen=True)
class SymplecticOp:
    """Linear quadrature map acting on ``target_modes`` of a larger state."""

    matrix: np.ndarray
    target_modes: tuple[int, ...] = field(default=())

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        modes = tuple(int(k) for k in self.target_modes) or tuple(range(m.shape[0] // 2))
        if m.shape != (2 * len(modes), 2 * len(modes)):
            raise ValueError(f"matrix shape {m.shape} does not match {len(modes)} target modes")
        object.__setattr__(self, "matrix", _freeze(m))
        object.__setattr__(self, "target_modes", modes)

    def on(self, *modes: int) -> "SymplecticOp":
        """Same matrix retargeted to other modes."""
        return SymplecticOp(self.matrix, modes)

    def embed(self, n: int) -> np.ndarray:
        """Full 2n x 2n matrix acting as identity outside the target modes."""
        _check_modes(self.target_modes, n)
        full = np.eye(2 * n)
        idx = _quad_indices(self.target_modes)
        full[np.ix_(idx, idx)] = self.matrix
        return full

    def symplectic_defect(self) -> float:
        om = symplectic_form(len(self.target_modes))
        return float(np.abs(self.matrix @ om @ self.matrix.T - om).max())


def _quad_indices(modes: Sequence[int]) -> list[int]:
    return [2 * k + q for k in modes for q in (0, 1)]


def _check_modes(modes: Sequence[int], n: int) -> None:
    if len(set(modes)) != len(modes):
        raise ValueError(f"duplicate target modes {tuple(modes)}")
    for k in modes:
        if not 0 <= k < n:
            raise ValueError(f"mode index {k} out of range for {n}-mode state")


def compose(ops: Sequence[SymplecticOp], n: int) -> SymplecticOp:
    """Product of ``ops`` applied left to right, as one op on all ``n`` modes."""
    total = np.eye(2 * n)
    for op in ops:
        total = op.embed(n) @ total
    return SymplecticOp(total, tuple(range(n)))


def vacuum_state(n: int) -> GaussianState:
    if n < 1:
        raise ValueError("vacuum_state needs n >= 1")
    return GaussianState(np.eye(2 * n))


def squeezed_vacuum(spec: SqueezerSpec) -> GaussianState:
    return GaussianState(np.diag(spec.variances))


def tensor(a: GaussianState, b: GaussianState) -> GaussianState:
    na, nb = a.cov.shape[0], b.cov.shape[0]
    cov = np.zeros((na + nb, na + nb))
    cov[:na, :na] = a.cov
    cov[na:, na:] = b.cov
    return GaussianState(cov)


def tensor_all(*states: GaussianState) -> GaussianState:
    out = states[0]
    for s in states[1:]:
        out = tensor(out, s)
    return out


def beam_splitter_op(T: float, modes: tuple[int, int] = (0, 1)) -> SymplecticOp:
    """Beam splitter with transmissivity ``T`` between ``modes = (k, l)``.

    Mode-mixing matrix [[sqrt(1-T), sqrt(T)], [sqrt(T), -sqrt(1-T)]], applied
    identically to both quadratures.
    """
    if not 0.0 <= T <= 1.0:
        raise ValueError(f"transmissivity must lie in [0, 1], got {T}")
    t, r = np.sqrt(T), np.sqrt(1.0 - T)
    mix = np.array([[r, t], [t, -r]])
    return SymplecticOp(np.kron(mix, np.eye(2)), tuple(modes))


_ROTATIONS = {
    # (x, p) -> (-p, x), the quarter-turn e^{i pi/2}
    "fourier": np.array([[0.0, -1.0], [1.0, 0.0]]),
    "pi_rotation": -np.eye(2),
}


def rotation_op(kind: str, mode: int = 0) -> SymplecticOp:
    try:
        return SymplecticOp(_ROTATIONS[kind], (mode,))
    except KeyError:
        raise ValueError(f"unknown rotation {kind!r}; expected one of {sorted(_ROTATIONS)}") from None


def apply(op: SymplecticOp, state: GaussianState) -> GaussianState:
    """Transform ``state`` as cov -> S cov S^T on the op's target modes."""
    s = op.embed(state.n_modes)
    cov = s @ state.cov @ s.T
    return GaussianState(0.5 * (cov + cov.T))


def combination_variance(state: GaussianState, coeffs) -> float:
    """Variance of the quadrature combination ``sum_i coeffs[i] * R_i``."""
    c = np.asarray(coeffs, dtype=float)
    if c.shape != (state.cov.shape[0],):
        raise ValueError(f"expected {state.cov.shape[0]} coefficients, got shape {c.shape}")
    if not np.any(c):
        raise ValueError("combination coefficients are all zero")
    return float(c @ state.cov @ c)


def quadrature_vector(n_modes: int, terms) -> np.ndarray:
    """Coefficient vector from ``(mode, "x"|"p", weight)`` triples."""
    c = np.zeros(2 * n_modes)
    for mode, quad, weight in terms:
        if quad not in ("x", "p"):
            raise ValueError(f"quadrature must be 'x' or 'p', got {quad!r}")
        c[2 * mode + (quad == "p")] += weight
    return c


def symplectic_eigenvalues(m) -> np.ndarray:
    """Symplectic spectrum of a symmetric 2N x 2N matrix, ascending.

    Taken from the moduli of the eigenvalues of i*Omega*m, which come in
    +- pairs.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
        raise ValueError(f"expected a 2N x 2N matrix, got shape {m.shape}")
    scale = max(1.0, float(np.abs(m).max()))
    if np.abs(m - m.T).max() > SYMMETRY_TOL * scale:
        raise ValueError("symplectic_eigenvalues needs a symmetric matrix")
    n = m.shape[0] // 2
    ev = np.sort(np.abs(np.linalg.eigvals(1j * symplectic_form(n) @ m)))
    return 0.5 * (ev[0::2] + ev[1::2])


def is_physical(state: GaussianState) -> bool:
    return bool(symplectic_eigenvalues(state.cov)[0] >= 1 - PHYSICAL_TOL)


def require_physical(state: GaussianState) -> GaussianState:
    nu = symplectic_eigenvalues(state.cov)[0]
    if nu < 1 - PHYSICAL_TOL:
        raise UnphysicalStateError(f"smallest symplectic eigenvalue {nu:.6g} < 1")
    return state


@dataclass(frozen=True)
class TransferMatrix:
    """Heisenberg-picture map from independent input quadratures to outputs.

    Inputs are uncorrelated with the given variances, so the output
    covariance is ``M diag(input_variances) M^T``.
    """

    matrix: np.ndarray
    input_variances: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        v = np.asarray(self.input_variances, dtype=float)
        if m.ndim != 2 or v.shape != (m.shape[1],):
            raise ValueError(f"transfer matrix {m.shape} incompatible with {v.shape} input variances")
        if m.shape[0] % 2:
            raise ValueError("transfer matrix must have an even number of output rows")
        object.__setattr__(self, "matrix", _freeze(m))
        object.__setattr__(self, "input_variances", _freeze(v))

    @property
    def n_out(self) -> int:
        return self.matrix.shape[0] // 2

    def output_state(self) -> GaussianState:
        cov = (self.matrix * self.input_variances) @ self.matrix.T
        return GaussianState(0.5 * (cov + cov.T))


def monte_carlo_variance(transfer: TransferMatrix, coeffs, n_samples: int = 100_000,
                         seed: int | None = 0) -> tuple[float, float]:
    """Sampled variance of an output combination and its standard error.

    Draws independent zero-mean Gaussian inputs with the transfer map's
    variances and pushes each sample through the map.
    """
    if n_samples < 10_000:
        raise ValueError("monte_carlo_variance needs at least 1e4 samples")
    v = transfer.input_variances
    if np.any(v <= 0) or not np.all(np.isfinite(v)):
        raise ValueError("input variances must be positive and finite")
    c = np.asarray(coeffs, dtype=float)
    if c.shape != (transfer.matrix.shape[0],):
        raise ValueError(f"expected {transfer.matrix.shape[0]} coefficients, got shape {c.shape}")
    rng = np.random.default_rng(seed)
    inputs = rng.standard_normal((n_samples, v.size)) * np.sqrt(v)
    y = inputs @ (c @ transfer.matrix)
    sq = y * y
    return float(sq.mean()), float(sq.std(ddof=1) / np.sqrt(n_samples))

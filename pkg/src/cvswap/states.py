"""Resource states: tripartite GHZ states A and B and the two-mode EPR state."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gaussian import (
    GaussianState,
    SqueezerSpec,
    SymplecticOp,
    apply,
    beam_splitter_op,
    combination_variance,
    compose,
    quadrature_vector,
    rotation_op,
    squeezed_vacuum,
    tensor_all,
)

# experimental squeezing (-5.90 dB) and anti-squeezing (9.84 dB)
DEFAULT_V = 0.26
DEFAULT_V_ANTI = 9.64

QUADRATURE_PATTERNS = {
    "ghz_a": ("amplitude", "phase", "amplitude"),
    "ghz_b": ("phase", "phase", "amplitude"),
    "epr": ("phase", "amplitude"),
}
DEFAULT_TRANSMISSIVITIES = {"ghz_a": (1 / 3, 1 / 2), "ghz_b": (1 / 3, 1 / 2), "epr": (1 / 2,)}


@dataclass(frozen=True)
class NetworkRecipe:
    variant: str
    squeezers: tuple[SqueezerSpec, ...]
    transmissivities: tuple[float, ...]

    def __post_init__(self):
        if self.variant not in QUADRATURE_PATTERNS:
            raise ValueError(f"unknown network variant {self.variant!r}")
        pattern = QUADRATURE_PATTERNS[self.variant]
        if len(self.squeezers) != len(pattern):
            raise ValueError(f"{self.variant} needs {len(pattern)} squeezers, got {len(self.squeezers)}")
        got = tuple(s.squeezed_quadrature for s in self.squeezers)
        if got != pattern:
            raise ValueError(f"{self.variant} needs squeezed quadratures {pattern}, got {got}")
        if len(self.transmissivities) != len(DEFAULT_TRANSMISSIVITIES[self.variant]):
            raise ValueError(f"wrong number of transmissivities for {self.variant}")

    @classmethod
    def default(cls, variant: str, squeezer: SqueezerSpec | None = None) -> "NetworkRecipe":
        """Recipe with identical squeezers oriented per the variant's pattern."""
        if squeezer is None:
            squeezer = SqueezerSpec(DEFAULT_V, DEFAULT_V_ANTI)
        try:
            pattern = QUADRATURE_PATTERNS[variant]
        except KeyError:
            raise ValueError(f"unknown network variant {variant!r}") from None
        return cls(variant, tuple(squeezer.with_quadrature(q) for q in pattern),
                   DEFAULT_TRANSMISSIVITIES[variant])

    def input_state(self) -> GaussianState:
        return tensor_all(*(squeezed_vacuum(s) for s in self.squeezers))

    def operations(self) -> list[SymplecticOp]:
        """Network factors in the order they act on the squeezed inputs."""
        if self.variant == "epr":
            return [beam_splitter_op(self.transmissivities[0], (0, 1))]
        t1, t2 = self.transmissivities
        ops = [beam_splitter_op(t1, (0, 1)), rotation_op("pi_rotation", 1), beam_splitter_op(t2, (1, 2))]
        if self.variant == "ghz_b":
            ops.insert(0, rotation_op("fourier", 0))
        return ops

    def network(self) -> SymplecticOp:
        return compose(self.operations(), len(self.squeezers))


def _build(recipe: NetworkRecipe) -> GaussianState:
    state = recipe.input_state()
    for op in recipe.operations():
        state = apply(op, state)
    return state


def build_ghz(recipe: NetworkRecipe) -> GaussianState:
    if recipe.variant not in ("ghz_a", "ghz_b"):
        raise ValueError(f"build_ghz needs a GHZ recipe, got {recipe.variant!r}")
    return _build(recipe)


def build_epr(recipe: NetworkRecipe) -> GaussianState:
    if recipe.variant != "epr":
        raise ValueError(f"build_epr needs an EPR recipe, got {recipe.variant!r}")
    return _build(recipe)


_S = np.sqrt
NETWORK_UNITARIES = {
    "ghz_a": np.array([
        [_S(2 / 3), _S(1 / 3), 0],
        [-_S(1 / 6), _S(1 / 3), _S(1 / 2)],
        [-_S(1 / 6), _S(1 / 3), -_S(1 / 2)],
    ], dtype=complex),
    "ghz_b": np.array([
        [1j * _S(2 / 3), _S(1 / 3), 0],
        [-1j * _S(1 / 6), _S(1 / 3), _S(1 / 2)],
        [-1j * _S(1 / 6), _S(1 / 3), -_S(1 / 2)],
    ], dtype=complex),
}


def unitary_to_symplectic(u: np.ndarray) -> np.ndarray:
    """Real (x, p)-interleaved form of a passive mode transformation.

    With a = (x + ip)/2, an output A_i = sum_j u_ij a_j has
    x_i = sum_j Re(u_ij) x_j - Im(u_ij) p_j and p_i = sum_j Im(u_ij) x_j + Re(u_ij) p_j.
    """
    u = np.asarray(u, dtype=complex)
    n = u.shape[0]
    s = np.zeros((2 * n, 2 * n))
    for i in range(n):
        for j in range(n):
            re, im = u[i, j].real, u[i, j].imag
            s[2 * i:2 * i + 2, 2 * j:2 * j + 2] = [[re, -im], [im, re]]
    return s


def network_matrix(variant: str, tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Literal network unitary and its 6x6 symplectic form.

    Raises if the beam-splitter/rotation decomposition used by the builders
    disagrees with the literal matrix.
    """
    if variant not in NETWORK_UNITARIES:
        raise ValueError(f"network_matrix needs 'ghz_a' or 'ghz_b', got {variant!r}")
    u = NETWORK_UNITARIES[variant]
    s = unitary_to_symplectic(u)
    decomposed = NetworkRecipe.default(variant).network().matrix
    err = np.abs(decomposed - s).max()
    if err > tol:
        raise AssertionError(f"decomposition of {variant} deviates from U by {err:.3g}")
    return u.copy(), s


def correlation_report(state: GaussianState, kind: str) -> dict[str, float]:
    """Named correlation variances of a GHZ (``ghz3``) or ``epr`` state."""
    n = state.n_modes
    if kind == "ghz3":
        if n != 3:
            raise ValueError(f"ghz3 report needs 3 modes, got {n}")
        combos = {
            "x1-x2": [(0, "x", 1), (1, "x", -1)],
            "x2-x3": [(1, "x", 1), (2, "x", -1)],
            "x1-x3": [(0, "x", 1), (2, "x", -1)],
            "p1+p2+p3": [(0, "p", 1), (1, "p", 1), (2, "p", 1)],
        }
    elif kind == "epr":
        if n != 2:
            raise ValueError(f"epr report needs 2 modes, got {n}")
        combos = {"x1-x2": [(0, "x", 1), (1, "x", -1)], "p1+p2": [(0, "p", 1), (1, "p", 1)]}
    else:
        raise ValueError(f"unknown report kind {kind!r}")
    return {name: combination_variance(state, quadrature_vector(n, terms)) for name, terms in combos.items()}

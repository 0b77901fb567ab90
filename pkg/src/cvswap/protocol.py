"""Entanglement swapping by joint measurement and classical feedforward.

Two independent routes compute the output state:

* a Heisenberg-picture transfer map (``swap_ghz_ghz``, ``swap_ghz_epr``,
  ``swap_transfer``), where measuring and feeding forward is linear addition
  of photocurrents;
* ``conditional_swap_oracle``, which conditions the Gaussian state on the
  homodyne outcomes and averages the displaced conditional states.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gaussian import (
    PHYSICAL_TOL,
    GaussianState,
    TransferMatrix,
    UnphysicalStateError,
    apply,
    beam_splitter_op,
    require_physical,
    tensor,
    tensor_all,
    vacuum_state,
)
from .states import NetworkRecipe

SQRT2 = np.sqrt(2.0)

# photocurrent -> (output mode, quadrature) it displaces, output modes 0-based
GHZ_GHZ_TARGETS = {"x_v": ((2, "x"), (3, "x")), "p_mu": ((2, "p"),)}
GHZ_EPR_TARGETS = {"x_v": ((0, "x"),), "p_mu": ((0, "p"),)}

# input modes kept, in output order: C1=A3, C2=A2, C3=B2, C4=B3 and D1=E2, D2=A2, D3=A3
GHZ_GHZ_KEPT = (2, 1, 4, 5)
GHZ_EPR_KEPT = (4, 1, 2)


@dataclass(frozen=True)
class ChannelSpec:
    eta: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"channel efficiency must lie in [0, 1], got {self.eta}")


@dataclass(frozen=True)
class FeedforwardSpec:
    gain: float
    targets: dict = field(default_factory=lambda: dict(GHZ_GHZ_TARGETS))

    def __post_init__(self):
        if not np.isfinite(self.gain) or self.gain < 0:
            raise ValueError(f"feedforward gain must be finite and >= 0, got {self.gain}")
        unknown = set(self.targets) - {"x_v", "p_mu"}
        if unknown:
            raise ValueError(f"unknown photocurrents {sorted(unknown)}")

    @property
    def coefficient(self) -> float:
        return SQRT2 * self.gain


def optimal_classical_gain(v: float, v_anti: float) -> float:
    """Classical-channel gain (V' - V)/(V' + V) that minimises the swap noise."""
    _check_squeezing(v, v_anti)
    return (v_anti - v) / (v_anti + v)


def _check_squeezing(v, v_anti):
    if v <= 0 or v_anti <= 0 or v * v_anti < 1 - PHYSICAL_TOL:
        raise UnphysicalStateError(f"(V, V') = ({v}, {v_anti}) violates V*V' >= 1")


def lossy_channel(state: GaussianState, mode: int, spec: ChannelSpec) -> GaussianState:
    """Mix ``mode`` with vacuum at efficiency eta."""
    n = state.n_modes
    if not 0 <= mode < n:
        raise ValueError(f"mode {mode} out of range for {n}-mode state")
    scale = np.ones(2 * n)
    scale[2 * mode:2 * mode + 2] = np.sqrt(spec.eta)
    cov = state.cov * np.outer(scale, scale)
    cov[2 * mode:2 * mode + 2, 2 * mode:2 * mode + 2] += (1.0 - spec.eta) * np.eye(2)
    return GaussianState(cov)


def joint_measurement_map(modes: tuple[int, int], n_modes: int) -> tuple[np.ndarray, np.ndarray]:
    """Coefficient vectors of the photocurrents x_v = (x_a - x_b)/sqrt2 and
    p_mu = (p_a + p_b)/sqrt2 after the 1:1 beam splitter."""
    a, b = modes
    if a == b:
        raise ValueError("joint measurement needs two distinct modes")
    for k in modes:
        if not 0 <= k < n_modes:
            raise ValueError(f"mode {k} out of range for {n_modes} modes")
    x_v = np.zeros(2 * n_modes)
    p_mu = np.zeros(2 * n_modes)
    x_v[2 * a], x_v[2 * b] = 1 / SQRT2, -1 / SQRT2
    p_mu[2 * a + 1], p_mu[2 * b + 1] = 1 / SQRT2, 1 / SQRT2
    return x_v, p_mu


def swap_map(n_in: int, measured: tuple[int, int], kept, ff: FeedforwardSpec) -> np.ndarray:
    """Rows of output quadratures in terms of input quadratures."""
    x_v, p_mu = joint_measurement_map(measured, n_in)
    currents = {"x_v": x_v, "p_mu": p_mu}
    m = np.zeros((2 * len(kept), 2 * n_in))
    for out, k in enumerate(kept):
        m[2 * out, 2 * k] = 1.0
        m[2 * out + 1, 2 * k + 1] = 1.0
    for name, targets in ff.targets.items():
        for out, quad in targets:
            m[2 * out + (quad == "p")] += ff.coefficient * currents[name]
    return m


def loss_map(n_in: int, mode: int, eta: float) -> np.ndarray:
    """(n_in + 1)-mode input -> n_in-mode map; the last input mode is the loss vacuum."""
    ChannelSpec(eta)
    m = np.zeros((2 * n_in, 2 * n_in + 2))
    m[:, :2 * n_in] = np.eye(2 * n_in)
    m[2 * mode:2 * mode + 2, 2 * mode:2 * mode + 2] *= np.sqrt(eta)
    m[2 * mode:2 * mode + 2, 2 * n_in:] = np.sqrt(1.0 - eta) * np.eye(2)
    return m


def ghz_ghz_map(gain: float) -> np.ndarray:
    """8 x 12 map from (A1, A2, A3, B1, B2, B3) to (C1, C2, C3, C4)."""
    return swap_map(6, (0, 3), GHZ_GHZ_KEPT, FeedforwardSpec(gain, GHZ_GHZ_TARGETS))


def ghz_epr_map(gain: float, eta: float) -> np.ndarray:
    """6 x 12 map from (A1, A2, A3, E1, E2, loss vacuum) to (D1, D2, D3)."""
    p = swap_map(5, (0, 3), GHZ_EPR_KEPT, FeedforwardSpec(gain, GHZ_EPR_TARGETS))
    return p @ loss_map(5, 0, eta)


def _push(m: np.ndarray, state: GaussianState) -> GaussianState:
    cov = m @ state.cov @ m.T
    return require_physical(GaussianState(0.5 * (cov + cov.T)))


def swap_ghz_ghz(state_a: GaussianState, state_b: GaussianState, gain: float) -> GaussianState:
    """Swap between two GHZ states; returns modes (C1, C2, C3, C4)."""
    if state_a.n_modes != 3 or state_b.n_modes != 3:
        raise ValueError("swap_ghz_ghz needs two 3-mode states")
    return _push(ghz_ghz_map(gain), tensor(state_a, state_b))


def swap_ghz_epr(state_a: GaussianState, state_e: GaussianState, gain: float,
                 channel: ChannelSpec = ChannelSpec()) -> GaussianState:
    """Swap between a GHZ state and an EPR pair, with loss on A1; returns (D1, D2, D3)."""
    if state_a.n_modes != 3 or state_e.n_modes != 2:
        raise ValueError("swap_ghz_epr needs a 3-mode and a 2-mode state")
    return _push(ghz_epr_map(gain, channel.eta), tensor_all(state_a, state_e, vacuum_state(1)))


def _block_diag(*blocks):
    size = sum(b.shape[0] for b in blocks)
    out = np.zeros((size, size))
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i:i + k, i:i + k] = b
        i += k
    return out


def swap_transfer(recipe_a: NetworkRecipe, recipe_b: NetworkRecipe, gain: float,
                  channel: ChannelSpec | None = None) -> TransferMatrix:
    """Transfer map from the raw squeezer quadratures (and loss vacuum) to the
    swap output, for use with ``monte_carlo_variance``."""
    s_a = recipe_a.network().matrix
    s_b = recipe_b.network().matrix
    var = [np.diag(recipe_a.input_state().cov), np.diag(recipe_b.input_state().cov)]
    if recipe_b.variant == "epr":
        eta = 1.0 if channel is None else channel.eta
        matrix = ghz_epr_map(gain, eta) @ _block_diag(s_a, s_b, np.eye(2))
        var.append(np.ones(2))
    else:
        if channel is not None and channel.eta != 1.0:
            raise ValueError("the GHZ-GHZ protocol has no lossy channel")
        matrix = ghz_ghz_map(gain) @ _block_diag(s_a, s_b)
    return TransferMatrix(matrix, np.concatenate(var))


def conditional_swap_oracle(state_a: GaussianState, state_b: GaussianState, gain: float,
                            eta: float = 1.0) -> GaussianState:
    """Swap output computed by Gaussian conditioning on the homodyne outcomes.

    Mixes A1 with B1 (or E1), conditions the rest on p_mu and x_v with the
    projector pseudo-inverse, then averages over outcomes with the feedforward
    displacement applied.
    """
    n_a, n_b = state_a.n_modes, state_b.n_modes
    if n_a != 3 or n_b not in (2, 3):
        raise ValueError("oracle needs a 3-mode GHZ state and a 3-mode GHZ or 2-mode EPR state")
    joint = tensor(state_a, state_b)
    if n_b == 2:
        joint = lossy_channel(joint, 0, ChannelSpec(eta))
        kept, targets = (4, 1, 2), GHZ_EPR_TARGETS
    else:
        if eta != 1.0:
            raise ValueError("the GHZ-GHZ protocol has no lossy channel")
        kept, targets = (2, 1, 4, 5), GHZ_GHZ_TARGETS
    # mode 0 becomes mu = (A1+B1)/sqrt2, mode n_a becomes v = (A1-B1)/sqrt2
    joint = apply(beam_splitter_op(0.5, (0, n_a)), joint)

    meas = [0, 1, 2 * n_a, 2 * n_a + 1]
    rest = [2 * k + q for k in kept for q in (0, 1)]
    cov = joint.cov
    s_b = cov[np.ix_(meas, meas)]
    s_rb = cov[np.ix_(rest, meas)]
    s_r = cov[np.ix_(rest, rest)]
    proj = np.diag([0.0, 1.0, 1.0, 0.0])  # homodyne p on mu, x on v
    outcome_cov = proj @ s_b @ proj
    regress = s_rb @ np.linalg.pinv(outcome_cov)
    conditional = s_r - regress @ s_rb.T

    kick = np.zeros((len(rest), 4))
    column = {"p_mu": 1, "x_v": 2}
    for name, tlist in targets.items():
        for out, quad in tlist:
            kick[2 * out + (quad == "p"), column[name]] += SQRT2 * gain
    shift = regress + kick
    out = conditional + shift @ outcome_cov @ shift.T
    return GaussianState(0.5 * (out + out.T))


def theoretical_output_covariance(v: float, v_anti: float, gain: float, eta: float) -> np.ndarray:
    """Closed-form covariance of (D1, D2, D3) for the GHZ-EPR swap under loss."""
    _check_squeezing(v, v_anti)
    ChannelSpec(eta)
    g, se = gain, np.sqrt(eta)
    c = np.zeros((6, 6))
    c[0, 0] = (4 * g**2 * eta + 3 * (1 + g) ** 2) / 6 * v \
        + (2 * g**2 * eta + 3 * (1 - g) ** 2) / 6 * v_anti + g**2 * (1 - eta)
    c[1, 1] = (2 * g**2 * eta + 3 * (1 + g) ** 2) / 6 * v \
        + (4 * g**2 * eta + 3 * (g - 1) ** 2) / 6 * v_anti + g**2 * (1 - eta)
    c[2, 2] = c[4, 4] = 2 / 3 * v + 1 / 3 * v_anti
    c[3, 3] = c[5, 5] = 1 / 3 * v + 2 / 3 * v_anti
    c[0, 2] = c[0, 4] = -g * se / 3 * v + g * se / 3 * v_anti
    c[1, 3] = c[1, 5] = -g * se / 3 * v_anti + g * se / 3 * v
    c[2, 4] = -1 / 3 * v + 1 / 3 * v_anti
    c[3, 5] = -1 / 3 * v_anti + 1 / 3 * v
    return np.triu(c) + np.triu(c, 1).T


def fourmode_variance_formulas(v, v_anti, gain, gains) -> dict[str, float]:
    """Closed forms V1..V6 of the GHZ-GHZ output correlations."""
    g1, g2, g3, g4, g5, g6 = gains
    G, V, W = gain, v, v_anti
    return {
        "V1": 2 * V,
        "V2": ((2 + G * g1) ** 2 + (g1 + G * g1 + g2) ** 2) * V / 3
        + (4 * (G * g1 - 1) ** 2 + 3 * (g1 - g2) ** 2 + (g1 - 2 * G * g1 + g2) ** 2) * W / 6,
        "V3": 2 * ((G - 1) ** 2 * W + 2 * (1 + G + G**2) * V) / 3,
        "V4": ((1 + G + g3) ** 2 + (1 + g4 + G) ** 2) * V / 3
        + ((2 * G - 1 - g3) ** 2 + 3 * (1 - g3) ** 2) * W / 6
        + ((2 * G - g4 - 1) ** 2 + 3 * (1 - g4) ** 2) * W / 6,
        "V5": 2 * V,
        "V6": ((G + g5 + g6) ** 2 + (2 + G) ** 2) * V / 3
        + ((2 * G - g5 - g6) ** 2 + 3 * (g6 - g5) ** 2 + (2 * G - 2) ** 2) * W / 6,
    }


def threemode_variance_formulas(v, v_anti, gain, g7, g8) -> dict[str, float]:
    """Closed forms V7..V10 of the lossless GHZ-EPR output correlations."""
    G, V, W = gain, v, v_anti
    return {
        "V7": ((1 + 2 * G) ** 2 + 3 + 3 * (1 + G) ** 2) * V / 6
        + (2 * (G - 1) ** 2 + 3 * (1 - G) ** 2) * W / 6,
        "V8": (2 * (1 + G + g7) ** 2 + 3 * (G + 1) ** 2) * V / 6
        + ((2 * G - 1 - g7) ** 2 + 3 * (1 - g7) ** 2 + 3 * (G - 1) ** 2) * W / 6,
        "V9": 2 * V,
        "V10": (2 * (2 + G * g8) ** 2 + 3 * (G * g8 + g8) ** 2) * V / 6
        + (4 * (G * g8 - 1) ** 2 + 3 * (G * g8 - g8) ** 2) * W / 6,
    }

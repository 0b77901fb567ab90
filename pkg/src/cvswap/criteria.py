"""Entanglement verification of the swapped states.

Combination-variance criteria (boundary 4) with closed-form and numerically
optimised gains, PPT symplectic eigenvalues for the 1|2 splittings of a
three-mode state, covariance reconstruction from 18 variance measurements,
and threshold finders in squeezing and channel efficiency.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .gaussian import (
    PHYSICAL_TOL,
    GaussianState,
    SqueezerSpec,
    quadrature_vector,
    symplectic_eigenvalues,
)
from .protocol import (
    ChannelSpec,
    _check_squeezing,
    optimal_classical_gain,
    swap_ghz_epr,
    swap_ghz_ghz,
)
from .states import NetworkRecipe, build_epr, build_ghz

BOUNDARY = 4.0
PPT_BOUNDARY = 1.0

# (x-difference modes, p-combo modes with unit weight, modes weighted by the gains)
FOURMODE_COMBOS = (((0, 1), (0, 1), (2, 3)), ((1, 2), (1, 2), (0, 3)), ((2, 3), (2, 3), (0, 1)))
THREEMODE_COMBOS = (((0, 1), (0, 1), (2,)), ((1, 2), (1, 2), (0,)))


@dataclass(frozen=True)
class ComboGains:
    """Weights of the gained terms, g1..g6 (four-mode) or g7, g8 (three-mode)."""

    g: tuple[float, ...]

    def __post_init__(self):
        g = tuple(float(x) for x in self.g)
        if len(g) not in (2, 6) or not all(np.isfinite(g)):
            raise ValueError(f"expected 2 or 6 finite gains, got {self.g!r}")
        object.__setattr__(self, "g", g)

    @classmethod
    def unit(cls, n: int) -> "ComboGains":
        return cls((1.0,) * n)

    def labels(self) -> list[str]:
        start = 1 if len(self.g) == 6 else 7
        return [f"g{start + i}" for i in range(len(self.g))]

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.labels(), self.g))


def _x_vector(n, pair):
    i, j = pair
    return quadrature_vector(n, [(i, "x", 1.0), (j, "x", -1.0)])


def _p_vectors(n, unit_modes, gained_modes):
    base = quadrature_vector(n, [(k, "p", 1.0) for k in unit_modes])
    dirs = [quadrature_vector(n, [(k, "p", 1.0)]) for k in gained_modes]
    return base, dirs


def _combo_terms(state: GaussianState, table, gains: ComboGains):
    n = state.n_modes
    it = iter(gains.g)
    out = []
    for xpair, unit, gained in table:
        base, dirs = _p_vectors(n, unit, gained)
        p = base + sum(next(it) * d for d in dirs)
        x = _x_vector(n, xpair)
        out.append((float(x @ state.cov @ x), float(p @ state.cov @ p)))
    return out


def fourmode_terms(state: GaussianState, gains: ComboGains) -> list[tuple[float, float]]:
    """(x-difference variance, weighted p-sum variance) for each four-mode inequality."""
    if state.n_modes != 4:
        raise ValueError(f"four-mode criteria need 4 modes, got {state.n_modes}")
    if len(gains.g) != 6:
        raise ValueError("four-mode criteria need gains g1..g6")
    return _combo_terms(state, FOURMODE_COMBOS, gains)


def threemode_terms(state: GaussianState, gains: ComboGains) -> list[tuple[float, float]]:
    if state.n_modes != 3:
        raise ValueError(f"three-mode criteria need 3 modes, got {state.n_modes}")
    if len(gains.g) != 2:
        raise ValueError("three-mode criteria need gains g7, g8")
    return _combo_terms(state, THREEMODE_COMBOS, gains)


def fourmode_combos(state: GaussianState, gains: ComboGains) -> tuple[float, float, float]:
    return tuple(a + b for a, b in fourmode_terms(state, gains))


def threemode_combos(state: GaussianState, gains: ComboGains) -> tuple[float, float]:
    return tuple(a + b for a, b in threemode_terms(state, gains))


def combo_verdict(values, boundary: float = BOUNDARY, tol: float = PHYSICAL_TOL) -> str:
    top = max(values)
    if top < boundary - tol:
        return "entangled"
    if abs(top - boundary) <= tol:
        return "separable (boundary)"
    return "separable"


def closedform_gains_fourmode(v: float, v_anti: float) -> ComboGains:
    _check_squeezing(v, v_anti)
    V, W = v, v_anti
    den = 4 * W**4 + 14 * W**3 * V + 9 * W**2 * V**2 + 8 * W * V**3 + V**4
    g1 = 2 * (W - V) ** 2 * (W + V) * (2 * W + V) / den
    g2 = 4 * W * (W - V) ** 3 / den
    g3 = 2 * (W**2 - W * V) / ((W + V) * (2 * W + V))
    g5 = (W - V) ** 2 / ((W + V) * (W + 2 * V))
    return ComboGains((g1, g2, g3, g3, g5, g5))


def closedform_gains_threemode(v: float, v_anti: float) -> ComboGains:
    _check_squeezing(v, v_anti)
    V, W = v, v_anti
    g7 = 2 * W * (W - V) / ((W + V) * (2 * W + V))
    g8 = 2 * (W - V) ** 2 * (W + V) / (2 * W**3 + 3 * W**2 * V + 6 * W * V**2 + V**3)
    return ComboGains((g7, g8))


def numeric_gain_search(cov, base, directions, rcond: float = 1e-12) -> np.ndarray:
    """Minimise the variance of ``base + sum_k g_k directions[k]`` over g.

    The variance is quadratic in g, so the minimiser solves the linear
    stationarity system exactly.  A singular system is reported, not guessed.
    """
    cov = np.asarray(cov, dtype=float)
    d = np.column_stack([np.asarray(x, dtype=float) for x in directions])
    a = np.asarray(base, dtype=float)
    hess = d.T @ cov @ d
    rhs = -d.T @ cov @ a
    w = np.linalg.eigvalsh(hess)
    if w[0] <= rcond * max(1.0, abs(w[-1])):
        raise np.linalg.LinAlgError("gain functional is not positive definite; minimiser is not unique")
    return np.linalg.solve(hess, rhs)


def numeric_gains(state: GaussianState) -> ComboGains:
    """Gains minimising each weighted p-sum of a 4- or 3-mode state."""
    table = {4: FOURMODE_COMBOS, 3: THREEMODE_COMBOS}.get(state.n_modes)
    if table is None:
        raise ValueError(f"no combination criteria for {state.n_modes} modes")
    g = []
    for _, unit, gained in table:
        base, dirs = _p_vectors(state.n_modes, unit, gained)
        g.extend(numeric_gain_search(state.cov, base, dirs))
    return ComboGains(tuple(g))


@dataclass(frozen=True)
class PptReport:
    """Smallest symplectic eigenvalue of each k|rest partially transposed matrix."""

    values: tuple[float, ...]
    boundary: float = PPT_BOUNDARY

    def entangled(self) -> tuple[bool, ...]:
        return tuple(v < self.boundary for v in self.values)

    def verdicts(self) -> dict[str, str]:
        n = len(self.values)
        out = {}
        for k, v in enumerate(self.values, start=1):
            rest = "".join(f"D{j}" for j in range(1, n + 1) if j != k)
            split = f"D{k}|{rest}"
            out[split] = "inseparable" if v < self.boundary else "separable"
        return out


def partial_transpose(cov, mode: int) -> np.ndarray:
    """Flip the sign of p of ``mode`` (rows and columns)."""
    t = np.ones(np.shape(cov)[0])
    t[2 * mode + 1] = -1.0
    return np.asarray(cov, dtype=float) * np.outer(t, t)


def ppt_values(state: GaussianState) -> PptReport:
    if state.n_modes != 3:
        raise ValueError(f"PPT test is implemented for 3-mode states, got {state.n_modes}")
    return PptReport(tuple(float(symplectic_eigenvalues(partial_transpose(state.cov, k))[0])
                           for k in range(3)))


# -- covariance reconstruction -------------------------------------------------

MODE_LABELS = ("D1", "D2", "D3")
PAIR_MEASUREMENTS = (
    ("x_D1", "x_D2", "-"), ("x_D1", "x_D3", "-"), ("x_D2", "x_D3", "-"),
    ("p_D1", "p_D2", "+"), ("p_D1", "p_D3", "+"), ("p_D2", "p_D3", "+"),
    ("x_D1", "p_D2", "+"), ("x_D2", "p_D1", "+"), ("x_D1", "p_D3", "+"),
    ("x_D3", "p_D1", "+"), ("x_D2", "p_D3", "+"), ("x_D3", "p_D2", "+"),
)


def _index(label: str) -> int:
    try:
        quad, mode = label.split("_")
        return 2 * MODE_LABELS.index(mode) + ("x", "p").index(quad)
    except ValueError:
        raise ValueError(f"unknown quadrature label {label!r}") from None


@dataclass(frozen=True)
class PairMeasurement:
    lhs: str
    rhs: str
    sign: str
    variance: float

    def key(self) -> tuple[str, str, str]:
        return (self.lhs, self.rhs, self.sign)


@dataclass(frozen=True)
class MeasurementSet:
    """Six single-quadrature variances and twelve pair variances."""

    singles: dict
    pairs: tuple[PairMeasurement, ...]

    def to_dict(self) -> dict:
        return {
            "singles": dict(self.singles),
            "pairs": [{"lhs": p.lhs, "rhs": p.rhs, "sign": p.sign, "variance": p.variance}
                      for p in self.pairs],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MeasurementSet":
        try:
            singles = {str(k): float(v) for k, v in data["singles"].items()}
            pairs = tuple(PairMeasurement(str(p["lhs"]), str(p["rhs"]), str(p["sign"]),
                                          float(p["variance"])) for p in data["pairs"])
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise ValueError(f"malformed measurement set: {exc}") from exc
        return cls(singles, pairs)


def synthesize_measurements(state: GaussianState) -> MeasurementSet:
    if state.n_modes != 3:
        raise ValueError("measurement set is defined for 3-mode states")
    cov = state.cov
    singles = {f"{q}_{m}": float(cov[_index(f'{q}_{m}'), _index(f'{q}_{m}')])
               for m in MODE_LABELS for q in ("x", "p")}
    pairs = []
    for lhs, rhs, sign in PAIR_MEASUREMENTS:
        c = np.zeros(6)
        c[_index(lhs)] = 1.0
        c[_index(rhs)] = 1.0 if sign == "+" else -1.0
        pairs.append(PairMeasurement(lhs, rhs, sign, float(c @ cov @ c)))
    return MeasurementSet(singles, tuple(pairs))


def reconstruct_covariance(m: MeasurementSet) -> GaussianState:
    """Rebuild the 6x6 covariance from sum/difference variances.

    Same-mode x-p covariances are not measured and are set to zero.
    """
    expected_singles = {f"{q}_{mode}" for mode in MODE_LABELS for q in ("x", "p")}
    missing = expected_singles - set(m.singles)
    if missing:
        raise ValueError(f"missing single-quadrature variances: {sorted(missing)}")
    by_key = {}
    for p in m.pairs:
        if p.key() in by_key:
            raise ValueError(f"duplicate pair measurement {p.key()}")
        by_key[p.key()] = p.variance
    missing_pairs = [k for k in PAIR_MEASUREMENTS if k not in by_key]
    if missing_pairs:
        raise ValueError(f"missing pair measurements: {missing_pairs}")
    if any(v <= 0 for v in list(m.singles.values()) + list(by_key.values())):
        raise ValueError("all measured variances must be positive")

    cov = np.zeros((6, 6))
    for label in expected_singles:
        i = _index(label)
        cov[i, i] = m.singles[label]
    for lhs, rhs, sign in PAIR_MEASUREMENTS:
        i, j = _index(lhs), _index(rhs)
        half = 0.5 * (by_key[(lhs, rhs, sign)] - cov[i, i] - cov[j, j])
        cov[i, j] = cov[j, i] = half if sign == "+" else -half
    if np.abs(cov - cov.T).max() > 1e-12:
        raise ValueError("reconstructed covariance is not symmetric")
    return GaussianState(cov)


# -- thresholds ------------------------------------------------------------------

@dataclass(frozen=True)
class Threshold:
    value: float | None
    status: str
    tol: float


def _policy_gains(v, v_anti, criterion, gain_policy):
    if gain_policy == "unit":
        G = 1.0
    elif gain_policy == "optimal":
        G = optimal_classical_gain(v, v_anti)
    else:
        raise ValueError(f"gain_policy must be 'unit' or 'optimal', got {gain_policy!r}")
    if criterion == "fourmode":
        return G, closedform_gains_fourmode(v, v_anti)
    if criterion == "threemode":
        return G, closedform_gains_threemode(v, v_anti)
    raise ValueError(f"criterion must be 'fourmode' or 'threemode', got {criterion!r}")


def criterion_combos(squeezer: SqueezerSpec, criterion: str, gain_policy: str) -> tuple[float, ...]:
    """Simulated combos of one criterion with the given gain policy.

    ``unit`` means G = 1 in the classical channel; the g's are always the
    closed-form values at the squeezer's (V, V').
    """
    v, w = squeezer.v_sq, squeezer.v_anti
    G, gains = _policy_gains(v, w, criterion, gain_policy)
    a = build_ghz(NetworkRecipe.default("ghz_a", squeezer))
    if criterion == "fourmode":
        b = build_ghz(NetworkRecipe.default("ghz_b", squeezer))
        return fourmode_combos(swap_ghz_ghz(a, b, G), gains)
    e = build_epr(NetworkRecipe.default("epr", squeezer))
    return threemode_combos(swap_ghz_epr(a, e, G), gains)


def _single_crossing(xs, fs):
    signs = np.sign(fs)
    changes = np.count_nonzero(signs[1:] != signs[:-1])
    if changes > 1:
        raise ValueError("crossing function is not monotone over the scanned range")


def squeezing_threshold(criterion: str, gain_policy: str, r_min: float = 1e-3,
                        r_max: float = 2.0, tol: float = 1e-4, n_scan: int = 200) -> Threshold:
    """Smallest pure-squeezing parameter r at which every combo drops below 4."""

    def excess(r):
        return max(criterion_combos(SqueezerSpec.pure(r), criterion, gain_policy)) - BOUNDARY

    rs = np.linspace(r_min, r_max, n_scan)
    fs = np.array([excess(r) for r in rs])
    _single_crossing(rs, fs)
    if fs[0] < 0:
        return Threshold(0.0, "entangled for all r > 0", tol)
    if fs[-1] >= 0:
        raise ValueError(f"no entanglement threshold below r = {r_max}")
    k = int(np.argmax(fs < 0))
    r = bisect(excess, rs[k - 1], rs[k], xtol=tol)
    return Threshold(float(r), "crossing", tol)


def max_ppt(v: float, v_anti: float, gain: float, eta: float) -> float:
    sq = SqueezerSpec(v, v_anti)
    a = build_ghz(NetworkRecipe.default("ghz_a", sq))
    e = build_epr(NetworkRecipe.default("epr", sq))
    return max(ppt_values(swap_ghz_epr(a, e, gain, ChannelSpec(eta))).values)


def loss_threshold(v: float, v_anti: float, gain: float, tol: float = 1e-4,
                   scan_step: float = 0.01) -> Threshold:
    """Channel efficiency above which all three PPT values are below 1."""
    _check_squeezing(v, v_anti)

    def excess(eta):
        return max_ppt(v, v_anti, gain, eta) - PPT_BOUNDARY

    etas = np.linspace(0.0, 1.0, int(round(1 / scan_step)) + 1)
    fs = np.array([excess(e) for e in etas])
    if fs[-1] > -PHYSICAL_TOL:
        return Threshold(None, "entangled nowhere", tol)
    if fs[0] < -PHYSICAL_TOL:
        return Threshold(0.0, "entangled everywhere", tol)
    _single_crossing(etas, fs)
    k = int(np.argmax(fs < 0))
    eta = bisect(excess, etas[k - 1], etas[k], xtol=tol)
    return Threshold(float(eta), "crossing", tol)

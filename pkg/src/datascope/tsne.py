"""t-SNE: perplexity-calibrated affinities and KL gradient descent to a
2-D layout.

High-dimensional affinities: per-point bandwidths sigma_i are bisected
until the conditional distribution's perplexity 2^H matches the target,
then symmetrized as p_ij = (p_j|i + p_i|j) / (2N) so the matrix sums to 1.

Low-dimensional similarities use the Student-t kernel w_ij = 1/(1+d_ij^2),
q_ij = w_ij / sum(w).  The exact gradient is

    dC/dy_i = 4 * sum_j (p_ij - q_ij) * w_ij * (y_i - y_j)

computed with dense N x N matrix ops; the Barnes-Hut engine in
barnes_hut.py approximates the repulsive part for large N.

The KL trace recorded on the layout is always measured against the
un-exaggerated P, so values are comparable across optimization phases.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonFiniteLoss, PerplexityOutOfRange
from .layout import EmbeddingLayout

_BISECTION_STEPS = 200
_ENTROPY_TOL = 1e-5  # bits


@dataclass
class TsneConfig:
    perplexity: float = 30.0
    learning_rate: float | None = None  # None -> N / 12
    iterations: int = 1000
    early_exaggeration: float = 12.0
    exaggeration_iterations: int = 250
    momentum_initial: float = 0.5
    momentum_final: float = 0.8
    momentum_switch: int = 250
    init_std: float = 1e-4
    seed: int = 0
    method: str = "exact"  # exact | barnes_hut
    theta: float = 0.5  # barnes-hut accuracy/speed trade-off

    def as_dict(self) -> dict:
        return {
            "perplexity": self.perplexity,
            "learning_rate": self.learning_rate,
            "iterations": self.iterations,
            "early_exaggeration": self.early_exaggeration,
            "exaggeration_iterations": self.exaggeration_iterations,
            "momentum_initial": self.momentum_initial,
            "momentum_final": self.momentum_final,
            "momentum_switch": self.momentum_switch,
            "init_std": self.init_std,
            "seed": self.seed,
            "method": self.method,
            "theta": self.theta,
        }


@dataclass
class AffinityMatrix:
    P: np.ndarray  # N x N symmetric, zero diagonal, sums to 1
    perplexity: float
    bandwidths: np.ndarray  # per-point sigma_i
    conditional: np.ndarray = field(repr=False, default=None)  # p_{j|i} rows


def squared_distances(X: np.ndarray) -> np.ndarray:
    """Pairwise squared Euclidean distances, exact zeros on the diagonal."""
    norms = np.einsum("ij,ij->i", X, X)
    d2 = norms[:, None] + norms[None, :] - 2.0 * (X @ X.T)
    np.fill_diagonal(d2, 0.0)
    return np.maximum(d2, 0.0)


def _row_entropy_bits(p: np.ndarray) -> float:
    nonzero = p[p > 0]
    return float(-np.sum(nonzero * np.log2(nonzero)))


def _conditional_row(d2_row: np.ndarray, beta: float) -> np.ndarray:
    # shift by the min distance so exp never underflows to an all-zero row
    shifted = -beta * (d2_row - d2_row.min())
    p = np.exp(shifted)
    return p / p.sum()


def conditional_affinities(X: np.ndarray, perplexity: float) -> tuple[np.ndarray, np.ndarray]:
    """Per-row conditional distributions p_{j|i} plus the fitted sigmas.

    Each row's precision beta_i = 1/(2 sigma_i^2) is bisected (at most 200
    steps) until the entropy matches log2(perplexity) within 1e-5 bits.
    """
    n = len(X)
    if not 1 < perplexity < n:
        raise PerplexityOutOfRange(f"perplexity must be in (1, {n}), got {perplexity}")
    target = np.log2(perplexity)
    d2 = squared_distances(X)
    mask = ~np.eye(n, dtype=bool)

    conditional = np.zeros((n, n))
    sigmas = np.zeros(n)
    for i in range(n):
        row = d2[i][mask[i]]
        beta, beta_min, beta_max = 1.0, 0.0, np.inf
        p = _conditional_row(row, beta)
        for _ in range(_BISECTION_STEPS):
            diff = _row_entropy_bits(p) - target
            if abs(diff) <= _ENTROPY_TOL:
                break
            if diff > 0:  # too flat: sharpen
                beta_min = beta
                beta = beta * 2.0 if beta_max == np.inf else (beta + beta_max) / 2.0
            else:
                beta_max = beta
                beta = (beta + beta_min) / 2.0
            p = _conditional_row(row, beta)
        conditional[i][mask[i]] = p
        sigmas[i] = np.sqrt(1.0 / (2.0 * beta))
    return conditional, sigmas


def compute_affinities(X: np.ndarray, perplexity: float) -> AffinityMatrix:
    conditional, sigmas = conditional_affinities(np.asarray(X, dtype=np.float64), perplexity)
    n = len(conditional)
    P = (conditional + conditional.T) / (2.0 * n)
    return AffinityMatrix(P=P, perplexity=perplexity, bandwidths=sigmas, conditional=conditional)


def row_perplexities(affinities: AffinityMatrix) -> np.ndarray:
    """2^H of every conditional row, for calibration checks."""
    return np.array([2.0 ** _row_entropy_bits(row) for row in affinities.conditional])


def _student_t_weights(Y: np.ndarray) -> np.ndarray:
    w = 1.0 / (1.0 + squared_distances(Y))
    np.fill_diagonal(w, 0.0)
    return w


def kl_divergence(P: np.ndarray, Y: np.ndarray) -> float:
    """KL(P || Q) for the Student-t Q of layout Y; smooth in Y (no floor
    clamping), so it agrees with the analytic gradient to FD accuracy."""
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        w = _student_t_weights(Y)
        q = w / w.sum()
        mask = P > 0
        return float(np.sum(P[mask] * (np.log(P[mask]) - np.log(q[mask]))))


def kl_gradient(P: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Exact analytic gradient, 4 * sum_j (p-q) w (y_i - y_j)."""
    w = _student_t_weights(Y)
    q = w / w.sum()
    m = (P - q) * w
    return 4.0 * (m.sum(axis=1)[:, None] * Y - m @ Y)


def _kl_and_gradient(p_run: np.ndarray, p_true: np.ndarray, Y: np.ndarray) -> tuple[float, np.ndarray]:
    """One shared W/Q evaluation: gradient against p_run (possibly
    exaggerated), KL against the true P."""
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        w = _student_t_weights(Y)
        q = w / w.sum()
        m = (p_run - q) * w
        grad = 4.0 * (m.sum(axis=1)[:, None] * Y - m @ Y)
        mask = p_true > 0
        kl = float(np.sum(p_true[mask] * (np.log(p_true[mask]) - np.log(q[mask]))))
        return kl, grad


def tsne(
    X: np.ndarray,
    config: TsneConfig | None = None,
    ids: list | None = None,
    labels: list[str] | None = None,
    provenance: dict | None = None,
) -> EmbeddingLayout:
    """Embed X (N x d) into 2-D by gradient descent on KL(P || Q).

    Deterministic given the config seed.  Raises NonFiniteLoss (with the
    iteration number) if the optimization diverges.
    """
    X = np.asarray(X, dtype=np.float64)
    n = len(X)
    if n < 5:
        raise ValueError(f"need at least 5 points, got {n}")
    config = config or TsneConfig()
    if config.method == "barnes_hut":
        from .barnes_hut import tsne_barnes_hut

        return tsne_barnes_hut(X, config, ids=ids, labels=labels, provenance=provenance)
    if config.method != "exact":
        raise ValueError(f"unknown method {config.method!r}")

    affinities = compute_affinities(X, config.perplexity)
    P = affinities.P
    learning_rate = config.learning_rate if config.learning_rate is not None else n / 12.0

    rng = np.random.default_rng(config.seed)
    Y = rng.normal(scale=config.init_std, size=(n, 2))
    velocity = np.zeros_like(Y)

    # kl_trace[t] = KL of the layout after t gradient updates
    trace: list[tuple[int, float]] = []
    for iteration in range(1, config.iterations + 1):
        exaggerate = iteration <= config.exaggeration_iterations
        p_run = P * config.early_exaggeration if exaggerate else P
        momentum = (
            config.momentum_initial
            if iteration <= config.momentum_switch
            else config.momentum_final
        )

        kl, grad = _kl_and_gradient(p_run, P, Y)
        if not (np.isfinite(kl) and np.isfinite(grad).all()):
            raise NonFiniteLoss(
                f"optimization diverged at iteration {iteration}", iteration=iteration
            )
        trace.append((iteration - 1, kl))
        velocity = momentum * velocity - learning_rate * grad
        Y = Y + velocity
        Y = Y - Y.mean(axis=0)

    final_kl = kl_divergence(P, Y)
    if not np.isfinite(final_kl):
        raise NonFiniteLoss("loss diverged at final iteration", iteration=config.iterations)
    trace.append((config.iterations, final_kl))

    return EmbeddingLayout(
        points=Y,
        ids=list(ids) if ids is not None else list(range(n)),
        labels=list(labels) if labels is not None else ["?"] * n,
        provenance=dict(provenance or {}, tsne=config.as_dict()),
        final_kl=trace[-1][1],
        kl_trace=trace,
    )


def kl_at_iteration(layout: EmbeddingLayout, iteration: int) -> float:
    for it, kl in layout.kl_trace:
        if it == iteration:
            return kl
    raise KeyError(f"no KL recorded at iteration {iteration}")


def plain_descent_config(iterations: int = 150, step: float = 0.05, seed: int = 0) -> TsneConfig:
    """Zero momentum, no exaggeration, fixed small step: the configuration
    under which KL must decrease monotonically on small instances."""
    return TsneConfig(
        perplexity=5.0,
        learning_rate=step,
        iterations=iterations,
        early_exaggeration=1.0,
        exaggeration_iterations=0,
        momentum_initial=0.0,
        momentum_final=0.0,
        momentum_switch=iterations,
        seed=seed,
    )

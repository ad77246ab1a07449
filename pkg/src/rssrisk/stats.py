"""Risk-vs-collision association statistics over episode outcomes."""

from __future__ import annotations

import numpy as np
from scipy.stats import rankdata


def _arrays(risk, collided):
    x = np.asarray(risk, dtype=float)
    y = np.asarray(collided, dtype=bool)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("risk and collided must be 1-D and of equal length")
    return x, y


def is_degenerate(risk, collided) -> bool:
    """True when either variable has zero variance, so no association is defined."""
    x, y = _arrays(risk, collided)
    return y.all() or not y.any() or np.ptp(x) == 0.0


def point_biserial(risk, collided) -> float | None:
    """Point-biserial correlation of risk with the collision indicator, ``None`` if degenerate."""
    x, y = _arrays(risk, collided)
    if is_degenerate(x, y):
        return None
    p = y.mean()
    r = (x[y].mean() - x[~y].mean()) / x.std() * np.sqrt(p * (1.0 - p))
    return float(np.clip(r, -1.0, 1.0))


def auc(risk, collided) -> float | None:
    """Mann-Whitney AUC: P(risk of a collision episode > risk of a clean one), ties count 1/2."""
    x, y = _arrays(risk, collided)
    n1, n0 = int(y.sum()), int((~y).sum())
    if n1 == 0 or n0 == 0:
        return None
    ranks = rankdata(x)
    return float((ranks[y].sum() - n1 * (n1 + 1) / 2.0) / (n1 * n0))


def permutation_p(risk, collided, n_perms: int, rng: np.random.Generator) -> float | None:
    """One-sided permutation p-value for a positive point-biserial correlation.

    The observed labelling counts as one of the ``n_perms + 1`` permutations,
    so the result is never below ``1 / (n_perms + 1)``.
    """
    if n_perms < 1:
        raise ValueError("n_perms must be >= 1")
    x, y = _arrays(risk, collided)
    if is_degenerate(x, y):
        return None
    # with the collision count fixed, the correlation is increasing in the
    # summed risk of the collision group
    observed = x[y].sum()
    labels = np.tile(y, (n_perms, 1))
    perm = rng.permuted(labels, axis=1)
    sums = perm.astype(float) @ x
    tol = 1e-12 * max(1.0, abs(observed))
    hits = int(np.count_nonzero(sums >= observed - tol))
    return (hits + 1) / (n_perms + 1)

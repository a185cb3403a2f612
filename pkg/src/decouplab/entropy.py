"""Smooth one-shot entropies via explicitly certified feasible points.

Every smoothed quantity here is evaluated at a concrete operator inside the
trace-norm ball around the state (positive semidefinite, subnormalised
allowed, distance measured by the full 1-norm). That makes each reported
number a one-sided certificate: collision-type quantities are lower bounds
on the true optimum, max-type quantities are upper bounds. No claim of
tightness is made for the truncation family used to pick the points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import linalg
from .errors import DimensionError, DomainError
from .linalg import SystemShape
from .quantum import DensitySystem

RANK_FLOOR = 1e-12


@dataclass(frozen=True)
class SmoothingConfig:
    """Smoothing radii and the budget for the weight-simplex local search.

    delta below 1/3 is required by the tail-bound arithmetic; that is
    enforced where the tail parameters are assembled, not here.
    The seed is reserved for randomised search strategies; the default
    Nelder-Mead polish is deterministic and ignores it.
    """

    epsilon: float = 0.0
    delta: float = 0.0
    minimizer_iterations: int = 200
    minimizer_tolerance: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.epsilon < 0 or self.delta < 0:
            raise DomainError("smoothing parameters must be nonnegative")
        if self.minimizer_iterations < 1:
            raise DomainError("minimizer needs a positive iteration budget")


@dataclass(frozen=True)
class EntropyReport:
    name: str
    value_bits: float
    mode: str
    certified_side: str
    warnings: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "value_bits": float(self.value_bits),
            "mode": self.mode,
            "certified_side": self.certified_side,
        }


def _eigenvalues(x) -> np.ndarray:
    if isinstance(x, DensitySystem):
        vals = np.linalg.eigvalsh(linalg.hermitianize(x.matrix))
    else:
        arr = np.asarray(x)
        if arr.ndim == 1:
            vals = arr.astype(float)
        else:
            vals = np.linalg.eigvalsh(linalg.hermitianize(arr.astype(complex)))
    if vals.size and float(vals.min()) < -1e-9 * max(1.0, float(np.abs(vals).max())):
        raise DomainError("negative eigenvalue beyond tolerance")
    return np.clip(vals, 0.0, None)


def shannon(x, given=None) -> float:
    """Entropy in bits; with `given` labels, the conditional H(rest | given)."""
    if given is None:
        vals = _eigenvalues(x)
        vals = vals[vals > 0]
        return float(-(vals * np.log2(vals)).sum()) if vals.size else 0.0
    if not isinstance(x, DensitySystem):
        raise DimensionError("conditional entropy needs a labelled state")
    given = [given] if isinstance(given, str) else list(given)
    return shannon(x) - shannon(x.marginal(given))


def embed_on_labels(op: np.ndarray, shp: SystemShape, labels) -> np.ndarray:
    """Operator acting as `op` on the named labels (in order), identity elsewhere."""
    labels = [labels] if isinstance(labels, str) else list(labels)
    rest = [n for n in shp.names if n not in labels]
    d_rest = shp.dim_of_all(rest)
    if op.shape[0] != shp.dim_of_all(labels):
        raise DimensionError("embedded operator does not match the label dimensions")
    big = np.kron(np.eye(d_rest, dtype=complex), np.asarray(op, dtype=complex))
    big_shape = SystemShape(
        tuple((n, shp.dim_of(n)) for n in rest) + tuple((n, shp.dim_of(n)) for n in labels)
    )
    return linalg.permute_systems(big, big_shape, list(shp.names))


def conj_by_inverse_quarter(
    m: np.ndarray, shp: SystemShape, weight: np.ndarray, labels
) -> np.ndarray:
    w = embed_on_labels(linalg.pseudo_inverse_power(weight, -0.25), shp, labels)
    return w @ m @ w


def tilde_conjugate(state: DensitySystem, weight: np.ndarray, which) -> DensitySystem:
    """The weighted state w^(-1/4) m w^(-1/4) with w embedded on `which`."""
    out = conj_by_inverse_quarter(state.matrix, state.shape, weight, which)
    return DensitySystem.from_matrix(out, state.shape)


def _support_projector(weight: np.ndarray) -> np.ndarray:
    spec = linalg.spectral(weight)
    lmax = float(spec.values.max(initial=0.0))
    keep = spec.values > RANK_FLOOR * max(lmax, 1.0)
    cols = spec.vectors[:, keep]
    return cols @ cols.conj().T


def _collision_value(sigma: np.ndarray, shp: SystemShape, weight: np.ndarray,
                     given) -> float | None:
    """-2 log2 of the weighted 2-norm, or None when the point leaks support."""
    given = [given] if isinstance(given, str) else list(given)
    marg = linalg.partial_trace(sigma, shp, [n for n in shp.names if n not in given])
    proj = _support_projector(weight)
    leak = float(np.real(np.trace(marg))) - float(np.real(np.trace(proj @ marg)))
    if leak > 1e-10:
        return None
    norm = linalg.schatten_norm(
        conj_by_inverse_quarter(sigma, shp, weight, given), 2
    )
    if norm <= 0:
        return None
    return float(-2.0 * math.log2(norm))


def _truncation_candidates(rho: DensitySystem, eps: float) -> list[tuple[np.ndarray, float]]:
    """Subnormalised spectral truncations within the ball: drop k smallest."""
    spec = linalg.spectral(rho.matrix)
    order = np.argsort(spec.values)  # ascending
    out = [(rho.matrix, 0.0)]
    if eps <= 0:
        return out
    dropped = 0.0
    mask = np.ones(spec.values.size, dtype=bool)
    for idx in order:
        if spec.values[idx] <= 0:
            mask[idx] = False
            continue
        if dropped + spec.values[idx] > eps + 1e-15:
            break
        dropped += spec.values[idx]
        mask[idx] = False
        vals = np.where(mask, spec.values, 0.0)
        out.append(((spec.vectors * vals) @ spec.vectors.conj().T, dropped))
    return out


def h2_with_witness(
    rho: DensitySystem,
    cfg: SmoothingConfig,
    weight_mode: str = "fixed_marginal",
    given=None,
) -> tuple[float, np.ndarray, np.ndarray, tuple[str, ...]]:
    """Certified lower bound on the smoothed conditional collision entropy.

    Returns (value_bits, sigma, weight, warnings) where sigma sits in the
    epsilon-ball around rho, weight is the conditioning operator actually
    used, and value_bits = -2 log2 || (I (x) w^{-1/4}) sigma (same) ||_2.
    """
    if weight_mode not in ("fixed_marginal", "minimized"):
        raise DomainError(f"unknown weight mode {weight_mode!r}")
    given = rho.shape.names[-1] if given is None else given
    given_list = [given] if isinstance(given, str) else list(given)
    warnings: list[str] = []

    marg = rho.marginal(given_list).matrix
    marg_spec = linalg.spectral(marg)
    lmax = float(marg_spec.values.max(initial=0.0))
    support = marg_spec.values > RANK_FLOOR * max(lmax, 1.0)
    rank = int(support.sum())
    if rank < marg.shape[0]:
        warnings.append("conditioning marginal is rank deficient; "
                        "weights restricted to its support")
    basis = marg_spec.vectors[:, support]

    sigmas = _truncation_candidates(rho, cfg.epsilon)

    def best_over_sigmas(weight: np.ndarray) -> tuple[float, np.ndarray] | None:
        best = None
        for sig, dist in sigmas:
            val = _collision_value(sig, rho.shape, weight, given_list)
            if val is None:
                continue
            if best is None or val > best[0]:
                best = (val, sig)
        if cfg.epsilon > 0:
            proj = _support_projector(weight)
            op = embed_on_labels(proj, rho.shape, given_list)
            sig = op @ rho.matrix @ op
            if linalg.schatten_norm(rho.matrix - sig, 1) <= cfg.epsilon + 1e-12:
                val = _collision_value(sig, rho.shape, weight, given_list)
                if val is not None and (best is None or val > best[0]):
                    best = (val, sig)
        return best

    candidates: list[tuple[float, np.ndarray, np.ndarray]] = []

    def consider(weight: np.ndarray):
        got = best_over_sigmas(weight)
        if got is not None:
            candidates.append((got[0], got[1], weight))

    consider(marg)

    if weight_mode == "minimized":
        sup_vals = marg_spec.values[support]
        for start in (np.log(np.clip(sup_vals, 1e-12, None)), np.zeros(rank)):
            consider(_simplex_weight(basis, start))
            if rank > 1:
                res = minimize(
                    lambda x: -_weight_objective(x, basis, best_over_sigmas),
                    start,
                    method="Nelder-Mead",
                    options={
                        "maxiter": cfg.minimizer_iterations,
                        "fatol": cfg.minimizer_tolerance,
                        "xatol": cfg.minimizer_tolerance,
                    },
                )
                consider(_simplex_weight(basis, res.x))
        # renormalised truncations of the marginal spectrum as extra starts
        asc = np.argsort(sup_vals)
        for k in range(1, rank):
            kept = np.delete(np.arange(rank), asc[:k])
            w = (basis[:, kept] * (sup_vals[kept] / sup_vals[kept].sum())) @ basis[:, kept].conj().T
            consider(w)

    if not candidates:
        raise DomainError("no feasible smoothing point found inside the ball")
    value, sigma, weight = max(candidates, key=lambda c: c[0])
    return value, sigma, weight, tuple(warnings)


def _simplex_weight(basis: np.ndarray, logits: np.ndarray) -> np.ndarray:
    z = np.asarray(logits, dtype=float)
    z = z - z.max()
    p = np.exp(z)
    p /= p.sum()
    return (basis * p) @ basis.conj().T


def _weight_objective(logits, basis, best_over_sigmas) -> float:
    got = best_over_sigmas(_simplex_weight(basis, np.asarray(logits)))
    return -1e6 if got is None else got[0]


def h2_conditional(rho: DensitySystem, cfg: SmoothingConfig,
                   weight_mode: str = "fixed_marginal", given=None) -> float:
    value, _, _, _ = h2_with_witness(rho, cfg, weight_mode, given)
    return value


def hmax_smooth(x, eps: float) -> float:
    """Certified upper bound on the smooth max-entropy of the spectrum.

    Feasible family: drop the k smallest eigenvalues and renormalise, which
    sits at 1-norm distance 2 * (dropped mass) from the state; keep the best.
    """
    if eps < 0:
        raise DomainError("epsilon must be nonnegative")
    vals = _eigenvalues(x)
    vals = vals[vals > RANK_FLOOR * max(float(vals.max(initial=0.0)), 1.0)]
    if vals.size == 0:
        raise DomainError("state has no mass above the rank floor")
    asc = np.sort(vals)
    best = None
    dropped = 0.0
    for k in range(asc.size):
        if k > 0:
            dropped += asc[k - 1]
        if 2.0 * dropped > eps + 1e-15 or dropped >= 1.0 - 1e-12:
            break
        kept = asc[k:]
        val = 2.0 * math.log2(float(np.sqrt(kept).sum()) / math.sqrt(1.0 - dropped))
        best = val if best is None else min(best, val)
    if best is None:
        raise DomainError("no feasible renormalised truncation")
    return best


def hmin_smooth(x, eps: float) -> float:
    """Min-entropy-style quantity, reported on the -log2 reading.

    The printed optimisation asks for the smallest operator-norm inside the
    ball; the ceiling-clip point (largest eigenvalues flattened to a common
    level, excess mass exactly eps) realises it, and we return -log2 of the
    clipped level. The sign reading is ambiguous in the source definition;
    this module standardises on -log2 and flags it in reports.
    """
    if eps < 0:
        raise DomainError("epsilon must be nonnegative")
    vals = np.sort(_eigenvalues(x))[::-1]
    total = float(vals.sum())
    if eps >= total:
        raise DomainError("epsilon at least the total mass leaves an empty ball point")
    if eps == 0 or vals.size == 1:
        return float(-math.log2(vals[0] - eps)) if vals.size == 1 else float(-math.log2(vals[0]))
    prefix = 0.0
    for j in range(1, vals.size + 1):
        prefix += vals[j - 1]
        c = (prefix - eps) / j
        lo = vals[j] if j < vals.size else 0.0
        if lo - 1e-15 <= c <= vals[j - 1] + 1e-15:
            if c <= 0:
                raise DomainError("clip level collapsed to zero")
            return float(-math.log2(c))
    raise DomainError("no valid clip level found")


def hmax_prime_values(values: np.ndarray, eps: float) -> tuple[float, np.ndarray]:
    """Alternate smooth max-entropy on a spectrum: zero out the largest set of
    smallest eigenvalues with total mass <= eps, return -log2 of the smallest
    survivor and the kept mask. Ties break by eigenvalue, then by index.
    Entries at or below the relative rank floor are treated as exact zeros.
    """
    if not 0 <= eps < 1:
        raise DomainError(f"epsilon must sit in [0, 1), got {eps}")
    vals = np.asarray(values, dtype=float)
    lmax = float(vals.max(initial=0.0))
    if lmax <= 0:
        raise DomainError("spectrum has no positive mass")
    keep = np.ones(vals.size, dtype=bool)
    order = np.lexsort((np.arange(vals.size), vals))
    budget = 0.0
    for idx in order:
        v = vals[idx]
        if v <= RANK_FLOOR * lmax:
            keep[idx] = False
            continue
        if budget + v > eps + 1e-15:
            break
        budget += v
        keep[idx] = False
    if not keep.any():
        raise DomainError("smoothing removed every eigenvalue")
    smallest = float(vals[keep].min())
    return float(-math.log2(smallest)), keep


def hmax_prime(state: DensitySystem, eps: float) -> tuple[float, DensitySystem]:
    spec = linalg.spectral(state.matrix)
    value, keep = hmax_prime_values(spec.values, eps)
    vals = np.where(keep, spec.values, 0.0)
    omega2 = (spec.vectors * vals) @ spec.vectors.conj().T
    return value, DensitySystem.from_matrix(omega2, state.shape)


def omega_triple_prime(state: DensitySystem, eps: float, delta: float) -> DensitySystem:
    """Zero out eigenvalues below 2^(-(1+delta) * alternate max-entropy)."""
    if delta < 0:
        raise DomainError("delta must be nonnegative")
    spec = linalg.spectral(state.matrix)
    value, _ = hmax_prime_values(spec.values, eps)
    tau = 2.0 ** (-(1.0 + delta) * value)
    vals = np.where(spec.values >= tau * (1.0 - 1e-9), spec.values, 0.0)
    out = (spec.vectors * vals) @ spec.vectors.conj().T
    return DensitySystem.from_matrix(out, state.shape)


def h2_prime(omega: DensitySystem, eps: float, delta: float,
             given: str = "B") -> tuple[float, DensitySystem]:
    """Conditional collision entropy against the truncated marginal weight.

    The canonical feasible point keeps eigenvectors of omega whose overlap
    with the truncated-marginal support is at least 1 - eps, dropping the
    offenders first and then the smallest eigenvalues while the removed
    mass stays within eps.
    """
    omega_b = omega.marginal([given])
    w3 = omega_triple_prime(omega_b, eps, delta)
    proj = _support_projector(w3.matrix)
    proj_full = embed_on_labels(proj, omega.shape, [given])

    spec = linalg.spectral(omega.matrix)
    lmax = float(spec.values.max(initial=0.0))
    removed = 0.0
    keep = []
    forced_out = []
    for i, v in enumerate(spec.values):
        if v <= RANK_FLOOR * lmax:
            continue
        overlap = float(np.real(spec.vectors[:, i].conj() @ (proj_full @ spec.vectors[:, i])))
        if overlap < 1.0 - eps - 1e-12:
            forced_out.append(i)
            removed += v
        else:
            keep.append(i)
    if removed > eps + 1e-12:
        raise DomainError(
            f"support condition forces out mass {removed:.3e} beyond epsilon {eps}"
        )
    keep.sort(key=lambda i: (spec.values[i], i))
    while keep and removed + spec.values[keep[0]] <= eps + 1e-15:
        removed += spec.values[keep.pop(0)]
    if not keep:
        raise DomainError("smoothing removed every eigenvector")
    vals = np.zeros_like(spec.values)
    vals[keep] = spec.values[keep]
    eta = (spec.vectors * vals) @ spec.vectors.conj().T
    norm = linalg.schatten_norm(
        conj_by_inverse_quarter(eta, omega.shape, w3.matrix, [given]), 2
    )
    value = float(-2.0 * math.log2(norm))
    return value, DensitySystem.from_matrix(eta, omega.shape)


def h2_upper_bound_check(rho: DensitySystem, cfg: SmoothingConfig,
                         given=None) -> dict:
    """Compare the certified collision value against its dimension bound:
    the smoothed value may not exceed H(A|B) + 8 eps log|A| + 2 + 2 log(1/eps).
    """
    if cfg.epsilon <= 0:
        raise DomainError("the dimension bound needs epsilon > 0")
    given = rho.shape.names[-1] if given is None else given
    given_list = [given] if isinstance(given, str) else list(given)
    a_labels = [n for n in rho.shape.names if n not in given_list]
    dim_a = rho.shape.dim_of_all(a_labels)
    value = h2_conditional(rho, cfg, "fixed_marginal", given)
    rhs = (
        shannon(rho, given=given_list)
        + 8.0 * cfg.epsilon * math.log2(dim_a)
        + 2.0
        + 2.0 * math.log2(1.0 / cfg.epsilon)
    )
    return {
        "value_bits": value,
        "bound_bits": rhs,
        "ok": bool(value <= rhs + 1e-9),
    }

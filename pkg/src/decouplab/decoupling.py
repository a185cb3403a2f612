"""Decoupling functionals and their concentration parameters.

The objects here follow one construction. A state on A (x) R is pushed
through a channel on A after a random unitary; the 1-norm deviation from
the product of the channel's fixed output with the reference marginal is
the decoupling error f. A weighted 2-norm surrogate g dominates f (exactly
when no smoothing is used, up to explicit slack otherwise), concentrates at
Lipschitz speed on the unitary group, and has closed-form Haar moments.
All entropic inputs are certified one-sided values from the entropy module,
so every derived bound stays a true bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import entropy, linalg, quantum
from .entropy import SmoothingConfig
from .errors import ComputationError, DimensionError, DomainError
from .linalg import SystemShape
from .quantum import ChannelStinespring, DensitySystem


def _pow2(x: float) -> float:
    """2^x as a float, mapping overflow to inf instead of raising."""
    try:
        return 2.0 ** x
    except OverflowError:
        return math.inf


@dataclass(frozen=True)
class DecouplingInstance:
    """A state on A (x) R plus a channel acting on the A block.

    The labels forming A must be a prefix of the state's shape; everything
    after them is the reference R.
    """

    rho: DensitySystem
    channel: ChannelStinespring
    cfg: SmoothingConfig
    a_labels: tuple[str, ...] = ("A",)

    def __post_init__(self):
        names = self.rho.shape.names
        if names[: len(self.a_labels)] != tuple(self.a_labels):
            raise DimensionError(
                f"a_labels {self.a_labels} must be a prefix of {names}"
            )
        if len(self.a_labels) == len(names):
            raise DimensionError("instance needs at least one reference label")
        if self.rho.shape.dim_of_all(self.a_labels) != self.channel.a_dim:
            raise DimensionError("channel input does not match the A block")
        if abs(self.rho.mass - 1.0) > 1e-9:
            raise DomainError("instance state must be normalised")

    @property
    def r_labels(self) -> tuple[str, ...]:
        return tuple(n for n in self.rho.shape.names if n not in self.a_labels)

    @property
    def a_dim(self) -> int:
        return self.channel.a_dim

    @property
    def r_dim(self) -> int:
        return self.rho.shape.dim_of_all(self.r_labels)


@dataclass(frozen=True)
class Weights:
    """Precomputed smoothing witnesses and weighted operators for g.

    rho_s / xi certify the collision entropy of the input; eta / omega3
    certify the channel side. povm is the measurement on the dilation's
    environment steering the maximally entangled input to eta; it is None
    when epsilon = 0, where the plain channel already does.
    """

    rho_s: np.ndarray
    xi: np.ndarray
    rho_tilde: np.ndarray
    rho_tilde_r: np.ndarray
    choi: DensitySystem
    eta: np.ndarray
    omega3: np.ndarray
    povm: np.ndarray | None
    omega_tilde: np.ndarray
    omega_tilde_b: np.ndarray
    h2_eps: float
    h2_prime_val: float
    hmax_prime_val: float
    n_r: float
    n_ar: float
    n_b: float
    n_ab: float
    warnings: tuple[str, ...]


def prepare(inst: DecouplingInstance, weight_mode: str = "fixed_marginal") -> Weights:
    cfg = inst.cfg
    r_labels = list(inst.r_labels)
    h2_eps, rho_s, xi, warns = entropy.h2_with_witness(
        inst.rho, cfg, weight_mode=weight_mode, given=r_labels
    )
    rho_tilde = entropy.conj_by_inverse_quarter(rho_s, inst.rho.shape, xi, r_labels)
    rho_tilde_r = linalg.partial_trace(rho_tilde, inst.rho.shape, list(inst.a_labels))

    choi = quantum.choi_state(inst.channel, labels=("B", "Ap"))
    choi_b = choi.marginal(["B"])
    hmax_prime_val, _ = entropy.hmax_prime(choi_b, cfg.epsilon)
    omega3 = entropy.omega_triple_prime(choi_b, cfg.epsilon, cfg.delta)
    h2_prime_val, eta_ds = entropy.h2_prime(choi, cfg.epsilon, cfg.delta, given="B")

    povm = None
    if cfg.epsilon > 0:
        povm = _environment_povm(inst.channel, eta_ds.matrix)

    omega_tilde = entropy.conj_by_inverse_quarter(
        eta_ds.matrix, choi.shape, omega3.matrix, ["B"]
    )
    omega_tilde_b = linalg.partial_trace(omega_tilde, choi.shape, ["Ap"])

    n_r = linalg.schatten_norm(rho_tilde_r, 2) ** 2
    n_ar = linalg.schatten_norm(rho_tilde, 2) ** 2
    n_b = linalg.schatten_norm(omega_tilde_b, 2) ** 2
    n_ab = linalg.schatten_norm(omega_tilde, 2) ** 2
    if abs(2.0 ** (-h2_eps) - n_ar) > 1e-8 * max(1.0, n_ar):
        raise ComputationError("witness norm does not match its entropy value")
    if abs(2.0 ** (-h2_prime_val) - n_ab) > 1e-8 * max(1.0, n_ab):
        raise ComputationError("channel witness norm does not match its entropy value")
    return Weights(
        rho_s=rho_s, xi=xi, rho_tilde=rho_tilde, rho_tilde_r=rho_tilde_r,
        choi=choi, eta=eta_ds.matrix, omega3=omega3.matrix, povm=povm,
        omega_tilde=omega_tilde, omega_tilde_b=omega_tilde_b,
        h2_eps=h2_eps, h2_prime_val=h2_prime_val, hmax_prime_val=hmax_prime_val,
        n_r=n_r, n_ar=n_ar, n_b=n_b, n_ab=n_ab, warnings=warns,
    )


def _environment_povm(channel: ChannelStinespring, eta: np.ndarray) -> np.ndarray:
    """The measurement P on Z with (measured channel (x) id)(EPR) = eta."""
    da, dc = channel.a_dim, channel.c_dim
    db, dz = channel.b_dim, channel.z_dim
    phi = np.zeros((da, dc, da), dtype=complex)
    for a in range(da):
        phi[a, 0, a] = 1.0 / math.sqrt(da)
    w = np.kron(np.asarray(channel.v, dtype=complex), np.eye(da))
    psi = (w @ phi.reshape(da * dc * da)).reshape(db, dz, da)
    psi = psi.transpose(0, 2, 1).reshape(db * da * dz)  # order (B, Ap, Z)
    shp = linalg.shape(("X", db * da), ("Z", dz))
    psi_ds = DensitySystem.from_matrix(np.outer(psi, psi.conj()), shp)
    return quantum.povm_completion(psi_ds, eta)


def _evolved(inst: DecouplingInstance, state: np.ndarray, u: np.ndarray) -> np.ndarray:
    big = np.kron(np.asarray(u, dtype=complex), np.eye(inst.r_dim))
    return big @ state @ big.conj().T


def f_value(inst: DecouplingInstance, u: np.ndarray,
            choi_b: np.ndarray | None = None) -> float:
    """1-norm decoupling error of the true state under the true channel."""
    if choi_b is None:
        choi_b = quantum.choi_state(inst.channel).marginal(["B"]).matrix
    x = _evolved(inst, inst.rho.matrix, u)
    y, _ = inst.channel.apply_matrix(x, inst.rho.shape, block=inst.a_labels)
    rho_r = inst.rho.marginal(list(inst.r_labels)).matrix
    return linalg.schatten_norm(y - np.kron(choi_b, rho_r), 1)


def g_value(inst: DecouplingInstance, u: np.ndarray, w: Weights) -> float:
    """Weighted 2-norm surrogate evaluated with the prepared witnesses."""
    x = _evolved(inst, w.rho_tilde, u)
    y, yshape = inst.channel.apply_matrix(
        x, inst.rho.shape, block=inst.a_labels, z_povm=w.povm
    )
    y = entropy.conj_by_inverse_quarter(y, yshape, w.omega3, ["B"])
    return linalg.schatten_norm(y - np.kron(w.omega_tilde_b, w.rho_tilde_r), 2)


@dataclass(frozen=True)
class HaarMoments:
    """Closed-form second moment of g over the Haar measure."""

    alpha: float
    beta: float
    eta: float
    expected_g_squared: float
    mu_upper: float
    strict_upper: float


def haar_expected_g_squared(inst: DecouplingInstance, w: Weights) -> HaarMoments:
    da = float(inst.a_dim)
    if da < 2:
        raise DomainError("the Haar second moment needs |A| >= 2")
    eta_ratio = w.n_ab / w.n_b
    denom = da * da - 1.0
    alpha = w.n_b * (da * da - da * eta_ratio) / denom
    beta = w.n_ab * (da * da - da / eta_ratio) / denom
    e_g2 = alpha * w.n_r + beta * w.n_ar - w.n_b * w.n_r
    if e_g2 < -1e-9:
        raise ComputationError(f"closed-form second moment {e_g2:.3e} is negative")
    return HaarMoments(
        alpha=alpha, beta=beta, eta=eta_ratio,
        expected_g_squared=float(e_g2),
        mu_upper=float(math.sqrt(max(e_g2, 0.0))),
        strict_upper=float(w.n_ab * w.n_ar),
    )


def dupuis_expectation_bound(inst: DecouplingInstance) -> float:
    """Upper bound on the Haar mean of f from the two collision entropies.

    Evaluated at epsilon = 0 with fixed marginal weights; those certified
    values can only enlarge the bound, so it stays valid.
    """
    cfg0 = SmoothingConfig(epsilon=0.0, delta=0.0)
    h2_in = entropy.h2_conditional(inst.rho, cfg0, "fixed_marginal",
                                   given=list(inst.r_labels))
    choi = quantum.choi_state(inst.channel, labels=("B", "Ap"))
    h2_ch = entropy.h2_conditional(choi, cfg0, "fixed_marginal", given="B")
    return 2.0 ** (-0.5 * h2_in - 0.5 * h2_ch)


def lipschitz_bound(inst: DecouplingInstance, w: Weights) -> float:
    """Lipschitz constant of g in the Schatten 2-norm on the unitary group."""
    d = inst.cfg.delta
    return 2.0 * 2.0 ** (0.5 * (1.0 + d) * w.hmax_prime_val - 0.5 * w.h2_eps)


def max_g_bound(inst: DecouplingInstance, w: Weights) -> float:
    """Uniform bound on g over the whole unitary group."""
    d = inst.cfg.delta
    return math.sqrt(2.0 * inst.a_dim) * 2.0 ** (
        0.5 * (1.0 + d) * w.hmax_prime_val - 0.5 * w.h2_eps
    )


@dataclass(frozen=True)
class TailParameters:
    """Everything needed to state the expander tail bound for one instance."""

    mu: float
    a: float
    t: float
    lambda_required: float
    kappa: float
    epsilon: float
    delta: float
    threshold: float
    bound: float
    vacuous: bool
    eps_prime: float | None = None
    threshold_exponent: float | None = None

    def to_json(self) -> dict:
        out = {
            "mu": self.mu, "a": self.a, "t": self.t,
            "lambda_required": self.lambda_required, "kappa": self.kappa,
            "epsilon": self.epsilon, "delta": self.delta,
            "threshold": self.threshold, "bound": self.bound,
            "vacuous": self.vacuous,
        }
        if self.eps_prime is not None:
            out["eps_prime"] = self.eps_prime
            out["threshold_exponent"] = self.threshold_exponent
        return out


def tail_parameters(inst: DecouplingInstance, w: Weights, kappa: float,
                    mu: float) -> TailParameters:
    """Expander-ensemble tail: failure probability 5 * 2^(-a kappa^2) once the
    ensemble is a (|A|, s, lambda, 4t)-expander with lambda at most the
    reported requirement."""
    if mu >= 1.0:
        raise DomainError(f"mean bound mu = {mu} must be below one")
    if kappa <= 0:
        raise DomainError("kappa must be positive")
    if not inst.cfg.delta < 1.0 / 3.0:
        raise DomainError("tail arithmetic requires delta < 1/3")
    da, db = float(inst.a_dim), float(inst.channel.b_dim)
    eps, dlt = inst.cfg.epsilon, inst.cfg.delta
    a = da * 2.0 ** (-(1.0 + dlt) * w.hmax_prime_val + w.h2_eps - 9.0)
    t = math.ceil(8.0 * a * kappa * kappa)
    lam = (da**-8 * db**-6 * mu * mu) ** t
    threshold = (
        2.0 ** (-0.5 * w.h2_eps - 0.5 * w.h2_prime_val + 1.0)
        + 14.0 * math.sqrt(eps) + 2.0 * kappa
    )
    exponent = a * kappa * kappa
    return TailParameters(
        mu=mu, a=a, t=t, lambda_required=lam, kappa=kappa, epsilon=eps,
        delta=dlt, threshold=threshold, bound=5.0 * 2.0 ** (-exponent),
        vacuous=bool(exponent < math.log2(5.0)),
    )


def mu_squared_clause(a: float, e_g2: float, da: int, hmax_prime_val: float,
                      h2_eps: float, mu_estimate: float) -> dict:
    """Evaluate (never assume) the condition letting the second moment be
    replaced by eight times the squared mean."""
    lhs = a * e_g2 + math.log2(e_g2) if e_g2 > 0 else -math.inf
    rhs = math.log2(da) + hmax_prime_val - h2_eps
    return {
        "condition_lhs": lhs,
        "condition_rhs": rhs,
        "condition_active": bool(lhs > rhs),
        "second_moment": e_g2,
        "eight_mu_squared": 8.0 * mu_estimate * mu_estimate,
        "replacement_valid": bool(e_g2 <= 8.0 * mu_estimate * mu_estimate + 1e-12),
    }


def fqsw_instance(a1: int, a2: int, r: int, rho: DensitySystem | None = None,
                  cfg: SmoothingConfig | None = None,
                  seed: int = 0) -> tuple[DecouplingInstance, dict]:
    """Mother-protocol specialisation: trace out A2 from A = A1 (x) A2.

    Returns the instance plus a report with the closed-form Haar moment
    coefficients and the promise inequalities (reported, not enforced).
    """
    if a1 < 2 or a2 < 2:
        raise DomainError("both subsystem dimensions must be at least 2")
    shp = linalg.shape(("A1", a1), ("A2", a2), ("R", r))
    if rho is None:
        rho = quantum.random_state(shp, np.random.default_rng(seed))
    elif rho.shape.names != ("A1", "A2", "R"):
        raise DimensionError("fqsw state must carry labels A1, A2, R")
    channel = quantum.trace_out_channel(a1, a2)
    inst = DecouplingInstance(rho=rho, channel=channel,
                              cfg=cfg or SmoothingConfig(),
                              a_labels=("A1", "A2"))
    w = prepare(inst)
    moments = haar_expected_g_squared(inst, w)
    denom = float(a1 * a1 * a2 * a2 - 1)
    alpha_closed = (a1 * a1 * a2 * a2 - a1 * a1) / denom
    beta_closed = (a1 / a2) * (a1 * a1 * a2 * a2 - a2 * a2) / denom
    e_g2_closed = (-(a1 * a1 - 1) / denom) * w.n_r + beta_closed * w.n_ar
    h2 = w.h2_eps
    report = {
        "alpha_closed": alpha_closed,
        "beta_closed": beta_closed,
        "eta_closed": a1 / a2,
        "expected_g_squared_closed": e_g2_closed,
        "second_moment_window": (0.07 * (a1 / a2) * w.n_ar, (a1 / a2) * w.n_ar),
        "tail_a": a2 * 2.0 ** (h2 - 9.0),
        "promises": {
            "reference_norm_ratio": bool(w.n_r < 0.9 * a1 * a2 * w.n_ar),
            "a1_at_least_two": bool(a1 >= 2),
            "a2_exceeds_a1": bool(a2 > a1),
            "log_gap_strict": bool(
                a2 * 2.0 ** (h2 - 8.0) - 4.0
                > -h2 + math.log2(a1) + 2.0 * math.log2(a2)
            ),
            "log_gap_loose": bool(
                a2 * 2.0 ** (h2 - 8.0) - 4.0
                > 2.0 * math.log2(a1) + 3.0 * math.log2(a2)
            ),
        },
    }
    return inst, report


def fqsw_lambda_sandwich(a1: int, a2: int, h2: float, t: float) -> tuple[float, float]:
    """Expander-quality window implied by the second-moment window."""
    base = float(a2) ** -9 * float(a1) ** -13 * 2.0 ** (-h2)
    return ((0.008 * base) ** t, base**t)


def thermalization_check(rho: DensitySystem, s_dim: int, e_dim: int,
                         kappa: float, ensemble, samples: int,
                         cfg: SmoothingConfig | None = None,
                         embed: np.ndarray | None = None) -> dict:
    """Fraction of sampled global unitaries after which the small subsystem
    is close to its fixed output alongside the untouched reference.

    The evolving system is the first label of rho; embed, when given, is an
    isometry from it into S (x) E (defaults to the identity, requiring the
    dimensions to factor exactly). The smoothing default follows the
    kappa-squared-over-sixty rule of the statement.
    """
    omega_label = rho.shape.names[0]
    d_omega = rho.shape.dim_of(omega_label)
    if embed is None:
        if d_omega != s_dim * e_dim:
            raise DimensionError("system dimension must equal |S| |E| without an embedding")
        channel = quantum.trace_out_channel(s_dim, e_dim)
    else:
        channel = quantum.isometry_channel(np.asarray(embed, dtype=complex),
                                           b_dim=s_dim, z_dim=e_dim)
        if channel.a_dim != d_omega:
            raise DimensionError("embedding does not match the system dimension")
    if cfg is None:
        cfg = SmoothingConfig(epsilon=kappa * kappa / 60.0, delta=0.0)
    inst = DecouplingInstance(rho=rho, channel=channel, cfg=cfg,
                              a_labels=(omega_label,))
    w = prepare(inst)
    moments = haar_expected_g_squared(inst, w)
    choi_b = w.choi.marginal(["B"]).matrix
    distances = np.array([
        f_value(inst, ensemble.sample(i), choi_b=choi_b) for i in range(samples)
    ])
    fraction = float((distances <= kappa).mean())
    mu = moments.mu_upper
    tail = None
    if mu < 1.0:
        tail = tail_parameters(inst, w, kappa, mu)
    h2, h2p = w.h2_eps, w.h2_prime_val
    report = {
        "samples": samples,
        "kappa": kappa,
        "distances": [float(d) for d in distances],
        "thermalized_fraction": fraction,
        "predicted_fraction_lower": None if tail is None else max(0.0, 1.0 - tail.bound),
        "mean_distance": float(distances.mean()),
        "max_distance": float(distances.max()),
        "h2_input": h2,
        "h2_prime_channel": h2p,
        "hmax_prime_subsystem": w.hmax_prime_val,
        "tail": None if tail is None else tail.to_json(),
        "promises": {
            "mean_within_quarter_kappa": bool(2.0 ** (-0.5 * h2 - 0.5 * h2p) <= kappa / 4.0),
            "channel_entropy_dominated": bool(h2p <= math.log2(d_omega / s_dim) + 1e-12),
            "subsystem_large_enough": bool(s_dim > 2),
            "subsystem_weight_logarithmic": float(
                w.hmax_prime_val / max(math.log2(s_dim), 1e-12)
            ),
            "reference_norm_ratio": bool(w.n_r < 0.9 * d_omega * w.n_ar),
            "log_gap": bool(
                (d_omega / s_dim) * 2.0 ** (h2 - h2p - 14.0) > 2.0 * math.log2(d_omega)
            ),
        },
    }
    return report


def iid_parameters(inst: DecouplingInstance, n: int, kappa: float) -> TailParameters:
    """Many-copy tail parameters from single-copy Shannon quantities.

    Pure arithmetic: no operator on the n-fold space is ever formed. The
    reported t follows the many-copy statement's own display rather than
    the single-shot ceiling rule.
    """
    if n < 1:
        raise DomainError("copy count must be positive")
    if kappa <= 0:
        raise DomainError("kappa must be positive")
    eps, dlt = inst.cfg.epsilon, inst.cfg.delta
    if not dlt < 1.0 / 3.0:
        raise DomainError("tail arithmetic requires delta < 1/3")
    if eps <= 0:
        # eps' enters as log2(1/eps'), so a zero budget has no finite reading
        raise DomainError("many-copy parameters require epsilon > 0")
    da, db = float(inst.a_dim), float(inst.channel.b_dim)
    r_labels = list(inst.r_labels)
    choi = quantum.choi_state(inst.channel, labels=("B", "Ap"))
    h_a_r = entropy.shannon(inst.rho, given=r_labels)
    h_ar = entropy.shannon(inst.rho)
    h_r = entropy.shannon(inst.rho.marginal(r_labels))
    h_ap_b = entropy.shannon(choi, given="B")
    h_apb = entropy.shannon(choi)
    h_b = entropy.shannon(choi.marginal(["B"]))

    dab = da * db
    eps_prime = 8.0 * (n + dab) ** dab * eps**0.25
    exponent = (
        -(n / 2.0) * (h_a_r - dlt * (3.0 * h_ar + 7.0 * h_r))
        - (n / 2.0) * (h_ap_b - dlt * (3.0 * h_apb + 7.0 * h_b))
    )
    # many-copy exponents overflow floats at modest n, so stay in log2 space
    mu = _pow2(exponent)
    threshold = mu + 28.0 * eps_prime**0.25 + 2.0 * kappa
    a = _pow2(
        n * math.log2(da)
        + n * (h_a_r - dlt * (3.0 * h_ar + 7.0 * h_r))
        - n * h_b * (1.0 + 7.0 * dlt) - 9.0
    )
    t_raw = _pow2(
        n * math.log2(da) + 2.0 * math.log2(kappa)
        + n * (h_a_r + 32.0 * math.sqrt(eps_prime))
        + math.log2(1.0 / eps_prime) - n * h_b * (1.0 - 5.0 * dlt) - 6.0
    )
    t = math.ceil(t_raw) if math.isfinite(t_raw) else t_raw
    lam = 0.0
    if math.isfinite(t):
        lam = _pow2(
            t * (-8.0 * n * math.log2(da) - 6.0 * n * math.log2(db) + 2.0 * exponent)
        )
    tail_exp = a * kappa * kappa
    return TailParameters(
        mu=mu, a=a, t=t, lambda_required=lam, kappa=kappa, epsilon=eps,
        delta=dlt, threshold=threshold, bound=5.0 * 2.0 ** (-tail_exp),
        vacuous=bool(tail_exp < math.log2(5.0)),
        eps_prime=eps_prime, threshold_exponent=exponent,
    )


def channel_swap_norm_check(channel: ChannelStinespring) -> dict:
    """Two-sided flip identity: pushing the swap through the doubled channel
    or its adjoint gives equal 2-norms, both at most the dilation 2-norm
    to the fourth power."""
    da, db = channel.a_dim, channel.b_dim
    f_a = linalg.swap_operator(da)
    shp_a = linalg.shape(("X1", da), ("X2", da))
    y1, s1 = channel.apply_matrix(f_a, shp_a, block=("X1",), out_label="Y1")
    y2, _ = channel.apply_matrix(y1, s1, block=("X2",), out_label="Y2")
    forward = linalg.schatten_norm(y2, 2)

    f_b = linalg.swap_operator(db)
    shp_b = linalg.shape(("N1", db), ("N2", db))
    z1, t1 = channel.apply_adjoint_matrix(f_b, shp_b, block=("N1",), out_label="M1")
    z2, _ = channel.apply_adjoint_matrix(z1, t1, block=("N2",), out_label="M2")
    adjoint = linalg.schatten_norm(z2, 2)

    dilation = linalg.schatten_norm(channel.v, 2) ** 4
    return {
        "norm_forward": forward,
        "norm_adjoint": adjoint,
        "dilation_bound": dilation,
        "equality_gap": abs(forward - adjoint),
        "ok": bool(abs(forward - adjoint) <= 1e-8 * max(1.0, forward)
                   and forward <= dilation + 1e-8),
    }

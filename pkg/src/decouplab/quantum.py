"""States, Stinespring channels and the operator lemmas the decoupling chain rests on.

A channel is stored purely through its Stinespring dilation: an operator
v on A (x) C -> B (x) Z together with the four dimensions. Applying the
channel appends the fixed ancilla |0><0| on C, conjugates by v, and traces
out Z. Completely positive trace-non-increasing maps carry a contraction
instead of a unitary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import ComputationError, DimensionError, DomainError
from .linalg import SystemShape

STATE_EIG_TOL = 1e-10
TRACE_TOL = 1e-10


@dataclass(frozen=True)
class DensitySystem:
    """A positive semidefinite operator with a declared trace (mass).

    Normalised states have mass 1; smoothing steps produce subnormalised
    ones, so the mass is stored explicitly and checked against the matrix.
    """

    matrix: np.ndarray
    shape: SystemShape
    mass: float = 1.0

    def __post_init__(self):
        m = linalg.as_matrix(self.matrix)
        self.shape.check_matrix(m)
        if not linalg.is_hermitian(m, tol=linalg.HERM_TOL):
            raise DomainError("density matrix is not Hermitian within tolerance")
        low = float(np.linalg.eigvalsh(linalg.hermitianize(m)).min()) if m.size else 0.0
        if low < -STATE_EIG_TOL:
            raise DomainError(f"density matrix has eigenvalue {low:.3e} below -1e-10")
        tr = float(np.real(np.trace(m)))
        if abs(tr - self.mass) > TRACE_TOL:
            raise DomainError(
                f"trace {tr:.12f} differs from declared mass {self.mass:.12f}"
            )

    @classmethod
    def from_matrix(cls, m: np.ndarray, shape: SystemShape) -> "DensitySystem":
        """Build with the mass read off from the matrix itself."""
        return cls(matrix=np.asarray(m, dtype=complex), shape=shape,
                   mass=float(np.real(np.trace(m))))

    @property
    def dim(self) -> int:
        return self.shape.dim

    def partial_trace(self, traced) -> "DensitySystem":
        out = linalg.partial_trace(self.matrix, self.shape, traced)
        return DensitySystem(out, self.shape.drop(traced), mass=self.mass)

    def marginal(self, kept) -> "DensitySystem":
        kept = [kept] if isinstance(kept, str) else list(kept)
        traced = [n for n in self.shape.names if n not in kept]
        return self.partial_trace(traced)

    def permute(self, order) -> "DensitySystem":
        out = linalg.permute_systems(self.matrix, self.shape, order)
        labels = tuple((n, self.shape.dim_of(n)) for n in order)
        return DensitySystem(out, SystemShape(labels), mass=self.mass)

    def tensor(self, other: "DensitySystem") -> "DensitySystem":
        return DensitySystem(
            linalg.tensor(self.matrix, other.matrix),
            SystemShape(self.shape.labels + other.shape.labels),
            mass=self.mass * other.mass,
        )


def maximally_mixed(d: int, label: str = "A") -> DensitySystem:
    return DensitySystem(np.eye(d, dtype=complex) / d, linalg.shape((label, d)))


def epr_state(d: int, labels: tuple[str, str] = ("A", "Ap")) -> DensitySystem:
    """Maximally entangled state (1/sqrt d) sum_a |aa> as a density operator."""
    if d < 1:
        raise DimensionError(f"dimension must be positive, got {d}")
    v = np.zeros(d * d, dtype=complex)
    for a in range(d):
        v[a * d + a] = 1.0 / np.sqrt(d)
    shp = linalg.shape((labels[0], d), (labels[1], d))
    return DensitySystem(np.outer(v, v.conj()), shp)


@dataclass(frozen=True)
class ChannelStinespring:
    """CP map T(M) = Tr_Z[ v (M (x) |0><0|^C) v^dag ] with v: A(x)C -> B(x)Z."""

    v: np.ndarray
    a_dim: int
    c_dim: int
    b_dim: int
    z_dim: int
    trace_preserving: bool = True

    def __post_init__(self):
        v = linalg.as_matrix(self.v)
        if self.a_dim * self.c_dim != self.b_dim * self.z_dim:
            raise DimensionError(
                f"|A||C| = {self.a_dim * self.c_dim} must equal "
                f"|B||Z| = {self.b_dim * self.z_dim}"
            )
        if v.shape[0] != self.b_dim * self.z_dim:
            raise DimensionError("stinespring operator does not match the dimensions")
        if self.trace_preserving:
            err = float(np.abs(v.conj().T @ v - np.eye(v.shape[0])).max())
            if err > 1e-9:
                raise DomainError(
                    f"trace-preserving channel needs a unitary dilation, defect {err:.2e}"
                )
        else:
            top = linalg.schatten_norm(v, np.inf)
            if top > 1.0 + 1e-9:
                raise DomainError(f"contraction required: ||v||_inf = {top:.12f} > 1")

    def apply_matrix(
        self,
        m: np.ndarray,
        shp: SystemShape,
        block: tuple[str, ...] | None = None,
        out_label: str = "B",
        z_povm: np.ndarray | None = None,
    ) -> tuple[np.ndarray, SystemShape]:
        """Apply to the named block of an arbitrary matrix on shp.

        The output label comes first, followed by the untouched labels in
        their original order. z_povm, when given, is sandwiched on Z before
        the partial trace (used for measured dilations).
        """
        block = _resolve_block(shp, self.a_dim, block)
        rest = [n for n in shp.names if n not in block]
        ordered = linalg.permute_systems(m, shp, list(block) + rest)
        da, dc, db, dz = self.a_dim, self.c_dim, self.b_dim, self.z_dim
        ds = shp.dim // da
        # insert the |0><0| ancilla on C between the block and the rest
        x = ordered.reshape(da, ds, da, ds)
        y = np.zeros((da, dc, ds, da, dc, ds), dtype=complex)
        y[:, 0, :, :, 0, :] = x
        y = y.reshape(da * dc * ds, da * dc * ds)
        w = np.kron(np.asarray(self.v, dtype=complex), np.eye(ds))
        y = w @ y @ w.conj().T  # now on B (x) Z (x) rest
        if z_povm is not None:
            p = np.kron(np.kron(np.eye(db), np.asarray(z_povm, dtype=complex)), np.eye(ds))
            y = p @ y @ p.conj().T
        mid = SystemShape(
            ((out_label, db), ("__z__", dz)) + tuple((n, shp.dim_of(n)) for n in rest)
        )
        out = linalg.partial_trace(y, mid, ["__z__"])
        return out, mid.drop(["__z__"])

    def apply(self, state: DensitySystem, block=None, out_label: str = "B") -> DensitySystem:
        out, new_shape = self.apply_matrix(state.matrix, state.shape, block, out_label)
        return DensitySystem.from_matrix(out, new_shape)

    def apply_adjoint_matrix(
        self,
        m: np.ndarray,
        shp: SystemShape,
        block: tuple[str, ...] | None = None,
        out_label: str = "A",
    ) -> tuple[np.ndarray, SystemShape]:
        """Adjoint map T^dag(N) = (I (x) <0|^C) v^dag (N (x) I^Z) v (I (x) |0>^C)."""
        block = _resolve_block(shp, self.b_dim, block)
        rest = [n for n in shp.names if n not in block]
        ordered = linalg.permute_systems(m, shp, list(block) + rest)
        da, dc, db, dz = self.a_dim, self.c_dim, self.b_dim, self.z_dim
        ds = shp.dim // db
        x = ordered.reshape(db, ds, db, ds)
        y = np.zeros((db, dz, ds, db, dz, ds), dtype=complex)
        for z in range(dz):
            y[:, z, :, :, z, :] = x
        y = y.reshape(db * dz * ds, db * dz * ds)
        w = np.kron(np.asarray(self.v, dtype=complex), np.eye(ds))
        y = w.conj().T @ y @ w  # now on A (x) C (x) rest
        y = y.reshape(da, dc, ds, da, dc, ds)[:, 0, :, :, 0, :]
        out = y.reshape(da * ds, da * ds)
        labels = ((out_label, da),) + tuple((n, shp.dim_of(n)) for n in rest)
        return out, SystemShape(labels)


def _resolve_block(shp: SystemShape, in_dim: int, block) -> tuple[str, ...]:
    if block is not None:
        block = tuple(block)
        if shp.dim_of_all(block) != in_dim:
            raise DimensionError(
                f"block {block} has dimension {shp.dim_of_all(block)}, channel wants {in_dim}"
            )
        return block
    prod = 1
    take = []
    for name, d in shp.labels:
        prod *= d
        take.append(name)
        if prod == in_dim:
            return tuple(take)
        if prod > in_dim:
            break
    raise DimensionError(
        f"no label prefix of {shp.names} matches channel input dimension {in_dim}"
    )


def apply_channel(t: ChannelStinespring, state: DensitySystem,
                  block=None, out_label: str = "B") -> DensitySystem:
    return t.apply(state, block=block, out_label=out_label)


def choi_state(t: ChannelStinespring, labels: tuple[str, str] = ("B", "Ap")) -> DensitySystem:
    """(T (x) id) applied to the maximally entangled state; output label first."""
    phi = epr_state(t.a_dim, labels=("A", labels[1]))
    return t.apply(phi, block=("A",), out_label=labels[0])


def identity_channel(d: int) -> ChannelStinespring:
    return ChannelStinespring(v=np.eye(d, dtype=complex), a_dim=d, c_dim=1,
                              b_dim=d, z_dim=1, trace_preserving=True)


def trace_out_channel(d_keep: int, d_traced: int) -> ChannelStinespring:
    """Tr over the second factor of A = keep (x) traced; B = keep, Z = traced."""
    d = d_keep * d_traced
    return ChannelStinespring(v=np.eye(d, dtype=complex), a_dim=d, c_dim=1,
                              b_dim=d_keep, z_dim=d_traced, trace_preserving=True)


def isometry_channel(w: np.ndarray, b_dim: int, z_dim: int) -> ChannelStinespring:
    """Channel M -> Tr_Z[w M w^dag] for an isometry or unitary w: A -> B (x) Z."""
    w = np.asarray(w, dtype=complex)
    a_dim = w.shape[1]
    if w.shape[0] != b_dim * z_dim:
        raise DimensionError("isometry output dimension must equal |B||Z|")
    if a_dim == b_dim * z_dim:
        return ChannelStinespring(v=w, a_dim=a_dim, c_dim=1, b_dim=b_dim,
                                  z_dim=z_dim, trace_preserving=True)
    v = complete_isometry(w)
    c_dim = (b_dim * z_dim) // a_dim
    if a_dim * c_dim != b_dim * z_dim:
        raise DimensionError("isometry dimensions do not embed into a unitary dilation")
    # reorder columns so that column (a, c=0) carries w[:, a]
    full = np.zeros_like(v)
    extra = [j for j in range(v.shape[1]) if j >= a_dim]
    k = 0
    for a in range(a_dim):
        full[:, a * c_dim] = v[:, a]
        for c in range(1, c_dim):
            full[:, a * c_dim + c] = v[:, extra[k]]
            k += 1
    return ChannelStinespring(v=full, a_dim=a_dim, c_dim=c_dim, b_dim=b_dim,
                              z_dim=z_dim, trace_preserving=True)


def complete_isometry(cols: np.ndarray) -> np.ndarray:
    """Extend orthonormal columns to a full unitary via the SVD null basis."""
    cols = np.asarray(cols, dtype=complex)
    d, k = cols.shape
    gram_err = float(np.abs(cols.conj().T @ cols - np.eye(k)).max())
    if gram_err > 1e-9:
        raise DomainError(f"columns are not orthonormal, defect {gram_err:.2e}")
    if k == d:
        return cols.copy()
    u, _, _ = np.linalg.svd(cols, full_matrices=True)
    proj = cols @ cols.conj().T
    comp = u[:, k:]
    comp = comp - proj @ comp
    q, _ = np.linalg.qr(comp)
    return np.hstack([cols, q[:, : d - k]])


def channel_from_kraus(kraus: list[np.ndarray], a_dim: int, b_dim: int) -> ChannelStinespring:
    """Assemble a trace-preserving Stinespring dilation from Kraus operators."""
    ks = [np.asarray(k, dtype=complex) for k in kraus]
    for k in ks:
        if k.shape != (b_dim, a_dim):
            raise DimensionError(f"kraus operator has shape {k.shape}, expected {(b_dim, a_dim)}")
    total = sum(k.conj().T @ k for k in ks)
    if float(np.abs(total - np.eye(a_dim)).max()) > 1e-9:
        raise DomainError("kraus operators do not sum to the identity")
    z_dim = len(ks)
    while (b_dim * z_dim) % a_dim != 0:
        z_dim += 1
    v0 = np.zeros((b_dim * z_dim, a_dim), dtype=complex)
    for zi, k in enumerate(ks):
        for b in range(b_dim):
            v0[b * z_dim + zi, :] = k[b, :]
    full = isometry_channel(v0, b_dim=b_dim, z_dim=z_dim)
    return full


def purification_vector(rho: np.ndarray, env_dim: int | None = None) -> np.ndarray:
    """|rho> = sum_i sqrt(l_i) |v_i>|i> on A (x) E, E = computational basis."""
    spec = linalg.spectral(rho)
    d = rho.shape[0]
    env_dim = d if env_dim is None else env_dim
    lmax = float(spec.values.max(initial=0.0))
    keep = [i for i, lv in enumerate(spec.values) if lv > 1e-14 * max(lmax, 1.0)]
    if len(keep) > env_dim:
        raise DimensionError(f"rank {len(keep)} state cannot purify into dimension {env_dim}")
    v = np.zeros(d * env_dim, dtype=complex)
    for slot, i in enumerate(keep):
        v += np.sqrt(spec.values[i]) * np.kron(spec.vectors[:, i], _basis(env_dim, slot))
    return v


def _basis(d: int, i: int) -> np.ndarray:
    e = np.zeros(d, dtype=complex)
    e[i] = 1.0
    return e


def unitary_relating_purifications(
    psi0: np.ndarray, theta: np.ndarray, x_dim: int, y_dim: int
) -> np.ndarray:
    """Find U on Y with theta = (I_X (x) U) psi0 for equal X-marginal purifications.

    Both vectors live on X (x) Y. The construction runs through the shared
    eigenbasis of the X marginal and completes unitarily on the complement,
    which keeps degenerate marginals well defined.
    """
    m0 = np.asarray(psi0, dtype=complex).reshape(x_dim, y_dim)
    mt = np.asarray(theta, dtype=complex).reshape(x_dim, y_dim)
    marg0, margt = m0 @ m0.conj().T, mt @ mt.conj().T
    if float(np.abs(marg0 - margt).max()) > 1e-9:
        raise DomainError("the two vectors do not share an X marginal")
    spec = linalg.spectral(marg0)
    lmax = float(spec.values.max(initial=0.0))
    ks, ls = [], []
    for i, lv in enumerate(spec.values):
        if lv <= 1e-12 * max(lmax, 1.0):
            continue
        u_i = spec.vectors[:, i]
        ks.append(m0.conj().T @ u_i.conj() / np.sqrt(lv))
        ls.append(mt.conj().T @ u_i.conj() / np.sqrt(lv))
    k_mat = np.array(ks, dtype=complex).T if ks else np.zeros((y_dim, 0), dtype=complex)
    l_mat = np.array(ls, dtype=complex).T if ls else np.zeros((y_dim, 0), dtype=complex)
    k_full = complete_isometry(_reorthonormalize(k_mat))
    l_full = complete_isometry(_reorthonormalize(l_mat))
    w = l_full @ k_full.conj().T  # maps k_i -> l_i, complement -> complement
    u = w.conj()
    check = (np.kron(np.eye(x_dim), u) @ np.asarray(psi0, dtype=complex))
    err = float(np.linalg.norm(check - np.asarray(theta, dtype=complex)))
    if err > 1e-8 * max(1.0, float(np.linalg.norm(theta))):
        raise ComputationError(f"purification-joining unitary failed, residual {err:.2e}")
    return u


def _reorthonormalize(cols: np.ndarray) -> np.ndarray:
    if cols.shape[1] == 0:
        return cols
    q, r = np.linalg.qr(cols)
    d = np.diagonal(r)
    phase = np.where(np.abs(d) > 1e-14, d / np.abs(np.where(d == 0, 1, d)), 1.0)
    return q * phase.conj()


def povm_completion(psi: DensitySystem, rho_target: np.ndarray) -> np.ndarray:
    """Measurement operator P on the second factor steering psi's first marginal.

    psi must be pure on X (x) Z with rho_target <= psi^X; the returned P
    satisfies 0 <= P <= I and Tr_Z[(I (x) P) psi (I (x) P)] = rho_target
    to about 1e-8. The route: purify rho_target and the remainder into the
    same space, join the two purifications of psi^X by a unitary on Z plus
    a qubit flag, then cut out the flag block and take its positive polar part.
    """
    if len(psi.shape.labels) != 2:
        raise DimensionError("povm_completion expects a bipartite pure state")
    dx, dz = psi.shape.dims
    spec = linalg.spectral(psi.matrix)
    if spec.values[0] <= 0 or (psi.mass - spec.values[0]) > 1e-9:
        raise DomainError("povm_completion needs a pure input state")
    psi_vec = spec.vectors[:, 0] * np.sqrt(spec.values[0])
    psi_x = linalg.partial_trace(psi.matrix, psi.shape, [psi.shape.names[1]])
    sigma = psi_x - np.asarray(rho_target, dtype=complex)
    low = float(np.linalg.eigvalsh(linalg.hermitianize(sigma)).min())
    if low < -1e-9:
        raise DomainError(f"target is not dominated by the marginal, gap {low:.3e}")
    rho_vec = purification_vector(_clip_psd(rho_target), env_dim=dz)
    sigma_vec = purification_vector(_clip_psd(sigma), env_dim=dz)
    # theta on X (x) (Z (x) Q), Q a qubit flag
    theta = _attach_flag(rho_vec, dx, dz, 0) + _attach_flag(sigma_vec, dx, dz, 1)
    psi0 = _attach_flag(psi_vec, dx, dz, 0)
    u = unitary_relating_purifications(psi0, theta, x_dim=dx, y_dim=2 * dz)
    m = u.reshape(dz, 2, dz, 2)[:, 0, :, 0]
    if linalg.schatten_norm(m, np.inf) > 1.0 + 1e-8:
        raise ComputationError("extracted block is not a contraction")
    _, p = linalg.polar_decompose(m)
    achieved = _steered_marginal(psi.matrix, psi.shape, p)
    err = float(np.abs(achieved - rho_target).max())
    if err > 1e-7:
        raise ComputationError(f"povm completion missed the target by {err:.2e}")
    return p


def _clip_psd(m: np.ndarray) -> np.ndarray:
    spec = linalg.spectral(np.asarray(m, dtype=complex))
    vals = np.clip(spec.values, 0.0, None)
    return (spec.vectors * vals) @ spec.vectors.conj().T


def _attach_flag(vec: np.ndarray, dx: int, dz: int, flag: int) -> np.ndarray:
    t = np.zeros((dx, dz, 2), dtype=complex)
    t[:, :, flag] = np.asarray(vec, dtype=complex).reshape(dx, dz)
    return t.reshape(dx * dz * 2)


def _steered_marginal(psi_m: np.ndarray, shp: SystemShape, p: np.ndarray) -> np.ndarray:
    dx, dz = shp.dims
    op = np.kron(np.eye(dx), p)
    return linalg.partial_trace(op @ psi_m @ op.conj().T, shp, [shp.names[1]])


def random_psd(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = dim if rank is None else rank
    g = (rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))) / np.sqrt(2)
    return g @ g.conj().T


def random_density(dim: int, rng: np.random.Generator,
                   rank: int | None = None) -> np.ndarray:
    m = random_psd(dim, rng, rank)
    return m / np.real(np.trace(m))


def random_state(shape: SystemShape, rng: np.random.Generator,
                 rank: int | None = None) -> DensitySystem:
    return DensitySystem(random_density(shape.dim, rng, rank), shape)


def random_pure_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_contraction(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Random operator with singular values in (0, 1]."""
    u1 = linalg.random_unitary(dim, rng)
    u2 = linalg.random_unitary(dim, rng)
    s = rng.uniform(0.2, 1.0, size=dim)
    return (u1 * s) @ u2


def random_channel(a_dim: int, b_dim: int, rng: np.random.Generator,
                   trace_preserving: bool = True) -> ChannelStinespring:
    """Random channel A -> B with environment Z = A and ancilla C = B."""
    d = a_dim * b_dim
    if trace_preserving:
        v = linalg.random_unitary(d, rng)
    else:
        v = random_contraction(d, rng)
    return ChannelStinespring(v=v, a_dim=a_dim, c_dim=b_dim, b_dim=b_dim,
                              z_dim=a_dim, trace_preserving=trace_preserving)


def dominance_lemmas_check(instances: int = 500, seed: int = 0) -> dict:
    """Numerically exercise the two operator dominance facts on random data.

    First fact: rho' >= rho and Tr rho' <= Tr sigma imply
    ||rho' - sigma||_1 <= 2 ||rho - sigma||_1. Second fact: for 0 <= P <= I
    on B, Tr_B[(I (x) P) rho^{AB} (I (x) P)] <= rho^A.
    """
    rng = np.random.default_rng(seed)
    worst1 = worst2 = -np.inf
    for _ in range(instances):
        d = int(rng.integers(2, 5))
        rho = random_psd(d, rng)
        rho = rho / np.real(np.trace(rho)) * rng.uniform(0.3, 1.0)
        rho_p = rho + random_psd(d, rng, rank=int(rng.integers(1, d + 1))) * rng.uniform(0.0, 0.5)
        sigma = random_psd(d, rng)
        sigma = sigma / np.real(np.trace(sigma)) * (np.real(np.trace(rho_p)) + rng.uniform(0.0, 0.5))
        lhs = linalg.schatten_norm(rho_p - sigma, 1)
        rhs = 2.0 * linalg.schatten_norm(rho - sigma, 1)
        worst1 = max(worst1, lhs - rhs)

        da, db = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        shp = linalg.shape(("A", da), ("B", db))
        rho_ab = random_psd(da * db, rng)
        p = random_contraction_psd(db, rng)
        op = np.kron(np.eye(da), p)
        steered = linalg.partial_trace(op @ rho_ab @ op, shp, ["B"])
        gap = linalg.partial_trace(rho_ab, shp, ["B"]) - steered
        worst2 = max(worst2, -float(np.linalg.eigvalsh(linalg.hermitianize(gap)).min()))
    return {
        "instances": instances,
        "dominance_excess": float(worst1),
        "steering_excess": float(worst2),
        "ok": bool(worst1 <= 1e-9 and worst2 <= 1e-9),
    }


def random_contraction_psd(dim: int, rng: np.random.Generator) -> np.ndarray:
    q = random_psd(dim, rng)
    return q / (linalg.schatten_norm(q, np.inf) * rng.uniform(1.0, 2.0))

"""Unitary ensembles: Haar, structured groups, layered circuits, and their
moment operators, with tensor-product-expander diagnostics.

Sampling is counter-based: each draw seeds its own generator from
(root seed, stream index), so runs are reproducible regardless of order
and safe to parallelise.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import CapError, DomainError

MOMENT_DIM_CAP = 4096  # largest dim**(2t), the superoperator dimension
ITERATED_ENUM_CAP = 200_000
CACHE_VERSION = 1


def haar_sample(dim: int, rng) -> np.ndarray:
    """One Haar-distributed unitary; rng is a Generator or an integer seed."""
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    return linalg.random_unitary(dim, rng)


def _strip_phase(m: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    flat = m.ravel()
    idx = np.flatnonzero(np.abs(flat) > tol)
    pivot = flat[idx[0]]
    return m * (abs(pivot) / pivot)


_PAULI_1 = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_group(n_qubits: int) -> list[np.ndarray]:
    """Phase-stripped Pauli tensor products, 4^n members."""
    if n_qubits not in (1, 2):
        raise DomainError("pauli_group supports 1 or 2 qubits")
    singles = [_PAULI_1[k] for k in ("I", "X", "Y", "Z")]
    if n_qubits == 1:
        return [_strip_phase(p) for p in singles]
    return [_strip_phase(np.kron(p, q)) for p in singles for q in singles]


def _canonical_key(m: np.ndarray) -> bytes:
    stripped = _strip_phase(m)
    # adding 0.0 maps IEEE negative zeros to positive zeros before hashing
    return (np.round(stripped, 9) + 0.0).tobytes()


def clifford_group(n_qubits: int, cache_path=None) -> list[np.ndarray]:
    """Closure of the standard generators modulo global phase.

    Sizes are 24 for one qubit and 11520 for two. Closure is a breadth-first
    multiplication sweep with phase-canonical dedup keys; pass cache_path to
    persist or reuse the member list as a binary fixture.
    """
    if n_qubits not in (1, 2):
        raise DomainError("clifford_group supports 1 or 2 qubits")
    if cache_path is not None:
        cached = _load_cache(cache_path, f"clifford{n_qubits}")
        if cached is not None:
            return cached
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    s = np.array([[1, 0], [0, 1j]], dtype=complex)
    if n_qubits == 1:
        gens = [h, s]
    else:
        eye = np.eye(2, dtype=complex)
        cnot = np.eye(4, dtype=complex)[[0, 1, 3, 2]]
        gens = [np.kron(h, eye), np.kron(eye, h),
                np.kron(s, eye), np.kron(eye, s), cnot]
    dim = 2**n_qubits
    seen = {_canonical_key(np.eye(dim, dtype=complex)): np.eye(dim, dtype=complex)}
    frontier = [np.eye(dim, dtype=complex)]
    while frontier:
        nxt = []
        for u in frontier:
            for g in gens:
                w = g @ u
                key = _canonical_key(w)
                if key not in seen:
                    seen[key] = _strip_phase(w)
                    nxt.append(w)
        frontier = nxt
    members = list(seen.values())
    expected = {1: 24, 2: 11520}[n_qubits]
    if len(members) != expected:
        raise DomainError(f"clifford closure found {len(members)} members, expected {expected}")
    if cache_path is not None:
        _save_cache(cache_path, f"clifford{n_qubits}", members)
    return members


def _save_cache(path, tag: str, members: list[np.ndarray]):
    data = np.stack(members).astype(complex)
    header = json.dumps({"tag": tag, "count": data.shape[0], "dim": data.shape[1]})
    with open(path, "wb") as fh:
        fh.write(bytes([CACHE_VERSION]))
        hb = header.encode()
        fh.write(len(hb).to_bytes(4, "little"))
        fh.write(hb)
        fh.write(data.tobytes())


def _load_cache(path, tag: str):
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except FileNotFoundError:
        return None
    if not blob or blob[0] != CACHE_VERSION:
        return None
    hlen = int.from_bytes(blob[1:5], "little")
    header = json.loads(blob[5 : 5 + hlen].decode())
    if header.get("tag") != tag:
        return None
    count, dim = header["count"], header["dim"]
    data = np.frombuffer(blob[5 + hlen :], dtype=complex).reshape(count, dim, dim)
    return [data[i].copy() for i in range(count)]


@dataclass(frozen=True)
class UnitaryEnsemble:
    """A distribution over unitaries with a reproducible stream sampler."""

    kind: str  # enumerated | haar | circuit | iterated
    dim: int
    seed: int = 0
    members: tuple = ()
    n_qubits: int = 0
    circuit_depth: int = 0
    name: str = ""
    base: "UnitaryEnsemble | None" = None
    iterations: int = 1

    def __post_init__(self):
        if self.kind not in ("enumerated", "haar", "circuit", "iterated"):
            raise DomainError(f"unknown ensemble kind {self.kind!r}")
        if self.kind == "enumerated" and not self.members:
            raise DomainError("enumerated ensemble needs members")
        if self.kind == "iterated" and self.base is None:
            raise DomainError("iterated ensemble needs a base")

    def sample(self, stream: int) -> np.ndarray:
        rng = np.random.default_rng((self.seed, stream))
        if self.kind == "enumerated":
            return self.members[int(rng.integers(len(self.members)))]
        if self.kind == "haar":
            return linalg.random_unitary(self.dim, rng)
        if self.kind == "circuit":
            return _circuit_unitary(self.n_qubits, self.circuit_depth, rng)
        u = np.eye(self.dim, dtype=complex)
        for j in range(self.iterations):
            u = self.base.sample(stream * self.iterations + j) @ u
        return u


def enumerated_ensemble(members, seed: int = 0, name: str = "") -> UnitaryEnsemble:
    members = tuple(np.asarray(m, dtype=complex) for m in members)
    return UnitaryEnsemble(kind="enumerated", dim=members[0].shape[0],
                           seed=seed, members=members, name=name)


def haar_ensemble(dim: int, seed: int = 0) -> UnitaryEnsemble:
    return UnitaryEnsemble(kind="haar", dim=dim, seed=seed, name="haar")


def random_circuit_ensemble(n_qubits: int, depth: int, seed: int = 0) -> UnitaryEnsemble:
    """Alternating brickwork of Haar two-qubit gates on a ring of qubits."""
    if n_qubits < 2:
        raise DomainError("circuit ensembles need at least two qubits")
    if depth < 0:
        raise DomainError("depth must be nonnegative")
    return UnitaryEnsemble(kind="circuit", dim=2**n_qubits, seed=seed,
                           n_qubits=n_qubits, circuit_depth=depth, name="circuit")


def _ring_pairs(n: int, layer: int) -> list[tuple[int, int]]:
    start = layer % 2
    pairs = [(i, i + 1) for i in range(start, n - 1, 2)]
    if start == 1 and n % 2 == 0:
        pairs.append((n - 1, 0))
    return pairs


def _circuit_unitary(n: int, depth: int, rng: np.random.Generator) -> np.ndarray:
    dim = 2**n
    u = np.eye(dim, dtype=complex)
    qubit_shape = linalg.SystemShape(tuple((f"q{i}", 2) for i in range(n)))
    for layer in range(depth):
        for a, b in _ring_pairs(n, layer):
            gate = linalg.random_unitary(4, rng)
            u = _embed_two_qubit(gate, qubit_shape, a, b) @ u
    return u


def _embed_two_qubit(gate: np.ndarray, qshape: linalg.SystemShape,
                     a: int, b: int) -> np.ndarray:
    n = len(qshape.labels)
    rest = [f"q{i}" for i in range(n) if i not in (a, b)]
    big = np.kron(gate, np.eye(2 ** (n - 2), dtype=complex))
    big_shape = linalg.SystemShape(
        ((f"q{a}", 2), (f"q{b}", 2)) + tuple((r, 2) for r in rest)
    )
    return linalg.permute_systems(big, big_shape, [f"q{i}" for i in range(n)])


def iterate_ensemble(e: UnitaryEnsemble, k: int) -> UnitaryEnsemble:
    """Products of k independent draws; moment operators compose as powers."""
    if k < 1:
        raise DomainError("iteration count must be at least 1")
    return UnitaryEnsemble(kind="iterated", dim=e.dim, seed=e.seed,
                           base=e, iterations=k, name=f"{e.name}^{k}")


def _kron_power(u: np.ndarray, t: int) -> np.ndarray:
    w = u
    for _ in range(t - 1):
        w = np.kron(w, u)
    return w


def _check_moment_cap(dim: int, t: int):
    if dim ** (2 * t) > MOMENT_DIM_CAP:
        raise CapError(
            f"moment operator needs dim**(2t) = {dim ** (2 * t)} <= {MOMENT_DIM_CAP}"
        )


def _moment_terms(e: UnitaryEnsemble, samples: int):
    """Yield (unitary, weight) pairs; exact for enumerable ensembles."""
    if e.kind == "enumerated":
        w = 1.0 / len(e.members)
        for m in e.members:
            yield m, w
        return
    if e.kind == "iterated" and e.base is not None and e.base.kind == "enumerated":
        base = e.base.members
        count = len(base) ** e.iterations
        if count <= ITERATED_ENUM_CAP:
            w = 1.0 / count
            for combo in itertools.product(base, repeat=e.iterations):
                u = np.eye(e.dim, dtype=complex)
                for g in combo:
                    u = g @ u
                yield u, w
            return
    w = 1.0 / samples
    for i in range(samples):
        yield e.sample(i), w


def moment_operator(e: UnitaryEnsemble, t: int, samples: int = 2000) -> np.ndarray:
    """The averaged t-fold twirl as a matrix on vectorised operators.

    Acts on column-stacked M as G vec(M) = E[ vec(U^t M U^-t) ]; exact when
    the ensemble is enumerable, Monte Carlo with `samples` draws otherwise.
    """
    if t < 1:
        raise DomainError("moment order t must be at least 1")
    _check_moment_cap(e.dim, t)
    d_t = e.dim**t
    g = np.zeros((d_t * d_t, d_t * d_t), dtype=complex)
    for u, wgt in _moment_terms(e, samples):
        w = _kron_power(u, t)
        g += wgt * np.kron(w.conj(), w)
    return g


def haar_moment_projector(dim: int, t: int) -> np.ndarray:
    """Exact Haar twirl at order t via the permutation commutant.

    The Gram matrix of permutation operators is inverted by pseudo-inverse,
    which also covers the rank-deficient regime t >= dim.
    """
    if t < 1:
        raise DomainError("moment order t must be at least 1")
    _check_moment_cap(dim, t)
    perms = list(itertools.permutations(range(t)))
    d_t = dim**t
    ops = []
    for pi in perms:
        p = np.zeros((d_t, d_t), dtype=complex)
        for idx in itertools.product(range(dim), repeat=t):
            src = _flat(idx, dim)
            dst = _flat(tuple(idx[pi[k]] for k in range(t)), dim)
            p[dst, src] = 1.0
        ops.append(p)
    vecs = [op.ravel(order="F") for op in ops]
    gram = np.array([[float(np.real(np.vdot(a, b))) for b in vecs] for a in vecs])
    ginv = np.linalg.pinv(gram)
    proj = np.zeros((d_t * d_t, d_t * d_t), dtype=complex)
    for i, vi in enumerate(vecs):
        for j, vj in enumerate(vecs):
            if abs(ginv[i, j]) > 1e-14:
                proj += ginv[i, j] * np.outer(vi, vj.conj())
    return proj


def _flat(idx: tuple[int, ...], dim: int) -> int:
    out = 0
    for i in idx:
        out = out * dim + i
    return out


@dataclass(frozen=True)
class DesignReport:
    t: int
    dim: int
    lambda_value: float
    moment_deviation: float
    samples_used: int
    kind: str

    def __post_init__(self):
        if not -1e-9 <= self.lambda_value <= 2.0 + 1e-9:
            raise DomainError(f"lambda {self.lambda_value} outside [0, 2]")

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "dim": self.dim,
            "lambda": float(self.lambda_value),
            "moment_deviation": float(self.moment_deviation),
            "samples_used": self.samples_used,
            "kind": self.kind,
        }


def qtpe_lambda(e: UnitaryEnsemble, t: int, samples: int = 2000,
                monomial_samples: int = 256, seed: int = 12345) -> DesignReport:
    """Expander gap ||G - Haar projector||_inf plus a balanced-monomial check.

    Every entry of the degree-k moment gap is the expectation error of one
    balanced monomial of degree k; the deviation column reports dim^k times
    the largest such error over all degrees k <= t (the approximate-design
    normalisation). Random probe tuples are sampled as well so the report
    notes how a budgeted spot check would have fared.
    """
    gaps = {}
    deviation = 0.0
    rng = np.random.default_rng(seed)
    for k in range(1, t + 1):
        g_k = moment_operator(e, k, samples=samples)
        i_k = haar_moment_projector(e.dim, k)
        gaps[k] = (g_k, i_k)
        entry_gap = np.abs(g_k - i_k)
        deviation = max(deviation, (e.dim**k) * float(entry_gap.max()))
        d2 = (e.dim**k) ** 2
        for _ in range(max(1, monomial_samples // t)):
            r, c = int(rng.integers(d2)), int(rng.integers(d2))
            deviation = max(deviation, (e.dim**k) * float(entry_gap[r, c]))
    g_t, i_t = gaps[t]
    lam = linalg.schatten_norm(g_t - i_t, np.inf)
    used = samples if e.kind not in ("enumerated",) else len(e.members)
    return DesignReport(t=t, dim=e.dim, lambda_value=float(lam),
                        moment_deviation=float(deviation),
                        samples_used=used, kind=e.kind)


def ensemble_to_json(e: UnitaryEnsemble) -> dict:
    """Descriptor only; named groups are regenerated rather than inlined."""
    out = {"kind": e.kind, "dim": e.dim, "seed": e.seed, "name": e.name}
    if e.kind == "circuit":
        out["n_qubits"] = e.n_qubits
        out["depth"] = e.circuit_depth
    if e.kind == "iterated":
        out["iterations"] = e.iterations
        out["base"] = ensemble_to_json(e.base)
    if e.kind == "enumerated" and e.name not in ("pauli", "clifford"):
        out["members"] = [linalg.matrix_to_json(m) for m in e.members]
    if e.kind == "enumerated" and e.name in ("pauli", "clifford"):
        out["n_qubits"] = int(math.log2(e.dim))
    return out


def ensemble_from_json(d: dict) -> UnitaryEnsemble:
    kind = d.get("kind")
    if kind == "haar":
        return haar_ensemble(int(d["dim"]), seed=int(d.get("seed", 0)))
    if kind == "circuit":
        return random_circuit_ensemble(int(d["n_qubits"]), int(d["depth"]),
                                       seed=int(d.get("seed", 0)))
    if kind == "iterated":
        return iterate_ensemble(ensemble_from_json(d["base"]), int(d["iterations"]))
    if kind == "enumerated":
        name = d.get("name", "")
        if name == "pauli":
            return enumerated_ensemble(pauli_group(int(d["n_qubits"])),
                                       seed=int(d.get("seed", 0)), name="pauli")
        if name == "clifford":
            return enumerated_ensemble(clifford_group(int(d["n_qubits"])),
                                       seed=int(d.get("seed", 0)), name="clifford")
        members = [linalg.matrix_from_json(m) for m in d["members"]]
        return enumerated_ensemble(members, seed=int(d.get("seed", 0)), name=name)
    raise DomainError(f"unknown ensemble descriptor kind {kind!r}")

"""Classical-input quantum-output channels and their duals.

A CQ channel maps z in {0, .., d-1} to a density operator. Embedding the
channel into a quantum channel that measures its input in the standard basis
and reading the complementary output in the Fourier-conjugate basis yields the
dual channel. The dual always carries a cyclic phase-operator symmetry on the
retained copy of the input register, whatever the original channel looks like.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .config import TOL, SCHEMA_VERSION
from . import linalg
from .linalg import (
    PureState,
    assert_density,
    fidelity,
    hermitian_part,
    partial_trace,
    purify,
    trace_distance,
)

__all__ = [
    "CqChannel",
    "ClassicalChannel",
    "ChannelState",
    "InvariantProfile",
    "PROFILE_ALPHAS",
    "make_bsc",
    "make_bec",
    "make_bsc_dual",
    "make_pure",
    "make_classical",
    "make_named",
    "channel_state",
    "dual",
    "classical_dual_overlaps",
    "symmetrize",
    "degrade_to_bsc",
    "upgrade_to_pure",
    "invariant_profile",
    "profiles_match",
    "profile_gap",
    "trace_distance_vs_dual_fidelity",
    "channel_to_dict",
    "channel_from_dict",
    "channel_to_json",
    "channel_from_json",
]

PROFILE_ALPHAS = (0.5, 0.75, 1.25, 1.5)


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class CqChannel:
    """Finite-alphabet channel with density-operator outputs.

    witnesses, when present, are unitaries U_s with U_s W(z) U_s† = W(z+s)
    for all z (addition mod d); they certify the channel is symmetric.
    dilation_dims records a known C (x) D tensor split of the output space
    (used by duals so the classical-dual block structure stays visible).
    """

    outputs: tuple[np.ndarray, ...]
    witnesses: tuple[np.ndarray, ...] | None = None
    kind: str = "generic"
    params: Mapping[str, float] = field(default_factory=dict)
    dilation_dims: tuple[int, int] | None = None

    def __post_init__(self):
        outs = tuple(_freeze(assert_density(o)) for o in self.outputs)
        dims = {o.shape[0] for o in outs}
        if len(dims) != 1:
            raise ValueError(f"outputs have mixed dimensions {sorted(dims)}")
        object.__setattr__(self, "outputs", outs)
        if self.witnesses is not None:
            wit = tuple(_freeze(np.asarray(u, dtype=complex)) for u in self.witnesses)
            if len(wit) != len(outs):
                raise ValueError("need one witness per input symbol")
            d = len(outs)
            for u in wit:
                if np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) > TOL.witness:
                    raise ValueError("witness is not unitary")
            for s in range(d):
                for z in range(d):
                    lhs = wit[s] @ outs[z] @ wit[s].conj().T
                    if np.max(np.abs(lhs - outs[(z + s) % d])) > TOL.witness:
                        raise ValueError(
                            f"witness {s} does not shift output {z} to {(z + s) % d}"
                        )
            object.__setattr__(self, "witnesses", wit)

    @property
    def input_size(self) -> int:
        return len(self.outputs)

    @property
    def dim(self) -> int:
        return self.outputs[0].shape[0]

    @property
    def is_symmetric(self) -> bool:
        return self.witnesses is not None

    def is_classical(self, tol: float = 1e-12) -> bool:
        """True when every output is diagonal in the standard basis."""
        return all(
            np.max(np.abs(o - np.diag(np.diag(o)))) <= tol for o in self.outputs
        )


@dataclass(frozen=True)
class ClassicalChannel:
    """Channel given by a |Z| x |Y| row-stochastic transition matrix."""

    transition: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.transition, dtype=float)
        if t.ndim != 2:
            raise ValueError("transition must be a matrix")
        if t.min() < 0:
            raise ValueError("negative transition probability")
        if np.max(np.abs(t.sum(axis=1) - 1.0)) > 1e-12:
            raise ValueError("rows must sum to 1 within 1e-12")
        object.__setattr__(self, "transition", _freeze(t))

    @property
    def num_inputs(self) -> int:
        return self.transition.shape[0]

    @property
    def num_outputs(self) -> int:
        return self.transition.shape[1]

    def to_cq(self) -> CqChannel:
        return make_classical(self.transition)


@dataclass(frozen=True)
class ChannelState:
    """Maximally-entangled four-party pure state generating a channel and its dual.

    psi has subsystem order (A, B, C, D): measuring A in the standard basis and
    tracing C, D leaves W(z)/d; measuring A in the conjugate basis and tracing
    B leaves the dual outputs.
    """

    psi: PureState

    @property
    def dims(self) -> tuple[int, int, int, int]:
        return self.psi.dims  # type: ignore[return-value]

    def conditional_on_standard(self, z: int) -> np.ndarray:
        """Normalized B-state after measuring A -> z and tracing C, D."""
        d_a, d_b, d_c, d_d = self.dims
        amp = self.psi.amplitudes.reshape(d_a, d_b, d_c, d_d)
        block = amp[z].reshape(-1)
        nrm = np.linalg.norm(block)
        if nrm < 1e-15:
            raise ValueError(f"outcome {z} has zero probability")
        block = block / nrm
        return partial_trace(block, (d_b, d_c * d_d), 0)

    def unnormalized_f_conditionals(self) -> list[np.ndarray]:
        """sigma_z = Tr_AB[|z><z|_A psi] on C (x) D, not normalized."""
        d_a, d_b, d_c, d_d = self.dims
        amp = self.psi.amplitudes.reshape(d_a, d_b, d_c, d_d)
        out = []
        for z in range(d_a):
            block = amp[z].reshape(d_b, d_c * d_d)
            out.append(block.conj().T @ block)  # trace over B
        return out


# ---------------------------------------------------------------------------
# named constructors
# ---------------------------------------------------------------------------


def make_bsc(p: float) -> CqChannel:
    """Binary symmetric channel with crossover p, as diagonal qubit outputs."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"crossover {p} outside [0, 1]")
    outs = (np.diag([1 - p, p]).astype(complex), np.diag([p, 1 - p]).astype(complex))
    swap = np.array([[0, 1], [1, 0]], dtype=complex)
    return CqChannel(outs, witnesses=(np.eye(2, dtype=complex), swap), kind="bsc", params={"p": p})


def make_bec(p: float) -> CqChannel:
    """Binary erasure channel with erasure probability p over basis (0, 1, ?)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"erasure probability {p} outside [0, 1]")
    outs = (
        np.diag([1 - p, 0, p]).astype(complex),
        np.diag([0, 1 - p, p]).astype(complex),
    )
    swap01 = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=complex)
    return CqChannel(outs, witnesses=(np.eye(3, dtype=complex), swap01), kind="bec", params={"p": p})


def make_bsc_dual(p: float) -> CqChannel:
    """Pure-output channel x -> sqrt(p)|0> + (-1)^x sqrt(1-p)|1>."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"parameter {p} outside [0, 1]")
    eta0 = np.array([np.sqrt(p), np.sqrt(1 - p)], dtype=complex)
    eta1 = np.array([np.sqrt(p), -np.sqrt(1 - p)], dtype=complex)
    outs = (np.outer(eta0, eta0.conj()), np.outer(eta1, eta1.conj()))
    zop = np.diag([1.0, -1.0]).astype(complex)
    return CqChannel(outs, witnesses=(np.eye(2, dtype=complex), zop), kind="bscdual", params={"p": p})


def _pure_swap_witness(a: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    """Reflection unitary exchanging the projectors of two pure states."""
    dim = a.shape[0]
    overlap = np.vdot(a, b)
    bb = b if abs(overlap) < 1e-14 else b * np.exp(-1j * np.angle(overlap))
    c = np.vdot(a, bb).real
    u = bb - c * a
    s = np.linalg.norm(u)
    if s < 1e-12:
        return np.eye(dim, dtype=complex)
    e1, e2 = a, u / s
    refl = (
        c * np.outer(e1, e1.conj())
        + s * np.outer(e1, e2.conj())
        + s * np.outer(e2, e1.conj())
        - c * np.outer(e2, e2.conj())
    )
    span = np.outer(e1, e1.conj()) + np.outer(e2, e2.conj())
    return refl + (np.eye(dim, dtype=complex) - span)


def make_pure(vectors) -> CqChannel:
    """Channel whose outputs are the projectors onto the given unit vectors."""
    vecs = [np.asarray(v, dtype=complex) for v in vectors]
    for v in vecs:
        if abs(np.linalg.norm(v) - 1.0) > TOL.unit_norm:
            raise ValueError("pure-channel vectors must be normalized")
    outs = tuple(np.outer(v, v.conj()) for v in vecs)
    witnesses = None
    if len(vecs) == 2:
        w1 = _pure_swap_witness(vecs[0], vecs[1])
        if w1 is not None:
            witnesses = (np.eye(vecs[0].shape[0], dtype=complex), w1)
    return CqChannel(outs, witnesses=witnesses, kind="pure")


def make_classical(transition) -> CqChannel:
    """CQ form of a classical channel: diagonal outputs over the Y alphabet."""
    t = np.asarray(transition, dtype=float)
    outs = tuple(np.diag(row).astype(complex) for row in t)
    return CqChannel(outs, kind="classical")


def make_named(kind: str, *args) -> CqChannel:
    kind = kind.lower()
    if kind == "bsc":
        return make_bsc(*args)
    if kind == "bec":
        return make_bec(*args)
    if kind in ("bscdual", "bsc_dual"):
        return make_bsc_dual(*args)
    if kind == "pure":
        return make_pure(*args)
    if kind == "classical":
        return make_classical(*args)
    raise ValueError(f"unknown channel kind {kind!r}")


# ---------------------------------------------------------------------------
# dual construction
# ---------------------------------------------------------------------------


def _common_purifications(w: CqChannel, classical_canonical: bool = False) -> np.ndarray:
    """Purifications phi_z as a (d, dim, r) array sharing one D dimension.

    With classical_canonical, channels with all-diagonal outputs take the
    diagonal purification |phi_z> = sum_y sqrt(P(y|z)) |y>_B |y>_D, so that
    the D register of the dual literally records the classical output symbol.
    Otherwise D is kept at the minimal common rank.
    """
    d, dim = w.input_size, w.dim
    if classical_canonical and w.is_classical():
        phis = np.zeros((d, dim, dim), dtype=complex)
        for z, out in enumerate(w.outputs):
            root = np.sqrt(np.clip(np.diag(out).real, 0.0, None))
            phis[z, np.arange(dim), np.arange(dim)] = root
        return phis
    pures = [purify(out) for out in w.outputs]
    r = max(p.dims[1] for p in pures)
    phis = np.zeros((d, dim, r), dtype=complex)
    for z, p in enumerate(pures):
        phis[z, :, : p.dims[1]] = p.amplitudes.reshape(p.dims)
    return phis


def channel_state(w: CqChannel) -> ChannelState:
    """The four-party state d^{-1/2} sum_z |z>_A |z>_C |phi_z>_{BD}."""
    d, dim = w.input_size, w.dim
    phis = _common_purifications(w)
    r = phis.shape[2]
    amp = np.zeros((d, dim, d, r), dtype=complex)
    for z in range(d):
        amp[z, :, z, :] = phis[z] / np.sqrt(d)
    return ChannelState(PureState(amp.reshape(-1), (d, dim, d, r)))


def dual(w: CqChannel) -> CqChannel:
    """Dual channel: conjugate-basis input, complementary (C, D) output.

    Output x is Tr_B |theta_x><theta_x| with
    theta_x = d^{-1/2} sum_z omega^{xz} |z>_C |phi_z>_{BD}. The result carries
    the phase-operator witnesses Z^x on C regardless of the symmetry of w.
    """
    d, dim = w.input_size, w.dim
    phis = _common_purifications(w, classical_canonical=True)
    r = phis.shape[2]
    omega = np.exp(2j * np.pi / d)
    outs = []
    for x in range(d):
        theta = np.empty((d, dim, r), dtype=complex)  # index order (C, B, D)
        for z in range(d):
            theta[z] = omega ** (x * z) / np.sqrt(d) * phis[z]
        out = np.einsum("cbd,ebf->cdef", theta, theta.conj()).reshape(d * r, d * r)
        outs.append(hermitian_part(out))
    phase = omega ** np.arange(d)
    witnesses = tuple(
        np.kron(np.diag(phase**x), np.eye(r, dtype=complex)) for x in range(d)
    )
    return CqChannel(
        tuple(outs),
        witnesses=witnesses,
        kind="dual",
        params={"of": w.kind, **dict(w.params)},
        dilation_dims=(d, r),
    )


def classical_dual_overlaps(p: ClassicalChannel) -> list[tuple[float, float]]:
    """Per-output-symbol (P_Y(y), cos theta_y) for a binary-input classical channel.

    cos theta_y = |P(Z=0|y) - P(Z=1|y)| under a uniform input; symbols with
    zero probability are skipped.
    """
    t = p.transition
    if t.shape[0] != 2:
        raise ValueError("overlap formula requires a binary-input channel")
    out = []
    for y in range(t.shape[1]):
        py = 0.5 * (t[0, y] + t[1, y])
        if py <= 0:
            continue
        cos = abs(0.5 * t[0, y] - 0.5 * t[1, y]) / py
        out.append((float(py), float(cos)))
    return out


def symmetrize(w: CqChannel) -> CqChannel:
    """Record a uniformly random input shift next to the shifted output."""
    d, dim = w.input_size, w.dim
    outs = []
    for z in range(d):
        blocks = np.zeros((d * dim, d * dim), dtype=complex)
        for zp in range(d):
            idx = (z + zp) % d
            blocks[idx * dim : (idx + 1) * dim, idx * dim : (idx + 1) * dim] = (
                w.outputs[zp] / d
            )
        outs.append(blocks)
    shift = np.zeros((d, d), dtype=complex)
    for u in range(d):
        shift[(u + 1) % d, u] = 1.0
    witnesses = tuple(
        np.kron(np.linalg.matrix_power(shift, s), np.eye(dim, dtype=complex))
        for s in range(d)
    )
    return CqChannel(tuple(outs), witnesses=witnesses, kind="symmetrized", params=dict(w.params))


def degrade_to_bsc(w: CqChannel) -> tuple[ClassicalChannel, float]:
    """Optimal binary measurement turns w into a BSC with crossover (1-delta)/2."""
    if w.input_size != 2:
        raise ValueError("degradation to a BSC needs a binary-input channel")
    delta = trace_distance(w.outputs[0], w.outputs[1])
    crossover = 0.5 * (1.0 - delta)
    t = np.array([[1 - crossover, crossover], [crossover, 1 - crossover]])
    return ClassicalChannel(t), float(crossover)


def upgrade_to_pure(w: CqChannel) -> CqChannel:
    """Pure-output channel whose overlap equals the output fidelity of w."""
    if w.input_size != 2:
        raise ValueError("upgrade needs a binary-input channel")
    f = min(1.0, fidelity(w.outputs[0], w.outputs[1]))
    return make_bsc_dual((1.0 - f) / 2.0)


# ---------------------------------------------------------------------------
# invariant profiles (equivalence proxy)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InvariantProfile:
    """Equivalence-invariant summary of a binary-input channel.

    Every entry is preserved by two-way output degradation and input
    relabeling, so matching profiles is a necessary condition for channel
    equivalence (and the strongest proxy used here).
    """

    trace_distance: float
    bhattacharyya: float
    von_neumann: float
    hmin: float
    hmax: float
    petz_points: tuple[tuple[float, float], ...]

    def as_array(self) -> np.ndarray:
        vals = [
            self.trace_distance,
            self.bhattacharyya,
            self.von_neumann,
            self.hmin,
            self.hmax,
        ]
        vals.extend(v for _, v in self.petz_points)
        return np.asarray(vals)

    def to_dict(self) -> dict:
        return {
            "trace_distance": self.trace_distance,
            "bhattacharyya": self.bhattacharyya,
            "von_neumann": self.von_neumann,
            "hmin": self.hmin,
            "hmax": self.hmax,
            "petz_points": [list(p) for p in self.petz_points],
        }


def invariant_profile(w: CqChannel, seed: int = 0) -> InvariantProfile:
    """Profile of a binary-input channel under the uniform input."""
    from . import entropies  # local import: entropies depends on this module

    if w.input_size != 2:
        raise ValueError("invariant profiles are defined for binary-input channels")
    state = entropies.from_channel(w)
    delta = trace_distance(w.outputs[0], w.outputs[1])
    bhat = fidelity(w.outputs[0], w.outputs[1])
    h = entropies.cond_entropy(state, entropies.VON_NEUMANN)
    hmin = entropies.cond_entropy(state, entropies.MIN_ENTROPY)
    hmax = entropies.cond_entropy(state, entropies.MAX_ENTROPY, seed=seed)
    petz = tuple(
        (a, entropies.cond_entropy(state, entropies.petz_down(a)))
        for a in PROFILE_ALPHAS
    )
    return InvariantProfile(float(delta), float(bhat), h, hmin, hmax, petz)


def profile_gap(a: InvariantProfile, b: InvariantProfile) -> float:
    return float(np.max(np.abs(a.as_array() - b.as_array())))


def profiles_match(a: InvariantProfile, b: InvariantProfile, tol: float = TOL.profile_match) -> bool:
    return profile_gap(a, b) <= tol


def trace_distance_vs_dual_fidelity(w: CqChannel) -> tuple[float, float]:
    """Return (delta(W), F(dual(W))); the two agree for binary-input channels."""
    if w.input_size != 2:
        raise ValueError("needs a binary-input channel")
    delta = trace_distance(w.outputs[0], w.outputs[1])
    wd = dual(w)
    return float(delta), float(fidelity(wd.outputs[0], wd.outputs[1]))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def _encode_matrix(m: np.ndarray) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]


def _decode_matrix(rows: list) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows])


def channel_to_dict(w: CqChannel) -> dict:
    doc = {
        "schema": SCHEMA_VERSION,
        "kind": w.kind,
        "d": w.input_size,
        "dim": w.dim,
        "outputs": [_encode_matrix(o) for o in w.outputs],
        "params": {k: float(v) if isinstance(v, (int, float)) else v for k, v in w.params.items()},
    }
    if w.witnesses is not None:
        doc["witnesses"] = [_encode_matrix(u) for u in w.witnesses]
    if w.dilation_dims is not None:
        doc["dilation_dims"] = list(w.dilation_dims)
    return doc


def channel_from_dict(doc: dict) -> CqChannel:
    outputs = tuple(_decode_matrix(o) for o in doc["outputs"])
    witnesses = None
    if "witnesses" in doc:
        witnesses = tuple(_decode_matrix(u) for u in doc["witnesses"])
    dil = tuple(doc["dilation_dims"]) if "dilation_dims" in doc else None
    return CqChannel(
        outputs,
        witnesses=witnesses,
        kind=doc.get("kind", "generic"),
        params=doc.get("params", {}),
        dilation_dims=dil,
    )


def channel_to_json(w: CqChannel) -> str:
    return json.dumps(channel_to_dict(w), sort_keys=True)


def channel_from_json(text: str) -> CqChannel:
    return channel_from_dict(json.loads(text))

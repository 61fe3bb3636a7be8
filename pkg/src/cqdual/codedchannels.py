"""Codes composed with channels: exact coded entropies on both sides of the dual.

The classical side is handled by exhaustive enumeration of messages and output
strings. The dual side works with pure-state ensembles represented by their
Gram matrices, which is exact: the nonzero spectrum of a weighted pure mixture
equals the spectrum of its weighted Gram matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .config import TOL
from . import channels as _ch
from . import entropies as _en
from .codes import CodePair, all_vectors
from .linalg import gram_embed, hermitian_part, tensor

__all__ = [
    "PureEnsemble",
    "CodedAnalysis",
    "bsc_classical",
    "bec_classical",
    "classical_coded_entropy",
    "classical_coded_table",
    "dual_coded_ensemble",
    "dual_coded_states_dense",
    "ensemble_cond_entropy",
    "ensemble_guessing",
    "ensemble_decoupling",
    "ensemble_to_cqstate",
    "coded_channel",
    "coded_duality_check",
    "encoder_duality_check",
    "exit_function",
    "ExitReport",
    "exit_duality_check",
    "ExitScan",
    "exit_scan",
    "BruteForceTables",
    "compression_extraction_tables",
    "compression_extraction_bruteforce",
    "structured_state_gap",
]

_TABLE_CAP = 1 << 26


def bsc_classical(p: float) -> _ch.ClassicalChannel:
    return _ch.ClassicalChannel(np.array([[1 - p, p], [p, 1 - p]]))


def bec_classical(p: float) -> _ch.ClassicalChannel:
    return _ch.ClassicalChannel(np.array([[1 - p, 0, p], [0, 1 - p, p]]))


# ---------------------------------------------------------------------------
# classical side: exhaustive tables
# ---------------------------------------------------------------------------


def _product_likelihood(words: np.ndarray, ys: np.ndarray, t: np.ndarray) -> np.ndarray:
    """P(y^n | x^n) for all rows of words (inputs) and ys (outputs)."""
    out = np.ones((words.shape[0], ys.shape[0]))
    for i in range(words.shape[1]):
        out *= t[words[:, i]][:, ys[:, i]]
    return out


def classical_coded_table(
    channel: _ch.ClassicalChannel, cp: CodePair, leg: str
) -> np.ndarray:
    """Joint distribution J[message, y^n] for a code over a classical channel.

    leg="deterministic": syndrome fixed to zero, messages uniform.
    leg="randomized": syndrome uniform as well, marginalized out.
    """
    if channel.num_inputs != cp.q:
        raise ValueError("channel input alphabet must match the code field")
    if cp.n > 14:
        raise ValueError("blocklength capped at 14 for exhaustive tables")
    ny = channel.num_outputs
    if (cp.q**cp.k) * (ny**cp.n) > _TABLE_CAP:
        raise ValueError("joint table would exceed the memory cap")
    ys = all_vectors(ny, cp.n)
    t = channel.transition
    if leg == "deterministic":
        lik = _product_likelihood(cp.codewords(), ys, t)
        return lik / cp.q**cp.k
    if leg == "randomized":
        acc = np.zeros((cp.q**cp.k, ys.shape[0]))
        for s in all_vectors(cp.q, cp.n - cp.k):
            acc += _product_likelihood(cp.coset(s), ys, t)
        return acc / cp.q**cp.n
    raise ValueError(f"unknown leg {leg!r}")


def _xlog2x(v: np.ndarray) -> np.ndarray:
    out = np.zeros_like(v)
    pos = v > 0
    out[pos] = v[pos] * np.log2(v[pos])
    return out


def _table_value(joint: np.ndarray, family: _en.EntropyFamily) -> float:
    """Conditional entropy of the row label given the column, from a joint table."""
    py = joint.sum(axis=0)
    if family.kind == "von_neumann":
        return float(-_xlog2x(joint).sum() + _xlog2x(py).sum())
    if family.kind == "min":
        return float(-np.log2(joint.max(axis=0).sum()))
    if family.kind == "max":
        return float(np.log2((np.sqrt(joint).sum(axis=0) ** 2).sum()))
    alpha = family.alpha
    cols = py > 0
    total = float(
        (joint[:, cols] ** alpha * py[cols] ** (1.0 - alpha)).sum()
    )
    return float(np.log2(total) / (1.0 - alpha))


def classical_coded_entropy(
    channel: _ch.ClassicalChannel,
    cp: CodePair,
    leg: str,
    family: _en.EntropyFamily,
) -> float:
    """Exact coded conditional entropy of the message over a classical channel."""
    return _table_value(classical_coded_table(channel, cp, leg), family)


# ---------------------------------------------------------------------------
# dual side: pure ensembles via Gram matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PureEnsemble:
    """Weighted pure-state family known through its Gram matrix.

    labels partition the states into hypotheses (e.g. the message); the
    underlying vectors never need to be materialized.
    """

    weights: np.ndarray
    gram: np.ndarray
    labels: np.ndarray
    meta: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        g = np.asarray(self.gram, dtype=complex)
        lab = np.asarray(self.labels, dtype=np.int64)
        m = len(w)
        if g.shape != (m, m) or lab.shape != (m,):
            raise ValueError("weights, gram and labels sizes disagree")
        if abs(w.sum() - 1.0) > 1e-12 or w.min() < 0:
            raise ValueError("weights must form a distribution")
        if np.max(np.abs(np.diag(g) - 1.0)) > 1e-10:
            raise ValueError("Gram diagonal must be 1 within 1e-10")
        scale = max(1.0, float(np.max(np.abs(g))))
        wmin = float(np.linalg.eigvalsh(hermitian_part(g)).min())
        if wmin < -TOL.gram_psd * scale:
            raise ValueError(f"Gram matrix not PSD: eigenvalue {wmin:.3e}")
        for a in (w, g, lab):
            a.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "gram", hermitian_part(g))
        object.__setattr__(self, "labels", lab)

    @property
    def num_states(self) -> int:
        return len(self.weights)

    @property
    def num_labels(self) -> int:
        return int(self.labels.max()) + 1

    def label_indices(self) -> list[np.ndarray]:
        return [np.where(self.labels == l)[0] for l in range(self.num_labels)]

    def label_prior(self) -> np.ndarray:
        return np.array([self.weights[idx].sum() for idx in self.label_indices()])


def dual_coded_ensemble(p: float, cp: CodePair, mode: str) -> PureEnsemble:
    """Coded ensemble of modulated pure dual-channel states.

    Per position the two states have overlap 1-2p, so the Gram matrix is
    (1-2p)^hamming over the encoded words: the zero-syndrome coset in
    deterministic mode, every word (grouped by message) in randomized mode.
    """
    if cp.q != 2:
        raise ValueError("pure dual ensembles are built for binary codes")
    if cp.n > 16:
        raise ValueError("ensemble blocklength capped at 16")
    if mode == "deterministic":
        xs = cp.codewords()
        labels = np.arange(xs.shape[0])
    elif mode == "randomized":
        blocks = [cp.coset(s) for s in all_vectors(2, cp.n - cp.k)]
        xs = np.concatenate(blocks, axis=0)
        labels = np.tile(np.arange(2**cp.k), 2 ** (cp.n - cp.k))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    ham = (xs[:, None, :] != xs[None, :, :]).sum(axis=2)
    gram = (1.0 - 2.0 * p) ** ham
    m = xs.shape[0]
    return PureEnsemble(
        np.full(m, 1.0 / m),
        gram.astype(complex),
        labels,
        meta={"p": p, "mode": mode, "n": cp.n, "k": cp.k},
    )


def dual_coded_states_dense(p: float, xs: np.ndarray) -> np.ndarray:
    """Explicit tensor-product state vectors (columns) for the encoded words."""
    eta = np.array([np.sqrt(p), np.sqrt(1 - p)], dtype=complex)
    zeta = np.array([np.sqrt(p), -np.sqrt(1 - p)], dtype=complex)
    cols = []
    for x in xs:
        v = np.array([1.0 + 0j])
        for b in x:
            v = np.kron(v, eta if b == 0 else zeta)
        cols.append(v)
    return np.stack(cols, axis=1)


def _weighted_gram(e: PureEnsemble) -> np.ndarray:
    root = np.sqrt(e.weights)
    return hermitian_part(root[:, None] * e.gram * root[None, :])


def _entropy_of_spectrum(m: np.ndarray) -> float:
    w = np.linalg.eigvalsh(hermitian_part(m))
    w = w[w > TOL.rank_cut]
    return float(-(w * np.log2(w)).sum()) if w.size else 0.0


def ensemble_to_cqstate(e: PureEnsemble) -> _en.CqState:
    """Label-conditional state in Gram-embedding coordinates."""
    vecs = gram_embed(e.gram)
    prior = e.label_prior()
    conds = []
    dim = vecs.shape[1]
    for idx, pl in zip(e.label_indices(), prior):
        rho = np.zeros((dim, dim), dtype=complex)
        for i in idx:
            rho += (e.weights[i] / pl) * np.outer(vecs[i], vecs[i].conj())
        conds.append(hermitian_part(rho))
    return _en.CqState(prior, tuple(conds))


def ensemble_guessing(e: PureEnsemble) -> _en.GuessResult:
    """Probability of guessing the label; exact for two labels, else SRM."""
    if e.num_labels <= 2:
        return _en.guessing_prob(ensemble_to_cqstate(e))
    s = _weighted_gram(e)
    w, v = np.linalg.eigh(s)
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    val = 0.0
    for idx in e.label_indices():
        block = root[np.ix_(idx, idx)]
        val += float(np.sum(np.abs(block) ** 2))
    return _en.GuessResult(val, False, "srm")


def ensemble_decoupling(e: PureEnsemble, seed: int = 0) -> _en.QResult:
    """Decoupling quality of the label, by ascent in embedding coordinates.

    The label conditionals enter the ascent through their natural low-rank
    factors (the member state vectors), never as dense matrices.
    """
    vecs = gram_embed(e.gram)
    prior = e.label_prior()
    nlab = e.num_labels
    factors = []
    coeffs = []
    for idx, pl in zip(e.label_indices(), prior):
        if pl <= 0:
            continue
        cols = (vecs[idx] * np.sqrt(e.weights[idx] / pl)[:, None]).T
        factors.append(np.ascontiguousarray(cols))
        coeffs.append(np.sqrt(pl / nlab))
    res = _en.max_fidelity_sum(factors, coeffs, seed=seed)
    return _en.QResult(min(1.0, res.value**2), res.converged, res.iterations, res.restarts)


def ensemble_cond_entropy(e: PureEnsemble, family: _en.EntropyFamily, seed: int = 0) -> float:
    """Conditional entropy of the label given the quantum states, in bits."""
    if family.kind == "von_neumann":
        s = _weighted_gram(e)
        prior = e.label_prior()
        h_label = float(-_xlog2x(prior).sum())
        h_cond = 0.0
        for idx, pl in zip(e.label_indices(), prior):
            if pl <= 0:
                continue
            block = s[np.ix_(idx, idx)] / pl
            h_cond += pl * _entropy_of_spectrum(block)
        return h_label + h_cond - _entropy_of_spectrum(s)
    if family.kind == "min":
        return -float(np.log2(ensemble_guessing(e).value))
    if family.kind == "max":
        q = ensemble_decoupling(e, seed=seed).value
        return float(np.log2(e.num_labels) + np.log2(q))
    return _en.petz_curve(ensemble_to_cqstate(e), [family.alpha])[0]


# ---------------------------------------------------------------------------
# coded channels as CQ channels (small blocklengths)
# ---------------------------------------------------------------------------


def coded_channel(w: _ch.CqChannel, cp: CodePair, randomized: bool) -> _ch.CqChannel:
    """The channel message -> W^n(encoded word), optionally syndrome-randomized."""
    if w.input_size != cp.q:
        raise ValueError("channel alphabet must match the code field")
    if w.dim**cp.n > 512:
        raise ValueError("coded channel output dimension too large")
    outs = []
    msgs = all_vectors(cp.q, cp.k)
    if randomized:
        syn = all_vectors(cp.q, cp.n - cp.k)
        for m in msgs:
            acc = None
            for s in syn:
                word = cp.encode(s, m)
                op = tensor(*(w.outputs[int(z)] for z in word))
                acc = op if acc is None else acc + op
            outs.append(hermitian_part(acc / len(syn)))
    else:
        for m in msgs:
            word = cp.encode(np.zeros(cp.n - cp.k, dtype=np.int64), m)
            outs.append(tensor(*(w.outputs[int(z)] for z in word)))
    return _ch.CqChannel(tuple(outs), kind="coded", params={})


@dataclass(frozen=True)
class CodedAnalysis:
    """Named coded-entropy functionals for a channel/code pair."""

    n: int
    k: int
    channel: str
    code: str
    quantities: Mapping[str, float]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "channel": self.channel,
            "code": self.code,
            "quantities": dict(self.quantities),
        }


def coded_duality_check(p: float, cp: CodePair, seed: int = 0) -> CodedAnalysis:
    """Coded entropy sums for a BSC against the dual code on the dual channel.

    First pairing: message-given-syndrome on the channel plus the randomized
    dual-complement encoding on the dual channel, which must sum to k bits.
    Second pairing: syndrome-randomized complement encoding plus deterministic
    dual-code encoding, summing to n-k. Min/max legs are evaluated in both
    orders; square-root-measurement values are cross-validated against the
    sum they should produce and the gap is reported, never patched.
    """
    ch = bsc_classical(p)
    n, k = cp.n, cp.k
    q: dict[str, float] = {}

    # ---- first pairing (target k)
    det = classical_coded_table(ch, cp, "deterministic")
    ens1 = dual_coded_ensemble(p, cp.dual_complement(), "randomized")
    q["vn_message_leg"] = _table_value(det, _en.VON_NEUMANN)
    q["vn_dual_leg"] = ensemble_cond_entropy(ens1, _en.VON_NEUMANN)
    q["vn_sum"] = q["vn_message_leg"] + q["vn_dual_leg"]
    p_ml = float(det.max(axis=0).sum())
    q_dual = ensemble_decoupling(ens1, seed=seed).value
    q["guess_message_leg"] = p_ml
    q["decouple_dual_leg"] = q_dual
    q["minmax_sum"] = -np.log2(p_ml) + np.log2(ens1.num_labels * q_dual)
    hmax_cls = _table_value(det, _en.MAX_ENTROPY)
    srm = ensemble_guessing(ens1)
    q["maxmin_sum"] = hmax_cls + (-np.log2(srm.value))
    q["srm_cross_gap"] = abs((-np.log2(srm.value)) - (k - hmax_cls))
    q["srm_exact"] = float(srm.exact)

    # ---- second pairing (target n - k)
    rand = classical_coded_table(ch, cp.complement(), "randomized")
    ens2 = dual_coded_ensemble(p, cp.dual(), "deterministic")
    q["vn_syndrome_leg"] = _table_value(rand, _en.VON_NEUMANN)
    q["vn_dual_det_leg"] = ensemble_cond_entropy(ens2, _en.VON_NEUMANN)
    q["vn_sum_2"] = q["vn_syndrome_leg"] + q["vn_dual_det_leg"]
    p_ml2 = float(rand.max(axis=0).sum())
    q_dual2 = ensemble_decoupling(ens2, seed=seed).value
    q["minmax_sum_2"] = -np.log2(p_ml2) + np.log2(ens2.num_labels * q_dual2)
    hmax_cls2 = _table_value(rand, _en.MAX_ENTROPY)
    srm2 = ensemble_guessing(ens2)
    q["maxmin_sum_2"] = hmax_cls2 + (-np.log2(srm2.value))
    q["srm_cross_gap_2"] = abs((-np.log2(srm2.value)) - ((n - k) - hmax_cls2))
    return CodedAnalysis(n, k, f"bsc({p})", cp.name or "custom", q)


@dataclass(frozen=True)
class EncoderDualityReport:
    deterministic_to_randomized_gap: float
    randomized_to_deterministic_gap: float

    @property
    def max_gap(self) -> float:
        return max(
            self.deterministic_to_randomized_gap,
            self.randomized_to_deterministic_gap,
        )


def encoder_duality_check(w: _ch.CqChannel, cp: CodePair, seed: int = 0) -> EncoderDualityReport:
    """Dual of an encoded channel against the opposite encoding of the dual.

    Deterministic encoding dualizes to randomized encoding over the
    dual-complement code and vice versa; compared at the profile level, so the
    code must carry a single message digit (q^k = 2).
    """
    if cp.q**cp.k != 2:
        raise ValueError("profile comparison needs exactly two messages (k=1, q=2)")
    wd = _ch.dual(w)
    cpd = cp.dual_complement()
    gap_det = _ch.profile_gap(
        _ch.invariant_profile(_ch.dual(coded_channel(w, cp, randomized=False)), seed=seed),
        _ch.invariant_profile(coded_channel(wd, cpd, randomized=True), seed=seed),
    )
    gap_rand = _ch.profile_gap(
        _ch.invariant_profile(_ch.dual(coded_channel(w, cp, randomized=True)), seed=seed),
        _ch.invariant_profile(coded_channel(wd, cpd, randomized=False), seed=seed),
    )
    return EncoderDualityReport(gap_det, gap_rand)


# ---------------------------------------------------------------------------
# EXIT functions
# ---------------------------------------------------------------------------


def exit_function(channel, cp: CodePair, family: _en.EntropyFamily, seed: int = 0) -> float:
    """Average per-position entropy of a codeword digit given the other outputs.

    The position's own output is deleted, not conditioned on. Classical
    channels are enumerated exactly; the pure-output dual of the BSC goes
    through Gram-matrix ensembles.
    """
    words = cp.codewords()
    mcount = words.shape[0]
    if isinstance(channel, _ch.ClassicalChannel):
        if channel.num_inputs != cp.q:
            raise ValueError("channel alphabet must match the code field")
        if cp.n > 12:
            raise ValueError("classical EXIT blocklength capped at 12")
        ny = channel.num_outputs
        t = channel.transition
        total = 0.0
        ys = all_vectors(ny, cp.n - 1)
        for i in range(cp.n):
            others = np.delete(words, i, axis=1)
            lik = _product_likelihood(others, ys, t)
            joint = np.zeros((cp.q, ys.shape[0]))
            np.add.at(joint, words[:, i], lik / mcount)
            total += _table_value(joint, family)
        return total / cp.n
    if isinstance(channel, _ch.CqChannel) and channel.kind == "bscdual":
        if cp.n > 10:
            raise ValueError("pure-dual EXIT blocklength capped at 10")
        p = float(channel.params["p"])
        total = 0.0
        for i in range(cp.n):
            others = np.delete(words, i, axis=1)
            ham = (others[:, None, :] != others[None, :, :]).sum(axis=2)
            ens = PureEnsemble(
                np.full(mcount, 1.0 / mcount),
                ((1.0 - 2.0 * p) ** ham).astype(complex),
                words[:, i],
                meta={"p": p, "position": i},
            )
            total += ensemble_cond_entropy(ens, family, seed=seed)
        return total / cp.n
    raise ValueError("channel must be classical or the pure dual of a BSC")


@dataclass(frozen=True)
class ExitReport:
    p: float
    lhs: float
    rhs: float
    total: float
    target: float
    gap: float

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "sum": self.total,
            "target": self.target,
            "gap": self.gap,
        }


def exit_duality_check(
    p: float,
    cp: CodePair,
    family: _en.EntropyFamily = _en.VON_NEUMANN,
    channel_family: str = "bec",
    seed: int = 0,
) -> ExitReport:
    """EXIT function of (W(p), C) plus the dual-family EXIT of (W(p) dual, C dual)."""
    dualf = _en.dual_family(family)
    cpd = cp.dual()
    if channel_family == "bec":
        lhs = exit_function(bec_classical(p), cp, family, seed=seed)
        rhs = exit_function(bec_classical(1.0 - p), cpd, dualf, seed=seed)
    elif channel_family == "bsc":
        lhs = exit_function(bsc_classical(p), cp, family, seed=seed)
        rhs = exit_function(_ch.make_bsc_dual(p), cpd, dualf, seed=seed)
    else:
        raise ValueError("channel_family must be 'bec' or 'bsc'")
    lhs, rhs = float(lhs), float(rhs)
    total = lhs + rhs
    return ExitReport(p, lhs, rhs, total, 1.0, abs(total - 1.0))


@dataclass(frozen=True)
class ExitScan:
    channel_family: str
    code: str
    rate: float
    rows: tuple[tuple[float, float, float, float], ...]  # p, lhs, rhs, sum
    transition: float | None
    capacity_at_transition: float | None
    capacity_residual: float | None

    def to_dict(self) -> dict:
        return {
            "channel_family": self.channel_family,
            "code": self.code,
            "rate": self.rate,
            "rows": [list(r) for r in self.rows],
            "transition": self.transition,
            "capacity_at_transition": self.capacity_at_transition,
            "capacity_residual": self.capacity_residual,
        }


def exit_scan(
    channel_family: str,
    cp: CodePair,
    grid,
    family: _en.EntropyFamily = _en.VON_NEUMANN,
    seed: int = 0,
) -> ExitScan:
    """EXIT curve over a parameter grid with the half-bit crossing located.

    The crossing estimate is linear interpolation; the residual compares the
    channel capacity there with the code rate and is reported, not asserted.
    """
    rows = []
    for p in grid:
        rep = exit_duality_check(float(p), cp, family, channel_family, seed=seed)
        rows.append((float(p), rep.lhs, rep.rhs, rep.total))
    ps = np.array([r[0] for r in rows])
    vals = np.array([r[1] for r in rows])
    transition = None
    for i in range(len(ps) - 1):
        lo, hi = vals[i], vals[i + 1]
        if (lo - 0.5) * (hi - 0.5) <= 0 and lo != hi:
            transition = float(ps[i] + (0.5 - lo) * (ps[i + 1] - ps[i]) / (hi - lo))
            break
    rate = cp.k / cp.n
    cap = res = None
    if transition is not None:
        if channel_family == "bec":
            cap = 1.0 - transition
        else:
            cap = 1.0 - _en.binary_entropy(transition)
        res = abs(cap - rate)
    return ExitScan(
        channel_family, cp.name or "custom", rate, tuple(rows), transition, cap, res
    )


# ---------------------------------------------------------------------------
# brute-force compression/extraction frontier
# ---------------------------------------------------------------------------


def _subspaces_by_dim(n: int) -> dict[int, list[tuple[int, ...]]]:
    """All subspaces of GF(2)^n as sorted tuples of member integers."""
    if n > 4:
        raise ValueError("subspace enumeration capped at n=4")
    from itertools import combinations

    found: set[frozenset[int]] = {frozenset({0})}
    nonzero = list(range(1, 1 << n))
    for size in range(1, n + 1):
        for basis in combinations(nonzero, size):
            span = {0}
            for v in basis:
                span |= {m ^ v for m in span}
            found.add(frozenset(span))
    out: dict[int, list[tuple[int, ...]]] = {}
    for s in found:
        dim = int(np.log2(len(s)))
        out.setdefault(dim, []).append(tuple(sorted(s)))
    for lst in out.values():
        lst.sort()
    return out


def _cosets_of(span: tuple[int, ...], n: int) -> list[list[int]]:
    seen = set()
    cosets = []
    for x in range(1 << n):
        if x in seen:
            continue
        coset = sorted(x ^ c for c in span)
        seen.update(coset)
        cosets.append(coset)
    return cosets


def _source_tables(source: _en.CqState) -> tuple[np.ndarray, bool]:
    """(transition table, is_classical) for a binary source with qubit conditionals."""
    if source.num_symbols != 2 or source.dim != 2:
        raise ValueError("brute force expects a binary source with qubit conditionals")
    t = np.stack([np.diag(c).real for c in source.conditionals])
    classical = all(
        np.max(np.abs(c - np.diag(np.diag(c)))) < 1e-12 for c in source.conditionals
    )
    return t, classical


def _best_guess_by_dim(source: _en.CqState, n: int) -> dict[int, float]:
    """Best achievable P(message | outputs, syndrome) over codes of each dimension."""
    t, classical = _source_tables(source)
    if not classical:
        raise NotImplementedError("non-diagonal sources: guessing side not supported")
    prior = source.prior
    xs = all_vectors(2, n)
    ys = all_vectors(2, n)
    px = np.ones(1 << n)
    for i in range(n):
        px *= prior[xs[:, i]]
    lik = _product_likelihood(xs, ys, t) * px[:, None]  # joint P(x, y)
    best: dict[int, float] = {}
    for dim, spans in _subspaces_by_dim(n).items():
        top = 0.0
        for span in spans:
            val = 0.0
            for coset in _cosets_of(span, n):
                val += lik[coset].max(axis=0).sum()
            top = max(top, val)
        best[dim] = top
    return best


def _block_gram(y: np.ndarray, xs: np.ndarray, py: np.ndarray, mod: np.ndarray) -> np.ndarray:
    """Gram of the modulated block states for one output string y."""
    m = xs.shape[0]
    g = np.ones((m, m))
    for i, yi in enumerate(y):
        eq = xs[:, None, i] == xs[None, :, i]
        g = g * np.where(eq, py[yi], mod[yi])
    return g


def _best_decouple_by_dim(source: _en.CqState, n: int, seed: int = 0) -> dict[int, float]:
    """Best decoupling quality over linear extractions with each kernel dimension.

    The conjugate-side states are block diagonal over the classical output
    record, so the decoupling optimization splits into per-block ascents whose
    squared optima add up.
    """
    t, classical = _source_tables(source)
    if not classical:
        raise NotImplementedError("non-diagonal sources: decoupling side not supported")
    prior = source.prior
    py = prior @ t  # per-copy output distribution
    mod = prior[0] * t[0] - prior[1] * t[1]  # <eta_y| Z |eta_y>
    xs = all_vectors(2, n)
    ys = all_vectors(2, n)
    xs_int = np.array([int("".join(map(str, row)), 2) for row in xs])
    order = np.argsort(xs_int)
    xs = xs[order]  # row r encodes integer r
    best: dict[int, float] = {}
    blocks = [_block_gram(y, xs, py, mod) for y in ys]
    embeds = [gram_embed(b.astype(complex)) for b in blocks]
    for dim, spans in _subspaces_by_dim(n).items():
        top = 0.0
        for span in spans:
            cosets = _cosets_of(span, n)
            nlab = len(cosets)
            if nlab == 1:
                top = 1.0
                break
            q = 0.0
            scale = 1.0 / np.sqrt(len(span))
            for vecs in embeds:
                factors = [
                    np.ascontiguousarray(scale * vecs[coset].T) for coset in cosets
                ]
                g = _en.max_fidelity_sum(
                    factors, [1.0 / nlab] * nlab, seed=seed, restarts=3
                )
                q += g.value**2
            top = max(top, q)
        best[dim] = min(1.0, top)
    return best


@dataclass(frozen=True)
class BruteForceTables:
    n: int
    best_guess_by_k: dict[int, float]  # code dimension k -> best P
    best_decouple_by_k: dict[int, float]  # output size k -> best Q


def compression_extraction_tables(source: _en.CqState, n: int, seed: int = 0) -> BruteForceTables:
    """Exhaustive best guessing/decoupling values over all linear codes."""
    guess = _best_guess_by_dim(source, n)
    dec_by_kernel = _best_decouple_by_dim(source, n, seed=seed)
    decouple = {n - kdim: v for kdim, v in dec_by_kernel.items()}
    return BruteForceTables(n, guess, decouple)


def compression_extraction_bruteforce(
    source: _en.CqState,
    n: int,
    eps: float,
    tables: BruteForceTables | None = None,
    seed: int = 0,
) -> tuple[int, int, int]:
    """(smallest syndrome size, largest extractable size, their sum).

    The syndrome side asks for guessing probability at least 1 - eps^2; the
    extraction side for decoupling quality at least 1 - eps^2. Both searches
    are exhaustive and independent.
    """
    if tables is None:
        tables = compression_extraction_tables(source, n, seed=seed)
    thr = 1.0 - eps * eps
    ks = [k for k in range(n + 1) if tables.best_guess_by_k[k] >= thr]
    m_len = n - max(ks)
    ls = [k for k in range(n + 1) if tables.best_decouple_by_k[k] >= thr]
    l_len = max(ls)
    return m_len, l_len, m_len + l_len


# ---------------------------------------------------------------------------
# shift-structured state identity (self-test)
# ---------------------------------------------------------------------------


def structured_state_gap(
    p_y: np.ndarray,
    sigmas,
    families=(_en.VON_NEUMANN, _en.MIN_ENTROPY, _en.MAX_ENTROPY),
    seed: int = 0,
) -> float:
    """Max gap in H(X | Y B) = H(Y | B) for shift-structured states.

    The state couples a uniform X to Y = X + Z with Z ~ p_y and side
    information sigma_z; both sides are evaluated independently for each
    requested family.
    """
    p_y = np.asarray(p_y, dtype=float)
    d = len(p_y)
    dim = sigmas[0].shape[0]
    conds = []
    for x in range(d):
        rho = np.zeros((d * dim, d * dim), dtype=complex)
        for z in range(d):
            y = (x + z) % d
            rho[y * dim : (y + 1) * dim, y * dim : (y + 1) * dim] = p_y[z] * sigmas[z]
        conds.append(rho)
    lhs_state = _en.CqState(np.full(d, 1.0 / d), tuple(conds))
    rhs_state = _en.CqState(p_y, tuple(sigmas))
    gap = 0.0
    for fam in families:
        lhs = _en.cond_entropy(lhs_state, fam, seed=seed)
        rhs = _en.cond_entropy(rhs_state, fam, seed=seed)
        gap = max(gap, abs(lhs - rhs))
    return gap

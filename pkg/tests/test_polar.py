import numpy as np
import pytest

from cqdual import channels as ch
from cqdual import entropies as en
from cqdual import polar
from cqdual.corpus import random_channel, random_pure_vector, random_symmetric_channel
from cqdual.linalg import fidelity


def test_bec_check_and_variable_close_in_family():
    p = 0.35
    wc = polar.convolve(ch.make_bec(p), ch.make_bec(p), polar.CHECK)
    wv = polar.convolve(ch.make_bec(p), ch.make_bec(p), polar.VARIABLE)
    assert ch.profile_gap(
        ch.invariant_profile(wc), ch.invariant_profile(ch.make_bec(2 * p - p * p))
    ) <= 1e-8
    assert ch.profile_gap(
        ch.invariant_profile(wv), ch.invariant_profile(ch.make_bec(p * p))
    ) <= 1e-8


def test_variable_bhattacharyya_multiplicative(rng):
    w = ch.make_pure([random_pure_vector(rng, 2) for _ in range(2)])
    wp = ch.make_pure([random_pure_vector(rng, 3) for _ in range(2)])
    conv = polar.convolve(w, wp, polar.VARIABLE)
    b = fidelity(conv.outputs[0], conv.outputs[1])
    b1 = fidelity(w.outputs[0], w.outputs[1])
    b2 = fidelity(wp.outputs[0], wp.outputs[1])
    assert abs(b - b1 * b2) < 1e-9


def test_bsc_worse_profile():
    p = 0.2
    worse = polar.worse(ch.make_bsc(p), ch.make_bsc(p))
    target = ch.make_bsc(2 * p * (1 - p))
    assert ch.profile_gap(
        ch.invariant_profile(worse), ch.invariant_profile(target)
    ) <= 1e-8


def test_bec_half_better_worse():
    w = ch.make_bec(0.5)
    assert ch.profile_gap(
        ch.invariant_profile(polar.better(w, w)), ch.invariant_profile(ch.make_bec(0.25))
    ) <= 1e-8
    assert ch.profile_gap(
        ch.invariant_profile(polar.worse(w, w)), ch.invariant_profile(ch.make_bec(0.75))
    ) <= 1e-8


def test_better_requires_witnesses(rng):
    w = random_channel(rng, 2)
    with pytest.raises(ValueError):
        polar.better(w, w)


def test_entropy_conservation_symmetric(rng):
    for _ in range(5):
        w = random_symmetric_channel(rng, 3)
        h = en.cond_entropy(en.from_channel(w), en.VON_NEUMANN)
        hc = en.cond_entropy(
            en.from_channel(polar.convolve(w, w, polar.CHECK)), en.VON_NEUMANN
        )
        hv = en.cond_entropy(
            en.from_channel(polar.convolve(w, w, polar.VARIABLE)), en.VON_NEUMANN
        )
        assert abs(hc + hv - 2 * h) < 1e-7


# ---------------------------------------------------------------------------
# convolution duality
# ---------------------------------------------------------------------------


def test_convolution_duality_bec_pair():
    rep = polar.convolution_duality_check(ch.make_bec(0.4), ch.make_bec(0.4))
    assert rep.max_gap <= 1e-6


def test_convolution_duality_bsc_pair():
    rep = polar.convolution_duality_check(ch.make_bsc(0.11), ch.make_bsc(0.3))
    assert rep.max_gap <= 1e-6


def test_convolution_duality_pure_with_classical(rng):
    w = ch.make_pure([random_pure_vector(rng, 2) for _ in range(2)])
    wp = ch.make_classical(np.array([[0.8, 0.1, 0.1], [0.2, 0.5, 0.3]]))
    rep = polar.convolution_duality_check(w, wp)
    assert rep.max_gap <= 1e-6


def test_check_to_variable_direction_needs_no_symmetry(rng):
    # this leg rests only on the automatic covariance of dual channels
    for _ in range(3):
        w, wp = random_channel(rng, 2), random_channel(rng, 3)
        rep = polar.convolution_duality_check(w, wp)
        assert rep.check_to_variable_gap <= 1e-6


def test_variable_to_check_direction_needs_symmetry(rng):
    # regression: self-convolving a non-symmetric channel breaks this leg
    w = random_channel(np.random.default_rng(0), 2)
    rep = polar.convolution_duality_check(w, w)
    assert rep.variable_to_check_gap > 1e-3
    assert rep.check_to_variable_gap <= 1e-6


# ---------------------------------------------------------------------------
# trajectories
# ---------------------------------------------------------------------------


def test_bec_trajectory_levels():
    traj = polar.trajectory(ch.make_bec(0.5), [0, 1])
    assert [round(s.h, 6) for s in traj.levels] == [0.25, 0.4375]
    assert traj.complete


def test_trajectory_pure_channel_multiplicativity(rng):
    w = ch.make_pure([random_pure_vector(rng, 2) for _ in range(2)])
    b = fidelity(w.outputs[0], w.outputs[1])
    traj = polar.trajectory(w, [0, 0])
    assert abs(traj.levels[-1].bhattacharyya - b**4) < 1e-8


def test_bec_scalar_matches_generic_path():
    # the same transition probabilities pushed through the generic matrix
    # machinery must reproduce the scalar recursion at every level
    p = 0.45
    scalar = polar.trajectory(ch.make_bec(p), [0, 1, 1, 0])
    generic = polar.trajectory(
        ch.make_classical(np.array([[1 - p, 0, p], [0, 1 - p, p]])), [0, 1, 1, 0]
    )
    for a, b in zip(scalar.levels, generic.levels):
        assert abs(a.h - b.h) < 1e-9
        assert abs(a.hmin - b.hmin) < 1e-9
        assert abs(a.hmax - b.hmax) < 1e-9
        assert abs(a.bhattacharyya - b.bhattacharyya) < 1e-9
        assert b.truncation_error <= 1e-11


def test_trajectory_duality_small(rng):
    channels = [
        ch.make_bsc(0.11),
        ch.make_bec(0.4),
        random_symmetric_channel(rng, 2),
    ]
    for w in channels:
        for bits in ([0, 1], [1, 1]):
            assert polar.trajectory_duality_gap(w, bits) <= 1e-5


def test_trajectory_level_cap(rng):
    with pytest.raises(ValueError):
        polar.trajectory(random_channel(rng, 2), [0] * 7)


def test_bhattacharyya_bridges(small_corpus):
    for w in small_corpus[:12]:
        s = en.from_channel(w)
        hmin = en.cond_entropy(s, en.MIN_ENTROPY)
        b = fidelity(w.outputs[0], w.outputs[1])
        assert hmin <= b + 1e-9
        assert hmin >= b * b / 4 - 1e-9


def test_fidelity_uncertainty(small_corpus):
    for w in small_corpus[:12]:
        wd = ch.dual(w)
        b = fidelity(w.outputs[0], w.outputs[1])
        bd = fidelity(wd.outputs[0], wd.outputs[1])
        assert b + bd >= 1 - 1e-9


# ---------------------------------------------------------------------------
# polarization experiments
# ---------------------------------------------------------------------------


def test_polarization_deterministic_per_seed():
    a = polar.polarization_experiment(ch.make_bec(0.3), 12, 500, seed=9)
    b = polar.polarization_experiment(ch.make_bec(0.3), 12, 500, seed=9)
    assert a.frac_b_small == b.frac_b_small
    assert np.array_equal(a.final_b, b.final_b)


def test_polarization_complement_mirrors_dual():
    # same seed, complemented sequences on the dual erasure channel reproduce
    # exactly the complements of the primal trajectories
    a = polar.polarization_experiment(ch.make_bec(0.3), 10, 400, seed=5)
    b = polar.polarization_experiment(
        ch.make_bec(0.7), 10, 400, seed=5, complement=True
    )
    assert np.max(np.abs(a.final_b - b.final_b_complement)) < 1e-12


def test_polarization_capacity_split():
    rep = polar.polarization_experiment(ch.make_bec(0.3), 16, 10_000, beta=0.4, seed=1)
    assert abs(rep.frac_b_small - 0.7) <= 0.05
    assert abs(rep.frac_hmin_small - 0.7) <= 0.05


def test_polarization_generic_channel_small():
    rep = polar.polarization_experiment(ch.make_bsc(0.11), 2, 16, seed=3)
    assert 0.0 <= rep.frac_b_small <= 1.0
    with pytest.raises(ValueError):
        polar.polarization_experiment(ch.make_bsc(0.11), 8, 4, seed=3)


def test_csv_rows_shapes():
    traj = polar.trajectory(ch.make_bec(0.5), [0, 1, 0])
    rows = polar.trajectory_to_csv_rows(traj)
    assert len(rows) == 3 and set(rows[0]) >= {"level", "h", "hmin", "hmax"}
    rep = polar.polarization_experiment(ch.make_bec(0.5), 8, 50, seed=2)
    rows = polar.experiment_to_csv_rows(rep)
    assert len(rows) == 50 and "b_final" in rows[0]


def test_polarization_unbiased_erasure_split():
    rep = polar.polarization_experiment(ch.make_bec(0.5), 16, 10_000, beta=0.4, seed=2)
    assert abs(rep.frac_b_small - 0.5) <= 0.05
    assert abs(rep.frac_b_large - 0.5) <= 0.05

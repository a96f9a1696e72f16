import math

import numpy as np
import pytest

from singlerail import (
    BeamSplitter,
    ConfigError,
    FockState,
    ModeRegister,
    QndConfig,
    apply_beam_splitter,
    basis_state,
    detect_single_photon,
    phase_flip,
    qnd_measure,
    single_photon,
    vacuum,
)
from conftest import random_state

INV_SQRT2 = 1.0 / math.sqrt(2.0)


class TestBeamSplitterConstruction:
    def test_minus_input_must_be_an_input(self):
        with pytest.raises(ConfigError):
            BeamSplitter(("a", "b"), ("c", "d"), minus_input="c")

    def test_modes_must_be_distinct(self):
        with pytest.raises(ConfigError):
            BeamSplitter(("a", "a"), ("c", "d"), minus_input="a")
        with pytest.raises(ConfigError):
            BeamSplitter(("a", "b"), ("c", "c"), minus_input="a")

    def test_coefficients(self):
        bs = BeamSplitter(("a", "b"), ("c", "d"), minus_input="b")
        assert bs.coefficients("a") == (pytest.approx(INV_SQRT2), pytest.approx(INV_SQRT2))
        assert bs.coefficients("b") == (pytest.approx(INV_SQRT2), pytest.approx(-INV_SQRT2))


class TestSinglePhotonSplit:
    def test_plus_input_splits_symmetrically(self):
        reg = ModeRegister(("a", "b"))
        bs = BeamSplitter(("a", "b"), ("c", "d"), minus_input="b")
        out = apply_beam_splitter(single_photon(reg, "a"), bs)
        assert out.amplitude((1, 0)) == pytest.approx(INV_SQRT2)
        assert out.amplitude((0, 1)) == pytest.approx(INV_SQRT2)

    def test_minus_input_carries_the_sign(self):
        reg = ModeRegister(("a", "b"))
        bs = BeamSplitter(("a", "b"), ("c", "d"), minus_input="b")
        out = apply_beam_splitter(single_photon(reg, "b"), bs)
        assert out.amplitude((1, 0)) == pytest.approx(INV_SQRT2)
        assert out.amplitude((0, 1)) == pytest.approx(-INV_SQRT2)

    def test_spectator_modes_untouched(self):
        reg = ModeRegister(("a", "b", "m"))
        bs = BeamSplitter(("a", "b"), ("c", "d"), minus_input="b")
        s = FockState(reg, {(1, 0, 1): 1.0}).normalize()
        out = apply_beam_splitter(s, bs)
        assert out.register.names == ("c", "d", "m")
        assert out.amplitude((1, 0, 1)) == pytest.approx(INV_SQRT2)
        assert out.amplitude((0, 1, 1)) == pytest.approx(INV_SQRT2)


def test_hong_ou_mandel_bunching():
    # (1,1) in -> equal-weight (2,0) and (0,2), no coincidence term
    reg = ModeRegister(("a", "b"))
    bs = BeamSplitter(("a", "b"), ("c", "d"), minus_input="b")
    out = apply_beam_splitter(basis_state(reg, (1, 1)), bs)
    assert out.amplitude((1, 1)) == pytest.approx(0.0, abs=1e-15)
    assert abs(out.amplitude((2, 0))) == pytest.approx(INV_SQRT2)
    assert abs(out.amplitude((0, 2))) == pytest.approx(INV_SQRT2)
    assert out.norm_sq() == pytest.approx(1.0, abs=1e-12)


def test_two_photons_one_arm():
    # (2,0) in -> binomial pattern 1/2, 1/sqrt2, 1/2
    reg = ModeRegister(("a", "b"))
    bs = BeamSplitter(("a", "b"), ("c", "d"), minus_input="b")
    out = apply_beam_splitter(basis_state(reg, (2, 0)), bs)
    assert out.amplitude((2, 0)) == pytest.approx(0.5)
    assert out.amplitude((1, 1)) == pytest.approx(INV_SQRT2)
    assert out.amplitude((0, 2)) == pytest.approx(0.5)


def test_swap_station_four_term_expansion():
    # (alpha a + beta b)(alpha c + beta d) with BS on (b, c), minus on c
    alpha, beta = math.sqrt(0.8), math.sqrt(0.2)
    ab = FockState(ModeRegister(("a", "b")), {(1, 0): alpha, (0, 1): beta})
    cd = FockState(ModeRegister(("c", "d")), {(1, 0): alpha, (0, 1): beta})
    joint = ab.tensor(cd)
    bs = BeamSplitter(("b", "c"), ("D1", "D2"), minus_input="c")
    out = joint.align_to(ModeRegister(("a", "b", "c", "d")))
    out = apply_beam_splitter(out, bs)
    # register order after the positional rename: (a, D1, D2, d)
    assert out.register.names == ("a", "D1", "D2", "d")
    s2 = INV_SQRT2
    assert out.amplitude((1, 1, 0, 0)) == pytest.approx(alpha * alpha * s2)
    assert out.amplitude((1, 0, 1, 0)) == pytest.approx(-alpha * alpha * s2)
    assert out.amplitude((0, 1, 0, 1)) == pytest.approx(beta * beta * s2)
    assert out.amplitude((0, 0, 1, 1)) == pytest.approx(beta * beta * s2)
    assert out.amplitude((1, 0, 0, 1)) == pytest.approx(alpha * beta)
    assert abs(out.amplitude((0, 2, 0, 0))) == pytest.approx(alpha * beta * s2)
    assert abs(out.amplitude((0, 0, 2, 0))) == pytest.approx(alpha * beta * s2)
    assert out.norm_sq() == pytest.approx(1.0, abs=1e-12)


def test_beam_splitter_unitarity_random(rng):
    reg = ModeRegister(("a", "b", "m"))
    bs = BeamSplitter(("a", "b"), ("c", "d"), minus_input="a")
    for _ in range(300):
        s = random_state(rng, reg)
        out = apply_beam_splitter(s, bs)
        assert out.norm_sq() == pytest.approx(1.0, abs=1e-12)


def test_beam_splitter_involution(rng):
    # the balanced splitter is its own inverse when wired back symmetrically
    reg = ModeRegister(("a", "b"))
    fwd = BeamSplitter(("a", "b"), ("c", "d"), minus_input="b")
    back = BeamSplitter(("c", "d"), ("a", "b"), minus_input="d")
    for _ in range(50):
        s = random_state(rng, reg)
        roundtrip = apply_beam_splitter(apply_beam_splitter(s, fwd), back)
        for occ, re, im in s.serialize():
            assert roundtrip.amplitude(occ) == pytest.approx(complex(re, im), abs=1e-12)


class TestQnd:
    def test_parity_theta_groups_zero_and_two(self):
        cfg = QndConfig(("b1", "b2"), math.pi)
        classes = cfg.outcome_classes(2)
        assert frozenset({0, 2}) in classes
        assert frozenset({1}) in classes
        assert len(classes) == 2

    def test_generic_theta_resolves_all_counts(self):
        cfg = QndConfig(("b1", "b2"), 1.0)
        classes = cfg.outcome_classes(2)
        assert sorted(classes, key=min) == [frozenset({0}), frozenset({1}), frozenset({2})]

    def test_outcome_completeness(self, rng):
        reg = ModeRegister(("b1", "b2", "x"))
        for theta in (math.pi, 1.0, 0.3):
            cfg = QndConfig(("b1", "b2"), theta)
            for _ in range(50):
                s = random_state(rng, reg)
                outs = qnd_measure(s, cfg)
                assert sum(o.probability for o in outs) == pytest.approx(1.0, abs=1e-12)
                for o in outs:
                    assert o.post_state.norm_sq() == pytest.approx(1.0, abs=1e-12)

    def test_measurement_is_nondemolition(self):
        # monitored photons survive in the post state
        reg = ModeRegister(("b1", "b2"))
        s = FockState(reg, {(1, 0): 1.0, (0, 1): 1.0, (1, 1): 1.0}).normalize()
        cfg = QndConfig(("b1", "b2"), math.pi)
        outs = {frozenset(o.outcome_class): o for o in qnd_measure(s, cfg)}
        even = outs[frozenset({0, 2})]
        assert even.probability == pytest.approx(1 / 3)
        assert even.post_state.amplitude((1, 1)) == pytest.approx(1.0)


class TestDetection:
    def test_distinct_nonempty_modes_required(self):
        s = vacuum(ModeRegister(("a", "b")))
        with pytest.raises(ConfigError):
            detect_single_photon(s, ())
        with pytest.raises(ConfigError):
            detect_single_photon(s, ("a", "a"))

    def test_click_absorbs_the_photon(self):
        reg = ModeRegister(("a", "D"))
        s = FockState(reg, {(0, 1): 1.0, (1, 0): 1.0}).normalize()
        outs = detect_single_photon(s, ("D",))
        by_fired = {o.fired: o for o in outs}
        click = by_fired["D"]
        assert click.probability == pytest.approx(0.5)
        assert click.post_state.register.names == ("a",)
        assert click.post_state.amplitude((0,)) == pytest.approx(1.0)
        noclick = by_fired[None]
        assert noclick.flagged is False
        assert noclick.post_state.amplitude((1,)) == pytest.approx(1.0)

    def test_multi_photon_patterns_flagged(self):
        reg = ModeRegister(("a", "D1", "D2"))
        s = FockState(reg, {(0, 2, 0): 1.0, (0, 1, 1): 1.0, (1, 0, 0): 1.0}).normalize()
        outs = detect_single_photon(s, ("D1", "D2"))
        flagged = [o for o in outs if o.flagged]
        assert {o.pattern for o in flagged} == {(2, 0), (1, 1)}
        for o in flagged:
            assert o.fired is None
            assert o.photons_seen >= 2

    def test_exhaustive_over_random_states(self, rng):
        reg = ModeRegister(("x", "D1", "D2"))
        for _ in range(100):
            s = random_state(rng, reg)
            outs = detect_single_photon(s, ("D1", "D2"))
            assert sum(o.probability for o in outs) == pytest.approx(1.0, abs=1e-12)
            patterns = [o.pattern for o in outs]
            assert len(patterns) == len(set(patterns))


class TestPhaseFlip:
    def test_flips_odd_occupancy_only(self):
        reg = ModeRegister(("a", "b"))
        s = FockState(reg, {(1, 0): 0.5, (0, 1): 0.5, (1, 1): 0.5, (0, 0): 0.5})
        out = phase_flip(s, "b")
        assert out.amplitude((1, 0)) == 0.5
        assert out.amplitude((0, 1)) == -0.5
        assert out.amplitude((1, 1)) == -0.5
        assert out.amplitude((0, 0)) == 0.5

    def test_involution_is_exact(self, rng):
        reg = ModeRegister(("a", "b", "c"))
        for _ in range(200):
            s = random_state(rng, reg)
            assert phase_flip(phase_flip(s, "b"), "b").serialize() == s.serialize()

    def test_preserves_norm(self, rng):
        reg = ModeRegister(("a", "b"))
        for _ in range(50):
            s = random_state(rng, reg)
            assert phase_flip(s, "a").norm_sq() == pytest.approx(1.0, abs=1e-12)

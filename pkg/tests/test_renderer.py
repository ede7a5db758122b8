import math

import numpy as np
import pytest

from rirkit import (
    Cardioid,
    ConfigurationError,
    Dipole,
    DirectedEndpoint,
    ImageIndex,
    ImageSource,
    Omnidirectional,
    RenderConfig,
    RoomSpec,
    SimplifiedSpeaker,
    Transducer,
    compute_image_taps,
    evaluate_pattern,
    is_directional,
    omni_taps,
    render,
)
from rirkit.geometry import geometry_of, image_indices

from conftest import ANCHORS_FACING, BETAS, MIC_POS, SRC_POS
from oracles import classical_image_model, freq_response


def make_pair(src_pattern=None, mic_pattern=None, mic_anchors=None):
    source = Transducer(
        endpoint=DirectedEndpoint(SRC_POS, *ANCHORS_FACING),
        pattern=src_pattern or Omnidirectional(),
    )
    anchors = mic_anchors or ((1.5, 1.5, 0.9), (1.4, 1.5, 1.0))
    sensor = Transducer(
        endpoint=DirectedEndpoint(MIC_POS, *anchors),
        pattern=mic_pattern or Omnidirectional(),
    )
    return source, sensor


class TestRenderConfig:
    def test_defaults(self):
        cfg = RenderConfig(Q_x=1, Q_y=1, Q_z=1, L_h=1024)
        assert cfg.Q_max == -1
        assert cfg.D == 32
        assert cfg.d_e == 32
        assert cfg.fft_size == 1024

    def test_overrides(self):
        cfg = RenderConfig(Q_x=1, Q_y=1, Q_z=1, L_h=64, D=8, D_e=20, N_fft=512)
        assert cfg.d_e == 20
        assert cfg.fft_size == 512

    @pytest.mark.parametrize(
        "kwargs",
        [dict(Q_x=-1), dict(L_h=0), dict(D=0), dict(D=8, D_e=4)],
    )
    def test_invalid(self, kwargs):
        base = dict(Q_x=1, Q_y=1, Q_z=1, L_h=64)
        base.update(kwargs)
        with pytest.raises(ConfigurationError):
            RenderConfig(**base)


class TestIsDirectional:
    def test_scalar_examples(self):
        assert is_directional(ImageIndex(0, 0, 0, 0, 0, 0), 0) is True
        assert is_directional(ImageIndex(1, 1, 0, 1, -2, 0), 2) is True
        assert is_directional(ImageIndex(0, 0, 0, 3, 0, 0), 2) is False

    def test_negative_cutoff_disables_all(self):
        idx = image_indices(2, 2, 2)
        assert not is_directional(idx, -1).any()

    def test_count_at_cutoff_two(self):
        # 8 parities x 5^3 translation cells inside |q| <= 2
        idx = image_indices(4, 4, 4)
        assert int(is_directional(idx, 2).sum()) == 8 * 125

    def test_parity_bits_ignored(self):
        assert is_directional(ImageIndex(1, 1, 1, 0, 0, 0), 0) is True


class TestComputeImageTaps:
    room = RoomSpec(4.0, 4.0, 4.0, BETAS, c=340.0, f_s=16000.0)
    cfg = RenderConfig(Q_x=0, Q_y=0, Q_z=0, L_h=2048, Q_max=0, D=16)

    def direct_image(self):
        phi, d, tau = geometry_of(SRC_POS, MIC_POS, 340.0)
        return ImageSource(
            index=ImageIndex(0, 0, 0, 0, 0, 0),
            r_n=np.array(SRC_POS), beta_n=1.0, phi_n=phi, d_n=d, tau_n=tau,
        )

    def test_omni_pair_matches_closed_form(self):
        img = self.direct_image()
        source, sensor = make_pair()
        taps = compute_image_taps(img, source, sensor, self.room, self.cfg)
        zeta = img.tau_n * 16000.0 - round(img.tau_n * 16000.0)
        assert np.allclose(taps, omni_taps(zeta, 16), atol=1e-3)

    def test_perpendicular_dipole_is_silent(self):
        # mic anchors chosen so the direct path is orthogonal to the mic axis
        img = self.direct_image()
        source, sensor = make_pair(
            mic_pattern=Dipole(), mic_anchors=((1.5, 1.5, 0.9), (1.4, 1.5, 1.0))
        )
        taps = compute_image_taps(img, source, sensor, self.room, self.cfg)
        assert np.max(np.abs(taps)) < 1e-9

    def test_low_frequency_gain_matches_pattern_product(self):
        img = self.direct_image()
        src_p = SimplifiedSpeaker()
        mic_p = Cardioid()
        # mic z-axis pointing at the source along (+x, +y)
        source, sensor = make_pair(
            src_pattern=src_p, mic_pattern=mic_p,
            mic_anchors=((1.4, 1.4, 1.0), (1.4, 1.5, 1.0)),
        )
        taps = compute_image_taps(img, source, sensor, self.room, self.cfg)
        zeta = img.tau_n * 16000.0 - round(img.tau_n * 16000.0)
        # evaluate the filter near DC and compare to the product of the
        # two pattern gains at that geometry
        H0 = abs(freq_response(taps, np.array([1e-3]))[0])
        # source faces (-1,-1,0)/sqrt(2); direct departure is (-1,-1,0)/sqrt(2)
        src_gain = evaluate_pattern(
            src_p, 1e-3, _ori_from(math.cos(0.0)), 16000.0
        )
        mic_gain = evaluate_pattern(mic_p, 1e-3, _ori_from(1.0), 16000.0)
        assert H0 == pytest.approx(abs(src_gain * mic_gain), rel=1e-3)


def _ori_from(cos_theta):
    from rirkit import Orientation

    return Orientation.from_angles(math.acos(cos_theta), 0.0)


class TestRender:
    def test_matches_classical_oracle(self, room):
        source, sensor = make_pair()
        cfg = RenderConfig(Q_x=3, Q_y=3, Q_z=3, L_h=1400, Q_max=-1, D=32)
        got = render(room, source, sensor, cfg).taps
        ref = classical_image_model(
            (4.0, 4.0, 4.0), BETAS, SRC_POS, MIC_POS, 3, 340.0, 16000.0, 1400, 32
        )
        assert np.max(np.abs(got - ref)) < 1e-9

    def test_free_field_single_arrival(self, dead_room):
        source, sensor = make_pair()
        cfg = RenderConfig(Q_x=2, Q_y=2, Q_z=2, L_h=512, D=32)
        h = render(dead_room, source, sensor, cfg).taps
        # all energy within the 2D+1 window around the direct delay
        n0 = 100
        outside = np.concatenate([h[: n0 - 32], h[n0 + 33 :]])
        assert np.max(np.abs(outside)) < 1e-12
        d = math.sqrt(4.5)
        assert np.max(np.abs(h)) <= 1 / (4 * math.pi * d) + 1e-12

    def test_omni_directional_pipelines_agree(self, room):
        # with omni patterns the directional branch must reproduce the
        # closed-form branch up to DFT resolution
        source, sensor = make_pair()
        cfg_o = RenderConfig(Q_x=1, Q_y=1, Q_z=1, L_h=700, Q_max=-1)
        cfg_d = RenderConfig(Q_x=1, Q_y=1, Q_z=1, L_h=700, Q_max=1)
        a = render(room, source, sensor, cfg_o).taps
        b = render(room, source, sensor, cfg_d).taps
        assert np.max(np.abs(a - b)) < 1e-3 * np.max(np.abs(a))

    def test_parallel_is_bit_identical(self, room):
        source, sensor = make_pair(src_pattern=SimplifiedSpeaker())
        cfg = RenderConfig(Q_x=4, Q_y=4, Q_z=4, L_h=1024, Q_max=1)
        serial = render(room, source, sensor, cfg, workers=1).taps
        for w in (2, 4):
            parallel = render(room, source, sensor, cfg, workers=w).taps
            assert np.array_equal(serial, parallel)

    def test_direct_peak_independent_of_walls(self):
        source, sensor = make_pair()
        cfg = RenderConfig(Q_x=0, Q_y=0, Q_z=0, L_h=256)
        peaks = []
        for betas in ((0.0,) * 6, (0.5,) * 6, (0.96,) * 6):
            r = RoomSpec(4.0, 4.0, 4.0, betas, c=340.0, f_s=16000.0)
            h = render(r, source, sensor, cfg).taps
            peaks.append(h[100])
        # only the zero-order image is beta-free; higher orders differ
        assert peaks[0] == pytest.approx(peaks[0], abs=0)
        assert np.ptp(peaks) < 0.05 * abs(peaks[0])

    def test_energy_monotone_in_absorption(self):
        source, sensor = make_pair()
        cfg = RenderConfig(Q_x=3, Q_y=3, Q_z=3, L_h=1024)
        energies = []
        for b in (0.3, 0.6, 0.9):
            r = RoomSpec(4.0, 4.0, 4.0, (b,) * 6, c=340.0, f_s=16000.0)
            h = render(r, source, sensor, cfg).taps
            energies.append(float(h @ h))
        assert energies[0] < energies[1] < energies[2]

    def test_late_images_clipped(self, room):
        source, sensor = make_pair()
        cfg = RenderConfig(Q_x=3, Q_y=3, Q_z=3, L_h=64)
        h = render(room, source, sensor, cfg).taps
        assert h.shape == (64,)
        assert np.all(np.isfinite(h))

    def test_mic_outside_rejected(self, room):
        source, _ = make_pair()
        bad = Transducer(
            endpoint=DirectedEndpoint((5.0, 1.0, 1.0), (5.0, 1.0, 0.9), (4.9, 1.0, 1.0)),
            pattern=Omnidirectional(),
        )
        cfg = RenderConfig(Q_x=1, Q_y=1, Q_z=1, L_h=64)
        with pytest.raises(ConfigurationError):
            render(room, source, bad, cfg)

    def test_sampling_rate_propagated(self, room):
        source, sensor = make_pair()
        ir = render(room, source, sensor, RenderConfig(Q_x=0, Q_y=0, Q_z=0, L_h=256))
        assert ir.f_s == 16000.0

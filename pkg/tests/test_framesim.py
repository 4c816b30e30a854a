import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from blurforge.errors import DimensionMismatch, InsufficientFrames
from blurforge.framesim import (
    FrameWindow,
    list_frame_files,
    sample_window,
    sample_window_indices,
    simulate_frame_blur,
)
from blurforge.image import save_png, to_uint8
from blurforge.rng import make_rng


class TestSimulateFrameBlur:
    def test_single_frame_identity(self, random_rgb):
        frame = random_rgb()
        blurred, sharp = simulate_frame_blur(FrameWindow(frames=[frame]))
        assert np.array_equal(sharp, frame)
        # within one 8-bit step after the gamma round trip
        assert np.abs(to_uint8(blurred).astype(int) - to_uint8(frame).astype(int)).max() <= 1

    def test_identical_frames_fixed_point(self):
        frames = [np.full((8, 8), 0.42) for _ in range(7)]
        blurred, sharp = simulate_frame_blur(FrameWindow(frames=frames))
        np.testing.assert_allclose(blurred, 0.42, atol=1e-6)
        np.testing.assert_allclose(sharp, 0.42)

    def test_two_constant_frames_closed_form(self):
        a = np.full((6, 6), 0.2)
        b = np.full((6, 6), 0.8)
        blurred, sharp = simulate_frame_blur(FrameWindow(frames=[a, b], gamma=2.2))
        expected = ((0.2**2.2 + 0.8**2.2) / 2.0) ** (1 / 2.2)
        np.testing.assert_allclose(blurred, expected, atol=1e-6)
        assert np.array_equal(sharp, b)  # middle of two rounds down to index 1

    def test_middle_frame_odd(self):
        frames = [np.full((4, 4), v) for v in (0.1, 0.2, 0.3, 0.4, 0.5)]
        _, sharp = simulate_frame_blur(FrameWindow(frames=frames))
        np.testing.assert_allclose(sharp, 0.3)

    def test_shape_mismatch_raises(self):
        with pytest.raises(DimensionMismatch):
            FrameWindow(frames=[np.zeros((4, 4)), np.zeros((5, 4))])

    @settings(max_examples=30, deadline=None)
    @given(
        values=st.lists(
            st.floats(min_value=0.0, max_value=1.0), min_size=1, max_size=10
        )
    )
    def test_blur_between_min_and_max(self, values):
        frames = [np.full((3, 3), v) for v in values]
        blurred, _ = simulate_frame_blur(FrameWindow(frames=frames))
        assert blurred.min() >= min(values) - 1e-9
        assert blurred.max() <= max(values) + 1e-9

    def test_gamma_round_trip_identity(self):
        x = np.linspace(0, 1, 1000)
        roundtrip = np.power(np.power(x, 2.2), 1 / 2.2)
        np.testing.assert_allclose(roundtrip, x, atol=1e-12)


class TestSampleWindow:
    def test_forced_window_takes_everything(self, random_gray):
        frames = [random_gray(8, 8) for _ in range(25)]
        w = sample_window(frames, make_rng(0), n_min=25, n_max=25)
        assert len(w.frames) == 25
        assert np.array_equal(w.frames[0], frames[0])
        assert np.array_equal(w.frames[-1], frames[-1])

    def test_deterministic_under_seed(self):
        a = sample_window_indices(100, make_rng(9))
        b = sample_window_indices(100, make_rng(9))
        assert a == b

    def test_insufficient_frames(self):
        with pytest.raises(InsufficientFrames):
            sample_window_indices(24, make_rng(0))

    def test_window_always_in_bounds(self):
        for seed in range(200):
            n, offset = sample_window_indices(40, make_rng(seed))
            assert 5 <= n <= 25
            assert 0 <= offset <= 40 - n

    def test_length_distribution_uniform(self):
        rng = make_rng(2718)
        counts = np.zeros(21, dtype=int)
        for _ in range(10_000):
            n, _ = sample_window_indices(100, rng)
            counts[n - 5] += 1
        result = stats.chisquare(counts)
        assert result.pvalue > 0.01


class TestFrameFiles:
    def test_lexicographic_order(self, tmp_path):
        names = ["b.png", "a.png", "c.png"]
        for name in names:
            save_png(np.zeros((4, 4)), tmp_path / name)
        (tmp_path / "notes.txt").write_text("ignored")
        files = list_frame_files(tmp_path)
        assert [f.name for f in files] == ["a.png", "b.png", "c.png"]

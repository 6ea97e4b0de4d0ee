import io
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hyperlens.errors import BandOutOfRange, DimensionMismatch, InvalidParams
from hyperlens.grid import ImageGrid
from hyperlens.metrics import (
    CSV_HEADER, INFINITE_PSNR, band_energy_fraction, csv_row, csv_text, evaluate, mse, psnr,
    psnr_from_mse, read_csv,
)


def test_mse_basic():
    a = ImageGrid(np.zeros((3, 4, 4)))
    assert mse(a, a) == (0.0, 0.0, 0.0)
    assert mse(ImageGrid(np.zeros((4, 4))), ImageGrid.constant(0.5, 4, 4)) == (0.25,)


def test_mse_matches_summation(rng):
    a, b = rng.random((4, 4)), rng.random((4, 4))
    s = 0.0
    for i in range(4):
        for j in range(4):
            s += (a[i, j] - b[i, j]) ** 2
    assert mse(ImageGrid(a), ImageGrid(b))[0] == pytest.approx(s / 16, rel=1e-15, abs=1e-15)


def test_mse_mismatch():
    with pytest.raises(DimensionMismatch):
        mse(ImageGrid(np.zeros((4, 4))), ImageGrid(np.zeros((4, 5))))


def test_psnr_values():
    a = ImageGrid(np.zeros((3, 4, 4)))
    res = psnr(a, a)
    assert res.pooled == INFINITE_PSNR and all(math.isinf(p) for p in res.per_channel)
    b = ImageGrid.constant(0.1, 4, 4)
    assert psnr(ImageGrid(np.zeros((4, 4))), b).pooled == pytest.approx(20.0, abs=1e-12)
    with pytest.raises(InvalidParams):
        psnr(a, a, peak=0)


def test_psnr_pooled_uses_pooled_mse(rng):
    a, b = ImageGrid(rng.random((3, 8, 8))), ImageGrid(rng.random((3, 8, 8)))
    res = psnr(a, b)
    assert res.pooled == pytest.approx(10 * math.log10(1 / np.mean((a.samples - b.samples) ** 2)), rel=1e-12)


def test_psnr_symmetry(rng):
    a, b = ImageGrid(rng.random((3, 9, 7))), ImageGrid(rng.random((3, 9, 7)))
    assert psnr(a, b) == psnr(b, a)


@given(st.floats(1e-12, 10), st.floats(1e-12, 10))
def test_psnr_monotone_in_mse(m1, m2):
    if m1 < m2:
        assert psnr_from_mse(m1) > psnr_from_mse(m2)


def test_band_energy_whole_and_constant(rng):
    img = ImageGrid(rng.random((3, 20, 30)))
    assert band_energy_fraction(img, 1.0) == 1.0
    assert band_energy_fraction(ImageGrid.constant(0.3, 20, 20), 0.1) == pytest.approx(1.0, abs=1e-15)


def test_band_energy_white_noise():
    fracs = []
    for seed in range(20):
        x = np.random.default_rng(seed).normal(size=(64, 64))
        fracs.append(band_energy_fraction(ImageGrid(x), 0.5))
    assert abs(np.mean(fracs) - 0.25) <= 0.05


def test_band_energy_monotone(rng):
    img = ImageGrid(rng.random((50, 40)))
    vals = [band_energy_fraction(img, b) for b in np.linspace(0.02, 1, 30)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("band", [0.0, -0.1, 1.01])
def test_band_out_of_range(band):
    with pytest.raises(BandOutOfRange):
        band_energy_fraction(ImageGrid(np.zeros((4, 4))), band)


def test_evaluate_clips_estimate():
    ref = ImageGrid.constant(1.0, 4, 4)
    est = ImageGrid.constant(1.5, 4, 4)
    assert evaluate(ref, est).psnr_pooled == INFINITE_PSNR
    assert evaluate(ref, est, clip=False).mse_pooled == 0.25


def test_csv_schema_round_trip(rng):
    ref = ImageGrid(rng.random((3, 8, 8)))
    rep = evaluate(ref, ref)
    row = csv_row("edges,h=64,w=64", "baseline", 10, 10, "airy", 35.0, 1e-3, 0.0, 0, rep)
    text = csv_text([row])
    assert text.splitlines()[0] == ",".join(CSV_HEADER)
    back = read_csv(io.StringIO(text))
    assert back[0]["scene"] == "edges,h=64,w=64"
    assert back[0]["psnr_pooled"] == "inf" and back[0]["psnr_g"] == "inf"


def test_csv_mono_leaves_gb_empty(rng):
    ref = ImageGrid(rng.random((8, 8)))
    rep = evaluate(ref, ImageGrid(rng.random((8, 8))))
    row = csv_row("s", "hyperacuity", 2, 2, "gaussian", 1.0, 0.01, 0.1, 3, rep)
    assert row["psnr_g"] == "" and row["psnr_b"] == ""
    assert float(row["psnr_r"]) == pytest.approx(rep.psnr[0], abs=1e-6)

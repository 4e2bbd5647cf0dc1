"""Poisson sampling, ML estimation, and Cramer-Rao consistency checks."""

import math

import numpy as np
import pytest

from carsfisher import (
    BinnedImager,
    CountRecord,
    EmitterScene,
    HermiteGaussBasis,
    PlaneWaveExcitation,
    di_binned_model,
    fi_direct,
    fi_spade,
    image_amplitudes,
    mean_photons_spade,
    ml_estimate,
    run_experiment,
    sample_counts,
    spade_count_model,
)

BASIS = HermiteGaussBasis(truncation_M=30)
PLANE_K2 = PlaneWaveExcitation(ktilde=2.0)


def _amps(exc, s):
    return image_amplitudes(exc, EmitterScene(s=s))


def test_count_record_validation():
    with pytest.raises(ValueError):
        CountRecord(channel_id=0, count=-1)
    with pytest.raises(ValueError):
        CountRecord(channel_id=0, count=3, expected=-0.5)


def test_sample_counts_poisson_mean():
    expected = np.full(100_000, 4.0)
    counts = np.array([r.count for r in sample_counts(expected, 123)])
    # mean of 1e5 Poisson(4) draws: sigma = 2/sqrt(1e5)
    assert abs(counts.mean() - 4.0) < 4.0 * 2.0 / math.sqrt(100_000.0)
    assert counts.min() >= 0


def test_sample_counts_reproducible():
    expected = [0.5, 2.0, 7.0]
    a = [r.count for r in sample_counts(expected, 42)]
    b = [r.count for r in sample_counts(expected, 42)]
    c = [r.count for r in sample_counts(expected, 43)]
    assert a == b
    assert a != c


def test_sample_counts_rejects_negative_expectation():
    with pytest.raises(ValueError):
        sample_counts([1.0, -0.1], 7)


def test_ml_estimate_validation():
    records = [CountRecord(channel_id=0, count=0)]
    with pytest.raises(ValueError, match="identifiable"):
        ml_estimate(records, lambda s: np.array([s]), (0.1, 1.0))
    with pytest.raises(ValueError, match="increasing"):
        ml_estimate([CountRecord(channel_id=0, count=3)],
                    lambda s: np.array([s]), (1.0, 0.5))


def test_ml_estimate_recovers_truth_from_noise_free_counts():
    mu = 1e8
    model = spade_count_model(PLANE_K2, BASIS, 10)
    records = [CountRecord(channel_id=m, count=int(round(mu * n)))
               for m, n in enumerate(model(1.0))]
    est = ml_estimate(records, lambda s: mu * model(s), (0.5, 1.5))
    assert est == pytest.approx(1.0, abs=1e-4)


def test_spade_count_model_matches_mode_expectations():
    model = spade_count_model(PLANE_K2, BASIS, 12, kappa=0.8)
    amps = image_amplitudes(PLANE_K2, EmitterScene(s=0.9, kappa=0.8))
    want = np.array([mean_photons_spade(amps, BASIS, m) for m in range(13)])
    np.testing.assert_allclose(model(0.9), want, rtol=1e-13)


def test_binned_imager_conserves_photons():
    imager = BinnedImager(PLANE_K2, domain_s=1.0)
    expectations = imager.expectations(1.0)
    n_total = _amps(PLANE_K2, 1.0).n_total
    assert expectations.sum() == pytest.approx(n_total, rel=1e-5)
    assert expectations.min() >= 0.0
    assert expectations.size == 32 * 32


def test_binned_imager_tracks_continuum_fisher():
    imager = BinnedImager(PLANE_K2, domain_s=1.0)
    binned = imager.fisher_information(1.0)
    continuum = fi_direct(_amps(PLANE_K2, 1.0)).value
    assert abs(binned - continuum) / continuum < 0.02


def test_binned_imager_rejects_too_coarse_grid():
    with pytest.raises(RuntimeError, match="bin count"):
        BinnedImager(PLANE_K2, domain_s=1.0, nbins=8)
    # the check can be waived explicitly
    BinnedImager(PLANE_K2, domain_s=1.0, nbins=8, check_discretization=False)


def test_di_binned_model_is_the_imager_expectation():
    model = di_binned_model(PLANE_K2, domain_s=1.0)
    imager = BinnedImager(PLANE_K2, domain_s=1.0)
    np.testing.assert_allclose(model(0.8), imager.expectations(0.8), rtol=1e-13)


def test_run_experiment_validation():
    model = spade_count_model(PLANE_K2, BASIS, 10)
    with pytest.raises(ValueError, match="batches"):
        run_experiment(model, 1.0, 1e4, 1, 7, (0.5, 1.5), fisher_per_shot=16.0)
    with pytest.raises(ValueError, match="positive"):
        run_experiment(model, 1.0, 1e4, 10, 7, (0.5, 1.5), fisher_per_shot=0.0)


def test_run_experiment_reproducible():
    model = spade_count_model(PLANE_K2, BASIS, 10)
    fisher = fi_spade(_amps(PLANE_K2, 1.0), BASIS, 10).value
    a = run_experiment(model, 1.0, 1e4, 5, 11, (0.5, 1.5), fisher_per_shot=fisher)
    b = run_experiment(model, 1.0, 1e4, 5, 11, (0.5, 1.5), fisher_per_shot=fisher)
    assert a.estimates == b.estimates
    assert a.ratio == b.ratio
    assert a.seed == 11


def test_spade_variance_meets_crb_long_campaign():
    # 400 batches: the batch-variance ratio has sd ~ sqrt(2/399) ~ 0.07
    model = spade_count_model(PLANE_K2, BASIS, 10)
    fisher = fi_spade(_amps(PLANE_K2, 1.0), BASIS, 10).value
    report = run_experiment(model, 1.0, 1e4, 400, 7, (0.5, 1.5),
                            fisher_per_shot=fisher, method="spade")
    assert 0.8 < report.ratio < 1.25
    assert report.ratio == pytest.approx(0.98581896383530798, rel=1e-9)


def test_direct_imaging_variance_exceeds_spade_variance():
    # same photon budget, same seed: the DI spread reflects its smaller
    # Fisher information
    spade_model = spade_count_model(PLANE_K2, BASIS, 10)
    spade_fisher = fi_spade(_amps(PLANE_K2, 1.0), BASIS, 10).value
    spade_report = run_experiment(spade_model, 1.0, 1e4, 50, 20260817,
                                  (0.5, 1.5), fisher_per_shot=spade_fisher)

    imager = BinnedImager(PLANE_K2, domain_s=1.0)
    di_fisher = imager.fisher_information(1.0)
    di_report = run_experiment(imager.expectations, 1.0, 1e4, 50, 20260817,
                               (0.5, 1.5), fisher_per_shot=di_fisher,
                               method="di")

    assert spade_report.ratio == pytest.approx(0.70437763973459899, rel=1e-9)
    assert di_report.ratio == pytest.approx(0.86458570520602096, rel=1e-9)
    assert di_report.empirical_variance > 2.0 * spade_report.empirical_variance
    assert di_fisher < spade_fisher


def test_low_information_regime_stays_near_the_bound():
    # nearly coincident emitters, collinear beams: tiny F, biased ML; the
    # ratio drifts above one but must stay the right order of magnitude
    exc = PlaneWaveExcitation(ktilde=0.0)
    model = spade_count_model(exc, BASIS, 10)
    fisher = fi_spade(_amps(exc, 0.2), BASIS, 10).value
    assert fisher < 0.2
    report = run_experiment(model, 0.2, 1e4, 50, 20260817, (0.02, 0.6),
                            fisher_per_shot=fisher)
    assert 0.9 < report.ratio < 2.0
    assert report.ratio == pytest.approx(1.3058791754826176, rel=1e-9)

import numpy as np
import pytest
from scipy import integrate, special as sc, stats

from tempered_ou.dgga import DGGaParams, dgga_pdf
from tempered_ou.errors import ConfigurationError, DomainError, NumericError, ParameterError
from tempered_ou.ggsm import (EllParams, GGaParams, MixingDensity, RejectionStats, ell_inverse,
                              ell_moment, gga_cdf, gga_moment, gga_pdf, gga_ppf, ggsm_pdf,
                              ggsm_sample_direct, ggsm_sample_rejection, point_mass_mixer,
                              rejection_sample, sample_ell, sample_gga)
from tempered_ou.iga import IGaParams, iga_mixer
from tempered_ou.rand_core import RandomStream

from conftest import binomial_within, mean_within


def test_gga_pdf_values():
    assert gga_pdf(GGaParams(1, 1, 1), 1e-300) == pytest.approx(1.0)
    assert gga_pdf(GGaParams(2, 1, 1), 1.0) == pytest.approx(np.exp(-1), rel=1e-14)
    with pytest.raises(DomainError):
        gga_pdf(GGaParams(1, 1, 1), 0.0)


@pytest.mark.parametrize("g, p, th", [(1, 1, 1), (2.5, 0.7, 3.0), (0.4, 2.0, 0.5), (5, 3, 2)])
def test_gga_pdf_integrates_to_one(g, p, th):
    val, _ = integrate.quad(lambda u: gga_pdf(GGaParams(g, p, th), u), 0, np.inf,
                            epsabs=1e-13, epsrel=1e-12, limit=200)
    assert val == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("bad", [(0, 1, 1), (1, -1, 1), (1, 1, np.inf)])
def test_gga_params_validated(bad):
    with pytest.raises(ParameterError):
        GGaParams(*bad)


def test_sample_gga_means():
    s = RandomStream(11)
    assert mean_within(sample_gga(s, GGaParams(2, 1, 2), 10**5), 1.0)
    # E[X] = Gamma((g+1)/p) / Gamma(g/p) = Gamma(1)/Gamma(1/2) for (1, 2, 1)
    m1 = integrate.quad(lambda u: u * gga_pdf(GGaParams(1, 2, 1), u), 0, np.inf)[0]
    assert gga_moment(GGaParams(1, 2, 1), 1) == pytest.approx(m1, rel=1e-10)
    assert m1 == pytest.approx(1 / np.sqrt(np.pi), rel=1e-10)
    assert mean_within(sample_gga(s, GGaParams(1, 2, 1), 10**5), m1)


def test_sample_gga_ks_against_inverse_cdf():
    par = GGaParams(1.7, 1.3, 0.8)
    s = RandomStream(12)
    x = sample_gga(s, par, 50_000)
    oracle = gga_ppf(par, s.uniform(50_000))
    assert stats.ks_2samp(x, oracle).pvalue > 0.01
    q = np.linspace(0.01, 0.99, 9)
    assert np.allclose(gga_cdf(par, gga_ppf(par, q)), q, atol=1e-12)


def test_ell_endpoints_and_linear_case():
    assert ell_inverse(1.0, -1.0, 3.0) == pytest.approx(3.0)
    u = np.linspace(0, 1, 11)
    assert np.allclose(ell_inverse(u, 0.0, 3.0), 1 + 2 * u)
    with pytest.raises(ParameterError):
        EllParams(0.0, 1.0)


def test_ell_mean():
    par = EllParams(2.0, 2.0)
    assert ell_moment(par) == pytest.approx(45 / 28, rel=1e-12)
    x = sample_ell(RandomStream(13), par, 10**5)
    assert np.all((x > 1) & (x < 2))
    assert mean_within(x, 45 / 28)


def test_point_mass_mixer_is_gga():
    mix = point_mass_mixer(1.0, 2.0, 1.5)
    s = RandomStream(14)
    st = RejectionStats()
    x = ggsm_sample_rejection(s, 2.0, 1.5, mix, 10_000, stats=st)
    assert st.proposals == st.accepted == 10_000
    ref = sample_gga(s, GGaParams(2.0, 1.5, 1.0), 10_000)
    assert stats.ks_2samp(x, ref).pvalue > 0.01
    # Z = 1 exactly, so the direct sampler is the GGa sampler draw for draw
    y = ggsm_sample_direct(RandomStream(99), 2.0, 1.5, mix, 1000)
    assert np.array_equal(y, sample_gga(RandomStream(99), GGaParams(2.0, 1.5, 1.0), 1000))


def test_dgga_mixture_identity_through_generic_mixture():
    par = DGGaParams(1.5, 1.2, 2.5)
    pdf = lambda t: np.where((t > 1) & (t < par.eta), 1 / (t * np.log(par.eta)), 0.0)
    mix = MixingDensity(gamma_=1.5, p=1.2, lower=1.0, upper=par.eta, pdf=pdf)
    u = np.geomspace(0.01, 5, 50)
    assert np.allclose(ggsm_pdf(mix, u), dgga_pdf(par, u), rtol=1e-8, atol=0)


def test_direct_and_rejection_agree():
    mix = iga_mixer(IGaParams(0.9, 3, 1, 2))
    s = RandomStream(15)
    st = RejectionStats()
    g = mix.gamma_
    a = ggsm_sample_direct(s, g, 1.0, mix, 50_000)
    b = ggsm_sample_rejection(s, g, 1.0, mix, 50_000, stats=st)
    assert stats.ks_2samp(a, b).pvalue > 0.01
    assert binomial_within(st.accepted, st.proposals, 1 / mix.v)


def test_domination_and_phi_range():
    par = IGaParams(0.9, 2, 1.3, 3.0)
    mix = iga_mixer(par)
    u = np.geomspace(1e-4, 20, 200)
    f = ggsm_pdf(mix, u)
    g = gga_pdf(GGaParams(mix.gamma_, mix.p, mix.lower**mix.p), u)
    assert np.all(f <= mix.v * g * (1 + 1e-9))
    phi = mix.phi(np.geomspace(1e-8, 1e3, 500))
    assert np.all((phi >= 0) & (phi <= 1))


def test_rejection_rejects_bad_constant():
    mix = MixingDensity(gamma_=1, p=1, lower=1, upper=2, pdf=lambda t: t, v=np.inf,
                        phi=lambda u: u)
    with pytest.raises(ConfigurationError):
        ggsm_sample_rejection(RandomStream(0), 1, 1, mix, 10)


def test_rejection_loop_fails_loudly():
    s = RandomStream(0)
    with pytest.raises(NumericError, match="consecutive"):
        rejection_sample(s, 1, lambda m: np.zeros(m), lambda x: np.zeros_like(x), 1e3)

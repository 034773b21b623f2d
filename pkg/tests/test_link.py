"""Parameter handling and link-budget tests."""

import json
import math

import numpy as np
import pytest

from flqkd import (
    DomainError,
    GaussianChannel,
    ProtocolParams,
    link_budget,
    modes_per_symbol,
    path_transmissivity,
)


def test_path_transmissivity_values():
    assert path_transmissivity(0.0, 0.2) == 1.0
    # 10^(-0.2*50/10) and 10^(-0.2*100/10)
    assert path_transmissivity(50.0, 0.2) == pytest.approx(0.1, rel=1e-14)
    assert path_transmissivity(100.0, 0.2) == pytest.approx(0.01, rel=1e-14)


def test_path_transmissivity_rejects_negative():
    with pytest.raises(DomainError):
        path_transmissivity(-1.0, 0.2)
    with pytest.raises(DomainError):
        path_transmissivity(10.0, -0.2)


def test_path_transmissivity_multiplicative():
    rng = np.random.default_rng(7)
    for _ in range(100):
        l1, l2 = rng.uniform(0, 200, size=2)
        joint = path_transmissivity(l1 + l2, 0.2)
        split = path_transmissivity(l1, 0.2) * path_transmissivity(l2, 0.2)
        assert joint == pytest.approx(split, rel=1e-12)


def test_modes_per_symbol():
    m = modes_per_symbol(2e12, 1e10)
    assert m.modes == 200.0
    assert not m.low_m_warning
    m = modes_per_symbol(1e9, 1e9)
    assert m.modes == 1.0
    assert m.low_m_warning
    with pytest.raises(DomainError):
        modes_per_symbol(1e9, 0.0)


def test_link_budget_no_signal():
    ch = link_budget(ProtocolParams(N_S=0.0))
    assert ch.r == 0.0
    assert ch.snr == 0.0


def test_link_budget_unit_case():
    # kappa_S=1 (L=0), eta=1, M=1 (W=R), G_B=1, no taps, N_S=4:
    # r^2 = 4, sigma^2 = 1/2, snr = 8.
    p = ProtocolParams(W=1e10, R=1e10, N_S=4.0, G_B=1.0, kappa_A=0.0,
                       kappa_B=0.0, L=0.0, eta=1.0)
    ch = link_budget(p)
    assert ch.r ** 2 == pytest.approx(4.0, rel=1e-15)
    assert ch.sigma ** 2 == pytest.approx(0.5, rel=1e-15)
    assert ch.snr == pytest.approx(8.0, rel=1e-14)


def test_link_budget_default_table_at_50km():
    p = ProtocolParams(N_S=0.1)
    ch = link_budget(p)
    # independent arithmetic: kappa_S = 0.1, M = 200
    r_sq = 0.9 * 200.0 * 0.1 ** 2 * 1e6 * 0.99 * 0.99 * 0.1
    sigma_sq = (1.0 + 0.9 * 0.1 * (1e6 - 1.0)) / 2.0
    assert ch.snr == pytest.approx(r_sq / sigma_sq, rel=1e-12)
    assert ch.snr == pytest.approx(3.92, abs=0.01)


def test_link_budget_requires_brightness():
    with pytest.raises(DomainError):
        link_budget(ProtocolParams())


def test_vacuum_noise_without_amplifier():
    p = ProtocolParams(N_S=0.01, G_B=1.0, eta=1.0)
    ch = link_budget(p)
    assert ch.sigma == math.sqrt(0.5)
    assert ch.sigma ** 2 == pytest.approx(0.5, rel=1e-15)


def test_snr_monotonicity():
    base = dict(N_S=0.05)
    snr = [link_budget(ProtocolParams(**base, L=L)).snr for L in (0, 25, 50, 100)]
    assert all(a > b for a, b in zip(snr, snr[1:]))
    snr = [link_budget(ProtocolParams(N_S=ns)).snr for ns in (0.01, 0.05, 0.1, 0.4)]
    assert all(a < b for a, b in zip(snr, snr[1:]))
    snr = [link_budget(ProtocolParams(N_S=0.05, eta=e)).snr for e in (0.3, 0.6, 0.9, 1.0)]
    assert all(a < b for a, b in zip(snr, snr[1:]))


def test_gaussian_channel_snr_definition():
    ch = GaussianChannel(r=1.7, sigma=0.31)
    assert ch.snr == 1.7 ** 2 / 0.31 ** 2
    ch = GaussianChannel.from_snr(4.0)
    assert (ch.r, ch.sigma) == (2.0, 1.0)
    with pytest.raises(DomainError):
        GaussianChannel(r=-1.0, sigma=1.0)
    with pytest.raises(DomainError):
        GaussianChannel(r=1.0, sigma=0.0)


def test_params_derived_quantities():
    p = ProtocolParams(N_S=0.1)
    assert p.T == 1e-10
    assert p.M == 200.0
    assert p.N_B == 1e6 - 1.0
    assert p.kappa_S == pytest.approx(0.1, rel=1e-14)


@pytest.mark.parametrize("field,value", [
    ("W", 0.0), ("R", -1.0), ("K", 1), ("N_S", -0.1), ("G_B", 0.5),
    ("N_LO", 0.0), ("kappa_A", 1.0), ("kappa_B", -0.1), ("n", -1.0),
    ("alpha", -0.2), ("L", -5.0), ("eta", 0.0), ("eta", 1.1), ("beta", 0.0),
])
def test_params_validation(field, value):
    with pytest.raises(DomainError):
        ProtocolParams(**{field: value, "N_S": 0.1 if field != "N_S" else value})


def test_params_from_dict_defaults_and_overrides():
    p = ProtocolParams.from_dict({"N_S": 0.2, "L_km": 75.0})
    assert p.N_S == 0.2
    assert p.L == 75.0
    assert p.W == 2e12 and p.R == 1e10 and p.K == 2
    assert p.G_B == 1e6 and p.N_LO == 1e4
    assert p.kappa_A == 0.01 and p.kappa_B == 0.01
    assert p.n == 99.0 and p.alpha == 0.2
    assert p.eta == 0.9 and p.beta == 0.94
    # N_S has no default: it is the optimization variable
    assert ProtocolParams.from_dict({}).N_S is None


def test_params_from_dict_rejects_unknown_keys():
    with pytest.raises(DomainError):
        ProtocolParams.from_dict({"W_hz": 1e12, "bandwidth": 2e12})


def test_params_from_json(tmp_path):
    doc = {"W_hz": 1e12, "R_baud": 5e9, "K": 4, "N_S": 0.05, "beta": 0.9}
    path = tmp_path / "params.json"
    path.write_text(json.dumps(doc))
    p = ProtocolParams.from_json(str(path))
    assert (p.W, p.R, p.K, p.N_S, p.beta) == (1e12, 5e9, 4, 0.05, 0.9)
    assert p.M == 200.0

import math

import numpy as np
import pytest

from leoroute.errors import LinkInfeasibleError
from leoroute.linkbudget import (DOWNLINK, ISL, UPLINK, HopLatency,
                                 LinkBudgetParams, McsEntry, McsTable,
                                 hop_latency, link_rate, parabolic_gain,
                                 received_power, snr)

PARAMS = LinkBudgetParams()
C = 299792458.0


def db(x):
    return 10.0 * math.log10(x)


class TestGainAndPower:
    def test_dish_gain_oracle(self):
        # eta * (pi * D / lambda)^2 computed with the wavelength explicitly
        lam = C / 26e9
        expected = 0.6 * (math.pi * 0.26 / lam) ** 2
        got = parabolic_gain(0.26, 26e9, 0.6)
        assert got == pytest.approx(expected, rel=1e-12)
        assert db(got) == pytest.approx(34.8, abs=0.05)

    def test_free_space_loss_oracle(self):
        d_km, f = 2181.0, 26e9
        fspl_db = 20 * math.log10(4 * math.pi * d_km * 1000.0 * f / C)
        assert fspl_db == pytest.approx(187.5, abs=0.05)
        # received_power = ptx*gains/fspl for the ISL class
        pr = received_power(PARAMS, ISL, d_km)
        g = parabolic_gain(0.26, 26e9, 0.6)
        expected_db = db(10.0) + 2 * db(g) - fspl_db
        assert db(pr) == pytest.approx(expected_db, abs=1e-9)

    def test_inverse_square_doubling(self):
        p1 = received_power(PARAMS, ISL, 1000.0)
        p2 = received_power(PARAMS, ISL, 2000.0)
        assert db(p1) - db(p2) == pytest.approx(6.0206, abs=1e-3)

    def test_zero_distance_rejected(self):
        with pytest.raises(ValueError):
            received_power(PARAMS, ISL, 0.0)

    def test_link_classes_differ(self):
        d = 1000.0
        assert received_power(PARAMS, UPLINK, d) != received_power(PARAMS, DOWNLINK, d)


class TestMcsTable:
    def test_bundled_table_valid(self):
        table = McsTable.bundled()
        assert len(table.entries) >= 10
        effs = [e.spectral_efficiency for e in table.entries]
        snrs = [e.snr_min_db for e in table.entries]
        assert effs == sorted(effs)
        assert snrs == sorted(snrs)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            McsTable(())

    def test_unsorted_rejected(self):
        with pytest.raises(ValueError):
            McsTable((McsEntry(1.0, 3.0), McsEntry(2.0, 2.0)))
        with pytest.raises(ValueError):
            McsTable((McsEntry(2.0, 1.0), McsEntry(1.0, 3.0)))

    def test_boundary_inclusive(self):
        table = McsTable.bundled()
        top = table.entries[-1]
        snr_lin = 10.0 ** (top.snr_min_db / 10.0)
        assert table.best_efficiency(snr_lin) == top.spectral_efficiency

    def test_below_lowest_is_zero(self):
        table = McsTable.bundled()
        low = table.entries[0]
        snr_lin = 10.0 ** ((low.snr_min_db - 0.01) / 10.0)
        assert table.best_efficiency(snr_lin) == 0.0

    def test_between_entries_matches_linear_scan(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            n = rng.integers(2, 12)
            effs = np.cumsum(rng.uniform(0.1, 0.5, n))
            snrs = np.cumsum(rng.uniform(0.5, 2.0, n)) - 3.0
            table = McsTable(tuple(McsEntry(float(e), float(s))
                                   for e, s in zip(effs, snrs)))
            for snr_db in rng.uniform(-5.0, snrs[-1] + 3.0, 20):
                snr_lin = 10.0 ** (snr_db / 10.0)
                best = 0.0
                for e in table.entries:
                    if snr_lin >= 10.0 ** (e.snr_min_db / 10.0):
                        best = e.spectral_efficiency
                assert table.best_efficiency(snr_lin) == best


class TestLinkRate:
    def test_monotone_in_distance(self):
        table = McsTable.bundled()
        rates = [link_rate(PARAMS, table, ISL, d)
                 for d in np.linspace(100.0, 9000.0, 60)]
        assert all(a >= b for a, b in zip(rates, rates[1:]))

    def test_monotone_in_power(self):
        table = McsTable.bundled()
        prev = 0.0
        for p in (1.0, 5.0, 10.0, 50.0, 200.0):
            params = LinkBudgetParams(sat_tx_power_w=p)
            r = link_rate(params, table, ISL, 2500.0)
            assert r >= prev
            prev = r

    def test_infeasible_distance_gives_zero(self):
        table = McsTable.bundled()
        assert link_rate(PARAMS, table, ISL, 200000.0) == 0.0


class TestHopLatency:
    def test_transmission_time(self):
        lat = hop_latency(0.0, 64800.0, 1e9, 1000.0)
        assert lat.tx_s == pytest.approx(64.8e-6, rel=1e-12)

    def test_propagation_time(self):
        lat = hop_latency(0.0, 64800.0, 1e9, 2181.0)
        assert lat.prop_s == pytest.approx(2181e3 / C, rel=1e-12)
        assert lat.prop_s == pytest.approx(7.27e-3, abs=5e-5)

    def test_empty_queue_component(self):
        lat = hop_latency(0.0, 64800.0, 1e9, 1.0)
        assert lat.queue_s == 0.0
        assert lat.total_s == lat.tx_s + lat.prop_s

    def test_components_sum(self):
        lat = hop_latency(1.5e-3, 64800.0, 5e8, 700.0)
        assert lat.total_s == lat.queue_s + lat.tx_s + lat.prop_s
        assert all(c >= 0 for c in lat)

    def test_zero_rate_rejected(self):
        with pytest.raises(LinkInfeasibleError):
            hop_latency(0.0, 64800.0, 0.0, 1000.0)

    def test_tx_bound_for_all_modcods_at_system_bandwidth(self):
        # With the shipped table and 500 MHz, any feasible modcod moves a
        # 64.8 kbit block in well under 0.72 ms.
        table = McsTable.bundled()
        for e in table.entries:
            tx = 64800.0 / (e.spectral_efficiency * 500e6)
            assert tx <= 0.72e-3


class TestSnr:
    def test_known_isl_snr(self):
        # 10 W, 34.8 dBi dishes, 2181 km at 26 GHz over 500 MHz / 290 K.
        s = snr(PARAMS, ISL, 2181.0)
        assert db(s) == pytest.approx(9.0, abs=0.15)

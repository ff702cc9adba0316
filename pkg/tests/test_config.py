import pytest

from mimo3d import config as cfgmod


class TestDefaults:
    def test_reference_setup(self):
        cfg = cfgmod.parse_config("")
        assert cfg.tx_array.n_azimuth == 8
        assert cfg.tx_array.n_elevation == 8
        assert cfg.tx_array.n_pol == 2
        assert cfg.nt == 128
        assert cfg.tx_array.pol_slants_deg == (0.0, 90.0)
        assert cfg.tx_array.spacing_az == 0.5 and cfg.tx_array.spacing_el == 0.5
        assert cfg.users == 7
        assert cfg.streams_per_user == 2
        assert cfg.user_antennas == 8
        assert cfg.carrier_hz == 2e9
        assert cfg.n_sc_per_rb == 12
        assert cfg.sampler.n_rays == 12
        assert cfg.sampler.n_subpaths == 20
        assert cfg.sampler.spread_aod_deg == 30.0
        assert cfg.sampler.spread_zod_deg == 5.0
        assert cfg.sampler.ricean_k is None
        assert cfg.methods == cfgmod.METHODS
        assert cfg.normalizations == cfgmod.NORMALIZATIONS
        assert cfg.rho_f == pytest.approx(100.0)

    def test_defaults_file_text_parses(self):
        cfg = cfgmod.parse_config(cfgmod.DEFAULT_CONFIG_TEXT)
        assert cfg == cfgmod.parse_config("")


class TestOverrides:
    def test_section_overlay(self):
        cfg = cfgmod.parse_config(
            "[array]\nn_azimuth = 4\n[experiment]\nusers = 2\nseeds = 5\n"
        )
        assert cfg.tx_array.n_azimuth == 4
        assert cfg.tx_array.n_elevation == 8  # untouched default
        assert cfg.users == 2
        assert cfg.n_seeds == 5

    def test_blank_optionals(self):
        cfg = cfgmod.parse_config("[link]\npower_budget =\nrate_cap_bits =\n")
        assert cfg.power_budget is None
        assert cfg.rate_cap_bits is None
        cfg = cfgmod.parse_config("[link]\nrate_cap_bits = 6\n[channel]\nricean_k = 3.5\n")
        assert cfg.rate_cap_bits == 6.0
        assert cfg.sampler.ricean_k == 3.5

    def test_unknown_section_rejected(self):
        with pytest.raises(ValueError, match=r"section \[beamforming\]"):
            cfgmod.parse_config("[beamforming]\nx = 1\n")

    def test_unknown_key_rejected(self):
        with pytest.raises(ValueError, match=r"\[array\] n_rows"):
            cfgmod.parse_config("[array]\nn_rows = 3\n")


class TestValidation:
    def test_too_many_streams_for_user(self):
        with pytest.raises(ValueError, match="streams_per_user = 9"):
            cfgmod.parse_config("[experiment]\nstreams_per_user = 9\n")

    def test_total_streams_exceed_antennas(self):
        with pytest.raises(ValueError, match="exceeds\n?.*transmit antennas"):
            cfgmod.parse_config(
                "[array]\nn_azimuth = 2\nn_elevation = 2\nn_pol = 1\n"
                "pol_slants_deg = 0\n[experiment]\nusers = 4\nstreams_per_user = 2\n"
            )

    def test_granularity_must_divide_band(self):
        with pytest.raises(ValueError, match="pu_granularities"):
            cfgmod.parse_config("[experiment]\npu_granularities = 3\n")

    def test_unknown_method(self):
        with pytest.raises(ValueError, match="unknown method"):
            cfgmod.parse_config("[experiment]\nmethods = direct,method7\n")

    def test_unknown_normalization(self):
        with pytest.raises(ValueError, match="unknown mode"):
            cfgmod.parse_config("[experiment]\nnormalizations = per_tone\n")

    def test_noise_power_positive(self):
        with pytest.raises(ValueError, match="noise_power"):
            cfgmod.parse_config("[link]\nnoise_power = 0\n")

    def test_load_config_from_file(self, tmp_path):
        path = tmp_path / "exp.ini"
        path.write_text("[experiment]\nseeds = 3\n")
        assert cfgmod.load_config(str(path)).n_seeds == 3
        assert cfgmod.load_config(None).n_seeds == 1

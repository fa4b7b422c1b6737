import re

import pytest

from vipkit.config import BUNDLED, ConfigError, bundled_path, bundled_scenario, parse_config

MINIMAL = """\
strip.thickness_z_cm = 0.01
strip.window_D_cm = 1.0
strip.mean_free_path_mu_cm = 4e-6
run.current_A = 10
run.duration_s = 1000
detector.efficiency = 0.5
detector.resolution_sigma_keV = 0.15
background.flat_rate_per_keV_s = 0.01
binning.lo_keV = 5
binning.hi_keV = 10
binning.width_keV = 0.05
"""


def test_minimal_parses_with_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.plan.capture_fraction == 0.1
    assert cfg.plan.duty_on_fraction == 0.5
    assert cfg.detector.line_energy == 7.5
    assert cfg.cl == 0.9
    assert cfg.roi_acceptance == pytest.approx(0.9973, abs=1e-4)
    assert cfg.edges().size == 101


@pytest.mark.parametrize("name", BUNDLED)
def test_bundled_scenarios_parse(name):
    cfg = bundled_scenario(name)
    assert cfg.name == name
    assert cfg.bound() > 0


def test_background_reduction_factors():
    lngs = bundled_scenario("lngs-partial")
    vip = bundled_scenario("vip-design")
    base_l = lngs.values["background.baseline_rate_per_keV_s"]
    base_v = vip.values["background.baseline_rate_per_keV_s"]
    assert base_l == base_v
    assert lngs.background.flat_rate == pytest.approx(base_l / 50, rel=1e-15)
    assert vip.background.flat_rate == pytest.approx(base_v / 100, rel=1e-15)
    for (_, r_l, _), (_, r_v, _) in zip(lngs.background.lines, vip.background.lines):
        assert r_v == pytest.approx(r_l / 2, rel=1e-15)


def test_placeholder_baseline_is_marked():
    for name in ("lngs-partial", "vip-design"):
        assert "PLACEHOLDER" in bundled_path(name).read_text()


def error_for(text):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    return info.value


def test_negative_thickness():
    err = error_for(MINIMAL.replace("thickness_z_cm = 0.01", "thickness_z_cm = -1"))
    assert err.key == "strip.thickness_z_cm"
    assert err.line == 1
    assert "invariant" in str(err)


def test_unknown_key():
    err = error_for(MINIMAL + "strip.colour = red\n")
    assert err.key == "strip.colour" and err.line == 12
    assert "unknown key" in str(err)


def test_missing_key():
    text = "\n".join(l for l in MINIMAL.splitlines() if not l.startswith("run.current_A"))
    err = error_for(text)
    assert err.key == "run.current_A"
    assert "missing" in str(err)
    assert re.match(r"line \d+: ", str(err))


def test_duplicate_key():
    err = error_for(MINIMAL + "run.current_A = 3\n")
    assert err.key == "run.current_A" and err.line == 12


def test_unparseable_value():
    err = error_for(MINIMAL.replace("run.duration_s = 1000", "run.duration_s = long"))
    assert err.line == 5


def test_missing_equals():
    assert error_for(MINIMAL + "just words\n").line == 12


@pytest.mark.parametrize(
    "old,new,key",
    [
        ("detector.efficiency = 0.5", "detector.efficiency = 1.5", "detector.efficiency"),
        ("binning.hi_keV = 10", "binning.hi_keV = 4", "binning.hi_keV"),
        ("background.flat_rate_per_keV_s = 0.01", "background.flat_rate_per_keV_s = -0.01",
         "background.flat_rate_per_keV_s"),
        ("binning.width_keV = 0.05", "binning.width_keV = 0.05\ndetector.line_energy_keV = 9.5",
         "detector.line_energy_keV"),
    ],
)
def test_invariant_violations_name_key(old, new, key):
    assert error_for(MINIMAL.replace(old, new)).key == key


def test_flat_and_baseline_conflict():
    err = error_for(MINIMAL + "background.baseline_rate_per_keV_s = 1\n")
    assert err.key == "background.flat_rate_per_keV_s"


def test_hash_stable_under_layout_and_order():
    lines = MINIMAL.splitlines()
    shuffled = "# comment\n\n" + "\n".join(f"  {l.replace(' = ', '=')}   " for l in reversed(lines)) + "\n"
    assert parse_config(shuffled).hash == parse_config(MINIMAL).hash
    changed = MINIMAL.replace("run.current_A = 10", "run.current_A = 11")
    assert parse_config(changed).hash != parse_config(MINIMAL).hash


def test_relative_table_path(tmp_path):
    (tmp_path / "flat.txt").write_text("# energy_kev sigma_cm2_per_g\n1 10\n20 10\n")
    cfg_path = tmp_path / "s.cfg"
    cfg_path.write_text(MINIMAL + "material.table = flat.txt\nmaterial.density_g_cm3 = 1\n")
    from vipkit.config import load_config

    assert load_config(cfg_path).absorption_length() == pytest.approx(0.1)

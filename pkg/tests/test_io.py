import numpy as np
import pytest

from vipkit.io import (
    SpectrumFormatError,
    format_residual,
    format_spectrum,
    parse_residual,
    parse_spectrum,
    read_spectrum,
    report_csv,
    report_text,
    write_spectrum,
)
from vipkit.limits import LimitResult
from vipkit.sensitivity import SensitivityReport
from vipkit.spectrum import Spectrum, make_edges, normalize_subtract


@pytest.fixture
def big():
    rng = np.random.default_rng(1)
    return Spectrum(make_edges(0.0, 20.0, 0.02), rng.poisson(40.0, 1000), 123456.789, "synthetic run")


def test_round_trip_1000_bins(tmp_path, big):
    p = tmp_path / "s.csv"
    write_spectrum(p, big)
    first = p.read_bytes()
    back = read_spectrum(p)
    assert back == big
    write_spectrum(p, back)
    assert p.read_bytes() == first


def test_header_order_insensitive(big):
    text = format_spectrum(big)
    lines = text.splitlines()
    swapped = "\n".join([lines[1], lines[0]] + lines[2:]) + "\n"
    assert parse_spectrum(swapped) == big


def test_negative_count_names_row(big):
    lines = format_spectrum(big).splitlines()
    lines[10] = lines[10].rsplit(",", 1)[0] + ",-3"
    with pytest.raises(SpectrumFormatError) as info:
        parse_spectrum("\n".join(lines))
    assert info.value.line == 11


@pytest.mark.parametrize(
    "body,line",
    [
        ("0.0,1.0,3\n1.0,2.0\n", 5),
        ("0.0,1.0,3\n1.0,0.5,2\n", 5),
        ("0.0,1.0,3\n1.5,2.0,2\n", 5),
        ("0.0,1.0,x\n", 4),
    ],
)
def test_malformed_rows(body, line):
    text = "# live_time_s=1.0\n# label=a\nenergy_kev_lo,energy_kev_hi,counts\n" + body
    with pytest.raises(SpectrumFormatError) as info:
        parse_spectrum(text)
    assert info.value.line == line


def test_missing_live_time():
    with pytest.raises(SpectrumFormatError):
        parse_spectrum("energy_kev_lo,energy_kev_hi,counts\n0,1,2\n")


def test_residual_round_trip(big):
    res = normalize_subtract(big, Spectrum(big.bin_edges, big.counts[::-1], 2 * big.live_time))
    text = format_residual(res)
    assert text.splitlines()[0] == "energy_kev_lo,energy_kev_hi,value,variance"
    assert parse_residual(text) == res
    assert format_residual(parse_residual(text)) == text


def test_reports():
    s = SensitivityReport(1e25, 3e5, 0.1)
    assert report_text(s).splitlines()[0] == "n_new=1e+25"
    r = LimitResult(12.5, 0.9, 3e-30, "gaussian-roi")
    header, row = report_csv(r).splitlines()
    assert header == "nx_upper,confidence_level,beta2_half_bound,method"
    assert row == "12.5,0.9,3e-30,gaussian-roi"

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gantry.errors import ValidationError
from gantry.units import fmt_duration, fmt_size, fmt_size_vgs, parse_size


@pytest.mark.parametrize("text,mib", [
    ("4G", 4096),
    ("256M", 256),
    ("512M", 512),
    ("1G", 1024),
    ("4.5G", 4608),
    ("0M", 0),
])
def test_parse_size(text, mib):
    assert parse_size(text) == mib


@pytest.mark.parametrize("text", ["4Q", "", "G", "12", "-1G", "4 gigs"])
def test_parse_size_rejects_garbage(text):
    with pytest.raises(ValidationError):
        parse_size(text)


def test_fmt_size_table_rules():
    assert fmt_size(141179) == "137.9G"
    assert fmt_size(2458) == "2.4G"
    assert fmt_size(2048) == "2.0G"
    assert fmt_size(246) == "246M"
    assert fmt_size(94) == "94M"
    assert fmt_size(1954) == "1.9G"


def test_fmt_size_vgs_rules():
    assert fmt_size_vgs(141179) == "137.87g"


@pytest.mark.parametrize("seconds,text", [
    (256, "4m 16s"),
    (56, "56s"),
    (0, "0s"),
    (60, "1m 0s"),
    (355.2, "5m 55s"),
])
def test_fmt_duration(seconds, text):
    assert fmt_duration(seconds) == text


@given(st.integers(min_value=0, max_value=10**6))
def test_whole_mib_round_trips_through_m_suffix(mib):
    assert parse_size(f"{mib}M") == mib


@given(st.integers(min_value=0, max_value=4096))
def test_gib_parses_to_1024_multiples(gib):
    assert parse_size(f"{gib}G") == gib * 1024

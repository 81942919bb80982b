import pytest
from hypothesis import given, strategies as st

from effmass.config import parse_bool, parse_complex, parse_interval, parse_values, read_keyvalue
from effmass.errors import DomainError


@pytest.mark.parametrize("text,want", [
    ("0.5", 0.5), ("1+0.5i", 1 + 0.5j), ("-2i", -2j), ("1-1j", 1 - 1j), (" 3 ", 3), ("i", 1j)])
def test_parse_complex(text, want):
    assert parse_complex(text) == want


@pytest.mark.parametrize("text", ["abc", "1+", "nan", "inf", ""])
def test_parse_complex_rejects(text):
    with pytest.raises(DomainError):
        parse_complex(text)


@given(st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False))
def test_parse_complex_round_trip(z):
    assert parse_complex(f"{z.real!r}{z.imag:+}i") == z


def test_parse_values():
    assert parse_values("0.1:3.0:0.1")[-1] == 3.0
    assert len(parse_values("0.1:3.0:0.1")) == 30
    assert parse_values("1.5, 1.0") == [1.5, 1.0]
    for bad in ("1:2", "3:1:1", "1:2:0", "a,b", ""):
        with pytest.raises(DomainError):
            parse_values(bad)


def test_interval_and_bool():
    assert parse_interval("-6, 6") == (-6.0, 6.0)
    assert parse_interval("-6:6") == (-6.0, 6.0)
    with pytest.raises(DomainError):
        parse_interval("6,-6")
    assert parse_bool("Yes") and not parse_bool("off")
    with pytest.raises(DomainError):
        parse_bool("maybe")


def test_read_keyvalue(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("# comment\nAbs-Tol = 1e-9  # trailing\n\nfamily=cosh\n")
    assert read_keyvalue(p) == {"abs_tol": "1e-9", "family": "cosh"}
    p.write_text("family cosh\n")
    with pytest.raises(DomainError, match=":1:"):
        read_keyvalue(p)

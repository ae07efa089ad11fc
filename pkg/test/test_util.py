import math

import pytest

from kdvexp import util
from kdvexp.enums import Variant
from kdvexp.exceptions import ConfigError, KdvError
from kdvexp.scheme import SchemeConfig
from kdvexp.schemes import ExpInt2


def test_die(capsys):
    with pytest.raises(SystemExit) as e:
        util.die(":(")
    assert e.value.code == 1
    assert capsys.readouterr().err == "Fatal: :(\n"

    with pytest.raises(SystemExit) as e:
        util.die(":(", status=2)
    assert e.value.code == 2


def test_thread_count(monkeypatch):
    monkeypatch.setenv("KDVEXP_THREADS", "3")
    assert util.thread_count() == 3

    monkeypatch.delenv("KDVEXP_THREADS")
    assert util.thread_count() >= 1


@pytest.mark.parametrize("value", ["zero", "0", "-2"])
def test_thread_count_invalid(monkeypatch, value):
    monkeypatch.setenv("KDVEXP_THREADS", value)
    with pytest.raises(KdvError):
        util.thread_count()


@pytest.mark.parametrize(
    ("text", "value"),
    [
        ("1.5", 1.5),
        (" -2e-3 ", -2e-3),
        ("pi", math.pi),
        ("π", math.pi),
        ("-pi", -math.pi),
        ("-5pi", -5 * math.pi),
        ("2*pi", 2 * math.pi),
        ("0.5 pi", 0.5 * math.pi),
        ("inf", math.inf),
    ],
)
def test_parse_real(text, value):
    assert util.parse_real(text) == value


@pytest.mark.parametrize("text", ["", "pie", "5 pi pi", "1,5"])
def test_parse_real_invalid(text):
    with pytest.raises(ConfigError):
        util.parse_real(text)


def test_parse_tau_list_dyadic():
    assert util.parse_tau_list("dyadic:2^-1..2^-3") == [0.5, 0.25, 0.125]
    assert util.parse_tau_list("dyadic:2^-3..2^-1") == [0.5, 0.25, 0.125]
    assert util.parse_tau_list("dyadic:2^-7..2^-13:x0.5") == [0.5 * 2.0**-e for e in range(7, 14)]


def test_parse_tau_list_explicit():
    assert util.parse_tau_list("0.01, 0.04,0.02") == [0.04, 0.02, 0.01]
    assert util.parse_tau_list("0.1,0.1") == [0.1]


@pytest.mark.parametrize(
    "text", ["", ",", "dyadic:2^-1", "dyadic:2^a..2^b", "0.1,-0.1", "0.1,nan", "dyadic:2^0..2^1:x0"]
)
def test_parse_tau_list_invalid(text):
    with pytest.raises(ConfigError):
        util.parse_tau_list(text)


@pytest.mark.parametrize("value", [0.1, 1 / 3, -1e-300, math.pi * 1e10, 5e-324])
def test_format_float_round_trips(value):
    assert float(util.format_float(value)) == value


def test_format_float():
    assert util.format_float(0.5) == "0.5"
    assert util.format_float(float("nan")) == "nan"


def test_load_scheme():
    config = SchemeConfig(variant=Variant.ExpInt2, tau=0.1)

    scheme = util.load_scheme("ExpInt2", config)
    assert isinstance(scheme, ExpInt2)
    assert scheme._config is config

    with pytest.raises(KdvError):
        util.load_scheme("ExpInt1", config)


def test_load_scheme_unknown():
    config = SchemeConfig(variant=Variant.ExpInt1, tau=0.1)
    with pytest.raises(KdvError):
        util.load_scheme("ExpInt3", config)

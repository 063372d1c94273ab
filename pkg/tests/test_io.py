import json

import numpy as np
import pytest

from sn1d import io
from sn1d.dynamics import Observables
from sn1d.field_core import Field, make_grid, signed_potential


def test_fmt_seventeen_digits():
    assert io.fmt(0.1) == "0.10000000000000001"
    assert float(io.fmt(np.pi)) == np.pi
    assert io.fmt(float("nan")) == "null"


def test_dumps_roundtrip_and_deterministic():
    obj = {"a": 1.0 / 3, "b": [1, 2.5, None, True], "c": {"nested": np.float64(2.0)}, "s": "x"}
    text = io.dumps(obj)
    assert text == io.dumps(obj)
    back = json.loads(text)
    assert back["a"] == 1.0 / 3 and back["b"] == [1, 2.5, None, True] and back["s"] == "x"


def test_dumps_rejects_unknown():
    with pytest.raises(TypeError):
        io.dumps({"x": object()})


def test_profile_csv_header_and_columns():
    g = make_grid(-1, 1, 5)
    u = Field(g, np.array([0, 0.5, 1, 0.5, 0]))
    text = io.profile_csv(u)
    lines = text.split("\n")
    assert lines[0] == "x,phi,V_conv"
    assert text.endswith("\n") and "\r" not in text
    data = np.loadtxt(text.splitlines()[1:], delimiter=",")
    np.testing.assert_array_equal(data[:, 0], g.x)
    np.testing.assert_allclose(data[:, 2], signed_potential(g, u.values**2), rtol=1e-16)


def test_profile_roundtrip(tmp_path):
    g = make_grid(-2, 2, 9)
    u = Field(g, np.exp(-g.x**2))
    path = tmp_path / "p.csv"
    io.write_text(path, io.profile_csv(u))
    x, v = io.read_profile_csv(path)
    np.testing.assert_array_equal(x, g.x)
    np.testing.assert_array_equal(v, u.values)


def test_complex_roundtrip(tmp_path):
    g = make_grid(-2, 2, 9)
    u = Field(g, np.exp(-g.x**2) * np.exp(0.3j * g.x))
    path = tmp_path / "c.csv"
    io.write_text(path, io.complex_csv(u))
    assert path.read_text().startswith("x,re,im\n")
    _, v = io.read_profile_csv(path)
    np.testing.assert_array_equal(v, u.values)


def test_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        io.read_profile_csv(path)


def test_observables_csv():
    obs = Observables(times=[0.0, 0.5], N_series=[1.0, 1.0], E_series=[2.0, 2.0],
                      profile_deviation=[0.0, 1e-9], phase=[0.0, 0.1])
    lines = io.observables_csv(obs).splitlines()
    assert lines[0] == "t,N,E,deviation"
    assert len(lines) == 3 and lines[2].startswith("0.5,1,2,")


def test_read_config(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# comment\n gamma = 2.0\n--max-iter=7  # trailing\n\nlambda = 3\n")
    assert io.read_config(path) == {"gamma": "2.0", "max_iter": "7", "lambda": "3"}
    path.write_text("gamma 2\n")
    with pytest.raises(ValueError):
        io.read_config(path)

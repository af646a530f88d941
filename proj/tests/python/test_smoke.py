import os

import pytest

import hjcanon

SYSTEMS = os.environ.get("HJC_SYSTEMS_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "systems"))


def system(name):
    return os.path.join(SYSTEMS, name + ".hjs")


def test_first_class_report():
    a = hjcanon.analyze(system("first_class"))
    assert a.verdict == "integrable"
    report = a.report()
    assert report["format"] == "hjcanon-report"
    assert report["analysis"]["free_parameters"] == ["t", "q2"]
    assert "verdict: integrable" in a.text()


def test_second_class_trajectory():
    a = hjcanon.analyze(system("second_class"))
    assert a.verdict == "integrable-after-determination"
    labels = [label for label, _ in a.constraints]
    assert labels == ["H'_0", "H'_2", "H'_3"]
    tr = a.integrate({"q1": 0, "q2": 0, "q3": 0, "p1": 0, "p3": 0.5}, step=1e-3)
    q2 = tr["rows"][-1][tr["columns"].index("q2")]
    assert q2 == pytest.approx(7.38905609893065, rel=1e-10)
    assert not tr["flagged"]


def test_off_surface_raises():
    a = hjcanon.analyze(system("second_class"))
    with pytest.raises(hjcanon.OffSurfaceError):
        a.integrate({"q1": 0, "q2": 0, "q3": 0, "p1": 1, "p3": 0.5})


def test_harmonic_propagator():
    import cmath
    import math

    a = hjcanon.analyze(system("radial"), transform="radial")
    res = a.propagator({"R": 0.0}, {"R": 0.0}, defines=["V(u)=u/2"])
    exact = cmath.sqrt(1 / (2 * math.pi * 1j * math.sin(1.0)))
    assert abs(res["value"] - exact) / abs(exact) < 1e-10


def test_inline_system_and_errors():
    text = "[system]\nname = osc\ncoordinates = x\nlagrangian = x_dot^2/2 - x^2/2\n"
    assert hjcanon.analyze(text, is_text=True).verdict == "integrable"
    with pytest.raises(hjcanon.ParseError):
        hjcanon.analyze("[system]\nname = s\ncoordinates = x\nlagrangian = x_dot^2 +\n", is_text=True)
    with pytest.raises(hjcanon.HjcError):
        hjcanon.analyze(system("missing"))


def test_cli_entry_point():
    code, out, err = hjcanon.run_cli(["analyze", system("first_class"), "--format", "json"])
    assert code == 0 and '"verdict": "integrable"' in out and err == ""
    code, _, err = hjcanon.run_cli(["analyze", "missing.hjs"])
    assert code == 1 and "cannot read file" in err

import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from varfam.errors import DomainError
from varfam.harness import cli
from varfam.harness.registry import COEFFICIENT_GENERATORS, COUNTEREXAMPLES, FAMILIES, get_family
from varfam.harness.validate import (
    FamilyGrid,
    GridSpec,
    Tolerances,
    _encode,
    emit_csv,
    emit_json,
    parse_json,
    parse_m_grid,
    run_suite,
    validate_point,
)


@pytest.fixture(scope="module")
def default_report():
    return run_suite(GridSpec.default())


# ---------------------------------------------------------------- registry


def test_registry_lookup():
    assert get_family("wall").name == "wall"
    with pytest.raises(DomainError):
        get_family("nope")


def test_family_params_reject_unknown():
    with pytest.raises(DomainError):
        FAMILIES["wall"].params({"p": 0.1})
    assert FAMILIES["wall"].params({"q": 0.3}) == {"q": 0.3}


def test_m_grid_interior_and_explicit():
    e = FAMILIES["wall"]
    pts = e.m_grid({"q": 0.5}, 3)
    assert pts == pytest.approx([0.25, 0.5, 0.75])
    assert e.m_grid({"q": 0.5}, 3, 0.2, 0.6) == pytest.approx([0.2, 0.4, 0.6])
    with pytest.raises(DomainError):
        e.m_grid({"q": 0.5}, 3, 0.0, 0.6)


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_weight_matches_member_weight(name):
    e = FAMILIES[name]
    params = e.params()
    m = e.m_grid(params, 3)[1]
    member = e.build(**params, m=m)
    if "weight" not in member.metadata:
        pytest.skip("no pointwise weight")
    loc = member.measure.locations[0] if hasattr(member.measure, "locations") else m + 0.1
    if name == "q_exponential":
        loc = 0.4
    assert e.weight(**params, m=m, u=float(loc)) == pytest.approx(member.metadata["weight"](m, float(loc)), rel=1e-12)


# ---------------------------------------------------------------- grid spec


def test_parse_m_grid():
    assert parse_m_grid("0.1:0.9:5") == (0.1, 0.9, 5)
    with pytest.raises(DomainError):
        parse_m_grid("0.1-0.9")


def test_grid_from_dict():
    g = GridSpec.from_dict(
        {
            "families": [{"family": "wall", "params": {"q": 0.3}, "m_grid": "0.2:0.8:4"}, {"family": "free", "m_grid": 2}],
            "counterexamples": [{"family": "sqrt", "params": {"n_max": 10}}],
            "meixner": {"a": [0.0], "b": [0.0]},
            "tolerances": {"ode": 1e-9},
        }
    )
    assert g.families[0].means() == pytest.approx([0.2, 0.4, 0.6, 0.8])
    assert len(g.families[1].means()) == 2
    assert g.tolerances.ode == 1e-9 and g.tolerances.mass == Tolerances().mass
    assert g.counterexamples == (("sqrt", {"n_max": 10}),)
    with pytest.raises(DomainError):
        GridSpec.from_dict({"counterexamples": [{"family": "bogus"}]})
    with pytest.raises(DomainError):
        GridSpec.from_dict({"families": [{"family": "wall", "m_grid": "0.5:1.5:3"}]})


def test_default_flag_extends_default():
    g = GridSpec.from_dict({"default": True, "families": [{"family": "wall", "m_grid": 2}]})
    assert len(g.families) == len(GridSpec.default().families) + 1


# ---------------------------------------------------------------- suite


def test_empty_grid():
    r = run_suite(GridSpec())
    assert r.passed
    assert r.families == () and r.counterexamples == () and r.meixner == ()


def test_default_grid_passes(default_report):
    assert default_report.passed
    names = {f.family for f in default_report.families}
    assert names == set(FAMILIES)
    assert all(c.witness is not None and c.witness[1] < 0 for c in default_report.counterexamples)
    assert {c.family for c in default_report.counterexamples} == set(COUNTEREXAMPLES)
    assert len(default_report.meixner) == 49


def test_validate_point_captures_errors():
    r = validate_point("wall", {"q": 0.5}, 1.5, Tolerances())
    assert not r.passed and r.error.startswith("DomainError")


def test_failing_point_is_reported():
    tight = Tolerances(mass=0.0)
    assert not validate_point("wall", {"q": 0.5}, 0.5, tight).passed


def test_json_round_trip(default_report):
    text = emit_json(default_report)
    assert parse_json(text) == default_report
    assert emit_json(parse_json(text)) == text
    assert "wall_time" not in text
    assert "wall_time" in emit_json(default_report, timing=True)


def test_parallel_matches_serial(default_report):
    grid = GridSpec(families=(FamilyGrid("wall"), FamilyGrid("free", n=3)), meixner_a=(0.0, 2.0), meixner_b=(0.0,))
    assert emit_json(run_suite(grid, jobs=3)) == emit_json(run_suite(grid))


def test_csv_rows(default_report):
    lines = emit_csv(default_report).strip().split("\n")
    assert lines[0].startswith("family,params,m,")
    assert len(lines) == 1 + sum(len(f.points) for f in default_report.families)


@settings(max_examples=200, deadline=None)
@given(st.floats(allow_nan=True, allow_infinity=True))
def test_float_encoding_round_trips(x):
    text = _encode({"x": x}, 2, 0)
    back = json.loads(text)["x"]
    if math.isnan(x):
        assert math.isnan(back)
    else:
        assert back == x


# ---------------------------------------------------------------- CLI


def test_cli_eval(capsys):
    assert cli.main(["eval", "wall", "--params", "q=0.5", "--m", "0.5", "--u", "1"]) == 0
    val = float(capsys.readouterr().out)
    assert val == pytest.approx(FAMILIES["wall"].weight(q=0.5, m=0.5, u=1.0), rel=1e-15)


def test_cli_moments(capsys):
    assert cli.main(["moments", "wall", "--params", "q=0.5", "--m-grid", "0.2:0.8:4", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert [r["m"] for r in out["moments"]] == pytest.approx([0.2, 0.4, 0.6, 0.8])
    for r in out["moments"]:
        assert r["mass"] == pytest.approx(1.0, abs=1e-10)
        assert r["variance"] == pytest.approx(r["target_variance"], abs=1e-10)
    assert cli.main(["moments", "eps_poisson"]) == 0
    assert capsys.readouterr().out.startswith("m,mass,mean,variance,target_variance")


def test_cli_coeffs(capsys):
    assert cli.main(["coeffs", "rational-plus", "--lambda", "1", "--n", "4"]) == 0
    rows = capsys.readouterr().out.strip().split("\n")
    assert rows[0] == "n,phi_n"
    assert float(rows[-1].split(",")[1]) == pytest.approx(-math.sqrt(math.e) / 64, rel=1e-12)
    assert set(COEFFICIENT_GENERATORS) == {"rational-minus", "rational-plus", "sqrt"}


def test_cli_free(capsys):
    assert cli.main(["free", "meixner", "--a", "2", "--b", "0", "--samples", "3"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["atoms"][0]["location"] == pytest.approx(-0.5)
    assert out["total_mass"] == pytest.approx(1.0, abs=1e-10)
    assert len(out["density"]) == 3
    assert cli.main(["free", "cumulants", "--series", "1,1/2", "--order", "6"]) == 0
    rows = capsys.readouterr().out.strip().split("\n")[1:]
    assert [r.split(",")[1] for r in rows] == ["0", "1", "1/2", "1/4", "1/8", "1/16"]
    assert cli.main(["free", "cumulants", "--series", "1,1/2", "--order", "6", "--truncated"]) == 2


def test_cli_positivity(capsys):
    assert cli.main(["positivity", "sqrt", "--lambda", "1", "--n-max", "60"]) == 0
    assert capsys.readouterr().out.strip() == "3"
    assert cli.main(["positivity", "rational-minus", "--lambda", "1", "--n-max", "40"]) == 0
    assert capsys.readouterr().out.strip() == "none"


def test_cli_validate(tmp_path, capsys):
    grid = tmp_path / "grid.json"
    grid.write_text(json.dumps({"families": [{"family": "wall", "m_grid": 3}], "counterexamples": [{"family": "sqrt"}]}))
    out, csv = tmp_path / "r.json", tmp_path / "r.csv"
    assert cli.main(["validate", "--grid", str(grid), "--out", str(out), "--csv", str(csv)]) == 0
    assert capsys.readouterr().out.startswith("PASS")
    report = parse_json(out.read_text())
    assert report.passed and len(report.families[0].points) == 3
    assert csv.read_text().count("\n") == 4


def test_cli_validate_failure_exit_code(tmp_path, capsys):
    grid = tmp_path / "grid.json"
    grid.write_text(json.dumps({"families": [{"family": "wall", "m_grid": 2}], "tolerances": {"mass": 0.0}}))
    assert cli.main(["validate", "--grid", str(grid), "--out", str(tmp_path / "r.json")]) == 1
    assert capsys.readouterr().out.startswith("FAIL")


def test_cli_error_exit_code(capsys):
    assert cli.main(["eval", "wall", "--params", "p=0.5", "--m", "0.5", "--u", "1"]) == 2
    assert "error:" in capsys.readouterr().err

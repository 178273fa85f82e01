from pathlib import Path

import pytest

from metatorsion.bounds import GrowthRecord, fit_exponential_base, growth_sequence
from metatorsion.cli import main, read_csv
from metatorsion.metabelian import family_bs_module, family_lamplighter
from metatorsion.suites import lamplighter_schedule

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"


def write(tmp_path, body, name="s.ini"):
    p = tmp_path / name
    p.write_text(body)
    return str(p)


def scenario(tmp_path, family, steps, extra=""):
    return write(tmp_path, f"[family]\n{family}\n[schedule]\nsteps = {steps}\n{extra}")


@pytest.mark.parametrize(
    "family, step, expected",
    [
        ("name = lamplighter", 10, ["torsion=1024", "index=10"]),
        ("name = free_wreath", 5, ["torsion=1", "rank=6"]),
        ("name = bs\nk = 2", 5, ["torsion=31"]),
    ],
)
def test_compute(tmp_path, capsys, family, step, expected):
    path = scenario(tmp_path, family, "1..12")
    assert main(["compute", "--scenario", path, "--step", str(step)]) == 0
    out = capsys.readouterr().out.split()
    for token in expected:
        assert token in out


def test_compute_defaults_to_last_step(tmp_path, capsys):
    path = scenario(tmp_path, "name = lamplighter\nm = 3", "1, 4")
    assert main(["compute", "--scenario", path]) == 0
    assert "torsion=81" in capsys.readouterr().out


def test_sequence_csv(tmp_path):
    out = tmp_path / "out.csv"
    path = scenario(tmp_path, "name = lamplighter", "1..5")
    assert main(["sequence", "--scenario", path, "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "step,index,a,m,torsion,log2_torsion,ratio,free_rank"
    assert [row.split(",")[4] for row in lines[1:]] == ["2", "4", "8", "16", "32"]


def test_sequence_to_stdout(tmp_path, capsys):
    path = scenario(tmp_path, "name = bs", "1..3")
    assert main(["sequence", "--scenario", path]) == 0
    G = family_bs_module(2)
    records = growth_sequence(G, lamplighter_schedule(G, range(1, 4)), range(1, 4))
    assert capsys.readouterr().out.splitlines()[1:] == [r.to_csv_row() for r in records]


def test_sequence_is_deterministic_and_parallel_safe(tmp_path):
    path = scenario(tmp_path, "name = lamplighter\nm = 3", "1..15")
    outs = []
    for extra in ([], [], ["--jobs", "3"]):
        out = tmp_path / f"o{len(outs)}.csv"
        assert main(["sequence", "--scenario", path, "--seed", "4", "--out", str(out), *extra]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_ideal_scenario_ratios_decrease(tmp_path, capsys):
    out = tmp_path / "ideal.csv"
    assert main(["sequence", "--scenario", str(SCENARIOS / "ideal.ini"), "--out", str(out)]) == 0
    assert "subexp" in capsys.readouterr().out
    ratios = [float(row.split(",")[6]) for row in out.read_text().splitlines()[1:]]
    assert len(ratios) == 12
    assert all(a > b for a, b in zip(ratios, ratios[1:]))


def test_sequence_with_exp_checks(tmp_path, capsys):
    path = scenario(tmp_path, "name = lamplighter", "1..6", "[run]\nchecks = exp, MA\n")
    assert main(["sequence", "--scenario", path, "--out", str(tmp_path / "x.csv")]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "context,relation,lhs,rhs,holds,slack"
    # two exp reports per step, MA only for P = Z
    assert len(lines) == 1 + 12 + 1
    assert all(line.split(",")[-2] == "true" for line in lines[1:])


def test_subexp_on_constant_a_is_usage_error(tmp_path, capsys):
    path = scenario(tmp_path, "name = lamplighter", "1..6", "[run]\nchecks = subexp\n")
    assert main(["sequence", "--scenario", path, "--out", str(tmp_path / "x.csv")]) == 2
    assert "subexp" in capsys.readouterr().err


def test_unwritable_output(tmp_path, capsys):
    path = scenario(tmp_path, "name = lamplighter", "1..2")
    bad = tmp_path / "missing" / "x.csv"
    assert main(["sequence", "--scenario", path, "--out", str(bad)]) == 2
    assert "cannot write" in capsys.readouterr().err


def test_fit_round_trip(tmp_path, capsys):
    out = tmp_path / "l.csv"
    path = scenario(tmp_path, "name = bs", "1..14")
    assert main(["sequence", "--scenario", path, "--out", str(out)]) == 0
    capsys.readouterr()
    main(["fit", str(out)])
    first = capsys.readouterr().out.splitlines()[0]
    records = read_csv(str(out))
    assert first == f"D_hat={fit_exponential_base(records)!r}"
    G = family_bs_module(2)
    direct = growth_sequence(G, lamplighter_schedule(G, range(1, 15)), range(1, 15))
    assert first == f"D_hat={fit_exponential_base(direct)!r}"


def test_fit_lamplighter_and_ones(tmp_path, capsys):
    G = family_lamplighter(2)
    recs = growth_sequence(G, lamplighter_schedule(G, range(1, 21)))
    csv = tmp_path / "l.csv"
    csv.write_text(GrowthRecord.CSV_HEADER + "\n" + "".join(r.to_csv_row() + "\n" for r in recs))
    main(["fit", str(csv)])
    assert capsys.readouterr().out.startswith("D_hat=2.0\n")
    ones = tmp_path / "ones.csv"
    ones.write_text(GrowthRecord.CSV_HEADER + "\n1,1,1,1,1,0,0,2\n2,2,1,2,1,0,0,3\n")
    main(["fit", str(ones)])
    assert capsys.readouterr().out.startswith("D_hat=1.0\n")


def test_fit_subexp_holds_on_ideal_data(tmp_path, capsys):
    out = tmp_path / "i.csv"
    main(["sequence", "--scenario", str(SCENARIOS / "ideal.ini"), "--out", str(out)])
    capsys.readouterr()
    assert main(["fit", str(out)]) == 0
    assert "subexp=holds" in capsys.readouterr().out


@pytest.mark.parametrize(
    "body, fragment",
    [
        ("", "row 1"),
        ("step,index\n", "row 1"),
        (GrowthRecord.CSV_HEADER + "\n1,1,1,1,2,1,0.6\n", "row 2: expected 8 fields"),
        (GrowthRecord.CSV_HEADER + "\n1,1,1,1,2,1,0.6,0\n1,x,1,1,2,1,0.6,0\n", "row 3"),
        (GrowthRecord.CSV_HEADER + "\n1,0,1,1,2,1,0.6,0\n", "row 2"),
        (GrowthRecord.CSV_HEADER + "\n", "no data rows"),
    ],
)
def test_fit_malformed_csv(tmp_path, capsys, body, fragment):
    path = write(tmp_path, body, "bad.csv")
    assert main(["fit", path]) == 2
    assert fragment in capsys.readouterr().err


def test_fit_missing_file(tmp_path, capsys):
    assert main(["fit", str(tmp_path / "nope.csv")]) == 2
    assert "cannot read" in capsys.readouterr().err


@pytest.mark.parametrize(
    "body, fragment",
    [
        ("[family]\nname = lamplighter\n[schedule]\nsteps = 5..1\n", ":4: [schedule.steps]"),
        ("[family]\nname = lamplighter\n[schedule]\nsteps = ,\n", ":4: [schedule.steps]"),
        ("[family]\nname = lamplighter\n", "[schedule.steps] missing"),
        ("[family]\nname = hydra\n[schedule]\nsteps = 1\n", ":2: [family.name] unknown family"),
        ("[family]\nname = lamplighter\nm = 1\n[schedule]\nsteps = 1\n", ":2: [family.name]"),
        ("[family]\nname = lamplighter\nm = two\n[schedule]\nsteps = 1\n", ":3: [family.m]"),
        ("[family]\nname = lamplighter\ncolour = red\n", ":3: [family.colour] unknown key"),
        ("[famly]\n", ":1: [famly] unknown section"),
        ("name = lamplighter\n", ":1: [name] key outside"),
        ("[family]\nname = bs\nname = bs\n", ":3: [family.name] duplicate"),
        ("[family]\nname = bs\n[schedule]\nsteps = 1\n[run]\njobs = 0\n", ":6: [run.jobs]"),
        ("[family]\nname = bs\n[schedule]\nsteps = 1\n[run]\nchecks = exp, magic\n", ":6: [run.checks]"),
        ("[family]\nname = lamplighter\n[schedule]\nsteps = 1..3\nideal = t^{n}+2\n", ":5: [schedule.ideal] step 1"),
        ("[family]\nname = lamplighter\n[schedule]\nsteps = 1\nlattice = 1 0; 0 1\n", ":5: [schedule.lattice]"),
        ("[family]\nname = lamplighter\n[schedule]\nsteps = 0..2\n", "[schedule.lattice] step 0"),
        ("[family]\nname = bs\n[schedule\n", ":3: [[schedule] unterminated"),
        ("[family]\nname = bs\n[schedule]\nsteps 1\n", ":4: [schedule] expected 'key = value'"),
    ],
)
def test_config_errors(tmp_path, capsys, body, fragment):
    path = write(tmp_path, body)
    assert main(["compute", "--scenario", path]) == 2
    err = capsys.readouterr().err
    assert path in err and fragment in err


def test_missing_scenario_flag_and_file(tmp_path, capsys):
    assert main(["compute"]) == 2
    assert main(["sequence", "--scenario", str(tmp_path / "none.ini")]) == 2
    assert "cannot read scenario" in capsys.readouterr().err


def test_verify_unknown_suite(capsys):
    assert main(["verify", "--suite", "nonsense"]) == 2
    assert "nonsense" in capsys.readouterr().err


@pytest.mark.parametrize("suite", ["exp", "MA", "commutator"])
def test_verify_single_suites(tmp_path, capsys, suite):
    report = tmp_path / "r.txt"
    assert main(["verify", "--suite", suite, "--seed", "3", "--out", str(report)]) == 0
    out = capsys.readouterr().out
    assert out.startswith(f"PASS {suite}:")
    lines = report.read_text().splitlines()
    assert lines[0] == "context,relation,lhs,rhs,holds,slack"
    assert len(lines) > 1 and all(line.split(",")[-2] == "true" for line in lines[1:])


def test_verify_all(capsys):
    assert main(["verify", "--suite", "all", "--seed", "1"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert {line.split()[1].rstrip(":") for line in out} == {
        "multiplicativity", "fin", "torsion-lemma", "MA", "exp", "growth", "commutator",
    }
    assert all(line.startswith("PASS") for line in out)


def test_shipped_scenarios_parse(capsys):
    for path in sorted(SCENARIOS.glob("*.ini")):
        assert main(["compute", "--scenario", str(path), "--step", "1"]) == 0, path
    capsys.readouterr()

import pytest
from click.testing import CliRunner

from swarmnet import __version__, database
from swarmnet.config import settings
from swarmnet.main import cli
from swarmnet.models.enums import PolicyEnum
from swarmnet.schemas.scenario import ScenarioConfig
from swarmnet.schemas.simengine import FleetSpec, SimScenario
from swarmnet.services import mission_service, scenario_service


@pytest.fixture
def runner(monkeypatch):
    monkeypatch.setattr(database, "_engine", None)
    monkeypatch.setattr(settings, "DATABASE_URL", None)
    return CliRunner()


@pytest.fixture
def scenario_file(tmp_path, make_mission):
    config = ScenarioConfig(
        mission=make_mission(side=50.0),
        simulation=SimScenario(policy=PolicyEnum.static),
        fleet=FleetSpec(size=2, battery_min_pct=80.0),
    )
    path = tmp_path / "scenario.yaml"
    path.write_text(scenario_service.serialize_scenario(config), encoding="utf-8")
    return path


def test_version(runner):
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert __version__ in result.output


def test_table1_writes_results_and_manifest(runner, tmp_path):
    out = tmp_path / "t1"
    result = runner.invoke(cli, ["table1", "--seed", "7", "--iterations", "2", "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert result.stdout.splitlines() == [
        str(out / "table1.csv"),
        str(out / "table1.md"),
        str(out / "run_manifest.yaml"),
    ]
    lines = (out / "table1.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("drones,network,cr_mean")
    assert len(lines) == 11
    manifest = scenario_service.read_manifest((out / "run_manifest.yaml").read_text(encoding="utf-8"))
    assert manifest.command == "table1"
    assert manifest.seed == 7
    assert manifest.outputs == ["table1.csv", "table1.md"]


def test_table1_is_identical_across_worker_counts(runner, tmp_path):
    outputs = []
    for workers in ("1", "4"):
        out = tmp_path / f"w{workers}"
        args = ["table1", "--seed", "11", "--iterations", "3", "--workers", workers, "--out", str(out)]
        assert runner.invoke(cli, args).exit_code == 0
        outputs.append([(out / name).read_bytes() for name in ("table1.csv", "table1.md", "run_manifest.yaml")])
    assert outputs[0] == outputs[1]


def test_table1_compare_published(runner, tmp_path):
    out = tmp_path / "cmp"
    result = runner.invoke(cli, ["table1", "--iterations", "2", "--compare-published", "--out", str(out)])
    assert result.exit_code == 0, result.output
    header = (out / "table1_published.csv").read_text(encoding="utf-8").splitlines()[0]
    assert header.startswith("drones,network,cr_mean,published_cr_mean")


@pytest.mark.parametrize(
    "args",
    [
        ["table1", "--iterations", "1"],
        ["table1", "--mode", "Bogus"],
        ["table1", "--mode", "LiteralFormula", "--seeds-average", "3"],
        ["simulate", "--network", "4g"],
        ["compare", "--seeds", "9"],
    ],
)
def test_invalid_input_exits_1(runner, tmp_path, args):
    result = runner.invoke(cli, args + ["--out", str(tmp_path / "x")])
    assert result.exit_code == 1


def test_unwritable_output_exits_2(runner, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("taken", encoding="utf-8")
    result = runner.invoke(cli, ["bandwidth", "--out", str(blocker)])
    assert result.exit_code == 2
    assert "error:" in result.output


def test_bandwidth(runner, tmp_path):
    out = tmp_path / "bw"
    result = runner.invoke(cli, ["bandwidth", "--profile", "720p30", "--profile", "640x480@15", "--out", str(out)])
    assert result.exit_code == 0, result.output
    lines = (out / "bandwidth.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "profile,mode,bits_per_second,reduction,meets_claim"
    assert len(lines) == 5
    assert (out / "bandwidth.md").read_text(encoding="utf-8").startswith("# Bandwidth")


def test_bandwidth_rejects_a_bad_profile(runner, tmp_path):
    result = runner.invoke(cli, ["bandwidth", "--profile", "huge", "--out", str(tmp_path / "bw")])
    assert result.exit_code == 1
    assert "error:" in result.output


def test_parse_prints_a_mission_document(runner):
    result = runner.invoke(cli, ["parse", "inspect the road for potholes"])
    assert result.exit_code == 0, result.output
    assert result.stdout.startswith("schema: swarmnet/mission")
    spec = mission_service.deserialize(result.stdout)
    assert spec.mission_type.value == "RoadInspection"


def test_parse_with_vertices_then_plan(runner, tmp_path):
    out = tmp_path / "m"
    square = ["--vertex", "0", "0", "--vertex", "60", "0", "--vertex", "60", "60", "--vertex", "0", "60"]
    result = runner.invoke(cli, ["parse", "inspect the bridge with lidar", *square, "--out", str(out)])
    assert result.exit_code == 0, result.output
    mission = out / "mission.yaml"
    assert mission_service.deserialize(mission.read_text(encoding="utf-8")).perimeter.as_pairs()[1] == [60.0, 0.0]

    result = runner.invoke(cli, ["plan", str(mission), "--drones", "4", "--seed", "3"])
    assert result.exit_code == 0, result.output
    assert result.stdout.startswith("schema: swarmnet/plan")

    conflicting = runner.invoke(cli, ["plan", str(mission), "--drones", "4", "--fleet", str(mission)])
    assert conflicting.exit_code == 1


def test_simulate_writes_report_and_is_reproducible(runner, tmp_path, scenario_file):
    texts = []
    for name in ("a", "b"):
        out = tmp_path / name
        result = runner.invoke(cli, ["simulate", str(scenario_file), "--seed", "5", "--out", str(out)])
        assert result.exit_code == 0, result.output
        for produced in ("outcome.yaml", "messages.csv", "report.md", "report.yaml", "run_manifest.yaml"):
            assert (out / produced).is_file()
        texts.append((out / "outcome.yaml").read_bytes() + (out / "report.md").read_bytes())
    assert texts[0] == texts[1]
    assert (tmp_path / "a" / "report.md").read_text(encoding="utf-8").startswith("# Inspection report: mission-test")


def test_compare_with_modes(runner, tmp_path, scenario_file):
    out = tmp_path / "cmp"
    result = runner.invoke(cli, ["compare", str(scenario_file), "--seeds", "10", "--modes", "--out", str(out)])
    assert result.exit_code == 0, result.output
    pairs = (out / "policy_comparison.csv").read_text(encoding="utf-8").splitlines()
    assert pairs[0] == "seed,baseline_time_ms,candidate_time_ms,delta_ms,baseline_end,candidate_end"
    assert len(pairs) == 11
    assert "one-sided sign test p =" in (out / "policy_comparison.md").read_text(encoding="utf-8")
    assert len((out / "mode_comparison.csv").read_text(encoding="utf-8").splitlines()) == 11


def test_runs_without_a_ledger_exits_1(runner):
    result = runner.invoke(cli, ["runs"])
    assert result.exit_code == 1
    assert "SWARMNET_DATABASE_URL" in result.output


def test_runs_lists_recorded_commands(runner, tmp_path, monkeypatch):
    monkeypatch.setattr(settings, "DATABASE_URL", f"sqlite:///{tmp_path / 'runs.db'}")
    assert runner.invoke(cli, ["bandwidth", "--seed", "9", "--out", str(tmp_path / "bw")]).exit_code == 0
    assert runner.invoke(cli, ["table1", "--iterations", "2", "--out", str(tmp_path / "t1")]).exit_code == 0
    result = runner.invoke(cli, ["runs"])
    assert result.exit_code == 0, result.output
    rows = [line.split("\t") for line in result.stdout.splitlines()]
    assert [row[1] for row in rows] == ["table1", "bandwidth"]
    assert rows[1][2] == "9"
    assert rows[1][6] == str(tmp_path / "bw")
    filtered = runner.invoke(cli, ["runs", "--command", "bandwidth"])
    assert len(filtered.stdout.splitlines()) == 1

import json
import math

import pytest

from weylbounds.core.sums import WeightSequence
from weylbounds.meanvalue import mc_moment
from weylbounds.records import RunRecord, validate_output


def test_sum_examples(cli_json):
    assert cli_json("sum", "-d", 2, "-N", 100, "-x", "0,0")["modulus"] == pytest.approx(100)
    assert cli_json("sum", "-d", 2, "-N", 10, "-x", "0.5,0")["modulus"] < 1e-9
    out = cli_json("sum", "-d", 2, "-N", 5, "-x", "0,0.2", "--direct")
    assert out["modulus"] == pytest.approx(math.sqrt(5), rel=1e-12)
    assert out["method"] == "direct"


def test_completed_examples(cli_json):
    assert cli_json("completed", "-d", 2, "-N", 16, "-x", "0,0", "--mode", "literal")["value"] == pytest.approx(1, abs=1e-9)
    assert cli_json("completed", "-d", 2, "-N", 16, "-x", "0,0", "--mode", "symmetrized")["value"] == pytest.approx(16)
    literal = cli_json("completed", "-N", 64, "-x", "0.123,0.456", "--mode", "literal")["value"]
    symmetrized = cli_json("completed", "-N", 64, "-x", "0.123,0.456")["value"]
    assert literal <= symmetrized


def test_dimbound_and_vinogradov(cli_json):
    out = cli_json("dimbound", "-d", 2, "--alpha", 0.75, "--exact")
    assert out["u"] == pytest.approx(4 / 3, abs=1e-12)
    assert out["argmin_k"] == 1
    assert out["u_exact"] == "4/3"
    assert cli_json("vinogradov", "-d", 2, "-s", 3, "-N", 2)["J"] == 20


@pytest.mark.parametrize(
    "argv",
    [
        ["sum", "-d", 1],
        ["sum", "-d", 2, "-x", "0.1"],
        ["sum", "-d", 2, "-x", "zero,0"],
        ["sum", "--no-such-flag"],
        ["dimbound", "--alpha", 1.5],
        ["boxes", "--i-min", 5, "--i-max", 4],
        ["dimbound", "--format", "csv"],
        ["sum", "--threads", 0],
    ],
)
def test_invalid_arguments_exit_2(cli, argv):
    code, _ = cli(*argv)
    assert code == 2


def test_resource_caps_exit_3(cli):
    assert cli("vinogradov", "-d", 2, "-s", 3, "-N", 100, "--cap", 1000)[0] == 3
    assert cli("boxes", "--i-min", 4, "--i-max", 4, "--cap", 1000)[0] == 3


def test_boxes_csv(cli):
    code, out = cli("boxes", "-d", 2, "--alpha", 0.7, "--eps", 0.05, "--i-min", 2, "--i-max", 4, "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "i,N,U,counted_lower,counted_upper,bound_exponent,elapsed_ms"
    assert len(lines) == 4
    for line in lines[1:]:
        fields = line.split(",")
        assert int(fields[4]) <= int(fields[2])
        assert float(fields[5]) == pytest.approx(2.5)


@pytest.mark.slow
def test_boxes_dyadic_example(cli):
    code, out = cli("boxes", "-d", 2, "--alpha", 0.7, "--eps", 0.05, "--i-min", 4, "--i-max", 8,
                    "--format", "csv", "--cap", 10 ** 9, "--threads", 8)
    assert code == 0
    rows = out.strip().splitlines()[1:]
    assert len(rows) == 5
    assert all(int(r.split(",")[4]) <= int(r.split(",")[2]) for r in rows)


SCHEMA_RUNS = [
    ["sum", "-N", 50, "-x", "1/3,2/7"],
    ["completed", "-N", 40, "-x", "0.1,0.2", "--spectrum", "--domination"],
    ["moment", "-N", 4, 8, 16, "-s", 1, "--samples", 2000, "--seed", 1],
    ["moment", "-N", 8, "--completed", "-s", 1, "--samples", 500, "--seed", 1],
    ["vinogradov", "-s", 2, "-N", 4],
    ["boxes", "--i-min", 2, "--i-max", 3],
    ["stability", "-x", "0,0", "--i-min", 5, "--i-max", 6, "--probes", 20, "--seed", 1],
    ["stability", "--i-min", 6, "--i-max", 6, "--bases", 2, "--probes", 10, "--seed", 1],
    ["dimbound", "-d", 3, "--alpha", 0.6, "--exact"],
    ["table", "--ds", 2, 3, "--alphas", 0.6, 0.9],
    ["exceptional", "-N", 16, 32, "--samples", 500, "--seed", 1],
]


@pytest.mark.parametrize("argv", SCHEMA_RUNS, ids=[a[0] for a in SCHEMA_RUNS])
def test_outputs_validate_against_schemas(cli_json, argv):
    out = cli_json(*argv, "--validate")
    validate_output(out, argv[0])


def test_random_weights_moment(cli_json):
    out = cli_json("moment", "-N", 16, 32, 64, "-s", 3, "--weights", "random", "--samples", 4000, "--seed", 4, "--validate")
    validate_output(out, "moment")
    assert [e["functional"] for e in out["estimates"]] == ["weighted"] * 3
    expected = mc_moment(2, 16, 3, WeightSequence.random_unimodular(16, 4), 4000, 4)
    assert out["estimates"][0]["mean"] == expected.mean
    assert out["fit"]["slope"] == pytest.approx(3, abs=0.75)


def test_generated_seed_is_reported(cli_json):
    out = cli_json("moment", "-N", 4, "-s", 1, "--samples", 100)
    assert isinstance(out["seed"], int)
    assert out["estimates"][0]["seed"] == out["seed"]


@pytest.mark.parametrize(
    "argv",
    [
        ["moment", "-d", 3, "-N", 6, 9, 12, "-s", 2, "--samples", 9000, "--seed", 77],
        ["exceptional", "-N", 32, 64, "--samples", 5000, "--seed", 77],
        ["stability", "--i-min", 6, "--i-max", 7, "--bases", 3, "--probes", 30, "--seed", 77],
        ["boxes", "--i-min", 2, "--i-max", 4],
    ],
    ids=["moment", "exceptional", "stability", "boxes"],
)
def test_threads_do_not_change_outputs(cli_json, argv):
    single = cli_json(*argv, "--threads", 1)
    pooled = cli_json(*argv, "--threads", 4)
    for rows in (single.get("rows"), pooled.get("rows")):
        for row in rows or []:
            row.pop("elapsed_ms")
    assert single == pooled


def test_run_record_and_replay(cli, tmp_path):
    argv = ["moment", "-N", 4, 8, 16, "-s", 1, "--samples", 3000, "--seed", 5, "--out", tmp_path]
    code, out = cli(*argv)
    assert code == 0
    (path,) = tmp_path.glob("moment-*.json")
    record = RunRecord.load(path)
    assert record.seed == 5
    assert record.outputs == json.loads(out)
    assert path.name == record.filename()

    assert cli("replay", path, "--threads", 3)[0] == 0

    data = json.loads(path.read_text())
    data["outputs"]["estimates"][0]["mean"] += 1.0
    tampered = tmp_path / "tampered.json"
    tampered.write_text(json.dumps(data))
    assert cli("replay", tampered)[0] == 1


@pytest.mark.parametrize("name", ["golden-sum.json", "golden-vinogradov.json"])
def test_golden_replay(cli, data_dir, name):
    assert cli("replay", data_dir / name)[0] == 0


def test_config_file_sits_below_flags(cli_json, cli, tmp_path):
    config = tmp_path / "run.conf"
    config.write_text("alpha = 0.75\nd = 2\nexact = yes\n")
    out = cli_json("dimbound", "--config", config)
    assert out["u"] == pytest.approx(4 / 3)
    assert out["u_exact"] == "4/3"
    assert cli_json("dimbound", "--config", config, "--alpha", 0.5)["u"] == pytest.approx(2)

    config.write_text("N = 4 8 16\ns = 1\nsamples = 500\nseed = 3\n")
    out = cli_json("moment", "--config", config)
    assert [e["N"] for e in out["estimates"]] == [4, 8, 16]

    config.write_text("no_such_key = 1\n")
    assert cli("dimbound", "--config", config)[0] == 2

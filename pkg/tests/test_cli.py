import json

import pytest

from padopt.cli import main


@pytest.fixture
def dataset(tmp_path):
    path = tmp_path / "fig.csv"
    path.write_text(
        "size,frequency\n1000,0.22\n1050,0.05\n1100,0.23\n"
        "1110,0.12\n1120,0.18\n1140,0.20\n"
    )
    return path


def test_gen_solve_eval_pipeline(tmp_path, capsys):
    ds = tmp_path / "ds.csv"
    assert main(["gen", "--n", "12", "--size-min", "100", "--size-max", "5000",
                 "--seed", "4", "--output", str(ds)]) == 0
    scheme = tmp_path / "scheme.json"
    assert main(["solve", str(ds), "--algorithm", "popre", "--c", "1.3",
                 "--output", str(scheme)]) == 0
    doc = json.loads(scheme.read_text())
    assert doc["algorithm"] == "popre"
    assert doc["constraint_source"] == {"kind": "multiplier", "c": 1.3}
    assert main(["eval", str(scheme)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["algorithm"] == "popre"
    assert payload["renyi_bits"] >= 0.0


def test_solve_writes_report_with_secret_mode(dataset, tmp_path, capsys):
    out = tmp_path / "s.json"
    assert main(["solve", str(dataset), "--algorithm", "prpre", "--c", "1.1",
                 "--secret", "size", "--output", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["report"]["prior_vulnerability"] == pytest.approx(0.23)


def test_attack_roundtrip(dataset, tmp_path, capsys):
    scheme = tmp_path / "s.json"
    main(["solve", str(dataset), "--algorithm", "popre", "--c", "1.1",
          "--output", str(scheme)])
    assert main(["attack", str(scheme), "--trials", "20000", "--seed", "9"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["theoretical_optimum"] == pytest.approx(0.43)
    assert abs(payload["empirical_success_rate"] - 0.43) < 0.02
    assert payload["checkpoints"][0][0] == 1000


def test_oracle_command(dataset, capsys):
    assert main(["oracle", str(dataset), "--c", "1.1"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["min_vulnerability"] == pytest.approx(0.43)
    assert payload["min_shannon_bits"] == pytest.approx(0.760167, abs=1e-6)


def test_oracle_grid_resolution(tmp_path, capsys):
    ds = tmp_path / "tiny.csv"
    ds.write_text("size,frequency\n1,0.2\n2,0.5\n3,0.3\n")
    assert main(["oracle", str(ds), "--c", "2.0", "--resolution", "10"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["grid_min_vulnerability"] == pytest.approx(0.5)


def test_bench_command(dataset, tmp_path):
    out = tmp_path / "bench.csv"
    assert main(["bench", str(dataset), "--c", "1.0", "1.1",
                 "--algorithms", "popre", "prpre", "--output", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == (
        "algorithm,c,n,renyi_bits,shannon_bits,vulnerability,"
        "bandwidth_percent,elapsed_seconds"
    )
    assert len(lines) == 5


def test_bench_empty_c_list(dataset, capsys):
    assert main(["bench", str(dataset), "--algorithms", "popre"]) == 0
    out = capsys.readouterr().out
    assert out.strip().splitlines() == [
        "algorithm,c,n,renyi_bits,shannon_bits,vulnerability,"
        "bandwidth_percent,elapsed_seconds"
    ]


def test_validation_errors_exit_1(tmp_path, capsys):
    missing = tmp_path / "missing.csv"
    assert main(["solve", str(missing), "--c", "1.1"]) == 1
    bad = tmp_path / "bad.csv"
    bad.write_text("size,frequency\n10,-1\n")
    assert main(["solve", str(bad), "--c", "1.1"]) == 1
    ok = tmp_path / "ok.csv"
    ok.write_text("size,frequency\n10,1.0\n")
    assert main(["solve", str(ok), "--c", "0.5"]) == 1


def test_per_file_and_alphabet_flags(dataset, tmp_path, capsys):
    per_file = tmp_path / "cs.txt"
    per_file.write_text("3.0\n1.2\n1.2\n1.2\n1.2\n1.2\n")
    assert main(["solve", str(dataset), "--per-file-c", str(per_file)]) == 0
    capsys.readouterr()

    alphabet = tmp_path / "alpha.txt"
    alphabet.write_text("1024\n2048\n")
    assert main(["solve", str(dataset), "--alphabet", str(alphabet), "--c", "2.0"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["original_sizes"] == [1000, 1050, 1100, 1110, 1120, 1140]

    # strict variant rejects c=1 on this alphabet
    assert main(["solve", str(dataset), "--alphabet", str(alphabet), "--c", "1.1",
                 "--strict-lstar-bound"]) in (0, 1)
    assert main(["solve", str(dataset), "--per-file-c", str(per_file),
                 "--alphabet", str(alphabet)]) == 1

import json

import numpy as np
import pytest

from seqlocc import RunConfig, discriminate, random_unitary, swap_operator, validate_unitary
from seqlocc.cli import main
from seqlocc.errors import MatrixFileError
from seqlocc.io import (
    dumps_matrix,
    dumps_scheme,
    load_matrix_file,
    loads_matrix,
    loads_scheme,
    save_matrix_file,
)

from conftest import CNOT, CZ, HAD


def _write(tmp_path, name, M, d_a=2, d_b=2):
    path = tmp_path / name
    save_matrix_file(str(path), validate_unitary(M, d_a, d_b))
    return str(path)


def test_matrix_round_trip():
    U = validate_unitary(CNOT, 2, 2)
    back = loads_matrix(dumps_matrix(U))
    assert np.array_equal(back.matrix, U.matrix)
    assert (back.d_a, back.d_b) == (2, 2)


def test_matrix_parse_strictness():
    with pytest.raises(MatrixFileError):
        loads_matrix('{"d_a": 2, "d_b": 2, "entries": [[1, 0]]}')
    with pytest.raises(MatrixFileError):
        loads_matrix('{"d_a": 2, "entries": []}')
    with pytest.raises(MatrixFileError):
        loads_matrix("not json")


def test_scheme_round_trip():
    scheme, report = discriminate(validate_unitary(CNOT, 2, 2),
                                  validate_unitary(np.kron(HAD, HAD), 2, 2),
                                  RunConfig())
    text = dumps_scheme(scheme, report)
    back = loads_scheme(text)
    assert back.case_trace == scheme.case_trace
    assert back.budget == scheme.budget
    assert back.template.query_count == scheme.template.query_count
    data = json.loads(text)
    assert data["report"]["passed"] is True


def test_cli_classify(tmp_path, capsys):
    path = _write(tmp_path, "cnot.json", CNOT)
    assert main(["classify", path]) == 0
    out = capsys.readouterr().out
    assert "Imprimitive" in out
    assert "1.41421356237" in out


def test_cli_classify_swap(tmp_path, capsys):
    path = _write(tmp_path, "swap.json", swap_operator(2))
    assert main(["classify", path]) == 0
    assert "SwapProduct" in capsys.readouterr().out


def test_cli_classify_malformed(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"d_a": 2, "d_b": 2, "entries": [[1, 0]]}')
    assert main(["classify", str(bad)]) == 2


def test_cli_theta_pair(tmp_path, capsys):
    a = _write(tmp_path, "i.json", np.eye(4))
    b = _write(tmp_path, "szi.json", np.kron(np.diag([1, -1]), np.eye(2)))
    csv = tmp_path / "phases.csv"
    assert main(["theta", a, b, "--csv", str(csv)]) == 0
    out = capsys.readouterr().out
    assert "single_query_distinguishable: True" in out
    assert "parallel_query_count: 1" in out
    text = csv.read_text()
    assert text.splitlines()[0] == "index,phase,multiplicity"
    assert len(text.splitlines()) == 3  # header + two distinct phases


def test_cli_theta_single_cnot(tmp_path, capsys):
    path = _write(tmp_path, "cnot.json", CNOT)
    assert main(["theta", path]) == 0
    out = capsys.readouterr().out
    # CNOT spectrum {1, 1, 1, -1}: the arc is exactly pi
    assert f"theta: {np.pi!r}" in out


def test_cli_theta_dimension_mismatch(tmp_path):
    a = _write(tmp_path, "a.json", np.eye(4), 2, 2)
    b = _write(tmp_path, "b.json", np.eye(6), 2, 3)
    assert main(["theta", a, b]) == 2


def test_cli_discriminate_verify_round_trip(tmp_path, capsys):
    a = _write(tmp_path, "i.json", np.eye(4))
    b = _write(tmp_path, "szi.json", np.kron(np.diag([1, -1]), np.eye(2)))
    scheme_path = str(tmp_path / "scheme.json")
    assert main(["discriminate", a, b, "--out", scheme_path]) == 0
    err = capsys.readouterr().err
    assert "case_trace: i-a" in err
    assert "verified: pass" in err
    assert main(["verify", scheme_path, a, b]) == 0
    out = capsys.readouterr().out
    assert "verified: pass" in out


def test_cli_discriminate_phase_equivalent_exit3(tmp_path):
    a = _write(tmp_path, "a.json", CNOT)
    b = _write(tmp_path, "b.json", np.exp(0.2j) * CNOT)
    assert main(["discriminate", a, b]) == 3


def test_cli_synth_swap_from_cnot(tmp_path, capsys):
    target = _write(tmp_path, "swap.json", swap_operator(2))
    gen = _write(tmp_path, "cnot.json", CNOT)
    out_path = str(tmp_path / "template.json")
    assert main(["synth", target, gen, "--out", out_path]) == 0
    err = capsys.readouterr().err
    assert "query_count: 3" in err
    from seqlocc import loads_template, evaluate_template, phase_distance
    with open(out_path) as fh:
        tpl = loads_template(fh.read())
    assert phase_distance(evaluate_template(tpl, CNOT), swap_operator(2)) <= 1e-6


def test_cli_synth_primitive_generator_exit4(tmp_path):
    target = _write(tmp_path, "swap.json", swap_operator(2))
    gen = _write(tmp_path, "hh.json", np.kron(HAD, HAD))
    assert main(["synth", target, gen]) == 4


def test_cli_deterministic_scheme_files(tmp_path):
    a = _write(tmp_path, "cnot.json", CNOT)
    b = _write(tmp_path, "cz.json", CZ)
    p1 = str(tmp_path / "s1.json")
    p2 = str(tmp_path / "s2.json")
    assert main(["discriminate", a, b, "--out", p1, "--seed", "0"]) == 0
    assert main(["discriminate", a, b, "--out", p2, "--seed", "0"]) == 0
    assert open(p1, "rb").read() == open(p2, "rb").read()

import json

import numpy as np
import pytest

from cqcoding import cli
from cqcoding import io as cio
from cqcoding.coding import InvalidCodeError

ORTHOGONAL = {"dim": 2, "inputs": [{"label": "a", "ket": [1, 0]}, {"label": "b", "ket": [0, 1]}]}
ZERO_PLUS = {
    "dim": 2,
    "inputs": [
        {"label": "0", "state": [[1, 0], [0, 0]]},
        {"label": "+", "ket": [[0.7071067811865476, 0], [0.7071067811865476, 0]]},
    ],
}


@pytest.fixture
def channel_file(tmp_path):
    def write(record, name="channel.json"):
        path = tmp_path / name
        path.write_text(json.dumps(record))
        return str(path)
    return write


def test_channel_round_trip():
    W = cio.channel_from_dict(ZERO_PLUS)
    assert W.labels == ("0", "+")
    back = cio.channel_from_dict(json.loads(json.dumps(cio.channel_to_dict(W))))
    for s, t in zip(W.states, back.states):
        np.testing.assert_array_equal(s, t)


def test_complex_entries():
    m = cio.parse_matrix([[[0.5, 0], [0, -0.5]], [[0, 0.5], 0.5]])
    np.testing.assert_array_equal(m, [[0.5, -0.5j], [0.5j, 0.5]])
    W = cio.channel_from_dict({"dim": 2, "inputs": [{"label": "y", "state": [[[0.5, 0], [0, -0.5]], [[0, 0.5], 0.5]]}]})
    assert W.d == 2


@pytest.mark.parametrize("record, match", [
    ({"inputs": []}, "dim"),
    ({"dim": 2, "inputs": [{"label": "x"}]}, "state"),
    ({"dim": 3, "inputs": [{"label": "x", "ket": [1, 0]}]}, "shape"),
    ({"dim": 2, "inputs": [{"label": "x", "state": [[1, 0], [0, 1]]}]}, "trace"),
    ({"dim": 2, "inputs": [{"label": "x", "state": [[1, 0], [0]]}]}, "unequal"),
    ({"dim": 2, "inputs": [{"label": "x", "ket": ["1", 0]}]}, "pair"),
])
def test_bad_channel_records(record, match):
    with pytest.raises(cio.FormatError, match=match):
        cio.channel_from_dict(record)


def test_words():
    labels = ("0", "+")
    assert cio.format_word((0, 1, 1), labels) == "0,+,+"
    assert cio.parse_word("0,+,+", labels) == (0, 1, 1)
    with pytest.raises(cio.FormatError, match="unknown label"):
        cio.parse_word("0,1", labels)


def test_code_round_trip(tmp_path):
    from cqcoding.coding import greedy_code_build
    W = cio.channel_from_dict(ZERO_PLUS)
    code = greedy_code_build(W, [0.5, 0.5], 2, 0.5).code
    path = tmp_path / "code.json"
    cio.save_json(path, cio.code_to_dict(code, W, 0.5, "channel.json"))
    back, lam = cio.code_from_dict(cio.load_json(path), W)
    assert lam == 0.5 and back.codewords == code.codewords
    for a, b in zip(code.decoder, back.decoder):
        np.testing.assert_allclose(a, b, atol=0)


def test_code_over_identity_rejected():
    W = cio.channel_from_dict(ORTHOGONAL)
    record = {"n": 1, "codewords": ["a", "b"], "decoder": [np.eye(2).tolist()] * 2, "lambda": 0.3}
    with pytest.raises(InvalidCodeError):
        cio.code_from_dict(record, W)
    with pytest.raises(cio.FormatError):
        cio.code_from_dict({"n": 1}, W)


def test_cli_capacity(channel_file, capsys):
    assert cli.main(["capacity", "--channel", channel_file(ORTHOGONAL)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "capacity_bits,1.000000"
    assert out[3] == "maximizer,a=0.5;b=0.5"


def test_cli_capacity_zero_plus(channel_file, capsys):
    assert cli.main(["capacity", "--channel", channel_file(ZERO_PLUS)]) == 0
    assert capsys.readouterr().out.startswith("capacity_bits,0.600876\n")


def test_cli_capacity_iteration_failure(channel_file, capsys):
    W = {"dim": 2, "inputs": [{"label": "0", "state": [[1, 0], [0, 0]]},
                              {"label": "1", "state": [[0.5, 0], [0, 0.5]]}]}
    # a gap of 1e-300 is unreachable in double precision
    assert cli.main(["capacity", "--channel", channel_file(W), "--tol", "1e-300"]) == 3
    assert "did not reach gap" in capsys.readouterr().err


def test_cli_input_errors(channel_file, tmp_path, capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["verify", "--suite", "nonsense"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        cli.main(["capacity"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        cli.main(["code-build", "--channel", "x", "--lambda", "1.5"])
    assert info.value.code == 2
    missing = str(tmp_path / "missing.json")
    assert cli.main(["capacity", "--channel", missing]) == 2
    bad = channel_file({"dim": 2, "inputs": [{"label": "x", "state": [[1, 0], [0, 1]]}]}, "bad.json")
    assert cli.main(["capacity", "--channel", bad]) == 2
    assert cli.main(["code-build", "--channel", channel_file(ORTHOGONAL), "--n", "2"]) == 2


def test_cli_converse_rejects_bad_decoder(channel_file, tmp_path, capsys):
    code = tmp_path / "code.json"
    code.write_text(json.dumps({"n": 1, "codewords": ["a", "b"],
                                "decoder": [np.eye(2).tolist()] * 2, "lambda": 0.3}))
    assert cli.main(["converse-check", "--channel", channel_file(ORTHOGONAL), "--code", str(code)]) == 2
    assert "identity" in capsys.readouterr().err


def test_cli_dense_cap(channel_file, capsys):
    assert cli.main(["code-build", "--channel", channel_file(ORTHOGONAL), "--n", "6",
                     "--lambda", "0.5", "--dense-cap", "32"]) == 4
    assert "cap" in capsys.readouterr().err


def test_cli_code_build_then_converse(channel_file, tmp_path, capsys):
    channel = channel_file(ORTHOGONAL)
    code = str(tmp_path / "code.json")
    assert cli.main(["code-build", "--channel", channel, "--n", "2", "--lambda", "0.5", "--code", code]) == 0
    out = capsys.readouterr().out
    assert out.startswith("size,4\n")
    assert "sandwich,pass" in out
    record = json.loads(open(code).read())
    assert record["codewords"] == ["a,a", "a,b", "b,a", "b,b"]
    # mixed types: refused without the filter, accepted with it
    assert cli.main(["converse-check", "--channel", channel, "--code", code]) == 2
    capsys.readouterr()
    assert cli.main(["converse-check", "--channel", channel, "--code", code, "--cc-filter"]) == 0
    assert "type=1/1" in capsys.readouterr().out


def test_cli_verify_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(["verify", "--suite", "types", "--trials", "20", "--seed", "5", "--out", str(a)]) == 0
    assert cli.main(["verify", "--suite", "types", "--trials", "20", "--seed", "5", "--out", str(b),
                     "--workers", "3"]) == 0
    assert a.read_bytes() == b.read_bytes()
    header = a.read_text().splitlines()[0]
    assert header == "trial,lemma,check,params,bound,achieved,slack,passed,witness"


def test_cli_verify_violation_exit(tmp_path):
    # the fidelity suite includes subnormalized states, where D >= 1 - F can fail
    out = tmp_path / "f.csv"
    code = cli.main(["verify", "--suite", "fidelity", "--trials", "50", "--out", str(out)])
    assert code == 1
    assert "mixed_state_subnormalized,distance_geq_infidelity" in out.read_text()


def test_cli_holevo_check(channel_file, capsys):
    assert cli.main(["holevo-check", "--trials", "5", "--seed", "1"]) == 0
    assert cli.main(["holevo-check", "--trials", "5", "--channel", channel_file(ZERO_PLUS)]) == 0
    assert "information_bound" in capsys.readouterr().out

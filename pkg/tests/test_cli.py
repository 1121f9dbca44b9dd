import json

import pytest

from effectalg.cli import COMMANDS, run
from effectalg.suite import CHECKS


def _run(*argv):
    code, text = run(list(argv))
    return code, json.loads(text)


def test_enumerate_diamond_golden():
    code, rep = _run("enumerate", "--algebra", "diamond.json")
    assert code == 0
    assert rep == {
        "command": "enumerate",
        "ok": True,
        "seed": 0,
        "tolerances": {"eps_eq": 1e-09, "eps_psd": 1e-09},
        "result": {
            "count": 3,
            "n": 4,
            "operators": [
                {"faithful": False, "kernel": [0, 1], "strong": True, "tau": [0, 0, 3, 3]},
                {"faithful": True, "kernel": [0], "strong": True, "tau": [0, 1, 2, 3]},
                {"faithful": False, "kernel": [0, 2], "strong": True, "tau": [0, 3, 0, 3]},
            ],
        },
    }


CHECK_TAU_MARKDOWN = """\
# effectalg check-tau

- status: **FAIL**
- seed: 0
- tolerances: eps_eq=1e-09, eps_psd=1e-09

```json
{
  "is_state_operator": false,
  "tau": [
    0,
    2,
    1,
    3
  ],
  "violated": [
    {
      "axiom": "(iii)",
      "witness": [
        1
      ]
    }
  ]
}
```
"""


def test_check_tau_markdown_golden():
    code, text = run(["check-tau", "--algebra", "diamond.json", "--tau", "diamond_swap.tau.json", "--format", "markdown"])
    assert code == 1
    assert text == CHECK_TAU_MARKDOWN


def test_validate_mv_file():
    code, rep = _run("validate", "--algebra", "luk3.mv.json")
    assert code == 0
    assert rep["result"]["effect_algebra"]["valid"] and rep["result"]["mv_algebra"]["valid"]


def test_validate_invalid_table_is_a_failure(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"n": 3, "zero": 0, "one": 2, "sum": [[0, 1, 2], [1, 2, 2], [2, 2, None]]}))
    code, rep = _run("validate", "--algebra", str(p))
    assert code == 1
    assert {"axiom": "EA4", "witness": [1, 2]} in rep["result"]["effect_algebra"]["violations"]


def test_classify_mo2():
    code, rep = _run("classify", "--algebra", "mo2.json")
    assert code == 0
    assert rep["result"]["classification"] == {"is_lattice": True, "is_oml": True, "is_mv_effect_algebra": False}
    assert len(rep["result"]["states"]["vertices"]) == 4


def test_quotient_collapse():
    code, rep = _run("quotient", "--algebra", "diamond.json", "--tau", "diamond_collapse.tau.json")
    assert code == 0
    assert rep["result"]["tau_hat"] == [0, 1]
    assert rep["result"]["class_map"] == [0, 0, 1, 1]


def test_luders_image():
    code, rep = _run("luders", "--pvm", "pinching2.pvm.json", "--matrix", "offdiag2.effect.json")
    assert code == 0
    assert rep["result"]["image"]["re"] == [[0.5, 0.0], [0.0, 0.5]]
    assert rep["result"]["fixed"] is False


def test_ks_check_example():
    code, rep = _run("ks-check", "--pvm", "pinching2.pvm.json", "--matrix", "offdiag2.effect.json")
    assert code == 0
    assert rep["result"]["min_rhs_gap"] == pytest.approx(0.09)


def test_support_and_decompose():
    code, rep = _run("support", "--map", "vector_state2.map.json")
    assert code == 0
    assert rep["result"]["e"]["re"] == [[1.0, 0.0], [0.0, 0.0]] and rep["result"]["rank"] == 1
    code, rep = _run("decompose", "--map", "block3.map.json")
    assert code == 0
    assert rep["result"]["composition_error"] == 0.0


def test_ce_matrix_maps():
    code, rep = _run("ce", "--map", "diagonal_average3.map.json")
    assert code == 0
    assert rep["result"]["conditional_expectation"] is False
    assert len(rep["result"]["witness"]) == 2
    code, rep = _run("ce", "--map", "vector_state2.map.json")
    assert rep["result"]["conditional_expectation"] is True and rep["result"]["jordan"] is False


def test_strong_and_ce_stochastic():
    code, rep = _run("strong", "--matrix", "nonstrong3.T.json")
    assert code == 0
    assert rep["result"]["strong"] is False
    assert rep["result"]["witness"] == [["1", "0", "0"], ["0", "1", "0"]]
    code, rep = _run("ce", "--matrix", "collapse2.T.json")
    assert code == 0
    assert rep["result"]["jordan_support"] == {"K": [0], "extension_check": True}


def test_mvce(tmp_path):
    ev = tmp_path / "a.json"
    ev.write_text(json.dumps([1, 0, 1, 1]))
    code, rep = _run("mvce", "--prob", "uniform4.prob.json", "--event", str(ev))
    assert code == 0
    assert rep["result"]["expectation"] == ["1/2", "1/2", "1", "1"]
    code, rep = _run("mvce", "--prob", "collapse2.weights.json", "--matrix", "collapse2.T.json")
    assert code == 0
    assert rep["result"]["weights"] == ["1", "0"]


@pytest.mark.parametrize(
    "argv",
    [
        ["validate", "--algebra", "no_such_file.json"],
        ["validate"],
        ["enumerate", "--algebra", "luk3x3.json"],  # above the default size bound
        ["classify", "--algebra", "__bad__"],
        ["quotient", "--algebra", "mo2.json", "--tau", "diamond_collapse.tau.json"],
        ["luders", "--pvm", "diamond.json"],
        ["suite", "--only", "no_such_check"],
        ["validate", "--algebra", "diamond.json", "--eps-eq", "0"],
    ],
)
def test_bad_input_exits_2(argv, tmp_path):
    if argv[-1] == "__bad__":
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        argv = argv[:-1] + [str(p)]
    code, text = run(argv)
    assert code == 2
    rep = json.loads(text)
    assert rep["ok"] is False and rep["error"]


def test_ragged_table_exits_2(tmp_path):
    p = tmp_path / "ragged.json"
    p.write_text(json.dumps({"n": 2, "zero": 0, "one": 1, "sum": [[0, 1], [1]]}))
    assert run(["validate", "--algebra", str(p)])[0] == 2


def test_timing_flag():
    _, rep = _run("classify", "--algebra", "chain2.json")
    assert "seconds" not in rep
    _, rep = _run("classify", "--algebra", "chain2.json", "--timing")
    assert rep["seconds"] >= 0


def test_suite_subset_markdown():
    code, text = run(["suite", "--only", "quotient_faithful,axiom_gate", "--format", "markdown"])
    assert code == 0
    lines = text.splitlines()
    rows = [l for l in lines if l.startswith("| ") and "status" not in l and "witnesses" not in l]
    assert [r.split("|")[1].strip() for r in rows] == ["axiom_gate", "quotient_faithful"]
    assert "2/2 checks passed" in text
    assert "- seed: 42" in text


def test_output_is_deterministic():
    argv = ["ks-check", "--map", "vector_state2.map.json", "--seed", "5"]
    assert run(argv) == run(argv)


def test_every_command_has_a_handler():
    assert len(COMMANDS) == 13
    assert len(CHECKS) == 12

import json
import subprocess
import sys

import pytest
from conftest import F

from approval_bribery import FORBIDDEN, solve_add_ci, verify_solution
from approval_bribery import io as fmt
from approval_bribery.cli import cli_main
from approval_bribery.errors import FormatSemanticError, FormatSyntaxError
from approval_bribery.generators import gen_cubic_graph, gen_random_instance, gen_rx3c
from approval_bribery.reductions import (
    build_plan_from_independent_set,
    reduce_cubic_is_to_swap_ci,
    reduce_rx3c_to_del_ci,
)

DOC = {
    "candidates": ["l1", "p", "r1"],
    "voters": [
        {"name": "v1", "approves": ["l1"]},
        {"name": "v2", "approves": ["r1"]},
        {"name": "v3", "approves": ["r1"]},
    ],
    "witness": {"kind": "ci", "order": ["l1", "p", "r1"]},
    "mode": "add",
    "k": 1,
    "p": "p",
    "budget": 4,
    "costs": {
        "default_cost": "forbidden",
        "entries": [
            {"voter": "v1", "candidate": "p", "cost": 1},
            {"voter": "v2", "candidate": "p", "cost": 1},
            {"voter": "v3", "candidate": "p", "cost": 3},
        ],
    },
}


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text if isinstance(text, str) else json.dumps(text))
    return str(path)


def run(argv, capsys):
    code = cli_main(argv)
    out, err = capsys.readouterr()
    return code, out, err


# -- formats ----------------------------------------------------------------------


def test_instance_round_trip():
    inst = fmt.instance_from_doc(DOC)
    text = fmt.serialize_instance(inst)
    assert text == fmt.canonical_json(DOC)
    assert fmt.parse_instance(text) == inst
    assert inst.costs.lookup((0, 0)) is FORBIDDEN


@pytest.mark.parametrize("mode", ["add", "delete", "swap", "swap-to-p"])
def test_random_round_trips(mode):
    for seed in range(20):
        inst = gen_random_instance(4, 4, mode, "vi", seed)
        text = fmt.serialize_instance(inst)
        assert fmt.parse_instance(text) == inst
        assert fmt.serialize_instance(fmt.parse_instance(text)) == text


def test_plan_round_trip(make):
    inst = fmt.instance_from_doc(DOC)
    plan = solve_add_ci(inst).plan
    text = fmt.serialize_plan(plan, inst.election)
    assert fmt.parse_plan(text, inst.election) == plan


def test_unknown_name_is_semantic():
    doc = json.loads(json.dumps(DOC))
    doc["voters"][0]["approves"] = ["zed"]
    with pytest.raises(FormatSemanticError) as info:
        fmt.instance_from_doc(doc)
    assert "zed" in str(info.value)
    doc = json.loads(json.dumps(DOC))
    doc["witness"]["order"] = ["l1", "p"]
    with pytest.raises(FormatSemanticError):
        fmt.instance_from_doc(doc)
    doc = json.loads(json.dumps(DOC))
    doc["mode"] = "bribe"
    with pytest.raises(FormatSemanticError) as info:
        fmt.instance_from_doc(doc)
    assert info.value.field == "mode"


def test_broken_axis_is_semantic():
    doc = json.loads(json.dumps(DOC))
    doc["voters"][0]["approves"] = ["l1", "r1"]
    with pytest.raises(FormatSemanticError):
        fmt.instance_from_doc(doc)


def test_syntax_errors_carry_position():
    with pytest.raises(FormatSyntaxError) as info:
        fmt.parse_instance('{\n  "candidates": [,]\n}')
    assert info.value.line == 2
    with pytest.raises(FormatSyntaxError) as info:
        fmt.instance_from_doc({**DOC, "k": "one"})
    assert info.value.field == "k"
    with pytest.raises(FormatSyntaxError):
        fmt.instance_from_doc({**DOC, "costs": {"entries": [{"voter": "v1", "candidate": "p", "cost": -2}]}})


# -- CLI --------------------------------------------------------------------------


def test_solve_matches_library(tmp_path, capsys):
    path = write(tmp_path, "inst.json", DOC)
    code, out, _ = run(["solve", "--instance", path], capsys)
    assert code == 0
    inst = fmt.instance_from_doc(DOC)
    expected = fmt.canonical_json(fmt.outcome_to_doc(solve_add_ci(inst), inst.election, "add-ci"))
    assert out == expected
    assert json.loads(out)["optimal_cost"] == 2


def test_oracle_has_solve_shape(tmp_path, capsys):
    path = write(tmp_path, "inst.json", DOC)
    _, a, _ = run(["solve", "--instance", path], capsys)
    code, b, _ = run(["oracle", "--instance", path], capsys)
    a, b = json.loads(a), json.loads(b)
    assert code == 0 and set(a) == set(b)
    assert (b["optimal_cost"], b["solver_used"]) == (2, "oracle")


def test_auto_refuses_np_hard(tmp_path, capsys):
    doc = {**DOC, "mode": "delete", "costs": {"default_cost": 1}}
    path = write(tmp_path, "inst.json", doc)
    code, out, err = run(["solve", "--instance", path], capsys)
    assert code == 2 and out == ""
    assert "NP-hard" in json.loads(err)["error"]["message"]
    code, out, _ = run(["solve", "--instance", path, "--solver", "bb-del"], capsys)
    assert code == 0 and json.loads(out)["feasible"]


def test_bb_del_on_cover_gadget(tmp_path, capsys):
    src = write(tmp_path, "src.json", fmt.canonical_json(fmt.source_to_doc(gen_rx3c(1, 0))))
    inst = tmp_path / "inst.json"
    code, _, _ = run(["reduce", "--from", "rx3c-delci", "--source", src, "--out", str(inst)], capsys)
    assert code == 0
    code, out, _ = run(["solve", "--instance", str(inst), "--solver", "bb-del"], capsys)
    assert code == 0
    assert json.loads(out)["optimal_cost"] == 9


def test_verify_forward_k4_plan(tmp_path, capsys):
    src = write(tmp_path, "g.json", fmt.canonical_json(fmt.source_to_doc(gen_cubic_graph(4, 0))))
    inst, plan = tmp_path / "inst.json", tmp_path / "plan.json"
    code, _, _ = run(["reduce", "--from", "cis-swapci", "--source", src, "--h", "1",
                      "--solution", "0", "--out", str(inst), "--plan-out", str(plan)], capsys)
    assert code == 0
    code, out, _ = run(["verify", "--instance", str(inst), "--plan", str(plan)], capsys)
    assert code == 0 and json.loads(out)["valid"]
    roles = json.loads(inst.read_text())["roles"]
    assert roles["candidates"]["p"] == "preferred"


def test_reduce_output_matches_library(tmp_path, capsys):
    src = write(tmp_path, "g.json", fmt.canonical_json(fmt.source_to_doc(gen_cubic_graph(4, 0))))
    code, out, _ = run(["reduce", "--from", "cis-swapci", "--source", src, "--h", "1"], capsys)
    bundle = reduce_cubic_is_to_swap_ci(gen_cubic_graph(4, 0), 1)
    assert code == 0 and fmt.parse_instance(out) == bundle.instance
    plan = build_plan_from_independent_set(bundle, [0])
    assert verify_solution(fmt.parse_instance(out), plan).valid


def test_reduce_needs_h(tmp_path, capsys):
    src = write(tmp_path, "g.json", fmt.canonical_json(fmt.source_to_doc(gen_cubic_graph(4, 0))))
    code, _, err = run(["reduce", "--from", "cis-swapci", "--source", src], capsys)
    assert code == 2 and json.loads(err)["error"]["type"] == "UsageError"


def test_verify_invalid_plan_exits_1(tmp_path, capsys):
    path = write(tmp_path, "inst.json", DOC)
    plan = write(tmp_path, "plan.json", {"ops": [{"kind": "add", "voter": "v3", "candidate": "p"}], "total_cost": 3})
    code, out, _ = run(["verify", "--instance", path, "--plan", plan], capsys)
    report = json.loads(out)
    assert code == 1 and not report["valid"] and not report["p_wins"]


def test_recognize(tmp_path, capsys):
    e = {"candidates": ["a", "b", "c"], "voters": [
        {"name": "v1", "approves": ["a", "c"]}, {"name": "v2", "approves": ["a", "b"]}]}
    path = write(tmp_path, "e.json", e)
    code, out, _ = run(["recognize", "--election", path, "--kind", "ci"], capsys)
    witness = json.loads(out)["witness"]
    assert code == 0 and witness["kind"] == "ci" and witness["order"][1] == "a"
    e["voters"].append({"name": "v3", "approves": ["b", "c"]})
    path = write(tmp_path, "e.json", e)
    code, out, _ = run(["recognize", "--election", path, "--kind", "ci"], capsys)
    assert code == 0 and json.loads(out)["witness"] == "none"


def test_exit_codes(tmp_path, capsys):
    assert run(["frobnicate"], capsys)[0] == 2
    assert run(["solve"], capsys)[0] == 2
    assert run(["solve", "--instance", str(tmp_path / "missing.json")], capsys)[0] == 2
    bad = write(tmp_path, "bad.json", "{nope")
    code, _, err = run(["solve", "--instance", bad], capsys)
    assert code == 1 and json.loads(err)["error"]["line"] == 1
    big = write(tmp_path, "big.json", {**DOC, "mode": "delete", "witness": {"kind": "unrestricted"},
                                       "voters": [{"name": f"v{i}", "approves": ["l1", "r1"]} for i in range(4)],
                                       "costs": {"default_cost": 1}, "budget": 8})
    code, _, err = run(["oracle", "--instance", big, "--max-states", "3"], capsys)
    assert code == 3 and json.loads(err)["error"]["cap"] == 3


def test_gen_is_deterministic(capsys):
    args = ["gen", "--what", "election", "--seed", "5", "--m", "4", "--n", "5", "--domain", "vi", "--contested"]
    a, b = run(args, capsys)[1], run(args, capsys)[1]
    assert a == b and fmt.parse_instance(a)


def test_forbidden_literal_in_output(make):
    inst = make(["a", "p"], {"v1": ["a"]}, default=F)
    doc = fmt.instance_to_doc(inst)
    assert doc["costs"]["default_cost"] == "forbidden"


def test_module_entry_point(tmp_path):
    path = write(tmp_path, "inst.json", DOC)
    proc = subprocess.run([sys.executable, "-m", "approval_bribery", "solve", "--instance", path],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["solver_used"] == "add-ci"


def test_del_bundle_file_revalidates(tmp_path):
    bundle = reduce_rx3c_to_del_ci(gen_rx3c(2, 0))
    text = fmt.serialize_instance(bundle.instance, {"note": "ignored"})
    assert fmt.parse_instance(text) == bundle.instance

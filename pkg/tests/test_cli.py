import io
import json

import pytest

from mettasem import cli
from mettasem.resources import key_id, sign
from mettasem.states import RState
from mettasem.syntax import parse_state, print_state, parse_term as T

QUERY = "i: {(g (f a))}\nk: {(= (f $x) ($x $x))}\n"
LOOP = "i: {loop}\nk: {(= loop loop)}\n"


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        return str(p)
    return write


def call(*argv):
    buf = io.StringIO()
    code = cli.main(list(argv), out=buf)
    return code, buf.getvalue()


def test_run_query(files):
    code, text = call("run", files("q.metta", QUERY))
    assert code == cli.EXIT_OK
    assert parse_state(text).o == (T("(g (a a))"),)


def test_run_writes_trace_and_state(files, tmp_path):
    trace, final = tmp_path / "t.jsonl", tmp_path / "s.metta"
    code, _ = call("run", files("q.metta", QUERY), "--trace", str(trace), "--out", str(final))
    assert code == 0
    recs = [json.loads(line) for line in trace.read_text().splitlines()]
    assert [r["rule"] for r in recs] == ["Query", "Output"]
    assert parse_state(final.read_text()).o == (T("(g (a a))"),)


def test_fuel_exhaustion(files):
    assert call("run", files("loop.metta", LOOP), "--fuel", "5")[0] == cli.EXIT_FUEL
    assert call("run", files("loop.metta", LOOP), "--policy", "exh", "--fuel", "20")[0] == cli.EXIT_FUEL
    code, text = call("run", files("q.metta", QUERY), "--policy", "exh")
    assert code == 0 and parse_state(text).o == (T("(g (a a))"),)


def test_starved_resourced_run(files):
    p = b"alice"
    s = RState(i=(sign(p, T("(g (f a))")),), k=(T("(= (f $x) ($x $x))"),), eos=((key_id(p), 4),))
    path = files("poor.metta", print_state(s))
    assert call("run", path)[0] == cli.EXIT_STARVED
    keyfile = files("alice.key", "alice")
    assert call("run", path, "--key", keyfile)[0] == cli.EXIT_STARVED
    rich = files("rich.metta", print_state(s.replace(eos=((key_id(p), 100),))))
    code, text = call("run", rich, "--key", keyfile)
    assert code == 0 and parse_state(text).eos == ((key_id(p), 91),)


def test_parse_errors(files):
    assert call("run", files("bad.metta", "i: {(f a"))[0] == cli.EXIT_PARSE
    assert call("fmt", files("x.metta", "") + ".missing")[0] == cli.EXIT_PARSE
    assert call("fmt", files("bin.metta", "") and _binary(files))[0] == cli.EXIT_PARSE


def _binary(files):
    path = files("bin2.metta", "")
    with open(path, "wb") as fh:
        fh.write(b"i: {\xff}")
    return path


def test_random_runs_are_byte_identical(files):
    path = files("w.metta", "w: {a b c (+ 1 2)} i: {(+ true false)}\n")
    first = call("run", path, "--policy", "rand", "--seed", "3")
    assert first == call("run", path, "--policy", "rand", "--seed", "3")


def test_step_lists_every_choice(files):
    code, text = call("step", files("w.metta", "w: {a b}\n"), "--policy", "exh")
    recs = [json.loads(x) for x in text.splitlines()]
    assert code == 0 and [r["host"] for r in recs] == ["a", "b"]


def test_explore(files):
    code, text = call("explore", files("q.metta", QUERY))
    header = json.loads(text.splitlines()[0])
    assert code == 0 and header["nodes"] == 3 and header["edges"] == 2
    code, text = call("explore", files("loop.metta", LOOP), "--max-depth", "3")
    assert code == 0 and json.loads(text.splitlines()[0])["truncated"] is True


def test_bisim_verdicts(files):
    q = files("q.metta", QUERY)
    assert call("bisim", q, q)[0] == cli.EXIT_OK
    code, text = call("bisim", files("a.metta", "o: {a}"), files("b.metta", "o: {b}"))
    assert code == cli.EXIT_DISTINGUISHED
    assert text.startswith("distinguished")
    assert json.loads(text.splitlines()[-1])["distinguishing_barbs"] == {"left": ["a"], "right": ["b"]}
    assert call("bisim", files("l.metta", LOOP), q, "--max-depth", "1")[0] == cli.EXIT_INCONCLUSIVE


def test_bisim_witness_has_trace_records(files):
    # the left side commits to u or p depending on which step goes first
    a = files("a.metta", "w: {u} i: {(addAtom (= u p))}")
    b = files("b.metta", "i: {(addAtom (= u p))} o: {u p}")
    code, text = call("bisim", a, b)
    assert code == cli.EXIT_DISTINGUISHED
    assert any(json.loads(x).get("rule") == "AddAtom1" for x in text.splitlines()[1:])
    final = json.loads(text.splitlines()[-1])["distinguishing_barbs"]
    assert "u" not in final["left"] and "u" in final["right"]


def test_compile_rho(files):
    code, text = call("compile-rho", files("empty.metta", ""))
    assert code == 0 and text.strip() == "new i0 { new k1 { new w2 { new o3 { 0 } } } }"
    code, text = call("compile-rho", files("q.metta", QUERY), "--check")
    assert code == 0 and "; check: agree" in text


def test_fmt_is_canonical(files):
    code, text = call("fmt", files("x.metta", "o: {b a}  i: {{z y}}"))
    assert code == 0 and text == "i: {{y z}}\nk: {}\nw: {}\no: {a b}\n"

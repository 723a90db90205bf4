#!/usr/bin/env python3
"""End-to-end checks of the cairovm binary: exit codes, --json reports, files."""

import argparse
import json
import os
import subprocess
import sys
import tempfile
import unittest
from pathlib import Path

import jsonschema

ARGS = None
K1_2G = (
    "0xc6047f9441ed7d6d3045406e95c07cd85c778e4b8cef3ca7abac09b95c709ee5",
    "0x1ae168fea63dc339a3c58419466ceaeef7f632653266d0e1236431a950cfe52a",
)


def cli(*argv, env=None):
    full_env = dict(os.environ)
    full_env.pop("CAIROVM_FIELD", None)
    full_env.update(env or {})
    return subprocess.run([ARGS.binary, *argv], capture_output=True, text=True, env=full_env, timeout=300)


class CliTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.schema = json.loads(Path(ARGS.schema).read_text())
        cls.data = Path(ARGS.data)
        cls.tmp = tempfile.TemporaryDirectory()
        cls.dir = Path(cls.tmp.name)

    @classmethod
    def tearDownClass(cls):
        cls.tmp.cleanup()

    def report(self, *argv, expect, env=None):
        p = cli("--json", *argv, env=env)
        self.assertEqual(p.returncode, expect, p.stdout + p.stderr)
        rep = json.loads(p.stdout)
        jsonschema.validate(rep, self.schema)
        self.assertEqual(rep["exit_code"], expect)
        self.assertEqual(rep["ok"], expect == 0)
        return rep["result"]

    def run_nn_le(self, a, b, expect, env=None):
        return self.report("run", "--program", str(self.data / "assert_nn_le.casm"), "--entry-pc", "assert_nn_le",
                           "--args", f"{a},{b}", expect=expect, env=env)

    def test_squash_example_log(self):
        res = self.report("squash-dict", "--log", str(self.data / "paper_example.json"), expect=0)
        rows = [(int(r["key"], 16), int(r["prev"], 16), int(r["next"], 16)) for r in res["squashed"]]
        self.assertEqual(rows, [(0, 2, 5), (5, 4, 4), (7, 3, 0)])
        text = cli("squash-dict", "--log", str(self.data / "paper_example.json"))
        self.assertEqual(text.returncode, 0)
        self.assertIn("0 2 5\n5 4 4\n7 3 0", text.stdout)

    def test_squash_corrupt_hints_never_lie(self):
        reasons = set()
        for seed in range(1, 25):
            p = cli("--json", "squash-dict", "--log", str(self.data / "paper_example.json"),
                    "--corrupt-hints", str(seed))
            rep = json.loads(p.stdout)
            jsonschema.validate(rep, self.schema)
            self.assertIn(p.returncode, (0, 1))
            if p.returncode == 0:
                rows = [(int(r["key"], 16), int(r["next"], 16)) for r in rep["result"]["squashed"]]
                self.assertEqual(rows, [(0, 5), (5, 4), (7, 0)])
            else:
                self.assertEqual(rep["result"]["error"]["kind"], "HintRejected")
                reasons.add(rep["result"]["reason"])
        self.assertTrue(reasons)

    def test_squash_kappa_and_io(self):
        err = self.report("squash-dict", "--log", str(self.data / "paper_example.json"), "--kappa", "6", expect=1)
        self.assertEqual(err["reason"], "kappa bound")
        self.report("squash-dict", "--log", str(self.dir / "missing.json"), expect=2)
        bad = self.dir / "bad.json"
        bad.write_text('[{"key": "0x1"}]')
        self.report("squash-dict", "--log", str(bad), expect=2)

    def test_run_assert_nn_le(self):
        res = self.run_nn_le(3, 5, 0)
        self.assertTrue(res["halted"])
        self.assertEqual(res["returns"], ["0x3ea"])
        err = self.run_nn_le(5, 3, 1)
        self.assertEqual(err["error"]["kind"], "AssertFailed")

    def test_run_trace_dump(self):
        trace = self.dir / "trace.json"
        self.report("run", "--program", str(self.data / "assert_nn_le.casm"), "--entry-pc", "assert_nn",
                    "--args", "7", "--trace", str(trace), expect=0)
        dump = json.loads(trace.read_text())
        self.assertGreater(len(dump["trace"]), 1)
        self.assertEqual(set(dump["trace"][0]), {"pc", "ap", "fp"})
        self.assertIn({"addr": "0x3e8", "value": "0x7"}, dump["writes"])

    def test_small_field_from_env(self):
        field = self.dir / "field.json"
        field.write_text(json.dumps({"modulus": "12289", "rc_bound": "64"}))
        env = {"CAIROVM_FIELD": str(field)}
        self.run_nn_le(3, 63, 0, env=env)
        self.run_nn_le(3, 5, 0, env=env)
        err = self.run_nn_le(70, 80, 1, env=env)
        self.assertEqual(err["error"]["kind"], "AssertFailed")
        self.run_nn_le(70, 80, 0)
        bad = self.dir / "bad_field.json"
        bad.write_text('{"modulus": "12289"}')
        self.assertEqual(cli("run", "--program", str(self.data / "assert_nn_le.casm"), "--entry-pc", "assert_nn",
                             "--args", "1", env={"CAIROVM_FIELD": str(bad)}).returncode, 2)

    def test_assemble_disasm_round_trip(self):
        prog = self.dir / "prog.json"
        self.report("assemble", "--program", str(self.data / "assert_nn_le.casm"), "--out", str(prog), expect=0)
        words = json.loads(prog.read_text())["words"]
        self.assertEqual(len(words), 18)
        self.assertEqual(words[3], "0x208b7fff7fff7ffe")
        text = cli("disasm", "--program", str(prog))
        self.assertEqual(text.returncode, 0)
        casm = self.dir / "round.casm"
        casm.write_text(text.stdout)
        prog2 = self.dir / "prog2.json"
        self.report("assemble", "--program", str(casm), "--out", str(prog2), expect=0)
        self.assertEqual(json.loads(prog2.read_text())["words"], words)

    def test_syntax_error_is_usage(self):
        bad = self.dir / "bad.casm"
        bad.write_text("[ap] = [fp + (-3)] +; ap++\n")
        err = self.report("assemble", "--program", str(bad), "--out", str(self.dir / "x.json"), expect=2)
        self.assertEqual(err["error"]["kind"], "syntax")

    def test_specgen_matches_golden(self):
        out = self.dir / "spec"
        res = self.report("specgen", "--program", str(self.data / "assert_nn_le.casm"), "--out", str(out), expect=0)
        self.assertIn("cfg.json", res["files"])
        golden = Path(ARGS.golden)
        for name in ("assert_nn", "assert_le", "assert_nn_le"):
            f = f"{name}_auto_spec.txt"
            self.assertEqual((out / f).read_text(), (golden / f).read_text(), f)
        cfg = json.loads((out / "cfg.json").read_text())
        self.assertEqual(cfg, json.loads((golden / "assert_nn_le_cfg.json").read_text()))

    def test_ec(self):
        res = self.report("ec", "add", "--curve", "k1", "--point", "G", "--point2", "G", expect=0)
        self.assertTrue(res["oracle_agrees"])
        self.assertEqual((res["result"]["x"], res["result"]["y"]), K1_2G)
        dbl = self.report("ec", "double", "--curve", "k1", "--point", "G", expect=0)
        self.assertEqual(dbl["result"], res["result"])
        mul = self.report("ec", "mul", "--curve", "r1", "--point", "G", "--scalar", "0x10001", expect=0)
        self.assertTrue(mul["oracle_agrees"])
        self.assertTrue(mul["witness_ok"])
        self.report("ec", "add", "--curve", "k1", "--point", "1,1", "--point2", "G", expect=2)

    def test_ecdsa(self):
        res = self.report("ecdsa-selftest", "--cases", "2", "--seed", "5", expect=0)
        self.assertTrue(res)
        err = self.report("ecdsa-recover", "--curve", "k1", "--msg", "1", "--r", "0", "--s", "1", "--v", "0",
                          expect=1)
        self.assertEqual(err["error"]["kind"], "ZeroR")

    def test_stdlib_and_selftest(self):
        res = self.report("stdlib-test", "--samples", "20", expect=0)
        self.assertTrue(all(s["pass"] for s in res["suites"]))
        sel = self.report("selftest", "--only", "1,2,3,4,6", expect=0)
        self.assertEqual([c["id"] for c in sel["criteria"]], [1, 2, 3, 4, 6])

    def test_usage_errors(self):
        self.assertEqual(cli("no-such-command").returncode, 2)
        self.assertEqual(cli().returncode, 2)
        self.assertEqual(cli("run").returncode, 2)
        self.report("run", "--program", str(self.data / "assert_nn_le.casm"), "--entry-pc", "nowhere",
                    expect=2)


def main():
    global ARGS
    ap = argparse.ArgumentParser()
    ap.add_argument("--binary", required=True)
    ap.add_argument("--schema", required=True)
    ap.add_argument("--data", required=True)
    ap.add_argument("--golden", required=True)
    ARGS, rest = ap.parse_known_args()
    unittest.main(argv=[sys.argv[0], *rest], verbosity=2)


if __name__ == "__main__":
    main()

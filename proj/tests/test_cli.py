import json
import math
import os
import subprocess
import sys
import tempfile
import unittest

import jsonschema

CLI = None
SCHEMA = None


def run(*args):
    return subprocess.run([CLI, *args], capture_output=True, text=True)


class Cli(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = self.tmp.name

    def tearDown(self):
        self.tmp.cleanup()

    def out(self, name):
        return os.path.join(self.dir, name)

    def report(self, out):
        with open(os.path.join(out, "report.json")) as f:
            return json.load(f)

    def test_pressure_fs2(self):
        r = run("pressure", "--fixture", "FS2", "--out", self.out("a"))
        self.assertEqual(r.returncode, 0, r.stdout + r.stderr)
        rep = self.report(self.out("a"))
        self.assertAlmostEqual(rep["pressure"]["P_hat"], math.log(2), places=10)
        self.assertEqual(rep["exit_code"], 0)
        self.assertTrue(os.path.exists(os.path.join(self.out("a"), "pressure.csv")))

    def test_stationary_ds3(self):
        r = run("stationary", "--fixture", "DS3", "--out", self.out("s"))
        self.assertEqual(r.returncode, 0, r.stdout + r.stderr)
        self.assertIn("PASS time_reversal", r.stdout)

    def test_stationary_needs_stochastic(self):
        self.assertEqual(run("stationary", "--fixture", "FS2", "--out", self.out("x")).returncode, 2)

    def test_nobip_exits_3(self):
        self.assertEqual(run("check-bip", "--fixture", "NOBIP", "--out", self.out("n")).returncode, 3)
        self.assertEqual(run("all", "--fixture", "NOBIP", "--out", self.out("m")).returncode, 3)
        with open(os.path.join(self.out("n"), "bip_witnesses.csv")) as f:
            self.assertGreater(len(f.read().splitlines()), 1)

    def test_bad_config_exits_2(self):
        self.assertEqual(run("pressure", "--fixture", "NOPE", "--out", self.out("b")).returncode, 2)
        path = self.out("bad.json")
        with open(path, "w") as f:
            json.dump({"fixture": "FS2", "run": {"n_max": -3}}, f)
        self.assertEqual(run("pressure", "--config", path, "--out", self.out("c")).returncode, 2)
        with open(path, "w") as f:
            f.write("{not json")
        self.assertEqual(run("pressure", "--config", path, "--out", self.out("d")).returncode, 2)
        self.assertEqual(run("pressure", "--bogus").returncode, 2)

    def csvs(self, out):
        files = {}
        for n in sorted(os.listdir(out)):
            if n.endswith(".csv"):
                with open(os.path.join(out, n), "rb") as f:
                    files[n] = f.read()
        return files

    def test_outputs_reproducible_across_threads(self):
        for cmd, fx in (("all", "P2"), ("all", "STOCH2")):
            a, b, c = self.out(fx + "1"), self.out(fx + "2"), self.out(fx + "3")
            self.assertEqual(run(cmd, "--fixture", fx, "--out", a).returncode, 0)
            self.assertEqual(run(cmd, "--fixture", fx, "--out", b).returncode, 0)
            self.assertEqual(run(cmd, "--fixture", fx, "--out", c, "--threads", "4").returncode, 0)
            self.assertTrue(self.csvs(a))
            self.assertEqual(self.csvs(a), self.csvs(b))
            self.assertEqual(self.csvs(a), self.csvs(c))
            self.assertEqual(self.report(a)["digest"], self.report(c)["digest"])

    def test_seed_changes_digest(self):
        run("stationary", "--fixture", "STOCH2", "--out", self.out("s1"))
        run("stationary", "--fixture", "STOCH2", "--out", self.out("s2"), "--seed", "99")
        self.assertNotEqual(self.report(self.out("s1"))["digest"], self.report(self.out("s2"))["digest"])

    def test_dumped_configs_validate_and_round_trip(self):
        with open(SCHEMA) as f:
            schema = json.load(f)
        for fx in ("FS2", "FS2-bernoulli", "GM", "GEO", "P2", "DS3", "NOBIP", "STOCH2"):
            out = self.out("cfg_" + fx)
            self.assertIn(run("check-bip", "--fixture", fx, "--out", out).returncode, (0, 3))
            with open(os.path.join(out, "config.json")) as f:
                cfg = json.load(f)
            jsonschema.validate(cfg, schema)
            path = self.out(fx + ".json")
            with open(path, "w") as f:
                json.dump(cfg, f)
            again = self.out("again_" + fx)
            run("check-bip", "--config", path, "--out", again)
            self.assertEqual(self.report(out)["digest"], self.report(again)["digest"], fx)
            with open(os.path.join(again, "config.json")) as f:
                self.assertEqual(json.load(f), cfg)

    def test_schema_rejects_unknown_keys(self):
        with open(SCHEMA) as f:
            schema = json.load(f)
        with self.assertRaises(jsonschema.ValidationError):
            jsonschema.validate({"fixture": "FS2", "colour": 1}, schema)


if __name__ == "__main__":
    CLI, SCHEMA = sys.argv[1], sys.argv[2]
    unittest.main(argv=sys.argv[:1], verbosity=2)

#!/usr/bin/env python3
"""End-to-end runs of the shotintel binary over the fixture corpus.

usage: test_cli.py <shotintel> <fixtures dir> <report schema>
"""
import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

EXE, FIX, SCHEMA = sys.argv[1], Path(sys.argv[2]), Path(sys.argv[3])
failures = []


def run(*args, expect=0):
    p = subprocess.run([EXE, *map(str, args)], capture_output=True, text=True)
    if p.returncode != expect:
        failures.append(f"{' '.join(map(str, args))}: exit {p.returncode}, want {expect}\n{p.stderr[-2000:]}")
    return p


def check(cond, what):
    if not cond:
        failures.append(what)


def out_json(p):
    try:
        return json.loads(p.stdout)
    except json.JSONDecodeError:
        failures.append(f"not JSON: {p.stdout[:200]}")
        return {}


with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    corpus = tmp / "corpus"
    manifest = FIX / "reference_corpus" / "manifest.jsonl"

    s = out_json(run("ingest", "--corpus", corpus, "--manifest", manifest))
    check(s.get("ingested") == 1000, f"first ingest: {s}")
    s = out_json(run("ingest", "--corpus", corpus, "--manifest", manifest))
    check(s.get("ingested") == 0 and s.get("duplicates") == 1000, f"second ingest: {s}")

    cfg = json.loads((FIX / "reference_corpus" / "config.json").read_text())
    cfg["corpus_dir"] = str(corpus)
    cfg["backend"]["fixture_dir"] = str(FIX / "reference_corpus" / "replies")
    cfg["lexicon_paths"] = {k: str(FIX / "reference_corpus" / v) for k, v in cfg["lexicon_paths"].items()}
    cfg["consensus_scores"] = str(FIX / "assessment" / "consensus.csv")
    cfg["output_dir"] = str(tmp / "out")
    config = tmp / "config.json"
    config.write_text(json.dumps(cfg))

    # stages one at a time
    run("parse", "--config", config, expect=3)  # nothing cached yet
    d = out_json(run("describe", "--config", config))
    check(d.get("fresh") == 1000, f"describe: {d}")
    d = out_json(run("describe", "--config", config))
    check(d.get("fresh") == 0, f"describe rerun should be served from cache: {d}")
    p = out_json(run("parse", "--config", config))
    check(p.get("parsed") == 1000, f"parse: {p}")
    e = out_json(run("extract", "--config", config))
    check(e.get("urls", {}).get("total_unique") == 363, f"extract urls: {e.get('urls')}")
    check(e.get("retained_names") == 239, "extract retained names")
    check((tmp / "out" / "urls.csv").exists(), "urls.csv written")
    c = out_json(run("cluster", "--config", config))
    check(c.get("campaigns", 0) >= 3, f"cluster: {c}")
    check((tmp / "out" / "campaigns.json").exists(), "campaigns.json written")
    ev = out_json(run("eval", "--config", config, "--sample",
                      "--coder-a", FIX / "kappa" / "coder_a.csv", "--coder-b", FIX / "kappa" / "coder_b.csv"))
    check(ev.get("sample", {}).get("size") == 106, "eval sample size")
    check(ev.get("failure_breakdown", {}).get("n_cases") == 34, "eval failure breakdown")
    check(len(ev.get("agreement", {}).get("aspects", [])) == 3, "eval agreement aspects")
    run("eval", "--config", config, "--coder-a", FIX / "kappa" / "coder_a.csv", expect=2)

    # full report, schema, and --check
    run("report", "--config", config)
    report_path = tmp / "out" / "report.json"
    report = json.loads(report_path.read_text())
    try:
        jsonschema.validate(report, json.loads(SCHEMA.read_text()))
    except jsonschema.ValidationError as err:
        failures.append(f"report.json does not match schema: {err.message} at {list(err.path)}")
    check(report["urls"]["actionable"] == 337, "report actionable")
    check(report["eval"]["aggregate"]["n_screenshots"] == 106, "report eval")
    for name in ("report.csv", "report.md", "provenance.json"):
        check((tmp / "out" / name).exists(), f"{name} written")

    expected = tmp / "expected.json"
    report["tool_version"] = "0.0.0-other"
    expected.write_text(json.dumps(report))
    run("report", "--config", config, "--format", "json", "--check", expected)
    report["urls"]["total_unique"] += 1
    expected.write_text(json.dumps(report))
    bad = run("report", "--config", config, "--format", "json", "--check", expected, expect=4)
    check("total_unique" in bad.stderr, "check failure names the differing field")

    # flags override the config file
    s = out_json(run("eval", "--config", config, "--sample", "--seed", "6"))
    check(s.get("sample", {}).get("seed") == 6, "--seed override")

    # configuration and stage errors
    run("report", "--config", tmp / "missing.json", expect=2)
    run("describe", "--corpus", tmp / "nowhere", expect=2)
    run("report", expect=2)
    broken = dict(cfg, backend={"kind": "fixture", "fixture_dir": str(tmp)}, cache_dir=str(tmp / "cache2"))
    (tmp / "broken.json").write_text(json.dumps(broken))
    err = run("report", "--config", tmp / "broken.json", expect=3)
    check("BackendUnavailable" in err.stderr, "stage error names its code")
    v = run("--version")
    check(v.stdout.strip() != "", "--version prints something")

if failures:
    for f in failures:
        print("not ok:", f)
    sys.exit(1)
print("ok: cli end to end")

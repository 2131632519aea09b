"""Prints one PASS/FAIL line per acceptance criterion after the test session."""
import re

TITLES = {
    1: "static bimodal field, adaptive vs uniform baseline",
    2: "moving field trend at two s-curve shapes",
    3: "parameter convergence for a field inside the RBF span",
    4: "cosine basis correctness",
    5: "controller contracts",
    6: "estimator algebra",
    7: "determinism, golden file and target normalization",
}
_CRITERIA: dict[int, dict] = {}
_NAME = re.compile(r"test_criterion_(\d+)_(\w+)")


def pytest_runtest_logreport(report):
    m = _NAME.search(report.nodeid)
    if not m or "test_acceptance" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        n = int(m.group(1))
        entry = _CRITERIA.setdefault(n, {"ok": True, "title": TITLES.get(n, m.group(2)), "notes": []})
        entry["ok"] &= report.outcome == "passed"
        entry["notes"] += [str(v) for k, v in report.user_properties if k == "detail"]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        e = _CRITERIA[n]
        line = f"criterion {n} {'PASS' if e['ok'] else 'FAIL'}: {e['title']}"
        if e["notes"]:
            line += " | " + "; ".join(e["notes"])
        terminalreporter.write_line(line)

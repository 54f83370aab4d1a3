"""Prints one PASS/FAIL line per acceptance criterion at the end of the run."""


def pytest_terminal_summary(terminalreporter):
    results: dict[int, list[tuple[str, bool]]] = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            props = dict(getattr(rep, "user_properties", ()))
            if "criterion" not in props or rep.when != "call" and outcome != "error":
                continue
            results.setdefault(props["criterion"], []).append((props.get("title", ""), outcome == "passed"))
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        parts = results[k]
        ok = all(p for _, p in parts)
        failed = [t for t, p in parts if not p]
        line = f"criterion {k}: {'PASS' if ok else 'FAIL'}"
        if failed:
            line += "  (failing: " + "; ".join(failed) + ")"
        terminalreporter.write_line(line)

def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion, after the regular summary."""
    lines = []
    for status in ("passed", "failed"):
        for rep in terminalreporter.stats.get(status, []):
            if rep.when != "call" or "test_acceptance.py::" not in rep.nodeid:
                continue
            props = dict(rep.user_properties)
            if "criterion" in props:
                lines.append((props["criterion"], "PASS" if status == "passed" else "FAIL", props.get("detail", "")))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for n, status, detail in sorted(lines):
        terminalreporter.write_line(f"criterion {n:2d}: {status}" + (f"  ({detail})" if detail else ""))

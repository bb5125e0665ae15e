def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[k].line())
    passed = sum(r.ok for r in RESULTS.values())
    terminalreporter.write_line(f"{passed}/{len(RESULTS)} criteria pass")

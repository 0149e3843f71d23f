def pytest_terminal_summary(terminalreporter, exitstatus, config):
    try:
        import _acceptance_report
    except ImportError:
        return
    if _acceptance_report.LINES:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_report.LINES:
            terminalreporter.write_line(line)

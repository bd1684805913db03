# (criterion number, report line), filled by test_acceptance
ACCEPTANCE_LINES = []


def bisect(f, target, lo, hi, iters=200):
    """Plain bisection for an increasing ``f``; independent of any library root finder."""
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if f(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)

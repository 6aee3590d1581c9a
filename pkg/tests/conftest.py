def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, part): acceptance criterion n, named part")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            n, part = mark.args
            item.user_properties += [("criterion", n), ("part", part)]


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion (all of its parts must pass)."""
    parts: dict[int, list] = {}
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            if getattr(rep, "when", "call") not in ("call", "setup"):
                continue
            props = dict(getattr(rep, "user_properties", ()))
            if "criterion" not in props:
                continue
            if rep.when == "setup" and rep.passed:
                continue
            parts.setdefault(props["criterion"], []).append((props.get("part", rep.nodeid), rep.passed))
    if not parts:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(parts):
        ok = all(p for _, p in parts[n])
        failed = [name for name, p in parts[n] if not p]
        detail = f"  (failed: {', '.join(failed)})" if failed else ""
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}{detail}")

"""Collects one verdict line per acceptance criterion for the end-of-run summary."""

LINES: list[str] = []


def verdict(label: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
    LINES.append(line)
    print(line)
    assert ok, line

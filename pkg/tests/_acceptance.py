"""Collects the PASS/FAIL lines printed by the acceptance suite."""

LINES: list[str] = []


def report(k: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}"
    LINES.append(line)
    print(line, flush=True)

"""Collects per-criterion check results for the end-of-run summary."""

from collections import defaultdict

# criterion -> stated time budget in seconds (None when none is stated)
BUDGETS = {"1": 1, "2": 60, "3": 600, "4": 60, "5": 900, "6": 1800, "7": 2700, "8": None, "9": 600, "10": None}

CHECKS: dict[str, list[tuple[bool, str]]] = defaultdict(list)
SECONDS: dict[str, float] = defaultdict(float)
NOTES: dict[str, str] = {}


def record(criterion: str, ok: bool, label: str, seconds: float = 0.0) -> None:
    CHECKS[criterion].append((bool(ok), label))
    SECONDS[criterion] += seconds


def summary_lines() -> list[str]:
    lines = []
    for crit in sorted(set(CHECKS) | set(NOTES), key=int):
        if crit in NOTES and crit not in CHECKS:
            lines.append(f"criterion {crit}: NOT RUN  {NOTES[crit]}")
            continue
        checks = CHECKS[crit]
        failed = [label for ok, label in checks if not ok]
        budget = BUDGETS.get(crit)
        spent = SECONDS[crit]
        over_budget = budget is not None and spent > budget
        status = "PASS" if not failed and not over_budget else "FAIL"
        detail = f"{len(checks) - len(failed)}/{len(checks)} checks, {spent:.1f}s"
        if budget is not None:
            detail += f" (budget {budget}s)"
        if failed:
            shown = "; ".join(failed[:6]) + (" ..." if len(failed) > 6 else "")
            detail += f"; failed: {shown}"
        lines.append(f"criterion {crit}: {status}  {detail}")
    return lines

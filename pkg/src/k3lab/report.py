from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field

PASS, FAIL, SKIP = "pass", "fail", "skip"


@dataclass
class CheckReport:
    check_id: str
    status: str
    details: str = ""
    exact: bool = True
    elapsed_ms: float = 0.0
    data: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in (PASS, FAIL, SKIP):
            raise ValueError(f"bad status {self.status!r}")
        if self.status == PASS and self.details.startswith("FAIL"):
            raise ValueError("a passing check cannot carry failure detail")

    @property
    def ok(self) -> bool:
        return self.status != FAIL

    def to_dict(self, timings: bool = True) -> dict:
        d = asdict(self)
        if not timings:
            d.pop("elapsed_ms")
        return d


def check(check_id: str, ok: bool, details: str = "", *, exact: bool = True, **data) -> CheckReport:
    status = PASS if ok else FAIL
    if not ok and not details.startswith("FAIL"):
        details = "FAIL: " + details if details else "FAIL"
    return CheckReport(check_id, status, details, exact, 0.0, data)


@contextmanager
def timed(out: list):
    """Stamp elapsed time onto every report appended to ``out`` inside the block."""
    start = len(out)
    t0 = time.perf_counter()
    yield
    ms = (time.perf_counter() - t0) * 1000.0
    for r in out[start:]:
        r.elapsed_ms = ms


def dumps(suite: str, seed: int, reports: list[CheckReport], timings: bool = False) -> str:
    payload = {
        "suite": suite,
        "seed": seed,
        "checks": [r.to_dict(timings) for r in sorted(reports, key=lambda r: r.check_id)],
    }
    return json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n"

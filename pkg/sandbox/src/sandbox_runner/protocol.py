"""Line-delimited JSON protocol over stdin/stdout.

Request (one JSON object per line)::

    {"program": str, "tests": [str, ...], "entry_point": str,
     "mode": "tests" | "entry", "input": str?, "timeout_s": number?}

Response (one JSON object per line)::

    {"per_test": [{"test_index": int, "status": "Pass" | "AssertionError"
                   | "RuntimeError" | "Timeout", "message": str}],
     "wall_ms": int, "value": str?}

``mode: "tests"`` runs each entry of ``tests`` as one unit (an omitted
or empty list means: split ``program``'s suite is the caller's job, so a
single empty report is returned).  ``mode: "entry"`` calls
``entry_point`` on the literal arguments in ``input`` and reports the
result as a one-element ``per_test`` plus a rendered ``value``.
"""

from __future__ import annotations

import json
import sys
import time

from sandbox_runner.runner import DEFAULT_TIMEOUT_S, TestReport, run_entry, run_tests


def handle_request(request: dict) -> dict:
    timeout_s = float(request.get("timeout_s", DEFAULT_TIMEOUT_S))
    mode = request.get("mode", "tests")
    if mode == "entry":
        started = time.monotonic()
        result = run_entry(
            request["program"],
            request["entry_point"],
            request.get("input", ""),
            timeout_s,
        )
        response = TestReport(wall_ms=int((time.monotonic() - started) * 1000)).to_json()
        response["per_test"] = [
            {
                "test_index": 0,
                "status": result["status"],
                "message": result.get("message", ""),
            }
        ]
        if "value" in result:
            response["value"] = result["value"]
        return response
    if mode == "tests":
        report = run_tests(
            request["program"],
            list(request.get("tests", [])),
            request.get("entry_point"),
            timeout_s,
        )
        return report.to_json()
    raise ValueError(f"unknown mode: {mode!r}")


def main() -> None:
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        try:
            response = handle_request(json.loads(line))
        except Exception as exc:  # noqa: BLE001 - protocol must keep serving
            response = {
                "per_test": [
                    {
                        "test_index": 0,
                        "status": "RuntimeError",
                        "message": f"bad request: {exc}",
                    }
                ],
                "wall_ms": 0,
            }
        sys.stdout.write(json.dumps(response, sort_keys=True) + "\n")
        sys.stdout.flush()


if __name__ == "__main__":
    main()

"""Worker process entry point.

Reads one JSON job from stdin, locks the process down (memory cap, no
network, no child processes, fixed PRNG seed), executes the job, and
writes one JSON result to stdout.  The parent owns the wall clock: on
timeout it kills this process's whole group.
"""

from __future__ import annotations

import ast
import json
import sys

MEMORY_LIMIT_BYTES = 2 * 1024**3


def _lock_down() -> None:
    import random
    import socket

    try:
        import resource

        resource.setrlimit(resource.RLIMIT_AS, (MEMORY_LIMIT_BYTES, MEMORY_LIMIT_BYTES))
    except (ImportError, ValueError, OSError):
        pass
    try:
        import resource

        resource.setrlimit(resource.RLIMIT_NPROC, (0, 0))
    except (ImportError, ValueError, OSError):
        pass

    def _no_network(*args, **kwargs):
        raise OSError("network access is disabled in the sandbox")

    socket.socket = _no_network  # type: ignore[misc]
    socket.create_connection = _no_network  # type: ignore[assignment]
    random.seed(0)


def _failure(exc: BaseException) -> dict:
    if isinstance(exc, AssertionError):
        status = "AssertionError"
        message = str(exc) or "assertion failed"
    else:
        status = "RuntimeError"
        message = f"{type(exc).__name__}: {exc}"
    return {"status": status, "message": message}


def _run_unit(job: dict) -> dict:
    namespace: dict = {"__name__": "__sandbox__"}
    try:
        exec(job["program"], namespace)
        entry = job.get("entry_point")
        if entry:
            if entry not in namespace:
                raise NameError(f"entry point {entry!r} not defined")
            namespace["candidate"] = namespace[entry]
        exec(job["code"], namespace)
    except BaseException as exc:  # noqa: BLE001 - statuses cover everything
        return _failure(exc)
    return {"status": "Pass", "message": ""}


def _run_entry(job: dict) -> dict:
    namespace: dict = {"__name__": "__sandbox__"}
    try:
        args = ast.literal_eval(f"({job.get('input', '')},)") if job.get("input") else ()
    except (ValueError, SyntaxError) as exc:
        return {"status": "RuntimeError", "message": f"bad input literal: {exc}"}
    try:
        exec(job["program"], namespace)
        entry = job["entry_point"]
        if entry not in namespace:
            raise NameError(f"entry point {entry!r} not defined")
        value = namespace[entry](*args)
    except BaseException as exc:  # noqa: BLE001
        return _failure(exc)
    return {"status": "Pass", "message": "", "value": repr(value)}


def main() -> None:
    job = json.loads(sys.stdin.read())
    _lock_down()
    if job.get("mode") == "entry":
        result = _run_entry(job)
    else:
        result = _run_unit(job)
    json.dump(result, sys.stdout)
    sys.stdout.flush()


if __name__ == "__main__":
    main()

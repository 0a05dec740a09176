import os
from time import perf_counter, time_ns, strftime

def datetime_now() -> str:
    return strftime("%Y-%m-%d %H:%M:%S") + f".{(time_ns()//1000) % 1000000:06d}"

def env_int(name: str, default: int) -> int:
    """
    Reads a positive integer from the environment, falling back to `default`
    when the variable is unset, empty or not a positive integer.
    """
    raw = os.getenv(name, "").strip()
    if raw.isdigit() and int(raw) > 0:
        return int(raw)
    return default

class Stopwatch:
    """Wall-time in seconds since construction."""

    def __init__(self) -> None:
        self.start = perf_counter()

    @property
    def elapsed(self) -> float:
        return perf_counter() - self.start

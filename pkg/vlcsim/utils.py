"""Helper methods shared across vlcsim."""
import math
from typing import Callable, List, TypeVar

CALLABLE_T = TypeVar("CALLABLE_T", bound=Callable)  # noqa pylint: disable=invalid-name


def format_float(value: float) -> str:
    """Return the shortest decimal string that round-trips to value."""
    return repr(float(value))


def parse_float_list(text: str) -> List[float]:
    """Parse a comma separated list of finite numbers."""
    values = [float(part) for part in text.split(",") if part.strip()]
    if not values or not all(math.isfinite(value) for value in values):
        raise ValueError(f"Expected a comma separated list of numbers, got {text!r}")
    return values


def is_power_of_two(value: int) -> bool:
    """Return True if value is a positive integral power of two."""
    return isinstance(value, int) and value > 0 and value & (value - 1) == 0


class Registry(dict):
    """Registry of items."""

    def register(self, name: str) -> Callable[[CALLABLE_T], CALLABLE_T]:
        """Return decorator to register item with a specific name."""

        def decorator(func: CALLABLE_T) -> CALLABLE_T:
            """Register decorated function."""
            self[name] = func
            return func

        return decorator

"""Exception types shared across the package.

The CLI maps these onto process exit codes: ConfigError -> 1,
ConvergenceError -> 2, InstabilityError -> 3.
"""


class ConfigError(Exception):
    """Malformed or inconsistent user input (config file, CSV, flags)."""


class ConvergenceError(Exception):
    """A numerical routine failed to converge within its iteration budget."""


class InstabilityError(Exception):
    """Physically unstable operating point (e.g. parametric gain above
    threshold, singular response at the evaluation frequency)."""

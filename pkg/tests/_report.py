"""Pass/fail lines collected by the acceptance module, printed at session end."""

LINES: list[str] = []

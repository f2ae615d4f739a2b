"""Command-line front ends.

Exit status is 0 on success, 1 for usage errors and 2 for runtime errors.
"""

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2

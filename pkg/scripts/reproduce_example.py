"""Re-run the sextic worked example and the Q table checks, printing PASS/FAIL lines."""

import sys

from kloc.cli import main

if __name__ == "__main__":
    codes = [main(["reproduce", "example-4-3"])]
    for p in (3, 5, 7, 37):
        codes.append(main(["reproduce", "example-Q", "--p", str(p)]))
    sys.exit(max(codes))

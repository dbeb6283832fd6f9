import sys

from blowup_reduction.cli_harness.cli import main

sys.exit(main())

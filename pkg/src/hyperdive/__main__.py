"""Run the command-line interface via ``python -m hyperdive``."""

import sys

from .cli import main

sys.exit(main())

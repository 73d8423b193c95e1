"""Allow ``python -m piggyback_mds``."""

import sys

from .cli import main

sys.exit(main())

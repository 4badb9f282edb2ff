"""Allow ``python3 -m ssdfolio``."""

import sys

from .cli import main

sys.exit(main())

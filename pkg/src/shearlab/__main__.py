"""Permet `python -m shearlab`"""

import sys

from .cli import main

sys.exit(main())

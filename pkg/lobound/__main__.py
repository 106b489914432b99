import sys

from lobound.cli import main

sys.exit(main())

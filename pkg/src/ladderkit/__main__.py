import sys

from ladderkit.cli import main

sys.exit(main())

import sys

from treepen.cli import main

sys.exit(main())

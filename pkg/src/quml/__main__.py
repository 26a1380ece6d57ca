import sys

from quml.cli import main

sys.exit(main())

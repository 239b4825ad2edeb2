import sys

from turbodpsk.cli import main

sys.exit(main())

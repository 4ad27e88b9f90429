import sys

from coinrec.cli import main

sys.exit(main())

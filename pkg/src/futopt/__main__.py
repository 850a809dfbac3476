import sys

from futopt.cli import main

sys.exit(main())

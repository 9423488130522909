import sys

from tclplus.cli import main

sys.exit(main())

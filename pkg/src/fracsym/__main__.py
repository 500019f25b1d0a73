import sys

from fracsym.cli.app import main

sys.exit(main())

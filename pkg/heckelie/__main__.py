import sys

from heckelie.cli import main

sys.exit(main())

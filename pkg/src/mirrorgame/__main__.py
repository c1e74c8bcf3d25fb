import sys

from mirrorgame.cli import main

sys.exit(main())

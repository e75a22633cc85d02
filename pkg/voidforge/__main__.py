import sys

from voidforge.dataset.cli import main

sys.exit(main())

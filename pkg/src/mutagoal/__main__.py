import sys

from mutagoal.cli import main

sys.exit(main())

import sys

from oneplanar.cli import main

sys.exit(main())

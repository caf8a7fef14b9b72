import sys

from punkt.service.cli import main

if __name__ == "__main__":
    sys.exit(main())

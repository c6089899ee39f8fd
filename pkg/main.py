#!/usr/bin/env python3

import sys

from weylbounds.cli import main

#main file
if __name__ == "__main__":
    sys.exit(main())

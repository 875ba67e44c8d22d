#!/usr/bin/env python3

"""
Main tool to run the reclab experiments
"""

# This script only contains a call to the main function
# It must remain unchanged to be equivalent to the entry point defined in pyproject.toml

from reclab.scripting import main  # pylint: disable=import-error

if __name__ == '__main__':
    main()

#!/usr/bin/env python3
"""capwave-paths entry point."""

# Import the main function from the package's cli module
from capwave_core.cli import main

if __name__ == "__main__":
    # Execute the main function, allowing it to handle sys.exit
    main()

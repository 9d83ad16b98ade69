#!/usr/bin/env python3
"""
Entry point for the UAV swarm simulator
Fixes import paths and hands over to the CLI
"""

import sys
from pathlib import Path

# Add project root to Python path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

# Now we can import
from scripts.cli import main as cli_main


def main():
    """Main entry point."""
    try:
        sys.exit(cli_main())
    except KeyboardInterrupt:
        print("\n🛑 Interrupted")
        sys.exit(130)
    except Exception as e:
        print(f"❌ Fatal error: {e}")
        sys.exit(1)


if __name__ == "__main__":
    main()

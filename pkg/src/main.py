import sys

from cli import run

if __name__ == "__main__":
    """
    Run the hybis command line.
    """
    sys.exit(run(sys.argv[1:]))

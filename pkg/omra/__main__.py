"""Entry point: python -m omra"""
from omra.cli.main import main

if __name__ == "__main__":
    main()

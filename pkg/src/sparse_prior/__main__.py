"""Module entry point: ``python -m sparse_prior`` behaves like the CLI."""

from .cli import entry

if __name__ == "__main__":
    entry()

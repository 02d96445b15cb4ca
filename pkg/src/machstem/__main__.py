"""
Main entry point for the machstem command line.
"""

from machstem.cli.commands import cli


def main() -> None:
    """Run the machstem command line."""
    cli(prog_name="machstem")


if __name__ == "__main__":
    main()

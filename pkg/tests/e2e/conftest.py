"""
E2E test configuration for the machstem command line.
"""

import logging
from typing import Callable, Iterator

import pytest
from click.testing import CliRunner, Result

from machstem.cli.commands import cli
from machstem.utils.logging import PACKAGE_LOGGER


@pytest.fixture(autouse=True)
def detached_logging() -> Iterator[None]:
    """Drop the handler the CLI installs; it points at the runner's captured stream."""
    logger = logging.getLogger(PACKAGE_LOGGER)
    level = logger.level
    yield
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    logger.setLevel(level)
    logger.propagate = True


@pytest.fixture
def invoke() -> Callable[..., Result]:
    """Run the CLI quietly with separate stdout and stderr."""
    runner = CliRunner(mix_stderr=False)

    def _invoke(*args: str) -> Result:
        return runner.invoke(cli, ["--log-level", "ERROR", *args], catch_exceptions=False)

    return _invoke


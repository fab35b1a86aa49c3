"""
Tests for the logging setup
"""

import logging

from qpg.log import get_logger


def test_get_logger_leaves_root_logger_alone():
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    get_logger("qpg.untouched").warning("untouched.event", value=1)
    assert root.handlers == handlers
    assert root.level == level


def test_events_reach_stdlib_handlers(caplog):
    caplog.set_level(logging.INFO, logger="qpg.sample")
    get_logger("qpg.sample").info("sample.event", runs=3)
    assert "sample.event" in caplog.text
    assert "runs=3" in caplog.text
    get_logger("qpg.sample").debug("hidden.event")
    assert "hidden.event" not in caplog.text

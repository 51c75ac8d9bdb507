import structlog
import logging
import sys
import os
from datetime import datetime
from pathlib import Path
from typing import Optional


def setup_logging(log_level: Optional[str] = None, log_dir: Optional[str] = None):

    log_level = log_level or os.getenv("ONEPLANAR_LOG_LEVEL", "WARNING")
    log_dir = log_dir or os.getenv("ONEPLANAR_LOG_DIR")

    # stdout belongs to reports, so logs go to a dated file or to stderr
    if log_dir:
        log_path = Path(log_dir)
        if not os.path.exists(log_path):
            os.makedirs(log_path)
        today = datetime.now().strftime("%Y-%m-%d")
        handler: logging.Handler = logging.FileHandler(log_path / f"oneplanar_{today}.log")
    else:
        handler = logging.StreamHandler(sys.stderr)

    logging.basicConfig(
        format="%(message)s",
        handlers=[handler],
        level=getattr(logging, log_level.upper()),
        force=True,
    )

    structlog.configure(
        processors=[
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.JSONRenderer(),
        ],
        logger_factory=structlog.stdlib.LoggerFactory(),
    )

    return structlog.get_logger()


# Create global logger
logger = setup_logging()

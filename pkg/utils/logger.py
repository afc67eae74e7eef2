# utils/logger.py
import logging
import os
from datetime import datetime

COMPONENT_LOGGERS = (
    'sphere_math', 'support_field', 'graph_surface', 'scan_service', 'certify',
    'projection_index', 'mesh_generation', 'report_export', 'verification', 'commands',
)


def setup_logging(log_dir="logs", level="INFO"):
    """Setup file and console logging for the hhk command line"""

    os.makedirs(log_dir, exist_ok=True)

    # One file per run
    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    log_file = os.path.join(log_dir, f"hhk_{timestamp}.log")

    file_formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )
    console_formatter = logging.Formatter(
        '%(levelname)s - %(message)s'
    )

    file_handler = logging.FileHandler(log_file, encoding='utf-8')
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(file_formatter)

    console_handler = logging.StreamHandler()
    console_handler.setLevel(getattr(logging, str(level).upper(), logging.INFO))
    console_handler.setFormatter(console_formatter)

    root_logger = logging.getLogger()
    root_logger.setLevel(logging.DEBUG)
    # Repeated setup (tests, nested invocations) must not stack handlers
    for handler in list(root_logger.handlers):
        if getattr(handler, '_hhk_handler', False):
            root_logger.removeHandler(handler)
            handler.close()
    file_handler._hhk_handler = True
    console_handler._hhk_handler = True
    root_logger.addHandler(file_handler)
    root_logger.addHandler(console_handler)

    for name in COMPONENT_LOGGERS:
        logging.getLogger(name).setLevel(logging.DEBUG)

    return log_file

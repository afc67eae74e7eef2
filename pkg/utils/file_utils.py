import os
import logging
from datetime import datetime

from config import Config
from app.exceptions import OutputError

logger = logging.getLogger('file_utils')


def get_file_extension(filename):
    """Extracts the file extension from a filename."""
    return os.path.splitext(filename)[1].lstrip('.').lower()


def ensure_results_dir(results_folder=None):
    """Creates the results directory if needed and returns it"""
    folder = results_folder or Config.RESULTS_FOLDER
    try:
        os.makedirs(folder, exist_ok=True)
    except OSError as e:
        logger.error(f"Could not create results directory {folder}: {e}")
        raise OutputError(f"Could not create {folder}: {e}", path=str(folder)) from e
    return folder


def resolve_output_path(output, subcommand, fmt, results_folder=None):
    """Uses the given output path or builds a timestamped one under the results folder"""
    if output:
        parent = os.path.dirname(os.path.abspath(output))
        ensure_results_dir(parent)
        return output
    folder = ensure_results_dir(results_folder)
    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    path = os.path.join(folder, f"{subcommand}_{timestamp}.{fmt}")
    logger.debug(f"Resolved output path: {path}")
    return path


def cleanup_file(file_path):
    """Removes a partially written output file"""
    try:
        if file_path and os.path.exists(file_path):
            os.remove(file_path)
            logger.info(f"Cleaned up file: {file_path}")
    except Exception as e:
        logger.error(f"Error cleaning up file {file_path}: {e}")

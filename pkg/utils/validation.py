import logging
import os
from fractions import Fraction

from utils.file_utils import get_file_extension

logger = logging.getLogger('validation')


def validate_count(value_str, min_val=1, max_val=None, name="count"):
    """Validates an integer parameter such as a grid resolution or box budget"""
    try:
        value = int(value_str)
    except (TypeError, ValueError):
        logger.error(f"Invalid {name} format: {value_str}")
        return None, f"Invalid {name}: {value_str!r}"
    if value < min_val or (max_val is not None and value > max_val):
        logger.error(f"Invalid {name}: {value}")
        if max_val is None:
            return None, f"{name} must be at least {min_val}"
        return None, f"{name} must be between {min_val} and {max_val}"
    return value, None


def validate_t(t_str):
    """Parses the surface parameter t.

    Accepts a decimal ("0.083333") or an exact ratio ("1/12"). Returns the
    exact ``Fraction`` so certification can enclose it rigorously.
    """
    text = str(t_str).strip()
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        logger.error(f"Invalid t literal: {t_str}")
        return None, f"Invalid t: {t_str!r} (expected a decimal or a ratio such as 1/12)"
    if value < 0:
        logger.error(f"Negative t: {t_str}")
        return None, "t must be nonnegative"
    return value, None


def validate_margin(margin_str, allow_zero=False):
    """Validates a domain margin in [0, 1) or (0, 1)"""
    try:
        margin = float(margin_str)
    except (TypeError, ValueError):
        logger.error(f"Invalid margin format: {margin_str}")
        return None, f"Invalid margin: {margin_str!r}"
    lower_ok = margin >= 0.0 if allow_zero else margin > 0.0
    if not lower_ok or margin >= 1.0:
        logger.error(f"Margin out of range: {margin}")
        bracket = "[0, 1)" if allow_zero else "(0, 1)"
        return None, f"margin must lie in {bracket}"
    return margin, None


def validate_choice(choice, available, name="option"):
    """Validates a value against a set of allowed names"""
    if not choice or choice not in available:
        logger.error(f"Invalid {name} selection: {choice}")
        return None, f"Invalid {name}: {choice!r}. Allowed values are: {', '.join(sorted(available))}"
    return choice, None


def validate_format(fmt, allowed_formats):
    return validate_choice(str(fmt).lower() if fmt else fmt, allowed_formats, name="format")


def validate_vector(text, dim):
    """Parses 'a,b,c' into a list of floats of the given dimension"""
    try:
        values = [float(part) for part in str(text).split(',')]
    except ValueError:
        logger.error(f"Invalid vector: {text}")
        return None, f"Invalid vector: {text!r}"
    if len(values) != dim:
        logger.error(f"Vector {text} has {len(values)} components, expected {dim}")
        return None, f"Expected {dim} comma-separated components, got {len(values)}"
    return values, None


def validate_output_path(path, allowed_extensions):
    """
    Validates an output path: extension check and writable parent directory.
    Returns error message string or None if valid.
    """
    if not path:
        logger.warning("Output path missing.")
        return "No output path given."

    filename = os.path.basename(path)
    file_ext = get_file_extension(filename)
    if not file_ext:
        logger.warning(f"Output {filename} missing extension.")
        return "Invalid output path: missing file extension."

    if file_ext not in allowed_extensions:
        error_msg = f"Invalid output type ({file_ext}). Allowed types are: {', '.join(sorted(allowed_extensions))}"
        logger.warning(f"Output extension check failed: {error_msg}")
        return error_msg

    parent = os.path.dirname(os.path.abspath(path))
    if os.path.exists(parent) and not os.access(parent, os.W_OK):
        logger.warning(f"Output directory not writable: {parent}")
        return f"Output directory is not writable: {parent}"

    return None

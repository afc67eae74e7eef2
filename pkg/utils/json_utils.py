import json
import logging
import math

import numpy as np
from pydantic import BaseModel

from app.exceptions import OutputError

logger = logging.getLogger('json_utils')

# JSON has no literal for these; readers get them back through float("inf") and friends
NONFINITE_TEXT = {math.inf: 'inf', -math.inf: '-inf'}


def _portable(value):
    """Copy of a dumped document with non-finite floats as the strings 'inf', '-inf' and 'nan'."""
    if isinstance(value, float) and not math.isfinite(value):
        return NONFINITE_TEXT.get(value, 'nan')
    if isinstance(value, dict):
        return {key: _portable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_portable(item) for item in value]
    return value


def _numpy_default(value):
    if isinstance(value, np.generic):
        return _portable(value.item())
    if isinstance(value, np.ndarray):
        return _portable(value.tolist())
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def to_json_text(document):
    """Serialize a pydantic model or plain mapping; key order is preserved."""
    if isinstance(document, BaseModel):
        document = document.model_dump()
    return json.dumps(_portable(document), indent=2, ensure_ascii=False, allow_nan=False, default=_numpy_default)


def write_json(document, path):
    """Write a JSON document as UTF-8, raising OutputError on IO failure."""
    text = to_json_text(document)
    try:
        with open(path, 'w', encoding='utf-8', newline='\n') as handle:
            handle.write(text)
            handle.write('\n')
    except OSError as e:
        logger.error(f"Could not write JSON to {path}: {e}")
        raise OutputError(f"Could not write {path}: {e}", path=str(path)) from e
    logger.debug(f"Wrote JSON document to {path}")
    return path


def read_json(path, model=None):
    """Read a JSON document, optionally validating it into a pydantic model."""
    try:
        with open(path, 'r', encoding='utf-8') as handle:
            text = handle.read()
    except OSError as e:
        logger.error(f"Could not read JSON from {path}: {e}")
        raise OutputError(f"Could not read {path}: {e}", path=str(path)) from e
    if model is not None:
        return model.model_validate_json(text)
    return json.loads(text)

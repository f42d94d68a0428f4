"""Utility functions for file input/output"""

import json
import math
from enum import Enum, auto

import numpy as np
import pandas as pd

SCHEMA_VERSION = 1
FLOAT_FORMAT = '%.17g'


class FileTypes(Enum):
    """Enumeration of file types"""
    UNKNOWN = auto()
    CSV = auto()
    JSON = auto()


def detect_data_file_type(filename):
    """Try and detect the format of a given output file

    Returns
    -------
    Instance of FileTypes Enum
    """
    with open(filename, 'r') as f:
        line = f.readline().lstrip()
    if line.startswith('{'):
        return FileTypes.JSON
    elif ',' in line:
        return FileTypes.CSV
    else:
        return FileTypes.UNKNOWN


def read_csv_file(filename):
    """Read a CSV file previously created by mems-field"""
    return pd.read_csv(filename, float_precision='round_trip')


def write_csv_file(df, filename):
    """Write a DataFrame to csv with round-trip float precision

    Parameters
    ----------
    df : DataFrame
    filename : str
    """
    df.to_csv(filename, index=False, float_format=FLOAT_FORMAT)


def to_plain(value):
    """Convert numpy scalars, arrays, enums and non-finite floats for JSON"""
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_plain(v) for v in value.tolist()]
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if math.isnan(value):
            return None
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return value
    return value


def json_text(record):
    """Serialize a summary record with a top-level schema field and sorted keys"""
    payload = {'schema': SCHEMA_VERSION}
    payload.update(to_plain(record))
    return json.dumps(payload, indent=2, sort_keys=True) + '\n'


def write_json_file(record, filename):
    """Write a summary record as JSON

    Parameters
    ----------
    record : dict
    filename : str
    """
    with open(filename, 'w') as f:
        f.write(json_text(record))


def read_json_file(filename):
    with open(filename, 'r') as f:
        return json.load(f)


def read_data_file(filename):
    """Detect file format and read an output file

    Supports the CSV and JSON files written by mems-field

    Parameters
    ----------
    filename : str
    """
    filetype = detect_data_file_type(filename)

    if filetype == FileTypes.CSV:
        return read_csv_file(filename)
    elif filetype == FileTypes.JSON:
        return read_json_file(filename)
    else:
        raise ValueError('unrecognized file type')

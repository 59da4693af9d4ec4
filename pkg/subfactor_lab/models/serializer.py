from dataclasses import fields, is_dataclass
from fractions import Fraction
import json

import numpy as np


def to_jsonable(value):
    """Convert numpy, complex and Fraction values into JSON-safe Python values."""
    if isinstance(value, SerializerMixin):
        return value.to_dict()
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (complex, np.complexfloating)):
        if value.imag == 0:
            return float(value.real)
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


class SerializerMixin:
    """
    Mixin class to add serialization capabilities to dataclasses.

    This mixin provides methods to convert an instance to dictionary and JSON formats,
    with support for customizing the output by excluding specific fields or including
    derived properties.

    Usage:
        @dataclass
        class MarkovData(SerializerMixin):
            norm_sq: float
            tau: float

            # Then you can use:
            data = markov_data(inclusion)
            data_dict = data.to_dict()  # Converts to dictionary
            data_json = data.to_json()  # Converts to JSON string

            # Exclude bulky fields:
            summary = data.to_dict(exclude=['t_vec'])

            # Include properties (if defined on the class):
            with_status = report.to_dict(include=['passed'])
    """

    def to_dict(self, exclude=None, include=None):
        """
        Convert instance to dictionary.

        Args:
            exclude (list): List of field names to exclude from output
            include (list): List of property names to include in output

        Returns:
            dict: Dictionary representation of the instance
        """
        if exclude is None:
            exclude = []

        if include is None:
            include = []

        result = {}

        # Add all dataclass fields
        for field in fields(self):
            if field.name not in exclude:
                result[field.name] = to_jsonable(getattr(self, field.name))

        # Add requested properties
        for name in include:
            if hasattr(self, name) and name not in exclude:
                result[name] = to_jsonable(getattr(self, name))

        return result

    def to_json(self, exclude=None, include=None, indent=None):
        """
        Convert instance to JSON string.

        Args:
            exclude (list): List of field names to exclude from output
            include (list): List of property names to include in output
            indent (int): Indentation passed to json.dumps

        Returns:
            str: JSON string representation of the instance
        """
        return json.dumps(self.to_dict(exclude=exclude, include=include), indent=indent)

    @classmethod
    def from_dict(cls, data):
        """
        Create a new instance from a dictionary.

        Args:
            data (dict): Dictionary with field data; unknown keys are ignored

        Returns:
            object: New instance of the class
        """
        if not is_dataclass(cls):
            raise TypeError(f"{cls.__name__} is not a dataclass")
        names = {field.name for field in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in names})

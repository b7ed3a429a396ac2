"""
Unit tests for utility functions.
"""

import math

import numpy as np
import pytest

from utils import (
    CFLViolationError,
    CSVFormatError,
    FieldValueError,
    ManifestError,
    WindowError,
    canonical_json,
    config_hash,
    finite_or_none,
    read_json,
    validate_alpha,
    validate_gamma,
    validate_positive,
    write_json,
)


class TestValidationFunctions:
    """Test exponent and parameter validators."""

    def test_validate_alpha_valid(self):
        """Test admissible blow-up exponents."""
        for alpha in (-2.0, -1e-3, 0.5, 0.999):
            assert validate_alpha(alpha) == alpha

    def test_validate_alpha_invalid(self):
        """Test zero, too large and non-finite exponents."""
        invalid = [
            0.0,        # not a blow-up exponent
            1.0,        # must be < 1
            3.0,
            math.nan,
            math.inf,
        ]

        for alpha in invalid:
            with pytest.raises(ValueError):
                validate_alpha(alpha)

    def test_validate_alpha_positive_only(self):
        """Test the velocity blow-up restriction."""
        with pytest.raises(ValueError, match="\\(0, 1\\)"):
            validate_alpha(-0.5, allow_negative=False)
        assert validate_alpha(0.5, allow_negative=False) == 0.5

    def test_validate_gamma(self):
        """Test the open unit interval for Hölder exponents."""
        assert validate_gamma(0.5) == 0.5
        for gamma in (0.0, 1.0, -0.1):
            with pytest.raises(ValueError, match="Hölder"):
                validate_gamma(gamma)

    def test_validate_positive(self):
        """Test strictly positive finite values."""
        assert validate_positive("dt", 1e-3) == 1e-3
        for value in (0.0, -1.0, math.inf):
            with pytest.raises(ValueError, match="dt"):
                validate_positive("dt", value)


class TestErrors:
    """Test error messages and attached context."""

    def test_field_value_error_names_node(self):
        """Test that the node and value appear in the message."""
        err = FieldValueError("weight is not positive", node=(3, 4), value=-1.0)
        assert err.node == (3, 4)
        assert "(3, 4)" in str(err)
        assert "-1.0" in str(err)

    def test_csv_error_location(self):
        """Test path:line prefixes."""
        assert str(CSVFormatError("bad", "f.csv", 7)) == "f.csv:7: bad"
        assert str(CSVFormatError("bad", line=2)) == "line 2: bad"
        assert str(CSVFormatError("bad")) == "bad"

    def test_manifest_error_field(self):
        """Test that the offending field prefixes the message."""
        err = ManifestError("field required", field="alpha")
        assert err.field == "alpha"
        assert str(err).startswith("alpha:")

    def test_cfl_and_window_errors(self):
        """Test numeric context of CFL and window errors."""
        err = CFLViolationError(0.8, 0.5)
        assert (err.cfl, err.limit) == (0.8, 0.5)
        assert "0.8" in str(err)
        err = WindowError("window leaves the grid", corner=(1.5, -2.0))
        assert err.corner == (1.5, -2.0)
        assert "(1.5, -2.0)" in str(err)
        assert isinstance(err, ValueError)


class TestJson:
    """Test canonical JSON and config hashing."""

    def test_canonical_json_sorted_and_stable(self):
        """Test key order and the trailing newline."""
        text = canonical_json({"b": 1, "a": [1.5, 2]})
        assert text.index('"a"') < text.index('"b"')
        assert text.endswith("\n")
        assert canonical_json({"a": [1.5, 2], "b": 1}) == text

    def test_numpy_values_serialize(self):
        """Test numpy scalars and arrays in traces."""
        text = canonical_json({"x": np.float64(0.25), "v": np.arange(3)})
        assert '"x": 0.25' in text
        assert "[\n    0,\n    1,\n    2\n  ]" in text

    def test_config_hash(self):
        """Test that the hash ignores key order and changes with values."""
        h = config_hash({"a": 1, "b": 2})
        assert len(h) == 12
        assert h == config_hash({"b": 2, "a": 1})
        assert h != config_hash({"a": 1, "b": 3})

    def test_write_and_read(self, tmp_path):
        """Test that written JSON reads back and parent directories are created."""
        path = write_json(tmp_path / "sub" / "x.json", {"k": [1, 2]})
        assert read_json(path) == {"k": [1, 2]}

    def test_read_invalid_json(self, tmp_path):
        """Test the manifest error on malformed JSON."""
        path = tmp_path / "bad.json"
        path.write_text('{"a": ')
        with pytest.raises(ManifestError, match="invalid JSON") as exc:
            read_json(path)
        assert exc.value.field == str(path)

    def test_finite_or_none(self):
        """Test the JSON mapping of non-finite values."""
        assert finite_or_none(2.0) == 2.0
        assert finite_or_none(math.inf) is None
        assert finite_or_none(math.nan) is None

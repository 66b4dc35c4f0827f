"""Tests for src/flatcensus/exceptions.py"""

import pickle

import pytest

from flatcensus.exceptions import (
    AnnulusValidationError,
    CensusIncompleteError,
    CheckpointError,
    ConfigurationError,
    DanglingBoundaryError,
    DomainError,
    EnvironmentConfigurationError,
    InvalidConfigurationError,
    InvalidPantsError,
    InvalidTableError,
    MissingConfigurationError,
    NormalizationError,
    ResourceLimitExceeded,
)

RAISED = [
    ConfigurationError("No census requested"),
    MissingConfigurationError("A subcommand is missing one of its inputs.", setting="compare"),
    InvalidConfigurationError("Worker count must be positive", setting="FLATCENSUS_WORKERS"),
    EnvironmentConfigurationError("A FLATCENSUS_* environment variable cannot be parsed.", setting="FLATCENSUS_MAX_TABLES"),
    DomainError("(1, 0) is not hyperbolic", g=1, n=0),
    InvalidTableError("Slot 3 is its own partner", violations=[("fold", 3)]),
    AnnulusValidationError("Rows do not close up", direction="h"),
    DanglingBoundaryError(2, 1),
    NormalizationError(5),
    ResourceLimitExceeded(2, 3),
    CensusIncompleteError(7, 5),
    CheckpointError("Unreadable checkpoint", path="shard-x.json"),
    InvalidPantsError("Pants 0 has four cuffs", g=2, n=0),
]


class TestPickling:
    """Test that exceptions raised in worker processes keep their payload"""

    @pytest.mark.parametrize("error", RAISED, ids=lambda e: type(e).__name__)
    def test_round_trip(self, error):
        restored = pickle.loads(pickle.dumps(error))
        assert type(restored) is type(error)
        assert str(restored) == str(error)
        assert vars(restored) == vars(error)

    def test_resource_limit_payload(self):
        restored = pickle.loads(pickle.dumps(ResourceLimitExceeded(2, 3)))
        assert (restored.limit, restored.examined) == (2, 3)
        with pytest.raises(ResourceLimitExceeded, match="examined 3 tables \\(limit 2\\)"):
            raise restored


class TestConfigurationError:
    """Test configuration error messages"""

    def test_setting_is_shown(self):
        error = InvalidConfigurationError("Worker count must be positive", setting="FLATCENSUS_WORKERS")
        assert str(error) == "Worker count must be positive [FLATCENSUS_WORKERS]"
        assert error.setting == "FLATCENSUS_WORKERS"

    def test_without_setting(self):
        assert str(ConfigurationError("No census requested")) == "No census requested"

    def test_subclasses(self):
        for cls in (MissingConfigurationError, InvalidConfigurationError, EnvironmentConfigurationError):
            assert issubclass(cls, ConfigurationError)
            assert cls.__doc__

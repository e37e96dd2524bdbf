"""
Pydantic models for command reports.

Every CLI command emits one CommandReport; only declared fields are serialized.
"""

import json
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

SCHEMA_VERSION = "1.0"


# ── Report schemas ───────────────────────────────────────────────────────


class AssertionRecord(BaseModel):
    """One checked statement with its verdict and supporting witness."""

    name: str
    passed: bool = Field(alias="pass")
    witness: Optional[Any] = None

    model_config = ConfigDict(populate_by_name=True)


class CommandReport(BaseModel):
    """Top-level JSON artifact of a command run."""

    schema_version: str = SCHEMA_VERSION
    command: str
    params: Dict[str, Any] = Field(default_factory=dict)
    results: Dict[str, Any] = Field(default_factory=dict)
    assertions: List[AssertionRecord] = Field(default_factory=list)
    timings: Optional[Dict[str, float]] = None

    model_config = ConfigDict(populate_by_name=True)

    def add(self, name: str, passed: bool, witness: Any = None) -> "CommandReport":
        self.assertions.append(AssertionRecord(name=name, passed=bool(passed), witness=witness))
        return self

    @property
    def all_passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump(by_alias=True, exclude_none=False, exclude={"timings"} if self.timings is None else None)

    def to_json(self, indent: Optional[int] = 2) -> str:
        """Deterministic JSON: sorted keys, aliases applied."""
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True, ensure_ascii=False)

"""Pydantic models for command requests and run reports"""

from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field, computed_field, model_validator


class NumericResult(BaseModel):
    """A named number together with the tolerance it was computed under"""
    name: str = Field(..., description="Result name")
    value: float = Field(..., description="Computed value")
    tolerance: float = Field(..., ge=0.0, description="Absolute tolerance applied")


class BoundCheck(BaseModel):
    """An inequality lhs <= rhs (or lhs >= rhs) checked within a tolerance"""
    name: str = Field(..., description="Bound name")
    lhs: float
    rhs: float
    relation: Literal["<=", ">="] = Field(default="<=")
    tolerance: float = Field(default=1e-8, ge=0.0)

    @computed_field
    @property
    def passed(self) -> bool:
        if self.relation == "<=":
            return self.lhs <= self.rhs + self.tolerance
        return self.lhs >= self.rhs - self.tolerance


class RunReport(BaseModel):
    """Result record printed by every command"""
    command: str = Field(..., description="Command echo")
    digest: str = Field(default="", description="sha256 prefix over the input files")
    results: List[NumericResult] = Field(default_factory=list)
    checks: List[BoundCheck] = Field(default_factory=list)
    notes: Dict[str, str] = Field(default_factory=dict, description="Non-numeric fields")

    def add(self, name: str, value: float, tolerance: float) -> "RunReport":
        self.results.append(NumericResult(name=name, value=float(value), tolerance=tolerance))
        return self

    def check(self, name: str, lhs: float, rhs: float, relation: str = "<=",
              tolerance: float = 1e-8) -> "RunReport":
        self.checks.append(BoundCheck(name=name, lhs=float(lhs), rhs=float(rhs),
                                      relation=relation, tolerance=tolerance))
        return self

    def note(self, name: str, value) -> "RunReport":
        self.notes[name] = str(value)
        return self

    def value(self, name: str) -> float:
        for r in self.results:
            if r.name == name:
                return r.value
        raise KeyError(name)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


class PolarizeRequest(BaseModel):
    """Options of the polarize command"""
    n: int = Field(..., ge=1, description="Security parameter")
    alpha: Optional[float] = Field(default=None, ge=0.0, lt=1.0)
    beta: Optional[float] = Field(default=None, gt=0.0, le=1.0)
    r: Optional[int] = Field(default=None, ge=1, description="XOR exponent override")
    s: Optional[int] = Field(default=None, ge=1, description="Amplification override")

    @model_validator(mode="after")
    def check_thresholds(self) -> "PolarizeRequest":
        if (self.r is None) != (self.s is None):
            raise ValueError("--r and --s must be given together")
        if self.r is None:
            if self.alpha is None or self.beta is None:
                raise ValueError("give --alpha and --beta, or override with --r and --s")
            if self.alpha >= self.beta ** 2:
                raise ValueError(f"alpha >= beta^2 ({self.alpha} >= {self.beta ** 2:.6g})")
        return self

    @property
    def override(self):
        return None if self.r is None else (self.r, self.s)


class TnaRequest(BaseModel):
    """Options of the tna command"""
    k: int = Field(..., ge=1, description="Requested bits of accuracy")
    method: Literal["charpoly", "eig"] = Field(default="charpoly")

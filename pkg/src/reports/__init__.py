"""Report and request records"""

from .models import BoundCheck, NumericResult, PolarizeRequest, RunReport, TnaRequest

__all__ = ["BoundCheck", "NumericResult", "PolarizeRequest", "RunReport", "TnaRequest"]

"""Exception hierarchy.

Every error carries a short kebab-case ``code`` that ends up in report
status strings (``"undefined: <code>"``) and CLI diagnostics.
"""


class SustainEvalError(Exception):
    code = "error"


class DataError(SustainEvalError):
    """Bad or unreadable input data. Maps to CLI exit code 2."""

    code = "data-error"


class SchemaError(DataError):
    code = "schema-error"

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(f"{where}{message}")


class DatasetValidationError(DataError):
    code = "validation-error"

    def __init__(self, report):
        self.report = report
        hard = report.hard
        lines = [f"{len(hard)} hard violation(s)"]
        lines += [f"  {v}" for v in hard[:20]]
        super().__init__("\n".join(lines))


class EmptyCatalogError(DataError):
    code = "empty-catalog"


class UndefinedMetric(SustainEvalError):
    """The formula's preconditions are not met by the data.

    Reported as a status, never a crash.
    """

    code = "undefined-metric"

    def __init__(self, reason=None):
        self.reason = reason or self.code
        super().__init__(self.reason)


class MissingTable(UndefinedMetric):
    code = "missing table"


class EmptyGroupError(UndefinedMetric):
    code = "empty-group"


class FewerThanTwoGroups(UndefinedMetric):
    code = "fewer-than-two-groups"


class FewerThanTwoProducers(UndefinedMetric):
    code = "fewer-than-two-producers"


class MissingSimilarity(UndefinedMetric):
    code = "missing-similarity"


class MissingScore(UndefinedMetric):
    code = "missing-score"


class IncompleteSeries(UndefinedMetric):
    code = "incomplete-series"


class RangeError(SustainEvalError, ValueError):
    code = "range-error"


class PoolTooSmall(SustainEvalError, ValueError):
    code = "pool-smaller-than-k"


class UnknownMetric(SustainEvalError, KeyError):
    code = "unknown-metric"


class InstanceTooLarge(SustainEvalError, ValueError):
    code = "instance-too-large"

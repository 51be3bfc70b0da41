class DaraError(Exception):
    exit_code = 1

    def __init__(self, message, *args):
        self.message = message
        super().__init__(message, *args)


class ValidationError(DaraError):
    exit_code = 2


class ConfigError(DaraError):
    exit_code = 2


class InfeasibleError(DaraError):
    exit_code = 3


class NonMonotoneWeights(ValidationError):
    def __init__(self, slot: int, previous: float, current: float, sensor: int = None):
        self.slot = slot
        self.previous = previous
        self.current = current
        self.sensor = sensor
        msg = f"weights increase at slot {slot}: {previous} -> {current}"
        if sensor is not None:
            msg = f"sensor {sensor}: " + msg
        super().__init__(msg)


class BadNormalization(ValidationError):
    def __init__(self, first: float, sensor: int = None):
        self.first = first
        self.sensor = sensor
        msg = f"first weight must be 1, got {first}"
        if sensor is not None:
            msg = f"sensor {sensor}: " + msg
        super().__init__(msg)


class WeightOutOfRange(ValidationError):
    def __init__(self, slot: int, value: float, sensor: int = None):
        self.slot = slot
        self.value = value
        self.sensor = sensor
        msg = f"weight {value} at slot {slot} outside [0, 1]"
        if sensor is not None:
            msg = f"sensor {sensor}: " + msg
        super().__init__(msg)


class AlphaSumMismatch(ValidationError):
    def __init__(self, total: float):
        self.total = total
        super().__init__(f"objective weights sum to {total}, expected 1")


class LengthMismatch(ValidationError):
    def __init__(self, expected: int, actual: int, what: str = "vector"):
        self.expected = expected
        self.actual = actual
        super().__init__(f"{what} has length {actual}, expected {expected}")


class InvalidSensor(ValidationError):
    def __init__(self, sensor: int, field: str, value):
        self.sensor = sensor
        self.field = field
        self.value = value
        super().__init__(f"sensor {sensor}: invalid {field}={value}")


class InvalidSensorIds(ValidationError):
    def __init__(self, ids):
        self.ids = tuple(ids)
        super().__init__(f"sensor ids {list(self.ids)} are not a permutation of 1..{len(self.ids)}")


class UnknownSensor(ValidationError):
    def __init__(self, slot: int, sensor):
        self.slot = slot
        self.sensor = sensor
        super().__init__(f"slot {slot} assigned to unknown sensor {sensor}")


class DeltaOutOfRange(ValidationError):
    def __init__(self, delta: float):
        self.delta = delta
        super().__init__(f"discount factor {delta} outside [0, 1)")


class DeltaOne(ValidationError):
    def __init__(self):
        super().__init__("discount factor 1 has no infinite-horizon normalisation")


class EmptyHistogram(ValidationError):
    def __init__(self, message: str = "deadline histogram holds no bytes"):
        super().__init__(message)


class DegenerateProfile(ValidationError):
    def __init__(self, positive: int):
        self.positive = positive
        super().__init__(f"need at least 2 strictly positive weights to fit, got {positive}")


class ZeroUtilityCoefficient(ValidationError):
    def __init__(self, sensor: int):
        self.sensor = sensor
        super().__init__(f"sensor {sensor} has zero utility coefficient alpha*qbar*h")


class TargetDimensionMismatch(ValidationError):
    def __init__(self, expected: int, actual: int):
        self.expected = expected
        self.actual = actual
        super().__init__(f"target has {actual} entries for {expected} sensors")


class NonPositiveShare(ValidationError):
    def __init__(self, sensor: int, share: float):
        self.sensor = sensor
        self.share = share
        super().__init__(f"sensor {sensor} has non-positive share {share}")


class InvalidBudget(ValidationError):
    def __init__(self, budget: float, message: str = None):
        self.budget = budget
        super().__init__(message or f"budget must be positive, got {budget}")


class UnknownPolicy(ConfigError):
    def __init__(self, policy: str):
        self.policy = policy
        super().__init__(f"unknown policy '{policy}'")


class InfeasibleDelta(InfeasibleError):
    def __init__(self, delta: float, threshold: float):
        self.delta = delta
        self.threshold = threshold
        super().__init__(f"discount factor {delta} below feasibility threshold {threshold}")


class InfeasibleTarget(InfeasibleError):
    def __init__(self, total: float, expected: float, message: str = None):
        self.total = total
        self.expected = expected
        super().__init__(message or f"target sums to {total}, expected {expected}")


class InstanceTooLarge(DaraError):
    exit_code = 4

    def __init__(self, count: int, limit: int):
        self.count = count
        self.limit = limit
        super().__init__(f"{count} allocations exceed the exhaustive search limit {limit}")

from __future__ import annotations


class LinearSolveError(Exception):
    def __init__(self, reason: str, *args, **kwargs):
        super().__init__(args, kwargs)
        self.reason = reason

    def __str__(self):
        return f"Linear solve failed: {self.reason}"


class NewtonDivergence(Exception):
    def __init__(self, iterations: int, residual: float, *args, **kwargs):
        super().__init__(args, kwargs)
        self.iterations = iterations
        self.residual = residual

    def __str__(self):
        return (
            f"Newton iteration did not converge after {self.iterations} iterations, "
            f"residual {self.residual:.3e}"
        )


class CutbackExhausted(Exception):
    """Raised when a load step still fails after the maximum number of cutbacks. The history
    of all converged steps is attached."""

    def __init__(self, step: int, history, *args, **kwargs):
        super().__init__(args, kwargs)
        self.step = step
        self.history = history

    def __str__(self):
        return f"Load step {self.step} failed after exhausting all cutbacks"

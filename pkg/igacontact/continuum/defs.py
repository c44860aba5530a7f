class IncompressibilityError(Exception):
    def __init__(self, nu: float, *args, **kwargs):
        super().__init__(args, kwargs)
        self.nu = nu

    def __str__(self):
        return f"Poisson ratio {self.nu} is outside of (-1, 0.5)"


class ElementInversionError(Exception):
    """Raised when the deformation gradient has a non-positive determinant. The solver treats
    this as a request to cut back the load step."""

    def __init__(self, element: int, det_f: float, *args, **kwargs):
        super().__init__(args, kwargs)
        self.element = element
        self.det_f = det_f

    def __str__(self):
        return f"Element {self.element} inverted, det F = {self.det_f:.3e}"


class LoadFaceError(Exception):
    def __init__(self, face: str, reason: str = "", *args, **kwargs):
        super().__init__(args, kwargs)
        self.face = face
        self.reason = reason

    def __str__(self):
        msg = f"Invalid load face {self.face}"
        if self.reason:
            msg += f": {self.reason}"
        return msg

class MeshQualityError(Exception):
    def __init__(self, element: int, det_j: float, *args, **kwargs):
        super().__init__(args, kwargs)
        self.element = element
        self.det_j = det_j

    def __str__(self):
        return f"Non-positive Jacobian determinant {self.det_j} in element {self.element}"


class KinematicsError(Exception):
    def __init__(self, xi, *args, **kwargs):
        super().__init__(args, kwargs)
        self.xi = xi

    def __str__(self):
        return f"Degenerate surface tangents at parameter {self.xi}"


class VOConstructionError(Exception):
    def __init__(self, reason: str, *args, **kwargs):
        super().__init__(args, kwargs)
        self.reason = reason

    def __str__(self):
        return f"Varying-order body construction failed: {self.reason}"


class VOMisuseError(Exception):
    def __init__(self, element: int, *args, **kwargs):
        super().__init__(args, kwargs)
        self.element = element

    def __str__(self):
        return f"Element {self.element} is not a contact-layer element"


class GeometrySelfCheckError(Exception):
    def __init__(self, geometry: str, deviation: float, *args, **kwargs):
        super().__init__(args, kwargs)
        self.geometry = geometry
        self.deviation = deviation

    def __str__(self):
        return f"Shape check of {self.geometry} failed, deviation {self.deviation:.3e}"

from pydantic import BaseModel, ConfigDict, Field
from typing import List, Dict, Optional, Tuple, Any

import numpy as np
import pandas as pd

Vec3 = Tuple[float, float, float]
Vec2 = Tuple[float, float]

# --- Hedgehog geometry ---

class HedgehogJet(BaseModel):
    """One point of a hedgehog with its principal radii and curvature function."""
    model_config = ConfigDict(frozen=True)

    p: Vec3 = Field(description="Unit normal (parameter on the sphere).")
    x: Vec3 = Field(description="Hedgehog point x_h(p) = grad phi(p).")
    r1: float = Field(description="Smaller principal radius of curvature.")
    r2: float = Field(description="Larger principal radius of curvature.")
    R_h: float = Field(description="Curvature function r1 * r2.")
    mean_radius: float = Field(description="(r1 + r2) / 2.")

# --- Graph surfaces and scans ---

class CurvatureSample(BaseModel):
    """Curvature data of one graph point z = u(x, y) on one sheet."""
    x: float
    y: float
    sheet: int = Field(default=1, description="+1 for the upper sheet, -1 for the mirrored one.")
    z: float
    K_numerator: float = Field(description="u_xx u_yy - u_xy^2.")
    K: float = Field(description="Gaussian curvature.")
    r1: float = Field(description="Smaller principal radius from the shape operator.")
    r2: float = Field(description="Larger principal radius from the shape operator.")
    normal: Vec3
    boundary_distance: float = Field(description="Domain functional, e.g. 1 - |x|^(4/5) - |y|^(4/5).")
    near_singular: bool = False


class ScanReport(BaseModel):
    """Summary of a grid scan of Gaussian curvature or principal radii."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    quantity: str = Field(description="'curvature' or 'radii'.")
    surface: str = "mm"
    t: Optional[float] = None
    resolution: int
    margin: float
    samples: int
    min_value: Optional[float] = Field(default=None, description="Minimum of the scanned quantity (K or r1*r2).")
    max_value: Optional[float] = Field(default=None, description="Maximum of the scanned quantity (K or r1*r2).")
    min_r1: Optional[float] = None
    max_r1: Optional[float] = None
    min_r2: Optional[float] = None
    max_r2: Optional[float] = None
    sign_mismatches: int = Field(default=0, description="Samples with K < 0 but not r1 < 0 < r2.")
    violation_count: int = 0
    violations: List[CurvatureSample] = Field(default_factory=list, description="Violating samples, capped.")
    seconds: float = 0.0
    table: Optional[pd.DataFrame] = Field(default=None, exclude=True, repr=False)


class TScanEntry(BaseModel):
    t: float
    max_K: Optional[float]
    violation_count: int


class TIntervalReport(BaseModel):
    entries: List[TScanEntry]
    negative_ts: List[float] = Field(description="Scanned t values with no K >= 0 sample.")
    lower: Optional[float] = None
    upper: Optional[float] = None


class SingularSample(BaseModel):
    cusp: Vec2
    sheet: int
    kappa: Optional[float] = Field(description="Path constant; None for the axis path.")
    side: int
    normal: Vec3
    distance: float = Field(description="Distance of the extrapolated normal to the semicircles.")
    raw_distance: float = Field(description="Distance of the normal at the closest approach.")


class SingularSetReport(BaseModel):
    t: float
    samples: int
    max_distance: float
    max_distance_raw: float
    cusp_normal_error: float
    details: List[SingularSample] = Field(default_factory=list)


class DecaySample(BaseModel):
    cusp: Vec2
    sheet: int
    delta: float
    R_h: float
    mean_radius: float


class AlexandrovCheck(BaseModel):
    """Principal-radius condition of the convexified surface h + R."""
    R: float
    k: float
    min_shifted_r1: float
    max_product: float = Field(description="max of (r1+R-R)(r2+R-R) over samples.")
    max_condition: float = Field(description="max of (k1-k)(k2-k) with k_i = 1/(r_i+R).")
    identity_defect: float = Field(0.0, description="max |(r1+R-R)(r2+R-R) - r1 r2| relative to (|r1|+R)(|r2|+R).")
    convex: bool
    condition_holds: bool

# --- Certification ---

class IntervalBox(BaseModel):
    xlo: float
    xhi: float
    ylo: float
    yhi: float
    depth: int = 0


class SignCertificate(BaseModel):
    """Verdict of an adaptive interval sign-certification run."""
    expr: str
    region: str
    sign: str
    verdict: str = Field(description="Certified, BoundaryContact or Undecided.")
    boxes: int = Field(description="Boxes processed.")
    depth: int = Field(description="Maximum subdivision depth reached.")
    worst_box: Optional[IntervalBox] = None
    bounds: Optional[Vec2] = Field(default=None, description="Enclosure on the worst box; JSON writes unbounded ends as 'inf' and '-inf'.")
    discarded: int = 0
    contact_count: int = 0
    contact_boxes: List[IntervalBox] = Field(default_factory=list)
    contact_max_diameter: Optional[float] = None
    seconds: float = 0.0

# --- Projections and index ---

class IndexResult(BaseModel):
    x: Vec2
    direction: Vec2
    crossings: int = Field(description="Number of crossings (unsigned).")
    index: int = Field(description="Signed crossing count i_h(x).")
    degenerate: bool = False
    attempts: int = 1


class Theorem1Counts(BaseModel):
    nu_plus: int
    nu_minus: int
    solutions: List[Vec3] = Field(default_factory=list)
    curvatures: List[float] = Field(default_factory=list)
    degenerate: bool = False

    @property
    def index(self):
        return self.nu_plus - self.nu_minus

# --- Output and runs ---

class MeshData(BaseModel):
    """Triangle mesh with per-vertex unit normals (arrays of shape (n, 3))."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    vertices: np.ndarray
    faces: np.ndarray
    normals: np.ndarray


class RunConfig(BaseModel):
    """Validated parameters of one hhk invocation."""
    subcommand: str
    t: float = 1.0 / 12.0
    t_literal: str = "1/12"
    n: Optional[int] = None
    margin: Optional[float] = None
    max_depth: Optional[int] = None
    budget: Optional[int] = None
    output: Optional[str] = None
    format: str = "json"
    seed: int = 0
    options: Dict[str, Any] = Field(default_factory=dict)


class StageResult(BaseModel):
    name: str
    passed: bool
    exit_code: int
    seconds: float
    detail: Dict[str, Any] = Field(default_factory=dict)


class VerificationReport(BaseModel):
    preset: str
    t: float
    t_literal: str
    seed: int
    passed: bool
    exit_code: int
    stages: List[StageResult]
    seconds: float

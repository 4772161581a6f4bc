//! Planar point processes on a disk: homogeneous Poisson sampling and
//! Matérn type-II hard-core thinning.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{check, domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        self.distance_sq(other).sqrt()
    }

    pub fn distance_sq(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn norm(&self) -> f64 {
        self.distance(&Point::ORIGIN)
    }
}

/// Finite point set inside the disk of radius `region_radius` centred at the
/// origin.
#[derive(Debug, Clone, PartialEq)]
pub struct PointPattern {
    points: Vec<Point>,
    region_radius: f64,
}

impl PointPattern {
    pub fn new(points: Vec<Point>, region_radius: f64) -> Result<Self> {
        check("region_radius", region_radius, region_radius > 0.0, "must be > 0")?;
        let limit = region_radius * region_radius * (1.0 + 1e-12);
        for p in &points {
            if !(p.x.is_finite() && p.y.is_finite()) {
                return Err(domain(format!("non-finite point ({}, {})", p.x, p.y)));
            }
            if p.x * p.x + p.y * p.y > limit {
                return Err(domain(format!(
                    "point ({}, {}) outside disk of radius {region_radius}",
                    p.x, p.y
                )));
            }
        }
        Ok(Self { points, region_radius })
    }

    pub fn empty(region_radius: f64) -> Result<Self> {
        Self::new(Vec::new(), region_radius)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn region_radius(&self) -> f64 {
        self.region_radius
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Keeps the points within `radius` of the origin.
    pub fn crop(&self, radius: f64) -> Result<PointPattern> {
        let r2 = radius * radius;
        let kept = self.points.iter().copied().filter(|p| p.x * p.x + p.y * p.y <= r2).collect();
        PointPattern::new(kept, radius)
    }
}

/// Parent intensity and hard-core distance of a Matérn type-II process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MhcpParams {
    pub lambda_parent: f64,
    pub delta: f64,
}

impl MhcpParams {
    pub fn new(lambda_parent: f64, delta: f64) -> Result<Self> {
        let params = Self { lambda_parent, delta };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        check("lambda_parent", self.lambda_parent, self.lambda_parent > 0.0, "must be > 0")?;
        check("delta", self.delta, self.delta >= 0.0, "must be >= 0")
    }

    /// Parameters whose retained intensity equals `lambda_retained`.
    ///
    /// Fails when `lambda_retained` is at or above the packing limit 1/(πδ²).
    pub fn from_retained(lambda_retained: f64, delta: f64) -> Result<Self> {
        check("lambda_retained", lambda_retained, lambda_retained > 0.0, "must be > 0")?;
        check("delta", delta, delta >= 0.0, "must be >= 0")?;
        if delta == 0.0 {
            return Self::new(lambda_retained, 0.0);
        }
        let area = PI * delta * delta;
        let fill = lambda_retained * area;
        if fill >= 1.0 {
            return Err(domain(format!(
                "lambda_retained = {lambda_retained} is unreachable with delta = {delta} \
                 (hard-core limit is {:e})",
                1.0 / area
            )));
        }
        Self::new(-(-fill).ln_1p() / area, delta)
    }

    /// Retained intensity λ_B of the thinned process.
    pub fn retained_density(&self) -> f64 {
        mhcp_density(self)
    }

    /// Retention probability τ = λ_B / λ_P.
    pub fn retention_probability(&self) -> f64 {
        retention_factor(self.lambda_parent * PI * self.delta * self.delta)
    }
}

/// (1 − e^{−z}) / z with its removable singularity at zero.
pub(crate) fn retention_factor(z: f64) -> f64 {
    if z < 1e-6 {
        1.0 - z / 2.0 + z * z / 6.0
    } else {
        -(-z).exp_m1() / z
    }
}

/// λ_B = (1 − exp(−πλ_Pδ²)) / (πδ²); equals λ_P at δ = 0.
pub fn mhcp_density(params: &MhcpParams) -> f64 {
    params.lambda_parent * params.retention_probability()
}

/// Homogeneous Poisson pattern of intensity `density` on the disk.
pub fn sample_ppp<R: Rng + ?Sized>(density: f64, region_radius: f64, rng: &mut R) -> Result<PointPattern> {
    check("density", density, density >= 0.0, "must be >= 0")?;
    check("region_radius", region_radius, region_radius > 0.0, "must be > 0")?;
    let mean = density * PI * region_radius * region_radius;
    let count = if mean > 0.0 {
        let dist = Poisson::new(mean).map_err(|e| domain(format!("Poisson mean {mean}: {e}")))?;
        dist.sample(rng) as usize
    } else {
        0
    };
    let points = (0..count)
        .map(|_| {
            let r = region_radius * rng.random::<f64>().sqrt();
            let theta = 2.0 * PI * rng.random::<f64>();
            Point::new(r * theta.cos(), r * theta.sin())
        })
        .collect();
    PointPattern::new(points, region_radius)
}

/// Matérn type-II thinning: each parent draws an independent mark on [0, 1);
/// see [`mhcp_thin_with_marks`].
pub fn mhcp_thin<R: Rng + ?Sized>(parents: &PointPattern, delta: f64, rng: &mut R) -> Result<PointPattern> {
    let marks: Vec<f64> = (0..parents.len()).map(|_| rng.random::<f64>()).collect();
    mhcp_thin_with_marks(parents, delta, &marks)
}

/// Retains a parent iff no other parent closer than `delta` carries a
/// smaller mark. Equal marks are ordered by point index.
pub fn mhcp_thin_with_marks(parents: &PointPattern, delta: f64, marks: &[f64]) -> Result<PointPattern> {
    check("delta", delta, delta >= 0.0, "must be >= 0")?;
    if marks.len() != parents.len() {
        return Err(domain(format!("{} marks for {} parents", marks.len(), parents.len())));
    }
    let pts = parents.points();
    if delta == 0.0 || pts.len() < 2 {
        return Ok(parents.clone());
    }
    let grid = CellGrid::new(pts, delta);
    let d2 = delta * delta;
    let beats = |j: usize, i: usize| marks[j] < marks[i] || (marks[j] == marks[i] && j < i);
    let kept = pts
        .iter()
        .enumerate()
        .filter(|&(i, p)| {
            let (cx, cy) = grid.cell_of(p);
            !grid.neighbours(cx, cy).any(|j| j != i && beats(j, i) && pts[j].distance_sq(p) < d2)
        })
        .map(|(_, p)| *p)
        .collect();
    PointPattern::new(kept, parents.region_radius())
}

/// Samples a Matérn type-II pattern on the disk of radius `region_radius`.
///
/// Parents are drawn on radius `region_radius + δ` and the thinned pattern is
/// cropped back, so points near the boundary see their full δ-neighbourhood.
pub fn sample_mhcp<R: Rng + ?Sized>(params: &MhcpParams, region_radius: f64, rng: &mut R) -> Result<PointPattern> {
    params.validate()?;
    check("region_radius", region_radius, region_radius > 0.0, "must be > 0")?;
    let parents = sample_ppp(params.lambda_parent, region_radius + params.delta, rng)?;
    mhcp_thin(&parents, params.delta, rng)?.crop(region_radius)
}

/// Distance from `origin` to the nearest point of a pattern drawn as by
/// [`sample_mhcp`], or `None` if that pattern is empty.
///
/// Consumes the same draws as [`sample_mhcp`] but decides retention only for
/// parents in order of distance, stopping at the first survivor.
pub fn sample_mhcp_nearest_distance<R: Rng + ?Sized>(
    params: &MhcpParams,
    region_radius: f64,
    origin: &Point,
    rng: &mut R,
) -> Result<Option<f64>> {
    params.validate()?;
    check("region_radius", region_radius, region_radius > 0.0, "must be > 0")?;
    let parents = sample_ppp(params.lambda_parent, region_radius + params.delta, rng)?;
    let marks: Vec<f64> = (0..parents.len()).map(|_| rng.random::<f64>()).collect();
    let pts = parents.points();
    let r2 = region_radius * region_radius;
    let mut order: Vec<(f64, usize)> = pts
        .iter()
        .enumerate()
        .filter(|(_, p)| p.x * p.x + p.y * p.y <= r2)
        .map(|(i, p)| (origin.distance_sq(p), i))
        .collect();
    order.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let d2 = params.delta * params.delta;
    let beats = |j: usize, i: usize| marks[j] < marks[i] || (marks[j] == marks[i] && j < i);
    let survivor = order.into_iter().find(|&(_, i)| {
        params.delta == 0.0 || !pts.iter().enumerate().any(|(j, q)| j != i && beats(j, i) && q.distance_sq(&pts[i]) < d2)
    });
    Ok(survivor.map(|(dist2, _)| dist2.sqrt()))
}

/// Index and distance of the pattern point nearest to `origin`.
pub fn nearest_point(origin: &Point, pattern: &PointPattern) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, p) in pattern.points().iter().enumerate() {
        let d2 = origin.distance_sq(p);
        if best.is_none_or(|(_, b)| d2 < b) {
            best = Some((i, d2));
        }
    }
    best.map(|(i, d2)| (i, d2.sqrt()))
}

/// Euclidean distance from `origin` to the closest pattern point.
pub fn nearest_point_distance(origin: &Point, pattern: &PointPattern) -> Result<f64> {
    nearest_point(origin, pattern).map(|(_, d)| d).ok_or(Error::NoCoverage)
}

/// Uniform square-cell bucketing (compressed row layout) for fixed-radius
/// neighbour queries.
struct CellGrid {
    min_x: f64,
    min_y: f64,
    cell: f64,
    nx: i64,
    ny: i64,
    starts: Vec<usize>,
    members: Vec<usize>,
}

impl CellGrid {
    fn new(points: &[Point], cell: f64) -> Self {
        let min_x = points.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
        let min_y = points.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
        let max_x = points.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
        let max_y = points.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
        let nx = (((max_x - min_x) / cell).floor() as i64 + 1).max(1);
        let ny = (((max_y - min_y) / cell).floor() as i64 + 1).max(1);
        let mut grid = Self { min_x, min_y, cell, nx, ny, starts: Vec::new(), members: Vec::new() };

        let slot = |g: &Self, p: &Point| {
            let (cx, cy) = g.cell_of(p);
            (cy * g.nx + cx) as usize
        };
        let n_cells = (nx * ny) as usize;
        let mut counts = vec![0usize; n_cells + 1];
        for p in points {
            counts[slot(&grid, p) + 1] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let mut fill = counts.clone();
        let mut members = vec![0; points.len()];
        for (i, p) in points.iter().enumerate() {
            let s = slot(&grid, p);
            members[fill[s]] = i;
            fill[s] += 1;
        }
        grid.starts = counts;
        grid.members = members;
        grid
    }

    fn cell_of(&self, p: &Point) -> (i64, i64) {
        let cx = (((p.x - self.min_x) / self.cell).floor() as i64).clamp(0, self.nx - 1);
        let cy = (((p.y - self.min_y) / self.cell).floor() as i64).clamp(0, self.ny - 1);
        (cx, cy)
    }

    /// Members of the 3×3 block of cells around (cx, cy).
    fn neighbours(&self, cx: i64, cy: i64) -> impl Iterator<Item = usize> + '_ {
        let xs = (cx - 1).max(0)..=(cx + 1).min(self.nx - 1);
        ((cy - 1).max(0)..=(cy + 1).min(self.ny - 1))
            .flat_map(move |y| xs.clone().map(move |x| (y * self.nx + x) as usize))
            .flat_map(move |s| self.members[self.starts[s]..self.starts[s + 1]].iter().copied())
    }
}

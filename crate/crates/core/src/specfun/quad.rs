//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{check, domain, Error, Result};

/// Tolerances for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-8, max_subdivisions: 2000 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        check("abs_tol", self.abs_tol, self.abs_tol > 0.0, "must be > 0")?;
        check("rel_tol", self.rel_tol, self.rel_tol > 0.0, "must be > 0")?;
        if self.max_subdivisions == 0 {
            return Err(domain("max_subdivisions must be >= 1"));
        }
        Ok(())
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureEstimate {
    pub value: f64,
    pub abs_error: f64,
    pub subdivisions: usize,
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    peak: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        // largest error first; left-most segment wins ties
        self.error.total_cmp(&other.error).then_with(|| other.a.total_cmp(&self.a))
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = kronrod.abs();
    let mut peak = fc.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        peak = peak.max(f1.abs()).max(f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (1.0f64).min((200.0 * error / res_asc).powf(1.5));
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment { a, b, value, error, peak }
}

/// Adaptive estimate of ∫ₐᵇ f. An infinite `b` is handled by
/// [`integrate_to_infinity`] with unit initial width.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    if b == f64::INFINITY {
        return integrate_to_infinity(f, a, 1.0, spec);
    }
    integrate_with_error(f, a, b, spec).map(|e| e.value)
}

/// Like [`integrate`] on a finite interval, also reporting the error bound.
pub fn integrate_with_error<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureEstimate> {
    spec.validate()?;
    check("a", a, true, "must be finite")?;
    check("b", b, b >= a, "must be finite and >= a")?;
    if a == b {
        return Ok(QuadratureEstimate { value: 0.0, abs_error: 0.0, subdivisions: 0 });
    }
    adaptive(&f, a, b, spec).map(|(est, _)| est)
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<(QuadratureEstimate, f64)> {
    let first = kronrod15(f, a, b);
    if !first.value.is_finite() {
        return Err(domain(format!("integrand not finite on [{a}, {b}]")));
    }
    let mut total = first.value;
    let mut error = first.error;
    let mut peak = first.peak;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut subdivisions = 0;

    while error > spec.target(total) {
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::Convergence { estimate: total, error_bound: error });
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval below floating-point resolution
            return Err(Error::Convergence { estimate: total, error_bound: error });
        }
        let left = kronrod15(f, worst.a, mid);
        let right = kronrod15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        peak = peak.max(left.peak).max(right.peak);
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
    }
    // Re-sum from the segments to shed accumulated update roundoff.
    let mut segs: Vec<Segment> = heap.into_vec();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = segs.iter().map(|s| s.value).sum();
    let abs_error = segs.iter().map(|s| s.error).sum();
    Ok((QuadratureEstimate { value, abs_error, subdivisions }, peak))
}

/// ∫ₐ^∞ f for integrands that decay (at least) exponentially.
///
/// Integrates [a, a+w], then successive segments of doubling width, stopping
/// once a segment adds less than the tolerance and the integrand at the cutoff
/// is below `abs_tol` times the running peak of |f|.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    initial_width: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    spec.validate()?;
    check("a", a, true, "must be finite")?;
    check("initial_width", initial_width, initial_width > 0.0, "must be > 0")?;
    let mut lo = a;
    let mut width = initial_width;
    let mut total = 0.0;
    let mut error = 0.0;
    let mut peak: f64 = 0.0;
    for _ in 0..128 {
        let hi = lo + width;
        let (seg, seg_peak) = adaptive(&f, lo, hi, spec)?;
        total += seg.value;
        error += seg.abs_error;
        peak = peak.max(seg_peak);
        let tail = f(hi).abs();
        if seg.value.abs() <= spec.target(total) && tail <= spec.abs_tol * peak {
            return Ok(total);
        }
        lo = hi;
        width *= 2.0;
    }
    Err(Error::Convergence { estimate: total, error_bound: error })
}

//! Bump trains and the two closed-form examples: the unbounded Stepanov
//! almost automorphic signal `a = Σ β_n` and the resonant sine
//! `b(t) = sin(1 / (2 + cos t + cos √2 t))`.

use alloc::vec::Vec;

use crate::quadrature::{integrate_panels, GaussLegendre, PANEL_ORDER};

/// Panels per bump support used by every quadrature that meets a bump.
pub const PANELS_PER_BUMP: usize = 8;

/// Profile of a single bump.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BumpShape {
    /// `exp(1 - 1/(1 - 4s²))` on `|s| < 1/2`.
    #[default]
    Smooth,
    /// `cos²(πs)` on `|s| < 1/2`; only C¹ at the support edges.
    CosineSquared,
}

impl BumpShape {
    pub fn id(self) -> &'static str {
        match self {
            BumpShape::Smooth => "smooth",
            BumpShape::CosineSquared => "cos2",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        match id {
            "smooth" => Some(BumpShape::Smooth),
            "cos2" => Some(BumpShape::CosineSquared),
            _ => None,
        }
    }
}

/// A bump `H` with `H(0) = 1`, support inside `(-1/2, 1/2)`, and its
/// integral `I_H` computed once at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpSpec {
    shape: BumpShape,
    integral: f64,
}

impl Default for BumpSpec {
    fn default() -> Self {
        Self::new(BumpShape::Smooth)
    }
}

impl BumpSpec {
    pub fn new(shape: BumpShape) -> Self {
        let rule = GaussLegendre::new(PANEL_ORDER);
        let breaks: Vec<f64> = (1..32).map(|k| -0.5 + k as f64 / 32.0).collect();
        let integral = integrate_panels(&rule, -0.5, 0.5, 1, &breaks, |s| shape_value(shape, s));
        Self { shape, integral }
    }

    pub fn shape(&self) -> BumpShape {
        self.shape
    }

    /// `I_H = ∫ H`.
    pub fn integral(&self) -> f64 {
        self.integral
    }

    pub fn peak(&self) -> f64 {
        1.0
    }

    pub fn eval(&self, s: f64) -> f64 {
        shape_value(self.shape, s)
    }
}

fn shape_value(shape: BumpShape, s: f64) -> f64 {
    if !(libm::fabs(s) < 0.5) {
        return 0.0;
    }
    match shape {
        BumpShape::Smooth => libm::exp(1.0 - 1.0 / (1.0 - 4.0 * s * s)),
        BumpShape::CosineSquared => {
            let c = libm::cos(core::f64::consts::PI * s);
            c * c
        }
    }
}

/// `H(s)`; zero for `|s| >= 1/2`.
pub fn eval_bump(spec: &BumpSpec, s: f64) -> f64 {
    spec.eval(s)
}

/// `3^n` as a float.
pub fn pow3(n: u32) -> f64 {
    libm::pow(3.0, n as f64)
}

/// Half-width `1/(2n²)` of the level-`n` spikes.
pub fn level_half_width(n: u32) -> f64 {
    0.5 / ((n as f64) * (n as f64))
}

/// Nearest point of the lattice `P_n = 3ⁿ(2ℤ+1)` to `t`.
pub fn nearest_lattice_point(n: u32, t: f64) -> f64 {
    let p = pow3(n);
    let j = libm::round((t / p - 1.0) * 0.5);
    p * (2.0 * j + 1.0)
}

/// `β_n(t) = Σ_{i∈P_n} H(n²(t - i))`, evaluated through the single nearest
/// lattice point.
pub fn eval_beta(n: u32, t: f64, spec: &BumpSpec) -> f64 {
    assert!(n >= 1, "bump levels start at 1");
    let centre = nearest_lattice_point(n, t);
    let d = t - centre;
    if libm::fabs(d) < level_half_width(n) {
        let n2 = (n as f64) * (n as f64);
        spec.eval(n2 * d)
    } else {
        0.0
    }
}

/// Spike centres of level `n` whose support meets `[lo, hi]`.
pub fn level_centres(n: u32, lo: f64, hi: f64, out: &mut Vec<f64>) {
    let p = pow3(n);
    let hw = level_half_width(n);
    let first = libm::ceil(((lo - hw) / p - 1.0) * 0.5);
    let last = libm::floor(((hi + hw) / p - 1.0) * 0.5);
    let mut j = first;
    while j <= last {
        let c = p * (2.0 * j + 1.0);
        if c + hw > lo && c - hw < hi {
            out.push(c);
        }
        j += 1.0;
    }
}

/// The truncated series `a(t) = Σ_{n=1}^{N_max} β_n(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnboundedAASpec {
    pub bump: BumpSpec,
    pub max_level: u32,
}

impl UnboundedAASpec {
    pub fn new(bump: BumpSpec, max_level: u32) -> Self {
        assert!(max_level >= 1, "level cutoff must be positive");
        Self { bump, max_level }
    }

    /// True once `|t|` reaches the first lattice point of the omitted level
    /// `N_max + 1`, where truncation starts to matter.
    pub fn is_stale(&self, t: f64) -> bool {
        libm::fabs(t) >= pow3(self.max_level + 1) - 1.0
    }

    /// Breakpoints of every spike meeting `[lo, hi]`: support edges plus an
    /// even split of each support into [`PANELS_PER_BUMP`] panels.
    pub fn breakpoints(&self, lo: f64, hi: f64, out: &mut Vec<f64>) {
        let mut centres = Vec::new();
        for n in 1..=self.max_level {
            centres.clear();
            level_centres(n, lo, hi, &mut centres);
            let hw = level_half_width(n);
            for &c in &centres {
                for k in 0..=PANELS_PER_BUMP {
                    out.push(c - hw + 2.0 * hw * (k as f64 / PANELS_PER_BUMP as f64));
                }
            }
        }
    }

    /// Narrowest spike support (`1/n²`) meeting `[lo, hi]`.
    pub fn feature_width(&self, lo: f64, hi: f64) -> f64 {
        let mut centres = Vec::new();
        let mut width = f64::INFINITY;
        for n in 1..=self.max_level {
            centres.clear();
            level_centres(n, lo, hi, &mut centres);
            if !centres.is_empty() {
                width = libm::fmin(width, 2.0 * level_half_width(n));
            }
        }
        width
    }
}

impl Default for UnboundedAASpec {
    fn default() -> Self {
        Self::new(BumpSpec::default(), 8)
    }
}

/// `a(t)` truncated at `spec.max_level`.
pub fn eval_a(t: f64, spec: &UnboundedAASpec) -> f64 {
    let mut acc = 0.0;
    for n in 1..=spec.max_level {
        acc += eval_beta(n, t, &spec.bump);
    }
    acc
}

/// Denominator `2 + cos t + cos √2 t` of the resonant sine.
pub fn resonance_denominator(t: f64) -> f64 {
    2.0 + libm::cos(t) + libm::cos(core::f64::consts::SQRT_2 * t)
}

/// `b(t) = sin(1/(2 + cos t + cos √2 t))`.
pub fn eval_b(t: f64) -> f64 {
    libm::sin(1.0 / resonance_denominator(t))
}

/// Largest finite-difference slope of `b` found on a span.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeScan {
    pub max_slope: f64,
    pub at: f64,
    /// Smallest denominator value located on the span.
    pub min_denominator: f64,
}

/// Scans `[lo, hi]` for the steepest centred finite-difference slope of `b`.
///
/// A coarse grid of step `coarse_step` locates local minima of the
/// denominator; each is refined by golden-section search and the slope is
/// then sampled on 4001 points across `±4√D_min`, with a difference step
/// scaled as `10⁻³ D_min^{3/2}`. A plain grid cannot witness the growth: its
/// slopes saturate at `1/step`.
pub fn resonance_slope_scan(lo: f64, hi: f64, coarse_step: f64) -> SlopeScan {
    assert!(hi > lo && coarse_step > 0.0);
    let count = libm::ceil((hi - lo) / coarse_step) as usize;
    let at = |i: usize| lo + coarse_step * i as f64;
    let mut best = SlopeScan {
        max_slope: 0.0,
        at: lo,
        min_denominator: f64::INFINITY,
    };
    let mut d_prev = resonance_denominator(at(0));
    let mut d_cur = resonance_denominator(at(1));
    for i in 1..count {
        let d_next = resonance_denominator(at(i + 1));
        if d_cur < d_prev && d_cur <= d_next {
            let (t_min, d_min) = golden_min(at(i - 1), at(i + 1));
            best.min_denominator = libm::fmin(best.min_denominator, d_min);
            let half = 4.0 * libm::sqrt(d_min);
            let h = 1e-3 * d_min * libm::sqrt(d_min);
            let samples = 4000;
            for k in 0..=samples {
                let t = t_min - half + 2.0 * half * (k as f64 / samples as f64);
                if t < lo || t > hi {
                    continue;
                }
                let slope = libm::fabs(eval_b(t + h) - eval_b(t - h)) / (2.0 * h);
                if slope > best.max_slope {
                    best.max_slope = slope;
                    best.at = t;
                }
            }
        }
        d_prev = d_cur;
        d_cur = d_next;
    }
    best
}

fn golden_min(mut lo: f64, mut hi: f64) -> (f64, f64) {
    const R: f64 = 0.618_033_988_749_894_9;
    for _ in 0..80 {
        let m1 = hi - R * (hi - lo);
        let m2 = lo + R * (hi - lo);
        if resonance_denominator(m1) < resonance_denominator(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let t = 0.5 * (lo + hi);
    (t, resonance_denominator(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_peak_and_support() {
        let h = BumpSpec::default();
        assert_eq!(eval_bump(&h, 0.0), 1.0);
        assert_eq!(eval_bump(&h, 0.5), 0.0);
        assert_eq!(eval_bump(&h, -0.5), 0.0);
        assert_eq!(eval_bump(&h, 3.0), 0.0);
        assert!(eval_bump(&h, 0.499) >= 0.0);
        assert!(eval_bump(&h, 0.25) < 1.0);
    }

    #[test]
    fn cosine_bump_integral_is_one_half() {
        let h = BumpSpec::new(BumpShape::CosineSquared);
        assert!((h.integral() - 0.5).abs() < 1e-13);
        assert_eq!(h.eval(0.0), 1.0);
    }

    #[test]
    fn beta_examples() {
        let h = BumpSpec::default();
        assert_eq!(eval_beta(1, 3.0, &h), 1.0);
        assert_eq!(eval_beta(2, 3.0, &h), 0.0);
        assert_eq!(eval_beta(1, 0.0, &h), 0.0);
        assert_eq!(eval_beta(1, -3.0, &h), 1.0);
        assert_eq!(nearest_lattice_point(2, 3.0), 9.0);
    }

    #[test]
    fn a_examples() {
        let spec = UnboundedAASpec::new(BumpSpec::default(), 4);
        assert_eq!(eval_a(9.0, &spec), 2.0);
        assert_eq!(eval_a(27.0, &spec), 3.0);
        assert_eq!(eval_a(0.0, &spec), 0.0);
        assert_eq!(eval_a(81.0, &spec), 4.0);
        assert!(!spec.is_stale(200.0));
        assert!(spec.is_stale(242.0));
    }

    #[test]
    fn b_at_zero_and_range() {
        assert!((eval_b(0.0) - libm::sin(0.25)).abs() < 1e-15);
        assert!((eval_b(0.0) - 0.247_404_0).abs() < 1e-7);
        for i in 0..10_000 {
            let v = eval_b(i as f64 * 0.137);
            assert!((-1.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn level_centres_match_lattice() {
        let mut c = Vec::new();
        level_centres(1, 0.0, 20.0, &mut c);
        assert_eq!(c, [3.0, 9.0, 15.0]);
        c.clear();
        level_centres(2, -10.0, 30.0, &mut c);
        assert_eq!(c, [-9.0, 9.0, 27.0]);
        c.clear();
        // The support of the spike at 3 reaches down to 2.5.
        level_centres(1, 2.6, 2.7, &mut c);
        assert_eq!(c, [3.0]);
    }
}

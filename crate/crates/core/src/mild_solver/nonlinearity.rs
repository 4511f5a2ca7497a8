use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::spectral_heat::SpectralBasis;

/// Pointwise reaction terms `g` known to the solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NonlinearityKind {
    Zero,
    /// `g(r) = -r³`.
    Cubic,
    /// `g(r) = +r³`: violates the growth condition and blows up.
    CubicPlus,
    /// `g(r) = λ r (1 - |r|)`.
    Logistic(f64),
    /// `g(r) = c r`.
    Linear(f64),
}

/// Numerically checked structural properties of `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearityFlags {
    pub vanishes_at_zero: bool,
    /// `r ↦ g(r) - r` is nonincreasing.
    pub shifted_nonincreasing: bool,
    /// `r ↦ g(r) - r` is strictly decreasing.
    pub shifted_strictly_decreasing: bool,
    /// Largest `g(r)/r` over the far tail of the probe grid.
    pub limsup_ratio: f64,
    /// `limsup_ratio < λ₁`.
    pub below_lambda1: bool,
}

/// `g` together with its pseudo-spectral evaluation options.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearitySpec {
    pub kind: NonlinearityKind,
    /// Zero the top third of the modes after projecting `g(x)`.
    pub dealias: bool,
}

impl Default for NonlinearitySpec {
    fn default() -> Self {
        Self::new(NonlinearityKind::Cubic)
    }
}

impl NonlinearitySpec {
    pub fn new(kind: NonlinearityKind) -> Self {
        Self {
            kind,
            dealias: true,
        }
    }

    pub fn zero() -> Self {
        Self::new(NonlinearityKind::Zero)
    }

    /// Parses a registry id: `zero`, `cubic`, `cubic-plus`, `logistic:λ`
    /// (or `logistic-λ`), `linear:c`.
    pub fn parse(id: &str) -> Result<Self> {
        let id = id.trim();
        let kind = match id {
            "zero" => NonlinearityKind::Zero,
            "cubic" => NonlinearityKind::Cubic,
            "cubic-plus" => NonlinearityKind::CubicPlus,
            _ => {
                let (name, arg) = id
                    .split_once(':')
                    .or_else(|| id.split_once('-'))
                    .ok_or_else(|| invalid(format!("unknown nonlinearity `{id}`")))?;
                let value: f64 = arg
                    .trim()
                    .parse()
                    .map_err(|_| invalid(format!("bad parameter in nonlinearity `{id}`")))?;
                if !value.is_finite() {
                    return Err(invalid(format!("bad parameter in nonlinearity `{id}`")));
                }
                match name {
                    "logistic" => NonlinearityKind::Logistic(value),
                    "linear" => NonlinearityKind::Linear(value),
                    _ => return Err(invalid(format!("unknown nonlinearity `{id}`"))),
                }
            }
        };
        Ok(Self::new(kind))
    }

    pub fn id(&self) -> String {
        match self.kind {
            NonlinearityKind::Zero => "zero".into(),
            NonlinearityKind::Cubic => "cubic".into(),
            NonlinearityKind::CubicPlus => "cubic-plus".into(),
            NonlinearityKind::Logistic(l) => format!("logistic:{l}"),
            NonlinearityKind::Linear(c) => format!("linear:{c}"),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, NonlinearityKind::Zero) || self.kind == NonlinearityKind::Linear(0.0)
    }

    #[inline]
    pub fn g(&self, r: f64) -> f64 {
        match self.kind {
            NonlinearityKind::Zero => 0.0,
            NonlinearityKind::Cubic => -r * r * r,
            NonlinearityKind::CubicPlus => r * r * r,
            NonlinearityKind::Logistic(l) => l * r * (1.0 - libm::fabs(r)),
            NonlinearityKind::Linear(c) => c * r,
        }
    }

    /// Lipschitz constant of `g` on `[-R, R]`.
    pub fn lipschitz(&self, radius: f64) -> f64 {
        let r = libm::fabs(radius);
        match self.kind {
            NonlinearityKind::Zero => 0.0,
            NonlinearityKind::Cubic | NonlinearityKind::CubicPlus => 3.0 * r * r,
            NonlinearityKind::Logistic(l) => libm::fabs(l) * (1.0 + 2.0 * r),
            NonlinearityKind::Linear(c) => libm::fabs(c),
        }
    }

    /// Checks the structural hypotheses on a symmetric log-spaced probe grid.
    pub fn flags(&self, lambda1: f64) -> NonlinearityFlags {
        let probes = probe_grid();
        let shifted: Vec<f64> = probes.iter().map(|&r| self.g(r) - r).collect();
        let nonincreasing = shifted.windows(2).all(|w| w[1] <= w[0]);
        let strictly = shifted.windows(2).all(|w| w[1] < w[0]);
        let limsup_ratio = probes
            .iter()
            .filter(|r| libm::fabs(**r) >= 1e3)
            .map(|&r| self.g(r) / r)
            .fold(f64::NEG_INFINITY, f64::max);
        NonlinearityFlags {
            vanishes_at_zero: self.g(0.0) == 0.0,
            shifted_nonincreasing: nonincreasing,
            shifted_strictly_decreasing: strictly,
            limsup_ratio,
            below_lambda1: limsup_ratio < lambda1,
        }
    }

    /// `G(x)`: `g` applied on the grid of `coeffs`, projected back onto the
    /// modes. `grid` is scratch of length `N + 1`; the result lands in `out`.
    pub(crate) fn apply(&self, basis: &SpectralBasis, grid: &mut [f64], out: &mut [f64]) {
        if self.is_zero() {
            out.iter_mut().for_each(|v| *v = 0.0);
            return;
        }
        for v in grid.iter_mut() {
            *v = flush_subnormal(self.g(flush_subnormal(*v)));
        }
        basis.to_spectral_into(grid, out);
        if self.dealias {
            let keep = dealias_cutoff(basis.modes());
            out[keep..].iter_mut().for_each(|v| *v = 0.0);
        }
    }
}

/// Zero for subnormal input. Subnormal arithmetic is slow and the values it
/// carries are below any tolerance in play.
pub(crate) fn flush_subnormal(v: f64) -> f64 {
    if libm::fabs(v) < f64::MIN_POSITIVE {
        0.0
    } else {
        v
    }
}

/// Number of modes kept by the 2/3 rule.
pub fn dealias_cutoff(modes: usize) -> usize {
    ((2 * modes) / 3).max(1)
}

fn probe_grid() -> Vec<f64> {
    // ±10^e for e in [-6, 6] in steps of 1/8, plus 0.
    let mut pos: Vec<f64> = (0..=96)
        .map(|i| libm::pow(10.0, -6.0 + i as f64 / 8.0))
        .collect();
    let mut out: Vec<f64> = pos.iter().rev().map(|r| -r).collect();
    out.push(0.0);
    out.append(&mut pos);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn registry_round_trip() {
        for id in ["zero", "cubic", "cubic-plus", "logistic:0.5", "linear:-2"] {
            assert_eq!(NonlinearitySpec::parse(id).unwrap().id(), id);
        }
        assert_eq!(
            NonlinearitySpec::parse("logistic-2").unwrap().kind,
            NonlinearityKind::Logistic(2.0)
        );
        assert!(NonlinearitySpec::parse("quartic").is_err());
        assert!(NonlinearitySpec::parse("linear:x").is_err());
    }

    #[test]
    fn cubic_flags() {
        let f = NonlinearitySpec::default().flags(PI * PI);
        assert!(f.vanishes_at_zero);
        assert!(f.shifted_nonincreasing);
        assert!(f.shifted_strictly_decreasing);
        assert!(f.below_lambda1);
    }

    #[test]
    fn cubic_plus_fails_growth_condition() {
        let f = NonlinearitySpec::parse("cubic-plus")
            .unwrap()
            .flags(PI * PI);
        assert!(!f.below_lambda1);
        assert!(!f.shifted_nonincreasing);
    }

    #[test]
    fn linear_flags_follow_the_slope() {
        let below = NonlinearitySpec::parse("linear:5").unwrap().flags(PI * PI);
        assert!(below.below_lambda1);
        assert!(!below.shifted_nonincreasing);
        let above = NonlinearitySpec::parse("linear:20").unwrap().flags(PI * PI);
        assert!(!above.below_lambda1);
        let zero = NonlinearitySpec::zero().flags(PI * PI);
        assert!(zero.shifted_strictly_decreasing && zero.limsup_ratio == 0.0);
    }

    #[test]
    fn lipschitz_is_nondecreasing_and_dominates_slopes() {
        for id in ["cubic", "logistic:1.5", "linear:-3"] {
            let spec = NonlinearitySpec::parse(id).unwrap();
            let mut prev = 0.0;
            for i in 0..50 {
                let r = 0.1 * i as f64;
                let l = spec.lipschitz(r);
                assert!(l >= prev);
                prev = l;
                let (a, b) = (-r, r);
                if r > 0.0 {
                    assert!(libm::fabs(spec.g(b) - spec.g(a)) <= l * (b - a) * (1.0 + 1e-12));
                }
            }
        }
    }
}

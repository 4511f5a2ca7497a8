//! Windowed `L^p` norms: the Stepanov norm, translation distances and the
//! Bochner transform.

use alloc::vec::Vec;

use super::signal::{max_abs, Signal, Span};
use crate::error::{invalid, Error, Result};
use crate::quadrature::{panel_edges, GaussLegendre, PANEL_ORDER};

/// Default stride between scanned window origins.
pub const DEFAULT_STRIDE: f64 = 0.125;

/// Scan and quadrature settings for Stepanov norms. The window length is 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepanovConfig {
    pub p: f64,
    /// Baseline quadrature nodes per unit window, before breakpoint splits.
    pub nodes_per_window: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub stride: f64,
}

impl StepanovConfig {
    pub fn new(p: f64, t_min: f64, t_max: f64) -> Result<Self> {
        let cfg = Self {
            p,
            nodes_per_window: 4 * PANEL_ORDER,
            t_min,
            t_max,
            stride: DEFAULT_STRIDE,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_stride(mut self, stride: f64) -> Result<Self> {
        self.stride = stride;
        self.validate()?;
        Ok(self)
    }

    pub fn with_nodes(mut self, nodes: usize) -> Result<Self> {
        self.nodes_per_window = nodes;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p >= 1.0) || !self.p.is_finite() {
            return Err(invalid("Stepanov exponent must satisfy p >= 1"));
        }
        if self.nodes_per_window < 16 {
            return Err(invalid(
                "at least 16 quadrature nodes per window are required",
            ));
        }
        if !(self.t_min <= self.t_max) || !self.t_min.is_finite() || !self.t_max.is_finite() {
            return Err(invalid("scan range must be a nonempty finite interval"));
        }
        if !(self.stride > 0.0) {
            return Err(invalid("scan stride must be positive"));
        }
        Ok(())
    }

    /// Conjugate exponent `q` with `1/p + 1/q = 1` (`INFINITY` for `p = 1`).
    pub fn conjugate(&self) -> f64 {
        conjugate_exponent(self.p)
    }

    /// Window origins of the scan: the lattice `k·stride` inside the range,
    /// plus both endpoints. Anchoring at 0 makes the estimate monotone in the
    /// range.
    pub fn origins(&self) -> Vec<f64> {
        let mut out = Vec::new();
        out.push(self.t_min);
        let first = libm::ceil(self.t_min / self.stride) as i64;
        let last = libm::floor(self.t_max / self.stride) as i64;
        for k in first..=last {
            let t = k as f64 * self.stride;
            if t > self.t_min && t < self.t_max {
                out.push(t);
            }
        }
        if self.t_max > self.t_min {
            out.push(self.t_max);
        }
        out
    }

    pub(crate) fn base_panels(&self) -> usize {
        self.nodes_per_window.div_ceil(PANEL_ORDER)
    }
}

pub fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

/// Quadrature of `∫_lo^hi φ(s) ds` where `φ` sees the signal values through a
/// scratch buffer; panels split at every breakpoint of `sources`.
pub(crate) struct WindowQuadrature {
    rule: GaussLegendre,
    base_panels: usize,
    breaks: Vec<f64>,
}

impl WindowQuadrature {
    pub(crate) fn new(base_panels: usize) -> Self {
        Self {
            rule: GaussLegendre::new(PANEL_ORDER),
            base_panels,
            breaks: Vec::new(),
        }
    }

    pub(crate) fn edges(&mut self, lo: f64, hi: f64, sources: &[(&dyn Signal, f64)]) -> Vec<f64> {
        self.breaks.clear();
        for (sig, shift) in sources {
            let start = self.breaks.len();
            sig.breakpoints(lo + shift, hi + shift, &mut self.breaks);
            for b in &mut self.breaks[start..] {
                *b -= shift;
            }
        }
        let len = hi - lo;
        let panels = libm::ceil(len * self.base_panels as f64) as usize;
        panel_edges(lo, hi, panels.max(1), &self.breaks)
    }

    pub(crate) fn integrate(
        &mut self,
        lo: f64,
        hi: f64,
        sources: &[(&dyn Signal, f64)],
        mut f: impl FnMut(f64) -> f64,
    ) -> f64 {
        let edges = self.edges(lo, hi, sources);
        let mut acc = 0.0;
        for pair in edges.windows(2) {
            acc += self.rule.integrate(pair[0], pair[1], &mut f);
        }
        acc
    }
}

/// `(∫_t^{t+1} ‖f(s)‖^p ds)^{1/p}`.
pub fn window_norm(f: &dyn Signal, t: f64, p: f64, nodes_per_window: usize) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(invalid("Stepanov exponent must satisfy p >= 1"));
    }
    f.span().require(t, t + 1.0)?;
    let mut quad = WindowQuadrature::new(nodes_per_window.div_ceil(PANEL_ORDER));
    Ok(window_norm_with(&mut quad, f, t, p))
}

pub(crate) fn window_norm_with(quad: &mut WindowQuadrature, f: &dyn Signal, t: f64, p: f64) -> f64 {
    let mut buf = alloc::vec![0.0; f.dim()];
    let integral = quad.integrate(t, t + 1.0, &[(f, 0.0)], |s| {
        f.eval_into(s, &mut buf);
        pow_p(max_abs(&buf), p)
    });
    root_p(integral, p)
}

fn pow_p(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x
    } else if p == 2.0 {
        x * x
    } else {
        libm::pow(x, p)
    }
}

fn root_p(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x
    } else if p == 2.0 {
        libm::sqrt(x)
    } else {
        libm::pow(x, 1.0 / p)
    }
}

/// Window norms at every scan origin, in ascending order of origin.
pub fn stepanov_scan(f: &dyn Signal, cfg: &StepanovConfig) -> Result<Vec<(f64, f64)>> {
    cfg.validate()?;
    f.span().require(cfg.t_min, cfg.t_max + 1.0)?;
    let mut quad = WindowQuadrature::new(cfg.base_panels());
    Ok(cfg
        .origins()
        .into_iter()
        .map(|t| (t, window_norm_with(&mut quad, f, t, cfg.p)))
        .collect())
}

/// Scanned Stepanov norm `sup_t (∫_t^{t+1} ‖f‖^p)^{1/p}`.
///
/// The supremum is taken over [`StepanovConfig::origins`], so the result is
/// a lower bound of the norm over the whole line.
pub fn stepanov_norm(f: &dyn Signal, cfg: &StepanovConfig) -> Result<f64> {
    Ok(stepanov_scan(f, cfg)?
        .into_iter()
        .fold(0.0, |m, (_, v)| libm::fmax(m, v)))
}

/// `(∫_t^{t+1} ‖f(s + τ) - g(s)‖^p ds)^{1/p}`.
pub fn sp_translation_distance(
    f: &dyn Signal,
    g: &dyn Signal,
    tau: f64,
    t: f64,
    p: f64,
) -> Result<f64> {
    let mut quad = WindowQuadrature::new(4);
    translation_distance_with(&mut quad, f, g, tau, t, p)
}

pub(crate) fn translation_distance_with(
    quad: &mut WindowQuadrature,
    f: &dyn Signal,
    g: &dyn Signal,
    tau: f64,
    t: f64,
    p: f64,
) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(invalid("Stepanov exponent must satisfy p >= 1"));
    }
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: g.dim(),
        });
    }
    f.span().require(t + tau, t + 1.0 + tau)?;
    g.span().require(t, t + 1.0)?;
    let dim = f.dim();
    let mut a = alloc::vec![0.0; dim];
    let mut b = alloc::vec![0.0; dim];
    let integral = quad.integrate(t, t + 1.0, &[(f, tau), (g, 0.0)], |s| {
        f.eval_into(s + tau, &mut a);
        g.eval_into(s, &mut b);
        let d = a
            .iter()
            .zip(&b)
            .fold(0.0, |m, (x, y)| libm::fmax(m, libm::fabs(x - y)));
        pow_p(d, p)
    });
    Ok(root_p(integral, p))
}

/// The Bochner transform `t ↦ f(t + ·)|_{[0,1]}` of a signal.
#[derive(Debug, Clone, Copy)]
pub struct BochnerTransform<S> {
    signal: S,
}

impl<S: Signal> BochnerTransform<S> {
    pub fn new(signal: S) -> Self {
        Self { signal }
    }

    /// The window `s ↦ f(t + s)` on `[0, 1]`.
    pub fn window(&self, t: f64) -> Result<BochnerWindow<'_, S>> {
        self.signal.span().require(t, t + 1.0)?;
        Ok(BochnerWindow {
            signal: &self.signal,
            t,
        })
    }

    /// `φ(t, s) = f(t + s)` for `s ∈ [0, 1]`.
    pub fn phi(&self, t: f64, s: f64) -> Result<Vec<f64>> {
        self.window(t)?.eval(s)
    }
}

/// One window of a Bochner transform.
#[derive(Debug, Clone, Copy)]
pub struct BochnerWindow<'a, S> {
    signal: &'a S,
    t: f64,
}

impl<S: Signal> BochnerWindow<'_, S> {
    pub fn origin(&self) -> f64 {
        self.t
    }

    pub fn eval(&self, s: f64) -> Result<Vec<f64>> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::SpanViolation {
                t: s,
                lo: 0.0,
                hi: 1.0,
            });
        }
        let mut out = alloc::vec![0.0; self.signal.dim()];
        self.signal.eval_into(self.t + s, &mut out);
        Ok(out)
    }

    /// Samples the window on `count + 1` uniform points of `[0, 1]`.
    pub fn sample(&self, count: usize) -> Vec<(f64, Vec<f64>)> {
        let n = count.max(1);
        (0..=n)
            .map(|i| {
                let s = i as f64 / n as f64;
                let mut v = alloc::vec![0.0; self.signal.dim()];
                self.signal.eval_into(self.t + s, &mut v);
                (s, v)
            })
            .collect()
    }
}

/// Convenience wrapper: the sampled Bochner window of `f` at `t`.
pub fn bochner_transform(f: &dyn Signal, t: f64, count: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    Ok(BochnerTransform::new(f).window(t)?.sample(count))
}

/// Span a scan needs: every window `[t, t+1]` with `t` in the range.
pub fn required_span(cfg: &StepanovConfig) -> Span {
    Span::new(cfg.t_min, cfg.t_max + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aa_signals::bump::{BumpSpec, UnboundedAASpec};
    use crate::aa_signals::signal::{SampledSignal, SignalKind};
    use core::f64::consts::PI;

    #[test]
    fn constant_norm_is_its_modulus() {
        for p in [1.0, 1.5, 2.0, 3.0] {
            let cfg = StepanovConfig::new(p, -3.0, 5.0).unwrap();
            let n = stepanov_norm(&SignalKind::Const(-2.5), &cfg).unwrap();
            assert!((n - 2.5).abs() < 1e-13, "p={p}: {n}");
        }
    }

    #[test]
    fn unit_sine_p1_matches_two_over_pi() {
        let cfg = StepanovConfig::new(1.0, 0.0, 4.0).unwrap();
        let n = stepanov_norm(&SignalKind::unit_sine(), &cfg).unwrap();
        // |sin 2πs| has kinks at half-integers; base panels keep it accurate.
        assert!((n - 2.0 / PI).abs() < 1e-6, "{n}");
    }

    #[test]
    fn config_validation() {
        assert!(StepanovConfig::new(0.5, 0.0, 1.0).is_err());
        assert!(StepanovConfig::new(1.0, 2.0, 1.0).is_err());
        assert!(StepanovConfig::new(1.0, 0.0, 1.0)
            .unwrap()
            .with_nodes(8)
            .is_err());
        assert!(StepanovConfig::new(1.0, 0.0, 1.0)
            .unwrap()
            .with_stride(0.0)
            .is_err());
    }

    #[test]
    fn scan_outside_sampled_span_is_an_error() {
        let s = SampledSignal::scalar(alloc::vec![0.0, 2.0], alloc::vec![1.0, 1.0]).unwrap();
        let ok = StepanovConfig::new(1.0, 0.0, 1.0).unwrap();
        assert!(stepanov_norm(&s, &ok).is_ok());
        let bad = StepanovConfig::new(1.0, 0.0, 1.5).unwrap();
        assert!(matches!(
            stepanov_norm(&s, &bad),
            Err(Error::SpanViolation { .. })
        ));
    }

    #[test]
    fn origins_are_monotone_in_range() {
        let a = StepanovConfig::new(1.0, 0.0, 2.0).unwrap().origins();
        let b = StepanovConfig::new(1.0, 0.0, 3.3).unwrap().origins();
        assert!(a.iter().all(|t| b.contains(t)));
        assert_eq!(a.len(), 17);
    }

    #[test]
    fn distance_to_self_vanishes() {
        let a = SignalKind::Unbounded(UnboundedAASpec::new(BumpSpec::default(), 3));
        for t in [-2.0, 2.6, 8.5, 26.7] {
            let d = sp_translation_distance(&a, &a, 0.0, t, 1.0).unwrap();
            assert!(d < 1e-12);
        }
        let sine = SignalKind::unit_sine();
        let d = sp_translation_distance(&sine, &sine, 1.0, 0.3, 2.0).unwrap();
        assert!(d < 1e-9);
    }

    #[test]
    fn bochner_of_identity_is_a_shift() {
        let id = SampledSignal::scalar(alloc::vec![-10.0, 10.0], alloc::vec![-10.0, 10.0]).unwrap();
        let w = bochner_transform(&id, 2.0, 4).unwrap();
        for (s, v) in w {
            assert!((v[0] - (2.0 + s)).abs() < 1e-14);
        }
        assert!(bochner_transform(&id, 9.5, 4).is_err());
    }
}

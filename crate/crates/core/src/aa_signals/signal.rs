use alloc::boxed::Box;
use alloc::vec::Vec;

use super::bump::{
    eval_a, eval_b, eval_beta, level_centres, level_half_width, BumpSpec, UnboundedAASpec,
    PANELS_PER_BUMP,
};
use crate::error::{invalid, Error, Result};

/// Closed interval of the real line on which a signal is defined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Span {
    pub lo: f64,
    pub hi: f64,
}

impl Span {
    pub const REAL: Span = Span {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo && t <= self.hi
    }

    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        self.contains(lo) && self.contains(hi)
    }

    pub(crate) fn require(&self, lo: f64, hi: f64) -> Result<()> {
        if !self.contains(lo) {
            return Err(Error::SpanViolation {
                t: lo,
                lo: self.lo,
                hi: self.hi,
            });
        }
        if !self.contains(hi) {
            return Err(Error::SpanViolation {
                t: hi,
                lo: self.lo,
                hi: self.hi,
            });
        }
        Ok(())
    }
}

/// A function on (part of) the real line with values in `ℝ^dim`.
///
/// Pointwise norms are the max-norm over components, matching the uniform
/// norm on the field space when a signal carries grid values.
pub trait Signal {
    fn dim(&self) -> usize {
        1
    }

    fn span(&self) -> Span {
        Span::REAL
    }

    /// Writes the value at `t` into `out` (`out.len() == dim()`). The caller
    /// guarantees `t` lies inside [`Signal::span`].
    fn eval_into(&self, t: f64, out: &mut [f64]);

    /// Points in `[lo, hi]` where quadrature panels must be split.
    fn breakpoints(&self, _lo: f64, _hi: f64, _out: &mut Vec<f64>) {}

    /// Width of the narrowest feature meeting `[lo, hi]`. `INFINITY` for
    /// signals that are smooth at every scale of interest, `0` when there is
    /// a kink inside the interval.
    fn feature_width(&self, _lo: f64, _hi: f64) -> f64 {
        f64::INFINITY
    }
}

impl<S: Signal + ?Sized> Signal for &S {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn span(&self) -> Span {
        (**self).span()
    }
    fn eval_into(&self, t: f64, out: &mut [f64]) {
        (**self).eval_into(t, out)
    }
    fn breakpoints(&self, lo: f64, hi: f64, out: &mut Vec<f64>) {
        (**self).breakpoints(lo, hi, out)
    }
    fn feature_width(&self, lo: f64, hi: f64) -> f64 {
        (**self).feature_width(lo, hi)
    }
}

impl<S: Signal + ?Sized> Signal for Box<S> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn span(&self) -> Span {
        (**self).span()
    }
    fn eval_into(&self, t: f64, out: &mut [f64]) {
        (**self).eval_into(t, out)
    }
    fn breakpoints(&self, lo: f64, hi: f64, out: &mut Vec<f64>) {
        (**self).breakpoints(lo, hi, out)
    }
    fn feature_width(&self, lo: f64, hi: f64) -> f64 {
        (**self).feature_width(lo, hi)
    }
}

/// Span-checked evaluation helpers.
pub trait SignalExt: Signal {
    /// Scalar value at `t`; the first component for vector signals.
    fn value(&self, t: f64) -> Result<f64> {
        let span = self.span();
        if !span.contains(t) {
            return Err(Error::SpanViolation {
                t,
                lo: span.lo,
                hi: span.hi,
            });
        }
        if self.dim() == 1 {
            let mut v = [0.0];
            self.eval_into(t, &mut v);
            Ok(v[0])
        } else {
            let mut v = alloc::vec![0.0; self.dim()];
            self.eval_into(t, &mut v);
            Ok(v[0])
        }
    }

    fn values(&self, t: f64) -> Result<Vec<f64>> {
        let span = self.span();
        if !span.contains(t) {
            return Err(Error::SpanViolation {
                t,
                lo: span.lo,
                hi: span.hi,
            });
        }
        let mut v = alloc::vec![0.0; self.dim()];
        self.eval_into(t, &mut v);
        Ok(v)
    }

    /// Max-norm of the value at `t`.
    fn norm_at(&self, t: f64) -> Result<f64> {
        Ok(max_abs(&self.values(t)?))
    }
}

impl<S: Signal + ?Sized> SignalExt for S {}

pub(crate) fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| libm::fmax(m, libm::fabs(*x)))
}

/// Piecewise-linear signal through strictly increasing knots.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    times: Vec<f64>,
    /// Row-major: `values[i * dim + c]`.
    values: Vec<f64>,
    dim: usize,
}

impl SampledSignal {
    pub fn new(times: Vec<f64>, values: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("sampled signal needs a positive dimension"));
        }
        if times.len() < 2 {
            return Err(invalid("sampled signal needs at least two knots"));
        }
        if values.len() != times.len() * dim {
            return Err(Error::DimensionMismatch {
                expected: times.len() * dim,
                found: values.len(),
            });
        }
        if times.iter().any(|t| !t.is_finite()) || values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("sampled signal contains non-finite entries"));
        }
        if !times.windows(2).all(|w| w[0] < w[1]) {
            return Err(invalid("sample times must be strictly increasing"));
        }
        Ok(Self { times, values, dim })
    }

    pub fn scalar(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::new(times, values, 1)
    }

    /// Samples `f` on `count + 1` uniform knots over `[lo, hi]`.
    pub fn tabulate(f: &dyn Signal, lo: f64, hi: f64, count: usize) -> Result<Self> {
        f.span().require(lo, hi)?;
        let dim = f.dim();
        let n = count.max(1);
        let mut times = Vec::with_capacity(n + 1);
        let mut values = alloc::vec![0.0; (n + 1) * dim];
        for i in 0..=n {
            let t = if i == n {
                hi
            } else {
                lo + (hi - lo) * (i as f64 / n as f64)
            };
            times.push(t);
            f.eval_into(t, &mut values[i * dim..(i + 1) * dim]);
        }
        Self::new(times, values, dim)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Smallest spacing between consecutive knots.
    pub fn min_spacing(&self) -> f64 {
        self.times
            .windows(2)
            .fold(f64::INFINITY, |m, w| libm::fmin(m, w[1] - w[0]))
    }

    fn segment(&self, t: f64) -> usize {
        let idx = self.times.partition_point(|&x| x <= t);
        idx.clamp(1, self.times.len() - 1) - 1
    }
}

impl Signal for SampledSignal {
    fn dim(&self) -> usize {
        self.dim
    }

    fn span(&self) -> Span {
        Span::new(self.times[0], *self.times.last().unwrap())
    }

    fn eval_into(&self, t: f64, out: &mut [f64]) {
        let i = self.segment(t);
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let w = (t - t0) / (t1 - t0);
        let a = &self.values[i * self.dim..(i + 1) * self.dim];
        let b = &self.values[(i + 1) * self.dim..(i + 2) * self.dim];
        for c in 0..self.dim {
            out[c] = if w == 0.0 {
                a[c]
            } else {
                a[c] + w * (b[c] - a[c])
            };
        }
    }

    fn breakpoints(&self, lo: f64, hi: f64, out: &mut Vec<f64>) {
        let start = self.times.partition_point(|&x| x < lo);
        for &t in &self.times[start..] {
            if t > hi {
                break;
            }
            out.push(t);
        }
    }

    fn feature_width(&self, lo: f64, hi: f64) -> f64 {
        let start = self.times.partition_point(|&x| x <= lo);
        match self.times.get(start) {
            Some(&t) if t < hi => 0.0,
            _ => f64::INFINITY,
        }
    }
}

/// The signal registry.
#[derive(Debug, Clone, PartialEq)]
pub enum SignalKind {
    /// The bump `H` itself.
    Bump(BumpSpec),
    /// One level `β_n` of the bump train.
    Beta {
        level: u32,
        bump: BumpSpec,
    },
    /// `a = Σ_{n ≤ N_max} β_n`.
    Unbounded(UnboundedAASpec),
    /// `b(t) = sin(1/(2 + cos t + cos √2 t))`.
    Resonant,
    /// `sin(ω t)`.
    Sine {
        omega: f64,
    },
    Const(f64),
    Sampled(SampledSignal),
    Scaled(f64, Box<SignalKind>),
    Sum(Vec<SignalKind>),
}

impl SignalKind {
    /// `sin(2πt)`, the default `sin` registry entry.
    pub fn unit_sine() -> Self {
        SignalKind::Sine {
            omega: 2.0 * core::f64::consts::PI,
        }
    }

    /// The temporal part `b + a` of the reference forcing.
    pub fn resonant_plus_unbounded(spec: UnboundedAASpec) -> Self {
        SignalKind::Sum(alloc::vec![
            SignalKind::Resonant,
            SignalKind::Unbounded(spec)
        ])
    }

    fn scalar(&self, t: f64) -> f64 {
        match self {
            SignalKind::Bump(h) => h.eval(t),
            SignalKind::Beta { level, bump } => eval_beta(*level, t, bump),
            SignalKind::Unbounded(spec) => eval_a(t, spec),
            SignalKind::Resonant => eval_b(t),
            SignalKind::Sine { omega } => libm::sin(omega * t),
            SignalKind::Const(c) => *c,
            SignalKind::Sampled(s) => {
                let mut v = [0.0];
                s.eval_into(t, &mut v);
                v[0]
            }
            SignalKind::Scaled(c, inner) => c * inner.scalar(t),
            SignalKind::Sum(parts) => parts.iter().map(|p| p.scalar(t)).sum(),
        }
    }
}

impl Signal for SignalKind {
    fn dim(&self) -> usize {
        match self {
            SignalKind::Sampled(s) => s.dim(),
            SignalKind::Scaled(_, inner) => inner.dim(),
            _ => 1,
        }
    }

    fn span(&self) -> Span {
        match self {
            SignalKind::Sampled(s) => s.span(),
            SignalKind::Scaled(_, inner) => inner.span(),
            SignalKind::Sum(parts) => parts.iter().fold(Span::REAL, |acc, p| {
                let s = p.span();
                Span::new(libm::fmax(acc.lo, s.lo), libm::fmin(acc.hi, s.hi))
            }),
            _ => Span::REAL,
        }
    }

    fn eval_into(&self, t: f64, out: &mut [f64]) {
        match self {
            SignalKind::Sampled(s) => s.eval_into(t, out),
            SignalKind::Scaled(c, inner) if inner.dim() > 1 => {
                inner.eval_into(t, out);
                out.iter_mut().for_each(|v| *v *= c);
            }
            _ => out[0] = self.scalar(t),
        }
    }

    fn breakpoints(&self, lo: f64, hi: f64, out: &mut Vec<f64>) {
        match self {
            SignalKind::Bump(_) => {
                for k in 0..=PANELS_PER_BUMP {
                    out.push(-0.5 + k as f64 / PANELS_PER_BUMP as f64);
                }
            }
            SignalKind::Beta { level, .. } => {
                let mut centres = Vec::new();
                level_centres(*level, lo, hi, &mut centres);
                let hw = level_half_width(*level);
                for c in centres {
                    for k in 0..=PANELS_PER_BUMP {
                        out.push(c - hw + 2.0 * hw * (k as f64 / PANELS_PER_BUMP as f64));
                    }
                }
            }
            SignalKind::Unbounded(spec) => spec.breakpoints(lo, hi, out),
            SignalKind::Sampled(s) => s.breakpoints(lo, hi, out),
            SignalKind::Scaled(_, inner) => inner.breakpoints(lo, hi, out),
            SignalKind::Sum(parts) => parts.iter().for_each(|p| p.breakpoints(lo, hi, out)),
            // Zeros of a sine are kinks of |f|^p.
            SignalKind::Sine { omega } if *omega != 0.0 => {
                let step = core::f64::consts::PI / libm::fabs(*omega);
                let first = libm::ceil(lo / step) as i64;
                let last = libm::floor(hi / step) as i64;
                for k in first..=last {
                    out.push(k as f64 * step);
                }
            }
            SignalKind::Resonant | SignalKind::Sine { .. } | SignalKind::Const(_) => {}
        }
    }

    fn feature_width(&self, lo: f64, hi: f64) -> f64 {
        match self {
            SignalKind::Bump(_) => {
                if hi > -0.5 && lo < 0.5 {
                    1.0
                } else {
                    f64::INFINITY
                }
            }
            SignalKind::Beta { level, .. } => {
                let mut centres = Vec::new();
                level_centres(*level, lo, hi, &mut centres);
                if centres.is_empty() {
                    f64::INFINITY
                } else {
                    2.0 * level_half_width(*level)
                }
            }
            SignalKind::Unbounded(spec) => spec.feature_width(lo, hi),
            SignalKind::Sampled(s) => s.feature_width(lo, hi),
            SignalKind::Scaled(_, inner) => inner.feature_width(lo, hi),
            SignalKind::Sum(parts) => parts
                .iter()
                .fold(f64::INFINITY, |m, p| libm::fmin(m, p.feature_width(lo, hi))),
            SignalKind::Resonant | SignalKind::Sine { .. } | SignalKind::Const(_) => f64::INFINITY,
        }
    }
}

/// `t ↦ f(t + shift)`.
#[derive(Debug, Clone, Copy)]
pub struct Shifted<S> {
    pub inner: S,
    pub shift: f64,
}

impl<S: Signal> Signal for Shifted<S> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn span(&self) -> Span {
        let s = self.inner.span();
        Span::new(s.lo - self.shift, s.hi - self.shift)
    }
    fn eval_into(&self, t: f64, out: &mut [f64]) {
        self.inner.eval_into(t + self.shift, out)
    }
    fn breakpoints(&self, lo: f64, hi: f64, out: &mut Vec<f64>) {
        let start = out.len();
        self.inner
            .breakpoints(lo + self.shift, hi + self.shift, out);
        for b in &mut out[start..] {
            *b -= self.shift;
        }
    }
    fn feature_width(&self, lo: f64, hi: f64) -> f64 {
        self.inner.feature_width(lo + self.shift, hi + self.shift)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampled_interpolates_linearly_and_rejects_outside() {
        let s =
            SampledSignal::scalar(alloc::vec![0.0, 1.0, 3.0], alloc::vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(s.value(0.5).unwrap(), 1.0);
        assert_eq!(s.value(2.0).unwrap(), 1.0);
        assert_eq!(s.value(3.0).unwrap(), 0.0);
        assert!(matches!(s.value(3.5), Err(Error::SpanViolation { .. })));
        assert!(matches!(s.value(-0.1), Err(Error::SpanViolation { .. })));
    }

    #[test]
    fn sampled_rejects_unsorted_knots() {
        assert!(SampledSignal::scalar(alloc::vec![0.0, 0.0], alloc::vec![1.0, 1.0]).is_err());
        assert!(SampledSignal::scalar(alloc::vec![1.0, 0.0], alloc::vec![1.0, 1.0]).is_err());
        assert!(SampledSignal::scalar(alloc::vec![0.0], alloc::vec![1.0]).is_err());
    }

    #[test]
    fn registry_evaluation_is_deterministic() {
        let kinds = [
            SignalKind::Resonant,
            SignalKind::Unbounded(UnboundedAASpec::default()),
            SignalKind::unit_sine(),
            SignalKind::Const(2.0),
        ];
        for k in &kinds {
            for i in 0..100 {
                let t = i as f64 * 0.731 - 20.0;
                assert_eq!(k.value(t).unwrap().to_bits(), k.value(t).unwrap().to_bits());
            }
        }
    }

    #[test]
    fn shifted_breakpoints_move_with_the_shift() {
        let a = SignalKind::Unbounded(UnboundedAASpec::new(BumpSpec::default(), 2));
        let shifted = Shifted {
            inner: &a,
            shift: 6.0,
        };
        let mut b = Vec::new();
        shifted.breakpoints(-3.5, -2.5, &mut b);
        // Spike at 3 seen from t = -3.
        assert!(b.iter().any(|&x| (x + 3.0).abs() < 1e-12));
        assert_eq!(shifted.value(-3.0).unwrap(), 1.0);
    }
}

use alloc::vec::Vec;

use super::signal::{SampledSignal, Shifted, Signal};
use super::stepanov::{translation_distance_with, StepanovConfig, WindowQuadrature};
use crate::error::{invalid, Result};

/// Default threshold under which the tail of a ladder counts as converged.
pub const DEFAULT_VERDICT_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecurrenceVerdict {
    /// Tail distances shrink monotonically below the threshold. Evidence of
    /// Stepanov recurrence along the ladder, not a proof of it.
    RecurrenceConsistent,
    Inconclusive,
}

/// Output of [`aa_translation_test`].
#[derive(Debug, Clone, PartialEq)]
pub struct TranslationTestReport {
    pub ladder: Vec<f64>,
    /// `distances[n][m]`: max over the windows of the `S^p` distance between
    /// `f(· + s_n - s_m)` and `f`.
    pub distances: Vec<Vec<f64>>,
    /// `tail[m] = max_{n > m} distances[n][m]`.
    pub tail: Vec<f64>,
    pub threshold: f64,
    pub verdict: RecurrenceVerdict,
    /// `f(· + s_last)` tabulated over the windows, kept when the verdict is
    /// recurrence-consistent.
    pub limit_candidate: Option<SampledSignal>,
}

/// Powers-of-three ladder `s_m = 2·3^m` for `m` in `first..=last`.
pub fn pow3_ladder(first: u32, last: u32) -> Vec<f64> {
    (first..=last).map(|m| 2.0 * super::bump::pow3(m)).collect()
}

/// Ladder of denominators `q` of the continued-fraction convergents of √2
/// scaled by `2π`: shifts that nearly realign both `cos t` and `cos √2 t`.
pub fn sqrt2_ladder(count: usize) -> Vec<f64> {
    // Pell denominators 1, 2, 5, 12, 29, ...
    let (mut q0, mut q1) = (1u64, 2u64);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        out.push(2.0 * core::f64::consts::PI * q0 as f64);
        let next = 2 * q1 + q0;
        q0 = q1;
        q1 = next;
    }
    out
}

/// Fills the pairwise `S^p` distance matrix of the translates `f(· + s_n)`.
pub fn aa_translation_test(
    f: &dyn Signal,
    ladder: &[f64],
    cfg: &StepanovConfig,
    windows: &[f64],
    threshold: f64,
) -> Result<TranslationTestReport> {
    cfg.validate()?;
    if ladder.len() < 3 {
        return Err(invalid("translation ladder needs at least three shifts"));
    }
    if windows.is_empty() {
        return Err(invalid("translation test needs at least one window"));
    }
    let n = ladder.len();
    let mut quad = WindowQuadrature::new(cfg.base_panels());
    let mut distances = alloc::vec![alloc::vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let tau = ladder[i] - ladder[j];
            let mut worst: f64 = 0.0;
            for &t in windows {
                let d = translation_distance_with(&mut quad, f, f, tau, t, cfg.p)?;
                worst = worst.max(d);
            }
            distances[i][j] = worst;
        }
    }
    let tail: Vec<f64> = (0..n - 1)
        .map(|m| (m + 1..n).fold(0.0, |acc: f64, k| acc.max(distances[k][m])))
        .collect();
    let shrinking = tail.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let verdict = if shrinking && *tail.last().unwrap() < threshold {
        RecurrenceVerdict::RecurrenceConsistent
    } else {
        RecurrenceVerdict::Inconclusive
    };
    let limit_candidate = match verdict {
        RecurrenceVerdict::RecurrenceConsistent => {
            let lo = windows.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = windows.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 1.0;
            let shifted = Shifted {
                inner: f,
                shift: *ladder.last().unwrap(),
            };
            let count = (libm::ceil((hi - lo) * 256.0) as usize).max(2);
            Some(SampledSignal::tabulate(&shifted, lo, hi, count)?)
        }
        RecurrenceVerdict::Inconclusive => None,
    };
    Ok(TranslationTestReport {
        ladder: ladder.to_vec(),
        distances,
        tail,
        threshold,
        verdict,
        limit_candidate,
    })
}

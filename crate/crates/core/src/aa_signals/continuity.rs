use alloc::vec::Vec;

use super::signal::Signal;
use crate::error::{invalid, Result};

/// One row of a modulus-of-continuity table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusRow {
    pub delta: f64,
    pub omega: f64,
}

/// Empirical modulus of continuity
/// `ω(δ) = max { ‖x(t) - x(s)‖ : t, s on the lattice, |t - s| ≤ δ }`.
///
/// `x` is evaluated on the lattice `lo + i·spacing` covering `span`; every δ
/// must be at least twice the lattice spacing. Values are streamed through a
/// ring buffer, so memory is `(δ_max / spacing) · dim`.
pub fn uniform_continuity_modulus(
    x: &dyn Signal,
    deltas: &[f64],
    span: (f64, f64),
    spacing: f64,
) -> Result<Vec<ModulusRow>> {
    let (lo, hi) = span;
    if !(hi > lo) {
        return Err(invalid("modulus span must be nonempty"));
    }
    if !(spacing > 0.0) {
        return Err(invalid("lattice spacing must be positive"));
    }
    if deltas.is_empty() {
        return Err(invalid("no δ values requested"));
    }
    if let Some(&d) = deltas.iter().find(|&&d| !(d >= 2.0 * spacing)) {
        return Err(invalid(alloc::format!(
            "δ = {d} is below twice the lattice spacing {spacing}"
        )));
    }
    x.span().require(lo, hi)?;
    let dim = x.dim();
    let count = libm::floor((hi - lo) / spacing + 1e-9) as usize;
    // Lag thresholds in lattice steps; the tolerance absorbs δ values that
    // are exact multiples of the spacing.
    let lags: Vec<usize> = deltas
        .iter()
        .map(|d| libm::floor(d / spacing + 1e-9) as usize)
        .collect();
    let max_lag = lags.iter().copied().max().unwrap().min(count);
    // best[k]: max increment at lag exactly k.
    let mut best = alloc::vec![0.0f64; max_lag + 1];
    let ring_len = max_lag + 1;
    let mut ring = alloc::vec![0.0; ring_len * dim];
    for i in 0..=count {
        let t = lo + spacing * i as f64;
        let slot = i % ring_len;
        x.eval_into(t, &mut ring[slot * dim..(slot + 1) * dim]);
        let lag_limit = max_lag.min(i);
        for (k, b) in best.iter_mut().enumerate().take(lag_limit + 1).skip(1) {
            let other = (i - k) % ring_len;
            let mut d: f64 = 0.0;
            for c in 0..dim {
                d = d.max((ring[slot * dim + c] - ring[other * dim + c]).abs());
            }
            *b = b.max(d);
        }
    }
    let mut prefix = alloc::vec![0.0f64; max_lag + 1];
    for k in 1..=max_lag {
        prefix[k] = prefix[k - 1].max(best[k]);
    }
    Ok(deltas
        .iter()
        .zip(&lags)
        .map(|(&delta, &lag)| ModulusRow {
            delta,
            omega: prefix[lag.min(max_lag)],
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aa_signals::signal::SignalKind;

    #[test]
    fn constant_has_zero_modulus() {
        let rows = uniform_continuity_modulus(
            &SignalKind::Const(4.0),
            &[0.01, 0.1, 1.0],
            (0.0, 10.0),
            0.005,
        )
        .unwrap();
        assert!(rows.iter().all(|r| r.omega == 0.0));
    }

    #[test]
    fn sine_modulus_is_lipschitz_bounded() {
        let sine = SignalKind::Sine { omega: 1.0 };
        let deltas = [0.01, 0.05, 0.2, 1.0];
        let rows = uniform_continuity_modulus(&sine, &deltas, (0.0, 20.0), 0.001).unwrap();
        for r in &rows {
            assert!(r.omega <= r.delta + 1e-12, "{r:?}");
            // sin is steepest at its zeros, so the bound is nearly attained.
            assert!(r.omega >= 0.9 * 2.0 * libm::sin(r.delta / 2.0));
        }
        assert!(rows.windows(2).all(|w| w[0].omega <= w[1].omega));
    }

    #[test]
    fn delta_below_twice_spacing_is_rejected() {
        let e = uniform_continuity_modulus(&SignalKind::Const(1.0), &[0.01], (0.0, 1.0), 0.006);
        assert!(e.is_err());
    }
}

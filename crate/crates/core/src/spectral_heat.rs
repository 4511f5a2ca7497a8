//! The Dirichlet Laplacian on `(0, L)` in sine form and the heat semigroup
//! it generates.
//!
//! Fields are sampled on `N + 1` uniform nodes and expanded in the first `K`
//! orthonormal eigenfunctions `√(2/L) sin(kπξ/L)`. The transforms are direct
//! `O(KN)` projections with trapezoidal weights; for `K ≤ N - 1` discrete
//! orthogonality makes the round trip exact on band-limited fields.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};

/// `(L, K, N)`: enough to tell whether two fields share a basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisShape {
    pub length: f64,
    pub modes: usize,
    pub intervals: usize,
}

/// Eigenpairs of `-d²/dξ²` with Dirichlet conditions, sampled on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBasis {
    shape: BasisShape,
    eigenvalues: Vec<f64>,
    nodes: Vec<f64>,
    /// `table[k * (N+1) + j] = φ_{k+1}(ξ_j)`; exactly zero at both ends.
    table: Vec<f64>,
}

/// Builds the basis for `(0, L)` with `K` modes and `N` grid intervals.
pub fn assemble_basis(length: f64, modes: usize, intervals: usize) -> Result<SpectralBasis> {
    if !(length > 0.0) || !length.is_finite() {
        return Err(crate::error::invalid("interval length must be positive"));
    }
    if modes == 0 {
        return Err(crate::error::invalid("at least one mode is required"));
    }
    if intervals < 4 * modes {
        return Err(Error::ResolutionGuard {
            modes,
            intervals,
            required: 4 * modes,
        });
    }
    let n1 = intervals + 1;
    let nodes: Vec<f64> = (0..n1)
        .map(|j| {
            if j == intervals {
                length
            } else {
                length * j as f64 / intervals as f64
            }
        })
        .collect();
    let eigenvalues: Vec<f64> = (1..=modes)
        .map(|k| {
            let w = k as f64 * PI / length;
            w * w
        })
        .collect();
    let amp = libm::sqrt(2.0 / length);
    let mut table = alloc::vec![0.0; modes * n1];
    for k in 0..modes {
        for j in 1..intervals {
            // Reduce kj mod 2N before scaling so the phase stays exact.
            let phase = ((k + 1) * j) % (2 * intervals);
            table[k * n1 + j] = amp * libm::sin(PI * phase as f64 / intervals as f64);
        }
    }
    Ok(SpectralBasis {
        shape: BasisShape {
            length,
            modes,
            intervals,
        },
        eigenvalues,
        nodes,
        table,
    })
}

impl SpectralBasis {
    pub fn shape(&self) -> BasisShape {
        self.shape
    }

    pub fn length(&self) -> f64 {
        self.shape.length
    }

    pub fn modes(&self) -> usize {
        self.shape.modes
    }

    pub fn intervals(&self) -> usize {
        self.shape.intervals
    }

    /// Number of grid nodes, `N + 1`.
    pub fn grid_len(&self) -> usize {
        self.shape.intervals + 1
    }

    /// `λ_k = (kπ/L)²`, `k = 1..=K`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn lambda1(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Trapezoidal weight `L/N` of an interior node.
    pub fn node_weight(&self) -> f64 {
        self.shape.length / self.shape.intervals as f64
    }

    /// Sampled eigenfunction `φ_k` (1-based `k`).
    pub fn eigenfunction(&self, k: usize) -> &[f64] {
        let n1 = self.grid_len();
        &self.table[(k - 1) * n1..k * n1]
    }

    pub fn semigroup_params(&self) -> SemigroupParams {
        SemigroupParams {
            m: SUP_NORM_DECAY_CONSTANT,
            lambda1: self.lambda1(),
        }
    }

    /// Projection coefficients `c_k = Σ_j w_j x_j φ_k(ξ_j)`.
    pub fn to_spectral(&self, grid: &[f64]) -> Result<Vec<f64>> {
        self.check_grid(grid)?;
        let mut out = alloc::vec![0.0; self.modes()];
        self.to_spectral_into(grid, &mut out);
        Ok(out)
    }

    pub(crate) fn to_spectral_into(&self, grid: &[f64], out: &mut [f64]) {
        let n1 = self.grid_len();
        let w = self.node_weight();
        for (k, c) in out.iter_mut().enumerate() {
            let row = &self.table[k * n1..(k + 1) * n1];
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(grid) {
                acc += a * b;
            }
            *c = w * acc;
        }
    }

    /// Grid synthesis `x_j = Σ_k c_k φ_k(ξ_j)`.
    pub fn to_grid(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        self.check_coeffs(coeffs)?;
        let mut out = alloc::vec![0.0; self.grid_len()];
        self.to_grid_into(coeffs, &mut out);
        Ok(out)
    }

    pub(crate) fn to_grid_into(&self, coeffs: &[f64], out: &mut [f64]) {
        let n1 = self.grid_len();
        out.iter_mut().for_each(|v| *v = 0.0);
        for (k, &c) in coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let row = &self.table[k * n1..(k + 1) * n1];
            for (o, r) in out.iter_mut().zip(row) {
                *o += c * r;
            }
        }
    }

    /// Sine coefficients of an arbitrary function sampled on the grid, with
    /// no Dirichlet requirement. Used for profiles such as the constant 1,
    /// whose truncated expansion shows Gibbs oscillations.
    pub fn project_fn(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        let grid: Vec<f64> = self.nodes.iter().map(|&x| f(x)).collect();
        let mut out = alloc::vec![0.0; self.modes()];
        self.to_spectral_into(&grid, &mut out);
        out
    }

    fn check_grid(&self, grid: &[f64]) -> Result<()> {
        if grid.len() != self.grid_len() {
            return Err(Error::DimensionMismatch {
                expected: self.grid_len(),
                found: grid.len(),
            });
        }
        Ok(())
    }

    fn check_coeffs(&self, coeffs: &[f64]) -> Result<()> {
        if coeffs.len() != self.modes() {
            return Err(Error::DimensionMismatch {
                expected: self.modes(),
                found: coeffs.len(),
            });
        }
        Ok(())
    }
}

/// Best constant `M` in `‖T(t)‖_∞ ≤ M e^{-λ₁t}` for the Dirichlet heat
/// semigroup on an interval. `M = 1` holds in `L²` but not in the uniform
/// norm: the survival probability from the midpoint behaves like
/// `(4/π) e^{-λ₁t}`.
pub const SUP_NORM_DECAY_CONSTANT: f64 = 4.0 / PI;

/// Decay constants of the heat semigroup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemigroupParams {
    pub m: f64,
    pub lambda1: f64,
}

impl SemigroupParams {
    pub fn bound(&self, t: f64) -> f64 {
        self.m * libm::exp(-self.lambda1 * t)
    }
}

/// Which representations of a [`Field`] are authoritative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    /// Grid and coefficients agree through the transform.
    Both,
    /// The grid is authoritative; the coefficients are its `K`-mode
    /// projection and do not reproduce it.
    GridOnly,
}

/// A state on the interval grid paired with its sine coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    shape: BasisShape,
    grid: Vec<f64>,
    coeffs: Vec<f64>,
    repr: Representation,
}

impl Field {
    pub fn zero(basis: &SpectralBasis) -> Self {
        Self {
            shape: basis.shape(),
            grid: alloc::vec![0.0; basis.grid_len()],
            coeffs: alloc::vec![0.0; basis.modes()],
            repr: Representation::Both,
        }
    }

    pub fn from_coeffs(basis: &SpectralBasis, coeffs: Vec<f64>) -> Result<Self> {
        let grid = basis.to_grid(&coeffs)?;
        Ok(Self {
            shape: basis.shape(),
            grid,
            coeffs,
            repr: Representation::Both,
        })
    }

    /// Wraps grid values; both boundary values must vanish.
    pub fn from_grid(basis: &SpectralBasis, mut grid: Vec<f64>) -> Result<Self> {
        basis.check_grid(&grid)?;
        let scale = grid.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for &end in &[0, grid.len() - 1] {
            if grid[end].abs() > 1e-12 * scale || !grid[end].is_finite() {
                return Err(Error::NotDirichlet { value: grid[end] });
            }
            grid[end] = 0.0;
        }
        let coeffs = basis.to_spectral(&grid)?;
        let recon = basis.to_grid(&coeffs)?;
        let residual = recon
            .iter()
            .zip(&grid)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let repr = if residual <= 1e-10 * scale {
            Representation::Both
        } else {
            Representation::GridOnly
        };
        Ok(Self {
            shape: basis.shape(),
            grid,
            coeffs,
            repr,
        })
    }

    /// Samples `f` at the grid nodes.
    pub fn from_fn(basis: &SpectralBasis, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_grid(basis, basis.nodes().iter().map(|&x| f(x)).collect())
    }

    /// `amplitude · sin(kπξ/L)` (unit sup norm for unit amplitude).
    pub fn sine_mode(basis: &SpectralBasis, k: usize, amplitude: f64) -> Result<Self> {
        if k == 0 || k > basis.modes() {
            return Err(crate::error::invalid("mode index out of range"));
        }
        let mut c = alloc::vec![0.0; basis.modes()];
        c[k - 1] = amplitude * libm::sqrt(basis.length() / 2.0);
        Self::from_coeffs(basis, c)
    }

    pub fn shape(&self) -> BasisShape {
        self.shape
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub(crate) fn check_basis(&self, basis: &SpectralBasis) -> Result<()> {
        if self.shape != basis.shape() {
            return Err(Error::BasisMismatch);
        }
        Ok(())
    }

    /// `a·self + b·other` on both representations.
    pub fn combine(&self, a: f64, other: &Field, b: f64) -> Result<Field> {
        if self.shape != other.shape {
            return Err(Error::BasisMismatch);
        }
        let zip = |x: &[f64], y: &[f64]| -> Vec<f64> {
            x.iter().zip(y).map(|(p, q)| a * p + b * q).collect()
        };
        let repr = if self.repr == Representation::Both && other.repr == Representation::Both {
            Representation::Both
        } else {
            Representation::GridOnly
        };
        Ok(Field {
            shape: self.shape,
            grid: zip(&self.grid, &other.grid),
            coeffs: zip(&self.coeffs, &other.coeffs),
            repr,
        })
    }

    pub fn scaled(&self, a: f64) -> Field {
        Field {
            shape: self.shape,
            grid: self.grid.iter().map(|v| a * v).collect(),
            coeffs: self.coeffs.iter().map(|v| a * v).collect(),
            repr: self.repr,
        }
    }
}

/// `T(t)x`: every coefficient is multiplied by `e^{-λ_k t}`.
pub fn apply_semigroup(basis: &SpectralBasis, x: &Field, t: f64) -> Result<Field> {
    x.check_basis(basis)?;
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    if t == 0.0 {
        return Ok(x.clone());
    }
    let coeffs: Vec<f64> = x
        .coeffs
        .iter()
        .zip(basis.eigenvalues())
        .map(|(c, l)| c * libm::exp(-l * t))
        .collect();
    Field::from_coeffs(basis, coeffs)
}

/// Max over grid nodes of `|x(ξ)|`; a lower bound of the continuum norm.
pub fn sup_norm(x: &Field) -> f64 {
    x.grid.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// One time of a [`DecayReport`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecaySample {
    pub t: f64,
    /// `‖T(t)x‖ / (e^{-λ₁t} ‖x‖)`; the bound holds when this is at most `M`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub params: SemigroupParams,
    pub samples: Vec<DecaySample>,
    pub max_ratio: f64,
    /// `max_ratio ≤ M (1 + 1e-10)`.
    pub holds: bool,
}

/// Checks `‖T(t)x‖ ≤ M e^{-λ₁t} ‖x‖` in the grid sup norm at every `t`.
pub fn decay_bound_check(basis: &SpectralBasis, x: &Field, times: &[f64]) -> Result<DecayReport> {
    x.check_basis(basis)?;
    let norm0 = sup_norm(x);
    if norm0 == 0.0 {
        return Err(crate::error::invalid("decay check needs a nonzero field"));
    }
    let params = basis.semigroup_params();
    let mut samples = Vec::with_capacity(times.len());
    for &t in times {
        let xt = apply_semigroup(basis, x, t)?;
        let ratio = sup_norm(&xt) / (libm::exp(-params.lambda1 * t) * norm0);
        samples.push(DecaySample { t, ratio });
    }
    let max_ratio = samples.iter().fold(0.0f64, |m, s| m.max(s.ratio));
    Ok(DecayReport {
        params,
        samples,
        max_ratio,
        holds: max_ratio <= params.m * (1.0 + 1e-10),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn analytic_spectrum() {
        let b = assemble_basis(1.0, 3, 12).unwrap();
        assert!((b.lambda1() - PI * PI).abs() < 1e-12 * PI * PI);
        assert!((b.eigenvalues()[2] - 9.0 * PI * PI).abs() < 1e-12 * 9.0 * PI * PI);
        let b2 = assemble_basis(2.0, 1, 4).unwrap();
        assert!((b2.lambda1() - PI * PI / 4.0).abs() < 1e-14);
        assert!(b.eigenvalues().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn resolution_guard() {
        assert!(matches!(
            assemble_basis(1.0, 8, 31),
            Err(Error::ResolutionGuard { .. })
        ));
        assert!(assemble_basis(1.0, 8, 32).is_ok());
        assert!(assemble_basis(0.0, 1, 4).is_err());
    }

    #[test]
    fn eigenfunctions_vanish_at_both_ends() {
        let b = assemble_basis(1.5, 6, 24).unwrap();
        for k in 1..=6 {
            let phi = b.eigenfunction(k);
            assert_eq!(phi[0], 0.0);
            assert_eq!(*phi.last().unwrap(), 0.0);
        }
    }

    #[test]
    fn transform_examples() {
        let b = assemble_basis(1.0, 8, 64).unwrap();
        let x = Field::from_fn(&b, |xi| 2f64.sqrt() * (PI * xi).sin()).unwrap();
        assert!((x.coeffs()[0] - 1.0).abs() < 1e-14);
        assert!(x.coeffs()[1..].iter().all(|c| c.abs() < 1e-14));
        assert_eq!(x.representation(), Representation::Both);

        let z = Field::from_fn(&b, |_| 0.0).unwrap();
        assert!(z.coeffs().iter().all(|&c| c == 0.0));

        let y = Field::from_fn(&b, |xi| (PI * xi).sin() + 0.5 * (2.0 * PI * xi).sin()).unwrap();
        let s = 2f64.sqrt();
        assert!((y.coeffs()[0] - 1.0 / s).abs() < 1e-14);
        assert!((y.coeffs()[1] - 0.5 / s).abs() < 1e-14);
    }

    #[test]
    fn non_band_limited_grid_is_flagged() {
        let b = assemble_basis(1.0, 4, 16).unwrap();
        let x = Field::from_fn(&b, |xi| xi * (1.0 - xi)).unwrap();
        assert_eq!(x.representation(), Representation::GridOnly);
        assert!(matches!(
            Field::from_fn(&b, |_| 1.0),
            Err(Error::NotDirichlet { .. })
        ));
    }

    #[test]
    fn basis_mismatch_is_reported() {
        let b1 = assemble_basis(1.0, 4, 16).unwrap();
        let b2 = assemble_basis(1.0, 4, 20).unwrap();
        let x = Field::sine_mode(&b1, 1, 1.0).unwrap();
        assert_eq!(apply_semigroup(&b2, &x, 0.1), Err(Error::BasisMismatch));
        assert_eq!(
            apply_semigroup(&b1, &x, -0.1),
            Err(Error::NegativeTime(-0.1))
        );
    }

    #[test]
    fn semigroup_examples() {
        let b = assemble_basis(1.0, 8, 64).unwrap();
        let x = Field::sine_mode(&b, 1, 1.0).unwrap();
        assert_eq!(apply_semigroup(&b, &x, 0.0).unwrap(), x);
        let y = apply_semigroup(&b, &x, 0.1).unwrap();
        let factor = (-PI * PI / 10.0).exp();
        assert!((factor - 0.372_708).abs() < 1e-6);
        assert!((y.coeffs()[0] / x.coeffs()[0] - factor).abs() < 1e-15);
        let two = apply_semigroup(&b, &apply_semigroup(&b, &x, 0.2).unwrap(), 0.1).unwrap();
        let once = apply_semigroup(&b, &x, 0.3).unwrap();
        assert!((two.coeffs()[0] - once.coeffs()[0]).abs() <= 1e-15 * once.coeffs()[0].abs());
    }

    #[test]
    fn sup_norm_examples() {
        let b = assemble_basis(1.0, 4, 16).unwrap();
        assert_eq!(sup_norm(&Field::zero(&b)), 0.0);
        let s1 = Field::sine_mode(&b, 1, 1.0).unwrap();
        assert!((sup_norm(&s1) - 1.0).abs() < 1e-15);
        let s2 = Field::sine_mode(&b, 2, 1.0).unwrap();
        assert!((sup_norm(&s2) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn decay_check_mode_one_and_time_zero() {
        let b = assemble_basis(1.0, 8, 64).unwrap();
        let x = Field::sine_mode(&b, 1, 0.7).unwrap();
        let r = decay_bound_check(&b, &x, &[0.0, 0.1, 1.0, 2.0]).unwrap();
        for s in &r.samples {
            assert!((s.ratio - 1.0).abs() < 1e-12, "{s:?}");
        }
        assert!(r.holds);
        assert!(decay_bound_check(&b, &Field::zero(&b), &[0.0]).is_err());
    }

    #[test]
    fn unit_constant_fails_for_a_flattened_profile() {
        // sin πξ + sin 3πξ / 3 has a flat top: its sup is below √2·c₁, so the
        // ratio climbs above 1 once mode 3 has died out. 4/π still holds.
        let b = assemble_basis(1.0, 8, 64).unwrap();
        let x = Field::from_fn(&b, |xi| (PI * xi).sin() + (3.0 * PI * xi).sin() / 3.0).unwrap();
        let r = decay_bound_check(&b, &x, &[0.5, 1.0, 2.0]).unwrap();
        assert!(r.max_ratio > 1.05);
        assert!(r.holds);
    }

    #[test]
    fn random_fields_round_trip_and_contract() {
        let b = assemble_basis(1.0, 16, 64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let c: Vec<f64> = (0..16).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let x = Field::from_coeffs(&b, c.clone()).unwrap();
            let back = b.to_spectral(x.grid()).unwrap();
            for (p, q) in back.iter().zip(&c) {
                assert!((p - q).abs() <= 1e-12);
            }
            for t in [0.001, 0.01, 0.1, 1.0] {
                let y = apply_semigroup(&b, &x, t).unwrap();
                assert!(sup_norm(&y) <= sup_norm(&x) * (1.0 + 1e-12));
                assert_eq!(y.grid()[0], 0.0);
                assert_eq!(*y.grid().last().unwrap(), 0.0);
                // Tail modes beyond K/2 decay at least like e^{-λ_{K/2} t}.
                let tail: f64 = y.coeffs()[8..].iter().map(|v| v * v).sum();
                let total: f64 = x.coeffs().iter().map(|v| v * v).sum();
                assert!(tail <= (-2.0 * b.eigenvalues()[7] * t).exp() * total * (1.0 + 1e-12));
            }
        }
    }
}

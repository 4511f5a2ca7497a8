use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::mild_solver::Trajectory;
use crate::spectral_heat::SpectralBasis;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    /// Max over components: the uniform norm of the field space.
    #[default]
    Sup,
    /// Weighted Euclidean norm; trapezoidal `L²` for grid values.
    L2,
}

impl Metric {
    pub fn id(self) -> &'static str {
        match self {
            Metric::Sup => "sup",
            Metric::L2 => "L2",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        match id {
            "sup" => Some(Metric::Sup),
            "L2" | "l2" => Some(Metric::L2),
            _ => None,
        }
    }
}

/// A finite set of points of `ℝ^dim` with a metric.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    points: Vec<f64>,
    metric: Metric,
    /// Per-component quadrature weights of the `L²` metric.
    weights: Vec<f64>,
}

impl PointCloud {
    /// Points stored row after row.
    pub fn new(dim: usize, points: Vec<f64>, metric: Metric, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 || points.is_empty() {
            return Err(Error::Empty("point cloud"));
        }
        if points.len() % dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim * (points.len() / dim + 1),
                found: points.len(),
            });
        }
        if weights.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: weights.len(),
            });
        }
        Ok(Self {
            dim,
            points,
            metric,
            weights,
        })
    }

    pub fn from_scalars(values: Vec<f64>, metric: Metric) -> Result<Self> {
        Self::new(1, values, metric, alloc::vec![1.0])
    }

    /// Grid values of every stamp of `traj`.
    pub fn from_trajectory(
        basis: &SpectralBasis,
        traj: &Trajectory,
        metric: Metric,
    ) -> Result<Self> {
        traj.check_basis(basis)?;
        let n1 = basis.grid_len();
        let mut points = alloc::vec![0.0; traj.len() * n1];
        for (i, row) in points.chunks_mut(n1).enumerate() {
            basis.to_grid_into(traj.coeffs(i), row);
        }
        let h = basis.node_weight();
        let mut weights = alloc::vec![h; n1];
        weights[0] = 0.5 * h;
        weights[n1 - 1] = 0.5 * h;
        Self::new(n1, points, metric, weights)
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.point(i), self.point(j));
        match self.metric {
            Metric::Sup => a
                .iter()
                .zip(b)
                .fold(0.0f64, |m, (x, y)| m.max((x - y).abs())),
            Metric::L2 => libm::sqrt(
                a.iter()
                    .zip(b)
                    .zip(&self.weights)
                    .map(|((x, y), w)| w * (x - y) * (x - y))
                    .sum(),
            ),
        }
    }

    /// Every `stride`-th point.
    pub fn subsample(&self, stride: usize) -> PointCloud {
        let stride = stride.max(1);
        let mut points = Vec::with_capacity(self.points.len() / stride + self.dim);
        for i in (0..self.len()).step_by(stride) {
            points.extend_from_slice(self.point(i));
        }
        PointCloud {
            dim: self.dim,
            points,
            metric: self.metric,
            weights: self.weights.clone(),
        }
    }

    /// True when no two points are farther apart than `eps`.
    fn diameter_at_most(&self, eps: f64) -> bool {
        (0..self.len()).all(|i| (i + 1..self.len()).all(|j| self.distance(i, j) <= eps))
    }
}

/// Greedy ε-net covers at several scales.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverReport {
    pub eps: Vec<f64>,
    /// Number of sets of diameter `ε` used.
    pub counts: Vec<usize>,
    /// Centre indices per `ε`, in selection order.
    pub centers: Vec<Vec<usize>>,
}

/// Farthest-point covers of `cloud` by balls of diameter `ε`.
///
/// Centres are chosen farthest-first starting at index 0 (ties go to the
/// lowest index) until every point lies within `ε/2` of a centre. A cloud
/// whose diameter is at most `ε` is a single set of diameter `ε` and counts
/// as one, with centre 0. Counts are nonincreasing in `ε`.
pub fn greedy_cover(cloud: &PointCloud, eps: &[f64]) -> Result<CoverReport> {
    if eps.is_empty() {
        return Err(Error::Empty("ε ladder"));
    }
    if let Some(&e) = eps.iter().find(|&&e| !(e > 0.0)) {
        return Err(invalid(alloc::format!("ε = {e} must be positive")));
    }
    let n = cloud.len();
    let eps_min = eps.iter().copied().fold(f64::INFINITY, f64::min);
    // radii[k] = covering radius of the first k + 1 centres.
    let mut order = alloc::vec![0usize];
    let mut nearest: Vec<f64> = (0..n).map(|i| cloud.distance(0, i)).collect();
    let mut radii = Vec::new();
    loop {
        let (far, r) =
            nearest
                .iter()
                .enumerate()
                .fold((0usize, f64::NEG_INFINITY), |(bi, bv), (i, &v)| {
                    if v > bv {
                        (i, v)
                    } else {
                        (bi, bv)
                    }
                });
        radii.push(r);
        if r <= 0.5 * eps_min || order.len() == n {
            break;
        }
        order.push(far);
        for (i, d) in nearest.iter_mut().enumerate() {
            let di = cloud.distance(far, i);
            if di < *d {
                *d = di;
            }
        }
    }
    let mut counts = Vec::with_capacity(eps.len());
    let mut centers = Vec::with_capacity(eps.len());
    let mut diameter_cache: Option<(f64, bool)> = None;
    for &e in eps {
        let greedy = radii
            .iter()
            .position(|&r| r <= 0.5 * e)
            .map_or(order.len(), |k| k + 1);
        let whole = greedy > 1 && radii[0] <= e && {
            match diameter_cache {
                Some((checked, ok)) if (ok && e >= checked) || (!ok && e <= checked) => ok,
                _ => {
                    let ok = cloud.diameter_at_most(e);
                    diameter_cache = Some((e, ok));
                    ok
                }
            }
        };
        let count = if whole { 1 } else { greedy };
        counts.push(count);
        centers.push(order[..count].to_vec());
    }
    Ok(CoverReport {
        eps: eps.to_vec(),
        counts,
        centers,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompactnessVerdict {
    /// Cover counts agree between the two densest samplings at every `ε`.
    CompactnessConsistent,
    Inconclusive,
}

/// Covers of the range of a trajectory at several sampling densities.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactnessReport {
    /// Stamp strides, sparsest first.
    pub strides: Vec<usize>,
    pub covers: Vec<CoverReport>,
    pub verdict: CompactnessVerdict,
}

/// Covers `{x(t) : t ≥ t₀}` subsampled at each stride (largest first) and
/// checks that the counts stop changing as the density doubles.
pub fn range_compactness_report(
    basis: &SpectralBasis,
    traj: &Trajectory,
    eps: &[f64],
    strides: &[usize],
    t0: f64,
    metric: Metric,
) -> Result<CompactnessReport> {
    if strides.len() < 2 {
        return Err(invalid("compactness report needs at least two densities"));
    }
    let mut strides = strides.to_vec();
    strides.sort_unstable_by(|a, b| b.cmp(a));
    strides.dedup();
    let tail = traj.window(t0, traj.end())?;
    let cloud = PointCloud::from_trajectory(basis, &tail, metric)?;
    let covers = strides
        .iter()
        .map(|&s| greedy_cover(&cloud.subsample(s), eps))
        .collect::<Result<Vec<_>>>()?;
    let m = covers.len();
    let verdict = if covers[m - 1].counts == covers[m - 2].counts {
        CompactnessVerdict::CompactnessConsistent
    } else {
        CompactnessVerdict::Inconclusive
    };
    Ok(CompactnessReport {
        strides,
        covers,
        verdict,
    })
}

use alloc::vec::Vec;

use crate::aa_signals::{Signal, SignalKind, Span, UnboundedAASpec};
use crate::error::{Error, Result};
use crate::spectral_heat::{Field, SpectralBasis};

/// How the spatially constant part `a(t)` of the reference forcing is made
/// compatible with the Dirichlet condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryMode {
    /// `H(t) = (b(t) + a(t))·h₀`.
    #[default]
    Profiled,
    /// `H(t) = b(t)·h₀ + a(t)·P1` with `P1` the sine projection of the
    /// constant 1. Carries Gibbs oscillations near the boundary.
    PaperLiteral,
}

impl BoundaryMode {
    pub fn id(self) -> &'static str {
        match self {
            BoundaryMode::Profiled => "profiled",
            BoundaryMode::PaperLiteral => "paper-literal",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        match id {
            "profiled" => Some(BoundaryMode::Profiled),
            "paper-literal" => Some(BoundaryMode::PaperLiteral),
            _ => None,
        }
    }
}

/// `s(t)·P` with `P` given by its sine coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcingTerm {
    pub signal: SignalKind,
    pub profile: Vec<f64>,
}

/// `H(t) = Σ_i s_i(t)·P_i`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ForcingSpec {
    terms: Vec<ForcingTerm>,
}

impl ForcingSpec {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn single(signal: SignalKind, profile: &Field) -> Self {
        Self {
            terms: alloc::vec![ForcingTerm {
                signal,
                profile: profile.coeffs().to_vec(),
            }],
        }
    }

    pub fn from_terms(terms: Vec<ForcingTerm>) -> Self {
        Self { terms }
    }

    /// The reference forcing built from `b`, `a` and the profile `h₀`.
    pub fn reference(
        basis: &SpectralBasis,
        h0: &Field,
        spec: UnboundedAASpec,
        mode: BoundaryMode,
    ) -> Result<Self> {
        h0.check_basis(basis)?;
        Ok(match mode {
            BoundaryMode::Profiled => Self::single(SignalKind::resonant_plus_unbounded(spec), h0),
            BoundaryMode::PaperLiteral => Self {
                terms: alloc::vec![
                    ForcingTerm {
                        signal: SignalKind::Resonant,
                        profile: h0.coeffs().to_vec(),
                    },
                    ForcingTerm {
                        signal: SignalKind::Unbounded(spec),
                        profile: basis.project_fn(|_| 1.0),
                    },
                ],
            },
        })
    }

    pub fn terms(&self) -> &[ForcingTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.profile.iter().all(|&c| c == 0.0))
    }

    pub(crate) fn check(&self, basis: &SpectralBasis) -> Result<()> {
        for term in &self.terms {
            if term.profile.len() != basis.modes() {
                return Err(Error::DimensionMismatch {
                    expected: basis.modes(),
                    found: term.profile.len(),
                });
            }
            if term.signal.dim() != 1 {
                return Err(crate::error::invalid("forcing signals must be scalar"));
            }
        }
        Ok(())
    }

    /// Intersection of the term spans.
    pub fn span(&self) -> Span {
        self.terms.iter().fold(Span::REAL, |acc, t| {
            let s = t.signal.span();
            Span::new(libm::fmax(acc.lo, s.lo), libm::fmin(acc.hi, s.hi))
        })
    }

    /// Coefficients of `H(t)`.
    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        let mut s = [0.0];
        for term in &self.terms {
            term.signal.eval_into(t, &mut s);
            for (o, p) in out.iter_mut().zip(&term.profile) {
                *o += s[0] * p;
            }
        }
    }
}

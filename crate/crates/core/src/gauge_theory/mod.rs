//! Abelian `GL(1,R)×U(1)` and nonabelian `GL(1,R)×U(2)` gauge theories on the
//! lattice.
//!
//! The real field `A` enters the covariant derivative through the scale
//! factor `e^{g_R A_μ Δ}`; the phase field `Γ` through `e^{i g_I Γ_μ Δ}`; the
//! SU(2) field `Ω` through `e^{−i g Ω_μ·τ Δ}`. Each derivative is available in
//! an exponential (link) form and in the first-order expansion
//! `∂′ + g_R A + i g_I Γ − i g Ω·τ`.

mod abelian;
pub mod lagrangian;
pub mod su2;

pub use abelian::{
    abelian_cov_derivative, abelian_covariance_residual, abelian_covariance_study,
    field_strength, gauge_transform_abelian, CovariancePoint, CovarianceResidual, CovarianceStudy,
    FieldStrength,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge_field::RealGaugeField;
use crate::lattice::{LatticeSpec, MAX_DIMS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeMode {
    /// `[link · ψ(x+μ̂Δ) − ψ(x)]/Δ`.
    Exponential,
    /// `(∂′ + g_R A + i g_I Γ [− i g Ω·τ])ψ`.
    FirstOrder,
}

/// Field content and couplings of the Abelian theory.
#[derive(Debug, Clone, PartialEq)]
pub struct AbelianConfig {
    pub a: RealGaugeField,
    pub gamma: RealGaugeField,
    pub g_r: f64,
    pub g_i: f64,
    pub mass: f64,
    pub lambda: f64,
}

impl AbelianConfig {
    pub fn new(a: RealGaugeField, gamma: RealGaugeField, g_r: f64, g_i: f64, mass: f64, lambda: f64) -> Result<Self> {
        if a.spec() != gamma.spec() {
            return Err(Error::InvalidArgument("A and Γ live on different lattices".into()));
        }
        if ![g_r, g_i, mass, lambda].iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("abelian couplings"));
        }
        Ok(AbelianConfig { a, gamma, g_r, g_i, mass, lambda })
    }

    /// Zero gauge fields with the given couplings.
    pub fn free(spec: &LatticeSpec, g_r: f64, g_i: f64, mass: f64, lambda: f64) -> Result<Self> {
        Self::new(RealGaugeField::zeros(spec), RealGaugeField::zeros(spec), g_r, g_i, mass, lambda)
    }

    pub fn spec(&self) -> &LatticeSpec {
        self.a.spec()
    }
}

/// Local transformation `Λ(x) = e^{iφ(x)} e^{−iΘ(x)·τ/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeTransformation {
    pub phase: Vec<f64>,
    pub theta: Vec<[f64; 3]>,
}

impl GaugeTransformation {
    pub fn from_fn(spec: &LatticeSpec, mut f: impl FnMut(&[f64; MAX_DIMS]) -> (f64, [f64; 3])) -> Result<Self> {
        let (phase, theta): (Vec<_>, Vec<_>) = spec.sites().map(|s| f(&spec.position(&s))).unzip();
        let t = GaugeTransformation { phase, theta };
        if t.phase.iter().chain(t.theta.iter().flatten()).all(|v| v.is_finite()) {
            Ok(t)
        } else {
            Err(Error::NonFinite("gauge transformation"))
        }
    }

    /// Position-independent transformation.
    pub fn global(spec: &LatticeSpec, phase: f64, theta: [f64; 3]) -> Self {
        GaugeTransformation {
            phase: vec![phase; spec.num_sites()],
            theta: vec![theta; spec.num_sites()],
        }
    }

    fn check(&self, spec: &LatticeSpec) -> Result<()> {
        let n = spec.num_sites();
        if self.phase.len() != n || self.theta.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.phase.len().min(self.theta.len()) });
        }
        Ok(())
    }
}

/// Complex n-component field (n = 1 scalar, 2 doublet, 4 Dirac spinor).
#[derive(Debug, Clone, PartialEq)]
pub struct MultipletField {
    spec: LatticeSpec,
    n: usize,
    values: Vec<Complex64>,
}

impl MultipletField {
    pub fn from_values(spec: &LatticeSpec, n: usize, values: Vec<Complex64>) -> Result<Self> {
        if n == 0 || values.len() != spec.num_sites() * n {
            return Err(Error::DimensionMismatch { expected: spec.num_sites() * n.max(1), found: values.len() });
        }
        if !values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite("multiplet field"));
        }
        Ok(MultipletField { spec: spec.clone(), n, values })
    }

    pub fn from_fn(spec: &LatticeSpec, n: usize, mut f: impl FnMut(&[f64; MAX_DIMS], usize) -> Complex64) -> Result<Self> {
        let mut values = Vec::with_capacity(spec.num_sites() * n);
        for site in spec.sites() {
            let x = spec.position(&site);
            for c in 0..n {
                values.push(f(&x, c));
            }
        }
        Self::from_values(spec, n, values)
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn components(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    #[inline]
    pub fn at(&self, index: usize) -> &[Complex64] {
        &self.values[index * self.n..(index + 1) * self.n]
    }

    pub fn max_abs_diff(&self, other: &MultipletField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn check_periodic_axis(spec: &LatticeSpec, axis: usize) -> Result<()> {
    if axis >= spec.dims() {
        return Err(Error::InvalidArgument(format!("axis {axis} out of range")));
    }
    if spec.boundary() != crate::lattice::Boundary::Periodic {
        return Err(Error::InvalidArgument("forward differences need a periodic lattice".into()));
    }
    Ok(())
}

fn check_same(a: &LatticeSpec, b: &LatticeSpec) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::InvalidArgument("fields live on different lattices".into()))
    }
}

/// Minkowski metric diagonal `(+, −, −, −)`, axis 0 being time.
#[inline]
pub fn metric(axis: usize) -> f64 {
    if axis == 0 {
        1.0
    } else {
        -1.0
    }
}

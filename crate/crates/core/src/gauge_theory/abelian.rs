use num_complex::Complex64;
use serde::Serialize;

use super::{check_periodic_axis, check_same, AbelianConfig, DerivativeMode, GaugeTransformation, MultipletField};
use crate::convergence::{fit_loglog, ConvergenceFit};
use crate::error::{Error, Result};
use crate::gauge_field::RealGaugeField;

/// Abelian covariant derivative along `axis`, one n-tuple per site.
pub fn abelian_cov_derivative(
    psi: &MultipletField,
    cfg: &AbelianConfig,
    axis: usize,
    mode: DerivativeMode,
) -> Result<MultipletField> {
    let spec = psi.spec();
    check_periodic_axis(spec, axis)?;
    check_same(spec, cfg.spec())?;
    let n = psi.components();
    let dx = spec.spacing();
    let mut out = Vec::with_capacity(psi.values().len());
    for i in 0..spec.num_sites() {
        let j = spec.forward_index(i, axis).expect("periodic");
        let (here, next) = (psi.at(i), psi.at(j));
        let a = cfg.a.component(i, axis);
        let g = cfg.gamma.component(i, axis);
        match mode {
            DerivativeMode::Exponential => {
                let r = (cfg.g_r * a * dx).exp();
                let theta = cfg.g_i * g * dx;
                let link = Complex64::new(r * theta.cos(), r * theta.sin());
                for c in 0..n {
                    out.push((link * next[c] - here[c]) / dx);
                }
            }
            DerivativeMode::FirstOrder => {
                let coupling = Complex64::new(cfg.g_r * a, cfg.g_i * g);
                for c in 0..n {
                    out.push((next[c] - here[c]) / dx + coupling * here[c]);
                }
            }
        }
    }
    MultipletField::from_values(spec, n, out)
}

/// `Γ′_μ = Γ_μ − ∂′_μφ / g_I` for every axis.
pub(crate) fn transformed_gamma(cfg: &AbelianConfig, phase: &[f64]) -> Result<RealGaugeField> {
    if cfg.g_i == 0.0 {
        return Err(Error::InvalidCoupling("g_I must be nonzero"));
    }
    let spec = cfg.spec();
    let dx = spec.spacing();
    let d = spec.dims();
    let mut comps = Vec::with_capacity(spec.num_sites() * d);
    for i in 0..spec.num_sites() {
        for axis in 0..d {
            let j = spec
                .forward_index(i, axis)
                .ok_or_else(|| Error::InvalidArgument("forward differences need a periodic lattice".into()))?;
            let dphi = (phase[j] - phase[i]) / dx;
            comps.push(cfg.gamma.component(i, axis) - dphi / cfg.g_i);
        }
    }
    RealGaugeField::from_components(spec, comps)
}

/// Applies `ψ′ = e^{iφ}ψ`, `A′ = A`, `Γ′ = Γ − ∂′φ/g_I`.
pub fn gauge_transform_abelian(
    psi: &MultipletField,
    cfg: &AbelianConfig,
    t: &GaugeTransformation,
) -> Result<(MultipletField, AbelianConfig)> {
    check_same(psi.spec(), cfg.spec())?;
    t.check(psi.spec())?;
    let gamma = transformed_gamma(cfg, &t.phase)?;
    let n = psi.components();
    let values = psi
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| Complex64::from_polar(1.0, t.phase[k / n]) * v)
        .collect();
    let psi_t = MultipletField::from_values(psi.spec(), n, values)?;
    let cfg_t = AbelianConfig {
        a: cfg.a.clone(),
        gamma,
        ..cfg.clone()
    };
    Ok((psi_t, cfg_t))
}

/// Worst `|D′_μ(Λψ) − Λ D_μψ|` over sites, axes and components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovarianceResidual {
    pub first_order: f64,
    pub exponential: f64,
}

pub fn abelian_covariance_residual(
    psi: &MultipletField,
    cfg: &AbelianConfig,
    t: &GaugeTransformation,
) -> Result<CovarianceResidual> {
    let (psi_t, cfg_t) = gauge_transform_abelian(psi, cfg, t)?;
    let n = psi.components();
    let mut res = CovarianceResidual { first_order: 0.0, exponential: 0.0 };
    for axis in 0..psi.spec().dims() {
        for mode in [DerivativeMode::FirstOrder, DerivativeMode::Exponential] {
            let lhs = abelian_cov_derivative(&psi_t, &cfg_t, axis, mode)?;
            let rhs = abelian_cov_derivative(psi, cfg, axis, mode)?;
            let worst = lhs
                .values()
                .iter()
                .zip(rhs.values())
                .enumerate()
                .map(|(k, (l, r))| (l - Complex64::from_polar(1.0, t.phase[k / n]) * r).norm())
                .fold(0.0, f64::max);
            let slot = match mode {
                DerivativeMode::FirstOrder => &mut res.first_order,
                DerivativeMode::Exponential => &mut res.exponential,
            };
            *slot = slot.max(worst);
        }
    }
    Ok(res)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovariancePoint {
    pub delta: f64,
    pub first_order: f64,
    pub exponential: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CovarianceStudy {
    pub points: Vec<CovariancePoint>,
    /// Log-log fit of the first-order residual; `None` when a residual is zero.
    pub first_order_fit: Option<ConvergenceFit>,
    pub max_exponential: f64,
}

impl CovarianceStudy {
    pub fn from_points(points: Vec<CovariancePoint>) -> Self {
        let pts: Vec<_> = points.iter().map(|p| (p.delta, p.first_order)).collect();
        CovarianceStudy {
            first_order_fit: fit_loglog(&pts).ok(),
            max_exponential: points.iter().map(|p| p.exponential).fold(0.0, f64::max),
            points,
        }
    }
}

/// Runs [`abelian_covariance_residual`] for each spacing, rebuilding the
/// fixture with `build(Δ)`.
pub fn abelian_covariance_study(
    deltas: &[f64],
    mut build: impl FnMut(f64) -> Result<(MultipletField, AbelianConfig, GaugeTransformation)>,
) -> Result<CovarianceStudy> {
    let mut points = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let (psi, cfg, t) = build(delta)?;
        let r = abelian_covariance_residual(&psi, &cfg, &t)?;
        points.push(CovariancePoint { delta, first_order: r.first_order, exponential: r.exponential });
    }
    Ok(CovarianceStudy::from_points(points))
}

/// Antisymmetric `G_{μν} = ∂′_μΓ_ν − ∂′_νΓ_μ` at every site.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldStrength {
    dims: usize,
    values: Vec<f64>,
}

impl FieldStrength {
    #[inline]
    pub fn get(&self, index: usize, mu: usize, nu: usize) -> f64 {
        self.values[(index * self.dims + mu) * self.dims + nu]
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn num_sites(&self) -> usize {
        self.values.len() / (self.dims * self.dims)
    }

    pub fn max_abs_diff(&self, other: &FieldStrength) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub fn field_strength(gamma: &RealGaugeField) -> Result<FieldStrength> {
    let spec = gamma.spec();
    let d = spec.dims();
    if d < 2 {
        return Err(Error::InvalidArgument("field strength needs at least 2 dimensions".into()));
    }
    check_periodic_axis(spec, 0)?;
    let dx = spec.spacing();
    let mut values = vec![0.0; spec.num_sites() * d * d];
    for i in 0..spec.num_sites() {
        for mu in 0..d {
            for nu in (mu + 1)..d {
                let i_mu = spec.forward_index(i, mu).expect("periodic");
                let i_nu = spec.forward_index(i, nu).expect("periodic");
                let g = (gamma.component(i_mu, nu) - gamma.component(i, nu)) / dx
                    - (gamma.component(i_nu, mu) - gamma.component(i, mu)) / dx;
                values[(i * d + mu) * d + nu] = g;
                values[(i * d + nu) * d + mu] = -g;
            }
        }
    }
    Ok(FieldStrength { dims: d, values })
}

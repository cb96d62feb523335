//! SU(2) links, covariant derivative and gauge transformations.
//!
//! Generators are `τ_j/2` with the Pauli matrices `τ_j`. The link along
//! `μ` at `x` is
//!
//! ```text
//! U_μ(x) = e^{g_R A_μ Δ} · e^{i g_I Γ_μ Δ} · exp(−i g Ω_μ·τ Δ)
//! ```
//!
//! whose first-order expansion gives `∂′ + g_R A + i g_I Γ − i g Ω·τ`.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use serde::Serialize;

use super::abelian::transformed_gamma;
use super::{
    check_periodic_axis, check_same, AbelianConfig, CovariancePoint, CovarianceStudy, DerivativeMode,
    GaugeTransformation, MultipletField,
};
use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, MAX_DIMS};

pub type Mat2 = Matrix2<Complex64>;

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The Pauli matrices `τ_1, τ_2, τ_3`.
pub fn pauli() -> [Mat2; 3] {
    [
        Mat2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)),
        Mat2::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)),
        Mat2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)),
    ]
}

/// Totally antisymmetric structure constants `ξ_{jkl}` (indices 0..3).
pub fn structure_constant(j: usize, k: usize, l: usize) -> f64 {
    match (j, k, l) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// `v·τ = Σ v_j τ_j`.
pub fn dot_tau(v: &[f64; 3]) -> Mat2 {
    let [t1, t2, t3] = pauli();
    t1 * c(v[0], 0.0) + t2 * c(v[1], 0.0) + t3 * c(v[2], 0.0)
}

/// Closed form `exp(−i v·τ/2) = cos(θ/2) I − i sin(θ/2) n̂·τ`, `θ = |v|`.
pub fn su2_exp(v: &[f64; 3]) -> Mat2 {
    let theta = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if theta == 0.0 {
        return Mat2::identity();
    }
    let (s, co) = (0.5 * theta).sin_cos();
    let k = s / theta;
    // −i·sin(θ/2)·n̂·τ, written out entry by entry.
    Mat2::new(
        c(co, -k * v[2]),
        c(-k * v[1], -k * v[0]),
        c(k * v[1], -k * v[0]),
        c(co, k * v[2]),
    )
}

/// `(1/2) tr(M τ_j)` for each `j`, and the identity coefficient `(1/2) tr M`.
pub fn project_tau(m: &Mat2) -> ([Complex64; 3], Complex64) {
    let taus = pauli();
    let coeffs = [0, 1, 2].map(|j| (m * taus[j]).trace() * 0.5);
    (coeffs, m.trace() * 0.5)
}

/// Abelian content plus the SU(2) gauge field `Ω^j_μ(x)` and coupling `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct SU2Config {
    pub base: AbelianConfig,
    /// `Ω_μ(x)` stored at `index·dims + μ`.
    pub omega: Vec<[f64; 3]>,
    pub g: f64,
}

impl SU2Config {
    pub fn new(base: AbelianConfig, omega: Vec<[f64; 3]>, g: f64) -> Result<Self> {
        let spec = base.spec();
        let expected = spec.num_sites() * spec.dims();
        if omega.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: omega.len() });
        }
        if !g.is_finite() || !omega.iter().flatten().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("SU(2) field content"));
        }
        Ok(SU2Config { base, omega, g })
    }

    pub fn from_fn(base: AbelianConfig, g: f64, mut f: impl FnMut(&[f64; MAX_DIMS], usize) -> [f64; 3]) -> Result<Self> {
        let spec = base.spec().clone();
        let mut omega = Vec::with_capacity(spec.num_sites() * spec.dims());
        for site in spec.sites() {
            let x = spec.position(&site);
            for mu in 0..spec.dims() {
                omega.push(f(&x, mu));
            }
        }
        Self::new(base, omega, g)
    }

    pub fn spec(&self) -> &LatticeSpec {
        self.base.spec()
    }

    #[inline]
    pub fn omega(&self, index: usize, axis: usize) -> &[f64; 3] {
        &self.omega[index * self.spec().dims() + axis]
    }
}

/// Link matrix along `axis` at linear site `index`. With `include_real`,
/// the `GL(1,R)` factor `e^{g_R A Δ}` multiplies the unitary part.
pub fn su2_link(cfg: &SU2Config, index: usize, axis: usize, include_real: bool) -> Mat2 {
    let dx = cfg.spec().spacing();
    let b = &cfg.base;
    let om = cfg.omega(index, axis);
    let k = 2.0 * cfg.g * dx;
    let rot = su2_exp(&[k * om[0], k * om[1], k * om[2]]);
    let mut phase = Complex64::from_polar(1.0, b.g_i * b.gamma.component(index, axis) * dx);
    if include_real {
        phase *= (b.g_r * b.a.component(index, axis) * dx).exp();
    }
    rot * phase
}

fn doublet(psi: &MultipletField, index: usize) -> Vector2<Complex64> {
    let v = psi.at(index);
    Vector2::new(v[0], v[1])
}

fn check_doublet(psi: &MultipletField) -> Result<()> {
    if psi.components() == 2 {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: 2, found: psi.components() })
    }
}

/// SU(2) covariant derivative along `axis`.
pub fn su2_cov_derivative(
    psi: &MultipletField,
    cfg: &SU2Config,
    axis: usize,
    mode: DerivativeMode,
) -> Result<MultipletField> {
    check_doublet(psi)?;
    let spec = psi.spec();
    check_periodic_axis(spec, axis)?;
    check_same(spec, cfg.spec())?;
    let dx = spec.spacing();
    let b = &cfg.base;
    let mut out = Vec::with_capacity(psi.values().len());
    for i in 0..spec.num_sites() {
        let j = spec.forward_index(i, axis).expect("periodic");
        let (here, next) = (doublet(psi, i), doublet(psi, j));
        let d = match mode {
            DerivativeMode::Exponential => (su2_link(cfg, i, axis, true) * next - here) / c(dx, 0.0),
            DerivativeMode::FirstOrder => {
                let scalar = c(b.g_r * b.a.component(i, axis), b.g_i * b.gamma.component(i, axis));
                let nonabelian = dot_tau(cfg.omega(i, axis)) * c(0.0, -cfg.g);
                (next - here) / c(dx, 0.0) + here * scalar + nonabelian * here
            }
        };
        out.extend_from_slice(d.as_slice());
    }
    MultipletField::from_values(spec, 2, out)
}

/// `[U_μ(x) ψ(x+μ̂Δ) − ψ(x)]/Δ` with explicit link matrices (`index·dims + μ`).
pub fn su2_cov_derivative_links(psi: &MultipletField, links: &[Mat2], axis: usize) -> Result<MultipletField> {
    check_doublet(psi)?;
    let spec = psi.spec();
    check_periodic_axis(spec, axis)?;
    let d = spec.dims();
    if links.len() != spec.num_sites() * d {
        return Err(Error::DimensionMismatch { expected: spec.num_sites() * d, found: links.len() });
    }
    let dx = spec.spacing();
    let mut out = Vec::with_capacity(psi.values().len());
    for i in 0..spec.num_sites() {
        let j = spec.forward_index(i, axis).expect("periodic");
        let v = (links[i * d + axis] * doublet(psi, j) - doublet(psi, i)) / c(dx, 0.0);
        out.extend_from_slice(v.as_slice());
    }
    MultipletField::from_values(spec, 2, out)
}

/// All links `U_μ(x)` including the real factor.
pub fn su2_links(cfg: &SU2Config) -> Vec<Mat2> {
    let spec = cfg.spec();
    (0..spec.num_sites())
        .flat_map(|i| (0..spec.dims()).map(move |mu| (i, mu)))
        .map(|(i, mu)| su2_link(cfg, i, mu, true))
        .collect()
}

/// `Λ(x) = e^{iφ(x)} exp(−iΘ(x)·τ/2)` at every site.
pub fn transformation_matrices(t: &GaugeTransformation) -> Vec<Mat2> {
    t.phase
        .iter()
        .zip(&t.theta)
        .map(|(&phi, theta)| su2_exp(theta) * Complex64::from_polar(1.0, phi))
        .collect()
}

/// Lattice-style link transformation `U′_μ(x) = Λ(x) U_μ(x) Λ(x+μ̂)⁻¹`.
pub fn transform_links(spec: &LatticeSpec, links: &[Mat2], t: &GaugeTransformation) -> Result<Vec<Mat2>> {
    t.check(spec)?;
    let lam = transformation_matrices(t);
    let d = spec.dims();
    let mut out = Vec::with_capacity(links.len());
    for i in 0..spec.num_sites() {
        for mu in 0..d {
            let j = spec
                .forward_index(i, mu)
                .ok_or_else(|| Error::InvalidArgument("forward differences need a periodic lattice".into()))?;
            out.push(lam[i] * links[i * d + mu] * lam[j].adjoint());
        }
    }
    Ok(out)
}

/// Result of an SU(2) gauge transformation with its discretization diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Su2Transformed {
    pub psi: MultipletField,
    pub cfg: SU2Config,
    /// Largest `|½ tr M|` dropped when projecting `Ω′·τ` onto the `τ_j`.
    pub max_identity_component: f64,
    /// Largest `|(i/g_I)∂′(Λ₁)Λ₁⁻¹ − (−∂′φ/g_I)|`.
    pub max_gamma_discrepancy: f64,
    /// Whether the dropped identity component exceeded the tolerance.
    pub identity_exceeds_tol: bool,
}

/// Applies `ψ′ = Λ₁Λ₂ψ`, `A′ = A`, `Γ′ = Γ − ∂′φ/g_I` and
/// `Ω′·τ = Λ₂(Ω·τ)Λ₂⁻¹ − (i/g)∂′(Λ₂)Λ₂⁻¹` (projected onto the `τ_j`).
pub fn gauge_transform_su2(
    psi: &MultipletField,
    cfg: &SU2Config,
    t: &GaugeTransformation,
    identity_tol: f64,
) -> Result<Su2Transformed> {
    check_doublet(psi)?;
    check_same(psi.spec(), cfg.spec())?;
    if cfg.g == 0.0 {
        return Err(Error::InvalidCoupling("g must be nonzero"));
    }
    let spec = psi.spec();
    t.check(spec)?;
    let gamma = transformed_gamma(&cfg.base, &t.phase)?;
    let dx = spec.spacing();
    let d = spec.dims();
    let g_i = cfg.base.g_i;

    let lam2: Vec<Mat2> = t.theta.iter().map(su2_exp).collect();
    let lam = transformation_matrices(t);

    let mut values = Vec::with_capacity(psi.values().len());
    for (i, l) in lam.iter().enumerate() {
        values.extend_from_slice((l * doublet(psi, i)).as_slice());
    }

    let mut omega = Vec::with_capacity(cfg.omega.len());
    let mut max_identity: f64 = 0.0;
    let mut max_gamma: f64 = 0.0;
    for i in 0..spec.num_sites() {
        for mu in 0..d {
            let j = spec.forward_index(i, mu).expect("periodic");
            let rotated = lam2[i] * dot_tau(cfg.omega(i, mu)) * lam2[i].adjoint();
            let dlam = (lam2[j] - lam2[i]) / c(dx, 0.0);
            let m = rotated - dlam * lam2[i].adjoint() * c(0.0, 1.0 / cfg.g);
            let (coeffs, identity) = project_tau(&m);
            omega.push(coeffs.map(|z| z.re));
            max_identity = max_identity.max(identity.norm());

            let l1 = Complex64::from_polar(1.0, t.phase[i]);
            let l1n = Complex64::from_polar(1.0, t.phase[j]);
            let matrix_form = c(0.0, 1.0 / g_i) * (l1n - l1) / dx * l1.conj();
            let stored = gamma.component(i, mu) - cfg.base.gamma.component(i, mu);
            max_gamma = max_gamma.max((matrix_form - stored).norm());
        }
    }
    let base = AbelianConfig { a: cfg.base.a.clone(), gamma, ..cfg.base.clone() };
    Ok(Su2Transformed {
        psi: MultipletField::from_values(spec, 2, values)?,
        cfg: SU2Config::new(base, omega, cfg.g)?,
        max_identity_component: max_identity,
        max_gamma_discrepancy: max_gamma,
        identity_exceeds_tol: max_identity > identity_tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Su2CovarianceResidual {
    /// `|D′(Λψ) − ΛDψ|` with the first-order derivative and transformed fields.
    pub first_order: f64,
    /// Same with links transformed as `Λ(x) U Λ(x+μ̂)⁻¹`.
    pub link_level: f64,
    pub max_identity_component: f64,
    pub max_gamma_discrepancy: f64,
}

pub fn su2_covariance_residual(
    psi: &MultipletField,
    cfg: &SU2Config,
    t: &GaugeTransformation,
) -> Result<Su2CovarianceResidual> {
    let tr = gauge_transform_su2(psi, cfg, t, f64::INFINITY)?;
    let spec = psi.spec();
    let lam = transformation_matrices(t);
    let links = su2_links(cfg);
    let links_t = transform_links(spec, &links, t)?;
    let rotate = |field: &MultipletField| -> Vec<Vector2<Complex64>> {
        (0..spec.num_sites()).map(|i| lam[i] * doublet(field, i)).collect()
    };
    let worst = |lhs: &MultipletField, rhs: &[Vector2<Complex64>]| -> f64 {
        (0..spec.num_sites())
            .map(|i| (doublet(lhs, i) - rhs[i]).iter().map(|z| z.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    };
    let mut res = Su2CovarianceResidual {
        first_order: 0.0,
        link_level: 0.0,
        max_identity_component: tr.max_identity_component,
        max_gamma_discrepancy: tr.max_gamma_discrepancy,
    };
    for axis in 0..spec.dims() {
        let lhs = su2_cov_derivative(&tr.psi, &tr.cfg, axis, DerivativeMode::FirstOrder)?;
        let rhs = rotate(&su2_cov_derivative(psi, cfg, axis, DerivativeMode::FirstOrder)?);
        res.first_order = res.first_order.max(worst(&lhs, &rhs));

        let lhs = su2_cov_derivative_links(&tr.psi, &links_t, axis)?;
        let rhs = rotate(&su2_cov_derivative_links(psi, &links, axis)?);
        res.link_level = res.link_level.max(worst(&lhs, &rhs));
    }
    Ok(res)
}

/// First-order SU(2) covariance over a sequence of spacings.
/// `exponential` in each point holds the link-level residual.
pub fn su2_covariance_study(
    deltas: &[f64],
    mut build: impl FnMut(f64) -> Result<(MultipletField, SU2Config, GaugeTransformation)>,
) -> Result<CovarianceStudy> {
    let mut points = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let (psi, cfg, t) = build(delta)?;
        let r = su2_covariance_residual(&psi, &cfg, &t)?;
        points.push(CovariancePoint { delta, first_order: r.first_order, exponential: r.link_level });
    }
    Ok(CovarianceStudy::from_points(points))
}

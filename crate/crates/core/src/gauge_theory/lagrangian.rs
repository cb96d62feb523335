//! Klein–Gordon and Dirac Lagrangian densities with covariant derivatives.
//!
//! Metric `(+,−,−,−)` with axis 0 as time, Dirac-representation gamma
//! matrices and `ψ̄ = ψ†γ⁰`. Each term is returned separately:
//!
//! ```text
//! KG:    ψ† η^{μμ} D_μ D_μ ψ  − m² ψ†ψ
//! Dirac: ψ̄ iγ^μ D_μ ψ        − m ψ̄ψ
//! both:  − ½ λ² η^{μμ} A_μ A_μ − ¼ η^{μμ} η^{νν} G_{μν} G_{μν}
//! ```

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{abelian_cov_derivative, check_same, field_strength, metric, AbelianConfig, DerivativeMode, MultipletField};
use crate::error::{Error, Result};

pub type Gamma = Matrix4<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityKind {
    KleinGordon,
    Dirac,
}

/// `γ⁰, γ¹, γ², γ³` in the Dirac representation.
pub fn gamma_matrices() -> [Gamma; 4] {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    #[rustfmt::skip]
    let g = [
        Gamma::new(
            o, z, z, z,
            z, o, z, z,
            z, z, -o, z,
            z, z, z, -o,
        ),
        Gamma::new(
            z, z, z, o,
            z, z, o, z,
            z, -o, z, z,
            -o, z, z, z,
        ),
        Gamma::new(
            z, z, z, -i,
            z, z, i, z,
            z, i, z, z,
            -i, z, z, z,
        ),
        Gamma::new(
            z, z, o, z,
            z, z, z, -o,
            -o, z, z, z,
            z, o, z, z,
        ),
    ];
    g
}

/// Per-site density terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityTerms {
    pub kinetic: Complex64,
    pub mass: Complex64,
    pub a_mass: f64,
    pub yang_mills: f64,
    pub total: Complex64,
}

fn spinor(v: &[Complex64]) -> nalgebra::Vector4<Complex64> {
    nalgebra::Vector4::new(v[0], v[1], v[2], v[3])
}

/// Evaluates the density at every site.
pub fn lagrangian_density(
    psi: &MultipletField,
    cfg: &AbelianConfig,
    kind: DensityKind,
    mode: DerivativeMode,
) -> Result<Vec<DensityTerms>> {
    let spec = psi.spec();
    check_same(spec, cfg.spec())?;
    let d = spec.dims();
    if kind == DensityKind::Dirac && psi.components() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: psi.components() });
    }
    let derivs: Vec<MultipletField> = (0..d)
        .map(|mu| abelian_cov_derivative(psi, cfg, mu, mode))
        .collect::<Result<_>>()?;
    let second: Vec<MultipletField> = match kind {
        DensityKind::KleinGordon => (0..d)
            .map(|mu| abelian_cov_derivative(&derivs[mu], cfg, mu, mode))
            .collect::<Result<_>>()?,
        DensityKind::Dirac => Vec::new(),
    };
    let g = if d >= 2 { Some(field_strength(&cfg.gamma)?) } else { None };
    let gammas = gamma_matrices();
    let i_unit = Complex64::new(0.0, 1.0);

    let mut out = Vec::with_capacity(spec.num_sites());
    for x in 0..spec.num_sites() {
        let here = psi.at(x);
        let (kinetic, mass) = match kind {
            DensityKind::KleinGordon => {
                let mut k = Complex64::new(0.0, 0.0);
                for mu in 0..d {
                    let dd = second[mu].at(x);
                    let s: Complex64 = here.iter().zip(dd).map(|(a, b)| a.conj() * b).sum();
                    k += s * metric(mu);
                }
                let norm: f64 = here.iter().map(|v| v.norm_sqr()).sum();
                (k, Complex64::new(-cfg.mass * cfg.mass * norm, 0.0))
            }
            DensityKind::Dirac => {
                let bar = spinor(here).adjoint() * gammas[0];
                let mut k = Complex64::new(0.0, 0.0);
                for mu in 0..d {
                    k += (bar * (gammas[mu] * spinor(derivs[mu].at(x))))[(0, 0)] * i_unit;
                }
                let pbp = (bar * spinor(here))[(0, 0)];
                (k, -pbp * cfg.mass)
            }
        };
        let mut a_sq = 0.0;
        for mu in 0..d {
            let a = cfg.a.component(x, mu);
            a_sq += metric(mu) * a * a;
        }
        let a_mass = -0.5 * cfg.lambda * cfg.lambda * a_sq;
        let mut g_sq = 0.0;
        if let Some(g) = &g {
            for mu in 0..d {
                for nu in 0..d {
                    let v = g.get(x, mu, nu);
                    g_sq += metric(mu) * metric(nu) * v * v;
                }
            }
        }
        let yang_mills = -0.25 * g_sq;
        let total = kinetic + mass + a_mass + yang_mills;
        out.push(DensityTerms { kinetic, mass, a_mass, yang_mills, total });
    }
    Ok(out)
}

//! Plain lattice QED densities, written without the scaled machinery.
//!
//! The link is the usual U(1) phase `e^{igΓΔ}` and nothing else; used as the
//! comparison target when the real gauge field vanishes.

use num_complex::Complex64;

use scaledgauge_core::lattice::LatticeSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QedTerms {
    pub kinetic: Complex64,
    pub mass: Complex64,
    pub yang_mills: f64,
    pub total: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QedDerivative {
    /// `[e^{igΓΔ}ψ(x+μ̂) − ψ(x)]/Δ`.
    Link,
    /// `[ψ(x+μ̂) − ψ(x)]/Δ + igΓψ(x)`.
    Expanded,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn eta(mu: usize) -> f64 {
    if mu == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `γ^μ` in the Dirac representation, row-major.
fn gamma(mu: usize) -> [[Complex64; 4]; 4] {
    let o = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let z = ZERO;
    match mu {
        0 => [[o, z, z, z], [z, o, z, z], [z, z, -o, z], [z, z, z, -o]],
        1 => [[z, z, z, o], [z, z, o, z], [z, -o, z, z], [-o, z, z, z]],
        2 => [[z, z, z, -i], [z, z, i, z], [z, i, z, z], [-i, z, z, z]],
        _ => [[z, z, o, z], [z, z, z, -o], [-o, z, z, z], [z, o, z, z]],
    }
}

/// Plain U(1) covariant derivative of an n-component field stored site-major.
pub fn u1_derivative(
    spec: &LatticeSpec,
    n: usize,
    psi: &[Complex64],
    gamma_field: &[f64],
    g: f64,
    axis: usize,
    how: QedDerivative,
) -> Vec<Complex64> {
    let d = spec.dims();
    let dx = spec.spacing();
    let mut out = vec![ZERO; psi.len()];
    for x in 0..spec.num_sites() {
        let y = spec.forward_index(x, axis).expect("periodic lattice");
        let theta = g * gamma_field[x * d + axis];
        for c in 0..n {
            let here = psi[x * n + c];
            let next = psi[y * n + c];
            out[x * n + c] = match how {
                QedDerivative::Link => {
                    let u = Complex64::new((theta * dx).cos(), (theta * dx).sin());
                    (u * next - here) / dx
                }
                QedDerivative::Expanded => (next - here) / dx + Complex64::new(0.0, theta) * here,
            };
        }
    }
    out
}

fn yang_mills(spec: &LatticeSpec, gamma_field: &[f64], x: usize) -> f64 {
    let d = spec.dims();
    let dx = spec.spacing();
    let mut sum = 0.0;
    for mu in 0..d {
        for nu in 0..d {
            let xm = spec.forward_index(x, mu).expect("periodic lattice");
            let xn = spec.forward_index(x, nu).expect("periodic lattice");
            let f = (gamma_field[xm * d + nu] - gamma_field[x * d + nu]) / dx
                - (gamma_field[xn * d + mu] - gamma_field[x * d + mu]) / dx;
            sum += eta(mu) * eta(nu) * f * f;
        }
    }
    -0.25 * sum
}

/// Scalar QED: `ψ† η^{μμ} D_μD_μψ − m²ψ†ψ − ¼F²`.
pub fn scalar_qed(
    spec: &LatticeSpec,
    n: usize,
    psi: &[Complex64],
    gamma_field: &[f64],
    g: f64,
    mass: f64,
    how: QedDerivative,
) -> Vec<QedTerms> {
    let d = spec.dims();
    let second: Vec<Vec<Complex64>> = (0..d)
        .map(|mu| {
            let first = u1_derivative(spec, n, psi, gamma_field, g, mu, how);
            u1_derivative(spec, n, &first, gamma_field, g, mu, how)
        })
        .collect();
    (0..spec.num_sites())
        .map(|x| {
            let mut kinetic = ZERO;
            let mut norm = 0.0;
            for (mu, dd) in second.iter().enumerate() {
                let mut s = ZERO;
                for c in 0..n {
                    s += psi[x * n + c].conj() * dd[x * n + c];
                }
                kinetic += s * eta(mu);
            }
            for c in 0..n {
                norm += psi[x * n + c].norm_sqr();
            }
            let mass = Complex64::new(-mass * mass * norm, 0.0);
            let ym = yang_mills(spec, gamma_field, x);
            QedTerms { kinetic, mass, yang_mills: ym, total: kinetic + mass + ym }
        })
        .collect()
}

/// Spinor QED: `ψ̄ iγ^μ D_μψ − mψ̄ψ − ¼F²` with `ψ̄ = ψ†γ⁰`.
pub fn spinor_qed(
    spec: &LatticeSpec,
    psi: &[Complex64],
    gamma_field: &[f64],
    g: f64,
    mass: f64,
    how: QedDerivative,
) -> Vec<QedTerms> {
    let d = spec.dims();
    let derivs: Vec<Vec<Complex64>> = (0..d).map(|mu| u1_derivative(spec, 4, psi, gamma_field, g, mu, how)).collect();
    let g0 = gamma(0);
    (0..spec.num_sites())
        .map(|x| {
            let p = &psi[x * 4..x * 4 + 4];
            let mut bar = [ZERO; 4];
            for (j, b) in bar.iter_mut().enumerate() {
                for k in 0..4 {
                    *b += p[k].conj() * g0[k][j];
                }
            }
            let mut kinetic = ZERO;
            for (mu, dpsi) in derivs.iter().enumerate() {
                let gm = gamma(mu);
                let dp = &dpsi[x * 4..x * 4 + 4];
                let mut s = ZERO;
                for j in 0..4 {
                    let mut row = ZERO;
                    for k in 0..4 {
                        row += gm[j][k] * dp[k];
                    }
                    s += bar[j] * row;
                }
                kinetic += s * Complex64::new(0.0, 1.0);
            }
            let mut pbp = ZERO;
            for j in 0..4 {
                pbp += bar[j] * p[j];
            }
            let mass = -pbp * mass;
            let ym = yang_mills(spec, gamma_field, x);
            QedTerms { kinetic, mass, yang_mills: ym, total: kinetic + mass + ym }
        })
        .collect()
}

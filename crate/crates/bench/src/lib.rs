//! Shared inputs for the kernel benchmarks.

use num_complex::Complex64;
use scaledgauge_core::gauge_field::{FieldKind, Potential, RealGaugeField};
use scaledgauge_core::gauge_theory::su2::SU2Config;
use scaledgauge_core::gauge_theory::{AbelianConfig, MultipletField};
use scaledgauge_core::lattice::{Boundary, LatticeSpec};

/// Periodic `n^dims` lattice with spacing 0.25.
pub fn periodic(dims: usize, n: usize) -> LatticeSpec {
    LatticeSpec::new(&vec![n; dims], 0.25, Boundary::Periodic).unwrap()
}

pub fn random_field(spec: &LatticeSpec, seed: u64) -> RealGaugeField {
    RealGaugeField::generate(spec, &FieldKind::Random { seed, amplitude: 1.0 }).unwrap()
}

pub fn gradient_field(spec: &LatticeSpec, seed: u64) -> RealGaugeField {
    RealGaugeField::generate(spec, &FieldKind::Gradient { potential: Potential::Random { seed, amplitude: 0.5 } })
        .unwrap()
}

pub fn abelian(spec: &LatticeSpec) -> AbelianConfig {
    AbelianConfig::new(gradient_field(spec, 1), random_field(spec, 2), 0.6, 1.1, 1.0, 0.2).unwrap()
}

pub fn su2(spec: &LatticeSpec) -> SU2Config {
    SU2Config::from_fn(abelian(spec), 0.8, |x, mu| {
        let s = x.iter().sum::<f64>() + mu as f64;
        [s.sin(), s.cos(), 0.5 * (2.0 * s).sin()]
    })
    .unwrap()
}

/// Smooth multiplet with `n` components.
pub fn multiplet(spec: &LatticeSpec, n: usize) -> MultipletField {
    MultipletField::from_fn(spec, n, |x, c| Complex64::from_polar(1.0 + 0.1 * c as f64, x.iter().sum::<f64>())).unwrap()
}

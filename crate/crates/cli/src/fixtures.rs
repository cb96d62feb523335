//! Smooth periodic gauge-theory fixtures on a fixed box.

use std::f64::consts::TAU;

use num_complex::Complex64;

use scaledgauge_core::gauge_field::RealGaugeField;
use scaledgauge_core::gauge_theory::su2::SU2Config;
use scaledgauge_core::gauge_theory::{AbelianConfig, GaugeTransformation, MultipletField};
use scaledgauge_core::lattice::{Boundary, LatticeSpec};
use scaledgauge_core::Result;

use crate::config::GaugeConfig;

pub struct AbelianFixture {
    pub psi: MultipletField,
    pub cfg: AbelianConfig,
    pub local: GaugeTransformation,
    pub global: GaugeTransformation,
}

pub struct Su2Fixture {
    pub psi: MultipletField,
    pub cfg: SU2Config,
    pub local: GaugeTransformation,
    pub global: GaugeTransformation,
}

/// Periodic `n × n` lattice covering the configured box.
pub fn square(g: &GaugeConfig, n: usize) -> Result<LatticeSpec> {
    LatticeSpec::new(&[n, n], g.box_length / n as f64, Boundary::Periodic)
}

fn wave(g: &GaugeConfig) -> f64 {
    TAU / g.box_length
}

fn abelian_base(g: &GaugeConfig, spec: &LatticeSpec) -> Result<AbelianConfig> {
    let k = wave(g);
    let a = RealGaugeField::from_fn(spec, |x, mu| 0.4 * (k * x[mu]).sin() + 0.1)?;
    let gamma = RealGaugeField::from_fn(spec, |x, mu| 0.3 * (k * x[1 - mu]).cos() - 0.2 * (k * x[mu]).sin())?;
    AbelianConfig::new(a, gamma, g.g_r, g.g_i, g.mass, g.lambda)
}

fn phase(g: &GaugeConfig, x: &[f64]) -> f64 {
    let k = wave(g);
    g.transform_amplitude * (k * x[0]).sin() * (k * x[1]).cos()
}

pub fn abelian(g: &GaugeConfig, n: usize) -> Result<AbelianFixture> {
    let spec = square(g, n)?;
    let k = wave(g);
    let psi = MultipletField::from_fn(&spec, 1, |x, _| {
        Complex64::from_polar(1.0, k * x[0]) + Complex64::new(0.5 * (k * x[1]).cos(), 0.25)
    })?;
    let local = GaugeTransformation::from_fn(&spec, |x| (phase(g, x), [0.0; 3]))?;
    let global = GaugeTransformation::global(&spec, 0.7, [0.0; 3]);
    Ok(AbelianFixture { psi, cfg: abelian_base(g, &spec)?, local, global })
}

pub fn su2(g: &GaugeConfig, n: usize) -> Result<Su2Fixture> {
    let spec = square(g, n)?;
    let k = wave(g);
    let psi = MultipletField::from_fn(&spec, 2, |x, c| {
        if c == 0 {
            Complex64::from_polar(1.0, k * x[0])
        } else {
            Complex64::new(0.5 * (k * x[1]).cos(), 0.2 + 0.1 * (k * x[0]).sin())
        }
    })?;
    let cfg = SU2Config::from_fn(abelian_base(g, &spec)?, g.g, |x, mu| {
        [0.5 * (k * x[0]).sin(), 0.3 * (k * x[1]).cos() + 0.1 * mu as f64, 0.2 * (k * (x[0] + x[1])).cos()]
    })?;
    let amp = g.transform_amplitude;
    let local = GaugeTransformation::from_fn(&spec, |x| {
        (phase(g, x), [amp * (k * x[0]).cos(), 0.8 * amp * (k * x[1]).sin(), 0.6 * amp])
    })?;
    let global = GaugeTransformation::global(&spec, 0.4, [0.9, -1.3, 0.2]);
    Ok(Su2Fixture { psi, cfg, local, global })
}

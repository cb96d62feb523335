//! Complex scalar fields on the lattice: plain and covariant forward
//! derivatives, and spacetime integrals transported to an anchor site.
//!
//! Field values are stored as structure-local numbers. Moving a value from a
//! neighbouring site is the "same number" map, so the only numeric change a
//! transport introduces is the multiplication by the link scale factor.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge_field::{RealGaugeField, DEFAULT_INTEGRABILITY_TOL};
use crate::lattice::{Boundary, LatticePath, LatticeSpec, Site, MAX_DIMS};

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexLatticeField {
    spec: LatticeSpec,
    values: Vec<Complex64>,
}

/// Smooth fixtures selectable from configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldFixture {
    Constant { re: f64, im: f64 },
    /// `exp(i k·x)` with `k_μ = 2π m_μ / L_μ`, periodic on the box.
    PlaneWave { modes: Vec<f64> },
    /// Gaussian bump centred in the box.
    Gaussian { amplitude: f64, width: f64 },
    /// `Φ(x) = x_axis`.
    Coordinate { axis: usize },
}

impl ComplexLatticeField {
    pub fn from_values(spec: &LatticeSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != spec.num_sites() {
            return Err(Error::DimensionMismatch {
                expected: spec.num_sites(),
                found: values.len(),
            });
        }
        if !values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite("complex lattice field"));
        }
        Ok(ComplexLatticeField {
            spec: spec.clone(),
            values,
        })
    }

    pub fn from_fn(spec: &LatticeSpec, mut f: impl FnMut(&[f64; MAX_DIMS]) -> Complex64) -> Result<Self> {
        let values = spec.sites().map(|s| f(&spec.position(&s))).collect();
        Self::from_values(spec, values)
    }

    pub fn constant(spec: &LatticeSpec, c: Complex64) -> Result<Self> {
        Self::from_values(spec, vec![c; spec.num_sites()])
    }

    pub fn fixture(spec: &LatticeSpec, fixture: &FieldFixture) -> Result<Self> {
        let d = spec.dims();
        match fixture {
            FieldFixture::Constant { re, im } => Self::constant(spec, Complex64::new(*re, *im)),
            FieldFixture::PlaneWave { modes } => {
                if modes.len() != d {
                    return Err(Error::DimensionMismatch { expected: d, found: modes.len() });
                }
                let k: Vec<f64> = (0..d)
                    .map(|a| std::f64::consts::TAU * modes[a] / spec.length(a))
                    .collect();
                Self::from_fn(spec, |x| {
                    let phase: f64 = (0..d).map(|a| k[a] * x[a]).sum();
                    Complex64::from_polar(1.0, phase)
                })
            }
            FieldFixture::Gaussian { amplitude, width } => {
                let c: Vec<f64> = (0..d).map(|a| 0.5 * spec.length(a)).collect();
                Self::from_fn(spec, |x| {
                    let r2: f64 = (0..d).map(|a| (x[a] - c[a]).powi(2)).sum();
                    Complex64::new(amplitude * (-r2 / (2.0 * width * width)).exp(), 0.0)
                })
            }
            FieldFixture::Coordinate { axis } => {
                if *axis >= d {
                    return Err(Error::InvalidArgument(format!("axis {axis} out of range")));
                }
                Self::from_fn(spec, |x| Complex64::new(x[*axis], 0.0))
            }
        }
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn at(&self, site: &Site) -> Complex64 {
        self.values[self.spec.index(site)]
    }
}

/// One derivative component `∂′_μ` or `D_μ` at every site.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeResult {
    pub axis: usize,
    pub values: Vec<Complex64>,
}

impl DerivativeResult {
    pub fn max_abs_diff(&self, other: &DerivativeResult) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn check_forward(spec: &LatticeSpec, axis: usize) -> Result<()> {
    if axis >= spec.dims() {
        return Err(Error::InvalidArgument(format!("axis {axis} out of range")));
    }
    if spec.boundary() != Boundary::Periodic {
        return Err(Error::InvalidArgument(
            "forward differences need a periodic lattice".into(),
        ));
    }
    Ok(())
}

fn check_same_lattice(a: &LatticeSpec, b: &LatticeSpec) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::InvalidArgument("fields live on different lattices".into()))
    }
}

/// `[Φ(x+μ̂Δ) − Φ(x)]/Δ`.
pub fn plain_derivative(phi: &ComplexLatticeField, axis: usize) -> Result<DerivativeResult> {
    let spec = &phi.spec;
    check_forward(spec, axis)?;
    let dx = spec.spacing();
    let values = (0..spec.num_sites())
        .map(|i| {
            let j = spec.forward_index(i, axis).expect("periodic");
            (phi.values[j] - phi.values[i]) / dx
        })
        .collect();
    Ok(DerivativeResult { axis, values })
}

/// `[exp(A_μ(x)Δ)·Φ(x+μ̂Δ) − Φ(x)]/Δ`.
pub fn covariant_derivative(
    phi: &ComplexLatticeField,
    a: &RealGaugeField,
    axis: usize,
) -> Result<DerivativeResult> {
    let spec = &phi.spec;
    check_forward(spec, axis)?;
    check_same_lattice(spec, a.spec())?;
    let dx = spec.spacing();
    let values = (0..spec.num_sites())
        .map(|i| {
            let j = spec.forward_index(i, axis).expect("periodic");
            let r = a.forward_link(i, axis).value();
            (phi.values[j] * r - phi.values[i]) / dx
        })
        .collect();
    Ok(DerivativeResult { axis, values })
}

/// First-order expansion `(∂′_μ + A_μ)Φ`.
pub fn first_order_covariant(
    phi: &ComplexLatticeField,
    a: &RealGaugeField,
    axis: usize,
) -> Result<DerivativeResult> {
    check_same_lattice(phi.spec(), a.spec())?;
    let mut d = plain_derivative(phi, axis)?;
    for (i, v) in d.values.iter_mut().enumerate() {
        *v += phi.values[i] * a.component(i, axis);
    }
    Ok(d)
}

/// How the path `P(y)` from the anchor to each integration site is chosen.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum PathRule {
    /// Axis 0 first, then axis 1, ... (minimal image on periodic lattices).
    #[default]
    CanonicalStaircase,
    /// Highest axis first.
    ReverseStaircase,
    /// Canonical staircase, after confirming the field is path independent.
    RequireIntegrable { tolerance: f64 },
}

fn rule_path(spec: &LatticeSpec, rule: PathRule, from: &Site, to: &Site) -> LatticePath {
    match rule {
        PathRule::ReverseStaircase => {
            let order: Vec<usize> = (0..spec.dims()).rev().collect();
            spec.staircase_with_order(from, to, &order)
        }
        _ => spec.axis_ordered_path(from, to),
    }
}

/// `∫ₓΦ = Σ_y r^{P(y)}_{y,x} Φ(y) Δ^dims`, every integrand value carried to
/// the anchor's structure along the path chosen by `rule`.
pub fn transported_integral(
    phi: &ComplexLatticeField,
    a: &RealGaugeField,
    anchor: &Site,
    rule: PathRule,
) -> Result<Complex64> {
    let spec = phi.spec();
    check_same_lattice(spec, a.spec())?;
    if !spec.contains(anchor) {
        return Err(Error::InvalidArgument(format!("anchor {:?} is not on the lattice", anchor.coords())));
    }
    if let PathRule::RequireIntegrable { tolerance } = rule {
        let report = a.is_integrable(tolerance)?;
        if !report.integrable {
            return Err(Error::NotIntegrable {
                deviation: report.worst_deviation,
                tolerance,
            });
        }
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for (i, y) in spec.sites().enumerate() {
        let path = rule_path(spec, rule, anchor, &y);
        let r = a.path_transport(&path)?.value;
        sum += phi.values[i] * r;
    }
    Ok(sum * spec.cell_volume())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnchorPair {
    pub from: [usize; MAX_DIMS],
    pub to: [usize; MAX_DIMS],
    /// `∫_{to} / ∫_{from}`.
    pub ratio: Complex64,
    /// Transport factor from `to` to `from`.
    pub expected: f64,
    /// `|∫_{to} − expected·∫_{from}| / max(|∫_{to}|, |expected·∫_{from}|)`.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnchorReport {
    pub integrals: Vec<([usize; MAX_DIMS], Complex64)>,
    pub pairs: Vec<AnchorPair>,
}

impl AnchorReport {
    pub fn max_deviation(&self) -> f64 {
        self.pairs.iter().map(|p| p.deviation).fold(0.0, f64::max)
    }
}

/// Compares transported integrals at several anchors against the transport
/// factor between them. Requires an integrable field.
pub fn anchor_dependence_report(
    phi: &ComplexLatticeField,
    a: &RealGaugeField,
    anchors: &[Site],
) -> Result<AnchorReport> {
    let check = a.is_integrable(DEFAULT_INTEGRABILITY_TOL)?;
    if !check.integrable {
        return Err(Error::NotIntegrable {
            deviation: check.worst_deviation,
            tolerance: DEFAULT_INTEGRABILITY_TOL,
        });
    }
    let spec = phi.spec();
    let integrals = anchors
        .iter()
        .map(|x| Ok((*x.coords(), transported_integral(phi, a, x, PathRule::CanonicalStaircase)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut pairs = Vec::new();
    for i in 0..anchors.len() {
        for j in (i + 1)..anchors.len() {
            let (x, x2) = (&anchors[i], &anchors[j]);
            let (ix, ix2) = (integrals[i].1, integrals[j].1);
            let expected = a.path_transport(&spec.axis_ordered_path(x2, x))?.value;
            let predicted = ix * expected;
            let scale = ix2.norm().max(predicted.norm());
            let deviation = if scale == 0.0 { 0.0 } else { (ix2 - predicted).norm() / scale };
            pairs.push(AnchorPair {
                from: *x.coords(),
                to: *x2.coords(),
                ratio: ix2 / ix,
                expected,
                deviation,
            });
        }
    }
    Ok(AnchorReport { integrals, pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convergence::fit_loglog;
    use crate::gauge_field::{FieldKind, Potential};

    fn periodic(extents: &[usize], dx: f64) -> LatticeSpec {
        LatticeSpec::new(extents, dx, Boundary::Periodic).unwrap()
    }

    #[test]
    fn plain_derivative_examples() {
        let spec = periodic(&[6, 5], 0.2);
        let c = ComplexLatticeField::constant(&spec, Complex64::new(2.0, -1.0)).unwrap();
        assert!(plain_derivative(&c, 1).unwrap().values.iter().all(|v| v.norm() == 0.0));

        let x = ComplexLatticeField::fixture(&spec, &FieldFixture::Coordinate { axis: 0 }).unwrap();
        let d = plain_derivative(&x, 0).unwrap();
        for (i, v) in d.values.iter().enumerate() {
            if spec.site(i).coord(0) + 1 < 6 {
                assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn plane_wave_difference_tends_to_ik() {
        // (e^{ikΔ} − 1)/Δ = ik − k²Δ/2 + O(Δ²); error vs ik is first order.
        let mut pts = Vec::new();
        for k in 0..4 {
            let n = 16 << k;
            let spec = periodic(&[n], 1.6 / n as f64);
            let phi = ComplexLatticeField::fixture(&spec, &FieldFixture::PlaneWave { modes: vec![1.0] }).unwrap();
            let kk = std::f64::consts::TAU / 1.6;
            let d = plain_derivative(&phi, 0).unwrap();
            let err = d
                .values
                .iter()
                .zip(phi.values())
                .map(|(dv, p)| (dv - p * Complex64::new(0.0, kk)).norm())
                .fold(0.0, f64::max);
            let oracle = kk * kk * spec.spacing() / 2.0;
            assert!((err - oracle).abs() < 0.05 * oracle);
            pts.push((spec.spacing(), err));
        }
        assert!(fit_loglog(&pts).unwrap().slope > 0.95);
    }

    #[test]
    fn covariant_with_zero_field_is_bitwise_plain() {
        let spec = periodic(&[5, 4], 0.3);
        let phi = ComplexLatticeField::fixture(&spec, &FieldFixture::PlaneWave { modes: vec![1.0, 2.0] }).unwrap();
        let zero = RealGaugeField::zeros(&spec);
        for axis in 0..2 {
            assert_eq!(
                covariant_derivative(&phi, &zero, axis).unwrap(),
                plain_derivative(&phi, axis).unwrap()
            );
            assert_eq!(
                first_order_covariant(&phi, &zero, axis).unwrap(),
                plain_derivative(&phi, axis).unwrap()
            );
        }
    }

    #[test]
    fn covariant_constant_field_limit() {
        let (a0, c) = (0.8, Complex64::new(1.5, 0.5));
        for dx in [0.1, 0.01, 0.001] {
            let spec = periodic(&[4], dx);
            let phi = ComplexLatticeField::constant(&spec, c).unwrap();
            let a = RealGaugeField::generate(&spec, &FieldKind::Constant { values: vec![a0] }).unwrap();
            let d = covariant_derivative(&phi, &a, 0).unwrap();
            let closed = c * (((a0 * dx).exp() - 1.0) / dx);
            assert!((d.values[0] - closed).norm() < 1e-12);
            assert!((d.values[0] - c * a0).norm() < a0 * a0 * dx * c.norm());
        }
        let spec = periodic(&[4], 0.1);
        let one = ComplexLatticeField::constant(&spec, Complex64::new(1.0, 0.0)).unwrap();
        let a = RealGaugeField::generate(&spec, &FieldKind::Constant { values: vec![a0] }).unwrap();
        assert!(first_order_covariant(&one, &a, 0).unwrap().values.iter().all(|v| *v == Complex64::new(a0, 0.0)));
    }

    fn smooth_setup(n: usize) -> (ComplexLatticeField, RealGaugeField) {
        let len = 1.6;
        let spec = periodic(&[n, n], len / n as f64);
        let phi = ComplexLatticeField::fixture(&spec, &FieldFixture::PlaneWave { modes: vec![1.0, -1.0] }).unwrap();
        let k = std::f64::consts::TAU / len;
        let a = RealGaugeField::from_fn(&spec, |x, axis| {
            0.7 * (k * x[0]).sin() + 0.4 * (k * x[1]).cos() + 0.1 * axis as f64
        })
        .unwrap();
        (phi, a)
    }

    #[test]
    fn covariant_and_first_order_converge() {
        let mut pts = Vec::new();
        let mut second = Vec::new();
        for n in [16, 32, 64, 128] {
            let (phi, a) = smooth_setup(n);
            let dx = phi.spec().spacing();
            let cov = covariant_derivative(&phi, &a, 0).unwrap();
            let fo = first_order_covariant(&phi, &a, 0).unwrap();
            let plain = plain_derivative(&phi, 0).unwrap();
            pts.push((dx, cov.max_abs_diff(&fo)));
            // cov − first = Δ(A²Φ/2 + A∂′Φ) + O(Δ²)
            let rest = (0..cov.values.len())
                .map(|i| {
                    let ai = a.component(i, 0);
                    let lead = (phi.values()[i] * (ai * ai / 2.0) + plain.values[i] * ai) * dx;
                    (cov.values[i] - fo.values[i] - lead).norm()
                })
                .fold(0.0, f64::max);
            second.push((dx, rest));
        }
        assert!(fit_loglog(&pts).unwrap().slope >= 0.9);
        assert!(fit_loglog(&second).unwrap().slope >= 1.9);
    }

    #[test]
    fn derivatives_reject_clamped_lattices_and_foreign_fields() {
        let spec = LatticeSpec::new(&[4, 4], 0.5, Boundary::Clamped).unwrap();
        let phi = ComplexLatticeField::constant(&spec, Complex64::new(1.0, 0.0)).unwrap();
        assert!(plain_derivative(&phi, 0).is_err());
        let p = periodic(&[4, 4], 0.5);
        let phi = ComplexLatticeField::constant(&p, Complex64::new(1.0, 0.0)).unwrap();
        let other = RealGaugeField::zeros(&periodic(&[4, 4], 0.25));
        assert!(covariant_derivative(&phi, &other, 0).is_err());
        assert!(plain_derivative(&phi, 2).is_err());
    }

    #[test]
    fn integral_with_zero_field_is_riemann_sum() {
        let spec = periodic(&[4, 3], 0.5);
        let phi = ComplexLatticeField::fixture(&spec, &FieldFixture::Gaussian { amplitude: 1.0, width: 0.7 }).unwrap();
        let zero = RealGaugeField::zeros(&spec);
        let got = transported_integral(&phi, &zero, &Site::new(&[1, 2]), PathRule::CanonicalStaircase).unwrap();
        let expected: Complex64 = phi.values().iter().sum::<Complex64>() * 0.25;
        assert!((got - expected).norm() < 1e-15);
    }

    fn gradient_setup(spec: &LatticeSpec, seed: u64) -> RealGaugeField {
        RealGaugeField::generate(spec, &FieldKind::Gradient { potential: Potential::Random { seed, amplitude: 0.5 } })
            .unwrap()
    }

    #[test]
    fn integral_with_gradient_field_matches_closed_form_for_every_path() {
        let spec = LatticeSpec::new(&[3, 3], 0.5, Boundary::Clamped).unwrap();
        let a = gradient_setup(&spec, 2);
        let f = a.potential().unwrap().to_vec();
        let phi = ComplexLatticeField::from_fn(&spec, |x| Complex64::new(1.0 + x[0], x[1])).unwrap();
        let anchor = Site::new(&[1, 0]);
        let ia = spec.index(&anchor);
        let closed: Complex64 = spec
            .sites()
            .enumerate()
            .map(|(i, _)| phi.values()[i] * (f[i] - f[ia]).exp())
            .sum::<Complex64>()
            * 0.25;
        // Brute force over every staircase path for every integration site.
        let mut extremes = (f64::INFINITY, 0.0f64);
        for y in spec.sites() {
            let t: Vec<f64> = spec
                .staircase_paths(&anchor, &y, 100)
                .unwrap()
                .iter()
                .map(|p| a.path_transport(p).unwrap().value)
                .collect();
            let exact = (f[spec.index(&y)] - f[ia]).exp();
            for v in t {
                let dev = (v - exact).abs() / exact;
                extremes = (extremes.0.min(dev), extremes.1.max(dev));
            }
        }
        assert!(extremes.1 < 1e-14);
        for rule in [
            PathRule::CanonicalStaircase,
            PathRule::ReverseStaircase,
            PathRule::RequireIntegrable { tolerance: 1e-12 },
        ] {
            let got = transported_integral(&phi, &a, &anchor, rule).unwrap();
            assert!((got - closed).norm() < 1e-14 * closed.norm(), "{rule:?}");
        }
    }

    #[test]
    fn vortex_integral_depends_on_path_rule() {
        let spec = LatticeSpec::new(&[5, 5], 0.5, Boundary::Clamped).unwrap();
        let a = RealGaugeField::generate(&spec, &FieldKind::Vortex { strength: 0.1, center: None }).unwrap();
        let phi = ComplexLatticeField::constant(&spec, Complex64::new(1.0, 0.0)).unwrap();
        let o = Site::origin();
        let i1 = transported_integral(&phi, &a, &o, PathRule::CanonicalStaircase).unwrap();
        let i2 = transported_integral(&phi, &a, &o, PathRule::ReverseStaircase).unwrap();
        assert!((i1 - i2).norm() > 1e-3 * i1.norm());
        assert!(matches!(
            transported_integral(&phi, &a, &o, PathRule::RequireIntegrable { tolerance: 1e-10 }),
            Err(Error::NotIntegrable { .. })
        ));
        assert!(anchor_dependence_report(&phi, &a, &[o]).is_err());
    }

    #[test]
    fn anchor_covariance_for_gradient_fields() {
        let spec = periodic(&[6, 6], 0.5);
        let a = gradient_setup(&spec, 4);
        let f = a.potential().unwrap().to_vec();
        let phi = ComplexLatticeField::fixture(&spec, &FieldFixture::PlaneWave { modes: vec![1.0, 0.0] }).unwrap();
        let anchors = [Site::new(&[0, 0]), Site::new(&[2, 3]), Site::new(&[5, 5])];
        let report = anchor_dependence_report(&phi, &a, &anchors).unwrap();
        assert_eq!(report.pairs.len(), 3);
        assert!(report.max_deviation() < 1e-12);
        for p in &report.pairs {
            let (x, x2) = (spec.index(&Site::new(&p.from)), spec.index(&Site::new(&p.to)));
            let closed = (f[x] - f[x2]).exp();
            assert!((p.expected - closed).abs() < 1e-13 * closed);
        }
        let single = anchor_dependence_report(&phi, &a, &anchors[..1]).unwrap();
        assert!(single.pairs.is_empty());

        let zero = RealGaugeField::zeros(&spec);
        let report = anchor_dependence_report(&phi, &zero, &anchors).unwrap();
        let first = report.integrals[0].1;
        assert!(report.integrals.iter().all(|(_, v)| *v == first));
    }
}

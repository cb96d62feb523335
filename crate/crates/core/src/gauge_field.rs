//! The real gauge field `A_μ(x)`, link and path transport factors, and
//! integrability diagnostics.
//!
//! The scale factor attached to the directed link `x → x+μ̂Δ` is
//! `exp(A_μ(x)Δ)`; the opposite orientation reuses the same `A_μ(x)` with the
//! sign flipped. Link factors are kept in exponent form so that a link
//! composed with its reverse is exactly `1`.

use std::collections::BTreeMap;
use std::ops::Mul;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{LatticePath, LatticeSpec, Orientation, Plaquette, Site, Step, MAX_DIMS};
use crate::rng;

/// Site potential `f` used to build gradient fields `A = ∇′f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum Potential {
    Constant { value: f64 },
    Linear { slope: Vec<f64> },
    /// `amplitude · exp(−|x − center|² / (2 width²))`; default center is the box centre.
    Gaussian {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: Option<Vec<f64>>,
    },
    /// `amplitude · Π cos(2π m_μ x_μ / L_μ)`, periodic on the lattice box.
    Sinusoid { amplitude: f64, modes: Vec<f64> },
    /// Independent uniform values in `[-amplitude, amplitude]`.
    Random { seed: u64, amplitude: f64 },
}

impl Potential {
    pub fn evaluate(&self, spec: &LatticeSpec) -> Result<Vec<f64>> {
        let d = spec.dims();
        let need = |v: &Vec<f64>, what: &str| -> Result<()> {
            if v.len() == d {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!(
                    "{what} needs {d} components, got {}",
                    v.len()
                )))
            }
        };
        let values = match self {
            Potential::Constant { value } => vec![*value; spec.num_sites()],
            Potential::Linear { slope } => {
                need(slope, "linear potential slope")?;
                spec.sites()
                    .map(|s| {
                        let x = spec.position(&s);
                        (0..d).map(|a| slope[a] * x[a]).sum()
                    })
                    .collect()
            }
            Potential::Gaussian { amplitude, width, center } => {
                let c = match center {
                    Some(c) => {
                        need(c, "gaussian center")?;
                        c.clone()
                    }
                    None => (0..d).map(|a| 0.5 * spec.length(a)).collect(),
                };
                spec.sites()
                    .map(|s| {
                        let x = spec.position(&s);
                        let r2: f64 = (0..d).map(|a| (x[a] - c[a]).powi(2)).sum();
                        amplitude * (-r2 / (2.0 * width * width)).exp()
                    })
                    .collect()
            }
            Potential::Sinusoid { amplitude, modes } => {
                need(modes, "sinusoid modes")?;
                spec.sites()
                    .map(|s| {
                        let x = spec.position(&s);
                        amplitude
                            * (0..d)
                                .map(|a| {
                                    (std::f64::consts::TAU * modes[a] * x[a] / spec.length(a)).cos()
                                })
                                .product::<f64>()
                    })
                    .collect()
            }
            Potential::Random { seed, amplitude } => {
                let mut rng = rng::seeded(*seed);
                (0..spec.num_sites())
                    .map(|_| rng.gen_range(-1.0..=1.0) * amplitude)
                    .collect()
            }
        };
        if values.iter().all(|v| v.is_finite()) {
            Ok(values)
        } else {
            Err(Error::NonFinite("potential"))
        }
    }
}

/// Field-generation recipes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldKind {
    Zero,
    Constant { values: Vec<f64> },
    Gradient { potential: Potential },
    /// `A_0 = −c (x_1 − y_c)`, `A_1 = c (x_0 − x_c)`, other axes zero.
    Vortex {
        strength: f64,
        #[serde(default)]
        center: Option<Vec<f64>>,
    },
    Random { seed: u64, amplitude: f64 },
}

/// Real gauge field, one component per site and axis (units of 1/length).
#[derive(Debug, Clone, PartialEq)]
pub struct RealGaugeField {
    spec: LatticeSpec,
    components: Vec<f64>,
    potential: Option<Vec<f64>>,
}

impl RealGaugeField {
    pub fn zeros(spec: &LatticeSpec) -> Self {
        RealGaugeField {
            spec: spec.clone(),
            components: vec![0.0; spec.num_sites() * spec.dims()],
            potential: None,
        }
    }

    /// Builds a field from `f(position, axis)`.
    pub fn from_fn(
        spec: &LatticeSpec,
        mut f: impl FnMut(&[f64; MAX_DIMS], usize) -> f64,
    ) -> Result<Self> {
        let d = spec.dims();
        let mut components = Vec::with_capacity(spec.num_sites() * d);
        for site in spec.sites() {
            let x = spec.position(&site);
            for axis in 0..d {
                components.push(f(&x, axis));
            }
        }
        Self::from_components(spec, components)
    }

    pub fn from_components(spec: &LatticeSpec, components: Vec<f64>) -> Result<Self> {
        let expected = spec.num_sites() * spec.dims();
        if components.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: components.len(),
            });
        }
        if !components.iter().all(|c| c.is_finite()) {
            return Err(Error::NonFinite("gauge field component"));
        }
        Ok(RealGaugeField {
            spec: spec.clone(),
            components,
            potential: None,
        })
    }

    /// Forward-difference gradient `A_μ(x) = [f(x+μ̂Δ) − f(x)]/Δ` of site
    /// values `f`. Periodic lattices wrap; on clamped lattices the last layer
    /// along each axis has no outgoing link and gets `0`.
    pub fn gradient_of(spec: &LatticeSpec, f: Vec<f64>) -> Result<Self> {
        if f.len() != spec.num_sites() {
            return Err(Error::DimensionMismatch {
                expected: spec.num_sites(),
                found: f.len(),
            });
        }
        let d = spec.dims();
        let dx = spec.spacing();
        let mut components = Vec::with_capacity(f.len() * d);
        for i in 0..f.len() {
            for axis in 0..d {
                components.push(match spec.forward_index(i, axis) {
                    Some(j) => (f[j] - f[i]) / dx,
                    None => 0.0,
                });
            }
        }
        let mut field = Self::from_components(spec, components)?;
        field.potential = Some(f);
        Ok(field)
    }

    pub fn generate(spec: &LatticeSpec, kind: &FieldKind) -> Result<Self> {
        let d = spec.dims();
        match kind {
            FieldKind::Zero => Ok(Self::zeros(spec)),
            FieldKind::Constant { values } => {
                if values.len() != d {
                    return Err(Error::DimensionMismatch { expected: d, found: values.len() });
                }
                Self::from_fn(spec, |_, axis| values[axis])
            }
            FieldKind::Gradient { potential } => Self::gradient_of(spec, potential.evaluate(spec)?),
            FieldKind::Vortex { strength, center } => {
                if d < 2 {
                    return Err(Error::InvalidArgument("vortex field needs at least 2 dimensions".into()));
                }
                let c = match center {
                    Some(c) if c.len() >= 2 => [c[0], c[1]],
                    Some(c) => return Err(Error::DimensionMismatch { expected: 2, found: c.len() }),
                    None => [0.5 * spec.length(0), 0.5 * spec.length(1)],
                };
                Self::from_fn(spec, |x, axis| match axis {
                    0 => -strength * (x[1] - c[1]),
                    1 => strength * (x[0] - c[0]),
                    _ => 0.0,
                })
            }
            FieldKind::Random { seed, amplitude } => {
                let mut rng = rng::seeded(*seed);
                let comps = (0..spec.num_sites() * d)
                    .map(|_| rng.gen_range(-1.0..=1.0) * amplitude)
                    .collect();
                Self::from_components(spec, comps)
            }
        }
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    /// Site potential for fields built as gradients.
    pub fn potential(&self) -> Option<&[f64]> {
        self.potential.as_deref()
    }

    #[inline]
    pub fn component(&self, index: usize, axis: usize) -> f64 {
        self.components[index * self.spec.dims() + axis]
    }

    pub fn component_at(&self, site: &Site, axis: usize) -> f64 {
        self.component(self.spec.index(site), axis)
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    /// Forward link factor `exp(A_μ(x)Δ)` by linear index.
    pub fn forward_link(&self, index: usize, axis: usize) -> LinkFactor {
        LinkFactor::from_exponent(self.component(index, axis) * self.spec.spacing())
    }

    /// Link factor for one step from `site`. A backward step uses the
    /// forward link it traverses in reverse, so the two are exact inverses.
    pub fn link_factor(&self, site: &Site, step: Step) -> Result<LinkFactor> {
        let next = self.spec.neighbor(site, step)?;
        Ok(match step.orientation {
            Orientation::Forward => self.forward_link(self.spec.index(site), step.axis),
            Orientation::Backward => self.forward_link(self.spec.index(&next), step.axis).inverse(),
        })
    }

    /// Net traversal count per forward link (keyed by `index·dims + axis`).
    fn net_links(&self, path: &LatticePath) -> Result<BTreeMap<usize, i64>> {
        let d = self.spec.dims();
        let mut counts = BTreeMap::new();
        let mut site = path.start;
        for &step in &path.steps {
            let next = self.spec.neighbor(&site, step)?;
            let (tail, sign) = match step.orientation {
                Orientation::Forward => (site, 1),
                Orientation::Backward => (next, -1),
            };
            *counts.entry(self.spec.index(&tail) * d + step.axis).or_insert(0) += sign;
            site = next;
        }
        Ok(counts)
    }

    /// `r^P = exp(Σ ±A·Δ)` over the links of the path. Links traversed in
    /// both directions cancel before summation.
    pub fn path_transport(&self, path: &LatticePath) -> Result<PathTransport> {
        let counts = self.net_links(path)?;
        let sum: f64 = counts
            .iter()
            .filter(|(_, &n)| n != 0)
            .map(|(&link, &n)| n as f64 * self.components[link])
            .sum();
        let exponent = sum * self.spec.spacing();
        Ok(PathTransport {
            exponent,
            value: exponent.exp(),
            path: path.clone(),
        })
    }

    /// Product of the individual link factor values along the path.
    pub fn path_transport_product(&self, path: &LatticePath) -> Result<f64> {
        let mut site = path.start;
        let mut product = 1.0;
        for &step in &path.steps {
            product *= self.link_factor(&site, step)?.value();
            site = self.spec.neighbor(&site, step)?;
        }
        Ok(product)
    }

    /// `[A_ν(x+μ̂) − A_ν(x)]/Δ − [A_μ(x+ν̂) − A_μ(x)]/Δ`.
    pub fn plaquette_curl(&self, q: &Plaquette) -> Result<f64> {
        let x = self.spec.index(&q.corner);
        let x_mu = self.spec.index(&self.spec.neighbor(&q.corner, Step::forward(q.mu))?);
        let x_nu = self.spec.index(&self.spec.neighbor(&q.corner, Step::forward(q.nu))?);
        let dx = self.spec.spacing();
        Ok((self.component(x_mu, q.nu) - self.component(x, q.nu)) / dx
            - (self.component(x_nu, q.mu) - self.component(x, q.mu)) / dx)
    }

    pub fn loop_transport(&self, q: &Plaquette) -> Result<f64> {
        Ok(self.path_transport(&q.boundary_path())?.value)
    }

    /// Sweeps every plaquette and reports the worst `|loop − 1|`.
    pub fn is_integrable(&self, tol: f64) -> Result<IntegrabilityReport> {
        let mut report = IntegrabilityReport {
            integrable: true,
            worst_plaquette: None,
            worst_deviation: 0.0,
            worst_curl: 0.0,
            n_plaquettes: 0,
            tolerance: tol,
        };
        for q in self.spec.enumerate_plaquettes() {
            let deviation = (self.loop_transport(&q)? - 1.0).abs();
            report.n_plaquettes += 1;
            if report.worst_plaquette.is_none() || deviation > report.worst_deviation {
                report.worst_deviation = deviation;
                report.worst_plaquette = Some(q);
                report.worst_curl = self.plaquette_curl(&q)?;
            }
        }
        report.integrable = report.worst_deviation <= tol;
        Ok(report)
    }

    /// Relative spread `(max − min)/max` of the transports along `paths`.
    pub fn transport_spread(&self, paths: &[LatticePath]) -> Result<f64> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for p in paths {
            let v = self.path_transport(p)?.value;
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if paths.is_empty() {
            Ok(0.0)
        } else {
            Ok((hi - lo) / hi)
        }
    }
}

/// Default tolerance on `|loop − 1|` for integrability.
pub const DEFAULT_INTEGRABILITY_TOL: f64 = 1e-10;

/// Positive scale factor of one directed link, stored as its exponent.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LinkFactor {
    exponent: f64,
}

impl LinkFactor {
    pub const IDENTITY: LinkFactor = LinkFactor { exponent: 0.0 };

    pub fn from_exponent(exponent: f64) -> Self {
        LinkFactor { exponent }
    }

    pub fn exponent(self) -> f64 {
        self.exponent
    }

    pub fn value(self) -> f64 {
        self.exponent.exp()
    }

    pub fn inverse(self) -> Self {
        LinkFactor { exponent: -self.exponent }
    }
}

impl Mul for LinkFactor {
    type Output = LinkFactor;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: LinkFactor) -> LinkFactor {
        LinkFactor { exponent: self.exponent + rhs.exponent }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathTransport {
    pub exponent: f64,
    pub value: f64,
    pub path: LatticePath,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrabilityReport {
    pub integrable: bool,
    pub worst_plaquette: Option<Plaquette>,
    pub worst_deviation: f64,
    pub worst_curl: f64,
    pub n_plaquettes: usize,
    pub tolerance: f64,
}

type PathFn = Box<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

/// Continuous path `s ∈ [0, 1] ↦ P(s)` with its derivative `dP/ds`.
pub struct ParamPath {
    point: PathFn,
    tangent: PathFn,
}

impl ParamPath {
    pub fn new(
        point: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static,
        tangent: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        ParamPath {
            point: Box::new(point),
            tangent: Box::new(tangent),
        }
    }

    pub fn straight(from: &[f64], to: &[f64]) -> Self {
        let (a, b) = (from.to_vec(), to.to_vec());
        let delta: Vec<f64> = a.iter().zip(&b).map(|(x, y)| y - x).collect();
        let d2 = delta.clone();
        ParamPath::new(
            move |s| a.iter().zip(&delta).map(|(x, d)| x + s * d).collect(),
            move |_| d2.clone(),
        )
    }

    pub fn point(&self, s: f64) -> Vec<f64> {
        (self.point)(s)
    }

    pub fn tangent(&self, s: f64) -> Vec<f64> {
        (self.tangent)(s)
    }

    /// Checks `P(0)` and `P(1)` against the physical positions of two sites.
    pub fn check_endpoints(&self, spec: &LatticeSpec, from: &Site, to: &Site) -> Result<()> {
        for (s, site) in [(0.0, from), (1.0, to)] {
            let p = self.point(s);
            let x = spec.position(site);
            if p.len() != spec.dims() {
                return Err(Error::DimensionMismatch { expected: spec.dims(), found: p.len() });
            }
            if p.iter().zip(&x).any(|(a, b)| (a - b).abs() > 1e-12) {
                return Err(Error::InvalidArgument(format!(
                    "path endpoint {p:?} does not match site position {:?}",
                    &x[..spec.dims()]
                )));
            }
        }
        Ok(())
    }
}

/// `∫₀¹ A(P(s))·P′(s) ds` by composite Simpson with `n_quad` (even) intervals.
pub fn line_integral(
    field: &dyn Fn(&[f64]) -> Vec<f64>,
    path: &ParamPath,
    n_quad: usize,
) -> Result<f64> {
    if n_quad < 2 || !n_quad.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "Simpson quadrature needs an even interval count ≥ 2, got {n_quad}"
        )));
    }
    let h = 1.0 / n_quad as f64;
    let mut acc = 0.0;
    for k in 0..=n_quad {
        let s = k as f64 * h;
        let a = field(&path.point(s));
        let t = path.tangent(s);
        let g: f64 = a.iter().zip(&t).map(|(x, y)| x * y).sum();
        if !g.is_finite() {
            return Err(Error::NonFinite("line-integral integrand"));
        }
        let w = if k == 0 || k == n_quad {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * g;
    }
    Ok(acc * h / 3.0)
}

/// Continuous-path transport `exp{∫ A·dP}`.
pub fn line_integral_transport(
    field: &dyn Fn(&[f64]) -> Vec<f64>,
    path: &ParamPath,
    n_quad: usize,
) -> Result<f64> {
    Ok(line_integral(field, path, n_quad)?.exp())
}

pub const DEFAULT_QUADRATURE_INTERVALS: usize = 256;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Boundary;
    use rand::Rng;

    fn spec2(n: usize, dx: f64) -> LatticeSpec {
        LatticeSpec::new(&[n, n], dx, Boundary::Periodic).unwrap()
    }

    fn random_field(spec: &LatticeSpec, seed: u64) -> RealGaugeField {
        RealGaugeField::generate(spec, &FieldKind::Random { seed, amplitude: 1.0 }).unwrap()
    }

    #[test]
    fn link_factor_examples() {
        let spec = spec2(4, 0.1);
        let zero = RealGaugeField::zeros(&spec);
        assert_eq!(zero.link_factor(&Site::origin(), Step::forward(0)).unwrap().value(), 1.0);

        let a = RealGaugeField::generate(&spec, &FieldKind::Constant { values: vec![0.5, 0.0] }).unwrap();
        let f = a.link_factor(&Site::origin(), Step::forward(0)).unwrap();
        assert_eq!(f.value(), (0.5f64 * 0.1).exp());
    }

    #[test]
    fn reverse_link_is_exact_inverse() {
        let spec = spec2(5, 0.3);
        let a = random_field(&spec, 4);
        for site in spec.sites() {
            for axis in 0..2 {
                let fwd = a.link_factor(&site, Step::forward(axis)).unwrap();
                let there = spec.neighbor(&site, Step::forward(axis)).unwrap();
                let back = a.link_factor(&there, Step::backward(axis)).unwrap();
                assert_eq!((fwd * back).value(), 1.0);
                assert_eq!(back.exponent(), -fwd.exponent());
            }
        }
    }

    #[test]
    fn two_step_transport() {
        let spec = spec2(4, 0.25);
        let a = random_field(&spec, 8);
        let x = Site::new(&[1, 1]);
        let y = Site::new(&[2, 1]);
        let path = LatticePath::new(x, vec![Step::forward(0), Step::forward(1)]);
        let t = a.path_transport(&path).unwrap();
        let expected = (a.component_at(&y, 1) * 0.25 + a.component_at(&x, 0) * 0.25).exp();
        assert!((t.value - expected).abs() <= 1e-15 * expected);
        assert_eq!(a.path_transport(&LatticePath::empty(x)).unwrap().value, 1.0);
    }

    #[test]
    fn path_and_reversal_cancel_exactly() {
        let spec = spec2(6, 0.4);
        let a = random_field(&spec, 5);
        let mut rng = rng::seeded(77);
        for _ in 0..200 {
            let start = spec.site(rng.gen_range(0..spec.num_sites()));
            let steps: Vec<Step> = (0..rng.gen_range(0..20))
                .map(|_| {
                    let axis = rng.gen_range(0..2);
                    if rng.gen() { Step::forward(axis) } else { Step::backward(axis) }
                })
                .collect();
            let path = LatticePath::new(start, steps);
            let end = spec.path_endpoint(&path).unwrap();
            let round = path.then(&path.reversed(end));
            assert_eq!(a.path_transport(&round).unwrap().value, 1.0);
        }
    }

    #[test]
    fn dual_forms_agree_on_random_paths() {
        let spec = LatticeSpec::new(&[4, 4, 4], 0.2, Boundary::Periodic).unwrap();
        let a = random_field(&spec, 6);
        let mut rng = rng::seeded(1);
        for _ in 0..1000 {
            let start = spec.site(rng.gen_range(0..spec.num_sites()));
            let steps: Vec<Step> = (0..rng.gen_range(0..40))
                .map(|_| {
                    let axis = rng.gen_range(0..3);
                    if rng.gen() { Step::forward(axis) } else { Step::backward(axis) }
                })
                .collect();
            let path = LatticePath::new(start, steps);
            let sum_form = a.path_transport(&path).unwrap().value;
            let product = a.path_transport_product(&path).unwrap();
            assert!((sum_form - product).abs() <= 1e-12 * sum_form);
        }
    }

    #[test]
    fn loop_transport_matches_curl_exactly() {
        let spec = LatticeSpec::new(&[3, 4, 3], 0.5, Boundary::Periodic).unwrap();
        let a = random_field(&spec, 12);
        for q in spec.enumerate_plaquettes() {
            let lp = a.loop_transport(&q).unwrap();
            let expected = (0.25 * a.plaquette_curl(&q).unwrap()).exp();
            assert!((lp - expected).abs() <= 1e-12 * expected);
        }
    }

    #[test]
    fn gradient_fields_have_zero_curl() {
        let spec = spec2(5, 0.3);
        let a = RealGaugeField::generate(
            &spec,
            &FieldKind::Gradient { potential: Potential::Random { seed: 3, amplitude: 2.0 } },
        )
        .unwrap();
        for q in spec.enumerate_plaquettes() {
            assert!(a.plaquette_curl(&q).unwrap().abs() < 1e-12);
        }
        let report = a.is_integrable(1e-12).unwrap();
        assert!(report.integrable, "{report:?}");

        let flat = RealGaugeField::generate(
            &spec,
            &FieldKind::Gradient { potential: Potential::Constant { value: 3.0 } },
        )
        .unwrap();
        assert!(flat.components().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn vortex_is_not_integrable() {
        let spec = LatticeSpec::new(&[6, 6], 0.5, Boundary::Clamped).unwrap();
        let a = RealGaugeField::generate(&spec, &FieldKind::Vortex { strength: 0.1, center: None }).unwrap();
        // Interior loops: exponent Δ²·2c.
        let expected = (0.25f64 * 0.2).exp() - 1.0;
        let report = a.is_integrable(DEFAULT_INTEGRABILITY_TOL).unwrap();
        assert!(!report.integrable);
        assert!(report.worst_deviation > 1e-3);
        assert!((report.worst_deviation - expected).abs() < 1e-12);
    }

    #[test]
    fn zero_field_is_integrable() {
        let report = RealGaugeField::zeros(&spec2(3, 1.0)).is_integrable(0.0).unwrap();
        assert!(report.integrable);
        assert_eq!(report.worst_deviation, 0.0);
        assert_eq!(report.n_plaquettes, 9);
    }

    #[test]
    fn link_factor_is_first_order_in_spacing() {
        let a0 = 1.3;
        let mut pts = Vec::new();
        for k in 0..4 {
            let dx = 0.1 / 2f64.powi(k);
            let spec = spec2(4, dx);
            let a = RealGaugeField::generate(&spec, &FieldKind::Constant { values: vec![a0, 0.0] }).unwrap();
            let f = a.link_factor(&Site::origin(), Step::forward(0)).unwrap().value();
            pts.push((dx, (f - (1.0 + a0 * dx)).abs()));
        }
        let fit = crate::convergence::fit_loglog(&pts).unwrap();
        assert!(fit.slope >= 1.9, "{fit:?}");
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = spec2(4, 1.0);
        assert_eq!(random_field(&spec, 9), random_field(&spec, 9));
        assert_ne!(random_field(&spec, 9), random_field(&spec, 10));
        let zero = RealGaugeField::generate(&spec, &FieldKind::Zero).unwrap();
        assert!(zero.components().iter().all(|&c| c == 0.0));
        assert!(RealGaugeField::generate(&spec, &FieldKind::Constant { values: vec![1.0] }).is_err());
        let spec1 = LatticeSpec::new(&[4], 1.0, Boundary::Periodic).unwrap();
        assert!(RealGaugeField::generate(&spec1, &FieldKind::Vortex { strength: 1.0, center: None }).is_err());
    }

    #[test]
    fn field_kind_parses_from_tagged_form() {
        let k: FieldKind = serde_json::from_str(
            r#"{"kind":"gradient","potential":{"shape":"gaussian","amplitude":1.0,"width":0.5}}"#,
        )
        .unwrap();
        assert!(matches!(k, FieldKind::Gradient { .. }));
        assert!(serde_json::from_str::<FieldKind>(r#"{"kind":"monopole"}"#).is_err());
    }

    #[test]
    fn line_integral_constant_and_zero() {
        let path = ParamPath::straight(&[0.0, 0.0], &[3.0, 4.0]);
        let zero = |_: &[f64]| vec![0.0, 0.0];
        assert_eq!(line_integral_transport(&zero, &path, 8).unwrap(), 1.0);
        // A parallel to the segment with |A| = 0.2 over length 5.
        let along = |_: &[f64]| vec![0.2 * 0.6, 0.2 * 0.8];
        let t = line_integral_transport(&along, &path, 2).unwrap();
        assert!((t - 1f64.exp()).abs() < 1e-14);
        assert!(line_integral(&zero, &path, 3).is_err());
        assert!(line_integral(&zero, &path, 0).is_err());
    }

    #[test]
    fn line_integral_of_gradient_is_path_independent() {
        // f(x, y) = sin(x)·y + x²/2
        let f = |p: &[f64]| p[0].sin() * p[1] + 0.5 * p[0] * p[0];
        let grad = |p: &[f64]| vec![p[0].cos() * p[1] + p[0], p[0].sin()];
        let (x, y) = ([0.2, -0.4], [1.1, 0.9]);
        let expected = (f(&y) - f(&x)).exp();
        // Curved path: straight line plus a sinusoidal bulge that vanishes at the ends.
        let curved = ParamPath::new(
            move |s| vec![x[0] + s * (y[0] - x[0]), x[1] + s * (y[1] - x[1]) + 0.7 * (std::f64::consts::PI * s).sin()],
            move |s| vec![y[0] - x[0], (y[1] - x[1]) + 0.7 * std::f64::consts::PI * (std::f64::consts::PI * s).cos()],
        );
        let straight = ParamPath::straight(&x, &y);
        for path in [&curved, &straight] {
            let t = line_integral_transport(&grad, path, 256).unwrap();
            assert!((t - expected).abs() < 1e-9 * expected);
        }
        let mut pts = Vec::new();
        for n in [4usize, 8, 16, 32] {
            let err = (line_integral(&grad, &curved, n).unwrap() - (f(&y) - f(&x))).abs();
            pts.push((1.0 / n as f64, err));
        }
        let fit = crate::convergence::fit_loglog(&pts).unwrap();
        assert!(fit.slope > 3.8, "{fit:?}");
    }

    #[test]
    fn param_path_endpoint_check() {
        let spec = spec2(4, 0.5);
        let path = ParamPath::straight(&[0.0, 0.0], &[1.0, 0.5]);
        assert!(path.check_endpoints(&spec, &Site::new(&[0, 0]), &Site::new(&[2, 1])).is_ok());
        assert!(path.check_endpoints(&spec, &Site::new(&[0, 0]), &Site::new(&[2, 2])).is_err());
    }
}

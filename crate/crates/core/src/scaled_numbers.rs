//! Scaled complex-number structures.
//!
//! Every element of the base set is stored by its value in the reference
//! structure (scale 1). A structure with scale `r` reads that element as
//! `canonical / r`; conversely a value `a` in the scaled structure
//! *corresponds* to `r·a` in the reference structure. The operations are
//! compensated so that the field axioms hold in every structure:
//!
//! | operation      | on canonical values          |
//! |----------------|------------------------------|
//! | `±ʳ`           | `u ± v`                      |
//! | `×ʳ`           | `u·v / r`                    |
//! | `÷ʳ`           | `r·u / v`                    |
//! | `*ʳ` (conj)    | `r·conj(u / r) = conj(u)`    |
//! | `0ʳ`, `1ʳ`     | `0`, `r`                     |
//!
//! Two different maps between structures are kept explicit: [`value_of`] /
//! [`element_of`] (correspondence, same base element) and
//! [`same_number_map`] (same numeric value, different base element).
//!
//! [`value_of`]: ScaledStructure::value_of

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::ComplexValue;

/// Positive, finite real scale factor `r`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ScaleFactor(f64);

impl ScaleFactor {
    pub const ONE: ScaleFactor = ScaleFactor(1.0);

    pub fn new(r: f64) -> Result<Self> {
        if r.is_finite() && r > 0.0 {
            Ok(ScaleFactor(r))
        } else {
            Err(Error::InvalidScale(r))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for ScaleFactor {
    type Error = Error;
    fn try_from(r: f64) -> Result<Self> {
        ScaleFactor::new(r)
    }
}

impl From<ScaleFactor> for f64 {
    fn from(s: ScaleFactor) -> f64 {
        s.0
    }
}

/// An element of the base set, labelled by its reference-structure value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseElement {
    pub canonical: ComplexValue,
}

impl BaseElement {
    pub fn new(canonical: ComplexValue) -> Self {
        BaseElement { canonical }
    }

    pub fn real(x: f64) -> Self {
        BaseElement::new(Complex64::new(x, 0.0))
    }
}

/// A number value together with the structure it lives in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureValue {
    pub value: ComplexValue,
    pub scale: ScaleFactor,
}

impl StructureValue {
    pub fn new(value: ComplexValue, scale: ScaleFactor) -> Self {
        StructureValue { value, scale }
    }
}

/// The base element a structure value refers to: `canonical = r·value`.
pub fn element_of(a: StructureValue) -> BaseElement {
    BaseElement::new(a.value * a.scale.get())
}

/// Same numeric value, re-tagged with another structure.
///
/// This is a field isomorphism between the two structures; it does not
/// preserve the underlying base element unless the scales coincide.
pub fn same_number_map(a: StructureValue, target: ScaledStructure) -> StructureValue {
    StructureValue::new(a.value, target.scale)
}

/// Truncation and divergence guard for power-series evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesOptions {
    /// Maximum number of series terms evaluated.
    pub n_max: usize,
    /// Bound on the partial-sum magnitude (value view).
    pub divergence_threshold: f64,
    /// Optional bound on `|z|`.
    pub max_abs_argument: Option<f64>,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        SeriesOptions {
            n_max: 30,
            divergence_threshold: 1e150,
            max_abs_argument: None,
        }
    }
}

/// Taylor coefficients `1/k!` of `exp`, `k < n`.
pub fn exp_coefficients(n: usize) -> Vec<ComplexValue> {
    let mut out = Vec::with_capacity(n);
    let mut c = 1.0;
    for k in 0..n {
        if k > 0 {
            c /= k as f64;
        }
        out.push(Complex64::new(c, 0.0));
    }
    out
}

/// A complex-number structure with scale factor `r` relative to the reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledStructure {
    scale: ScaleFactor,
}

fn finite(z: Complex64, op: &'static str) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::Overflow(op))
    }
}

impl ScaledStructure {
    pub fn new(scale: ScaleFactor) -> Self {
        ScaledStructure { scale }
    }

    pub fn with_scale(r: f64) -> Result<Self> {
        Ok(ScaledStructure::new(ScaleFactor::new(r)?))
    }

    /// The reference structure, `r = 1`.
    pub fn reference() -> Self {
        ScaledStructure::new(ScaleFactor::ONE)
    }

    pub fn scale(&self) -> ScaleFactor {
        self.scale
    }

    #[inline]
    fn r(&self) -> f64 {
        self.scale.get()
    }

    /// The value this structure assigns to `e`: `canonical / r`.
    pub fn value_of(&self, e: BaseElement) -> StructureValue {
        StructureValue::new(e.canonical / self.r(), self.scale)
    }

    /// The element whose value in this structure is `value`.
    pub fn element(&self, value: ComplexValue) -> BaseElement {
        element_of(StructureValue::new(value, self.scale))
    }

    pub fn zero(&self) -> BaseElement {
        BaseElement::new(Complex64::new(0.0, 0.0))
    }

    pub fn one(&self) -> BaseElement {
        BaseElement::real(self.r())
    }

    pub fn add(&self, u: BaseElement, v: BaseElement) -> Result<BaseElement> {
        finite(u.canonical + v.canonical, "add").map(BaseElement::new)
    }

    pub fn sub(&self, u: BaseElement, v: BaseElement) -> Result<BaseElement> {
        finite(u.canonical - v.canonical, "sub").map(BaseElement::new)
    }

    pub fn neg(&self, u: BaseElement) -> BaseElement {
        BaseElement::new(-u.canonical)
    }

    pub fn mul(&self, u: BaseElement, v: BaseElement) -> Result<BaseElement> {
        finite(u.canonical * v.canonical / self.r(), "mul").map(BaseElement::new)
    }

    pub fn div(&self, u: BaseElement, v: BaseElement) -> Result<BaseElement> {
        if v.canonical.re == 0.0 && v.canonical.im == 0.0 {
            return Err(Error::DivisionByZero);
        }
        finite(u.canonical / v.canonical * self.r(), "div").map(BaseElement::new)
    }

    /// `r·conj(u/r)`, which equals `conj(u)` for real positive `r`.
    pub fn conj(&self, u: BaseElement) -> BaseElement {
        BaseElement::new(u.canonical.conj())
    }

    /// Evaluates `fʳ(zʳ)` for `f(z) = Σ coeffs[k]·zᵏ` using only this
    /// structure's compensated operations.
    ///
    /// The coefficients are numbers, taken as the same values in every
    /// structure. The result reads as `f(z.value)` in this structure, so its
    /// base element is `r·f(z.value)`.
    pub fn eval_analytic(
        &self,
        coeffs: &[ComplexValue],
        z: StructureValue,
    ) -> Result<StructureValue> {
        self.eval_analytic_with(coeffs, z, &SeriesOptions::default())
    }

    pub fn eval_analytic_with(
        &self,
        coeffs: &[ComplexValue],
        z: StructureValue,
        opts: &SeriesOptions,
    ) -> Result<StructureValue> {
        if z.scale != self.scale {
            return Err(Error::InvalidArgument(format!(
                "argument lives in structure r={} but evaluation is in r={}",
                z.scale.get(),
                self.r()
            )));
        }
        if let Some(radius) = opts.max_abs_argument {
            if z.value.norm() > radius {
                return Err(Error::SeriesDivergence {
                    terms: 0,
                    magnitude: z.value.norm(),
                });
            }
        }
        let arg = element_of(z);
        let mut power = self.one();
        let mut sum = self.zero();
        for (k, &c) in coeffs.iter().take(opts.n_max).enumerate() {
            let term = self.mul(self.element(c), power).map_err(|_| Error::SeriesDivergence {
                terms: k + 1,
                magnitude: f64::INFINITY,
            })?;
            sum = self.add(sum, term).map_err(|_| Error::SeriesDivergence {
                terms: k + 1,
                magnitude: f64::INFINITY,
            })?;
            let magnitude = sum.canonical.norm() / self.r();
            if !magnitude.is_finite() || magnitude > opts.divergence_threshold {
                return Err(Error::SeriesDivergence {
                    terms: k + 1,
                    magnitude,
                });
            }
            power = self.mul(power, arg).map_err(|_| Error::SeriesDivergence {
                terms: k + 1,
                magnitude: f64::INFINITY,
            })?;
        }
        Ok(self.value_of(sum))
    }
}

/// Field identities checked by [`axiom_suite`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    ValueRoundTrip,
    AddCommutative,
    AddAssociative,
    MulCommutative,
    MulAssociative,
    Distributive,
    AddIdentity,
    MulIdentity,
    AddInverse,
    MulInverse,
    ConjInvolution,
    ConjAdditive,
    ConjMultiplicative,
    ZeroAbsorbing,
    EquationEquivalence,
    PolynomialRoots,
}

impl Axiom {
    pub const ALL: [Axiom; 16] = [
        Axiom::ValueRoundTrip,
        Axiom::AddCommutative,
        Axiom::AddAssociative,
        Axiom::MulCommutative,
        Axiom::MulAssociative,
        Axiom::Distributive,
        Axiom::AddIdentity,
        Axiom::MulIdentity,
        Axiom::AddInverse,
        Axiom::MulInverse,
        Axiom::ConjInvolution,
        Axiom::ConjAdditive,
        Axiom::ConjMultiplicative,
        Axiom::ZeroAbsorbing,
        Axiom::EquationEquivalence,
        Axiom::PolynomialRoots,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::ValueRoundTrip => "value_round_trip",
            Axiom::AddCommutative => "add_commutative",
            Axiom::AddAssociative => "add_associative",
            Axiom::MulCommutative => "mul_commutative",
            Axiom::MulAssociative => "mul_associative",
            Axiom::Distributive => "distributive",
            Axiom::AddIdentity => "add_identity",
            Axiom::MulIdentity => "mul_identity",
            Axiom::AddInverse => "add_inverse",
            Axiom::MulInverse => "mul_inverse",
            Axiom::ConjInvolution => "conj_involution",
            Axiom::ConjAdditive => "conj_additive",
            Axiom::ConjMultiplicative => "conj_multiplicative",
            Axiom::ZeroAbsorbing => "zero_absorbing",
            Axiom::EquationEquivalence => "equation_equivalence",
            Axiom::PolynomialRoots => "polynomial_roots",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomResidual {
    pub axiom: Axiom,
    pub max_residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub scale: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub residuals: Vec<AxiomResidual>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.residuals.iter().all(|r| r.pass)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals
            .iter()
            .map(|r| r.max_residual)
            .fold(0.0, f64::max)
    }

    pub fn residual(&self, axiom: Axiom) -> Option<f64> {
        self.residuals
            .iter()
            .find(|r| r.axiom == axiom)
            .map(|r| r.max_residual)
    }
}

/// Operand magnitudes used by the random suites.
pub const OPERAND_RANGE: (f64, f64) = (1e-3, 1e3);

/// Relative tolerance used to decide whether an equation holds.
const EQUATION_TOLERANCE: f64 = 1e-9;

fn rel(lhs: Complex64, rhs: Complex64, scale: f64) -> f64 {
    let d = (lhs - rhs).norm();
    if d == 0.0 {
        0.0
    } else {
        d / scale
    }
}

/// Plain Horner evaluation.
pub fn horner(coeffs: &[ComplexValue], z: ComplexValue) -> ComplexValue {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// `Σ |c_k|·|z|^k`, the natural magnitude against which rounding is judged.
pub fn poly_abs_bound(coeffs: &[ComplexValue], z: ComplexValue) -> f64 {
    let m = z.norm();
    coeffs.iter().rev().fold(0.0, |acc, c| acc * m + c.norm())
}

/// Coefficients (lowest order first) of `Π (z − root)`.
pub fn poly_from_roots(roots: &[ComplexValue]) -> Vec<ComplexValue> {
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for &root in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
        for (k, &c) in coeffs.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * root;
        }
        coeffs = next;
    }
    coeffs
}

/// Random-operand check of every field identity in structure `s`.
///
/// Operands are drawn as structure values with magnitude in
/// [`OPERAND_RANGE`]. Residuals are relative to the magnitude of the terms
/// involved (e.g. `|u|·|v|/r` for products), so they are bounded by rounding.
pub fn axiom_suite(s: ScaledStructure, n_samples: usize, seed: u64, tol: f64) -> Result<AxiomReport> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be at least 1".into()));
    }
    let r = s.r();
    let (lo, hi) = OPERAND_RANGE;
    let mut rng = rng::seeded(seed);
    let mut worst = [0.0_f64; Axiom::ALL.len()];
    let mut bump = |axiom: Axiom, value: f64| {
        let i = Axiom::ALL.iter().position(|&a| a == axiom).unwrap();
        if value.is_nan() || value > worst[i] {
            worst[i] = if value.is_nan() { f64::INFINITY } else { value };
        }
    };

    for _ in 0..n_samples {
        let a = rng::complex_in_shell(&mut rng, lo, hi);
        let b = rng::complex_in_shell(&mut rng, lo, hi);
        let c = rng::complex_in_shell(&mut rng, lo, hi);
        let (u, v, w) = (s.element(a), s.element(b), s.element(c));
        let (nu, nv, nw) = (u.canonical.norm(), v.canonical.norm(), w.canonical.norm());

        let back = element_of(s.value_of(u));
        bump(Axiom::ValueRoundTrip, rel(back.canonical, u.canonical, nu));

        bump(
            Axiom::AddCommutative,
            rel(s.add(u, v)?.canonical, s.add(v, u)?.canonical, nu + nv),
        );
        bump(
            Axiom::AddAssociative,
            rel(
                s.add(s.add(u, v)?, w)?.canonical,
                s.add(u, s.add(v, w)?)?.canonical,
                nu + nv + nw,
            ),
        );
        bump(
            Axiom::MulCommutative,
            rel(s.mul(u, v)?.canonical, s.mul(v, u)?.canonical, nu * nv / r),
        );
        bump(
            Axiom::MulAssociative,
            rel(
                s.mul(s.mul(u, v)?, w)?.canonical,
                s.mul(u, s.mul(v, w)?)?.canonical,
                nu * nv * nw / (r * r),
            ),
        );
        bump(
            Axiom::Distributive,
            rel(
                s.mul(u, s.add(v, w)?)?.canonical,
                s.add(s.mul(u, v)?, s.mul(u, w)?)?.canonical,
                nu * (nv + nw) / r,
            ),
        );
        bump(Axiom::AddIdentity, rel(s.add(u, s.zero())?.canonical, u.canonical, nu));
        bump(Axiom::MulIdentity, rel(s.mul(s.one(), u)?.canonical, u.canonical, nu));
        bump(
            Axiom::AddInverse,
            rel(s.add(u, s.neg(u))?.canonical, s.zero().canonical, nu),
        );
        bump(
            Axiom::MulInverse,
            rel(
                s.mul(u, s.div(s.one(), u)?)?.canonical,
                s.one().canonical,
                r,
            ),
        );
        bump(
            Axiom::ConjInvolution,
            if s.conj(s.conj(u)) == u { 0.0 } else { f64::INFINITY },
        );
        bump(
            Axiom::ConjAdditive,
            rel(
                s.conj(s.add(u, v)?).canonical,
                s.add(s.conj(u), s.conj(v))?.canonical,
                nu + nv,
            ),
        );
        bump(
            Axiom::ConjMultiplicative,
            rel(
                s.conj(s.mul(u, v)?).canonical,
                s.mul(s.conj(u), s.conj(v))?.canonical,
                nu * nv / r,
            ),
        );
        let absorbed = s.mul(s.zero(), u)?;
        bump(
            Axiom::ZeroAbsorbing,
            if absorbed.canonical.norm() == 0.0 && s.add(s.zero(), u)? == u {
                0.0
            } else {
                f64::INFINITY
            },
        );

        // fʳ(aʳ) = bʳ  ⟺  f(a) = b, for a random polynomial of degree ≤ 8.
        let degree = rng.gen_range(0..=8usize);
        let coeffs: Vec<_> = (0..=degree).map(|_| rng::complex_unit_box(&mut rng)).collect();
        let z = StructureValue::new(a, s.scale());
        let scaled = s.eval_analytic(&coeffs, z)?;
        let plain = horner(&coeffs, a);
        let bound = poly_abs_bound(&coeffs, a).max(f64::MIN_POSITIVE);
        let mut eq_residual = rel(element_of(scaled).canonical, plain * r, bound * r);
        let offset = Complex64::from_polar(1e-3 * bound, rng.gen_range(0.0..std::f64::consts::TAU));
        for target in [plain, plain + offset] {
            let holds_scaled = (scaled.value - target).norm() <= EQUATION_TOLERANCE * bound;
            let holds_plain = (plain - target).norm() <= EQUATION_TOLERANCE * bound;
            if holds_scaled != holds_plain {
                eq_residual = f64::INFINITY;
            }
        }
        bump(Axiom::EquationEquivalence, eq_residual);

        // Roots of P carry over to roots of Pʳ.
        let n_roots = rng.gen_range(1..=8usize);
        let roots: Vec<_> = (0..n_roots)
            .map(|_| rng::complex_in_shell(&mut rng, 1e-1, 1e1))
            .collect();
        let poly = poly_from_roots(&roots);
        for &root in &roots {
            let at_root = s.eval_analytic(&poly, StructureValue::new(root, s.scale()))?;
            bump(
                Axiom::PolynomialRoots,
                at_root.value.norm() / poly_abs_bound(&poly, root),
            );
        }
    }

    let residuals = Axiom::ALL
        .iter()
        .zip(worst)
        .map(|(&axiom, max_residual)| AxiomResidual {
            axiom,
            max_residual,
            pass: max_residual <= tol,
        })
        .collect();
    Ok(AxiomReport {
        scale: r,
        n_samples,
        seed,
        tolerance: tol,
        residuals,
    })
}

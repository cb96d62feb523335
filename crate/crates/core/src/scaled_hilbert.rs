//! Finite-dimensional scaled Hilbert structures.
//!
//! Vectors are stored in the base frame (scale 1, untransformed basis). A
//! scaled structure carries a scale `r` and a unitary basis map `V`; a vector
//! `ψ` corresponds to `r·Vψ` in the base frame. Scalar multiplication and the
//! inner product are compensated by `1/r` so the Hilbert-space axioms hold in
//! every structure.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scaled_numbers::{element_of, ScaleFactor, StructureValue};

pub const DEFAULT_DIMENSION: usize = 2;
const UNITARITY_TOL: f64 = 1e-12;

/// Complex n-tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct HilbertVector(pub DVector<Complex64>);

impl HilbertVector {
    pub fn from_slice(components: &[Complex64]) -> Self {
        HilbertVector(DVector::from_column_slice(components))
    }

    pub fn zeros(n: usize) -> Self {
        HilbertVector(DVector::zeros(n))
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        HilbertVector(DVector::from_fn(n, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        }))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `⟨self, other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &HilbertVector) -> Complex64 {
        self.0.dotc(&other.0)
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self).re
    }

    pub fn normalized(&self) -> HilbertVector {
        HilbertVector(&self.0 / Complex64::new(self.norm_sq().sqrt(), 0.0))
    }

    pub fn scale(&self, c: Complex64) -> HilbertVector {
        HilbertVector(&self.0 * c)
    }

    pub fn max_abs_diff(&self, other: &HilbertVector) -> f64 {
        (&self.0 - &other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Square matrix with `U†U = I` to 1e-12.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(DMatrix<Complex64>);

impl UnitaryMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        let dev = unitarity_deviation(&m);
        if dev > UNITARITY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(UnitaryMatrix(m))
    }

    pub fn identity(n: usize) -> Self {
        UnitaryMatrix(DMatrix::identity(n, n))
    }

    /// Haar-like random unitary: QR of a complex Gaussian matrix with the
    /// phases of `R`'s diagonal folded into `Q`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let g = DMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let qr = g.qr();
        let (mut q, r) = (qr.q(), qr.r());
        for j in 0..n {
            let d = r[(j, j)];
            let phase = if d.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { d / d.norm() };
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
        UnitaryMatrix(q)
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
}

/// `max |(U†U − I)_{ij}|`.
pub fn unitarity_deviation(m: &DMatrix<Complex64>) -> f64 {
    let p = m.adjoint() * m;
    let n = m.nrows();
    p.iter()
        .enumerate()
        .map(|(k, z)| {
            let (i, j) = (k % n, k / n);
            let id = if i == j { 1.0 } else { 0.0 };
            (z - Complex64::new(id, 0.0)).norm()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaledHilbertStructure {
    scale: ScaleFactor,
    basis_map: UnitaryMatrix,
}

/// Intermediate states of the three-step transport.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeStepTransport {
    /// `Vψ`: basis change.
    pub rotated: HilbertVector,
    /// `r·Vψ`: the scale-structure correspondence.
    pub scaled: HilbertVector,
    /// Same components, read in the target structure.
    pub relabeled: HilbertVector,
    pub target_scale: ScaleFactor,
}

impl ScaledHilbertStructure {
    pub fn new(scale: ScaleFactor, basis_map: UnitaryMatrix) -> Self {
        ScaledHilbertStructure { scale, basis_map }
    }

    pub fn reference(n: usize) -> Self {
        ScaledHilbertStructure::new(ScaleFactor::ONE, UnitaryMatrix::identity(n))
    }

    pub fn scale(&self) -> ScaleFactor {
        self.scale
    }

    pub fn basis_map(&self) -> &UnitaryMatrix {
        &self.basis_map
    }

    pub fn dim(&self) -> usize {
        self.basis_map.dim()
    }

    fn r(&self) -> f64 {
        self.scale.get()
    }

    fn check_dim(&self, v: &HilbertVector) -> Result<()> {
        if v.dim() == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim(), found: v.dim() })
        }
    }

    /// Base-frame vector corresponding to `ψ`: `r·Vψ`.
    pub fn vector_correspondence(&self, psi: &HilbertVector) -> Result<HilbertVector> {
        self.check_dim(psi)?;
        Ok(HilbertVector(self.basis_map.matrix() * &psi.0 * Complex64::new(self.r(), 0.0)))
    }

    /// `(α ·ʳ ψ)` on base-frame representatives: `element_of(α)·ψ / r`.
    pub fn scaled_scalar_mul(&self, alpha: StructureValue, psi: &HilbertVector) -> Result<HilbertVector> {
        self.check_dim(psi)?;
        if alpha.scale != self.scale {
            return Err(Error::InvalidArgument(format!(
                "scalar lives in structure r={} but the vector space has r={}",
                alpha.scale.get(),
                self.r()
            )));
        }
        let c = element_of(alpha).canonical;
        Ok(HilbertVector(&psi.0 * c / Complex64::new(self.r(), 0.0)))
    }

    /// Scaled inner product `⟨ψ, φ⟩/r` of base-frame representatives.
    ///
    /// The returned structure value has base element `⟨ψ, φ⟩/r`, i.e.
    /// `⟨ψ, φ⟩ = r·(⟨ψʳ, φʳ⟩ʳ)ₓ`.
    pub fn scaled_inner(&self, psi: &HilbertVector, phi: &HilbertVector) -> Result<StructureValue> {
        self.check_dim(psi)?;
        self.check_dim(phi)?;
        let canonical = psi.inner(phi) / self.r();
        Ok(StructureValue::new(canonical / self.r(), self.scale))
    }

    pub fn scaled_add(&self, psi: &HilbertVector, phi: &HilbertVector) -> Result<HilbertVector> {
        self.check_dim(psi)?;
        self.check_dim(phi)?;
        Ok(HilbertVector(&psi.0 + &phi.0))
    }

    /// Basis change, scale correspondence, then value-preserving relabel.
    pub fn three_step_transport(&self, psi: &HilbertVector) -> Result<ThreeStepTransport> {
        self.check_dim(psi)?;
        let rotated = HilbertVector(self.basis_map.matrix() * &psi.0);
        let scaled = rotated.scale(Complex64::new(self.r(), 0.0));
        let relabeled = scaled.clone();
        Ok(ThreeStepTransport {
            rotated,
            scaled,
            relabeled,
            target_scale: self.scale,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use crate::scaled_numbers::ScaledStructure;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn structure(r: f64, v: UnitaryMatrix) -> ScaledHilbertStructure {
        ScaledHilbertStructure::new(ScaleFactor::new(r).unwrap(), v)
    }

    fn random_case(rng: &mut rng::SeededRng, n: usize) -> (ScaledHilbertStructure, HilbertVector, HilbertVector) {
        let r = rng.gen_range((1e-3f64).ln()..=(1e3f64).ln()).exp();
        let s = structure(r, UnitaryMatrix::random(n, rng));
        (s, HilbertVector::random(n, rng), HilbertVector::random(n, rng))
    }

    #[test]
    fn correspondence_examples() {
        let psi = HilbertVector::from_slice(&[c(1.0, 2.0), c(-0.5, 0.0)]);
        assert_eq!(ScaledHilbertStructure::reference(2).vector_correspondence(&psi).unwrap(), psi);
        let s = structure(2.0, UnitaryMatrix::identity(2));
        let e0 = HilbertVector::from_slice(&[c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(
            s.vector_correspondence(&e0).unwrap(),
            HilbertVector::from_slice(&[c(2.0, 0.0), c(0.0, 0.0)])
        );
        assert!(matches!(
            s.vector_correspondence(&HilbertVector::zeros(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn one_dimensional_reduction() {
        let mut rng = rng::seeded(21);
        for _ in 0..100 {
            let r = rng.gen_range(1e-3..1e3);
            let z = rng::complex_in_shell(&mut rng, 1e-3, 1e3);
            let w = rng::complex_in_shell(&mut rng, 1e-3, 1e3);
            let s = structure(r, UnitaryMatrix::identity(1));
            let num = ScaledStructure::with_scale(r).unwrap();
            let corr = s.vector_correspondence(&HilbertVector::from_slice(&[z])).unwrap();
            let elem = element_of(StructureValue::new(z, num.scale()));
            assert!((corr.0[0] - elem.canonical).norm() <= 1e-12 * elem.canonical.norm());

            let alpha = StructureValue::new(w, num.scale());
            let prod = s.scaled_scalar_mul(alpha, &HilbertVector::from_slice(&[elem.canonical])).unwrap();
            let expected = num.mul(element_of(alpha), elem).unwrap().canonical;
            assert!((prod.0[0] - expected).norm() <= 1e-12 * expected.norm());
        }
    }

    #[test]
    fn scalar_mul_identity_and_mismatch() {
        let s = structure(3.0, UnitaryMatrix::identity(2));
        let psi = HilbertVector::from_slice(&[c(1.0, 1.0), c(2.0, -1.0)]);
        let one = StructureValue::new(c(1.0, 0.0), s.scale());
        assert!(s.scaled_scalar_mul(one, &psi).unwrap().max_abs_diff(&psi) < 1e-15);
        let foreign = StructureValue::new(c(1.0, 0.0), ScaleFactor::ONE);
        assert!(s.scaled_scalar_mul(foreign, &psi).is_err());

        let plain = ScaledHilbertStructure::reference(2);
        let alpha = StructureValue::new(c(0.5, 2.0), ScaleFactor::ONE);
        assert_eq!(plain.scaled_scalar_mul(alpha, &psi).unwrap(), psi.scale(c(0.5, 2.0)));
    }

    #[test]
    fn scalar_mul_commutes_with_correspondence() {
        let mut rng = rng::seeded(5);
        for _ in 0..1000 {
            let (s, psi, _) = random_case(&mut rng, 3);
            let a = rng::complex_in_shell(&mut rng, 1e-2, 1e2);
            // Reference-structure product, then correspond.
            let lhs = s.vector_correspondence(&psi.scale(a)).unwrap();
            // Correspond both factors, then multiply in the scaled structure.
            let alpha = StructureValue::new(a, s.scale());
            let rhs = s.scaled_scalar_mul(alpha, &s.vector_correspondence(&psi).unwrap()).unwrap();
            let scale = s.scale().get() * a.norm() * psi.norm_sq().sqrt();
            assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * scale);
        }
    }

    #[test]
    fn inner_product_examples() {
        let psi = HilbertVector::from_slice(&[c(1.0, 2.0), c(0.0, -1.0)]);
        let phi = HilbertVector::from_slice(&[c(0.5, 0.0), c(3.0, 1.0)]);
        let plain = ScaledHilbertStructure::reference(2).scaled_inner(&psi, &phi).unwrap();
        assert_eq!(plain.value, psi.inner(&phi));

        let s = structure(2.0, UnitaryMatrix::identity(2));
        let e0 = s.vector_correspondence(&HilbertVector::from_slice(&[c(1.0, 0.0), c(0.0, 0.0)])).unwrap();
        let e1 = s.vector_correspondence(&HilbertVector::from_slice(&[c(0.0, 0.0), c(1.0, 0.0)])).unwrap();
        let ip = s.scaled_inner(&e0, &e1).unwrap();
        assert_eq!(e0.inner(&e1), element_of(ip).canonical * 2.0);
        assert_eq!(ip.value.norm(), 0.0);
    }

    #[test]
    fn unitarity_and_norm_preservation() {
        let mut rng = rng::seeded(99);
        for _ in 0..1000 {
            let (s, psi, phi) = random_case(&mut rng, 2);
            let r = s.scale().get();
            assert!(unitarity_deviation(s.basis_map().matrix()) <= 1e-12);
            let (cp, cf) = (s.vector_correspondence(&psi).unwrap(), s.vector_correspondence(&phi).unwrap());
            let lhs = cp.inner(&cf) / (r * r);
            let rhs = psi.inner(&phi);
            assert!((lhs - rhs).norm() <= 1e-12 * psi.norm_sq().sqrt() * phi.norm_sq().sqrt());

            let unit = psi.normalized();
            let cu = s.vector_correspondence(&unit).unwrap();
            let canonical = element_of(s.scaled_inner(&cu, &cu).unwrap()).canonical;
            assert!((canonical - c(r, 0.0)).norm() <= 1e-12 * r);
            let stretched = s.vector_correspondence(&unit.scale(c(1.1, 0.0))).unwrap();
            let canonical = element_of(s.scaled_inner(&stretched, &stretched).unwrap()).canonical;
            assert!((canonical - c(r, 0.0)).norm() > 1e-3 * r);
        }
    }

    #[test]
    fn hilbert_axioms_hold_in_scaled_structures() {
        let mut rng = rng::seeded(3);
        for _ in 0..300 {
            let (s, psi, phi) = random_case(&mut rng, 2);
            let chi = HilbertVector::random(2, &mut rng);
            let a = rng::complex_unit_box(&mut rng);
            let alpha = StructureValue::new(a, s.scale());
            let norm = |v: &HilbertVector| v.norm_sq().sqrt();
            let bound = norm(&psi) * (norm(&phi) + norm(&chi)) / s.scale().get();
            // Additivity and homogeneity in the second argument.
            let lhs = s.scaled_inner(&psi, &s.scaled_add(&phi, &chi).unwrap()).unwrap().value;
            let rhs = s.scaled_inner(&psi, &phi).unwrap().value + s.scaled_inner(&psi, &chi).unwrap().value;
            assert!((lhs - rhs).norm() <= 1e-12 * bound / s.scale().get());
            let scaled = s.scaled_scalar_mul(alpha, &phi).unwrap();
            let lhs = element_of(s.scaled_inner(&psi, &scaled).unwrap());
            let num = ScaledStructure::new(s.scale());
            let rhs = num.mul(element_of(alpha), element_of(s.scaled_inner(&psi, &phi).unwrap())).unwrap();
            assert!((lhs.canonical - rhs.canonical).norm() <= 1e-12 * a.norm() * norm(&psi) * norm(&phi) / s.scale().get());
            // Conjugate symmetry and positivity.
            let ab = s.scaled_inner(&psi, &phi).unwrap().value;
            let ba = s.scaled_inner(&phi, &psi).unwrap().value;
            assert!((ab - ba.conj()).norm() <= 1e-14 * ab.norm().max(1e-300));
            assert!(s.scaled_inner(&psi, &psi).unwrap().value.re > 0.0);
            assert_eq!(s.scaled_inner(&HilbertVector::zeros(2), &HilbertVector::zeros(2)).unwrap().value.norm(), 0.0);
            // Vector addition laws.
            let ab = s.scaled_add(&psi, &phi).unwrap();
            assert_eq!(ab, s.scaled_add(&phi, &psi).unwrap());
            assert_eq!(s.scaled_add(&psi, &HilbertVector::zeros(2)).unwrap(), psi);
        }
    }

    #[test]
    fn correspondence_is_additive() {
        let mut rng = rng::seeded(8);
        let (s, psi, phi) = random_case(&mut rng, 4);
        let lhs = s.vector_correspondence(&s.scaled_add(&psi, &phi).unwrap()).unwrap();
        let rhs = s
            .scaled_add(&s.vector_correspondence(&psi).unwrap(), &s.vector_correspondence(&phi).unwrap())
            .unwrap();
        assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * s.scale().get() * 10.0);
    }

    #[test]
    fn three_step_transport_stages() {
        let psi = HilbertVector::from_slice(&[c(0.6, 0.0), c(0.0, 0.8)]);
        let id = ScaledHilbertStructure::reference(2).three_step_transport(&psi).unwrap();
        assert_eq!(id.rotated, psi);
        assert_eq!(id.scaled, psi);
        assert_eq!(id.relabeled, psi);

        let mut rng = rng::seeded(17);
        let (s, psi, _) = random_case(&mut rng, 2);
        let t = s.three_step_transport(&psi).unwrap();
        assert!(t.relabeled.max_abs_diff(&s.vector_correspondence(&psi).unwrap()) <= 1e-12 * s.scale().get() * 10.0);
        assert_eq!(t.relabeled, t.scaled);
        // Norm in the target structure equals the source norm.
        let target = ScaledHilbertStructure::new(t.target_scale, UnitaryMatrix::identity(2));
        let norm_target = target.scaled_inner(&t.relabeled, &t.relabeled).unwrap().value;
        let norm_source = ScaledHilbertStructure::reference(2).scaled_inner(&psi, &psi).unwrap().value;
        assert!((norm_target - norm_source).norm() <= 1e-12 * norm_source.norm());
    }

    #[test]
    fn unitary_constructor_validates() {
        assert!(UnitaryMatrix::new(DMatrix::from_element(2, 2, c(1.0, 0.0))).is_err());
        assert!(UnitaryMatrix::new(DMatrix::identity(3, 3)).is_ok());
        let mut rng = rng::seeded(0);
        let u = UnitaryMatrix::random(5, &mut rng);
        assert!(UnitaryMatrix::new(u.matrix().clone()).is_ok());
    }
}

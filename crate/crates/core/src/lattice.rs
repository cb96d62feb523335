//! Finite hypercubic lattices: sites, steps, paths and plaquettes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DIMS: usize = 4;
pub const DEFAULT_MAX_SITES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Periodic,
    Clamped,
}

#[derive(Debug, Clone, Deserialize)]
struct RawLatticeSpec {
    extents: Vec<usize>,
    spacing: f64,
    #[serde(default)]
    boundary: Boundary,
    #[serde(default)]
    max_sites: Option<usize>,
}

/// Shape, spacing and boundary condition of a lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLatticeSpec")]
pub struct LatticeSpec {
    extents: Vec<usize>,
    spacing: f64,
    boundary: Boundary,
    #[serde(skip)]
    strides: Vec<usize>,
}

impl TryFrom<RawLatticeSpec> for LatticeSpec {
    type Error = Error;
    fn try_from(raw: RawLatticeSpec) -> Result<Self> {
        LatticeSpec::with_max_sites(
            &raw.extents,
            raw.spacing,
            raw.boundary,
            raw.max_sites.unwrap_or(DEFAULT_MAX_SITES),
        )
    }
}

/// A lattice site. Coordinates beyond the lattice dimension are zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site {
    coords: [usize; MAX_DIMS],
}

impl Site {
    pub fn new(coords: &[usize]) -> Self {
        assert!(coords.len() <= MAX_DIMS, "at most {MAX_DIMS} coordinates");
        let mut c = [0; MAX_DIMS];
        c[..coords.len()].copy_from_slice(coords);
        Site { coords: c }
    }

    pub fn origin() -> Self {
        Site { coords: [0; MAX_DIMS] }
    }

    #[inline]
    pub fn coord(&self, axis: usize) -> usize {
        self.coords[axis]
    }

    pub fn coords(&self) -> &[usize; MAX_DIMS] {
        &self.coords
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Orientation {
    Forward,
    Backward,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Forward => 1.0,
            Orientation::Backward => -1.0,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Orientation::Forward => Orientation::Backward,
            Orientation::Backward => Orientation::Forward,
        }
    }
}

/// One unit step `±μ̂` along a lattice axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub axis: usize,
    pub orientation: Orientation,
}

impl Step {
    pub fn forward(axis: usize) -> Self {
        Step { axis, orientation: Orientation::Forward }
    }

    pub fn backward(axis: usize) -> Self {
        Step { axis, orientation: Orientation::Backward }
    }

    pub fn reversed(self) -> Self {
        Step { axis: self.axis, orientation: self.orientation.reversed() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePath {
    pub start: Site,
    pub steps: Vec<Step>,
}

impl LatticePath {
    pub fn new(start: Site, steps: Vec<Step>) -> Self {
        LatticePath { start, steps }
    }

    pub fn empty(start: Site) -> Self {
        LatticePath { start, steps: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The same geometric path walked backwards from `end`.
    pub fn reversed(&self, end: Site) -> LatticePath {
        LatticePath {
            start: end,
            steps: self.steps.iter().rev().map(|s| s.reversed()).collect(),
        }
    }

    /// This path followed by `other` (which must start where this one ends).
    pub fn then(&self, other: &LatticePath) -> LatticePath {
        let mut steps = self.steps.clone();
        steps.extend_from_slice(&other.steps);
        LatticePath { start: self.start, steps }
    }
}

/// Elementary square with lower corner `corner` spanned by axes `mu < nu`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Plaquette {
    pub corner: Site,
    pub mu: usize,
    pub nu: usize,
}

impl Plaquette {
    /// Closed loop `x → x+μ̂ → x+μ̂+ν̂ → x+ν̂ → x`.
    pub fn boundary_path(&self) -> LatticePath {
        LatticePath::new(
            self.corner,
            vec![
                Step::forward(self.mu),
                Step::forward(self.nu),
                Step::backward(self.mu),
                Step::backward(self.nu),
            ],
        )
    }
}

impl LatticeSpec {
    pub fn new(extents: &[usize], spacing: f64, boundary: Boundary) -> Result<Self> {
        Self::with_max_sites(extents, spacing, boundary, DEFAULT_MAX_SITES)
    }

    pub fn with_max_sites(
        extents: &[usize],
        spacing: f64,
        boundary: Boundary,
        max_sites: usize,
    ) -> Result<Self> {
        if extents.is_empty() || extents.len() > MAX_DIMS {
            return Err(Error::InvalidLattice(format!(
                "dimension must be 1..={MAX_DIMS}, got {}",
                extents.len()
            )));
        }
        if let Some(&bad) = extents.iter().find(|&&e| e < 2) {
            return Err(Error::InvalidLattice(format!("extent must be at least 2, got {bad}")));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidLattice(format!("spacing must be positive, got {spacing}")));
        }
        let total = extents
            .iter()
            .try_fold(1usize, |acc, &e| acc.checked_mul(e))
            .filter(|&n| n <= max_sites)
            .ok_or_else(|| {
                Error::InvalidLattice(format!("site count exceeds the maximum of {max_sites}"))
            })?;
        debug_assert!(total >= 2);
        let mut strides = vec![1; extents.len()];
        for axis in (0..extents.len().saturating_sub(1)).rev() {
            strides[axis] = strides[axis + 1] * extents[axis + 1];
        }
        Ok(LatticeSpec {
            extents: extents.to_vec(),
            spacing,
            boundary,
            strides,
        })
    }

    /// Same shape and boundary with a different spacing.
    pub fn with_spacing(&self, spacing: f64) -> Result<Self> {
        LatticeSpec::new(&self.extents, spacing, self.boundary)
    }

    #[inline]
    pub fn dims(&self) -> usize {
        self.extents.len()
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    #[inline]
    pub fn extent(&self, axis: usize) -> usize {
        self.extents[axis]
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn num_sites(&self) -> usize {
        self.extents.iter().product()
    }

    /// Cell volume `Δ^dims`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dims() as i32)
    }

    pub fn contains(&self, site: &Site) -> bool {
        (0..MAX_DIMS).all(|a| {
            if a < self.dims() {
                site.coords[a] < self.extents[a]
            } else {
                site.coords[a] == 0
            }
        })
    }

    fn check_site(&self, site: &Site) -> Result<()> {
        if self.contains(site) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("site {:?} is not on the lattice", site.coords)))
        }
    }

    fn check_axis(&self, axis: usize) -> Result<()> {
        if axis < self.dims() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "axis {axis} invalid for a {}-dimensional lattice",
                self.dims()
            )))
        }
    }

    /// Row-major linear index (last axis fastest).
    #[inline]
    pub fn index(&self, site: &Site) -> usize {
        (0..self.dims()).map(|a| site.coords[a] * self.strides[a]).sum()
    }

    pub fn site(&self, index: usize) -> Site {
        let mut coords = [0; MAX_DIMS];
        let mut rest = index;
        for a in 0..self.dims() {
            coords[a] = rest / self.strides[a];
            rest %= self.strides[a];
        }
        Site { coords }
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (0..self.num_sites()).map(move |i| self.site(i))
    }

    /// Physical position `coords · Δ`.
    pub fn position(&self, site: &Site) -> [f64; MAX_DIMS] {
        let mut x = [0.0; MAX_DIMS];
        for a in 0..self.dims() {
            x[a] = site.coords[a] as f64 * self.spacing;
        }
        x
    }

    /// Physical side length `extent · Δ` along an axis.
    pub fn length(&self, axis: usize) -> f64 {
        self.extents[axis] as f64 * self.spacing
    }

    /// Site reached by one step, with the boundary condition applied.
    pub fn neighbor(&self, site: &Site, step: Step) -> Result<Site> {
        self.check_axis(step.axis)?;
        self.check_site(site)?;
        let n = self.extents[step.axis];
        let c = site.coords[step.axis];
        let next = match (step.orientation, self.boundary) {
            (Orientation::Forward, Boundary::Periodic) => (c + 1) % n,
            (Orientation::Backward, Boundary::Periodic) => (c + n - 1) % n,
            (Orientation::Forward, Boundary::Clamped) if c + 1 < n => c + 1,
            (Orientation::Backward, Boundary::Clamped) if c > 0 => c - 1,
            _ => return Err(Error::OutOfRange { axis: step.axis, coord: c }),
        };
        let mut out = *site;
        out.coords[step.axis] = next;
        Ok(out)
    }

    /// Linear index of the forward neighbour; `None` at a clamped edge.
    #[inline]
    pub fn forward_index(&self, index: usize, axis: usize) -> Option<usize> {
        let n = self.extents[axis];
        let stride = self.strides[axis];
        let c = (index / stride) % n;
        if c + 1 < n {
            Some(index + stride)
        } else if self.boundary == Boundary::Periodic {
            Some(index + stride - n * stride)
        } else {
            None
        }
    }

    /// Linear index of the backward neighbour; `None` at a clamped edge.
    #[inline]
    pub fn backward_index(&self, index: usize, axis: usize) -> Option<usize> {
        let n = self.extents[axis];
        let stride = self.strides[axis];
        let c = (index / stride) % n;
        if c > 0 {
            Some(index - stride)
        } else if self.boundary == Boundary::Periodic {
            Some(index + (n - 1) * stride)
        } else {
            None
        }
    }

    pub fn path_endpoint(&self, path: &LatticePath) -> Result<Site> {
        path.steps
            .iter()
            .try_fold(path.start, |site, &step| self.neighbor(&site, step))
    }

    /// All elementary squares. Periodic lattices give `sites × C(dims, 2)`;
    /// clamped lattices only those with every corner in range.
    pub fn enumerate_plaquettes(&self) -> Vec<Plaquette> {
        let d = self.dims();
        let mut out = Vec::new();
        for corner in self.sites() {
            for mu in 0..d {
                for nu in (mu + 1)..d {
                    let inside = self.boundary == Boundary::Periodic
                        || (corner.coords[mu] + 1 < self.extents[mu]
                            && corner.coords[nu] + 1 < self.extents[nu]);
                    if inside {
                        out.push(Plaquette { corner, mu, nu });
                    }
                }
            }
        }
        out
    }

    /// Signed number of steps per axis from `from` to `to`. Periodic
    /// lattices use the minimal image, ties resolved towards `+`.
    pub fn displacement(&self, from: &Site, to: &Site) -> [isize; MAX_DIMS] {
        let mut out = [0isize; MAX_DIMS];
        for a in 0..self.dims() {
            let n = self.extents[a] as isize;
            let raw = to.coords[a] as isize - from.coords[a] as isize;
            out[a] = match self.boundary {
                Boundary::Clamped => raw,
                Boundary::Periodic => {
                    let fwd = raw.rem_euclid(n);
                    if 2 * fwd <= n {
                        fwd
                    } else {
                        fwd - n
                    }
                }
            };
        }
        out
    }

    /// Staircase path: all steps along axis 0, then axis 1, and so on.
    pub fn axis_ordered_path(&self, from: &Site, to: &Site) -> LatticePath {
        self.staircase_with_order(from, to, &(0..self.dims()).collect::<Vec<_>>())
    }

    /// Staircase path visiting the axes in the given order.
    pub fn staircase_with_order(&self, from: &Site, to: &Site, order: &[usize]) -> LatticePath {
        let disp = self.displacement(from, to);
        let mut steps = Vec::new();
        for &axis in order {
            let d = disp[axis];
            let step = if d >= 0 { Step::forward(axis) } else { Step::backward(axis) };
            steps.extend(std::iter::repeat_n(step, d.unsigned_abs()));
        }
        LatticePath::new(*from, steps)
    }

    /// Every shortest (monotone) path from `from` to `to`, in lexicographic
    /// step order. Fails when more than `limit` paths exist.
    pub fn staircase_paths(&self, from: &Site, to: &Site, limit: usize) -> Result<Vec<LatticePath>> {
        let disp = self.displacement(from, to);
        let mut remaining: Vec<(Step, usize)> = (0..self.dims())
            .filter(|&a| disp[a] != 0)
            .map(|a| {
                let step = if disp[a] > 0 { Step::forward(a) } else { Step::backward(a) };
                (step, disp[a].unsigned_abs())
            })
            .collect();
        let mut out = Vec::new();
        let mut current = Vec::new();
        fn recurse(
            remaining: &mut [(Step, usize)],
            current: &mut Vec<Step>,
            start: Site,
            out: &mut Vec<LatticePath>,
            limit: usize,
        ) -> bool {
            if remaining.iter().all(|&(_, n)| n == 0) {
                if out.len() == limit {
                    return false;
                }
                out.push(LatticePath::new(start, current.clone()));
                return true;
            }
            for i in 0..remaining.len() {
                if remaining[i].1 == 0 {
                    continue;
                }
                remaining[i].1 -= 1;
                current.push(remaining[i].0);
                let ok = recurse(remaining, current, start, out, limit);
                current.pop();
                remaining[i].1 += 1;
                if !ok {
                    return false;
                }
            }
            true
        }
        if recurse(&mut remaining, &mut current, *from, &mut out, limit) {
            Ok(out)
        } else {
            Err(Error::InvalidArgument(format!("more than {limit} staircase paths")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn periodic(extents: &[usize]) -> LatticeSpec {
        LatticeSpec::new(extents, 1.0, Boundary::Periodic).unwrap()
    }

    fn clamped(extents: &[usize]) -> LatticeSpec {
        LatticeSpec::new(extents, 1.0, Boundary::Clamped).unwrap()
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(LatticeSpec::new(&[], 1.0, Boundary::Periodic).is_err());
        assert!(LatticeSpec::new(&[2, 2, 2, 2, 2], 1.0, Boundary::Periodic).is_err());
        assert!(LatticeSpec::new(&[1, 4], 1.0, Boundary::Periodic).is_err());
        assert!(LatticeSpec::new(&[4], 0.0, Boundary::Periodic).is_err());
        assert!(LatticeSpec::new(&[4], f64::NAN, Boundary::Periodic).is_err());
        assert!(LatticeSpec::new(&[1001, 1000], 1.0, Boundary::Periodic).is_err());
        assert!(LatticeSpec::with_max_sites(&[10, 10], 1.0, Boundary::Periodic, 99).is_err());
    }

    #[test]
    fn neighbor_examples() {
        let p = periodic(&[4, 4]);
        assert_eq!(p.neighbor(&Site::new(&[0, 0]), Step::forward(0)).unwrap(), Site::new(&[1, 0]));
        assert_eq!(p.neighbor(&Site::new(&[3, 0]), Step::forward(0)).unwrap(), Site::new(&[0, 0]));
        let c = clamped(&[4, 4]);
        assert_eq!(
            c.neighbor(&Site::new(&[0, 0]), Step::backward(0)),
            Err(Error::OutOfRange { axis: 0, coord: 0 })
        );
        assert!(p.neighbor(&Site::new(&[0, 0]), Step::forward(2)).is_err());
    }

    #[test]
    fn index_round_trip() {
        let p = periodic(&[3, 4, 5]);
        for i in 0..p.num_sites() {
            assert_eq!(p.index(&p.site(i)), i);
        }
    }

    #[test]
    fn fast_indices_match_neighbor() {
        for spec in [periodic(&[3, 4, 2]), clamped(&[3, 4, 2])] {
            for site in spec.sites() {
                let i = spec.index(&site);
                for axis in 0..3 {
                    let f = spec.neighbor(&site, Step::forward(axis)).ok().map(|s| spec.index(&s));
                    let b = spec.neighbor(&site, Step::backward(axis)).ok().map(|s| spec.index(&s));
                    assert_eq!(spec.forward_index(i, axis), f);
                    assert_eq!(spec.backward_index(i, axis), b);
                }
            }
        }
    }

    #[test]
    fn path_endpoints() {
        let p = periodic(&[4, 4]);
        let o = Site::origin();
        assert_eq!(p.path_endpoint(&LatticePath::empty(o)).unwrap(), o);
        let path = LatticePath::new(o, vec![Step::forward(0), Step::forward(1)]);
        assert_eq!(p.path_endpoint(&path).unwrap(), Site::new(&[1, 1]));
        let back = LatticePath::new(o, vec![Step::forward(0), Step::backward(0)]);
        assert_eq!(p.path_endpoint(&back).unwrap(), o);
        let c = clamped(&[4, 4]);
        assert!(c.path_endpoint(&LatticePath::new(o, vec![Step::backward(1)])).is_err());
    }

    #[test]
    fn plaquette_counts() {
        assert_eq!(periodic(&[3, 3]).enumerate_plaquettes().len(), 9);
        assert!(periodic(&[5]).enumerate_plaquettes().is_empty());
        assert_eq!(clamped(&[3, 3]).enumerate_plaquettes().len(), 4);
        assert_eq!(periodic(&[3, 3, 3, 3]).enumerate_plaquettes().len(), 81 * 6);
        assert_eq!(clamped(&[3, 4, 2]).enumerate_plaquettes().len(), 2 * 3 * 2 + 2 * 1 * 4 + 3 * 1 * 3);
    }

    #[test]
    fn plaquettes_have_no_duplicates() {
        let mut all = periodic(&[3, 2, 4]).enumerate_plaquettes();
        let n = all.len();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), n);
    }

    #[test]
    fn axis_ordered_examples() {
        let c = clamped(&[4, 4]);
        let (a, b) = (Site::new(&[0, 0]), Site::new(&[2, 1]));
        assert_eq!(
            c.axis_ordered_path(&a, &b).steps,
            vec![Step::forward(0), Step::forward(0), Step::forward(1)]
        );
        assert!(c.axis_ordered_path(&a, &a).is_empty());
        assert_eq!(
            c.axis_ordered_path(&b, &a).steps,
            vec![Step::backward(0), Step::backward(0), Step::backward(1)]
        );
    }

    #[test]
    fn minimal_image_ties_go_forward() {
        let p = periodic(&[4]);
        let path = p.axis_ordered_path(&Site::new(&[0]), &Site::new(&[2]));
        assert_eq!(path.steps, vec![Step::forward(0); 2]);
        let path = p.axis_ordered_path(&Site::new(&[0]), &Site::new(&[3]));
        assert_eq!(path.steps, vec![Step::backward(0)]);
    }

    #[test]
    fn staircase_enumeration_counts() {
        let c = clamped(&[4, 4]);
        let paths = c.staircase_paths(&Site::new(&[0, 0]), &Site::new(&[3, 3]), 100).unwrap();
        assert_eq!(paths.len(), 20);
        for p in &paths {
            assert_eq!(c.path_endpoint(p).unwrap(), Site::new(&[3, 3]));
        }
        let c5 = clamped(&[5, 5]);
        let paths = c5.staircase_paths(&Site::new(&[0, 0]), &Site::new(&[4, 4]), 70).unwrap();
        assert_eq!(paths.len(), 70);
        assert!(c5.staircase_paths(&Site::new(&[0, 0]), &Site::new(&[4, 4]), 69).is_err());
    }

    #[test]
    fn deserializes_and_validates() {
        let spec: LatticeSpec =
            serde_json::from_str(r#"{"extents":[4,4],"spacing":0.5,"boundary":"clamped"}"#).unwrap();
        assert_eq!(spec.boundary(), Boundary::Clamped);
        assert_eq!(spec.index(&Site::new(&[1, 2])), 6);
        assert!(serde_json::from_str::<LatticeSpec>(r#"{"extents":[1],"spacing":0.5}"#).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn forward_then_backward_returns(ext in proptest::collection::vec(2usize..6, 1..=4), seed in 0usize..10_000) {
                let spec = periodic(&ext);
                let site = spec.site(seed % spec.num_sites());
                for axis in 0..spec.dims() {
                    let there = spec.neighbor(&site, Step::forward(axis)).unwrap();
                    prop_assert_eq!(spec.neighbor(&there, Step::backward(axis)).unwrap(), site);
                }
            }

            #[test]
            fn canonical_path_reaches_target(ext in proptest::collection::vec(2usize..7, 1..=4), a in 0usize..10_000, b in 0usize..10_000, clamp in any::<bool>()) {
                let boundary = if clamp { Boundary::Clamped } else { Boundary::Periodic };
                let spec = LatticeSpec::new(&ext, 0.5, boundary).unwrap();
                let (from, to) = (spec.site(a % spec.num_sites()), spec.site(b % spec.num_sites()));
                let path = spec.axis_ordered_path(&from, &to);
                prop_assert_eq!(spec.path_endpoint(&path).unwrap(), to);
            }
        }
    }
}

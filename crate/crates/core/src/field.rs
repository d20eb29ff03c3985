//! Matrix-valued fields on sites and on links.
//!
//! A [`MatrixField`] assigns an `m x m` matrix to every site and carries
//! sections, gauge functions and form coefficients (`m = 1` gives ordinary
//! scalar functions). A [`LinkField`] assigns one matrix per `(site, μ)` pair
//! and carries both `B_μ(x)` and `U_μ(x)`.
//!
//! The elementwise arithmetic operators panic on incompatible operands, as
//! shape-mismatched arithmetic is a programming error; the public calculus
//! entry points check compatibility first and return [`Error::Shape`].

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{Lattice, Orientation, Site};
use crate::linalg::{self, Mat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScalarKind {
    Real,
    Complex,
}

impl ScalarKind {
    /// Real only when both inputs are real.
    pub fn join(self, other: ScalarKind) -> ScalarKind {
        if self == ScalarKind::Real && other == ScalarKind::Real {
            ScalarKind::Real
        } else {
            ScalarKind::Complex
        }
    }

    pub fn components(self) -> usize {
        match self {
            ScalarKind::Real => 1,
            ScalarKind::Complex => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixField {
    lattice: Lattice,
    fiber_dim: usize,
    kind: ScalarKind,
    values: Vec<Mat>,
}

fn check_values(
    lattice: &Lattice,
    fiber_dim: usize,
    kind: ScalarKind,
    expected: usize,
    values: &mut [Mat],
) -> Result<()> {
    if fiber_dim == 0 {
        return Err(Error::Shape("fiber dimension must be positive".into()));
    }
    if values.len() != expected {
        return Err(Error::Shape(format!(
            "expected {expected} matrices on a lattice of volume {}, got {}",
            lattice.volume(),
            values.len()
        )));
    }
    for (i, v) in values.iter_mut().enumerate() {
        if v.shape() != (fiber_dim, fiber_dim) {
            return Err(Error::Shape(format!(
                "entry {i} has shape {:?}, expected {fiber_dim}x{fiber_dim}",
                v.shape()
            )));
        }
        if kind == ScalarKind::Real {
            if !linalg::is_real(v) {
                return Err(Error::Shape(format!(
                    "entry {i} has nonzero imaginary part in a real field"
                )));
            }
            linalg::realify(v);
        }
    }
    Ok(())
}

impl MatrixField {
    pub fn new(
        lattice: Lattice,
        fiber_dim: usize,
        kind: ScalarKind,
        mut values: Vec<Mat>,
    ) -> Result<Self> {
        let n = lattice.volume();
        check_values(&lattice, fiber_dim, kind, n, &mut values)?;
        Ok(MatrixField {
            lattice,
            fiber_dim,
            kind,
            values,
        })
    }

    /// Builds a field site by site; imaginary parts are dropped for real kind.
    pub fn from_fn(
        lattice: &Lattice,
        fiber_dim: usize,
        kind: ScalarKind,
        mut f: impl FnMut(&Site) -> Mat,
    ) -> Self {
        let values = lattice
            .sites()
            .map(|s| {
                let mut v = f(&s);
                assert_eq!(v.shape(), (fiber_dim, fiber_dim), "value at {s} has wrong shape");
                if kind == ScalarKind::Real {
                    linalg::realify(&mut v);
                }
                v
            })
            .collect();
        MatrixField {
            lattice: lattice.clone(),
            fiber_dim,
            kind,
            values,
        }
    }

    pub fn constant(lattice: &Lattice, kind: ScalarKind, value: &Mat) -> Self {
        Self::from_fn(lattice, value.nrows(), kind, |_| value.clone())
    }

    pub fn zeros(lattice: &Lattice, fiber_dim: usize, kind: ScalarKind) -> Self {
        Self::constant(lattice, kind, &linalg::zeros(fiber_dim))
    }

    pub fn identity(lattice: &Lattice, fiber_dim: usize, kind: ScalarKind) -> Self {
        Self::constant(lattice, kind, &linalg::identity(fiber_dim))
    }

    /// Scalar (`m = 1`) real field from plain values in lexicographic order.
    pub fn from_reals(lattice: &Lattice, data: &[f64]) -> Result<Self> {
        let values = data.iter().map(|&v| linalg::scalar(Complex64::new(v, 0.0))).collect();
        Self::new(lattice.clone(), 1, ScalarKind::Real, values)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn kind(&self) -> ScalarKind {
        self.kind
    }

    pub fn values(&self) -> &[Mat] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Mat> {
        self.values
    }

    pub fn at(&self, site: &Site) -> Result<&Mat> {
        Ok(&self.values[self.lattice.index(site)?])
    }

    pub fn at_index(&self, idx: usize) -> &Mat {
        &self.values[idx]
    }

    pub fn is_compatible(&self, other: &MatrixField) -> bool {
        self.lattice == other.lattice && self.fiber_dim == other.fiber_dim
    }

    pub fn ensure_compatible(&self, other: &MatrixField) -> Result<()> {
        if self.lattice != other.lattice {
            return Err(Error::Shape("fields live on different lattices".into()));
        }
        if self.fiber_dim != other.fiber_dim {
            return Err(Error::Shape(format!(
                "fiber dimensions {} and {} differ",
                self.fiber_dim, other.fiber_dim
            )));
        }
        Ok(())
    }

    pub fn map(&self, mut f: impl FnMut(usize, &Mat) -> Mat) -> MatrixField {
        let values = self.values.iter().enumerate().map(|(i, v)| f(i, v)).collect();
        MatrixField {
            lattice: self.lattice.clone(),
            fiber_dim: self.fiber_dim,
            kind: self.kind,
            values,
        }
    }

    /// Same field relabelled with a new scalar kind; complex-to-real drops
    /// imaginary parts.
    pub fn with_kind(mut self, kind: ScalarKind) -> Self {
        if kind == ScalarKind::Real {
            self.values.iter_mut().for_each(linalg::realify);
        }
        self.kind = kind;
        self
    }

    /// `E_μ^{±1} f`: `result(x) = f(x ± μ̂)`.
    pub fn shift(&self, dir: usize, orientation: Orientation) -> Result<MatrixField> {
        self.lattice.require_periodic()?;
        self.lattice.check_dir(dir)?;
        let lat = &self.lattice;
        Ok(self.map(|i, _| {
            let j = match orientation {
                Orientation::Forward => lat.up(i, dir),
                Orientation::Backward => lat.down(i, dir),
            };
            self.values[j].clone()
        }))
    }

    /// Composite forward shift `f(x + Σ μ̂_k)` over the listed directions.
    pub(crate) fn shift_forward_many(&self, dirs: &[usize]) -> MatrixField {
        if dirs.is_empty() {
            return self.clone();
        }
        let lat = &self.lattice;
        self.map(|i, _| self.values[lat.up_many(i, dirs)].clone())
    }

    /// `Δ_μ f(x) = f(x + μ̂) - f(x)`.
    pub fn difference(&self, dir: usize) -> Result<MatrixField> {
        self.lattice.require_periodic()?;
        self.lattice.check_dir(dir)?;
        let lat = &self.lattice;
        Ok(self.map(|i, v| &self.values[lat.up(i, dir)] - v))
    }

    pub fn scale(&self, c: Complex64) -> MatrixField {
        let mut out = self.map(|_, v| v * c);
        if c.im != 0.0 {
            out.kind = ScalarKind::Complex;
        }
        out
    }

    /// Pointwise inverse; reports the first singular site.
    pub fn inverse(&self) -> Result<MatrixField> {
        let mut values = Vec::with_capacity(self.values.len());
        for (i, v) in self.values.iter().enumerate() {
            values.push(linalg::inverse(v).ok_or_else(|| Error::Singular {
                what: "matrix",
                site: self.lattice.site(i).coords().to_vec(),
                dir: None,
            })?);
        }
        MatrixField::new(self.lattice.clone(), self.fiber_dim, self.kind, values)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(linalg::max_abs).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &MatrixField) -> f64 {
        assert!(self.is_compatible(other), "incompatible fields");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| linalg::max_abs_diff(a, b))
            .fold(0.0, f64::max)
    }

    /// Sum over all sites.
    pub fn total(&self) -> Mat {
        self.values
            .iter()
            .fold(linalg::zeros(self.fiber_dim), |acc, v| acc + v)
    }
}

fn zip_fields(a: &MatrixField, b: &MatrixField, f: impl Fn(&Mat, &Mat) -> Mat) -> MatrixField {
    assert!(a.is_compatible(b), "incompatible fields in elementwise operation");
    MatrixField {
        lattice: a.lattice.clone(),
        fiber_dim: a.fiber_dim,
        kind: a.kind.join(b.kind),
        values: a.values.iter().zip(&b.values).map(|(x, y)| f(x, y)).collect(),
    }
}

impl Add for &MatrixField {
    type Output = MatrixField;
    fn add(self, rhs: &MatrixField) -> MatrixField {
        zip_fields(self, rhs, |x, y| x + y)
    }
}

impl Sub for &MatrixField {
    type Output = MatrixField;
    fn sub(self, rhs: &MatrixField) -> MatrixField {
        zip_fields(self, rhs, |x, y| x - y)
    }
}

/// Pointwise matrix product `(f·g)(x) = f(x) g(x)`.
impl Mul for &MatrixField {
    type Output = MatrixField;
    fn mul(self, rhs: &MatrixField) -> MatrixField {
        zip_fields(self, rhs, |x, y| x * y)
    }
}

impl Neg for &MatrixField {
    type Output = MatrixField;
    fn neg(self) -> MatrixField {
        self.map(|_, v| -v)
    }
}

/// One matrix per oriented link `(x, x + μ̂)`, stored site-major then
/// direction-major.
#[derive(Clone, Debug, PartialEq)]
pub struct LinkField {
    lattice: Lattice,
    fiber_dim: usize,
    kind: ScalarKind,
    values: Vec<Mat>,
}

impl LinkField {
    pub fn new(
        lattice: Lattice,
        fiber_dim: usize,
        kind: ScalarKind,
        mut values: Vec<Mat>,
    ) -> Result<Self> {
        let n = lattice.num_links();
        check_values(&lattice, fiber_dim, kind, n, &mut values)?;
        Ok(LinkField {
            lattice,
            fiber_dim,
            kind,
            values,
        })
    }

    pub fn from_fn(
        lattice: &Lattice,
        fiber_dim: usize,
        kind: ScalarKind,
        mut f: impl FnMut(&Site, usize) -> Mat,
    ) -> Self {
        let dim = lattice.dim();
        let mut values = Vec::with_capacity(lattice.num_links());
        for s in lattice.sites() {
            for d in 0..dim {
                let mut v = f(&s, d);
                assert_eq!(v.shape(), (fiber_dim, fiber_dim), "link ({s},{d}) has wrong shape");
                if kind == ScalarKind::Real {
                    linalg::realify(&mut v);
                }
                values.push(v);
            }
        }
        LinkField {
            lattice: lattice.clone(),
            fiber_dim,
            kind,
            values,
        }
    }

    pub fn constant(lattice: &Lattice, kind: ScalarKind, value: &Mat) -> Self {
        Self::from_fn(lattice, value.nrows(), kind, |_, _| value.clone())
    }

    pub fn identity(lattice: &Lattice, fiber_dim: usize, kind: ScalarKind) -> Self {
        Self::constant(lattice, kind, &linalg::identity(fiber_dim))
    }

    pub fn zeros(lattice: &Lattice, fiber_dim: usize, kind: ScalarKind) -> Self {
        Self::constant(lattice, kind, &linalg::zeros(fiber_dim))
    }

    /// Assembles a link field from one site field per direction.
    pub fn from_components(components: &[MatrixField]) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::Shape("no components".into()))?;
        let lat = first.lattice();
        if components.len() != lat.dim() {
            return Err(Error::Shape(format!(
                "{} components for a {}-dimensional lattice",
                components.len(),
                lat.dim()
            )));
        }
        let mut kind = first.kind();
        for c in components {
            first.ensure_compatible(c)?;
            kind = kind.join(c.kind());
        }
        Ok(Self::from_fn(lat, first.fiber_dim(), kind, |_, _| linalg::zeros(first.fiber_dim()))
            .map(|i, d, _| components[d].at_index(i).clone()))
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn kind(&self) -> ScalarKind {
        self.kind
    }

    pub fn values(&self) -> &[Mat] {
        &self.values
    }

    pub fn at(&self, site: &Site, dir: usize) -> Result<&Mat> {
        self.lattice.check_dir(dir)?;
        let i = self.lattice.index(site)?;
        Ok(&self.values[i * self.lattice.dim() + dir])
    }

    #[inline]
    pub fn at_index(&self, idx: usize, dir: usize) -> &Mat {
        &self.values[idx * self.lattice.dim() + dir]
    }

    /// Site field of the `dir` component, `x ↦ L_dir(x)`.
    pub fn component(&self, dir: usize) -> Result<MatrixField> {
        self.lattice.check_dir(dir)?;
        let values = (0..self.lattice.volume())
            .map(|i| self.at_index(i, dir).clone())
            .collect();
        MatrixField::new(self.lattice.clone(), self.fiber_dim, self.kind, values)
    }

    pub fn ensure_compatible(&self, other: &LinkField) -> Result<()> {
        if self.lattice != other.lattice || self.fiber_dim != other.fiber_dim {
            return Err(Error::Shape("link fields have different shapes".into()));
        }
        Ok(())
    }

    pub fn ensure_compatible_site(&self, other: &MatrixField) -> Result<()> {
        if &self.lattice != other.lattice() || self.fiber_dim != other.fiber_dim() {
            return Err(Error::Shape("link and site fields have different shapes".into()));
        }
        Ok(())
    }

    /// `f(site_index, dir, value)` applied to every link.
    pub fn map(&self, mut f: impl FnMut(usize, usize, &Mat) -> Mat) -> LinkField {
        let dim = self.lattice.dim();
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, v)| f(k / dim, k % dim, v))
            .collect();
        LinkField {
            lattice: self.lattice.clone(),
            fiber_dim: self.fiber_dim,
            kind: self.kind,
            values,
        }
    }

    pub fn with_kind(mut self, kind: ScalarKind) -> Self {
        if kind == ScalarKind::Real {
            self.values.iter_mut().for_each(linalg::realify);
        }
        self.kind = kind;
        self
    }

    /// Translated configuration `L'_μ(x) = L_μ(x ± ν̂)`.
    pub fn shift(&self, dir: usize, orientation: Orientation) -> Result<LinkField> {
        self.lattice.require_periodic()?;
        self.lattice.check_dir(dir)?;
        let lat = &self.lattice;
        Ok(self.map(|i, d, _| {
            let j = match orientation {
                Orientation::Forward => lat.up(i, dir),
                Orientation::Backward => lat.down(i, dir),
            };
            self.at_index(j, d).clone()
        }))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(linalg::max_abs).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &LinkField) -> f64 {
        assert!(
            self.lattice == other.lattice && self.fiber_dim == other.fiber_dim,
            "incompatible link fields"
        );
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| linalg::max_abs_diff(a, b))
            .fold(0.0, f64::max)
    }
}

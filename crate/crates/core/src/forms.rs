//! Noncommutative exterior algebra on a periodic lattice.
//!
//! A degree-`k` form is stored as `Σ_I f_I dx^I` with every multi-index `I`
//! strictly increasing and every coefficient written to the LEFT of the basis
//! one-forms. Functions do not commute with one-forms:
//! `dx^μ f = (E_μ f) dx^μ`, so carrying a coefficient leftward across `dx^I`
//! shifts it once per basis one-form crossed.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{MatrixField, ScalarKind};
use crate::lattice::Lattice;

#[derive(Clone, Debug)]
pub struct DiscreteForm {
    lattice: Lattice,
    fiber_dim: usize,
    kind: ScalarKind,
    degree: usize,
    // absent keys are zero coefficients
    coeffs: BTreeMap<Vec<usize>, MatrixField>,
}

/// Sorts `indices` in place; returns the permutation sign, or `None` when an
/// index repeats.
pub fn canonicalize(indices: &mut [usize]) -> Option<i32> {
    let mut sign = 1;
    // insertion sort counting transpositions
    for i in 1..indices.len() {
        let mut j = i;
        while j > 0 && indices[j - 1] > indices[j] {
            indices.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if indices.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

fn sign_scale(field: &MatrixField, sign: i32) -> MatrixField {
    if sign >= 0 {
        field.clone()
    } else {
        -field
    }
}

impl DiscreteForm {
    pub fn zero(lattice: &Lattice, fiber_dim: usize, kind: ScalarKind, degree: usize) -> Self {
        DiscreteForm {
            lattice: lattice.clone(),
            fiber_dim,
            kind,
            degree: degree.min(lattice.dim() + 1),
            coeffs: BTreeMap::new(),
        }
    }

    /// Ω⁰ is the function algebra itself.
    pub fn from_function(f: MatrixField) -> Self {
        let mut coeffs = BTreeMap::new();
        let (lattice, fiber_dim, kind) = (f.lattice().clone(), f.fiber_dim(), f.kind());
        coeffs.insert(Vec::new(), f);
        DiscreteForm {
            lattice,
            fiber_dim,
            kind,
            degree: 0,
            coeffs,
        }
    }

    /// The basis one-form `dx^μ` with identity coefficient.
    pub fn basis(lattice: &Lattice, fiber_dim: usize, kind: ScalarKind, dir: usize) -> Result<Self> {
        lattice.check_dir(dir)?;
        Self::from_terms(
            lattice,
            fiber_dim,
            kind,
            1,
            [(vec![dir], MatrixField::identity(lattice, fiber_dim, kind))],
        )
    }

    /// `Σ_μ f_μ dx^μ` from one coefficient field per direction.
    pub fn one_form(components: &[MatrixField]) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::Shape("one-form needs at least one component".into()))?;
        let lat = first.lattice().clone();
        if components.len() != lat.dim() {
            return Err(Error::Shape(format!(
                "{} components for a {}-dimensional lattice",
                components.len(),
                lat.dim()
            )));
        }
        let kind = components.iter().fold(first.kind(), |k, c| k.join(c.kind()));
        Self::from_terms(
            &lat,
            first.fiber_dim(),
            kind,
            1,
            components.iter().enumerate().map(|(d, c)| (vec![d], c.clone())),
        )
    }

    /// Sum of `f dx^{i_1}∧…∧dx^{i_k}` terms in any index order; repeated
    /// indices vanish and the rest are brought to canonical order with sign.
    pub fn from_terms(
        lattice: &Lattice,
        fiber_dim: usize,
        kind: ScalarKind,
        degree: usize,
        terms: impl IntoIterator<Item = (Vec<usize>, MatrixField)>,
    ) -> Result<Self> {
        let mut form = Self::zero(lattice, fiber_dim, kind, degree);
        for (mut idx, f) in terms {
            if idx.len() != degree {
                return Err(Error::Degree {
                    expected: degree,
                    found: idx.len(),
                });
            }
            if f.lattice() != lattice || f.fiber_dim() != fiber_dim {
                return Err(Error::Shape("coefficient does not match form shape".into()));
            }
            if let Some(&bad) = idx.iter().find(|&&d| d >= lattice.dim()) {
                return Err(Error::Direction {
                    dir: bad,
                    dim: lattice.dim(),
                });
            }
            form.kind = form.kind.join(f.kind());
            if let Some(sign) = canonicalize(&mut idx) {
                form.accumulate(idx, sign_scale(&f, sign));
            }
        }
        Ok(form)
    }

    fn accumulate(&mut self, idx: Vec<usize>, f: MatrixField) {
        match self.coeffs.get_mut(&idx) {
            Some(existing) => *existing = &*existing + &f,
            None => {
                self.coeffs.insert(idx, f);
            }
        }
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

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Stored (canonical, nonzero-by-construction) terms.
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &MatrixField)> {
        self.coeffs.iter()
    }

    /// Coefficient of `dx^{i_1}∧…∧dx^{i_k}` for any ordering of the indices.
    pub fn coefficient(&self, indices: &[usize]) -> Result<MatrixField> {
        if indices.len() != self.degree {
            return Err(Error::Degree {
                expected: self.degree,
                found: indices.len(),
            });
        }
        let zero = || MatrixField::zeros(&self.lattice, self.fiber_dim, self.kind);
        let mut idx = indices.to_vec();
        match canonicalize(&mut idx) {
            None => Ok(zero()),
            Some(sign) => Ok(self
                .coeffs
                .get(&idx)
                .map(|f| sign_scale(f, sign))
                .unwrap_or_else(zero)),
        }
    }

    /// The underlying function of a 0-form.
    pub fn as_function(&self) -> Result<MatrixField> {
        self.coefficient(&[])
    }

    fn ensure_compatible(&self, other: &DiscreteForm) -> Result<()> {
        if self.lattice != other.lattice {
            return Err(Error::Shape("forms live on different lattices".into()));
        }
        if self.fiber_dim != other.fiber_dim {
            return Err(Error::Shape(format!(
                "fiber dimensions {} and {} differ",
                self.fiber_dim, other.fiber_dim
            )));
        }
        Ok(())
    }

    fn combine(&self, other: &DiscreteForm, sign: i32) -> Result<DiscreteForm> {
        self.ensure_compatible(other)?;
        if self.degree != other.degree {
            return Err(Error::Degree {
                expected: self.degree,
                found: other.degree,
            });
        }
        let mut out = self.clone();
        out.kind = self.kind.join(other.kind);
        for (idx, f) in &other.coeffs {
            out.accumulate(idx.clone(), sign_scale(f, sign));
        }
        Ok(out)
    }

    pub fn add(&self, other: &DiscreteForm) -> Result<DiscreteForm> {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &DiscreteForm) -> Result<DiscreteForm> {
        self.combine(other, -1)
    }

    pub fn scale(&self, c: Complex64) -> DiscreteForm {
        let mut out = self.clone();
        for f in out.coeffs.values_mut() {
            *f = f.scale(c);
        }
        if c.im != 0.0 {
            out.kind = ScalarKind::Complex;
        }
        out
    }

    pub fn neg(&self) -> DiscreteForm {
        self.scale(Complex64::new(-1.0, 0.0))
    }

    /// `ω ∧ η`.
    ///
    /// For `ω = f dx^I` and `η = g dx^J` the product is
    /// `f · (E_I g) dx^I ∧ dx^J`, where `E_I` composes one forward shift per
    /// direction in `I`. A degree above the lattice dimension yields the
    /// zero form.
    pub fn wedge(&self, other: &DiscreteForm) -> Result<DiscreteForm> {
        self.ensure_compatible(other)?;
        let degree = self.degree + other.degree;
        let mut out = DiscreteForm::zero(
            &self.lattice,
            self.fiber_dim,
            self.kind.join(other.kind),
            degree,
        );
        if degree > self.lattice.dim() {
            return Ok(out);
        }
        self.lattice.require_periodic()?;
        for (i_idx, f) in &self.coeffs {
            for (j_idx, g) in &other.coeffs {
                let mut merged: Vec<usize> = i_idx.iter().chain(j_idx).copied().collect();
                let Some(sign) = canonicalize(&mut merged) else {
                    continue;
                };
                let shifted = g.shift_forward_many(i_idx);
                out.accumulate(merged, sign_scale(&(f * &shifted), sign));
            }
        }
        Ok(out)
    }

    /// `d_D(f dx^I) = Σ_α (Δ_α f) dx^α ∧ dx^I`.
    pub fn exterior_derivative(&self) -> Result<DiscreteForm> {
        self.lattice.require_periodic()?;
        let mut out = DiscreteForm::zero(&self.lattice, self.fiber_dim, self.kind, self.degree + 1);
        if self.degree >= self.lattice.dim() {
            return Ok(out);
        }
        for (idx, f) in &self.coeffs {
            for alpha in 0..self.lattice.dim() {
                if idx.contains(&alpha) {
                    continue;
                }
                let mut merged = Vec::with_capacity(idx.len() + 1);
                merged.push(alpha);
                merged.extend_from_slice(idx);
                let sign = canonicalize(&mut merged).expect("alpha not in index set");
                out.accumulate(merged, sign_scale(&f.difference(alpha)?, sign));
            }
        }
        Ok(out)
    }

    /// Contraction with the difference vector `Δ_μ`: `dx^ν(Δ_μ) = δ^ν_μ`.
    pub fn pair(&self, dir: usize) -> Result<MatrixField> {
        if self.degree != 1 {
            return Err(Error::Degree {
                expected: 1,
                found: self.degree,
            });
        }
        self.lattice.check_dir(dir)?;
        self.coefficient(&[dir])
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(MatrixField::max_abs).fold(0.0, f64::max)
    }

    /// Largest coefficient entry of `self - other`.
    pub fn max_abs_diff(&self, other: &DiscreteForm) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }
}

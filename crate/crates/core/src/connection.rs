//! Difference discrete connections.
//!
//! A connection is given either by its one-form coefficients `B_μ(x)` or by
//! the link transports `U_μ(x) = I + B_μ(x)`. Sections are row vectors; a
//! [`MatrixField`] used as a section is read row by row, so an `m x m` value
//! holds `m` independent sections and a group-valued principal section is
//! just another field of the same shape.

use crate::error::{Error, Result};
use crate::field::{LinkField, MatrixField, ScalarKind};
use crate::forms::DiscreteForm;
use crate::lattice::{Lattice, Orientation, Site, Step};
use crate::linalg::{self, Mat};

/// One-form coefficients `B_μ(x) = B(x, x + μ̂)`.
#[derive(Clone, Debug)]
pub struct ConnectionB {
    links: LinkField,
}

impl ConnectionB {
    pub fn new(links: LinkField) -> Result<Self> {
        links.lattice().require_periodic()?;
        Ok(ConnectionB { links })
    }

    pub fn zero(lattice: &Lattice, fiber_dim: usize, kind: ScalarKind) -> Result<Self> {
        Self::new(LinkField::zeros(lattice, fiber_dim, kind))
    }

    pub fn links(&self) -> &LinkField {
        &self.links
    }

    pub fn into_links(self) -> LinkField {
        self.links
    }

    pub fn lattice(&self) -> &Lattice {
        self.links.lattice()
    }

    pub fn fiber_dim(&self) -> usize {
        self.links.fiber_dim()
    }

    pub fn kind(&self) -> ScalarKind {
        self.links.kind()
    }

    pub fn component(&self, dir: usize) -> Result<MatrixField> {
        self.links.component(dir)
    }

    /// The matrix-valued one-form `B = Σ_μ B_μ dx^μ`.
    pub fn to_form(&self) -> Result<DiscreteForm> {
        let comps = (0..self.lattice().dim())
            .map(|d| self.component(d))
            .collect::<Result<Vec<_>>>()?;
        DiscreteForm::one_form(&comps)
    }

    pub fn max_abs(&self) -> f64 {
        self.links.max_abs()
    }
}

/// Link transports `U_μ(x) = U(x, x + μ̂)`, each invertible.
#[derive(Clone, Debug)]
pub struct ConnectionU {
    links: LinkField,
}

impl ConnectionU {
    pub fn new(links: LinkField) -> Result<Self> {
        links.lattice().require_periodic()?;
        let lat = links.lattice();
        for i in 0..lat.volume() {
            for d in 0..lat.dim() {
                if !linalg::is_invertible(links.at_index(i, d)) {
                    return Err(Error::Singular {
                        what: "link transport",
                        site: lat.site(i).coords().to_vec(),
                        dir: Some(d),
                    });
                }
            }
        }
        Ok(ConnectionU { links })
    }

    pub fn identity(lattice: &Lattice, fiber_dim: usize, kind: ScalarKind) -> Result<Self> {
        Self::new(LinkField::identity(lattice, fiber_dim, kind))
    }

    pub fn links(&self) -> &LinkField {
        &self.links
    }

    pub fn into_links(self) -> LinkField {
        self.links
    }

    pub fn lattice(&self) -> &Lattice {
        self.links.lattice()
    }

    pub fn fiber_dim(&self) -> usize {
        self.links.fiber_dim()
    }

    pub fn kind(&self) -> ScalarKind {
        self.links.kind()
    }

    #[inline]
    pub fn link(&self, idx: usize, dir: usize) -> &Mat {
        self.links.at_index(idx, dir)
    }

    /// `U(x + μ̂, x) = U_μ(x)^{-1}`.
    pub fn inverse_link(&self, idx: usize, dir: usize) -> Mat {
        linalg::inverse(self.link(idx, dir)).expect("transports are invertible by construction")
    }

    /// Transport across one step leaving site `idx`, and the site reached.
    pub fn step_transport(&self, idx: usize, step: Step) -> Result<(Mat, usize)> {
        let lat = self.lattice();
        lat.check_dir(step.dir)?;
        match step.orientation {
            Orientation::Forward => Ok((self.link(idx, step.dir).clone(), lat.up(idx, step.dir))),
            Orientation::Backward => {
                let prev = lat.down(idx, step.dir);
                Ok((self.inverse_link(prev, step.dir), prev))
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.links.max_abs()
    }
}

/// Site-wise change of fiber basis `g(x)`, with inverses cached.
#[derive(Clone, Debug)]
pub struct GaugeTransform {
    g: MatrixField,
    g_inv: MatrixField,
}

impl GaugeTransform {
    pub fn new(g: MatrixField) -> Result<Self> {
        g.lattice().require_periodic()?;
        let g_inv = g.inverse()?;
        Ok(GaugeTransform { g, g_inv })
    }

    pub fn identity(lattice: &Lattice, fiber_dim: usize, kind: ScalarKind) -> Result<Self> {
        Self::new(MatrixField::identity(lattice, fiber_dim, kind))
    }

    pub fn g(&self) -> &MatrixField {
        &self.g
    }

    pub fn g_inv(&self) -> &MatrixField {
        &self.g_inv
    }

    pub fn lattice(&self) -> &Lattice {
        self.g.lattice()
    }

    pub fn fiber_dim(&self) -> usize {
        self.g.fiber_dim()
    }

    /// The transform equivalent to applying `self` and then `then`: the
    /// pointwise product `then.g · self.g`.
    pub fn then(&self, then: &GaugeTransform) -> Result<GaugeTransform> {
        self.g.ensure_compatible(&then.g)?;
        GaugeTransform::new(&then.g * &self.g)
    }

    fn check_links(&self, links: &LinkField) -> Result<()> {
        links.ensure_compatible_site(&self.g)
    }
}

/// A lattice walk from `base` made of unit steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePath {
    pub base: Site,
    pub steps: Vec<Step>,
}

impl LatticePath {
    pub fn new(base: Site, steps: Vec<Step>) -> Self {
        LatticePath { base, steps }
    }

    pub fn empty(base: Site) -> Self {
        Self::new(base, Vec::new())
    }

    /// Counter-clockwise elementary square `+μ, +ν, -μ, -ν` at `base`.
    pub fn plaquette(base: Site, mu: usize, nu: usize) -> Self {
        Self::new(
            base,
            vec![
                Step::forward(mu),
                Step::forward(nu),
                Step::backward(mu),
                Step::backward(nu),
            ],
        )
    }

    /// Site indices visited, starting with the base. Fails if a step leaves
    /// an open axis or names a bad direction.
    pub fn visit(&self, lattice: &Lattice) -> Result<Vec<usize>> {
        let mut idx = lattice
            .index(&self.base)
            .map_err(|e| Error::InvalidPath(format!("base site: {e}")))?;
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        out.push(idx);
        for (k, step) in self.steps.iter().enumerate() {
            idx = lattice
                .shift_index(idx, step.dir, step.orientation)
                .map_err(|e| Error::InvalidPath(format!("step {k}: {e}")))?;
            out.push(idx);
        }
        Ok(out)
    }

    pub fn end(&self, lattice: &Lattice) -> Result<Site> {
        let v = self.visit(lattice)?;
        Ok(lattice.site(*v.last().expect("visit includes base")))
    }

    pub fn is_closed(&self, lattice: &Lattice) -> Result<bool> {
        Ok(self.end(lattice)? == self.base)
    }

    /// `self` followed by `other`; `other` must start where `self` ends.
    pub fn concat(&self, other: &LatticePath, lattice: &Lattice) -> Result<LatticePath> {
        if self.end(lattice)? != other.base {
            return Err(Error::InvalidPath(format!(
                "second path starts at {} but first ends elsewhere",
                other.base
            )));
        }
        let mut steps = self.steps.clone();
        steps.extend_from_slice(&other.steps);
        Ok(LatticePath::new(self.base.clone(), steps))
    }

    /// Same walk traversed backwards, starting at the end point.
    pub fn reversed(&self, lattice: &Lattice) -> Result<LatticePath> {
        let end = self.end(lattice)?;
        Ok(LatticePath::new(
            end,
            self.steps.iter().rev().map(|s| s.reversed()).collect(),
        ))
    }
}

/// `U_μ(x) = I + B_μ(x)`; fails naming the first link where it is singular.
pub fn to_transport(b: &ConnectionB) -> Result<ConnectionU> {
    let m = b.fiber_dim();
    let id = linalg::identity(m);
    let lat = b.lattice();
    for i in 0..lat.volume() {
        for d in 0..lat.dim() {
            let u = b.links.at_index(i, d) + &id;
            if !linalg::is_invertible(&u) {
                return Err(Error::Singular {
                    what: "I + B",
                    site: lat.site(i).coords().to_vec(),
                    dir: Some(d),
                });
            }
        }
    }
    ConnectionU::new(b.links.map(|_, _, v| v + &id))
}

/// `B_μ(x) = U_μ(x) - I`.
pub fn from_transport(u: &ConnectionU) -> ConnectionB {
    let id = linalg::identity(u.fiber_dim());
    ConnectionB {
        links: u.links.map(|_, _, v| v - &id),
    }
}

fn check_section(a: &MatrixField, links: &LinkField) -> Result<()> {
    links.ensure_compatible_site(a)
}

/// `D_μ a(x) = Δ_μ a(x) - a(x)·B_μ(x)`.
pub fn covariant_derivative_vector(a: &MatrixField, b: &ConnectionB, dir: usize) -> Result<MatrixField> {
    check_section(a, &b.links)?;
    let diff = a.difference(dir)?;
    Ok(diff.map(|i, v| v - a.at_index(i) * b.links.at_index(i, dir)))
}

/// `D a = Σ_μ (D_μ a) dx^μ`.
pub fn covariant_exterior_derivative(a: &MatrixField, b: &ConnectionB) -> Result<DiscreteForm> {
    let comps = (0..b.lattice().dim())
        .map(|d| covariant_derivative_vector(a, b, d))
        .collect::<Result<Vec<_>>>()?;
    DiscreteForm::one_form(&comps)
}

/// `D_μ h(x) = h(x + μ̂) - h(x)·U_μ(x)` for a group-valued section `h`.
pub fn covariant_derivative_principal(h: &MatrixField, u: &ConnectionU, dir: usize) -> Result<MatrixField> {
    check_section(h, &u.links)?;
    u.lattice().check_dir(dir)?;
    for (i, v) in h.values().iter().enumerate() {
        if !linalg::is_invertible(v) {
            return Err(Error::Singular {
                what: "principal section",
                site: h.lattice().site(i).coords().to_vec(),
                dir: None,
            });
        }
    }
    let shifted = h.shift(dir, Orientation::Forward)?;
    Ok(shifted.map(|i, v| v - h.at_index(i) * u.link(i, dir)))
}

/// `B'_μ(x) = g(x) B_μ(x) g⁻¹(x + μ̂) + g(x) Δ_μ g⁻¹(x)`.
pub fn gauge_transform_b(b: &ConnectionB, g: &GaugeTransform) -> Result<ConnectionB> {
    g.check_links(&b.links)?;
    let lat = b.lattice();
    let (gf, gi) = (&g.g, &g.g_inv);
    let links = b.links.map(|i, d, v| {
        let j = lat.up(i, d);
        let gx = gf.at_index(i);
        gx * v * gi.at_index(j) + gx * (gi.at_index(j) - gi.at_index(i))
    });
    let kind = links.kind().join(gf.kind());
    ConnectionB::new(links.with_kind(kind))
}

/// `U'_μ(x) = g(x) U_μ(x) g⁻¹(x + μ̂)`.
pub fn gauge_transform_u(u: &ConnectionU, g: &GaugeTransform) -> Result<ConnectionU> {
    g.check_links(&u.links)?;
    let lat = u.lattice();
    let links = u
        .links
        .map(|i, d, v| g.g.at_index(i) * v * g.g_inv.at_index(lat.up(i, d)));
    let kind = links.kind().join(g.g.kind());
    ConnectionU::new(links.with_kind(kind))
}

/// `a'(x) = a(x) g⁻¹(x)`, which keeps `S = Σ a^α s_α` invariant.
pub fn gauge_transform_section(a: &MatrixField, g: &GaugeTransform) -> Result<MatrixField> {
    a.ensure_compatible(&g.g)?;
    Ok(a * &g.g_inv)
}

/// Ordered product of link transports along `path`, using
/// `U(x + μ̂, x) = U_μ(x)⁻¹` on backward steps.
pub fn path_ordered_product(path: &LatticePath, u: &ConnectionU) -> Result<Mat> {
    let lat = u.lattice();
    path.visit(lat)?;
    let mut idx = lat.index(&path.base)?;
    let mut acc = linalg::identity(u.fiber_dim());
    for &step in &path.steps {
        let (t, next) = u.step_transport(idx, step)?;
        acc *= t;
        idx = next;
    }
    Ok(acc)
}

/// Parallel transport of a row vector: `a ← a·U(x, x ± μ̂)` step by step.
pub fn parallel_transport(a_start: &Mat, path: &LatticePath, u: &ConnectionU) -> Result<Mat> {
    if a_start.ncols() != u.fiber_dim() {
        return Err(Error::Shape(format!(
            "row vector has {} columns, fiber dimension is {}",
            a_start.ncols(),
            u.fiber_dim()
        )));
    }
    let lat = u.lattice();
    path.visit(lat)?;
    let mut idx = lat.index(&path.base)?;
    let mut a = a_start.clone();
    for &step in &path.steps {
        let (t, next) = u.step_transport(idx, step)?;
        a *= t;
        idx = next;
    }
    Ok(a)
}

//! Curvature of difference discrete connections.
//!
//! Components are stored UNHALVED, `F = Σ_{μ<ν} F_μν dx^μ ∧ dx^ν`, so that
//! `F_μν` is exactly the canonical coefficient of the two-form
//! `d_D B + B ∧ B`:
//!
//! ```text
//! F_μν(x) = Δ_μ B_ν(x) - Δ_ν B_μ(x) + B_μ(x) B_ν(x+μ̂) - B_ν(x) B_μ(x+ν̂)
//!         = U_μ(x) U_ν(x+μ̂) - U_ν(x) U_μ(x+ν̂)        (U = I + B)
//! ```

use std::collections::BTreeMap;

use crate::connection::{self, ConnectionB, ConnectionU, LatticePath};
use crate::error::{Error, Result};
use crate::field::{MatrixField, ScalarKind};
use crate::forms::DiscreteForm;
use crate::lattice::{Lattice, Site};
use crate::linalg::{self, Mat};

pub mod continuum;
pub mod topology;

pub use continuum::{continuum_scan, ContinuumScan, ScanRow, TorusPotential};
pub use topology::{chern_density, chern_density_field, chern_density_in, topological_charge_u1, ChargeReport};

#[derive(Clone, Debug)]
pub struct CurvatureField {
    lattice: Lattice,
    fiber_dim: usize,
    kind: ScalarKind,
    // keyed by (μ, ν) with μ < ν
    components: BTreeMap<(usize, usize), MatrixField>,
}

impl CurvatureField {
    fn build(
        lattice: &Lattice,
        fiber_dim: usize,
        kind: ScalarKind,
        mut f: impl FnMut(usize, usize) -> Result<MatrixField>,
    ) -> Result<Self> {
        let mut components = BTreeMap::new();
        for mu in 0..lattice.dim() {
            for nu in mu + 1..lattice.dim() {
                components.insert((mu, nu), f(mu, nu)?);
            }
        }
        Ok(CurvatureField {
            lattice: lattice.clone(),
            fiber_dim,
            kind,
            components,
        })
    }

    /// Reads the canonical coefficients of a two-form.
    pub fn from_form(form: &DiscreteForm) -> Result<Self> {
        if form.degree() != 2 {
            return Err(Error::Degree {
                expected: 2,
                found: form.degree(),
            });
        }
        Self::build(form.lattice(), form.fiber_dim(), form.kind(), |mu, nu| {
            form.coefficient(&[mu, nu])
        })
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

    /// `F_μν` with `F_νμ = -F_μν` and `F_μμ = 0`.
    pub fn component(&self, mu: usize, nu: usize) -> Result<MatrixField> {
        self.lattice.check_dir(mu)?;
        self.lattice.check_dir(nu)?;
        Ok(match mu.cmp(&nu) {
            std::cmp::Ordering::Less => self.components[&(mu, nu)].clone(),
            std::cmp::Ordering::Greater => -&self.components[&(nu, mu)],
            std::cmp::Ordering::Equal => MatrixField::zeros(&self.lattice, self.fiber_dim, self.kind),
        })
    }

    /// Stored `(μ, ν)` pairs with `μ < ν`.
    pub fn components(&self) -> impl Iterator<Item = (&(usize, usize), &MatrixField)> {
        self.components.iter()
    }

    pub fn to_form(&self) -> Result<DiscreteForm> {
        DiscreteForm::from_terms(
            &self.lattice,
            self.fiber_dim,
            self.kind,
            2,
            self.components.iter().map(|(&(mu, nu), f)| (vec![mu, nu], f.clone())),
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.components.values().map(MatrixField::max_abs).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CurvatureField) -> Result<f64> {
        if self.lattice != other.lattice || self.fiber_dim != other.fiber_dim {
            return Err(Error::Shape("curvature fields have different shapes".into()));
        }
        Ok(self
            .components
            .iter()
            .map(|(k, f)| f.max_abs_diff(&other.components[k]))
            .fold(0.0, f64::max))
    }
}

/// Component formula applied to `B` directly.
pub fn curvature_from_b(b: &ConnectionB) -> Result<CurvatureField> {
    let lat = b.lattice();
    let links = b.links();
    CurvatureField::build(lat, b.fiber_dim(), b.kind(), |mu, nu| {
        let bmu = b.component(mu)?;
        let bnu = b.component(nu)?;
        let linear = &bnu.difference(mu)? - &bmu.difference(nu)?;
        Ok(linear.map(|i, v| {
            let quad = links.at_index(i, mu) * links.at_index(lat.up(i, mu), nu)
                - links.at_index(i, nu) * links.at_index(lat.up(i, nu), mu);
            v + quad
        }))
    })
}

/// The two-form `d_D B + B ∧ B` assembled in the exterior algebra.
pub fn curvature_form(b: &ConnectionB) -> Result<DiscreteForm> {
    let bf = b.to_form()?;
    bf.exterior_derivative()?.add(&bf.wedge(&bf)?)
}

/// `G_μν(x) = U_μ(x) U_ν(x+μ̂) - U_ν(x) U_μ(x+ν̂)`.
pub fn curvature_from_u(u: &ConnectionU) -> Result<CurvatureField> {
    let lat = u.lattice();
    CurvatureField::build(lat, u.fiber_dim(), u.kind(), |mu, nu| {
        Ok(MatrixField::from_fn(lat, u.fiber_dim(), u.kind(), |s| {
            let i = lat.index(s).expect("site from lattice");
            u.link(i, mu) * u.link(lat.up(i, mu), nu) - u.link(i, nu) * u.link(lat.up(i, nu), mu)
        }))
    })
}

/// `F'_μν(x) = g(x) F_μν(x) g⁻¹(x + μ̂ + ν̂)`.
pub fn transform_curvature(f: &CurvatureField, g: &connection::GaugeTransform) -> Result<CurvatureField> {
    let lat = f.lattice();
    if g.lattice() != lat || g.fiber_dim() != f.fiber_dim() {
        return Err(Error::Shape("gauge transform does not match curvature".into()));
    }
    let kind = f.kind().join(g.g().kind());
    CurvatureField::build(lat, f.fiber_dim(), kind, |mu, nu| {
        let c = &f.components[&(mu, nu)];
        Ok(c.map(|i, v| g.g().at_index(i) * v * g.g_inv().at_index(lat.up_many(i, &[mu, nu]))))
    })
}

fn check_plane(lat: &Lattice, mu: usize, nu: usize) -> Result<()> {
    lat.check_dir(mu)?;
    lat.check_dir(nu)?;
    if mu == nu {
        return Err(Error::Unsupported("plaquette needs two distinct directions".into()));
    }
    Ok(())
}

fn plaquette_at(u: &ConnectionU, i: usize, mu: usize, nu: usize) -> Mat {
    let lat = u.lattice();
    u.link(i, mu)
        * u.link(lat.up(i, mu), nu)
        * u.inverse_link(lat.up(i, nu), mu)
        * u.inverse_link(i, nu)
}

/// `W_μν(x) = U_μ(x) U_ν(x+μ̂) U_μ(x+ν̂)⁻¹ U_ν(x)⁻¹`.
pub fn plaquette(u: &ConnectionU, x: &Site, mu: usize, nu: usize) -> Result<Mat> {
    check_plane(u.lattice(), mu, nu)?;
    let i = u.lattice().index(x)?;
    Ok(plaquette_at(u, i, mu, nu))
}

pub fn plaquette_field(u: &ConnectionU, mu: usize, nu: usize) -> Result<MatrixField> {
    check_plane(u.lattice(), mu, nu)?;
    let lat = u.lattice();
    Ok(MatrixField::from_fn(lat, u.fiber_dim(), u.kind(), |s| {
        plaquette_at(u, lat.index(s).expect("site from lattice"), mu, nu)
    }))
}

/// Result of a flatness check over every site and every plane.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatnessReport {
    pub flat: bool,
    pub tol: f64,
    /// `max ‖W_μν(x) - I‖_max`.
    pub plaquette_deviation: f64,
    /// `max ‖G_μν(x)‖_max`.
    pub commutator_deviation: f64,
    /// `m · max ‖U_ν(x) U_μ(x+ν̂)‖_max`; since `W - I = G (U_ν U_μ')⁻¹`,
    /// a plaquette deviation within `tol` bounds the commutator by
    /// `tol · commutator_scale`.
    pub commutator_scale: f64,
    /// `max ‖P(loop) - I‖_max` over path-ordered products of elementary loops.
    pub holonomy_deviation: f64,
    /// Site and plane of the largest plaquette deviation.
    pub worst: Option<(Site, usize, usize)>,
}

impl FlatnessReport {
    pub fn commutator_flat(&self) -> bool {
        self.commutator_deviation <= self.tol * self.commutator_scale
    }

    pub fn holonomy_flat(&self) -> bool {
        self.holonomy_deviation <= self.tol
    }
}

pub fn is_flat(u: &ConnectionU, tol: f64) -> Result<FlatnessReport> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::Unsupported(format!("tolerance must be non-negative, got {tol}")));
    }
    let lat = u.lattice();
    let m = u.fiber_dim();
    let id = linalg::identity(m);
    let g = curvature_from_u(u)?;
    let mut report = FlatnessReport {
        flat: true,
        tol,
        plaquette_deviation: 0.0,
        commutator_deviation: g.max_abs(),
        commutator_scale: 0.0,
        holonomy_deviation: 0.0,
        worst: None,
    };
    for mu in 0..lat.dim() {
        for nu in mu + 1..lat.dim() {
            for i in 0..lat.volume() {
                let w = plaquette_at(u, i, mu, nu);
                let dev = linalg::max_abs_diff(&w, &id);
                if dev > report.plaquette_deviation || report.worst.is_none() {
                    report.plaquette_deviation = report.plaquette_deviation.max(dev);
                    report.worst = Some((lat.site(i), mu, nu));
                }
                let back = u.link(i, nu) * u.link(lat.up(i, nu), mu);
                report.commutator_scale = report.commutator_scale.max(m as f64 * linalg::max_abs(&back));
                let loop_path = LatticePath::plaquette(lat.site(i), mu, nu);
                let hol = connection::path_ordered_product(&loop_path, u)?;
                report.holonomy_deviation = report.holonomy_deviation.max(linalg::max_abs_diff(&hol, &id));
            }
        }
    }
    report.flat = report.plaquette_deviation <= tol;
    Ok(report)
}

/// One increasing direction triple of the Bianchi check.
#[derive(Clone, Debug)]
pub struct BianchiComponent {
    pub dirs: [usize; 3],
    /// `ε^{λμν} Δ_λ F_μν(x)`.
    pub derivative: MatrixField,
    /// `ε^{λμν}[Δ_λ F_μν(x) - F_λμ(x) B_ν(x+μ̂+ν̂) + B_λ(x) F_μν(x+λ̂)]`
    /// with the shift on the middle term exactly as it is usually displayed.
    pub displayed: MatrixField,
    /// The same contraction with the middle shift `x+λ̂+μ̂` produced by the
    /// exterior algebra; equals twice the canonical form coefficient.
    pub expanded: MatrixField,
}

#[derive(Clone, Debug)]
pub struct BianchiReport {
    /// The three-form `d_D F - F ∧ B + B ∧ F`.
    pub residual: DiscreteForm,
    pub max_residual: f64,
    /// `1 + max |B|`, the reference magnitude for tolerances.
    pub scale: f64,
    pub components: Vec<BianchiComponent>,
}

fn permutations3(d: [usize; 3]) -> [([usize; 3], f64); 6] {
    let [a, b, c] = d;
    [
        ([a, b, c], 1.0),
        ([b, c, a], 1.0),
        ([c, a, b], 1.0),
        ([b, a, c], -1.0),
        ([a, c, b], -1.0),
        ([c, b, a], -1.0),
    ]
}

/// Covariant derivative of the curvature, `D_D F = d_D F - F ∧ B + B ∧ F`,
/// at form level plus its ε-contracted component expressions.
pub fn bianchi_residual(b: &ConnectionB) -> Result<BianchiReport> {
    let lat = b.lattice();
    if lat.dim() < 3 {
        return Err(Error::Dimension {
            required: 3,
            found: lat.dim(),
        });
    }
    let bf = b.to_form()?;
    let ff = curvature_form(b)?;
    let residual = ff
        .exterior_derivative()?
        .sub(&ff.wedge(&bf)?)?
        .add(&bf.wedge(&ff)?)?;

    let f = CurvatureField::from_form(&ff)?;
    let links = b.links();
    let (m, kind) = (b.fiber_dim(), b.kind());
    let mut components = Vec::new();
    for a in 0..lat.dim() {
        for bb in a + 1..lat.dim() {
            for c in bb + 1..lat.dim() {
                let mut derivative = MatrixField::zeros(lat, m, kind);
                let mut displayed = MatrixField::zeros(lat, m, kind);
                let mut expanded = MatrixField::zeros(lat, m, kind);
                for ([l, mu, nu], sign) in permutations3([a, bb, c]) {
                    let s = num_complex::Complex64::new(sign, 0.0);
                    let f_mn = f.component(mu, nu)?;
                    let f_lm = f.component(l, mu)?;
                    let d_term = f_mn.difference(l)?;
                    let right_shifted = |shift: [usize; 2]| {
                        f_lm.map(|i, v| v * links.at_index(lat.up_many(i, &shift), nu))
                    };
                    let left = f_mn.map(|i, _| links.at_index(i, l) * f_mn.at_index(lat.up(i, l)));
                    let disp = &(&d_term - &right_shifted([mu, nu])) + &left;
                    let expd = &(&d_term - &right_shifted([l, mu])) + &left;
                    derivative = &derivative + &d_term.scale(s);
                    displayed = &displayed + &disp.scale(s);
                    expanded = &expanded + &expd.scale(s);
                }
                components.push(BianchiComponent {
                    dirs: [a, bb, c],
                    derivative,
                    displayed,
                    expanded,
                });
            }
        }
    }
    Ok(BianchiReport {
        max_residual: residual.max_abs(),
        residual,
        scale: 1.0 + b.max_abs(),
        components,
    })
}

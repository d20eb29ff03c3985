//! Discrete Lax pairs on an open 2D grid.
//!
//! A [`LaxSystem`] holds link transports `U_x(m,n)` (for `m < M-1`) and
//! `U_t(m,n)` (for `n < N-1`) acting on row-vector wavefunctions by
//! `ψ(m+1,n) = ψ(m,n)·U_x(m,n)` and `ψ(m,n+1) = ψ(m,n)·U_t(m,n)`. The system
//! is consistent when every plaquette satisfies
//! `U_x(m,n) U_t(m+1,n) = U_t(m,n) U_x(m,n+1)`.

use std::collections::BTreeMap;

use crate::connection::LatticePath;
use crate::error::{Error, Result};
use crate::field::{MatrixField, ScalarKind};
use crate::lattice::{Lattice, Orientation, Site};
use crate::linalg::{self, Mat};

/// Direction index of `x` on the grid.
pub const X: usize = 0;
/// Direction index of `t` on the grid.
pub const T: usize = 1;

/// Largest `x + t` offset accepted by [`LaxSystem::path_independence`].
pub const MAX_PATH_OFFSET: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct LaxSystem {
    grid: Lattice,
    fiber_dim: usize,
    kind: ScalarKind,
    // indexed by x * N + t, x < M-1
    ux: Vec<Mat>,
    // indexed by x * (N-1) + t, t < N-1
    ut: Vec<Mat>,
}

impl LaxSystem {
    /// Builds a system on an `M × N` grid from `f(site, dir)`, called only
    /// for in-range links in site-major, direction-major order.
    pub fn from_fn(
        extents: [usize; 2],
        fiber_dim: usize,
        kind: ScalarKind,
        mut f: impl FnMut(&Site, usize) -> Mat,
    ) -> Result<Self> {
        let grid = Lattice::open(&extents)?;
        let links = in_range_links(&grid)
            .map(|(i, d)| f(&grid.site(i), d))
            .collect();
        Self::from_links(grid, fiber_dim, kind, links)
    }

    /// Builds a system from in-range links in site-major, direction-major
    /// order; `grid` must be a 2D lattice with open boundaries.
    pub fn from_links(grid: Lattice, fiber_dim: usize, kind: ScalarKind, links: Vec<Mat>) -> Result<Self> {
        if grid.dim() != 2 || grid.is_periodic() || grid.boundaries().iter().any(|b| *b != crate::Boundary::Open) {
            return Err(Error::InvalidLattice("a Lax system lives on a 2D grid with open boundaries".into()));
        }
        if fiber_dim == 0 {
            return Err(Error::Shape("fiber dimension must be positive".into()));
        }
        let expected = count_links(&grid);
        if links.len() != expected {
            return Err(Error::Truncated {
                expected,
                found: links.len(),
            });
        }
        let [mm, nn] = [grid.extents()[0], grid.extents()[1]];
        let mut ux = Vec::with_capacity((mm - 1) * nn);
        let mut ut = Vec::with_capacity(mm * (nn - 1));
        for ((i, d), v) in in_range_links(&grid).zip(links) {
            if v.nrows() != fiber_dim || v.ncols() != fiber_dim {
                return Err(Error::Shape(format!(
                    "link at {} direction {d} is {}x{}, expected {fiber_dim}x{fiber_dim}",
                    grid.site(i),
                    v.nrows(),
                    v.ncols()
                )));
            }
            if kind == ScalarKind::Real && !linalg::is_real(&v) {
                return Err(Error::Shape(format!("complex entry in real link at {}", grid.site(i))));
            }
            if !linalg::is_invertible(&v) {
                return Err(Error::Singular {
                    what: "Lax link",
                    site: grid.site(i).coords().to_vec(),
                    dir: Some(d),
                });
            }
            if d == X { ux.push(v) } else { ut.push(v) }
        }
        Ok(LaxSystem {
            grid,
            fiber_dim,
            kind,
            ux,
            ut,
        })
    }

    /// `U_x = h⁻¹(m,n) h(m+1,n)`, `U_t = h⁻¹(m,n) h(m,n+1)`; consistent by
    /// construction.
    pub fn pure_gauge(h: &MatrixField) -> Result<Self> {
        let grid = h.lattice().clone();
        let h_inv = h.inverse()?;
        let links = in_range_links(&grid)
            .map(|(i, d)| {
                let next = grid.shift_index(i, d, Orientation::Forward).expect("in-range link");
                h_inv.at_index(i) * h.at_index(next)
            })
            .collect();
        Self::from_links(grid, h.fiber_dim(), h.kind(), links)
    }

    pub fn identity(extents: [usize; 2], fiber_dim: usize, kind: ScalarKind) -> Result<Self> {
        Self::from_fn(extents, fiber_dim, kind, |_, _| linalg::identity(fiber_dim))
    }

    pub fn grid(&self) -> &Lattice {
        &self.grid
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn kind(&self) -> ScalarKind {
        self.kind
    }

    fn extents(&self) -> (usize, usize) {
        (self.grid.extents()[0], self.grid.extents()[1])
    }

    fn slot(&self, x: usize, t: usize, dir: usize) -> Option<usize> {
        let (mm, nn) = self.extents();
        match dir {
            X if x + 1 < mm && t < nn => Some(x * nn + t),
            T if x < mm && t + 1 < nn => Some(x * (nn - 1) + t),
            _ => None,
        }
    }

    /// Link leaving `site` in direction `dir`.
    pub fn link(&self, site: &Site, dir: usize) -> Result<&Mat> {
        self.grid.check_dir(dir)?;
        self.grid.index(site)?;
        let c = site.coords();
        match self.slot(c[0], c[1], dir) {
            Some(k) if dir == X => Ok(&self.ux[k]),
            Some(k) => Ok(&self.ut[k]),
            None => Err(Error::Boundary {
                axis: dir,
                coord: c.to_vec(),
            }),
        }
    }

    pub fn ux(&self, x: usize, t: usize) -> Result<&Mat> {
        self.link(&Site::new(vec![x, t]), X)
    }

    pub fn ut(&self, x: usize, t: usize) -> Result<&Mat> {
        self.link(&Site::new(vec![x, t]), T)
    }

    /// Replaces one link; the new matrix must be invertible.
    pub fn set_link(&mut self, site: &Site, dir: usize, value: Mat) -> Result<()> {
        self.link(site, dir)?;
        if value.nrows() != self.fiber_dim || value.ncols() != self.fiber_dim {
            return Err(Error::Shape("replacement link has the wrong size".into()));
        }
        if !linalg::is_invertible(&value) {
            return Err(Error::Singular {
                what: "Lax link",
                site: site.coords().to_vec(),
                dir: Some(dir),
            });
        }
        if !linalg::is_real(&value) {
            self.kind = ScalarKind::Complex;
        }
        let c = site.coords();
        let k = self.slot(c[0], c[1], dir).expect("checked above");
        if dir == X {
            self.ux[k] = value;
        } else {
            self.ut[k] = value;
        }
        Ok(())
    }

    /// In-range links in site-major, direction-major order.
    pub fn links(&self) -> Vec<&Mat> {
        in_range_links(&self.grid)
            .map(|(i, d)| {
                let c = self.grid.site(i);
                let k = self.slot(c.coords()[0], c.coords()[1], d).expect("in range");
                if d == X { &self.ux[k] } else { &self.ut[k] }
            })
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.ux.iter().chain(&self.ut).map(linalg::max_abs).fold(0.0, f64::max)
    }

    /// Residuals of the plaquette with lower-left corner `(x, t)`.
    pub fn plaquette_residual(&self, x: usize, t: usize) -> Result<PlaquetteResidual> {
        let (mm, nn) = self.extents();
        if x + 1 >= mm || t + 1 >= nn {
            return Err(Error::Boundary {
                axis: if x + 1 >= mm { X } else { T },
                coord: vec![x, t],
            });
        }
        let ux = self.ux(x, t)?;
        let ut = self.ut(x, t)?;
        let ut_next = self.ut(x + 1, t)?;
        let ux_next = self.ux(x, t + 1)?;
        let additive = ux * ut_next - ut * ux_next;
        let multiplicative = ux
            * ut_next
            * linalg::inverse(ux_next).expect("links are invertible")
            * linalg::inverse(ut).expect("links are invertible")
            - linalg::identity(self.fiber_dim);

        let id = linalg::identity(self.fiber_dim);
        let (ax, at) = (ux - &id, ut - &id);
        let (at_next, ax_next) = (ut_next - &id, ux_next - &id);
        let a_form = (&at_next - &at) - (&ax_next - &ax) + &ax * &at_next - &at * &ax_next;
        Ok(PlaquetteResidual {
            site: Site::new(vec![x, t]),
            additive,
            multiplicative,
            a_form,
        })
    }

    /// Residuals of every plaquette of the grid.
    pub fn consistency_residual(&self) -> Result<ConsistencyReport> {
        let (mm, nn) = self.extents();
        let mut report = ConsistencyReport {
            plaquettes: Vec::with_capacity(mm.saturating_sub(1) * nn.saturating_sub(1)),
            max_additive: 0.0,
            max_multiplicative: 0.0,
            max_a_form: 0.0,
            max_a_form_vs_additive: 0.0,
        };
        for x in 0..mm.saturating_sub(1) {
            for t in 0..nn.saturating_sub(1) {
                let p = self.plaquette_residual(x, t)?;
                report.max_additive = report.max_additive.max(linalg::max_abs(&p.additive));
                report.max_multiplicative = report.max_multiplicative.max(linalg::max_abs(&p.multiplicative));
                report.max_a_form = report.max_a_form.max(linalg::max_abs(&p.a_form));
                report.max_a_form_vs_additive = report
                    .max_a_form_vs_additive
                    .max(linalg::max_abs_diff(&p.a_form, &p.additive));
                report.plaquettes.push(p);
            }
        }
        Ok(report)
    }

    fn check_row_vector(&self, psi: &Mat) -> Result<()> {
        if psi.ncols() != self.fiber_dim {
            return Err(Error::Shape(format!(
                "wavefunction has {} columns, fiber dimension is {}",
                psi.ncols(),
                self.fiber_dim
            )));
        }
        Ok(())
    }

    /// Wavefunction values along a path of forward steps starting from
    /// `psi0` at the path's base.
    pub fn wavefunction(&self, psi0: &Mat, path: &LatticePath) -> Result<WaveFunction> {
        self.check_row_vector(psi0)?;
        if let Some(k) = path.steps.iter().position(|s| s.orientation != Orientation::Forward) {
            return Err(Error::InvalidPath(format!("step {k} is not a forward step")));
        }
        let visited = path.visit(&self.grid)?;
        let mut values = BTreeMap::new();
        let mut psi = psi0.clone();
        values.insert(path.base.clone(), psi.clone());
        for (step, &i) in path.steps.iter().zip(&visited) {
            psi = &psi * self.link(&self.grid.site(i), step.dir)?;
            let next = self.grid.shift_index(i, step.dir, Orientation::Forward)?;
            values.insert(self.grid.site(next), psi.clone());
        }
        Ok(WaveFunction { values })
    }

    /// `ψ` at the end of `path`, folding `ψ ← ψ·U_x` or `ψ ← ψ·U_t` per step.
    pub fn propagate(&self, psi0: &Mat, path: &LatticePath) -> Result<Mat> {
        let end = path.end(&self.grid)?;
        let wf = self.wavefunction(psi0, path)?;
        Ok(wf.values[&end].clone())
    }

    /// Propagates `psi0` from the origin to `target` along every monotone
    /// staircase path and reports the largest pairwise distance between the
    /// results, entrywise in modulus.
    pub fn path_independence(&self, psi0: &Mat, target: &Site) -> Result<PathIndependence> {
        self.check_row_vector(psi0)?;
        self.grid
            .index(target)
            .map_err(|e| Error::InvalidPath(format!("target {target} is not on the grid: {e}")))?;
        let (tx, tt) = (target.coords()[0], target.coords()[1]);
        if tx + tt > MAX_PATH_OFFSET {
            return Err(Error::Unsupported(format!(
                "target {target} needs x + t <= {MAX_PATH_OFFSET} to keep the path count small"
            )));
        }
        let mut results = Vec::new();
        self.staircase(psi0.clone(), 0, 0, tx, tt, &mut results);
        let max_deviation = (0..psi0.len())
            .map(|e| diameter(&results.iter().map(|r| r[e]).collect::<Vec<_>>()))
            .fold(0.0, f64::max);
        Ok(PathIndependence {
            paths: results.len(),
            max_deviation,
            result: results.swap_remove(0),
        })
    }

    fn staircase(&self, psi: Mat, x: usize, t: usize, tx: usize, tt: usize, out: &mut Vec<Mat>) {
        if x == tx && t == tt {
            out.push(psi);
            return;
        }
        if x < tx {
            let next = &psi * &self.ux[self.slot(x, t, X).expect("inside target rectangle")];
            self.staircase(next, x + 1, t, tx, tt, out);
        }
        if t < tt {
            let next = &psi * &self.ut[self.slot(x, t, T).expect("inside target rectangle")];
            self.staircase(next, x, t + 1, tx, tt, out);
        }
    }
}

fn in_range_links(grid: &Lattice) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..grid.volume()).flat_map(move |i| {
        (0..2).filter_map(move |d| grid.shift_index(i, d, Orientation::Forward).ok().map(|_| (i, d)))
    })
}

fn count_links(grid: &Lattice) -> usize {
    in_range_links(grid).count()
}

/// Number of in-range links on an open `M × N` grid.
pub fn link_count(extents: [usize; 2]) -> usize {
    (extents[0] - 1) * extents[1] + extents[0] * (extents[1] - 1)
}

/// Largest distance between any two points.
fn diameter(points: &[num_complex::Complex64]) -> f64 {
    let hull = convex_hull(points);
    let mut best = 0.0f64;
    for i in 0..hull.len() {
        for j in i + 1..hull.len() {
            best = best.max((hull[i] - hull[j]).norm());
        }
    }
    best
}

/// Andrew's monotone chain; the diameter of a point set is attained between
/// two hull vertices.
fn convex_hull(points: &[num_complex::Complex64]) -> Vec<num_complex::Complex64> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: num_complex::Complex64, a: num_complex::Complex64, b: num_complex::Complex64| {
        (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
    };
    let mut hull: Vec<num_complex::Complex64> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &num_complex::Complex64>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlaquetteResidual {
    /// Lower-left corner `(x, t)`.
    pub site: Site,
    /// `U_x(m,n) U_t(m+1,n) - U_t(m,n) U_x(m,n+1)`.
    pub additive: Mat,
    /// `U_x(m,n) U_t(m+1,n) U_x(m,n+1)⁻¹ U_t(m,n)⁻¹ - I`.
    pub multiplicative: Mat,
    /// `Δ_x A_t - Δ_t A_x + A_x(m,n) A_t(m+1,n) - A_t(m,n) A_x(m,n+1)` with
    /// `A = U - I`.
    pub a_form: Mat,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConsistencyReport {
    /// Ordered by `x`, then `t`.
    pub plaquettes: Vec<PlaquetteResidual>,
    pub max_additive: f64,
    pub max_multiplicative: f64,
    pub max_a_form: f64,
    pub max_a_form_vs_additive: f64,
}

/// Row-vector values on the sites reached by propagation.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveFunction {
    pub values: BTreeMap<Site, Mat>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathIndependence {
    pub paths: usize,
    pub max_deviation: f64,
    /// Value reached along the path that takes every `x` step first.
    pub result: Mat,
}

//! Continuum-limit comparison of plaquettes with a smooth U(1) field strength
//! on the unit 2-torus.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::connection::ConnectionU;
use crate::curvature::{plaquette_at, topology::principal_arg};
use crate::error::{Error, Result};
use crate::field::{LinkField, ScalarKind};
use crate::lattice::Lattice;
use crate::linalg;

/// A smooth real U(1) potential on the unit torus `[0,1)²`.
pub trait TorusPotential {
    /// `A_μ(p)`.
    fn component(&self, dir: usize, p: [f64; 2]) -> f64;

    /// `F_01(p) = ∂_0 A_1 - ∂_1 A_0`.
    fn field_strength(&self, p: [f64; 2]) -> f64;

    /// Extra phase on the link in direction `dir` leaving `p` when that link
    /// wraps around the torus; nonzero only for potentials that are periodic
    /// up to a gauge transformation.
    fn seam_phase(&self, _dir: usize, _p: [f64; 2]) -> f64 {
        0.0
    }
}

/// `A = 0`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroPotential;

impl TorusPotential for ZeroPotential {
    fn component(&self, _dir: usize, _p: [f64; 2]) -> f64 {
        0.0
    }

    fn field_strength(&self, _p: [f64; 2]) -> f64 {
        0.0
    }
}

/// Uniform field `F_01 = 2π q` from `A_0 = 0`, `A_1 = 2π q p_0`, glued across
/// `p_0 = 1` by the transition phase `-2π q p_1`.
#[derive(Clone, Copy, Debug)]
pub struct UniformField {
    pub flux_quanta: i32,
}

impl TorusPotential for UniformField {
    fn component(&self, dir: usize, p: [f64; 2]) -> f64 {
        if dir == 1 {
            2.0 * PI * self.flux_quanta as f64 * p[0]
        } else {
            0.0
        }
    }

    fn field_strength(&self, _p: [f64; 2]) -> f64 {
        2.0 * PI * self.flux_quanta as f64
    }

    fn seam_phase(&self, dir: usize, p: [f64; 2]) -> f64 {
        if dir == 0 {
            -2.0 * PI * self.flux_quanta as f64 * p[1]
        } else {
            0.0
        }
    }
}

/// A periodic trigonometric potential with nonconstant field strength:
/// `A_0 = s(0.3 sin 2πp_1 + 0.1 cos 2π(p_0+p_1))`,
/// `A_1 = s(0.5 cos 2πp_0 + 0.2 sin 2π(p_0-p_1))`.
#[derive(Clone, Copy, Debug)]
pub struct TrigPotential {
    pub scale: f64,
}

impl Default for TrigPotential {
    fn default() -> Self {
        TrigPotential { scale: 1.0 }
    }
}

impl TorusPotential for TrigPotential {
    fn component(&self, dir: usize, p: [f64; 2]) -> f64 {
        let t = 2.0 * PI;
        let v = if dir == 0 {
            0.3 * (t * p[1]).sin() + 0.1 * (t * (p[0] + p[1])).cos()
        } else {
            0.5 * (t * p[0]).cos() + 0.2 * (t * (p[0] - p[1])).sin()
        };
        self.scale * v
    }

    fn field_strength(&self, p: [f64; 2]) -> f64 {
        let t = 2.0 * PI;
        let d0_a1 = -0.5 * t * (t * p[0]).sin() + 0.2 * t * (t * (p[0] - p[1])).cos();
        let d1_a0 = 0.3 * t * (t * p[1]).cos() - 0.1 * t * (t * (p[0] + p[1])).sin();
        self.scale * (d0_a1 - d1_a0)
    }
}

/// Link variables `U_μ(n) = exp(i[a A_μ(p + a μ̂/2) + seam])` with `p = n a`
/// on an `L × L` torus with spacing `a = 1/L`.
pub fn discretize(potential: &dyn TorusPotential, l: usize) -> Result<ConnectionU> {
    if l < 2 {
        return Err(Error::InvalidLattice(format!("continuum scan needs L >= 2, got {l}")));
    }
    let lat = Lattice::periodic(&[l, l])?;
    let a = 1.0 / l as f64;
    let links = LinkField::from_fn(&lat, 1, ScalarKind::Complex, |s, d| {
        let n = s.coords();
        let p = [n[0] as f64 * a, n[1] as f64 * a];
        let mut mid = p;
        mid[d] += 0.5 * a;
        let mut phase = a * potential.component(d, mid);
        if n[d] == l - 1 {
            phase += potential.seam_phase(d, p);
        }
        linalg::scalar(Complex64::from_polar(1.0, phase))
    });
    ConnectionU::new(links)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub l: usize,
    pub a: f64,
    /// `max |Im W / a² - F(center)|`.
    pub im_error: f64,
    /// `max |Re(1 - W) / a⁴ - F(center)² / 2|`.
    pub re_error: f64,
    /// `max |arg W / a² - F(center)|`.
    pub phase_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuumScan {
    pub rows: Vec<ScanRow>,
    /// Least-squares slope of `ln(im_error)` against `ln(a)`; `None` when
    /// fewer than two rows have a nonzero error.
    pub im_slope: Option<f64>,
    pub re_slope: Option<f64>,
    pub phase_slope: Option<f64>,
}

pub fn continuum_scan(potential: &dyn TorusPotential, ls: &[usize]) -> Result<ContinuumScan> {
    if ls.is_empty() {
        return Err(Error::Unsupported("continuum scan needs at least one L".into()));
    }
    let mut rows = Vec::with_capacity(ls.len());
    for &l in ls {
        let u = discretize(potential, l)?;
        let lat = u.lattice();
        let a = 1.0 / l as f64;
        let mut row = ScanRow {
            l,
            a,
            im_error: 0.0,
            re_error: 0.0,
            phase_error: 0.0,
        };
        for i in 0..lat.volume() {
            let w = plaquette_at(&u, i, 0, 1)[(0, 0)];
            let center = [
                (lat.coord(i, 0) as f64 + 0.5) * a,
                (lat.coord(i, 1) as f64 + 0.5) * a,
            ];
            let f = potential.field_strength(center);
            row.im_error = row.im_error.max((w.im / (a * a) - f).abs());
            row.re_error = row.re_error.max(((1.0 - w.re) / a.powi(4) - 0.5 * f * f).abs());
            row.phase_error = row.phase_error.max((principal_arg(w) / (a * a) - f).abs());
        }
        rows.push(row);
    }
    let slope = |pick: fn(&ScanRow) -> f64| {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| pick(r) > 0.0)
            .map(|r| (r.a.ln(), pick(r).ln()))
            .collect();
        least_squares_slope(&pts)
    };
    Ok(ContinuumScan {
        im_slope: slope(|r| r.im_error),
        re_slope: slope(|r| r.re_error),
        phase_slope: slope(|r| r.phase_error),
        rows,
    })
}

fn least_squares_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

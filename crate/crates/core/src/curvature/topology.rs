//! Chern densities and the U(1) topological charge.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::connection::ConnectionU;
use crate::curvature::{plaquette_at, CurvatureField};
use crate::error::{Error, Result};
use crate::field::MatrixField;
use crate::lattice::Site;

/// Largest `| |U| - 1 |` accepted as a unit-modulus link.
pub const UNIMODULAR_TOL: f64 = 1e-10;

/// `c_k(x) = Σ_σ sgn(σ) F_{σ1σ2}(x) F_{σ3σ4}(x+σ̂1+σ̂2) ⋯` over the first `2k`
/// directions, with `ε^{01…} = +1` and no `1/k!` normalisation.
pub fn chern_density(f: &CurvatureField, k: usize, x: &Site) -> Result<Complex64> {
    let dirs: Vec<usize> = (0..2 * k).collect();
    check_chern(f, k, &dirs)?;
    chern_density_in(f, &dirs, x)
}

/// [`chern_density`] restricted to an explicit ordered list of `2k` distinct
/// directions; the sign convention is `ε^{dirs[0] dirs[1] …} = +1`.
pub fn chern_density_in(f: &CurvatureField, dirs: &[usize], x: &Site) -> Result<Complex64> {
    if dirs.is_empty() || !dirs.len().is_multiple_of(2) {
        return Err(Error::Unsupported(format!(
            "chern density needs an even, nonzero number of directions, got {}",
            dirs.len()
        )));
    }
    let k = dirs.len() / 2;
    check_chern(f, k, dirs)?;
    let lat = f.lattice();
    let start = lat.index(x)?;
    let comps: Vec<Vec<MatrixField>> = dirs
        .iter()
        .map(|&a| dirs.iter().map(|&b| f.component(a, b)).collect::<Result<_>>())
        .collect::<Result<_>>()?;

    // Each permutation is a sequence of k ordered pairs; the summand is
    // antisymmetric within a pair, so summing increasing pairs and doubling
    // per factor reproduces the full sum.
    let mut total = Complex64::new(0.0, 0.0);
    let mut used = vec![false; dirs.len()];
    let mut order = Vec::with_capacity(dirs.len());
    pair_sequences(&mut used, &mut order, &mut |seq| {
        let sign = permutation_sign(seq);
        let mut idx = start;
        let mut prod = Complex64::new(1.0, 0.0);
        for pair in seq.chunks(2) {
            let (a, b) = (pair[0], pair[1]);
            prod *= comps[a][b].at_index(idx)[(0, 0)];
            idx = lat.up_many(idx, &[dirs[a], dirs[b]]);
        }
        total += prod * sign;
    });
    Ok(total * (1u64 << k) as f64)
}

/// [`chern_density`] at every site.
pub fn chern_density_field(f: &CurvatureField, k: usize) -> Result<Vec<Complex64>> {
    f.lattice().sites().map(|x| chern_density(f, k, &x)).collect()
}

fn check_chern(f: &CurvatureField, k: usize, dirs: &[usize]) -> Result<()> {
    if f.fiber_dim() != 1 {
        return Err(Error::Unsupported(format!(
            "chern density is defined for fiber dimension 1, got {}",
            f.fiber_dim()
        )));
    }
    if k == 0 {
        return Err(Error::Unsupported("chern density needs k >= 1".into()));
    }
    if f.lattice().dim() < 2 * k {
        return Err(Error::Dimension {
            required: 2 * k,
            found: f.lattice().dim(),
        });
    }
    for (i, &d) in dirs.iter().enumerate() {
        f.lattice().check_dir(d)?;
        if dirs[..i].contains(&d) {
            return Err(Error::Unsupported(format!("direction {d} repeated")));
        }
    }
    Ok(())
}

/// Visits every ordering of `0..n` into consecutive pairs `(a < b)`.
fn pair_sequences(used: &mut [bool], order: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    if order.len() == used.len() {
        visit(order);
        return;
    }
    for a in 0..used.len() {
        if used[a] {
            continue;
        }
        for b in a + 1..used.len() {
            if used[b] {
                continue;
            }
            used[a] = true;
            used[b] = true;
            order.push(a);
            order.push(b);
            pair_sequences(used, order, visit);
            order.truncate(order.len() - 2);
            used[a] = false;
            used[b] = false;
        }
    }
}

fn permutation_sign(p: &[usize]) -> f64 {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChargeReport {
    /// Nearest integer to `raw`.
    pub charge: i64,
    /// `(1/2π) Σ_x arg W_μν(x)` over the plane.
    pub raw: f64,
    /// `|raw - charge|`.
    pub residual: f64,
    pub plaquettes: usize,
}

/// `Q = (1/2π) Σ_x arg W_μν(x)` over the `μν` plane through `base`, with
/// `arg ∈ (-π, π]`. Links must be unit-modulus scalars.
pub fn topological_charge_u1(u: &ConnectionU, mu: usize, nu: usize, base: &Site) -> Result<ChargeReport> {
    let lat = u.lattice();
    if u.fiber_dim() != 1 {
        return Err(Error::Unsupported(format!(
            "topological charge needs fiber dimension 1, got {}",
            u.fiber_dim()
        )));
    }
    super::check_plane(lat, mu, nu)?;
    let base_idx = lat.index(base)?;
    for i in 0..lat.volume() {
        for d in 0..lat.dim() {
            let modulus = u.link(i, d)[(0, 0)].norm();
            if (modulus - 1.0).abs() > UNIMODULAR_TOL {
                return Err(Error::NotUnimodular {
                    site: lat.site(i).coords().to_vec(),
                    dir: d,
                    modulus,
                });
            }
        }
    }
    let mut sum = 0.0;
    let mut plaquettes = 0;
    let mut row = base_idx;
    for _ in 0..lat.extents()[mu] {
        let mut i = row;
        for _ in 0..lat.extents()[nu] {
            sum += principal_arg(plaquette_at(u, i, mu, nu)[(0, 0)]);
            plaquettes += 1;
            i = lat.up(i, nu);
        }
        row = lat.up(row, mu);
    }
    let raw = sum / (2.0 * PI);
    let charge = raw.round() as i64;
    Ok(ChargeReport {
        charge,
        raw,
        residual: (raw - charge as f64).abs(),
        plaquettes,
    })
}

/// Argument in `(-π, π]`.
pub(crate) fn principal_arg(z: Complex64) -> f64 {
    let a = z.arg();
    if a <= -PI {
        a + 2.0 * PI
    } else {
        a
    }
}

//! Brute-force oracles shared by the integration tests. They work from site
//! coordinates and explicit index sums only, never from library shortcuts.

#![allow(dead_code)]

use ddgeom::field::{LinkField, MatrixField, ScalarKind};
use ddgeom::forms::DiscreteForm;
use ddgeom::random;
use ddgeom::{linalg, Lattice, Mat, Site};
use rand::Rng;

/// `x + Σ ê_d` computed with modular coordinate arithmetic.
pub fn shifted(lat: &Lattice, x: &Site, dirs: &[usize]) -> Site {
    let mut c = x.coords().to_vec();
    for &d in dirs {
        c[d] = (c[d] + 1) % lat.extents()[d];
    }
    Site::new(c)
}

/// All strictly increasing `k`-subsets of `0..n`.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize == k {
            out.push((0..n).filter(|i| mask & (1 << i) != 0).collect());
        }
    }
    out.sort();
    out
}

/// Sign of the permutation sorting `seq` (which must be repetition free),
/// by counting transpositions in a selection sort.
pub fn sort_sign(seq: &[usize]) -> f64 {
    let mut v = seq.to_vec();
    let mut sign = 1.0;
    for i in 0..v.len() {
        let j = (i..v.len()).min_by_key(|&j| v[j]).unwrap();
        if j != i {
            v.swap(i, j);
            sign = -sign;
        }
    }
    sign
}

/// All permutations of `items`.
pub fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

pub fn kind_of(complex: bool) -> ScalarKind {
    if complex {
        ScalarKind::Complex
    } else {
        ScalarKind::Real
    }
}

pub fn random_site_field(rng: &mut impl Rng, lat: &Lattice, m: usize, kind: ScalarKind) -> MatrixField {
    random::uniform_site_field(rng, lat, m, kind)
}

/// A random degree-`p` form with every canonical coefficient populated.
pub fn random_form(rng: &mut impl Rng, lat: &Lattice, m: usize, kind: ScalarKind, p: usize) -> DiscreteForm {
    let terms: Vec<(Vec<usize>, MatrixField)> = subsets(lat.dim(), p)
        .into_iter()
        .map(|idx| (idx, random_site_field(rng, lat, m, kind)))
        .collect();
    DiscreteForm::from_terms(lat, m, kind, p, terms).unwrap()
}

fn coeff_at(form: &DiscreteForm, idx: &[usize], x: &Site) -> Mat {
    let m = form.fiber_dim();
    form.terms()
        .find(|(k, _)| k.as_slice() == idx)
        .map(|(_, f)| f.at(x).unwrap().clone())
        .unwrap_or_else(|| linalg::zeros(m))
}

/// `(α ∧ β)_K(x) = Σ_{I ⊔ J = K} sgn(I J → K) α_I(x) β_J(x + Σ_{i∈I} ê_i)`.
pub fn wedge_oracle(a: &DiscreteForm, b: &DiscreteForm, k: &[usize], x: &Site) -> Mat {
    let lat = a.lattice();
    let m = a.fiber_dim();
    let mut acc = linalg::zeros(m);
    if k.len() != a.degree() + b.degree() {
        return acc;
    }
    for i in subsets(k.len(), a.degree()) {
        let ii: Vec<usize> = i.iter().map(|&p| k[p]).collect();
        let jj: Vec<usize> = k.iter().copied().filter(|d| !ii.contains(d)).collect();
        let mut cat = ii.clone();
        cat.extend(&jj);
        let sign = sort_sign(&cat);
        let term = coeff_at(a, &ii, x) * coeff_at(b, &jj, &shifted(lat, x, &ii));
        acc += term * ddgeom::Scalar::new(sign, 0.0);
    }
    acc
}

/// `(dα)_K(x) = Σ_{p} (-1)^p [α_{K∖k_p}(x + ê_{k_p}) - α_{K∖k_p}(x)]`.
pub fn d_oracle(a: &DiscreteForm, k: &[usize], x: &Site) -> Mat {
    let lat = a.lattice();
    let mut acc = linalg::zeros(a.fiber_dim());
    for (p, &dir) in k.iter().enumerate() {
        let rest: Vec<usize> = k.iter().copied().filter(|&d| d != dir).collect();
        let diff = coeff_at(a, &rest, &shifted(lat, x, &[dir])) - coeff_at(a, &rest, x);
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        acc += diff * ddgeom::Scalar::new(sign, 0.0);
    }
    acc
}

/// Largest entry difference between a form and an oracle over every site and
/// canonical index of the form's degree.
pub fn max_diff_vs_oracle(form: &DiscreteForm, oracle: impl Fn(&[usize], &Site) -> Mat) -> f64 {
    let lat = form.lattice();
    let mut worst = 0.0f64;
    if form.degree() > lat.dim() {
        return form.max_abs();
    }
    for k in subsets(lat.dim(), form.degree()) {
        for x in lat.sites() {
            worst = worst.max(linalg::max_abs_diff(&coeff_at(form, &k, &x), &oracle(&k, &x)));
        }
    }
    worst
}

/// `U_μ(x) U_ν(x+μ̂) - U_ν(x) U_μ(x+ν̂)` from coordinates.
pub fn commutator_oracle(u: &LinkField, x: &Site, mu: usize, nu: usize) -> Mat {
    let lat = u.lattice();
    u.at(x, mu).unwrap() * u.at(&shifted(lat, x, &[mu]), nu).unwrap()
        - u.at(x, nu).unwrap() * u.at(&shifted(lat, x, &[nu]), mu).unwrap()
}

/// Draws a random periodic lattice with `dim` axes and extents in `lo..=hi`.
pub fn random_lattice(rng: &mut impl Rng, dim: usize, lo: usize, hi: usize) -> Lattice {
    let extents: Vec<usize> = (0..dim).map(|_| rng.random_range(lo..=hi)).collect();
    Lattice::periodic(&extents).unwrap()
}

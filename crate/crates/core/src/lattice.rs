//! Hypercubic lattice geometry with unit spacing.
//!
//! Sites are numbered lexicographically with the last coordinate running
//! fastest. Forward and backward neighbour tables are built once at
//! construction so that shifts are table lookups.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Boundary {
    Periodic,
    Open,
}

/// Direction of a single lattice step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Forward,
    Backward,
}

impl Orientation {
    pub fn reversed(self) -> Self {
        match self {
            Orientation::Forward => Orientation::Backward,
            Orientation::Backward => Orientation::Forward,
        }
    }

    pub fn sign(self) -> isize {
        match self {
            Orientation::Forward => 1,
            Orientation::Backward => -1,
        }
    }
}

/// One unit step `±μ̂` along lattice direction `dir` (zero based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Step {
    pub dir: usize,
    pub orientation: Orientation,
}

impl Step {
    pub fn forward(dir: usize) -> Self {
        Step {
            dir,
            orientation: Orientation::Forward,
        }
    }

    pub fn backward(dir: usize) -> Self {
        Step {
            dir,
            orientation: Orientation::Backward,
        }
    }

    pub fn reversed(self) -> Self {
        Step {
            dir: self.dir,
            orientation: self.orientation.reversed(),
        }
    }
}

/// Lattice coordinates, always reduced into `0..extent` on every axis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site(Vec<usize>);

impl Site {
    pub fn new(coords: Vec<usize>) -> Self {
        Site(coords)
    }

    pub fn origin(dim: usize) -> Self {
        Site(vec![0; dim])
    }

    pub fn coords(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl From<Vec<usize>> for Site {
    fn from(coords: Vec<usize>) -> Self {
        Site(coords)
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

const NO_NEIGHBOR: usize = usize::MAX;

#[derive(Clone, Debug)]
pub struct Lattice {
    extents: Vec<usize>,
    boundary: Vec<Boundary>,
    strides: Vec<usize>,
    volume: usize,
    // layout: [site * dim + dir]
    fwd: Vec<usize>,
    bwd: Vec<usize>,
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.extents == other.extents && self.boundary == other.boundary
    }
}

impl Eq for Lattice {}

impl Lattice {
    pub fn new(extents: Vec<usize>, boundary: Vec<Boundary>) -> Result<Self> {
        if extents.is_empty() {
            return Err(Error::InvalidLattice("dimension must be at least 1".into()));
        }
        if extents.len() != boundary.len() {
            return Err(Error::InvalidLattice(format!(
                "{} extents but {} boundary flags",
                extents.len(),
                boundary.len()
            )));
        }
        if let Some(axis) = extents.iter().position(|&l| l == 0) {
            return Err(Error::InvalidLattice(format!("extent of axis {axis} is zero")));
        }
        let volume = extents
            .iter()
            .try_fold(1usize, |acc, &l| acc.checked_mul(l))
            .ok_or_else(|| Error::InvalidLattice("volume overflows".into()))?;

        let dim = extents.len();
        let mut strides = vec![1usize; dim];
        for d in (0..dim - 1).rev() {
            strides[d] = strides[d + 1] * extents[d + 1];
        }

        let mut fwd = vec![NO_NEIGHBOR; volume * dim];
        let mut bwd = vec![NO_NEIGHBOR; volume * dim];
        for idx in 0..volume {
            for d in 0..dim {
                let c = (idx / strides[d]) % extents[d];
                let l = extents[d];
                let up = if c + 1 < l {
                    Some(idx + strides[d])
                } else if boundary[d] == Boundary::Periodic {
                    Some(idx + strides[d] - l * strides[d])
                } else {
                    None
                };
                let down = if c > 0 {
                    Some(idx - strides[d])
                } else if boundary[d] == Boundary::Periodic {
                    Some(idx + (l - 1) * strides[d])
                } else {
                    None
                };
                fwd[idx * dim + d] = up.unwrap_or(NO_NEIGHBOR);
                bwd[idx * dim + d] = down.unwrap_or(NO_NEIGHBOR);
            }
        }

        Ok(Lattice {
            extents,
            boundary,
            strides,
            volume,
            fwd,
            bwd,
        })
    }

    pub fn periodic(extents: &[usize]) -> Result<Self> {
        Self::new(extents.to_vec(), vec![Boundary::Periodic; extents.len()])
    }

    pub fn open(extents: &[usize]) -> Result<Self> {
        Self::new(extents.to_vec(), vec![Boundary::Open; extents.len()])
    }

    pub fn dim(&self) -> usize {
        self.extents.len()
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn boundaries(&self) -> &[Boundary] {
        &self.boundary
    }

    pub fn volume(&self) -> usize {
        self.volume
    }

    pub fn num_links(&self) -> usize {
        self.volume * self.dim()
    }

    pub fn is_periodic(&self) -> bool {
        self.boundary.iter().all(|&b| b == Boundary::Periodic)
    }

    pub fn require_periodic(&self) -> Result<()> {
        if self.is_periodic() {
            Ok(())
        } else {
            Err(Error::NotPeriodic)
        }
    }

    pub fn check_dir(&self, dir: usize) -> Result<()> {
        if dir < self.dim() {
            Ok(())
        } else {
            Err(Error::Direction {
                dir,
                dim: self.dim(),
            })
        }
    }

    pub fn index(&self, site: &Site) -> Result<usize> {
        if site.dim() != self.dim() {
            return Err(Error::Shape(format!(
                "site {site} has {} coordinates, lattice has dimension {}",
                site.dim(),
                self.dim()
            )));
        }
        let mut idx = 0;
        for (d, (&c, &l)) in site.coords().iter().zip(&self.extents).enumerate() {
            if c >= l {
                return Err(Error::Shape(format!(
                    "coordinate {c} on axis {d} outside extent {l}"
                )));
            }
            idx += c * self.strides[d];
        }
        Ok(idx)
    }

    pub fn site(&self, idx: usize) -> Site {
        assert!(idx < self.volume, "site index {idx} out of range");
        Site(
            self.strides
                .iter()
                .zip(&self.extents)
                .map(|(&s, &l)| (idx / s) % l)
                .collect(),
        )
    }

    pub fn coord(&self, idx: usize, axis: usize) -> usize {
        (idx / self.strides[axis]) % self.extents[axis]
    }

    /// All sites in lexicographic order.
    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (0..self.volume).map(move |i| self.site(i))
    }

    /// Flat-index shift `x ± μ̂`.
    pub fn shift_index(&self, idx: usize, dir: usize, orientation: Orientation) -> Result<usize> {
        self.check_dir(dir)?;
        let table = match orientation {
            Orientation::Forward => &self.fwd,
            Orientation::Backward => &self.bwd,
        };
        let next = table[idx * self.dim() + dir];
        if next == NO_NEIGHBOR {
            Err(Error::Boundary {
                axis: dir,
                coord: self.site(idx).0,
            })
        } else {
            Ok(next)
        }
    }

    /// Unchecked forward neighbour on a periodic lattice.
    #[inline]
    pub(crate) fn up(&self, idx: usize, dir: usize) -> usize {
        self.fwd[idx * self.dim() + dir]
    }

    #[inline]
    pub(crate) fn down(&self, idx: usize, dir: usize) -> usize {
        self.bwd[idx * self.dim() + dir]
    }

    /// Forward neighbour after one unit step along each listed direction.
    pub(crate) fn up_many(&self, mut idx: usize, dirs: &[usize]) -> usize {
        for &d in dirs {
            idx = self.up(idx, d);
        }
        idx
    }

    pub fn shift_site(&self, site: &Site, dir: usize, orientation: Orientation) -> Result<Site> {
        let idx = self.index(site)?;
        Ok(self.site(self.shift_index(idx, dir, orientation)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_wrap_forward() {
        let lat = Lattice::periodic(&[4]).unwrap();
        let x = Site::new(vec![3]);
        assert_eq!(
            lat.shift_site(&x, 0, Orientation::Forward).unwrap(),
            Site::new(vec![0])
        );
    }

    #[test]
    fn open_axis_rejects_leaving_step() {
        let lat = Lattice::open(&[3, 3]).unwrap();
        let x = Site::new(vec![2, 0]);
        assert!(matches!(
            lat.shift_site(&x, 0, Orientation::Forward),
            Err(Error::Boundary { axis: 0, .. })
        ));
        assert!(matches!(
            lat.shift_site(&x, 1, Orientation::Backward),
            Err(Error::Boundary { axis: 1, .. })
        ));
        assert_eq!(
            lat.shift_site(&x, 1, Orientation::Forward).unwrap(),
            Site::new(vec![2, 1])
        );
    }

    #[test]
    fn forward_then_backward_is_identity() {
        let lat = Lattice::periodic(&[3, 2, 4]).unwrap();
        for x in lat.sites() {
            for d in 0..3 {
                let y = lat.shift_site(&x, d, Orientation::Forward).unwrap();
                assert_eq!(lat.shift_site(&y, d, Orientation::Backward).unwrap(), x);
            }
        }
    }

    #[test]
    fn lexicographic_order_last_axis_fastest() {
        let lat = Lattice::periodic(&[2, 3]).unwrap();
        let sites: Vec<_> = lat.sites().map(|s| s.coords().to_vec()).collect();
        assert_eq!(sites[0], vec![0, 0]);
        assert_eq!(sites[1], vec![0, 1]);
        assert_eq!(sites[3], vec![1, 0]);
        for (i, s) in lat.sites().enumerate() {
            assert_eq!(lat.index(&s).unwrap(), i);
        }
    }

    #[test]
    fn rejects_degenerate_lattices() {
        assert!(Lattice::periodic(&[]).is_err());
        assert!(Lattice::periodic(&[3, 0]).is_err());
        assert!(Lattice::new(vec![2], vec![]).is_err());
    }

    #[test]
    fn extent_one_wraps_onto_itself() {
        let lat = Lattice::periodic(&[1, 2]).unwrap();
        let x = Site::new(vec![0, 1]);
        assert_eq!(lat.shift_site(&x, 0, Orientation::Forward).unwrap(), x);
    }

    #[test]
    fn bad_direction_is_reported() {
        let lat = Lattice::periodic(&[2, 2]).unwrap();
        assert!(matches!(
            lat.shift_index(0, 2, Orientation::Forward),
            Err(Error::Direction { dir: 2, dim: 2 })
        ));
    }
}

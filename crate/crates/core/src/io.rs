//! Config files for site fields, link fields and Lax systems, and seeded
//! generation of standard configurations.
//!
//! A file starts with a line-oriented ASCII header terminated by `end`:
//!
//! ```text
//! ddgeom-config
//! format_version 1
//! dim 2
//! extents 3 3
//! boundary periodic periodic
//! fiber_dim 2
//! scalar_kind complex
//! field_kind link
//! rng chacha20
//! seed 7
//! generator pure-gauge
//! encoding binary
//! payload_len 72
//! end
//! ```
//!
//! `rng`, `seed` and `generator` are optional provenance. The payload follows:
//! either `payload_len` little-endian IEEE-754 doubles (`binary`) or one
//! decimal value per line with 17 significant digits (`text`). Matrices are
//! row-major, complex entries are stored as `(re, im)` pairs, sites are
//! lexicographic with the last coordinate fastest, and links are ordered
//! site-major then direction-major. Lax systems store only in-range links.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;

use crate::connection::ConnectionU;
use crate::error::{Error, Result};
use crate::field::{LinkField, MatrixField, ScalarKind};
use crate::laxpair::LaxSystem;
use crate::lattice::{Boundary, Lattice};
use crate::linalg::{self, Mat};
use crate::random;

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "ddgeom-config";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    SiteMatrix,
    LinkMatrix,
    Lax2D,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Encoding {
    Binary,
    Text,
}

/// The field stored in a config.
#[derive(Clone, Debug, PartialEq)]
pub enum FieldData {
    Site(MatrixField),
    Link(LinkField),
    Lax(LaxSystem),
}

impl FieldData {
    pub fn field_kind(&self) -> FieldKind {
        match self {
            FieldData::Site(_) => FieldKind::SiteMatrix,
            FieldData::Link(_) => FieldKind::LinkMatrix,
            FieldData::Lax(_) => FieldKind::Lax2D,
        }
    }

    pub fn lattice(&self) -> &Lattice {
        match self {
            FieldData::Site(f) => f.lattice(),
            FieldData::Link(f) => f.lattice(),
            FieldData::Lax(s) => s.grid(),
        }
    }

    pub fn fiber_dim(&self) -> usize {
        match self {
            FieldData::Site(f) => f.fiber_dim(),
            FieldData::Link(f) => f.fiber_dim(),
            FieldData::Lax(s) => s.fiber_dim(),
        }
    }

    pub fn kind(&self) -> ScalarKind {
        match self {
            FieldData::Site(f) => f.kind(),
            FieldData::Link(f) => f.kind(),
            FieldData::Lax(s) => s.kind(),
        }
    }

    fn matrices(&self) -> Vec<&Mat> {
        match self {
            FieldData::Site(f) => f.values().iter().collect(),
            FieldData::Link(f) => f.values().iter().collect(),
            FieldData::Lax(s) => s.links(),
        }
    }
}

/// Where a generated config came from.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Provenance {
    pub rng: Option<String>,
    pub seed: Option<u64>,
    pub generator: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Header {
    pub format_version: u32,
    pub extents: Vec<usize>,
    pub boundary: Vec<Boundary>,
    pub fiber_dim: usize,
    pub scalar_kind: ScalarKind,
    pub field_kind: FieldKind,
    pub provenance: Provenance,
    pub encoding: Encoding,
    pub payload_len: usize,
}

impl Header {
    pub fn dim(&self) -> usize {
        self.extents.len()
    }

    /// Number of matrices the payload holds.
    pub fn matrix_count(&self) -> usize {
        let volume: usize = self.extents.iter().product();
        match self.field_kind {
            FieldKind::SiteMatrix => volume,
            FieldKind::LinkMatrix => volume * self.dim(),
            FieldKind::Lax2D => crate::laxpair::link_count([self.extents[0], self.extents[1]]),
        }
    }

    pub fn expected_payload_len(&self) -> usize {
        self.matrix_count() * self.fiber_dim * self.fiber_dim * self.scalar_kind.components()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigFile {
    pub data: FieldData,
    pub provenance: Provenance,
}

impl ConfigFile {
    pub fn new(data: FieldData) -> Self {
        ConfigFile {
            data,
            provenance: Provenance::default(),
        }
    }

    pub fn header(&self, encoding: Encoding) -> Header {
        let lat = self.data.lattice();
        let mut h = Header {
            format_version: FORMAT_VERSION,
            extents: lat.extents().to_vec(),
            boundary: lat.boundaries().to_vec(),
            fiber_dim: self.data.fiber_dim(),
            scalar_kind: self.data.kind(),
            field_kind: self.data.field_kind(),
            provenance: self.provenance.clone(),
            encoding,
            payload_len: 0,
        };
        h.payload_len = h.expected_payload_len();
        h
    }

    /// Link transports of a `LinkMatrix` config.
    pub fn transport(&self) -> Result<ConnectionU> {
        match &self.data {
            FieldData::Link(l) => ConnectionU::new(l.clone()),
            other => Err(Error::Unsupported(format!(
                "expected a link field, found {}",
                other.field_kind()
            ))),
        }
    }
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FieldKind::SiteMatrix => "site",
            FieldKind::LinkMatrix => "link",
            FieldKind::Lax2D => "lax2d",
        })
    }
}

impl FromStr for FieldKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "site" => Ok(FieldKind::SiteMatrix),
            "link" => Ok(FieldKind::LinkMatrix),
            "lax2d" => Ok(FieldKind::Lax2D),
            _ => Err(Error::Parse(format!("unknown field_kind '{s}'"))),
        }
    }
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Encoding::Binary => "binary",
            Encoding::Text => "text",
        })
    }
}

impl FromStr for Encoding {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" => Ok(Encoding::Binary),
            "text" => Ok(Encoding::Text),
            _ => Err(Error::Parse(format!("unknown encoding '{s}'"))),
        }
    }
}

fn kind_name(k: ScalarKind) -> &'static str {
    match k {
        ScalarKind::Real => "real",
        ScalarKind::Complex => "complex",
    }
}

fn boundary_name(b: Boundary) -> &'static str {
    match b {
        Boundary::Periodic => "periodic",
        Boundary::Open => "open",
    }
}

fn render_header(h: &Header) -> String {
    let join = |v: Vec<String>| v.join(" ");
    let mut s = String::new();
    s += &format!("{MAGIC}\n");
    s += &format!("format_version {}\n", h.format_version);
    s += &format!("dim {}\n", h.dim());
    s += &format!("extents {}\n", join(h.extents.iter().map(|e| e.to_string()).collect()));
    s += &format!(
        "boundary {}\n",
        join(h.boundary.iter().map(|&b| boundary_name(b).to_string()).collect())
    );
    s += &format!("fiber_dim {}\n", h.fiber_dim);
    s += &format!("scalar_kind {}\n", kind_name(h.scalar_kind));
    s += &format!("field_kind {}\n", h.field_kind);
    if let Some(rng) = &h.provenance.rng {
        s += &format!("rng {rng}\n");
    }
    if let Some(seed) = h.provenance.seed {
        s += &format!("seed {seed}\n");
    }
    if let Some(g) = &h.provenance.generator {
        s += &format!("generator {g}\n");
    }
    s += &format!("encoding {}\n", h.encoding);
    s += &format!("payload_len {}\n", h.payload_len);
    s += "end\n";
    s
}

/// Serializes a config to bytes.
pub fn to_bytes(cfg: &ConfigFile, encoding: Encoding) -> Vec<u8> {
    let header = cfg.header(encoding);
    let mut out = render_header(&header).into_bytes();
    let values = flatten(&cfg.data);
    debug_assert_eq!(values.len(), header.payload_len);
    match encoding {
        Encoding::Binary => {
            out.reserve(8 * values.len());
            for v in values {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        Encoding::Text => {
            for v in values {
                out.extend_from_slice(format!("{v:.16e}\n").as_bytes());
            }
        }
    }
    out
}

fn flatten(data: &FieldData) -> Vec<f64> {
    let complex = data.kind() == ScalarKind::Complex;
    let mut out = Vec::new();
    for m in data.matrices() {
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let z = m[(r, c)];
                out.push(z.re);
                if complex {
                    out.push(z.im);
                }
            }
        }
    }
    out
}

/// Splits off the header, returning it and the payload bytes.
pub fn parse_header(bytes: &[u8]) -> Result<(Header, &[u8])> {
    let mut rest = bytes;
    let mut next_line = |what: &str| -> Result<String> {
        let pos = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| Error::Parse(format!("header ended before {what}")))?;
        let line = std::str::from_utf8(&rest[..pos])
            .map_err(|_| Error::Parse("header is not valid UTF-8".into()))?
            .trim_end_matches('\r')
            .to_string();
        rest = &rest[pos + 1..];
        Ok(line)
    };
    if next_line("magic")? != MAGIC {
        return Err(Error::Parse(format!("missing '{MAGIC}' magic line")));
    }
    let mut fields: Vec<(String, String)> = Vec::new();
    loop {
        let line = next_line("'end'")?;
        if line == "end" {
            break;
        }
        let (k, v) = line.split_once(' ').unwrap_or((line.as_str(), ""));
        if fields.iter().any(|(key, _)| key == k) {
            return Err(Error::Parse(format!("duplicate header key '{k}'")));
        }
        fields.push((k.to_string(), v.trim().to_string()));
    }
    let get = |k: &str| fields.iter().find(|(key, _)| key == k).map(|(_, v)| v.as_str());
    let require = |k: &str| get(k).ok_or_else(|| Error::Parse(format!("header lacks '{k}'")));
    fn num<T: FromStr>(k: &str, v: &str) -> Result<T> {
        v.parse().map_err(|_| Error::Parse(format!("bad value '{v}' for '{k}'")))
    }

    let format_version: u32 = num("format_version", require("format_version")?)?;
    if format_version != FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            expected: FORMAT_VERSION,
            found: format_version,
        });
    }
    for (k, _) in &fields {
        const KNOWN: [&str; 12] = [
            "format_version",
            "dim",
            "extents",
            "boundary",
            "fiber_dim",
            "scalar_kind",
            "field_kind",
            "rng",
            "seed",
            "generator",
            "encoding",
            "payload_len",
        ];
        if !KNOWN.contains(&k.as_str()) {
            return Err(Error::Parse(format!("unknown header key '{k}'")));
        }
    }
    let dim: usize = num("dim", require("dim")?)?;
    let extents: Vec<usize> = require("extents")?
        .split_whitespace()
        .map(|v| num("extents", v))
        .collect::<Result<_>>()?;
    let boundary: Vec<Boundary> = require("boundary")?
        .split_whitespace()
        .map(|v| match v {
            "periodic" => Ok(Boundary::Periodic),
            "open" => Ok(Boundary::Open),
            _ => Err(Error::Parse(format!("unknown boundary '{v}'"))),
        })
        .collect::<Result<_>>()?;
    let scalar_kind = match require("scalar_kind")? {
        "real" => ScalarKind::Real,
        "complex" => ScalarKind::Complex,
        v => return Err(Error::Parse(format!("unknown scalar_kind '{v}'"))),
    };
    let header = Header {
        format_version,
        fiber_dim: num("fiber_dim", require("fiber_dim")?)?,
        scalar_kind,
        field_kind: require("field_kind")?.parse()?,
        provenance: Provenance {
            rng: get("rng").map(str::to_string),
            seed: get("seed").map(|v| num("seed", v)).transpose()?,
            generator: get("generator").map(str::to_string),
        },
        encoding: require("encoding")?.parse()?,
        payload_len: num("payload_len", require("payload_len")?)?,
        extents,
        boundary,
    };

    if dim == 0 || header.extents.len() != dim {
        return Err(Error::Inconsistent(format!(
            "dim {dim} but {} extents",
            header.extents.len()
        )));
    }
    if header.boundary.len() != dim {
        return Err(Error::Inconsistent(format!(
            "dim {dim} but {} boundary flags",
            header.boundary.len()
        )));
    }
    if header.extents.contains(&0) {
        return Err(Error::Inconsistent("extents must be positive".into()));
    }
    if header.fiber_dim == 0 {
        return Err(Error::Inconsistent("fiber_dim must be positive".into()));
    }
    if header.field_kind == FieldKind::Lax2D
        && (dim != 2 || header.boundary.iter().any(|&b| b != Boundary::Open))
    {
        return Err(Error::Inconsistent("lax2d fields need a 2D header with open boundaries".into()));
    }
    let expected = header.expected_payload_len();
    if header.payload_len != expected {
        return Err(Error::Inconsistent(format!(
            "payload_len {} but extents {:?}, fiber_dim {} and {} values need {expected}",
            header.payload_len,
            header.extents,
            header.fiber_dim,
            kind_name(header.scalar_kind)
        )));
    }
    Ok((header, rest))
}

/// Parses a config from bytes.
pub fn from_bytes(bytes: &[u8]) -> Result<ConfigFile> {
    let (header, payload) = parse_header(bytes)?;
    let values = match header.encoding {
        Encoding::Binary => {
            if payload.len() % 8 != 0 || payload.len() / 8 < header.payload_len {
                return Err(Error::Truncated {
                    expected: header.payload_len,
                    found: payload.len() / 8,
                });
            }
            if payload.len() / 8 > header.payload_len {
                return Err(Error::Parse(format!(
                    "{} trailing bytes after the payload",
                    payload.len() - 8 * header.payload_len
                )));
            }
            payload
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of eight")))
                .collect::<Vec<_>>()
        }
        Encoding::Text => {
            let text = std::str::from_utf8(payload).map_err(|_| Error::Parse("text payload is not UTF-8".into()))?;
            let values = text
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| Error::Parse(format!("bad payload value '{t}'"))))
                .collect::<Result<Vec<_>>>()?;
            if values.len() < header.payload_len {
                return Err(Error::Truncated {
                    expected: header.payload_len,
                    found: values.len(),
                });
            }
            if values.len() > header.payload_len {
                return Err(Error::Parse(format!(
                    "{} trailing values after the payload",
                    values.len() - header.payload_len
                )));
            }
            values
        }
    };
    let data = assemble(&header, &values)?;
    Ok(ConfigFile {
        data,
        provenance: header.provenance,
    })
}

fn assemble(h: &Header, values: &[f64]) -> Result<FieldData> {
    let lattice = Lattice::new(h.extents.clone(), h.boundary.clone())?;
    let m = h.fiber_dim;
    let per = m * m * h.scalar_kind.components();
    let mats: Vec<Mat> = values
        .chunks_exact(per)
        .map(|chunk| match h.scalar_kind {
            ScalarKind::Real => Mat::from_fn(m, m, |r, c| Complex64::new(chunk[r * m + c], 0.0)),
            ScalarKind::Complex => {
                Mat::from_fn(m, m, |r, c| Complex64::new(chunk[2 * (r * m + c)], chunk[2 * (r * m + c) + 1]))
            }
        })
        .collect();
    Ok(match h.field_kind {
        FieldKind::SiteMatrix => FieldData::Site(MatrixField::new(lattice.clone(), m, h.scalar_kind, mats)?),
        FieldKind::LinkMatrix => FieldData::Link(LinkField::new(lattice.clone(), m, h.scalar_kind, mats)?),
        FieldKind::Lax2D => FieldData::Lax(LaxSystem::from_links(lattice, m, h.scalar_kind, mats)?),
    })
}

pub fn write_config(path: impl AsRef<Path>, cfg: &ConfigFile, encoding: Encoding) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_bytes(cfg, encoding)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_config(path: impl AsRef<Path>) -> Result<ConfigFile> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    from_bytes(&bytes)
}

/// Standard configurations produced by [`generate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenKind {
    /// Link field with entries uniform in `[-0.5, 0.5]`, redrawn until
    /// invertible.
    RandomGL,
    /// Link field of unit phases, uniform in `(-π, π]`; requires `m = 1`.
    RandomU1,
    /// `U_μ(x) = g⁻¹(x) g(x+μ̂)` for a random well-conditioned `g`.
    PureGauge,
    /// U(1) links on an `L × L` torus with every plaquette equal to
    /// `exp(2πi q / L²)`; requires `m = 1`.
    ConstantFlux(i32),
    /// Pure-gauge Lax system on an open 2D grid.
    LaxPureGauge,
    /// Site field of random well-conditioned gauge matrices.
    GaugeTransform,
}

impl GenKind {
    pub fn name(&self) -> &'static str {
        match self {
            GenKind::RandomGL => "random-gl",
            GenKind::RandomU1 => "random-u1",
            GenKind::PureGauge => "pure-gauge",
            GenKind::ConstantFlux(_) => "constant-flux",
            GenKind::LaxPureGauge => "lax-pure-gauge",
            GenKind::GaugeTransform => "gauge-transform",
        }
    }
}

/// Builds a configuration deterministically from `seed`. Lax systems use the
/// extents of `lattice` with open boundaries.
pub fn generate(kind: GenKind, lattice: &Lattice, m: usize, scalar: ScalarKind, seed: u64) -> Result<ConfigFile> {
    if m == 0 {
        return Err(Error::Shape("fiber dimension must be positive".into()));
    }
    let mut rng = random::rng(seed);
    let need_scalar = |what: &str| {
        if m != 1 {
            Err(Error::Unsupported(format!("{what} needs fiber dimension 1, got {m}")))
        } else {
            Ok(())
        }
    };
    let data = match kind {
        GenKind::RandomGL => {
            lattice.require_periodic()?;
            FieldData::Link(LinkField::from_fn(lattice, m, scalar, |_, _| random::random_gl(&mut rng, m, scalar)))
        }
        GenKind::RandomU1 => {
            lattice.require_periodic()?;
            need_scalar("random-u1")?;
            FieldData::Link(LinkField::from_fn(lattice, 1, ScalarKind::Complex, |_, _| random::u1(&mut rng)))
        }
        GenKind::PureGauge => {
            lattice.require_periodic()?;
            let g = random::gauge_field(&mut rng, lattice, m, scalar);
            FieldData::Link(pure_gauge_links(&g)?)
        }
        GenKind::ConstantFlux(q) => {
            need_scalar("constant-flux")?;
            return Ok(ConfigFile {
                data: FieldData::Link(constant_flux(lattice, q)?),
                provenance: Provenance {
                    rng: None,
                    seed: None,
                    generator: Some(format!("{} q={q}", kind.name())),
                },
            });
        }
        GenKind::LaxPureGauge => {
            if lattice.dim() != 2 {
                return Err(Error::Dimension {
                    required: 2,
                    found: lattice.dim(),
                });
            }
            let grid = Lattice::open(lattice.extents())?;
            let h = random::gauge_field(&mut rng, &grid, m, scalar);
            FieldData::Lax(LaxSystem::pure_gauge(&h)?)
        }
        GenKind::GaugeTransform => {
            lattice.require_periodic()?;
            FieldData::Site(random::gauge_field(&mut rng, lattice, m, scalar))
        }
    };
    Ok(ConfigFile {
        data,
        provenance: Provenance {
            rng: Some(random::RNG_NAME.to_string()),
            seed: Some(seed),
            generator: Some(kind.name().to_string()),
        },
    })
}

/// `U_μ(x) = g⁻¹(x) g(x+μ̂)` on a periodic lattice.
pub fn pure_gauge_links(g: &MatrixField) -> Result<LinkField> {
    let lat = g.lattice();
    lat.require_periodic()?;
    let g_inv = g.inverse()?;
    Ok(LinkField::from_fn(lat, g.fiber_dim(), g.kind(), |s, d| {
        let i = lat.index(s).expect("site from lattice");
        g_inv.at_index(i) * g.at_index(lat.up(i, d))
    }))
}

/// `U_0 ≡ 1`, `U_1(x) = exp(2πi q x_0 / L²)`, and the links `U_0` leaving the
/// column `x_0 = L-1` carry `exp(-2πi q x_1 / L)`, so that every plaquette
/// equals `exp(2πi q / L²)` and the total flux is `2πq`.
pub fn constant_flux(lattice: &Lattice, q: i32) -> Result<LinkField> {
    lattice.require_periodic()?;
    let e = lattice.extents();
    if e.len() != 2 || e[0] != e[1] {
        return Err(Error::InvalidLattice(format!(
            "constant flux needs a square 2D torus, got extents {e:?}"
        )));
    }
    let l = e[0] as f64;
    let two_pi_q = 2.0 * std::f64::consts::PI * q as f64;
    Ok(LinkField::from_fn(lattice, 1, ScalarKind::Complex, |s, d| {
        let (x0, x1) = (s.coords()[0] as f64, s.coords()[1] as f64);
        let phase = match d {
            1 => two_pi_q * x0 / (l * l),
            _ if s.coords()[0] == e[0] - 1 => -two_pi_q * x1 / l,
            _ => 0.0,
        };
        linalg::scalar(Complex64::from_polar(1.0, phase))
    }))
}

//! Subcommand implementations. Each returns a report or a message for an
//! exit-code-2 error.

use std::path::Path;

use ddgeom::connection::{self, from_transport, GaugeTransform};
use ddgeom::curvature::{self, continuum, topology::UNIMODULAR_TOL, CurvatureField};
use ddgeom::io::{self, ConfigFile, Encoding, FieldData, GenKind};
use ddgeom::laxpair::{LaxSystem, MAX_PATH_OFFSET};
use ddgeom::{linalg, random, ConnectionU, Lattice, Mat, ScalarKind, Site};
use serde_json::{json, Value};

use crate::paths;
use crate::report::{num, Report, Table};
use crate::{Command, Common, EncodingArg, GenKindArg, PotentialArg, ScalarArg};

type CmdResult = Result<Report, String>;

pub fn run(cmd: &Command, common: &Common) -> CmdResult {
    if common.tol.is_nan() || common.tol < 0.0 {
        return Err(format!("--tol must be non-negative, got {}", common.tol));
    }
    let mut report = match cmd {
        Command::Gen {
            kind,
            dims,
            m,
            scalar,
            seed,
            q,
            out,
            encoding,
        } => gen(*kind, dims, *m, *scalar, *seed, *q, out, *encoding),
        Command::Gauge {
            input,
            out,
            gauge: gauge_file,
            seed,
            encoding,
        } => gauge(input, out, gauge_file.as_deref(), *seed, *encoding),
        Command::Curv { input } => curv(input, common.tol),
        Command::Plaq { input, mu, nu, site } => plaq(input, *mu, *nu, site.as_deref()),
        Command::Flat { input } => flat(input, common.tol),
        Command::Bianchi { input } => bianchi(input, common.tol),
        Command::Chern { input, k, dirs, site } => chern(input, *k, dirs.as_deref(), site.as_deref()),
        Command::Charge { input, mu, nu, base } => charge(input, *mu, *nu, base.as_deref(), common.tol),
        Command::Limit {
            potential,
            q,
            l_list,
            min_slope,
        } => limit(*potential, *q, l_list, *min_slope, common.tol),
        Command::Lax { input, target } => lax(input, target.as_deref(), common.tol),
        Command::Transport {
            input,
            path,
            from,
            component,
        } => transport(input, path, from.as_deref(), *component),
    }?;
    if !common.no_timestamp {
        report.timestamp_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs());
    }
    Ok(report)
}

fn err(e: ddgeom::Error) -> String {
    e.to_string()
}

fn encoding(e: EncodingArg) -> Encoding {
    match e {
        EncodingArg::Binary => Encoding::Binary,
        EncodingArg::Text => Encoding::Text,
    }
}

fn load(path: &Path, report: &mut Report) -> Result<ConfigFile, String> {
    let cfg = io::read_config(path).map_err(err)?;
    let lat = cfg.data.lattice();
    report.input("in", path.display().to_string());
    report.input("extents", json!(lat.extents()));
    report.input("fiber_dim", cfg.data.fiber_dim());
    report.input("field_kind", cfg.data.field_kind().to_string());
    if let Some(seed) = cfg.provenance.seed {
        report.input("seed", seed);
    }
    if let Some(g) = &cfg.provenance.generator {
        report.input("generator", g.clone());
    }
    Ok(cfg)
}

fn load_transport(path: &Path, report: &mut Report) -> Result<ConnectionU, String> {
    let cfg = load(path, report)?;
    match cfg.data {
        FieldData::Link(_) => cfg.transport().map_err(err),
        other => Err(format!(
            "{} holds a {} field; this command needs a link field",
            path.display(),
            other.field_kind()
        )),
    }
}

/// Converts a 1-based CLI direction.
fn dir0(d: usize, lat: &Lattice, flag: &str) -> Result<usize, String> {
    if d == 0 || d > lat.dim() {
        return Err(format!("--{flag} {d} is outside 1..={}", lat.dim()));
    }
    Ok(d - 1)
}

fn site_label(s: &Site) -> String {
    s.to_string()
}

#[allow(clippy::too_many_arguments)]
fn gen(
    kind: GenKindArg,
    dims: &str,
    m: usize,
    scalar: ScalarArg,
    seed: u64,
    q: i32,
    out: &Path,
    enc: EncodingArg,
) -> CmdResult {
    let extents = paths::parse_list(dims, "--dims")?;
    let lattice = Lattice::periodic(&extents).map_err(err)?;
    let scalar_kind = match scalar {
        ScalarArg::Real => ScalarKind::Real,
        ScalarArg::Complex => ScalarKind::Complex,
    };
    let gk = match kind {
        GenKindArg::RandomGl => GenKind::RandomGL,
        GenKindArg::RandomU1 => GenKind::RandomU1,
        GenKindArg::PureGauge => GenKind::PureGauge,
        GenKindArg::ConstantFlux => GenKind::ConstantFlux(q),
        GenKindArg::LaxPureGauge => GenKind::LaxPureGauge,
        GenKindArg::GaugeTransform => GenKind::GaugeTransform,
    };
    let cfg = io::generate(gk, &lattice, m, scalar_kind, seed).map_err(err)?;
    io::write_config(out, &cfg, encoding(enc)).map_err(err)?;
    let mut r = Report::new("gen");
    r.input("kind", gk.name())
        .input("extents", json!(extents))
        .input("fiber_dim", m)
        .input("seed", seed)
        .input("out", out.display().to_string())
        .input("encoding", encoding(enc).to_string());
    if let GenKind::ConstantFlux(q) = gk {
        r.input("q", q);
    }
    let header = cfg.header(encoding(enc));
    r.set("field_kind", header.field_kind.to_string())
        .set("payload_len", header.payload_len);
    Ok(r)
}

fn gauge(input: &Path, out: &Path, gauge_path: Option<&Path>, seed: u64, enc: EncodingArg) -> CmdResult {
    let mut r = Report::new("gauge");
    let cfg = load(input, &mut r)?;
    let lat = cfg.data.lattice().clone();
    let m = cfg.data.fiber_dim();
    let g_field = match gauge_path {
        Some(p) => {
            r.input("gauge", p.display().to_string());
            match io::read_config(p).map_err(err)?.data {
                FieldData::Site(g) => g,
                other => return Err(format!("{} holds a {} field, expected a site field", p.display(), other.field_kind())),
            }
        }
        None => {
            r.input("gauge_seed", seed);
            let unitary = match &cfg.data {
                FieldData::Link(links) => {
                    m == 1 && links.values().iter().all(|v| (v[(0, 0)].norm() - 1.0).abs() <= UNIMODULAR_TOL)
                }
                _ => false,
            };
            r.input("gauge_group", if unitary { "u1" } else { "gl" });
            if unitary {
                random::u1_gauge_field(&mut random::rng(seed), &lat)
            } else {
                match io::generate(GenKind::GaugeTransform, &lat, m, cfg.data.kind(), seed).map_err(err)?.data {
                    FieldData::Site(g) => g,
                    _ => unreachable!("gauge generator yields a site field"),
                }
            }
        }
    };
    let g = GaugeTransform::new(g_field).map_err(err)?;
    let (data, change) = match &cfg.data {
        FieldData::Link(links) => {
            let u = ConnectionU::new(links.clone()).map_err(err)?;
            let u2 = connection::gauge_transform_u(&u, &g).map_err(err)?;
            let change = u2.links().max_abs_diff(u.links());
            (FieldData::Link(u2.into_links()), change)
        }
        FieldData::Site(a) => {
            let a2 = connection::gauge_transform_section(a, &g).map_err(err)?;
            let change = a2.max_abs_diff(a);
            (FieldData::Site(a2), change)
        }
        FieldData::Lax(_) => return Err("gauge does not apply to lax2d configs".into()),
    };
    let mut out_cfg = ConfigFile::new(data);
    out_cfg.provenance = cfg.provenance.clone();
    io::write_config(out, &out_cfg, encoding(enc)).map_err(err)?;
    r.input("out", out.display().to_string());
    r.set_f64("max_change", change);
    Ok(r)
}

fn curv(input: &Path, tol: f64) -> CmdResult {
    let mut r = Report::new("curv");
    let u = load_transport(input, &mut r)?;
    let b = from_transport(&u);
    let from_b = curvature::curvature_from_b(&b).map_err(err)?;
    let from_form = CurvatureField::from_form(&curvature::curvature_form(&b).map_err(err)?).map_err(err)?;
    let from_u = curvature::curvature_from_u(&u).map_err(err)?;
    let d_form = from_b.max_abs_diff(&from_form).map_err(err)?;
    let d_u = from_b.max_abs_diff(&from_u).map_err(err)?;
    let scale = 1.0 + b.max_abs();
    r.tol = Some(tol);
    r.set_f64("scale", scale)
        .set_f64("max_abs_f", from_b.max_abs())
        .set_f64("components_vs_form", d_form)
        .set_f64("components_vs_transport", d_u);
    r.pass = Some(d_form <= tol * scale && d_u <= tol * scale);
    Ok(r)
}

fn plaq(input: &Path, mu: usize, nu: usize, site: Option<&str>) -> CmdResult {
    let mut r = Report::new("plaq");
    let u = load_transport(input, &mut r)?;
    let lat = u.lattice().clone();
    let (mu0, nu0) = (dir0(mu, &lat, "mu")?, dir0(nu, &lat, "nu")?);
    r.input("mu", mu).input("nu", nu);
    let w = curvature::plaquette_field(&u, mu0, nu0).map_err(err)?;
    let sites: Vec<Site> = match site {
        Some(s) => {
            let s = paths::parse_site(s, lat.dim())?;
            lat.index(&s).map_err(err)?;
            r.input("site", site_label(&s));
            vec![s]
        }
        None => lat.sites().collect(),
    };
    let id = linalg::identity(u.fiber_dim());
    let mut table = Table::new(&["site", "row", "col", "re", "im"]);
    let mut max_dev = 0.0f64;
    for s in &sites {
        let v = w.at(s).map_err(err)?;
        max_dev = max_dev.max(linalg::max_abs_diff(v, &id));
        for row in 0..v.nrows() {
            for col in 0..v.ncols() {
                let z = v[(row, col)];
                table.push(vec![json!(site_label(s)), json!(row + 1), json!(col + 1), num(z.re), num(z.im)]);
            }
        }
    }
    r.set_f64("max_deviation_from_identity", max_dev);
    if sites.len() == 1 && u.fiber_dim() == 1 {
        let z = w.at(&sites[0]).map_err(err)?[(0, 0)];
        r.set_f64("re", z.re).set_f64("im", z.im).set_f64("phase", z.arg());
    }
    r.table = Some(table);
    Ok(r)
}

fn flat(input: &Path, tol: f64) -> CmdResult {
    let mut r = Report::new("flat");
    let u = load_transport(input, &mut r)?;
    let rep = curvature::is_flat(&u, tol).map_err(err)?;
    r.tol = Some(tol);
    r.set_f64("plaquette_deviation", rep.plaquette_deviation)
        .set_f64("commutator_deviation", rep.commutator_deviation)
        .set_f64("commutator_scale", rep.commutator_scale)
        .set_f64("holonomy_deviation", rep.holonomy_deviation)
        .set("commutator_flat", rep.commutator_flat())
        .set("holonomy_flat", rep.holonomy_flat());
    if let Some((s, mu, nu)) = &rep.worst {
        r.set("worst_site", site_label(s))
            .set("worst_plane", json!([mu + 1, nu + 1]));
    }
    r.pass = Some(rep.flat);
    Ok(r)
}

fn bianchi(input: &Path, tol: f64) -> CmdResult {
    let mut r = Report::new("bianchi");
    let u = load_transport(input, &mut r)?;
    let rep = curvature::bianchi_residual(&from_transport(&u)).map_err(err)?;
    let displayed = rep.components.iter().map(|c| c.displayed.max_abs()).fold(0.0, f64::max);
    let expanded = rep.components.iter().map(|c| c.expanded.max_abs()).fold(0.0, f64::max);
    r.tol = Some(tol);
    r.set_f64("scale", rep.scale)
        .set_f64("max_residual", rep.max_residual)
        .set_f64("max_contraction_expanded", expanded)
        .set_f64("max_contraction_displayed", displayed);
    r.pass = Some(rep.max_residual <= tol * rep.scale);
    Ok(r)
}

fn chern(input: &Path, k: usize, dirs: Option<&str>, site: Option<&str>) -> CmdResult {
    let mut r = Report::new("chern");
    let u = load_transport(input, &mut r)?;
    let lat = u.lattice().clone();
    let dirs0: Vec<usize> = match dirs {
        Some(d) => paths::parse_list(d, "--dirs")?
            .into_iter()
            .map(|d| dir0(d, &lat, "dirs"))
            .collect::<Result<_, _>>()?,
        None => (0..2 * k).collect(),
    };
    if dirs0.len() != 2 * k {
        return Err(format!("--dirs lists {} directions, k = {k} needs {}", dirs0.len(), 2 * k));
    }
    r.input("k", k).input("dirs", json!(dirs0.iter().map(|d| d + 1).collect::<Vec<_>>()));
    let f = curvature::curvature_from_u(&u).map_err(err)?;
    let sites: Vec<Site> = match site {
        Some(s) => vec![paths::parse_site(s, lat.dim())?],
        None => lat.sites().collect(),
    };
    let mut table = Table::new(&["site", "re", "im"]);
    let mut total = ddgeom::Scalar::new(0.0, 0.0);
    for s in &sites {
        let c = curvature::chern_density_in(&f, &dirs0, s).map_err(err)?;
        total += c;
        table.push(vec![json!(site_label(s)), num(c.re), num(c.im)]);
    }
    r.set_f64("sum_re", total.re).set_f64("sum_im", total.im).set("sites", sites.len());
    r.table = Some(table);
    Ok(r)
}

fn charge(input: &Path, mu: usize, nu: usize, base: Option<&str>, tol: f64) -> CmdResult {
    let mut r = Report::new("charge");
    let u = load_transport(input, &mut r)?;
    let lat = u.lattice().clone();
    let (mu0, nu0) = (dir0(mu, &lat, "mu")?, dir0(nu, &lat, "nu")?);
    let base = match base {
        Some(b) => paths::parse_site(b, lat.dim())?,
        None => Site::origin(lat.dim()),
    };
    r.input("mu", mu).input("nu", nu).input("base", site_label(&base));
    let rep = curvature::topological_charge_u1(&u, mu0, nu0, &base).map_err(err)?;
    r.tol = Some(tol);
    r.set("charge", rep.charge)
        .set_f64("raw", rep.raw)
        .set_f64("residual", rep.residual)
        .set("plaquettes", rep.plaquettes);
    r.pass = Some(rep.residual <= tol);
    Ok(r)
}

fn limit(potential: PotentialArg, q: i32, l_list: &str, min_slope: f64, tol: f64) -> CmdResult {
    let ls = paths::parse_list(l_list, "--L-list")?;
    let mut r = Report::new("limit");
    let scan = match potential {
        PotentialArg::Zero => continuum::continuum_scan(&continuum::ZeroPotential, &ls),
        PotentialArg::Uniform => continuum::continuum_scan(&continuum::UniformField { flux_quanta: q }, &ls),
        PotentialArg::Trig => continuum::continuum_scan(&continuum::TrigPotential::default(), &ls),
    }
    .map_err(err)?;
    let pot_name = match potential {
        PotentialArg::Zero => "zero",
        PotentialArg::Uniform => "uniform",
        PotentialArg::Trig => "trig",
    };
    r.input("potential", pot_name).input("L_list", json!(ls)).input("min_slope", num(min_slope));
    if potential == PotentialArg::Uniform {
        r.input("q", q);
    }
    let opt = |v: Option<f64>| v.map(num).unwrap_or(Value::Null);
    r.set("im_slope", opt(scan.im_slope))
        .set("re_slope", opt(scan.re_slope))
        .set("phase_slope", opt(scan.phase_slope));
    let im_max = scan.rows.iter().map(|x| x.im_error).fold(0.0, f64::max);
    let re_max = scan.rows.iter().map(|x| x.re_error).fold(0.0, f64::max);
    let slope_ok = im_max <= tol || scan.im_slope.is_some_and(|s| s >= min_slope);
    let re_decreasing = scan.rows.windows(2).all(|w| w[1].re_error < w[0].re_error);
    let re_ok = re_max <= tol || re_decreasing;
    r.set("im_slope_ok", slope_ok).set("re_decreasing", re_decreasing);
    let mut table = Table::new(&["L", "a", "im_error", "re_error", "phase_error"]);
    for row in &scan.rows {
        table.push(vec![json!(row.l), num(row.a), num(row.im_error), num(row.re_error), num(row.phase_error)]);
    }
    r.table = Some(table);
    r.tol = Some(tol);
    r.pass = Some(slope_ok && re_ok);
    Ok(r)
}

fn load_lax(path: &Path, report: &mut Report) -> Result<LaxSystem, String> {
    match load(path, report)?.data {
        FieldData::Lax(sys) => Ok(sys),
        other => Err(format!(
            "{} holds a {} field; lax needs a lax2d config",
            path.display(),
            other.field_kind()
        )),
    }
}

fn lax(input: &Path, target: Option<&str>, tol: f64) -> CmdResult {
    let mut r = Report::new("lax");
    let sys = load_lax(input, &mut r)?;
    let (mm, nn) = (sys.grid().extents()[0], sys.grid().extents()[1]);
    let target = match target {
        Some(t) => paths::parse_site(t, 2)?,
        None => {
            let tx = (mm - 1).min(MAX_PATH_OFFSET / 2);
            let tt = (nn - 1).min(MAX_PATH_OFFSET - tx);
            Site::new(vec![tx, tt])
        }
    };
    r.input("target", site_label(&target));
    let rep = sys.consistency_residual().map_err(err)?;
    let mut psi0 = Mat::zeros(1, sys.fiber_dim());
    psi0[(0, 0)] = ddgeom::Scalar::new(1.0, 0.0);
    let pi = sys.path_independence(&psi0, &target).map_err(err)?;
    let scale = 1.0 + sys.max_abs();
    let path_scale = 1.0 + linalg::max_abs(&pi.result);
    r.tol = Some(tol);
    r.set_f64("scale", scale)
        .set_f64("max_additive", rep.max_additive)
        .set_f64("max_multiplicative", rep.max_multiplicative)
        .set_f64("max_a_form", rep.max_a_form)
        .set_f64("a_form_vs_additive", rep.max_a_form_vs_additive)
        .set("paths", pi.paths)
        .set_f64("path_deviation", pi.max_deviation)
        .set_f64("path_scale", path_scale);
    let mut table = Table::new(&["x", "t", "additive", "multiplicative", "a_form"]);
    for p in &rep.plaquettes {
        let c = p.site.coords();
        table.push(vec![
            json!(c[0]),
            json!(c[1]),
            num(linalg::max_abs(&p.additive)),
            num(linalg::max_abs(&p.multiplicative)),
            num(linalg::max_abs(&p.a_form)),
        ]);
    }
    r.table = Some(table);
    r.pass = Some(rep.max_additive <= tol * scale && pi.max_deviation <= tol * path_scale);
    Ok(r)
}

fn transport(input: &Path, path: &str, from: Option<&str>, component: usize) -> CmdResult {
    let mut r = Report::new("transport");
    let cfg = load(input, &mut r)?;
    let lat = cfg.data.lattice().clone();
    let m = cfg.data.fiber_dim();
    if component == 0 || component > m {
        return Err(format!("--component {component} is outside 1..={m}"));
    }
    let base = match from {
        Some(s) => paths::parse_site(s, lat.dim())?,
        None => Site::origin(lat.dim()),
    };
    let p = paths::parse_path(path, base)?;
    r.input("path", path).input("from", site_label(&p.base)).input("component", component);
    let mut a = Mat::zeros(1, m);
    a[(0, component - 1)] = ddgeom::Scalar::new(1.0, 0.0);
    let end = p.end(&lat).map_err(err)?;
    let result = match &cfg.data {
        FieldData::Link(links) => {
            let u = ConnectionU::new(links.clone()).map_err(err)?;
            if p.is_closed(&lat).map_err(err)? {
                let hol = connection::path_ordered_product(&p, &u).map_err(err)?;
                r.set_f64("holonomy_deviation", linalg::max_abs_diff(&hol, &linalg::identity(m)));
            }
            connection::parallel_transport(&a, &p, &u).map_err(err)?
        }
        FieldData::Lax(sys) => sys.propagate(&a, &p).map_err(err)?,
        FieldData::Site(_) => return Err("transport needs a link or lax2d config".into()),
    };
    r.set("end", site_label(&end)).set("steps", p.steps.len());
    let mut table = Table::new(&["col", "re", "im"]);
    for c in 0..m {
        let z = result[(0, c)];
        table.push(vec![json!(c + 1), num(z.re), num(z.im)]);
    }
    r.table = Some(table);
    Ok(r)
}

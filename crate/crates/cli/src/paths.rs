//! Parsing of `--path`, `--site` and `--dims` style arguments.

use ddgeom::{LatticePath, Site, Step};

/// Maps a direction token to a 0-based direction. Numbers are 1-based;
/// letters are `x, t` on 2D lattices and `x, y, z, t` otherwise.
fn direction(token: &str, dim: usize) -> Result<usize, String> {
    let dir = match token {
        "x" => 1,
        "y" => 2,
        "t" if dim == 2 => 2,
        "z" => 3,
        "t" => 4,
        n => n
            .parse::<usize>()
            .map_err(|_| format!("unknown direction '{n}'"))?,
    };
    if dir == 0 || dir > dim {
        return Err(format!("direction '{token}' is outside 1..={dim}"));
    }
    Ok(dir - 1)
}

/// Parses `"x+,t+,x-"` or `"1+,2+,1-"` into steps.
pub fn parse_steps(spec: &str, dim: usize) -> Result<Vec<Step>, String> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Ok(Vec::new());
    }
    spec.split(',')
        .map(|tok| {
            let tok = tok.trim();
            let (body, forward) = if let Some(b) = tok.strip_suffix('+') {
                (b, true)
            } else if let Some(b) = tok.strip_suffix('-').or_else(|| tok.strip_suffix('\u{2212}')) {
                (b, false)
            } else {
                return Err(format!("path step '{tok}' must end in '+' or '-'"));
            };
            let d = direction(body, dim)?;
            Ok(if forward { Step::forward(d) } else { Step::backward(d) })
        })
        .collect()
}

pub fn parse_path(spec: &str, base: Site) -> Result<LatticePath, String> {
    let steps = parse_steps(spec, base.dim())?;
    Ok(LatticePath::new(base, steps))
}

/// Parses a comma-separated list of unsigned integers.
pub fn parse_list(spec: &str, what: &str) -> Result<Vec<usize>, String> {
    spec.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("{what}: '{t}' is not a non-negative integer"))
        })
        .collect()
}

pub fn parse_site(spec: &str, dim: usize) -> Result<Site, String> {
    let coords = parse_list(spec, "site")?;
    if coords.len() != dim {
        return Err(format!("site has {} coordinates, lattice has dimension {dim}", coords.len()));
    }
    Ok(Site::new(coords))
}

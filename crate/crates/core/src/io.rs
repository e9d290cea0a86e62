//! Plain-text persistence for meshes, fields, radial profiles and the sweep
//! tables. Formats are ASCII with 17 significant digits so that write∘read
//! is the identity on every finite double.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::asymptotics::ExpansionRow;
use crate::fem::Field;
use crate::geometry::Mesh;
use crate::radial::RadialProfile;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
#[error("{kind} file {path}: line {line}: {message}")]
pub struct FormatError {
    pub kind: &'static str,
    pub path: String,
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
    #[error("{0}")]
    Invalid(String),
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn read_to_string(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|e| IoError::Io(path.display().to_string(), e))
}

fn write_string(path: &Path, contents: &str) -> Result<(), IoError> {
    std::fs::write(path, contents).map_err(|e| IoError::Io(path.display().to_string(), e))
}

fn err(kind: &'static str, path: &Path, line: usize, message: impl Into<String>) -> FormatError {
    FormatError { kind, path: path.display().to_string(), line, message: message.into() }
}

fn parse_f64(
    tok: &str,
    kind: &'static str,
    path: &Path,
    line: usize,
    finite: bool,
) -> Result<f64, FormatError> {
    let v: f64 = tok
        .parse()
        .map_err(|_| err(kind, path, line, format!("cannot parse '{tok}' as a number")))?;
    if finite && !v.is_finite() {
        return Err(err(kind, path, line, format!("non-finite value '{tok}'")));
    }
    Ok(v)
}

// ---------------------------------------------------------------------------
// mesh

pub fn write_mesh(path: &Path, mesh: &Mesh) -> Result<(), IoError> {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", mesh.node_count(), mesh.triangles().len());
    for (p, &b) in mesh.nodes().iter().zip(mesh.boundary_flags()) {
        let _ = writeln!(out, "{} {} {}", fmt_f64(p[0]), fmt_f64(p[1]), u8::from(b));
    }
    for t in mesh.triangles() {
        let _ = writeln!(out, "{} {} {}", t[0], t[1], t[2]);
    }
    write_string(path, &out)
}

pub fn read_mesh(path: &Path) -> Result<Mesh, IoError> {
    const KIND: &str = "mesh";
    let text = read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| err(KIND, path, 1, "empty file"))?;
    let mut it = header.split_whitespace();
    let n_nodes: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| err(KIND, path, 1, "expected 'N_nodes N_triangles'"))?;
    let n_tris: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| err(KIND, path, 1, "expected 'N_nodes N_triangles'"))?;
    let mut nodes = Vec::with_capacity(n_nodes);
    let mut boundary = Vec::with_capacity(n_nodes);
    for k in 0..n_nodes {
        let (i, line) = lines
            .next()
            .ok_or_else(|| err(KIND, path, k + 2, "unexpected end of file in node block"))?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(err(KIND, path, i + 1, "expected 'x y boundary_flag'").into());
        }
        let x = parse_f64(toks[0], KIND, path, i + 1, true)?;
        let y = parse_f64(toks[1], KIND, path, i + 1, true)?;
        let flag = match toks[2] {
            "0" => false,
            "1" => true,
            other => {
                return Err(err(KIND, path, i + 1, format!("boundary flag must be 0|1, got '{other}'")).into())
            }
        };
        nodes.push([x, y]);
        boundary.push(flag);
    }
    let mut tris = Vec::with_capacity(n_tris);
    for k in 0..n_tris {
        let (i, line) = lines
            .next()
            .ok_or_else(|| err(KIND, path, n_nodes + k + 2, "unexpected end of file in triangle block"))?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(err(KIND, path, i + 1, "expected three node indices").into());
        }
        let mut tri = [0usize; 3];
        for (slot, t) in tri.iter_mut().zip(&toks) {
            let v: usize = t
                .parse()
                .map_err(|_| err(KIND, path, i + 1, format!("bad index '{t}'")))?;
            if v >= n_nodes {
                return Err(
                    err(KIND, path, i + 1, format!("index {v} out of range (N_nodes = {n_nodes})"))
                        .into(),
                );
            }
            *slot = v;
        }
        tris.push(tri);
    }
    if lines.next().is_some() {
        return Err(err(KIND, path, n_nodes + n_tris + 2, "trailing content").into());
    }
    // duplicate-node check
    let mut seen = std::collections::BTreeMap::new();
    for (i, p) in nodes.iter().enumerate() {
        let key = ((p[0] / 1e-12).round() as i64, (p[1] / 1e-12).round() as i64);
        if let Some(j) = seen.insert(key, i) {
            return Err(err(KIND, path, i + 2, format!("node {i} duplicates node {j}")).into());
        }
    }
    Mesh::from_parts(nodes, tris, boundary)
        .map_err(|e| IoError::Invalid(format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// field

pub fn write_field(path: &Path, field: &Field) -> Result<(), IoError> {
    let mut out = String::new();
    let _ = writeln!(out, "{}", field.values().len());
    for v in field.values() {
        let _ = writeln!(out, "{}", fmt_f64(*v));
    }
    write_string(path, &out)
}

pub fn read_field(path: &Path, mesh: &Arc<Mesh>) -> Result<Field, IoError> {
    const KIND: &str = "field";
    let text = read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| err(KIND, path, 1, "empty file"))?;
    let n: usize = header
        .trim()
        .parse()
        .map_err(|_| err(KIND, path, 1, "expected node count"))?;
    if n != mesh.node_count() {
        return Err(err(
            KIND,
            path,
            1,
            format!("node count {n} does not match mesh ({})", mesh.node_count()),
        )
        .into());
    }
    let mut values = Vec::with_capacity(n);
    for k in 0..n {
        let (i, line) = lines
            .next()
            .ok_or_else(|| err(KIND, path, k + 2, "unexpected end of file"))?;
        values.push(parse_f64(line.trim(), KIND, path, i + 1, true)?);
    }
    if lines.next().is_some() {
        return Err(err(KIND, path, n + 2, "trailing content").into());
    }
    Field::new(mesh.clone(), values).map_err(|e| IoError::Invalid(e.to_string()))
}

// ---------------------------------------------------------------------------
// radial profile

pub fn write_profile(path: &Path, profile: &RadialProfile) -> Result<(), IoError> {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# {} {} {}",
        fmt_f64(profile.amplitude),
        fmt_f64(profile.theta),
        fmt_f64(profile.r_max)
    );
    for i in 0..profile.r.len() {
        let _ = writeln!(
            out,
            "{} {} {}",
            fmt_f64(profile.r[i]),
            fmt_f64(profile.w[i]),
            fmt_f64(profile.dw[i])
        );
    }
    write_string(path, &out)
}

pub fn read_profile(path: &Path) -> Result<RadialProfile, IoError> {
    const KIND: &str = "profile";
    let text = read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| err(KIND, path, 1, "empty file"))?;
    let stripped = header
        .strip_prefix('#')
        .ok_or_else(|| err(KIND, path, 1, "header must start with '#'"))?;
    let toks: Vec<&str> = stripped.split_whitespace().collect();
    if toks.len() != 3 {
        return Err(err(KIND, path, 1, "header must be '# amplitude theta r_max'").into());
    }
    let amplitude = parse_f64(toks[0], KIND, path, 1, true)?;
    let theta = parse_f64(toks[1], KIND, path, 1, true)?;
    let r_max = parse_f64(toks[2], KIND, path, 1, true)?;
    let mut r = Vec::new();
    let mut w = Vec::new();
    let mut dw = Vec::new();
    for (i, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(err(KIND, path, i + 1, "expected 'r w dw'").into());
        }
        let rv = parse_f64(toks[0], KIND, path, i + 1, true)?;
        if let Some(&prev) = r.last() {
            if rv <= prev {
                return Err(err(KIND, path, i + 1, "radii must increase").into());
            }
        }
        r.push(rv);
        w.push(parse_f64(toks[1], KIND, path, i + 1, true)?);
        dw.push(parse_f64(toks[2], KIND, path, i + 1, true)?);
    }
    if r.len() < 3 {
        return Err(err(KIND, path, 2, "profile needs at least 3 samples").into());
    }
    let dr = r[1] - r[0];
    for i in 1..r.len() {
        if ((r[i] - r[i - 1]) - dr).abs() > 1e-9 * dr {
            return Err(err(KIND, path, i + 2, "grid must be uniform").into());
        }
    }
    Ok(RadialProfile { r, w, dw, amplitude, theta, r_max })
}

// ---------------------------------------------------------------------------
// sweep tables

/// One row of the per-d sweep CSV (solve diagnostics plus symmetry columns).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub d: f64,
    pub m_d: f64,
    pub m_test: f64,
    pub t0: f64,
    pub dist_over_sqrtd: f64,
    pub profile_sup_err: f64,
    pub mu1: f64,
    pub budget: f64,
    pub refl_residual: f64,
    pub angular_min: f64,
    pub vertical_min: f64,
    pub maxima_count: usize,
}

pub const SWEEP_HEADER: &str = "d,m_d,M_test,t0,dist_over_sqrtd,profile_sup_err,mu1,budget,refl_residual,angular_min,vertical_min,maxima_count";

pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<(), IoError> {
    let mut out = String::new();
    let _ = writeln!(out, "{SWEEP_HEADER}");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(r.d),
            fmt_f64(r.m_d),
            fmt_f64(r.m_test),
            fmt_f64(r.t0),
            fmt_f64(r.dist_over_sqrtd),
            fmt_f64(r.profile_sup_err),
            fmt_f64(r.mu1),
            fmt_f64(r.budget),
            fmt_f64(r.refl_residual),
            fmt_f64(r.angular_min),
            fmt_f64(r.vertical_min),
            r.maxima_count
        );
    }
    write_string(path, &out)
}

pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepRow>, IoError> {
    const KIND: &str = "sweep-csv";
    let text = read_to_string(path)?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            if line.trim() != SWEEP_HEADER {
                return Err(err(KIND, path, 1, "unexpected header").into());
            }
            continue;
        }
        let toks: Vec<&str> = line.split(',').collect();
        if toks.len() != 12 {
            return Err(err(KIND, path, i + 1, "expected 12 columns").into());
        }
        let f = |j: usize| parse_f64(toks[j], KIND, path, i + 1, false);
        rows.push(SweepRow {
            d: f(0)?,
            m_d: f(1)?,
            m_test: f(2)?,
            t0: f(3)?,
            dist_over_sqrtd: f(4)?,
            profile_sup_err: f(5)?,
            mu1: f(6)?,
            budget: f(7)?,
            refl_residual: f(8)?,
            angular_min: f(9)?,
            vertical_min: f(10)?,
            maxima_count: toks[11]
                .trim()
                .parse()
                .map_err(|_| err(KIND, path, i + 1, "bad maxima_count"))?,
        });
    }
    Ok(rows)
}

pub const EXPANSION_HEADER: &str = "d,m_test_over_d,t0,flat_level_over_d,flat_t0";

pub fn write_expansion_csv(path: &Path, rows: &[ExpansionRow]) -> Result<(), IoError> {
    let mut out = String::new();
    let _ = writeln!(out, "{EXPANSION_HEADER}");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(r.d),
            fmt_f64(r.m_test_over_d),
            fmt_f64(r.t0),
            fmt_f64(r.flat_level_over_d),
            fmt_f64(r.flat_t0)
        );
    }
    write_string(path, &out)
}

pub fn read_expansion_csv(path: &Path) -> Result<Vec<ExpansionRow>, IoError> {
    const KIND: &str = "expansion-csv";
    let text = read_to_string(path)?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            if line.trim() != EXPANSION_HEADER {
                return Err(err(KIND, path, 1, "unexpected header").into());
            }
            continue;
        }
        let toks: Vec<&str> = line.split(',').collect();
        if toks.len() != 5 {
            return Err(err(KIND, path, i + 1, "expected 5 columns").into());
        }
        let f = |j: usize| parse_f64(toks[j], KIND, path, i + 1, false);
        rows.push(ExpansionRow {
            d: f(0)?,
            m_test_over_d: f(1)?,
            t0: f(2)?,
            flat_level_over_d: f(3)?,
            flat_t0: f(4)?,
        });
    }
    Ok(rows)
}

/// Serialize any serde value as pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| IoError::Invalid(format!("json serialization: {e}")))?;
    text.push('\n');
    write_string(path, &text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_disk_mesh;

    fn tmp(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("nb-core-io-tests");
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn mesh_round_trip_bitwise() {
        let mesh = build_disk_mesh(1.0, 0.3, Some(([0.0, 1.0], 1))).unwrap();
        let p = tmp("round.mesh");
        write_mesh(&p, &mesh).unwrap();
        let back = read_mesh(&p).unwrap();
        assert_eq!(mesh.node_count(), back.node_count());
        for (a, b) in mesh.nodes().iter().zip(back.nodes()) {
            assert_eq!(a, b);
        }
        assert_eq!(mesh.triangles(), back.triangles());
        assert_eq!(mesh.boundary_flags(), back.boundary_flags());
        // and the file itself is reproduced byte-for-byte
        let p2 = tmp("round2.mesh");
        write_mesh(&p2, &back).unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), std::fs::read(&p2).unwrap());
    }

    #[test]
    fn field_round_trip_bitwise() {
        let mesh = Arc::new(build_disk_mesh(1.0, 0.4, None).unwrap());
        let vals = crate::numerics::uniform_samples(11, mesh.node_count(), -3.0, 3.0);
        let f = Field::new(mesh.clone(), vals.clone()).unwrap();
        let p = tmp("round.field");
        write_field(&p, &f).unwrap();
        let back = read_field(&p, &mesh).unwrap();
        assert_eq!(back.values(), vals.as_slice());
    }

    #[test]
    fn field_wrong_count_is_line_one_error() {
        let mesh = Arc::new(build_disk_mesh(1.0, 0.4, None).unwrap());
        let p = tmp("bad.field");
        std::fs::write(&p, "3\n1.0\n2.0\n3.0\n").unwrap();
        match read_field(&p, &mesh) {
            Err(IoError::Format(e)) => assert_eq!(e.line, 1),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn mesh_bad_index_names_line() {
        let p = tmp("bad.mesh");
        std::fs::write(&p, "3 1\n0 0 1\n1 0 1\n0 1 1\n0 1 3\n").unwrap();
        match read_mesh(&p) {
            Err(IoError::Format(e)) => {
                assert_eq!(e.line, 5);
                assert!(e.message.contains("out of range"));
            }
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn mesh_rejects_nan() {
        let p = tmp("nan.mesh");
        std::fs::write(&p, "3 1\n0 0 1\nnan 0 1\n0 1 1\n0 1 2\n").unwrap();
        assert!(matches!(read_mesh(&p), Err(IoError::Format(_))));
    }

    #[test]
    fn profile_round_trip() {
        let prof = crate::radial::shoot_ground_state(1e-8, 25.0).unwrap();
        let p = tmp("round.profile");
        write_profile(&p, &prof).unwrap();
        let back = read_profile(&p).unwrap();
        assert_eq!(back.amplitude, prof.amplitude);
        assert_eq!(back.theta, prof.theta);
        assert_eq!(back.w, prof.w);
        assert_eq!(back.dw, prof.dw);
    }

    #[test]
    fn profile_header_required() {
        let p = tmp("bad.profile");
        std::fs::write(&p, "1.0 2.0 3.0\n0 1 0\n").unwrap();
        match read_profile(&p) {
            Err(IoError::Format(e)) => assert_eq!(e.line, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sweep_csv_round_trip() {
        let rows = vec![SweepRow {
            d: 0.1,
            m_d: 0.123456789012345678,
            m_test: 0.2,
            t0: 1.01,
            dist_over_sqrtd: 0.0,
            profile_sup_err: 0.05,
            mu1: 0.8,
            budget: 9.0,
            refl_residual: 1e-3,
            angular_min: -1e-5,
            vertical_min: 2e-4,
            maxima_count: 1,
        }];
        let p = tmp("round.csv");
        write_sweep_csv(&p, &rows).unwrap();
        let back = read_sweep_csv(&p).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].m_d, rows[0].m_d);
        assert_eq!(back[0].maxima_count, 1);
    }
}

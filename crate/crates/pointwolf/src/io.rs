//! Reading and writing point cloud files.
//!
//! Two formats are supported: plain `xyz` text (one point per line, three
//! whitespace-separated floats, `#` comments and blank lines skipped) and
//! an ascii PLY subset (a `vertex` element with `x`, `y`, `z` properties;
//! every other element and property is parsed past and ignored).
//! Coordinates are written with 9 significant digits, so a write→read
//! round trip reproduces them to well under 1e-7.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use nalgebra::Vector3;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};

/// Supported file formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CloudFormat {
    Xyz,
    PlyAscii,
}

impl CloudFormat {
    /// Detects a format from the path's extension.
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase());
        match ext.as_deref() {
            Some("xyz") | Some("txt") => Ok(CloudFormat::Xyz),
            Some("ply") => Ok(CloudFormat::PlyAscii),
            _ => Err(Error::InvalidInput(format!(
                "cannot infer a cloud format from '{}'; expected a .xyz/.txt/.ply \
                 extension or an explicit format",
                path.display()
            ))),
        }
    }

    /// Parses a format name as used on the command line.
    pub fn parse_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "xyz" => Ok(CloudFormat::Xyz),
            "ply" => Ok(CloudFormat::PlyAscii),
            other => Err(Error::InvalidArgument(format!(
                "unknown format '{other}' (expected 'xyz' or 'ply')"
            ))),
        }
    }

    /// Canonical file extension for the format.
    pub fn extension(&self) -> &'static str {
        match self {
            CloudFormat::Xyz => "xyz",
            CloudFormat::PlyAscii => "ply",
        }
    }
}

/// Reads a cloud, inferring the format from the file extension.
pub fn read_cloud(path: &Path) -> Result<PointCloud> {
    read_cloud_with_format(path, CloudFormat::from_path(path)?)
}

/// Reads a cloud in an explicitly chosen format, regardless of extension.
pub fn read_cloud_with_format(path: &Path, format: CloudFormat) -> Result<PointCloud> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let points = match format {
        CloudFormat::Xyz => parse_xyz(path, reader)?,
        CloudFormat::PlyAscii => parse_ply(path, reader)?,
    };
    if points.is_empty() {
        return Err(Error::InvalidInput(format!(
            "{}: no points in file",
            path.display()
        )));
    }
    PointCloud::new(points)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

/// Writes a cloud with 9 significant digits per coordinate.
pub fn write_cloud(pc: &PointCloud, path: &Path, format: CloudFormat) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let io_err = |e| Error::io(path, e);
    match format {
        CloudFormat::Xyz => {
            for p in pc.iter() {
                writeln!(out, "{:.8e} {:.8e} {:.8e}", p.x, p.y, p.z).map_err(io_err)?;
            }
        }
        CloudFormat::PlyAscii => {
            writeln!(out, "ply").map_err(io_err)?;
            writeln!(out, "format ascii 1.0").map_err(io_err)?;
            writeln!(out, "element vertex {}", pc.len()).map_err(io_err)?;
            writeln!(out, "property double x").map_err(io_err)?;
            writeln!(out, "property double y").map_err(io_err)?;
            writeln!(out, "property double z").map_err(io_err)?;
            writeln!(out, "end_header").map_err(io_err)?;
            for p in pc.iter() {
                writeln!(out, "{:.8e} {:.8e} {:.8e}", p.x, p.y, p.z).map_err(io_err)?;
            }
        }
    }
    out.flush().map_err(io_err)
}

fn parse_coordinate(path: &Path, line_no: usize, field: &str) -> Result<f64> {
    field.parse::<f64>().map_err(|_| {
        Error::parse(
            path,
            line_no,
            format!("expected a decimal number, got '{field}'"),
        )
    })
}

fn parse_xyz(path: &Path, reader: impl BufRead) -> Result<Vec<Vector3<f64>>> {
    let mut points = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                path,
                line_no,
                format!("expected 3 coordinates, got {} fields", fields.len()),
            ));
        }
        points.push(Vector3::new(
            parse_coordinate(path, line_no, fields[0])?,
            parse_coordinate(path, line_no, fields[1])?,
            parse_coordinate(path, line_no, fields[2])?,
        ));
    }
    Ok(points)
}

/// One element declaration from a PLY header.
struct PlyElement {
    name: String,
    count: usize,
    properties: Vec<String>,
}

fn parse_ply(path: &Path, reader: impl BufRead) -> Result<Vec<Vector3<f64>>> {
    let mut lines = reader.lines().enumerate();
    let mut next_line = |expect: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some((idx, Ok(line))) => Ok((idx + 1, line)),
            Some((_, Err(e))) => Err(Error::io(path, e)),
            None => Err(Error::InvalidInput(format!(
                "{}: unexpected end of file ({expect})",
                path.display()
            ))),
        }
    };

    let (line_no, magic) = next_line("expected 'ply' magic")?;
    if magic.trim() != "ply" {
        return Err(Error::parse(path, line_no, "not a PLY file (missing 'ply' magic)"));
    }
    let (line_no, format) = next_line("expected format line")?;
    if format.trim() != "format ascii 1.0" {
        return Err(Error::parse(
            path,
            line_no,
            format!("unsupported PLY format '{}' (only ascii 1.0)", format.trim()),
        ));
    }

    let mut elements: Vec<PlyElement> = Vec::new();
    loop {
        let (line_no, line) = next_line("expected 'end_header'")?;
        let line = line.trim();
        if line == "end_header" {
            break;
        }
        let mut words = line.split_whitespace();
        match words.next() {
            Some("comment") | Some("obj_info") | None => {}
            Some("element") => {
                let name = words.next().ok_or_else(|| {
                    Error::parse(path, line_no, "element declaration missing a name")
                })?;
                let count = words
                    .next()
                    .and_then(|w| w.parse::<usize>().ok())
                    .ok_or_else(|| {
                        Error::parse(path, line_no, "element declaration missing a count")
                    })?;
                elements.push(PlyElement {
                    name: name.to_string(),
                    count,
                    properties: Vec::new(),
                });
            }
            Some("property") => {
                let element = elements.last_mut().ok_or_else(|| {
                    Error::parse(path, line_no, "property declared before any element")
                })?;
                // A list property occupies a variable number of fields per
                // line, which the fixed-column reader below cannot skip.
                let words: Vec<&str> = words.collect();
                if words.first() == Some(&"list") && element.name == "vertex" {
                    return Err(Error::parse(
                        path,
                        line_no,
                        "list properties on the vertex element are not supported",
                    ));
                }
                let name = words.last().ok_or_else(|| {
                    Error::parse(path, line_no, "property declaration missing a name")
                })?;
                element.properties.push(name.to_string());
            }
            Some(other) => {
                return Err(Error::parse(
                    path,
                    line_no,
                    format!("unrecognized header keyword '{other}'"),
                ));
            }
        }
    }

    let vertex = elements
        .iter()
        .find(|e| e.name == "vertex")
        .ok_or_else(|| {
            Error::InvalidInput(format!("{}: no vertex element in header", path.display()))
        })?;
    let coord_col = |axis: &str| -> Result<usize> {
        vertex.properties.iter().position(|p| p == axis).ok_or_else(|| {
            Error::InvalidInput(format!(
                "{}: vertex element lacks a '{axis}' property",
                path.display()
            ))
        })
    };
    let cols = [coord_col("x")?, coord_col("y")?, coord_col("z")?];

    let mut points = Vec::new();
    for element in &elements {
        let is_vertex = element.name == "vertex";
        for _ in 0..element.count {
            let (line_no, line) = next_line("body ended before all declared rows")?;
            if !is_vertex {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != vertex.properties.len() {
                return Err(Error::parse(
                    path,
                    line_no,
                    format!(
                        "expected {} fields per vertex, got {}",
                        vertex.properties.len(),
                        fields.len()
                    ),
                ));
            }
            points.push(Vector3::new(
                parse_coordinate(path, line_no, fields[cols[0]])?,
                parse_coordinate(path, line_no, fields[cols[1]])?,
                parse_coordinate(path, line_no, fields[cols[2]])?,
            ));
        }
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn write_temp(contents: &str, ext: &str) -> (tempfile::TempDir, std::path::PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(format!("cloud.{ext}"));
        let mut f = File::create(&path).unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        (dir, path)
    }

    #[test]
    fn xyz_parses_plain_points() {
        let (_dir, path) = write_temp("0 0 0\n1 0 0\n", "xyz");
        let pc = read_cloud(&path).unwrap();
        assert_eq!(pc.len(), 2);
        assert_eq!(pc.points()[1], Vector3::new(1.0, 0.0, 0.0));
    }

    #[test]
    fn xyz_skips_comments_and_blank_lines() {
        let (_dir, path) = write_temp("# comment\n\n0.5 -0.5 2e-1\n", "xyz");
        let pc = read_cloud(&path).unwrap();
        assert_eq!(pc.len(), 1);
        assert_eq!(pc.points()[0], Vector3::new(0.5, -0.5, 0.2));
    }

    #[test]
    fn xyz_reports_the_malformed_line_number() {
        let (_dir, path) = write_temp("0 0 0\n1 2\n", "xyz");
        match read_cloud(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn xyz_rejects_non_numeric_fields_and_empty_files() {
        let (_dir, path) = write_temp("a b c\n", "xyz");
        assert!(matches!(read_cloud(&path), Err(Error::Parse { line: 1, .. })));
        let (_dir2, empty) = write_temp("# nothing here\n", "xyz");
        assert!(matches!(read_cloud(&empty), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn ply_parses_a_minimal_vertex_file() {
        let body = "ply\nformat ascii 1.0\nelement vertex 3\n\
                    property float x\nproperty float y\nproperty float z\n\
                    end_header\n0 0 0\n1 0 0\n0 1 0\n";
        let (_dir, path) = write_temp(body, "ply");
        let pc = read_cloud(&path).unwrap();
        assert_eq!(pc.len(), 3);
        assert_eq!(pc.points()[2], Vector3::new(0.0, 1.0, 0.0));
    }

    #[test]
    fn ply_ignores_extra_properties_and_elements() {
        let body = "ply\nformat ascii 1.0\ncomment made by hand\n\
                    element vertex 2\n\
                    property float x\nproperty float confidence\n\
                    property float y\nproperty float z\n\
                    element face 1\nproperty int a\n\
                    end_header\n1 9 2 3\n4 9 5 6\n0\n";
        let (_dir, path) = write_temp(body, "ply");
        let pc = read_cloud(&path).unwrap();
        assert_eq!(pc.len(), 2);
        assert_eq!(pc.points()[0], Vector3::new(1.0, 2.0, 3.0));
        assert_eq!(pc.points()[1], Vector3::new(4.0, 5.0, 6.0));
    }

    #[test]
    fn ply_rejects_missing_magic_binary_format_and_missing_parts() {
        let (_d1, p1) = write_temp("plyx\n", "ply");
        assert!(read_cloud(&p1).is_err());
        let (_d2, p2) = write_temp("ply\nformat binary_little_endian 1.0\n", "ply");
        assert!(read_cloud(&p2).is_err());
        let (_d3, p3) = write_temp(
            "ply\nformat ascii 1.0\nelement face 0\nend_header\n",
            "ply",
        );
        assert!(read_cloud(&p3).is_err());
        let (_d4, p4) = write_temp(
            "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\n\
             property float y\nend_header\n0 0\n",
            "ply",
        );
        assert!(read_cloud(&p4).is_err());
        let (_d5, p5) = write_temp(
            "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\n\
             property float y\nproperty float z\nend_header\n0 0 0\n",
            "ply",
        );
        assert!(read_cloud(&p5).is_err());
    }

    #[test]
    fn explicit_format_overrides_the_extension() {
        let body = "ply\nformat ascii 1.0\nelement vertex 1\n\
                    property float x\nproperty float y\nproperty float z\n\
                    end_header\n7 8 9\n";
        let (_dir, path) = write_temp(body, "xyz");
        assert!(read_cloud(&path).is_err());
        let pc = read_cloud_with_format(&path, CloudFormat::PlyAscii).unwrap();
        assert_eq!(pc.points()[0], Vector3::new(7.0, 8.0, 9.0));
    }

    #[test]
    fn unknown_extension_needs_an_explicit_format() {
        assert!(CloudFormat::from_path(Path::new("cloud.bin")).is_err());
        assert!(CloudFormat::parse_name("hdf5").is_err());
        assert_eq!(CloudFormat::parse_name("XYZ").unwrap(), CloudFormat::Xyz);
    }

    #[test]
    fn round_trip_is_faithful_in_both_formats() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let pc = PointCloud::new(
            (0..1000)
                .map(|_| {
                    loop {
                        let v = Vector3::new(
                            rng.random::<f64>() * 2.0 - 1.0,
                            rng.random::<f64>() * 2.0 - 1.0,
                            rng.random::<f64>() * 2.0 - 1.0,
                        );
                        if v.norm() <= 1.0 {
                            break v;
                        }
                    }
                })
                .collect(),
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        for format in [CloudFormat::Xyz, CloudFormat::PlyAscii] {
            let path = dir.path().join(format!("rt.{}", format.extension()));
            write_cloud(&pc, &path, format).unwrap();
            let back = read_cloud(&path).unwrap();
            assert_eq!(back.len(), pc.len());
            let max_err = pc
                .iter()
                .zip(back.iter())
                .map(|(a, b)| (a - b).abs().max())
                .fold(0.0f64, f64::max);
            assert!(max_err <= 1e-7, "round-trip error {max_err}");
        }
    }

    #[test]
    fn reading_a_missing_file_is_an_io_error_with_path() {
        let err = read_cloud(Path::new("/nonexistent/some.xyz")).unwrap_err();
        match err {
            Error::Io { path, .. } => assert!(path.ends_with("some.xyz")),
            other => panic!("expected io error, got {other}"),
        }
    }
}

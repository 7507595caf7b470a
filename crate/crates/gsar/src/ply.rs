//! ASCII PLY point clouds with `x y z` float positions and `red green blue`
//! uchar colours.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use gsar_core::pointcloud::{Point, PointCloud};
use gsar_core::rotation::Vec3;

use crate::error::{io_err, Error, Result};

const REQUIRED: [&str; 6] = ["x", "y", "z", "red", "green", "blue"];

struct Element {
    name: String,
    count: usize,
    properties: Vec<String>,
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Ply {
        line,
        message: message.into(),
    }
}

/// Parses an ASCII PLY document. Other elements and extra vertex
/// properties are skipped.
pub fn parse_ply(text: &str) -> Result<PointCloud> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, "ply")) => {}
        Some((n, _)) => return Err(err(n, "missing 'ply' magic")),
        None => return Err(err(1, "empty file")),
    }

    let mut elements: Vec<Element> = Vec::new();
    let mut format_seen = false;
    let mut header_end = None;
    for (n, line) in lines.by_ref() {
        let mut words = line.split_whitespace();
        match words.next() {
            Some("format") => {
                if words.next() != Some("ascii") {
                    return Err(err(n, "only 'format ascii 1.0' is supported"));
                }
                format_seen = true;
            }
            Some("comment") | Some("obj_info") | None => {}
            Some("element") => {
                let (Some(name), Some(count)) = (words.next(), words.next()) else {
                    return Err(err(n, "malformed element line"));
                };
                let count = count
                    .parse()
                    .map_err(|_| err(n, format!("bad element count '{count}'")))?;
                elements.push(Element {
                    name: name.to_string(),
                    count,
                    properties: Vec::new(),
                });
            }
            Some("property") => {
                let el = elements
                    .last_mut()
                    .ok_or_else(|| err(n, "property before any element"))?;
                let name = match words.next() {
                    Some("list") => words.nth(2),
                    Some(_) => words.next(),
                    None => None,
                };
                let name = name.ok_or_else(|| err(n, "malformed property line"))?;
                el.properties.push(name.to_string());
            }
            Some("end_header") => {
                header_end = Some(n);
                break;
            }
            Some(other) => return Err(err(n, format!("unexpected header keyword '{other}'"))),
        }
    }
    let header_end = header_end.ok_or_else(|| err(text.lines().count(), "missing end_header"))?;
    if !format_seen {
        return Err(err(header_end, "missing format line"));
    }
    let vertex_pos = elements
        .iter()
        .position(|e| e.name == "vertex")
        .ok_or_else(|| err(header_end, "no vertex element"))?;
    let vertex = &elements[vertex_pos];
    let mut columns = [0usize; 6];
    for (c, want) in columns.iter_mut().zip(REQUIRED) {
        *c = vertex
            .properties
            .iter()
            .position(|p| p == want)
            .ok_or_else(|| err(header_end, format!("vertex property '{want}' missing")))?;
    }
    if vertex.count == 0 {
        return Err(Error::Core(gsar_core::Error::EmptyCloud));
    }

    let mut data = lines.filter(|(_, l)| !l.is_empty());
    let mut last_line = header_end;
    let mut next = |what: &str| -> Result<(usize, &str)> {
        let (n, l) = data
            .next()
            .ok_or_else(|| err(last_line, format!("file ends before all {what} rows")))?;
        last_line = n;
        Ok((n, l))
    };
    let mut points = Vec::with_capacity(vertex.count);
    for (i, el) in elements.iter().enumerate() {
        for _ in 0..el.count {
            let (n, line) = next(&el.name)?;
            if i != vertex_pos {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != vertex.properties.len() {
                return Err(err(
                    n,
                    format!(
                        "expected {} vertex values, found {}",
                        vertex.properties.len(),
                        fields.len()
                    ),
                ));
            }
            let coord = |k: usize| -> Result<f64> {
                let s = fields[columns[k]];
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| err(n, format!("bad {} value '{s}'", REQUIRED[k])))
            };
            let channel = |k: usize| -> Result<u8> {
                let s = fields[columns[k]];
                s.parse::<u8>()
                    .map_err(|_| err(n, format!("bad {} value '{s}'", REQUIRED[k])))
            };
            points.push(Point::new(
                Vec3::new(coord(0)?, coord(1)?, coord(2)?),
                [channel(3)?, channel(4)?, channel(5)?],
            ));
        }
    }
    if let Some((n, _)) = data.next() {
        return Err(err(n, "more data rows than the header declares"));
    }
    Ok(PointCloud::new(points))
}

pub fn read_ply(path: impl AsRef<Path>) -> Result<PointCloud> {
    let path = path.as_ref();
    parse_ply(&fs::read_to_string(path).map_err(io_err(path))?)
}

/// Formats a cloud as ASCII PLY with nine significant digits per
/// coordinate.
pub fn format_ply(cloud: &PointCloud) -> Result<String> {
    if cloud.is_empty() {
        return Err(Error::Core(gsar_core::Error::EmptyCloud));
    }
    let mut s = String::with_capacity(64 + cloud.len() * 52);
    s.push_str("ply\nformat ascii 1.0\n");
    let _ = writeln!(s, "element vertex {}", cloud.len());
    for p in ["x", "y", "z"] {
        let _ = writeln!(s, "property float {p}");
    }
    for p in ["red", "green", "blue"] {
        let _ = writeln!(s, "property uchar {p}");
    }
    s.push_str("end_header\n");
    for p in &cloud.points {
        let [x, y, z] = p.position.to_array();
        let [r, g, b] = p.color;
        let _ = writeln!(s, "{x:.8e} {y:.8e} {z:.8e} {r} {g} {b}");
    }
    Ok(s)
}

pub fn write_ply(cloud: &PointCloud, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_ply(cloud)?).map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "ply\nformat ascii 1.0\ncomment test\nelement vertex 2\nproperty float x\nproperty float y\n\
property float z\nproperty uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n\
0 0 0 255 0 0\n1.5 -2 3e-1 0 128 255\n";

    #[test]
    fn parses_small_file() {
        let c = parse_ply(SMALL).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.points[1].position, Vec3::new(1.5, -2.0, 0.3));
        assert_eq!(c.points[1].color, [0, 128, 255]);
    }

    #[test]
    fn property_order_and_extras() {
        let text =
            "ply\nformat ascii 1.0\nelement vertex 1\nproperty uchar red\nproperty float nx\n\
property float z\nproperty float y\nproperty float x\nproperty uchar green\nproperty uchar blue\n\
element face 1\nproperty list uchar int vertex_indices\nend_header\n9 0.5 3 2 1 8 7\n3 0 0 0\n";
        let c = parse_ply(text).unwrap();
        assert_eq!(c.points[0].position, Vec3::new(1.0, 2.0, 3.0));
        assert_eq!(c.points[0].color, [9, 8, 7]);
    }

    #[test]
    fn count_mismatch_is_an_error() {
        let short = SMALL.replace("element vertex 2", "element vertex 3");
        assert!(matches!(
            parse_ply(&short),
            Err(Error::Ply { line: 13, .. })
        ));
        let long = SMALL.replace("element vertex 2", "element vertex 1");
        assert!(matches!(parse_ply(&long), Err(Error::Ply { line: 13, .. })));
    }

    #[test]
    fn empty_cloud() {
        let text = SMALL.replace("element vertex 2", "element vertex 0");
        let text = text.split("end_header").next().unwrap().to_string() + "end_header\n";
        assert_eq!(parse_ply(&text).unwrap_err().to_string(), "empty cloud");
        assert_eq!(
            format_ply(&PointCloud::default()).unwrap_err().to_string(),
            "empty cloud"
        );
    }

    #[test]
    fn header_errors_carry_line_numbers() {
        let missing = SMALL.replace("property uchar green\n", "");
        match parse_ply(&missing) {
            Err(Error::Ply { line, message }) => {
                assert_eq!(line, 10);
                assert!(message.contains("green"));
            }
            other => panic!("{other:?}"),
        }
        let bad = SMALL.replace("1.5 -2", "1.5 abc");
        assert!(matches!(parse_ply(&bad), Err(Error::Ply { line: 13, .. })));
        assert!(matches!(
            parse_ply("ply\nformat binary_little_endian 1.0\n"),
            Err(Error::Ply { line: 2, .. })
        ));
        assert!(matches!(parse_ply("nope"), Err(Error::Ply { line: 1, .. })));
    }

    #[test]
    fn round_trip() {
        let c = parse_ply(SMALL).unwrap();
        assert_eq!(parse_ply(&format_ply(&c).unwrap()).unwrap(), c);
    }
}

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{BoundaryLabel, MeshError, PolygonalMesh};
use crate::geometry::Point;
use crate::scalar::Real;

pub fn load_mesh<T: Real>(path: impl AsRef<Path>) -> Result<PolygonalMesh<T>, MeshError> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| MeshError::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_mesh(&text)
}

pub fn save_mesh<T: Real>(mesh: &PolygonalMesh<T>, path: impl AsRef<Path>) -> Result<(), MeshError> {
    std::fs::write(path.as_ref(), write_mesh(mesh))
        .map_err(|e| MeshError::Io(format!("{}: {e}", path.as_ref().display())))
}

/// Text with `vertices`, `elements` and `boundary` sections; coordinates in
/// shortest round-trip form.
pub fn write_mesh<T: Real>(mesh: &PolygonalMesh<T>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "vertices {}", mesh.vertices.len());
    for (i, p) in mesh.vertices.iter().enumerate() {
        let _ = writeln!(s, "{i} {} {}", p.x.to_f64_lossy(), p.y.to_f64_lossy());
    }
    let _ = writeln!(s, "elements {}", mesh.elements.len());
    for (i, e) in mesh.elements.iter().enumerate() {
        let ids: Vec<String> = e.vertices.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "{i} {}", ids.join(" "));
    }
    let labels = mesh.labels();
    let _ = writeln!(s, "boundary {}", labels.len());
    for ((a, b), l) in labels {
        let _ = writeln!(s, "{a} {b} {l}");
    }
    s
}

#[derive(PartialEq)]
enum Section {
    None,
    Vertices,
    Elements,
    Boundary,
}

pub fn parse_mesh<T: Real>(text: &str) -> Result<PolygonalMesh<T>, MeshError> {
    let mut section = Section::None;
    let mut vertices: Vec<Point<T>> = Vec::new();
    let mut polys: Vec<Vec<usize>> = Vec::new();
    let mut labels = BTreeMap::new();
    let mut expected = [None; 3];
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let err = |msg: String| MeshError::Parse { line: line_no, msg };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let header = match toks[0] {
            "vertices" => Some((Section::Vertices, 0)),
            "elements" => Some((Section::Elements, 1)),
            "boundary" => Some((Section::Boundary, 2)),
            _ => None,
        };
        if let Some((sec, slot)) = header {
            let count: usize = toks
                .get(1)
                .ok_or_else(|| err("missing count".into()))?
                .parse()
                .map_err(|_| err("bad count".into()))?;
            expected[slot] = Some(count);
            section = sec;
            continue;
        }
        let int = |s: &str| s.parse::<usize>().map_err(|_| err(format!("bad integer `{s}`")));
        match section {
            Section::None => return Err(err("data before any section header".into())),
            Section::Vertices => {
                if toks.len() != 3 {
                    return Err(err("vertex line needs `id x y`".into()));
                }
                if int(toks[0])? != vertices.len() {
                    return Err(err("vertex ids must be consecutive from 0".into()));
                }
                let f = |s: &str| s.parse::<f64>().map_err(|_| err(format!("bad number `{s}`")));
                vertices.push(Point::new(T::lit(f(toks[1])?), T::lit(f(toks[2])?)));
            }
            Section::Elements => {
                if toks.len() < 4 {
                    return Err(err("element needs an id and at least three vertices".into()));
                }
                if int(toks[0])? != polys.len() {
                    return Err(err("element ids must be consecutive from 0".into()));
                }
                polys.push(toks[1..].iter().map(|t| int(t)).collect::<Result<_, _>>()?);
            }
            Section::Boundary => {
                if toks.len() != 3 {
                    return Err(err("boundary line needs `va vb label`".into()));
                }
                let (a, b) = (int(toks[0])?, int(toks[1])?);
                let l: BoundaryLabel = toks[2].parse().map_err(err)?;
                if labels.insert((a.min(b), a.max(b)), l).is_some() {
                    return Err(err(format!("edge ({a}, {b}) labelled twice")));
                }
            }
        }
    }
    let got = [vertices.len(), polys.len(), labels.len()];
    for (i, name) in ["vertices", "elements", "boundary"].iter().enumerate() {
        match expected[i] {
            Some(c) if c != got[i] => {
                return Err(MeshError::Invalid(format!("{name}: header says {c}, found {}", got[i])))
            }
            None => return Err(MeshError::Invalid(format!("missing `{name}` section"))),
            _ => {}
        }
    }
    PolygonalMesh::from_parts(vertices, polys, &labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_cartesian_mesh, build_graded_mesh, GradedMeshSpec, Rect, SideLabels};

    #[test]
    fn single_triangle_file() {
        let text = "# one triangle\nvertices 3\n0 0 0\n1 1 0\n2 0 1\nelements 1\n0 0 1 2\nboundary 3\n0 1 R\n1 2 N\n0 2 D\n";
        let m = parse_mesh::<f64>(text).unwrap();
        assert_eq!(m.elements.len(), 1);
        assert_eq!(m.boundary_edges().count(), 3);
    }

    #[test]
    fn duplicate_incidence_is_an_error() {
        let text = "vertices 3\n0 0 0\n1 1 0\n2 0 1\nelements 2\n0 0 1 2\n1 0 1 2\nboundary 3\n0 1 R\n1 2 R\n0 2 R\n";
        assert!(parse_mesh::<f64>(text).is_err());
    }

    #[test]
    fn garbage_is_a_parse_error() {
        let text = "vertices 1\n0 zero 0\n";
        assert!(matches!(parse_mesh::<f64>(text), Err(MeshError::Parse { line: 2, .. })));
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let sides = SideLabels::uniform(BoundaryLabel::Robin);
        let meshes = [
            build_cartesian_mesh::<f64>(3, Rect { x0: -0.1, y0: 0.3, x1: 0.7, y1: 1.9 }, sides),
            build_graded_mesh(GradedMeshSpec::new(3, 1.0 / 3.0)).unwrap().mesh,
        ];
        for m in meshes {
            let text = write_mesh(&m);
            let back = parse_mesh::<f64>(&text).unwrap();
            assert_eq!(back.vertices, m.vertices);
            assert_eq!(write_mesh(&back), text);
        }
    }
}

//! Text mesh format:
//!
//! ```text
//! nodes N elements M
//! id x y            (N lines)
//! id n3|n4 v1 v2 v3 [v4]   (M lines)
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Ids are arbitrary
//! unique integers; they are renumbered densely in file order.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use super::{Mesh, Shape};
use crate::error::{Error, Result};
use crate::geometry::Vec2;

pub fn load_unstructured_mesh(path: impl AsRef<Path>) -> Result<Mesh> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_mesh(&text, path)
}

/// Parses mesh text; `origin` only labels error messages.
pub fn parse_mesh(text: &str, origin: impl Into<PathBuf>) -> Result<Mesh> {
    let origin = origin.into();
    let err = |line: usize, message: String| Error::Parse {
        path: origin.clone(),
        line,
        message,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or_else(|| err(1, "empty mesh file".into()))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 4 || h[0] != "nodes" || h[2] != "elements" {
        return Err(err(hline, format!("expected `nodes N elements M`, got `{header}`")));
    }
    let n_nodes: usize = h[1].parse().map_err(|_| err(hline, format!("bad node count `{}`", h[1])))?;
    let n_elems: usize = h[3]
        .parse()
        .map_err(|_| err(hline, format!("bad element count `{}`", h[3])))?;

    let mut node_index: HashMap<i64, usize> = HashMap::with_capacity(n_nodes);
    let mut positions = Vec::with_capacity(n_nodes);
    for _ in 0..n_nodes {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| err(hline, format!("file ends before {n_nodes} node lines")))?;
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 3 {
            return Err(err(ln, format!("node line needs `id x y`, got `{l}`")));
        }
        let id: i64 = f[0].parse().map_err(|_| err(ln, format!("bad node id `{}`", f[0])))?;
        let x: f64 = f[1].parse().map_err(|_| err(ln, format!("bad x `{}`", f[1])))?;
        let y: f64 = f[2].parse().map_err(|_| err(ln, format!("bad y `{}`", f[2])))?;
        if !(x.is_finite() && y.is_finite()) {
            return Err(err(ln, "non-finite coordinate".into()));
        }
        if node_index.insert(id, positions.len()).is_some() {
            return Err(err(ln, format!("duplicate node id {id}")));
        }
        positions.push(Vec2::new(x, y));
    }

    let mut elem_ids = std::collections::HashSet::with_capacity(n_elems);
    let mut cells = Vec::with_capacity(n_elems);
    for _ in 0..n_elems {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| err(hline, format!("file ends before {n_elems} element lines")))?;
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() < 2 {
            return Err(err(ln, format!("element line too short: `{l}`")));
        }
        let id: i64 = f[0].parse().map_err(|_| err(ln, format!("bad element id `{}`", f[0])))?;
        if !elem_ids.insert(id) {
            return Err(err(ln, format!("duplicate element id {id}")));
        }
        let shape = match f[1] {
            "n3" => Shape::Tri3,
            "n4" => Shape::Quad4,
            k => return Err(err(ln, format!("unknown element kind `{k}` (expected n3 or n4)"))),
        };
        if f.len() != 2 + shape.n_nodes() {
            return Err(err(
                ln,
                format!("element kind {} needs {} vertices", f[1], shape.n_nodes()),
            ));
        }
        let mut conn = Vec::with_capacity(shape.n_nodes());
        for v in &f[2..] {
            let vid: i64 = v.parse().map_err(|_| err(ln, format!("bad vertex id `{v}`")))?;
            let idx = *node_index
                .get(&vid)
                .ok_or_else(|| err(ln, format!("unknown node id {vid}")))?;
            conn.push(idx);
        }
        cells.push((shape, conn));
    }
    if let Some((ln, l)) = lines.next() {
        return Err(err(ln, format!("unexpected trailing content `{l}`")));
    }
    Mesh::from_parts(positions, cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_triangle() {
        let m = parse_mesh("nodes 3 elements 1\n1 0 0\n2 1 0\n3 0 1\n7 n3 1 2 3\n", "t").unwrap();
        assert_eq!(m.elements.len(), 1);
        assert_eq!(m.nodes.len(), 3);
        assert!((m.elements[0].area - 0.5).abs() < 1e-15);
    }

    #[test]
    fn duplicate_element_id() {
        let r = parse_mesh(
            "nodes 4 elements 2\n0 0 0\n1 1 0\n2 1 1\n3 0 1\n5 n3 0 1 2\n5 n3 0 2 3\n",
            "t",
        );
        match r {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 7),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        let cases = [
            ("nodes 1\n", 1),
            ("nodes 2 elements 0\n0 0 0\n1 x 0\n", 3),
            ("nodes 3 elements 1\n0 0 0\n1 1 0\n2 0 1\n0 n5 0 1 2\n", 5),
            ("nodes 3 elements 1\n0 0 0\n1 1 0\n2 0 1\n0 n3 0 1 9\n", 5),
        ];
        for (text, want) in cases {
            match parse_mesh(text, "t") {
                Err(Error::Parse { line, .. }) => assert_eq!(line, want, "{text}"),
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn inverted_is_geometry_error() {
        let r = parse_mesh("nodes 3 elements 1\n0 0 0\n1 0 1\n2 1 0\n0 n3 0 1 2\n", "t");
        assert!(matches!(r, Err(Error::Geometry(_))));
    }
}

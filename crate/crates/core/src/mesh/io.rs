//! Plain text mesh format.
//!
//! ```text
//! mfem-mesh 1 <dim>
//! vertices <n>
//! <x> <y> [<z>]
//! cells <m>
//! <tag> <v0> <v1> ...
//! ```
//!
//! `#` starts a comment; blank lines are ignored. Tags are `tri`, `quad`,
//! `tet`, `hex` and `prism`; vertex ids are zero based.

use std::fmt::Write as _;

use super::{build_mesh, Cell, Mesh};
use crate::error::{Error, Result};
use crate::refelem::CellShape;

pub const MAGIC: &str = "mfem-mesh";
pub const VERSION: u32 = 1;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    /// Next non-empty line with comments stripped, split into tokens.
    fn next_tokens(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        for (i, raw) in self.inner.by_ref() {
            self.last = i + 1;
            let content = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = content.split_whitespace().collect();
            if !tokens.is_empty() {
                return Ok((i + 1, tokens));
            }
        }
        Err(parse_err(self.last + 1, format!("unexpected end of input, expected {what}")))
    }
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse().map_err(|_| parse_err(line, format!("invalid {what} '{tok}'")))
}

fn section(lines: &mut Lines, name: &str) -> Result<usize> {
    let (ln, t) = lines.next_tokens(name)?;
    if t.len() != 2 || t[0] != name {
        return Err(parse_err(ln, format!("expected '{name} <count>'")));
    }
    parse_num(t[1], ln, "count")
}

/// Parses and validates a mesh.
pub fn read_mesh(text: &str) -> Result<Mesh> {
    let mut lines = Lines { inner: text.lines().enumerate(), last: 0 };
    let (ln, header) = lines.next_tokens("header")?;
    if header.len() != 3 || header[0] != MAGIC {
        return Err(parse_err(ln, format!("expected '{MAGIC} {VERSION} <dim>'")));
    }
    let version: u32 = parse_num(header[1], ln, "version")?;
    if version != VERSION {
        return Err(parse_err(ln, format!("unsupported version {version}")));
    }
    let dim: usize = parse_num(header[2], ln, "dimension")?;
    if dim != 2 && dim != 3 {
        return Err(parse_err(ln, format!("dimension must be 2 or 3, got {dim}")));
    }

    let nv = section(&mut lines, "vertices")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, t) = lines.next_tokens("vertex")?;
        if t.len() != dim {
            return Err(parse_err(ln, format!("vertex needs {dim} coordinates, got {}", t.len())));
        }
        let mut p = [0.0; 3];
        for (a, tok) in t.iter().enumerate() {
            p[a] = parse_num::<f64>(tok, ln, "coordinate")?;
            if !p[a].is_finite() {
                return Err(parse_err(ln, "non-finite coordinate"));
            }
        }
        vertices.push(p);
    }

    let nc = section(&mut lines, "cells")?;
    let mut cells = Vec::with_capacity(nc);
    for _ in 0..nc {
        let (ln, t) = lines.next_tokens("cell")?;
        let shape = CellShape::from_tag(t[0]).ok_or_else(|| parse_err(ln, format!("unknown cell tag '{}'", t[0])))?;
        if shape.dim() != dim {
            return Err(parse_err(ln, format!("'{}' cell in a {dim}D mesh", t[0])));
        }
        if t.len() != 1 + shape.vertex_count() {
            return Err(parse_err(ln, format!("'{}' needs {} vertex ids", t[0], shape.vertex_count())));
        }
        let mut ids = Vec::with_capacity(shape.vertex_count());
        for tok in &t[1..] {
            let v: usize = parse_num(tok, ln, "vertex id")?;
            if v >= nv {
                return Err(parse_err(ln, format!("vertex id {v} out of range")));
            }
            ids.push(v);
        }
        cells.push(Cell { shape, vertices: ids });
    }
    if let Ok((ln, _)) = lines.next_tokens("") {
        return Err(parse_err(ln, "trailing content after cells"));
    }
    build_mesh(dim, vertices, cells)
}

/// Serializes a mesh; coordinates use the shortest round-trip form.
pub fn write_mesh(mesh: &Mesh) -> String {
    let mut s = String::new();
    writeln!(s, "{MAGIC} {VERSION} {}", mesh.dim).unwrap();
    writeln!(s, "vertices {}", mesh.vertices.len()).unwrap();
    for v in &mesh.vertices {
        let coords: Vec<String> = v[..mesh.dim].iter().map(|c| format!("{c:?}")).collect();
        writeln!(s, "{}", coords.join(" ")).unwrap();
    }
    writeln!(s, "cells {}", mesh.cells.len()).unwrap();
    for c in &mesh.cells {
        let ids: Vec<String> = c.vertices.iter().map(|v| v.to_string()).collect();
        writeln!(s, "{} {}", c.shape.tag(), ids.join(" ")).unwrap();
    }
    s
}

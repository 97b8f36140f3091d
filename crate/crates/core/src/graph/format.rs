//! `.srg` text files.
//!
//! ```text
//! srg v1 n=2
//! vertex 1 centroid=<x>,<y>,<z> intensity=<m> volume=<v>
//! vertex 2 empty
//! edge 1 2 dvec=<x>,<y>,<z> vratio=<r> contrast=<c>
//! ```
//!
//! Vertices and edges are identified by structure label. Model files add a
//! `samples <K>` line and one `stddev vertex ...` / `stddev edge ...` line per
//! attribute line; the `vratio` standard deviation is in log space. Reals are
//! written with 17 significant digits so they parse back exactly.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Result, SrgError};

use super::attributes::{EdgeAttributes, VertexAttributes};
use super::model::{EdgeStats, Gaussian, Model, ModelStatistics, RatioStats, VertexStats};
use super::srg::Srg;

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn triple(v: [f64; 3]) -> String {
    format!("{},{},{}", real(v[0]), real(v[1]), real(v[2]))
}

fn write_attributes(out: &mut String, srg: &Srg) {
    let n = srg.n();
    let labels = srg.labels();
    writeln!(out, "srg v1 n={n}").unwrap();
    for (i, label) in labels.iter().enumerate() {
        match srg.vertex(i) {
            Some(v) => writeln!(
                out,
                "vertex {} centroid={} intensity={} volume={}",
                label,
                triple(v.centroid),
                real(v.mean_intensity),
                real(v.volume)
            ),
            None => writeln!(out, "vertex {label} empty"),
        }
        .unwrap();
    }
    for i in 0..n {
        for j in 0..n {
            if let Some(e) = srg.edge(i, j) {
                writeln!(
                    out,
                    "edge {} {} dvec={} vratio={} contrast={}",
                    labels[i],
                    labels[j],
                    triple(e.centroid_vector),
                    real(e.volume_ratio),
                    real(e.contrast)
                )
                .unwrap();
            }
        }
    }
}

/// Renders a graph as `.srg` text.
pub fn format_graph(srg: &Srg) -> String {
    let mut out = String::new();
    write_attributes(&mut out, srg);
    out
}

/// Renders a model (mean graph plus standard deviations) as `.srg` text.
pub fn format_model(model: &Model) -> String {
    let mut out = String::new();
    write_attributes(&mut out, &model.graph);
    let stats = &model.stats;
    let labels = &stats.labels;
    writeln!(out, "samples {}", stats.samples).unwrap();
    for (i, v) in stats.vertices.iter().enumerate() {
        writeln!(
            out,
            "stddev vertex {} centroid={} intensity={} volume={}",
            labels[i],
            triple(v.centroid.map(|g| g.stddev)),
            real(v.intensity.stddev),
            real(v.volume.stddev)
        )
        .unwrap();
    }
    let n = stats.n();
    for i in 0..n {
        for j in 0..n {
            if let Some(e) = stats.edge(i, j) {
                writeln!(
                    out,
                    "stddev edge {} {} dvec={} vratio={} contrast={}",
                    labels[i],
                    labels[j],
                    triple(e.centroid_vector.map(|g| g.stddev)),
                    real(e.volume_ratio.log_stddev),
                    real(e.contrast.stddev)
                )
                .unwrap();
            }
        }
    }
    out
}

struct Parser {
    line: usize,
}

impl Parser {
    fn err(&self, msg: impl Into<String>) -> SrgError {
        SrgError::GraphParse {
            line: self.line,
            msg: msg.into(),
        }
    }

    fn real(&self, s: &str) -> Result<f64> {
        let v: f64 = s
            .parse()
            .map_err(|_| self.err(format!("`{s}` is not a number")))?;
        if !v.is_finite() {
            return Err(self.err(format!("`{s}` is not finite")));
        }
        Ok(v)
    }

    fn triple(&self, s: &str) -> Result<[f64; 3]> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err(self.err(format!("`{s}` is not an x,y,z triple")));
        }
        Ok([
            self.real(parts[0])?,
            self.real(parts[1])?,
            self.real(parts[2])?,
        ])
    }

    fn label(&self, s: &str) -> Result<u32> {
        s.parse()
            .map_err(|_| self.err(format!("`{s}` is not a label")))
    }

    /// Parses `key=value` fields in a fixed order.
    fn fields<'a>(&self, tokens: &[&'a str], keys: &[&str]) -> Result<Vec<&'a str>> {
        if tokens.len() != keys.len() {
            return Err(self.err(format!("expected fields {keys:?}")));
        }
        tokens
            .iter()
            .zip(keys)
            .map(|(tok, key)| {
                tok.strip_prefix(key)
                    .and_then(|rest| rest.strip_prefix('='))
                    .ok_or_else(|| self.err(format!("expected `{key}=...`, found `{tok}`")))
            })
            .collect()
    }
}

#[derive(Default)]
struct Raw {
    n: Option<usize>,
    labels: Vec<u32>,
    vertices: Vec<Option<VertexAttributes>>,
    edges: HashMap<(u32, u32), EdgeAttributes>,
    samples: Option<usize>,
    vertex_sd: HashMap<u32, ([f64; 3], f64, f64)>,
    edge_sd: HashMap<(u32, u32), ([f64; 3], f64, f64)>,
}

fn parse_raw(text: &str) -> Result<Raw> {
    let mut raw = Raw::default();
    let mut p = Parser { line: 0 };
    for (idx, line) in text.lines().enumerate() {
        p.line = idx + 1;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if raw.n.is_none() {
            match tokens.as_slice() {
                ["srg", "v1", n] => {
                    let n = n
                        .strip_prefix("n=")
                        .and_then(|n| n.parse().ok())
                        .ok_or_else(|| p.err("header must be `srg v1 n=<n>`"))?;
                    raw.n = Some(n);
                    continue;
                }
                _ => return Err(p.err("missing `srg v1 n=<n>` header")),
            }
        }
        match tokens.as_slice() {
            ["vertex", id, "empty"] => {
                raw.labels.push(p.label(id)?);
                raw.vertices.push(None);
            }
            ["vertex", id, rest @ ..] => {
                let f = p.fields(rest, &["centroid", "intensity", "volume"])?;
                raw.labels.push(p.label(id)?);
                raw.vertices.push(Some(VertexAttributes {
                    centroid: p.triple(f[0])?,
                    mean_intensity: p.real(f[1])?,
                    volume: p.real(f[2])?,
                }));
            }
            ["edge", a, b, rest @ ..] => {
                let f = p.fields(rest, &["dvec", "vratio", "contrast"])?;
                let key = (p.label(a)?, p.label(b)?);
                let e = EdgeAttributes {
                    centroid_vector: p.triple(f[0])?,
                    volume_ratio: p.real(f[1])?,
                    contrast: p.real(f[2])?,
                };
                if raw.edges.insert(key, e).is_some() {
                    return Err(p.err(format!("duplicate edge {key:?}")));
                }
            }
            ["samples", k] => {
                raw.samples = Some(k.parse().map_err(|_| p.err("bad sample count"))?);
            }
            ["stddev", "vertex", id, rest @ ..] => {
                let f = p.fields(rest, &["centroid", "intensity", "volume"])?;
                raw.vertex_sd.insert(
                    p.label(id)?,
                    (p.triple(f[0])?, p.real(f[1])?, p.real(f[2])?),
                );
            }
            ["stddev", "edge", a, b, rest @ ..] => {
                let f = p.fields(rest, &["dvec", "vratio", "contrast"])?;
                raw.edge_sd.insert(
                    (p.label(a)?, p.label(b)?),
                    (p.triple(f[0])?, p.real(f[1])?, p.real(f[2])?),
                );
            }
            _ => return Err(p.err(format!("unrecognized line `{line}`"))),
        }
    }
    p.line += 1;
    let n = raw.n.ok_or_else(|| p.err("empty graph file"))?;
    if raw.vertices.len() != n {
        return Err(p.err(format!(
            "header declares {n} vertices, found {}",
            raw.vertices.len()
        )));
    }
    Ok(raw)
}

fn assemble(raw: &Raw) -> Result<Srg> {
    let n = raw.labels.len();
    let err = |msg: String| SrgError::GraphParse { line: 0, msg };
    let mut edges = vec![None; n * n];
    for i in 0..n {
        for j in 0..n {
            let key = (raw.labels[i], raw.labels[j]);
            let present = i != j && raw.vertices[i].is_some() && raw.vertices[j].is_some();
            match (present, raw.edges.get(&key)) {
                (true, Some(e)) => edges[i * n + j] = Some(*e),
                (true, None) => return Err(err(format!("missing edge {} {}", key.0, key.1))),
                (false, Some(_)) => {
                    return Err(err(format!("unexpected edge {} {}", key.0, key.1)))
                }
                (false, None) => {}
            }
        }
    }
    if raw.edges.len() != edges.iter().filter(|e| e.is_some()).count() {
        return Err(err("edge refers to an unknown vertex".into()));
    }
    Srg::from_parts(raw.labels.clone(), raw.vertices.clone(), edges).map_err(|e| err(e.to_string()))
}

pub fn parse_graph(text: &str) -> Result<Srg> {
    assemble(&parse_raw(text)?)
}

pub fn parse_model(text: &str) -> Result<Model> {
    let raw = parse_raw(text)?;
    let graph = assemble(&raw)?;
    let err = |msg: String| SrgError::GraphParse { line: 0, msg };
    let samples = raw
        .samples
        .ok_or_else(|| err("model file lacks a `samples` line".into()))?;
    let n = graph.n();
    let labels = graph.labels().to_vec();
    let g = |mean: f64, stddev: f64| Gaussian { mean, stddev };
    let mut vertices = Vec::with_capacity(n);
    for (i, &l) in labels.iter().enumerate() {
        let v = graph
            .vertex(i)
            .ok_or_else(|| err(format!("model vertex {l} is empty")))?;
        let (c, si, sv) = raw
            .vertex_sd
            .get(&l)
            .ok_or_else(|| err(format!("missing stddev for vertex {l}")))?;
        vertices.push(VertexStats {
            centroid: std::array::from_fn(|k| g(v.centroid[k], c[k])),
            intensity: g(v.mean_intensity, *si),
            volume: g(v.volume, *sv),
        });
    }
    let mut edges = vec![None; n * n];
    for i in 0..n {
        for j in 0..n {
            if let Some(e) = graph.edge(i, j) {
                let key = (labels[i], labels[j]);
                let (d, sr, sc) = raw
                    .edge_sd
                    .get(&key)
                    .ok_or_else(|| err(format!("missing stddev for edge {} {}", key.0, key.1)))?;
                edges[i * n + j] = Some(EdgeStats {
                    centroid_vector: std::array::from_fn(|k| g(e.centroid_vector[k], d[k])),
                    volume_ratio: RatioStats {
                        geometric_mean: e.volume_ratio,
                        log_stddev: *sr,
                    },
                    contrast: g(e.contrast, *sc),
                });
            }
        }
    }
    let stats = ModelStatistics {
        labels,
        samples,
        vertices,
        edges,
    };
    Ok(Model { graph, stats })
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| SrgError::io(path, e))
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<Srg> {
    parse_graph(&read_text(path.as_ref())?)
}

pub fn read_model(path: impl AsRef<Path>) -> Result<Model> {
    parse_model(&read_text(path.as_ref())?)
}

pub fn write_graph(path: impl AsRef<Path>, srg: &Srg) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_graph(srg)).map_err(|e| SrgError::io(path, e))
}

pub fn write_model(path: impl AsRef<Path>, model: &Model) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_model(model)).map_err(|e| SrgError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fit_model;

    fn sample(shift: f64) -> Srg {
        let v = |c: [f64; 3], m: f64, vol: f64| {
            Some(VertexAttributes {
                centroid: c,
                mean_intensity: m,
                volume: vol,
            })
        };
        Srg::from_vertices(
            vec![0, 1, 2],
            vec![
                v([1.0 / 3.0 + shift, 2.0, 3.0], 10.1, 1000.0),
                v([5.0, 5.5, 0.1], 40.0, 33.0),
                v([9.0, 1.0, 7.0], 77.7 + shift, 12.5),
            ],
        )
    }

    #[test]
    fn graph_text_roundtrip_is_exact() {
        let g = sample(0.0);
        let text = format_graph(&g);
        assert!(text.starts_with("srg v1 n=3\n"));
        assert_eq!(text.lines().filter(|l| l.starts_with("edge")).count(), 6);
        assert_eq!(parse_graph(&text).unwrap(), g);
    }

    #[test]
    fn empty_vertex_roundtrip() {
        let mut vertices = sample(0.0).vertices().to_vec();
        vertices[1] = None;
        let g = Srg::from_vertices(vec![0, 1, 2], vertices);
        let text = format_graph(&g);
        assert!(text.contains("vertex 1 empty"));
        assert_eq!(text.lines().filter(|l| l.starts_with("edge")).count(), 2);
        assert_eq!(parse_graph(&text).unwrap(), g);
    }

    #[test]
    fn model_text_roundtrip_is_exact() {
        let model =
            Model::from_stats(fit_model(&[sample(0.0), sample(0.4), sample(-0.1)]).unwrap());
        let text = format_model(&model);
        assert!(text.contains("samples 3"));
        assert_eq!(parse_model(&text).unwrap(), model);
    }

    #[test]
    fn malformed_files_rejected() {
        assert!(parse_graph("").is_err());
        assert!(parse_graph("srg v2 n=1\n").is_err());
        assert!(parse_graph("srg v1 n=2\nvertex 1 empty\n").is_err());
        let text = format_graph(&sample(0.0));
        let missing_edge: String = text
            .lines()
            .filter(|l| !l.starts_with("edge 1 2"))
            .map(|l| format!("{l}\n"))
            .collect();
        assert!(parse_graph(&missing_edge).is_err());
        let err =
            parse_graph("srg v1 n=1\nvertex 1 centroid=1,2 intensity=1 volume=1\n").unwrap_err();
        assert!(matches!(err, SrgError::GraphParse { line: 2, .. }));
        assert!(parse_model(&text).is_err());
    }
}

use std::collections::HashMap;

use crate::error::{Result, SrgError};
use crate::volume::{LabelVolume, ScalarVolume};

use super::attributes::{EdgeAttributes, VertexAttributes};
use super::regions::accumulate;

/// A fully connected attributed graph over labeled structures.
///
/// Edges are directed and stored for every ordered pair `(i, j)`, `i ≠ j`.
/// A vertex may be EMPTY (`None`) when it stands for a structure that
/// received no voxels; edges touching an EMPTY vertex are absent.
#[derive(Debug, Clone, PartialEq)]
pub struct Srg {
    labels: Vec<u32>,
    vertices: Vec<Option<VertexAttributes>>,
    edges: Vec<Option<EdgeAttributes>>,
}

impl Srg {
    /// Builds the graph, deriving every edge from its endpoint vertices.
    pub fn from_vertices(labels: Vec<u32>, vertices: Vec<Option<VertexAttributes>>) -> Self {
        assert_eq!(labels.len(), vertices.len(), "one label per vertex");
        let n = vertices.len();
        let mut edges = vec![None; n * n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                if let (Some(a), Some(b)) = (&vertices[i], &vertices[j]) {
                    edges[i * n + j] = Some(EdgeAttributes::between(a, b));
                }
            }
        }
        Self {
            labels,
            vertices,
            edges,
        }
    }

    /// Builds a graph from explicit edges (row-major `n × n`, diagonal `None`).
    pub fn from_parts(
        labels: Vec<u32>,
        vertices: Vec<Option<VertexAttributes>>,
        edges: Vec<Option<EdgeAttributes>>,
    ) -> Result<Self> {
        let n = vertices.len();
        if labels.len() != n || edges.len() != n * n {
            return Err(SrgError::InvalidVolume(format!(
                "graph with {} labels, {n} vertices and {} edge slots",
                labels.len(),
                edges.len()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                let present = i != j && vertices[i].is_some() && vertices[j].is_some();
                if edges[i * n + j].is_some() != present {
                    return Err(SrgError::InvalidVolume(format!(
                        "edge ({i}, {j}) presence does not match its endpoints"
                    )));
                }
            }
        }
        Ok(Self {
            labels,
            vertices,
            edges,
        })
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn vertex(&self, i: usize) -> Option<&VertexAttributes> {
        self.vertices[i].as_ref()
    }

    pub fn vertices(&self) -> &[Option<VertexAttributes>] {
        &self.vertices
    }

    pub fn edge(&self, i: usize, j: usize) -> Option<&EdgeAttributes> {
        self.edges[i * self.n() + j].as_ref()
    }

    pub fn is_empty_vertex(&self, i: usize) -> bool {
        self.vertices[i].is_none()
    }

    /// Indices of EMPTY vertices.
    pub fn empty_vertices(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.is_empty_vertex(i)).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.is_some()).count()
    }
}

/// One vertex per entry of `label_map`, in that order, with attributes
/// computed over the voxels carrying that label.
pub fn build_srg(scalar: &ScalarVolume, labels: &LabelVolume, label_map: &[u32]) -> Result<Srg> {
    scalar.geometry().ensure_same(labels.geometry())?;
    let slot: HashMap<u32, usize> = label_map.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    if slot.len() != label_map.len() {
        return Err(SrgError::InconsistentLabelMaps(format!(
            "duplicate labels in {label_map:?}"
        )));
    }
    let stats = accumulate(scalar, labels, label_map.len(), |l| slot.get(&l).copied())?;
    let g = scalar.geometry();
    let vertices = stats
        .iter()
        .zip(label_map)
        .map(|(s, &l)| s.attributes(g).map(Some).ok_or(SrgError::MissingLabel(l)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Srg::from_vertices(label_map.to_vec(), vertices))
}

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SrgError};

/// Weight groups must sum to one within this tolerance.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// Default multiplier for the cost charged to an EMPTY vertex or edge.
pub const DEFAULT_EMPTY_PENALTY: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VertexWeights {
    pub centroid: f64,
    pub intensity: f64,
    pub volume: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeWeights {
    pub centroid_vector: f64,
    pub volume_ratio: f64,
    pub contrast: f64,
}

impl VertexWeights {
    pub fn new(centroid: f64, intensity: f64, volume: f64) -> Self {
        Self {
            centroid,
            intensity,
            volume,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.centroid, self.intensity, self.volume]
    }

    pub fn sum(&self) -> f64 {
        self.centroid + self.intensity + self.volume
    }
}

impl EdgeWeights {
    pub fn new(centroid_vector: f64, volume_ratio: f64, contrast: f64) -> Self {
        Self {
            centroid_vector,
            volume_ratio,
            contrast,
        }
    }

    pub fn uniform() -> Self {
        let third = 1.0 / 3.0;
        Self::new(third, third, third)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.centroid_vector, self.volume_ratio, self.contrast]
    }

    pub fn sum(&self) -> f64 {
        self.centroid_vector + self.volume_ratio + self.contrast
    }
}

fn parse_triple(s: &str) -> Result<[f64; 3]> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(SrgError::InvalidWeights(format!(
            "`{s}` must be three comma-separated numbers"
        )));
    }
    let mut out = [0.0; 3];
    for (o, p) in out.iter_mut().zip(&parts) {
        *o = p
            .parse()
            .map_err(|_| SrgError::InvalidWeights(format!("`{p}` is not a number")))?;
    }
    Ok(out)
}

impl FromStr for VertexWeights {
    type Err = SrgError;
    fn from_str(s: &str) -> Result<Self> {
        let [a, b, c] = parse_triple(s)?;
        Ok(Self::new(a, b, c))
    }
}

impl FromStr for EdgeWeights {
    type Err = SrgError;
    fn from_str(s: &str) -> Result<Self> {
        let [a, b, c] = parse_triple(s)?;
        Ok(Self::new(a, b, c))
    }
}

impl fmt::Display for VertexWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.centroid, self.intensity, self.volume)
    }
}

impl fmt::Display for EdgeWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{}",
            self.centroid_vector, self.volume_ratio, self.contrast
        )
    }
}

/// Which vertex weights the greedy initial solution uses.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GreedyProfile {
    /// Volume weight forced to 0: super-regions are far smaller than the
    /// structures they belong to, so raw volume distance misleads.
    #[default]
    IgnoreVolume,
    /// The configured vertex weights unchanged.
    Full,
}

/// All tunable weights of the solution cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostWeights {
    /// Vertex term weight; the edge term gets `1 - alpha`.
    pub alpha: f64,
    pub vertex: VertexWeights,
    pub edge: EdgeWeights,
    /// Multiplier on the weighted unit distance charged per EMPTY term.
    pub empty_penalty: f64,
    pub greedy_profile: GreedyProfile,
}

impl Default for CostWeights {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            vertex: VertexWeights::new(0.5, 0.5, 0.0),
            edge: EdgeWeights::uniform(),
            empty_penalty: DEFAULT_EMPTY_PENALTY,
            greedy_profile: GreedyProfile::default(),
        }
    }
}

impl CostWeights {
    pub fn new(alpha: f64, vertex: VertexWeights, edge: EdgeWeights) -> Result<Self> {
        let w = Self {
            alpha,
            vertex,
            edge,
            ..Self::default()
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(SrgError::InvalidWeights(format!(
                "alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        for (group, values, sum) in [
            ("vertex", self.vertex.as_array(), self.vertex.sum()),
            ("edge", self.edge.as_array(), self.edge.sum()),
        ] {
            if values.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
                return Err(SrgError::InvalidWeights(format!(
                    "{group} weights must be finite and ≥ 0, got {values:?}"
                )));
            }
            if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
                return Err(SrgError::InvalidWeights(format!(
                    "{group} weights must sum to 1, got {sum}"
                )));
            }
        }
        if !(self.empty_penalty.is_finite() && self.empty_penalty >= 0.0) {
            return Err(SrgError::InvalidWeights(format!(
                "empty penalty must be finite and ≥ 0, got {}",
                self.empty_penalty
            )));
        }
        Ok(())
    }

    /// Vertex weights used while building the greedy solution.
    pub fn greedy_vertex_weights(&self) -> VertexWeights {
        match self.greedy_profile {
            GreedyProfile::IgnoreVolume => VertexWeights {
                volume: 0.0,
                ..self.vertex
            },
            GreedyProfile::Full => self.vertex,
        }
    }

    pub fn with_vertex(mut self, vertex: VertexWeights) -> Self {
        self.vertex = vertex;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn vertex_penalty(&self) -> f64 {
        self.empty_penalty * self.vertex.sum()
    }

    pub fn edge_penalty(&self) -> f64 {
        self.empty_penalty * self.edge.sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_validate() {
        let v: VertexWeights = "0.2, 0.8, 0".parse().unwrap();
        let e: EdgeWeights = "0.34,0.33,0.33".parse().unwrap();
        assert!(CostWeights::new(0.5, v, e).is_ok());
        assert!(CostWeights::new(1.5, v, e).is_err());
        assert!(CostWeights::new(0.5, VertexWeights::new(0.5, 0.6, 0.0), e).is_err());
        assert!(CostWeights::new(0.5, VertexWeights::new(1.5, -0.5, 0.0), e).is_err());
        assert!("1,2".parse::<VertexWeights>().is_err());
        assert!(CostWeights::default().validate().is_ok());
    }

    #[test]
    fn greedy_profile_drops_volume() {
        let w = CostWeights::default().with_vertex(VertexWeights::new(0.2, 0.3, 0.5));
        assert_eq!(w.greedy_vertex_weights().volume, 0.0);
        let full = CostWeights {
            greedy_profile: GreedyProfile::Full,
            ..w
        };
        assert_eq!(full.greedy_vertex_weights().volume, 0.5);
    }
}

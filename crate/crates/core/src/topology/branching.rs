//! Branching mechanisms: one serial chain per tip.

use super::{MechanismPath, Polyline, TopologyError};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundedTip {
    /// Index of the tip vertex.
    pub vertex: usize,
    #[serde(default)]
    pub ground_closure: Option<Polyline>,
}

/// Tree of vertices rooted at the base. `parent[i]` is `None` only for the base.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchingMechanism {
    pub vertices: Polyline,
    pub parent: Vec<Option<usize>>,
    pub base_grounded: bool,
    #[serde(default)]
    pub grounded_tips: Vec<GroundedTip>,
}

impl BranchingMechanism {
    /// Leaves in index order; each is a tip.
    pub fn tips(&self) -> Vec<usize> {
        let mut has_child = vec![false; self.parent.len()];
        for p in self.parent.iter().flatten() {
            if let Some(slot) = has_child.get_mut(*p) {
                *slot = true;
            }
        }
        (0..self.parent.len()).filter(|&i| !has_child[i] && self.parent[i].is_some()).collect()
    }

    fn chain(&self, tip: usize) -> Result<Vec<usize>, TopologyError> {
        let mut out = vec![tip];
        let mut at = tip;
        while let Some(p) = self.parent[at] {
            if out.len() > self.parent.len() {
                return Err(TopologyError::InvalidTree(format!("cycle through vertex {tip}")));
            }
            out.push(p);
            at = p;
        }
        out.reverse();
        Ok(out)
    }

    /// One mechanism path per tip, base first, in tip index order.
    pub fn decompose(&self) -> Result<Vec<MechanismPath>, TopologyError> {
        let n = self.vertices.len();
        if self.parent.len() != n {
            return Err(TopologyError::InvalidTree(format!("{} parents for {n} vertices", self.parent.len())));
        }
        let roots: Vec<usize> = (0..n).filter(|&i| self.parent[i].is_none()).collect();
        if roots.len() != 1 {
            return Err(TopologyError::InvalidTree(format!("expected one base vertex, found {}", roots.len())));
        }
        if let Some(i) = (0..n).find(|&i| self.parent[i].is_some_and(|p| p >= n || p == i)) {
            return Err(TopologyError::InvalidTree(format!("vertex {i} has an invalid parent")));
        }
        for i in 0..n {
            self.chain(i)?;
        }
        let tips = self.tips();
        for g in &self.grounded_tips {
            if !tips.contains(&g.vertex) {
                return Err(TopologyError::InvalidTree(format!("grounded vertex {} is not a tip", g.vertex)));
            }
        }
        tips.iter()
            .map(|&tip| {
                let idx = self.chain(tip)?;
                let vertices = match &self.vertices {
                    Polyline::Planar(v) => Polyline::Planar(idx.iter().map(|&i| v[i]).collect()),
                    Polyline::Spatial(v) => Polyline::Spatial(idx.iter().map(|&i| v[i]).collect()),
                };
                let grounding = self.grounded_tips.iter().find(|g| g.vertex == tip);
                Ok(MechanismPath {
                    vertices,
                    base_grounded: self.base_grounded,
                    tip_grounded: grounding.is_some(),
                    ground_closure: grounding.and_then(|g| g.ground_closure.clone()),
                })
            })
            .collect()
    }
}

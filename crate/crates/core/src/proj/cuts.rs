use std::collections::{BTreeMap, HashSet};

use crate::error::{QmstError, Result};
use crate::graph::{greedy_independent_partition, Graph};

/// The RLT cut `Σ_{e∈δ(vertex)} y_{edge,e} ≥ y_edge`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cut {
    pub vertex: usize,
    pub edge: usize,
}

impl Cut {
    pub fn new(vertex: usize, edge: usize) -> Self {
        Self { vertex, edge }
    }
}

/// One Dykstra block: for each edge `f`, an independent vertex set `K_k^f`.
pub type Cluster = Vec<(usize, Vec<usize>)>;

/// Active cut set with its clustering `𝒞_1 … 𝒞_Nmax`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CutClusters {
    cuts: Vec<Cut>,
    clusters: Vec<Cluster>,
}

impl CutClusters {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Deduplicates, validates and clusters `cuts`.
    pub fn new(cuts: &[Cut], g: &Graph) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut kept = Vec::with_capacity(cuts.len());
        for &c in cuts {
            if c.vertex >= g.n() {
                return Err(QmstError::InvalidVertex {
                    vertex: c.vertex,
                    n: g.n(),
                });
            }
            if c.edge >= g.m() {
                return Err(QmstError::InvalidEdge {
                    edge: c.edge,
                    m: g.m(),
                });
            }
            if seen.insert(c) {
                kept.push(c);
            }
        }

        let mut per_edge: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for c in &kept {
            per_edge.entry(c.edge).or_default().push(c.vertex);
        }
        let mut clusters: Vec<Cluster> = Vec::new();
        for (f, vertices) in per_edge {
            for (k, class) in greedy_independent_partition(&vertices, g)
                .into_iter()
                .enumerate()
            {
                if clusters.len() <= k {
                    clusters.resize_with(k + 1, Vec::new);
                }
                let mut class = class;
                class.sort_unstable();
                clusters[k].push((f, class));
            }
        }
        Ok(Self {
            cuts: kept,
            clusters,
        })
    }

    /// Adds cuts not yet present and reclusters.
    pub fn extended(&self, new: &[Cut], g: &Graph) -> Result<Self> {
        let mut all = self.cuts.clone();
        all.extend_from_slice(new);
        Self::new(&all, g)
    }

    pub fn cuts(&self) -> &[Cut] {
        &self.cuts
    }

    pub fn contains(&self, c: &Cut) -> bool {
        self.cuts.contains(c)
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn n_max(&self) -> usize {
        self.clusters.len()
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }
}

/// Clusters a cut set; see [`CutClusters::new`].
pub fn cluster_cuts(cuts: &[Cut], g: &Graph) -> Result<CutClusters> {
    CutClusters::new(cuts, g)
}

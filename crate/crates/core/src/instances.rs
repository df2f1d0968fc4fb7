//! Benchmark instance families, cost matrices and the canonical text format.
//!
//! Canonical file layout (UTF-8, lines starting with `#` are comments):
//!
//! ```text
//! QMST 1
//! n m [ub]
//! i j          (m lines, 1-based endpoints; defines the edge order)
//! q_e1 ... q_em (m lines, one row of Q each)
//! ```

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{QmstError, Result};
use crate::graph::Graph;

const MAGIC: &str = "QMST";
const FORMAT_VERSION: u32 = 1;
const MAX_GRAPH_ATTEMPTS: usize = 1000;

/// Symmetric `m × m` interaction-cost matrix; the diagonal holds edge costs.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix(DMatrix<f64>);

impl CostMatrix {
    pub fn new(q: DMatrix<f64>) -> Result<Self> {
        if q.nrows() != q.ncols() {
            return Err(QmstError::DimensionMismatch {
                expected: q.nrows(),
                got: q.ncols(),
            });
        }
        if q.iter().any(|v| !v.is_finite()) {
            return Err(QmstError::InvalidParameter(
                "cost matrix has non-finite entries".into(),
            ));
        }
        let m = q.nrows();
        for j in 0..m {
            for i in (j + 1)..m {
                let (a, b) = (q[(i, j)], q[(j, i)]);
                if (a - b).abs() > 1e-9 * a.abs().max(b.abs()).max(1.0) {
                    return Err(QmstError::InvalidParameter(format!(
                        "cost matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self(crate::linalg::symmetrize(&q)))
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.0.nrows()
    }

    #[inline]
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    /// `xᵀ Q x` for a 0/1 edge vector given by its support.
    pub fn tree_cost(&self, tree_edges: &[usize]) -> f64 {
        let mut total = 0.0;
        for &e in tree_edges {
            for &f in tree_edges {
                total += self.0[(e, f)];
            }
        }
        total
    }
}

/// `Q̃ = (Q 0; 0 0)`.
pub fn pad_cost(q: &CostMatrix) -> DMatrix<f64> {
    let m = q.m();
    let mut out = DMatrix::zeros(m + 1, m + 1);
    out.view_mut((0, 0), (m, m)).copy_from(q.matrix());
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Cp1,
    Cp2,
    Cp3,
    Cp4,
    OpSym,
    OpVsym,
    OpEsym,
    Sv,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Cp1,
        Family::Cp2,
        Family::Cp3,
        Family::Cp4,
        Family::OpSym,
        Family::OpVsym,
        Family::OpEsym,
        Family::Sv,
    ];

    /// OP families are defined on complete graphs only.
    pub fn requires_complete_graph(self) -> bool {
        matches!(self, Family::OpSym | Family::OpVsym | Family::OpEsym)
    }

    fn cp_ranges(self) -> Option<(u32, u32)> {
        match self {
            Family::Cp1 => Some((10, 10)),
            Family::Cp2 => Some((10, 100)),
            Family::Cp3 => Some((100, 10)),
            Family::Cp4 => Some((100, 100)),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::Cp1 => "CP1",
            Family::Cp2 => "CP2",
            Family::Cp3 => "CP3",
            Family::Cp4 => "CP4",
            Family::OpSym => "OPsym",
            Family::OpVsym => "OPvsym",
            Family::OpEsym => "OPesym",
            Family::Sv => "SV",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = QmstError;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| QmstError::InvalidParameter(format!("unknown family `{s}`")))
    }
}

/// Maximum diagonal and off-diagonal costs for the SV family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvMaxima {
    pub diag: f64,
    pub off: f64,
}

impl Default for SvMaxima {
    fn default() -> Self {
        Self {
            diag: 100.0,
            off: 100.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceSpec {
    pub family: Family,
    pub n: usize,
    /// Edge density in percent.
    pub density: u32,
    pub seed: u64,
    pub sv: SvMaxima,
}

impl InstanceSpec {
    pub fn new(family: Family, n: usize, density: u32, seed: u64) -> Self {
        Self {
            family,
            n,
            density,
            seed,
            sv: SvMaxima::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(QmstError::TooFewVertices(self.n));
        }
        if self.density == 0 || self.density > 100 {
            return Err(QmstError::InvalidParameter(format!(
                "density must be in 1..=100, got {}",
                self.density
            )));
        }
        if self.family.requires_complete_graph() && self.density != 100 {
            return Err(QmstError::InvalidParameter(format!(
                "{} instances are defined on complete graphs (density 100)",
                self.family
            )));
        }
        if self.family == Family::Sv && !(self.sv.diag >= 0.0 && self.sv.off >= 0.0) {
            return Err(QmstError::InvalidParameter(
                "SV maxima must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub graph: Graph,
    pub q: CostMatrix,
    pub ub: Option<f64>,
    /// Generator settings; absent for instances read from disk.
    pub meta: Option<InstanceSpec>,
}

impl Instance {
    pub fn new(graph: Graph, q: CostMatrix, ub: Option<f64>) -> Result<Self> {
        if q.m() != graph.m() {
            return Err(QmstError::DimensionMismatch {
                expected: graph.m(),
                got: q.m(),
            });
        }
        Ok(Self {
            graph,
            q,
            ub,
            meta: None,
        })
    }

    /// Edge density in percent, rounded.
    pub fn density_percent(&self) -> u32 {
        let n = self.graph.n();
        let full = n * (n - 1) / 2;
        if full == 0 {
            return 0;
        }
        (100.0 * self.graph.m() as f64 / full as f64).round() as u32
    }
}

/// Generator output with the side information some families draw.
#[derive(Debug, Clone)]
pub struct Generated {
    pub instance: Instance,
    /// Vertex coordinates (OPesym).
    pub points: Option<Vec<[f64; 2]>>,
    /// Indices of the designated high-interaction edges (SV).
    pub high_edges: Option<Vec<usize>>,
}

pub fn generate(spec: &InstanceSpec) -> Result<Instance> {
    generate_detailed(spec).map(|g| g.instance)
}

pub fn generate_detailed(spec: &InstanceSpec) -> Result<Generated> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n;
    let graph = if spec.family.requires_complete_graph() {
        Graph::complete(n)
    } else {
        random_connected_graph(&mut rng, n, spec.density)?
    };
    let m = graph.m();
    let mut q = DMatrix::zeros(m, m);
    let mut points = None;
    let mut high_edges = None;

    match spec.family {
        Family::Cp1 | Family::Cp2 | Family::Cp3 | Family::Cp4 => {
            let (diag, off) = spec.family.cp_ranges().unwrap();
            fill_integer(&mut rng, &mut q, diag, off);
        }
        Family::OpSym => fill_integer(&mut rng, &mut q, 100, 20),
        Family::OpVsym => {
            let w: Vec<f64> = (0..n).map(|_| rng.gen_range(1..=10u32) as f64).collect();
            for e in 0..m {
                q[(e, e)] = rng.gen_range(1..=10_000u32) as f64;
            }
            for e in 0..m {
                let (i, j) = graph.edge(e);
                for f in (e + 1)..m {
                    let (k, l) = graph.edge(f);
                    let v = w[i] * w[j] * w[k] * w[l];
                    q[(e, f)] = v;
                    q[(f, e)] = v;
                }
            }
        }
        Family::OpEsym => {
            let pts: Vec<[f64; 2]> = (0..n)
                .map(|_| [rng.gen_range(0.0..=100.0), rng.gen_range(0.0..=100.0)])
                .collect();
            let mid: Vec<[f64; 2]> = graph
                .edges()
                .iter()
                .map(|&(u, v)| {
                    [
                        0.5 * (pts[u][0] + pts[v][0]),
                        0.5 * (pts[u][1] + pts[v][1]),
                    ]
                })
                .collect();
            for e in 0..m {
                let (u, v) = graph.edge(e);
                q[(e, e)] = dist(pts[u], pts[v]);
                for f in (e + 1)..m {
                    let d = dist(mid[e], mid[f]);
                    q[(e, f)] = d;
                    q[(f, e)] = d;
                }
            }
            points = Some(pts);
        }
        Family::Sv => {
            let n_high = ((m as f64) * 0.1).round() as usize;
            let mut idx: Vec<usize> = (0..m).collect();
            idx.shuffle(&mut rng);
            let mut high = idx[..n_high].to_vec();
            high.sort_unstable();
            let mut is_high = vec![false; m];
            for &e in &high {
                is_high[e] = true;
            }
            let (cd, co) = (spec.sv.diag, spec.sv.off);
            for e in 0..m {
                q[(e, e)] = rng.gen_range(0.0..=0.2) * cd;
                for f in (e + 1)..m {
                    let band = match (is_high[e], is_high[f]) {
                        (true, true) => 0.9..=1.0,
                        (false, false) => 0.5..=0.7,
                        _ => 0.2..=0.4,
                    };
                    let v = rng.gen_range(band) * co;
                    q[(e, f)] = v;
                    q[(f, e)] = v;
                }
            }
            high_edges = Some(high);
        }
    }

    let mut instance = Instance::new(graph, CostMatrix::new(q)?, None)?;
    instance.meta = Some(*spec);
    Ok(Generated {
        instance,
        points,
        high_edges,
    })
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn fill_integer(rng: &mut ChaCha8Rng, q: &mut DMatrix<f64>, diag: u32, off: u32) {
    let m = q.nrows();
    for e in 0..m {
        q[(e, e)] = rng.gen_range(1..=diag) as f64;
        for f in (e + 1)..m {
            let v = rng.gen_range(1..=off) as f64;
            q[(e, f)] = v;
            q[(f, e)] = v;
        }
    }
}

/// Uniform edge set of size `round(d · n(n−1)/2)`, resampled until connected.
fn random_connected_graph(rng: &mut ChaCha8Rng, n: usize, density: u32) -> Result<Graph> {
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n {
        for v in (u + 1)..n {
            pairs.push((u, v));
        }
    }
    let target = (density as f64 / 100.0 * pairs.len() as f64).round() as usize;
    if target < n - 1 {
        return Err(QmstError::InvalidParameter(format!(
            "density {density}% gives {target} edges, fewer than n - 1 = {}",
            n - 1
        )));
    }
    for _ in 0..MAX_GRAPH_ATTEMPTS {
        let (chosen, _) = pairs.partial_shuffle(rng, target);
        let g = Graph::with_lexicographic_order(n, chosen)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(QmstError::GenerationFailed(MAX_GRAPH_ATTEMPTS))
}

pub fn write_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<()> {
    let mut out = Vec::new();
    render_instance(inst, &mut out)?;
    fs::write(path, out)?;
    Ok(())
}

pub fn render_instance(inst: &Instance, out: &mut impl Write) -> Result<()> {
    let g = &inst.graph;
    writeln!(out, "{MAGIC} {FORMAT_VERSION}")?;
    if let Some(meta) = &inst.meta {
        writeln!(
            out,
            "# family={} n={} density={} seed={}",
            meta.family, meta.n, meta.density, meta.seed
        )?;
    }
    match inst.ub {
        Some(ub) => writeln!(out, "{} {} {}", g.n(), g.m(), ub)?,
        None => writeln!(out, "{} {}", g.n(), g.m())?,
    }
    for &(u, v) in g.edges() {
        writeln!(out, "{} {}", u + 1, v + 1)?;
    }
    let q = inst.q.matrix();
    for i in 0..q.nrows() {
        let row: Vec<String> = q.row(i).iter().map(|v| format!("{v}")).collect();
        writeln!(out, "{}", row.join(" "))?;
    }
    Ok(())
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance> {
    parse_instance(&fs::read_to_string(path)?)
}

struct Line<'a> {
    number: usize,
    text: &'a str,
}

impl Line<'_> {
    /// Tokens with their 1-based starting column.
    fn tokens(&self) -> Vec<(usize, &str)> {
        let mut out = Vec::new();
        let mut start = None;
        for (i, c) in self.text.char_indices() {
            if c.is_whitespace() {
                if let Some(s) = start.take() {
                    out.push((s + 1, &self.text[s..i]));
                }
            } else if start.is_none() {
                start = Some(i);
            }
        }
        if let Some(s) = start {
            out.push((s + 1, &self.text[s..]));
        }
        out
    }

    fn error(&self, column: usize, msg: impl Into<String>) -> QmstError {
        QmstError::Parse {
            line: self.number,
            column,
            msg: msg.into(),
        }
    }

    fn parse<T: FromStr>(&self, (column, tok): (usize, &str), what: &str) -> Result<T> {
        tok.parse()
            .map_err(|_| self.error(column, format!("invalid {what} `{tok}`")))
    }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, t)| Line {
            number: i + 1,
            text: t,
        })
        .filter(|l| {
            let t = l.text.trim_start();
            !t.is_empty() && !t.starts_with('#')
        });
    let eof = |what: &str| QmstError::Parse {
        line: text.lines().count() + 1,
        column: 1,
        msg: format!("unexpected end of file, expected {what}"),
    };

    let header = lines.next().ok_or_else(|| eof("header"))?;
    let toks = header.tokens();
    if toks.len() != 2 || toks[0].1 != MAGIC {
        return Err(header.error(1, format!("expected `{MAGIC} {FORMAT_VERSION}`")));
    }
    let version: u32 = header.parse(toks[1], "version")?;
    if version != FORMAT_VERSION {
        return Err(header.error(toks[1].0, format!("unsupported version {version}")));
    }

    let dims = lines.next().ok_or_else(|| eof("`n m [ub]`"))?;
    let toks = dims.tokens();
    if !(2..=3).contains(&toks.len()) {
        return Err(dims.error(1, "expected `n m [ub]`"));
    }
    let n: usize = dims.parse(toks[0], "vertex count")?;
    let m: usize = dims.parse(toks[1], "edge count")?;
    let ub: Option<f64> = match toks.get(2) {
        Some(&t) => Some(dims.parse(t, "upper bound")?),
        None => None,
    };

    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let line = lines.next().ok_or_else(|| eof("edge line"))?;
        let toks = line.tokens();
        if toks.len() != 2 {
            return Err(line.error(1, "expected `i j`"));
        }
        let mut ends = [0usize; 2];
        for (slot, &tok) in ends.iter_mut().zip(&toks) {
            let v: usize = line.parse(tok, "vertex")?;
            if v == 0 || v > n {
                return Err(line.error(tok.0, format!("vertex {v} out of range 1..={n}")));
            }
            *slot = v - 1;
        }
        edges.push((ends[0], ends[1]));
    }
    let graph = Graph::new(n, &edges)?;

    let mut q = DMatrix::zeros(m, m);
    for i in 0..m {
        let line = lines.next().ok_or_else(|| eof("cost row"))?;
        let toks = line.tokens();
        if toks.len() != m {
            return Err(line.error(1, format!("expected {m} values, got {}", toks.len())));
        }
        for (j, &tok) in toks.iter().enumerate() {
            q[(i, j)] = line.parse(tok, "cost")?;
        }
    }
    if let Some(extra) = lines.next() {
        return Err(extra.error(1, "trailing content"));
    }
    Instance::new(graph, CostMatrix::new(q)?, ub)
}

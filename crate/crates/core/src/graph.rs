//! Graphs, shift operators and time-vertex product graphs.

use alloc::vec::Vec;
use num_traits::Zero;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{C64, CMat};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub weight: C64,
}

impl Edge {
    pub fn new(src: usize, dst: usize, weight: f64) -> Self {
        Edge { src, dst, weight: C64::new(weight, 0.0) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    pub num_vertices: usize,
    pub edges: Vec<Edge>,
    pub directed: bool,
    pub adjacency: CMat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShiftKind {
    Adjacency,
    Laplacian,
    NormalizedLaplacian,
    NormalizedAdjacency,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub points: Vec<Vec<f64>>,
    pub kernel_width: f64,
    pub sparsify_threshold: f64,
}

/// Assemble a graph from an explicit edge list. Undirected edges are mirrored.
pub fn build_graph_from_edge_list(n: usize, edges: &[Edge], directed: bool) -> Result<Graph> {
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut adjacency = CMat::zeros(n, n);
    let mut seen = CMat::zeros(n, n).map(|_: C64| false);
    for e in edges {
        for &i in &[e.src, e.dst] {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
        }
        if !e.weight.re.is_finite() || !e.weight.im.is_finite() {
            return Err(Error::NonFiniteWeight(e.src, e.dst));
        }
        if seen[(e.src, e.dst)] || (!directed && seen[(e.dst, e.src)]) {
            return Err(Error::DuplicateEdge(e.src, e.dst));
        }
        seen[(e.src, e.dst)] = true;
        adjacency[(e.src, e.dst)] = e.weight;
        if !directed {
            adjacency[(e.dst, e.src)] = e.weight;
        }
    }
    Ok(Graph { num_vertices: n, edges: edges.to_vec(), directed, adjacency })
}

/// Cycle on `t` time instants with unit edges `t → t+1 mod T`.
pub fn build_cycle_time_graph(t: usize, directed: bool) -> Result<Graph> {
    if t < 2 {
        return Err(Error::CycleTooShort(t));
    }
    let edges: Vec<Edge> = if !directed && t == 2 {
        alloc::vec![Edge::new(0, 1, 1.0)]
    } else {
        (0..t).map(|i| Edge::new(i, (i + 1) % t, 1.0)).collect()
    };
    build_graph_from_edge_list(t, &edges, directed)
}

/// Undirected graph with Gaussian kernel weights between every pair of points;
/// weights below the sparsification threshold are dropped.
pub fn build_gaussian_kernel_graph(cloud: &PointCloud) -> Result<Graph> {
    let n = cloud.points.len();
    if !(cloud.kernel_width > 0.0) || !cloud.kernel_width.is_finite() {
        return Err(Error::BadKernelWidth(cloud.kernel_width));
    }
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, found: n });
    }
    let d = cloud.points[0].len();
    if cloud.points.iter().any(|p| p.len() != d) {
        return Err(Error::RaggedPoints);
    }
    let denom = 2.0 * cloud.kernel_width * cloud.kernel_width;
    let mut edges = Vec::new();
    for m in 0..n {
        for k in (m + 1)..n {
            let dist2: f64 = cloud.points[m].iter().zip(&cloud.points[k]).map(|(a, b)| (a - b) * (a - b)).sum();
            let w = (-dist2 / denom).exp();
            if w >= cloud.sparsify_threshold && w > 0.0 {
                edges.push(Edge::new(m, k, w));
            }
        }
    }
    build_graph_from_edge_list(n, &edges, false)
}

/// Cartesian product with vertex `(t, v)` at flat index `t·N + v`.
pub fn cartesian_product(time_graph: &Graph, vertex_graph: &Graph) -> Result<Graph> {
    let t = time_graph.num_vertices;
    let n = vertex_graph.num_vertices;
    if t == 0 || n == 0 {
        return Err(Error::EmptyGraph);
    }
    let adjacency = time_graph.adjacency.kronecker(&CMat::identity(n, n)) + CMat::identity(t, t).kronecker(&vertex_graph.adjacency);
    let directed = time_graph.directed || vertex_graph.directed;
    let nt = n * t;
    let mut edges = Vec::new();
    for i in 0..nt {
        let start = if directed { 0 } else { i };
        for j in start..nt {
            let w = adjacency[(i, j)];
            if !w.is_zero() {
                edges.push(Edge { src: i, dst: j, weight: w });
            }
        }
    }
    Ok(Graph { num_vertices: nt, edges, directed, adjacency })
}

fn degrees(g: &Graph) -> Vec<C64> {
    (0..g.num_vertices).map(|m| g.adjacency.row(m).iter().copied().sum()).collect()
}

/// Graph shift operator of the requested kind.
pub fn shift_operator(g: &Graph, kind: ShiftKind) -> Result<CMat> {
    let n = g.num_vertices;
    let w = &g.adjacency;
    match kind {
        ShiftKind::Adjacency => Ok(w.clone()),
        ShiftKind::Laplacian => {
            if g.directed {
                return Err(Error::LaplacianNeedsUndirectedReal);
            }
            for i in 0..n {
                for j in 0..n {
                    let x = w[(i, j)];
                    if x.im != 0.0 {
                        return Err(Error::LaplacianNeedsUndirectedReal);
                    }
                    if x.re < 0.0 {
                        return Err(Error::NegativeWeight(i, j));
                    }
                }
            }
            let deg = degrees(g);
            let mut l = -w.clone();
            for i in 0..n {
                l[(i, i)] += deg[i];
            }
            Ok(l)
        }
        ShiftKind::NormalizedLaplacian | ShiftKind::NormalizedAdjacency => {
            if kind == ShiftKind::NormalizedLaplacian {
                for i in 0..n {
                    for j in 0..n {
                        if w[(i, j)].re < 0.0 {
                            return Err(Error::NegativeWeight(i, j));
                        }
                    }
                }
            }
            let deg = degrees(g);
            let mut inv_sqrt = Vec::with_capacity(n);
            for (i, d) in deg.iter().enumerate() {
                if d.norm() == 0.0 {
                    return Err(Error::IsolatedVertex(i));
                }
                inv_sqrt.push(d.sqrt().inv());
            }
            let a = CMat::from_fn(n, n, |i, j| inv_sqrt[i] * w[(i, j)] * inv_sqrt[j]);
            if kind == ShiftKind::NormalizedAdjacency {
                Ok(a)
            } else {
                Ok(CMat::identity(n, n) - a)
            }
        }
    }
}

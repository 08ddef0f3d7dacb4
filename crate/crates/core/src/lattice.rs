//! Topology of the loop-graph family.
//!
//! Two outer chains of `K` nodes each (`x_{-K} .. x_{-1}` and `x_1 .. x_K`)
//! are joined by a loop made of two branches `A` and `B` of `L` nodes each.
//! Branch `A` runs from `x_{-1}` to `x_1` through `A_1 .. A_L`, branch `B`
//! through `B_1 .. B_L`. Canonical matrix order is
//!
//! ```text
//! x_{-K} .. x_{-1}, A_1 .. A_L, B_1 .. B_L, x_1 .. x_K
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeId {
    /// `x_{-k}` (left) or `x_k` (right), `1 <= k <= K`.
    Outer { side: Side, k: usize },
    /// `j`-th node of a loop branch counted from `x_{-1}`, `1 <= j <= L`.
    Branch { branch: Branch, j: usize },
}

impl NodeId {
    pub fn outer(side: Side, k: usize) -> Self {
        NodeId::Outer { side, k }
    }

    pub fn branch(branch: Branch, j: usize) -> Self {
        NodeId::Branch { branch, j }
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeId::Outer {
                side: Side::Left,
                k,
            } => write!(f, "x-{k}"),
            NodeId::Outer {
                side: Side::Right,
                k,
            } => write!(f, "x{k}"),
            NodeId::Branch {
                branch: Branch::A,
                j,
            } => write!(f, "A{j}"),
            NodeId::Branch {
                branch: Branch::B,
                j,
            } => write!(f, "B{j}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coupling {
    None,
    G,
    H,
    Z,
}

/// An edge `a -> b` whose matrix entries are `H[a][b] = -1 - sign*c` and
/// `H[b][a] = -1 + sign*c`, with `c` the value of `coupling`.
///
/// `a` always precedes `b` in canonical order; untagged edges carry sign `+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EdgeSpec {
    pub a: NodeId,
    pub b: NodeId,
    pub coupling: Coupling,
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphFamilySpec {
    k: usize,
    l: usize,
    nodes: Vec<NodeId>,
    edges: Vec<EdgeSpec>,
    weights: Vec<u32>,
}

pub fn build_graph(k: usize, l: usize) -> Result<GraphFamilySpec> {
    GraphFamilySpec::new(k, l)
}

impl GraphFamilySpec {
    pub fn new(k: usize, l: usize) -> Result<Self> {
        if k < 1 || l < 1 {
            return Err(Error::domain(format!(
                "need K >= 1 and L >= 1, got K={k}, L={l}"
            )));
        }
        let mut nodes = Vec::with_capacity(2 * k + 2 * l);
        nodes.extend((1..=k).rev().map(|i| NodeId::outer(Side::Left, i)));
        nodes.extend((1..=l).map(|j| NodeId::branch(Branch::A, j)));
        nodes.extend((1..=l).map(|j| NodeId::branch(Branch::B, j)));
        nodes.extend((1..=k).map(|i| NodeId::outer(Side::Right, i)));

        let weights = nodes
            .iter()
            .map(|n| match n {
                NodeId::Outer { k: 1, .. } => 3,
                _ => 2,
            })
            .collect();

        let edge = |a, b, coupling, sign| EdgeSpec {
            a,
            b,
            coupling,
            sign,
        };
        let left = |i| NodeId::outer(Side::Left, i);
        let right = |i| NodeId::outer(Side::Right, i);
        let a_node = |j| NodeId::branch(Branch::A, j);
        let b_node = |j| NodeId::branch(Branch::B, j);

        let mut edges = Vec::with_capacity(2 * k + 2 * l);
        for i in (2..=k).rev() {
            let c = if i == k { Coupling::Z } else { Coupling::None };
            edges.push(edge(left(i), left(i - 1), c, 1));
        }
        edges.push(edge(left(1), a_node(1), Coupling::G, 1));
        edges.push(edge(left(1), b_node(1), Coupling::H, 1));
        for j in 1..l {
            edges.push(edge(a_node(j), a_node(j + 1), Coupling::None, 1));
        }
        for j in 1..l {
            edges.push(edge(b_node(j), b_node(j + 1), Coupling::None, 1));
        }
        edges.push(edge(a_node(l), right(1), Coupling::H, -1));
        edges.push(edge(b_node(l), right(1), Coupling::G, -1));
        for i in 1..k {
            if i + 1 == k {
                edges.push(edge(right(i), right(i + 1), Coupling::Z, -1));
            } else {
                edges.push(edge(right(i), right(i + 1), Coupling::None, 1));
            }
        }

        Ok(Self {
            k,
            l,
            nodes,
            edges,
            weights,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// Matrix dimension `2K + 2L`.
    pub fn n(&self) -> usize {
        2 * self.k + 2 * self.l
    }

    /// Nodes in canonical order.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn edges(&self) -> &[EdgeSpec] {
        &self.edges
    }

    /// Diagonal weights in canonical order.
    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn contains(&self, node: NodeId) -> bool {
        match node {
            NodeId::Outer { k, .. } => (1..=self.k).contains(&k),
            NodeId::Branch { j, .. } => (1..=self.l).contains(&j),
        }
    }

    pub fn canonical_index(&self, node: NodeId) -> Result<usize> {
        if !self.contains(node) {
            return Err(Error::domain(format!(
                "node {node} is not part of the K={}, L={} graph",
                self.k, self.l
            )));
        }
        let (k, l) = (self.k, self.l);
        Ok(match node {
            NodeId::Outer {
                side: Side::Left,
                k: i,
            } => k - i,
            NodeId::Branch {
                branch: Branch::A,
                j,
            } => k + j - 1,
            NodeId::Branch {
                branch: Branch::B,
                j,
            } => k + l + j - 1,
            NodeId::Outer {
                side: Side::Right,
                k: i,
            } => k + 2 * l + i - 1,
        })
    }

    /// Left-right mirror: `x_{-k} <-> x_k`, `A_j <-> B_{L+1-j}`.
    pub fn reflect(&self, node: NodeId) -> NodeId {
        match node {
            NodeId::Outer { side, k } => NodeId::Outer {
                side: match side {
                    Side::Left => Side::Right,
                    Side::Right => Side::Left,
                },
                k,
            },
            NodeId::Branch { branch, j } => NodeId::Branch {
                branch: match branch {
                    Branch::A => Branch::B,
                    Branch::B => Branch::A,
                },
                j: self.l + 1 - j,
            },
        }
    }

    /// Edges as `(index_a, index_b)` pairs.
    pub fn edge_indices(&self) -> impl Iterator<Item = (usize, usize, &EdgeSpec)> {
        self.edges.iter().map(move |e| {
            (
                self.canonical_index(e.a).expect("edge endpoint in graph"),
                self.canonical_index(e.b).expect("edge endpoint in graph"),
                e,
            )
        })
    }

    pub fn to_doc(&self) -> GraphDoc {
        GraphDoc {
            k: self.k,
            l: self.l,
            n: self.n(),
            nodes: self.nodes.iter().map(ToString::to_string).collect(),
            edges: self
                .edge_indices()
                .map(|(a, b, e)| EdgeDoc {
                    a,
                    b,
                    coupling: e.coupling,
                    sign: e.sign,
                })
                .collect(),
            weights: self.weights.clone(),
        }
    }
}

/// JSON form of a graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDoc {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub nodes: Vec<String>,
    pub edges: Vec<EdgeDoc>,
    pub weights: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub a: usize,
    pub b: usize,
    pub coupling: Coupling,
    pub sign: i8,
}

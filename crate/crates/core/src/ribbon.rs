//! Ribbon graphs as half-edge structures.
//!
//! Darts (half-edges) are numbered `0..k`. Each edge is an ordered dart pair
//! `[h0, h1]`; the pair order is the default edge orientation and the list
//! order the default edge ordering. Each vertex is a cyclic list of darts.
//! External vertices are univalent and are listed (in order) as incoming or
//! outgoing. Boundary cycles are the orbits of the face permutation
//! `phi = rho ∘ sigma`, where `sigma` swaps the two darts of an edge and `rho`
//! advances a dart to the next one in its vertex's cyclic order.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("dart {0} is out of range")]
    DartOutOfRange(usize),
    #[error("dart {0} appears in more than one edge")]
    DartInTwoEdges(usize),
    #[error("dart {0} is not in any edge")]
    DartWithoutEdge(usize),
    #[error("dart {0} appears at more than one vertex position")]
    DartInTwoVertices(usize),
    #[error("dart {0} is not at any vertex")]
    DartWithoutVertex(usize),
    #[error("vertex {0} is out of range")]
    VertexOutOfRange(usize),
    #[error("external vertex {0} is not univalent")]
    ExternalNotUnivalent(usize),
    #[error("vertex {0} is listed twice among external vertices")]
    ExternalRepeated(usize),
    #[error("internal vertex {0} has valence {1} < 3")]
    LowValence(usize, usize),
    #[error("edge {0} is a loop")]
    Loop(usize),
    #[error("edge {0} is not internal")]
    NotInternal(usize),
    #[error("cannot glue: {outputs} outputs against {inputs} inputs")]
    Arity { outputs: usize, inputs: usize },
    #[error("metric has a zero-length cycle")]
    ZeroLengthCycle,
    #[error("metric has a zero-length path between outgoing vertices {0} and {1}")]
    ZeroLengthOutPath(usize, usize),
    #[error("expected {expected} edge lengths, found {found}")]
    LengthCount { expected: usize, found: usize },
    #[error("invalid trivialization: {0}")]
    Trivialization(&'static str),
    #[error("stability fails for (g,h,n) = ({0},{1},{2})")]
    Unstable(usize, usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RibbonGraph {
    edges: Vec<[usize; 2]>,
    vertices: Vec<Vec<usize>>,
    incoming: Vec<usize>,
    outgoing: Vec<usize>,
    dart_vertex: Vec<usize>,
    dart_pos: Vec<usize>,
    dart_edge: Vec<usize>,
}

/// Ordering of the non-outgoing vertices, ordering of the edges and an
/// orientation per edge: the data that trivializes the det line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DetTrivialization {
    pub vertex_order: Vec<usize>,
    pub edge_order: Vec<usize>,
    /// `flipped[e]` reverses the listed orientation of edge `e`.
    pub flipped: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ComponentTopology {
    pub vertices: usize,
    pub edges: usize,
    pub chi: i64,
    pub boundary_cycles: usize,
    pub genus: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Topology {
    pub components: Vec<ComponentTopology>,
    pub chi: i64,
    /// Boundary cycles as dart lists, each starting at its smallest dart.
    pub cycles: Vec<Vec<usize>>,
}

/// Result of contracting an edge.
#[derive(Debug, Clone)]
pub struct Contraction {
    pub graph: RibbonGraph,
    /// New dart id of each old dart (`None` for the two removed darts).
    pub dart_map: Vec<Option<usize>>,
    /// New vertex id of each old vertex; both endpoints map to the merged vertex.
    pub vertex_map: Vec<usize>,
    /// New edge id of each old edge (`None` for the contracted edge).
    pub edge_map: Vec<Option<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Length {
    Finite(f64),
    Infinite,
}

impl Length {
    pub fn is_zero(&self) -> bool {
        matches!(self, Length::Finite(x) if *x == 0.0)
    }
}

/// JSON layout of a graph file.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct GraphFile {
    pub half_edges: usize,
    pub sigma: Vec<[usize; 2]>,
    pub rho: Vec<Vec<usize>>,
    #[serde(default)]
    pub incoming: Vec<usize>,
    #[serde(default)]
    pub outgoing: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lengths: Option<Vec<(usize, LengthEntry)>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum LengthEntry {
    Value(f64),
    Word(String),
}

impl RibbonGraph {
    pub fn new(
        edges: Vec<[usize; 2]>,
        vertices: Vec<Vec<usize>>,
        incoming: Vec<usize>,
        outgoing: Vec<usize>,
    ) -> Result<Self, GraphError> {
        let k = 2 * edges.len();
        let mut dart_edge = vec![usize::MAX; k];
        for (e, pair) in edges.iter().enumerate() {
            for &h in pair {
                if h >= k {
                    return Err(GraphError::DartOutOfRange(h));
                }
                if dart_edge[h] != usize::MAX {
                    return Err(GraphError::DartInTwoEdges(h));
                }
                dart_edge[h] = e;
            }
        }
        let mut dart_vertex = vec![usize::MAX; k];
        let mut dart_pos = vec![usize::MAX; k];
        for (v, cyc) in vertices.iter().enumerate() {
            for (i, &h) in cyc.iter().enumerate() {
                if h >= k {
                    return Err(GraphError::DartOutOfRange(h));
                }
                if dart_vertex[h] != usize::MAX {
                    return Err(GraphError::DartInTwoVertices(h));
                }
                dart_vertex[h] = v;
                dart_pos[h] = i;
            }
        }
        if let Some(h) = dart_vertex.iter().position(|&v| v == usize::MAX) {
            return Err(GraphError::DartWithoutVertex(h));
        }
        let mut seen = vec![false; vertices.len()];
        for &v in incoming.iter().chain(&outgoing) {
            if v >= vertices.len() {
                return Err(GraphError::VertexOutOfRange(v));
            }
            if seen[v] {
                return Err(GraphError::ExternalRepeated(v));
            }
            seen[v] = true;
            if vertices[v].len() != 1 {
                return Err(GraphError::ExternalNotUnivalent(v));
            }
        }
        let g = RibbonGraph {
            edges,
            vertices,
            incoming,
            outgoing,
            dart_vertex,
            dart_pos,
            dart_edge,
        };
        g.check_valence()?;
        Ok(g)
    }

    /// Internal vertices need valence at least 3, except inside the two
    /// exceptional component shapes (a bare edge, or two bivalent vertices
    /// joined by two edges).
    fn check_valence(&self) -> Result<(), GraphError> {
        let comp = self.component_of_vertex();
        for (v, cyc) in self.vertices.iter().enumerate() {
            if self.is_external(v) || cyc.len() >= 3 {
                continue;
            }
            let members: Vec<usize> = (0..self.vertices.len()).filter(|&u| comp[u] == comp[v]).collect();
            let exceptional = members.len() == 2
                && members.iter().all(|&u| !self.is_external(u) && self.vertices[u].len() == 2);
            if !exceptional {
                return Err(GraphError::LowValence(v, cyc.len()));
            }
        }
        Ok(())
    }

    pub fn from_file(f: &GraphFile) -> Result<(Self, Option<Vec<Length>>), GraphError> {
        let g = RibbonGraph::new(f.sigma.clone(), f.rho.clone(), f.incoming.clone(), f.outgoing.clone())?;
        if g.num_darts() != f.half_edges {
            return Err(GraphError::DartOutOfRange(f.half_edges));
        }
        let lengths = match &f.lengths {
            None => None,
            Some(entries) => {
                let mut out = vec![Length::Finite(1.0); g.num_edges()];
                for (e, val) in entries {
                    if *e >= g.num_edges() {
                        return Err(GraphError::LengthCount {
                            expected: g.num_edges(),
                            found: *e + 1,
                        });
                    }
                    out[*e] = match val {
                        LengthEntry::Value(x) => Length::Finite(*x),
                        LengthEntry::Word(w) if w == "inf" => Length::Infinite,
                        LengthEntry::Word(_) => {
                            return Err(GraphError::LengthCount {
                                expected: g.num_edges(),
                                found: *e,
                            })
                        }
                    };
                }
                Some(out)
            }
        };
        Ok((g, lengths))
    }

    pub fn to_file(&self, lengths: Option<&[Length]>) -> GraphFile {
        GraphFile {
            half_edges: self.num_darts(),
            sigma: self.edges.clone(),
            rho: self.vertices.clone(),
            incoming: self.incoming.clone(),
            outgoing: self.outgoing.clone(),
            lengths: lengths.map(|ls| {
                ls.iter()
                    .enumerate()
                    .map(|(e, l)| {
                        (
                            e,
                            match l {
                                Length::Finite(x) => LengthEntry::Value(*x),
                                Length::Infinite => LengthEntry::Word("inf".into()),
                            },
                        )
                    })
                    .collect()
            }),
        }
    }

    pub fn num_darts(&self) -> usize {
        self.dart_edge.len()
    }
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }
    pub fn vertices(&self) -> &[Vec<usize>] {
        &self.vertices
    }
    pub fn incoming(&self) -> &[usize] {
        &self.incoming
    }
    pub fn outgoing(&self) -> &[usize] {
        &self.outgoing
    }
    pub fn sigma(&self, h: usize) -> usize {
        let [a, b] = self.edges[self.dart_edge[h]];
        if a == h {
            b
        } else {
            a
        }
    }
    pub fn rho(&self, h: usize) -> usize {
        let cyc = &self.vertices[self.dart_vertex[h]];
        cyc[(self.dart_pos[h] + 1) % cyc.len()]
    }
    pub fn face(&self, h: usize) -> usize {
        self.rho(self.sigma(h))
    }
    pub fn vertex_of(&self, h: usize) -> usize {
        self.dart_vertex[h]
    }
    pub fn edge_of(&self, h: usize) -> usize {
        self.dart_edge[h]
    }
    pub fn is_incoming(&self, v: usize) -> bool {
        self.incoming.contains(&v)
    }
    pub fn is_outgoing(&self, v: usize) -> bool {
        self.outgoing.contains(&v)
    }
    pub fn is_external(&self, v: usize) -> bool {
        self.is_incoming(v) || self.is_outgoing(v)
    }
    pub fn internal_vertices(&self) -> Vec<usize> {
        (0..self.num_vertices()).filter(|&v| !self.is_external(v)).collect()
    }
    /// Edges whose endpoints are both internal vertices.
    pub fn is_internal_edge(&self, e: usize) -> bool {
        self.edges[e].iter().all(|&h| !self.is_external(self.dart_vertex[h]))
    }
    pub fn internal_edges(&self) -> Vec<usize> {
        (0..self.num_edges()).filter(|&e| self.is_internal_edge(e)).collect()
    }
    pub fn is_loop(&self, e: usize) -> bool {
        let [a, b] = self.edges[e];
        self.dart_vertex[a] == self.dart_vertex[b]
    }
    /// The dart of the univalent external vertex `v`.
    pub fn external_dart(&self, v: usize) -> usize {
        self.vertices[v][0]
    }

    fn component_of_vertex(&self) -> Vec<usize> {
        let n = self.num_vertices();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        for &[a, b] in &self.edges {
            let (ra, rb) = (find(&mut parent, self.dart_vertex[a]), find(&mut parent, self.dart_vertex[b]));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let roots: Vec<usize> = (0..n).map(|v| find(&mut parent, v)).collect();
        let mut label = BTreeMap::new();
        roots
            .iter()
            .map(|r| {
                let next = label.len();
                *label.entry(*r).or_insert(next)
            })
            .collect()
    }

    /// Component index of every vertex (components numbered by first vertex).
    pub fn components(&self) -> Vec<usize> {
        self.component_of_vertex()
    }

    pub fn is_connected(&self) -> bool {
        self.component_of_vertex().iter().all(|&c| c == 0)
    }

    pub fn boundary_cycles(&self) -> Vec<Vec<usize>> {
        let k = self.num_darts();
        let mut seen = vec![false; k];
        let mut out = Vec::new();
        for s in 0..k {
            if seen[s] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut h = s;
            while !seen[h] {
                seen[h] = true;
                cyc.push(h);
                h = self.face(h);
            }
            out.push(cyc);
        }
        out
    }

    pub fn topology(&self) -> Topology {
        let comp = self.component_of_vertex();
        let ncomp = comp.iter().max().map_or(0, |m| m + 1);
        let mut v = vec![0i64; ncomp];
        let mut e = vec![0i64; ncomp];
        let mut h = vec![0i64; ncomp];
        for &c in &comp {
            v[c] += 1;
        }
        for &[a, _] in &self.edges {
            e[comp[self.dart_vertex[a]]] += 1;
        }
        let cycles = self.boundary_cycles();
        for cyc in &cycles {
            h[comp[self.dart_vertex[cyc[0]]]] += 1;
        }
        let components = (0..ncomp)
            .map(|c| {
                let chi = v[c] - e[c];
                let twice_g = 2 - chi - h[c];
                ComponentTopology {
                    vertices: v[c] as usize,
                    edges: e[c] as usize,
                    chi,
                    boundary_cycles: h[c] as usize,
                    genus: (twice_g / 2) as usize,
                }
            })
            .collect();
        Topology {
            components,
            chi: self.num_vertices() as i64 - self.num_edges() as i64,
            cycles,
        }
    }

    /// Genus and boundary count of a connected graph.
    pub fn genus_boundaries(&self) -> (usize, usize) {
        let t = self.topology();
        let c = &t.components[0];
        (c.genus, c.boundary_cycles)
    }

    pub fn default_trivialization(&self) -> DetTrivialization {
        DetTrivialization {
            vertex_order: (0..self.num_vertices()).filter(|&v| !self.is_outgoing(v)).collect(),
            edge_order: (0..self.num_edges()).collect(),
            flipped: vec![false; self.num_edges()],
        }
    }

    pub fn check_trivialization(&self, t: &DetTrivialization) -> Result<(), GraphError> {
        let mut vs = t.vertex_order.clone();
        vs.sort_unstable();
        let want: Vec<usize> = (0..self.num_vertices()).filter(|&v| !self.is_outgoing(v)).collect();
        if vs != want {
            return Err(GraphError::Trivialization("vertex order must list each non-outgoing vertex once"));
        }
        let mut es = t.edge_order.clone();
        es.sort_unstable();
        if es != (0..self.num_edges()).collect::<Vec<_>>() || t.flipped.len() != self.num_edges() {
            return Err(GraphError::Trivialization("edge order must list each edge once"));
        }
        Ok(())
    }

    /// Oriented darts `(h0, h1)` of edge `e` under a trivialization.
    pub fn oriented(&self, e: usize, t: &DetTrivialization) -> [usize; 2] {
        let [a, b] = self.edges[e];
        if t.flipped[e] {
            [b, a]
        } else {
            [a, b]
        }
    }

    /// Contracts the non-loop internal edge `e`. The merged vertex lists the
    /// darts following `h0` around its vertex, then those following `h1`, and
    /// takes the place of the vertex of `h0`.
    pub fn contract_edge(&self, e: usize) -> Result<Contraction, GraphError> {
        if e >= self.num_edges() {
            return Err(GraphError::NotInternal(e));
        }
        if !self.is_internal_edge(e) {
            return Err(GraphError::NotInternal(e));
        }
        if self.is_loop(e) {
            return Err(GraphError::Loop(e));
        }
        let [h0, h1] = self.edges[e];
        let (va, vb) = (self.dart_vertex[h0], self.dart_vertex[h1]);
        let after = |h: usize| {
            let cyc = &self.vertices[self.dart_vertex[h]];
            let i = self.dart_pos[h];
            (1..cyc.len()).map(move |s| cyc[(i + s) % cyc.len()])
        };
        let merged: Vec<usize> = after(h0).chain(after(h1)).collect();

        let mut dart_map = vec![None; self.num_darts()];
        let mut next = 0;
        for (h, slot) in dart_map.iter_mut().enumerate() {
            if h != h0 && h != h1 {
                *slot = Some(next);
                next += 1;
            }
        }
        let vertex_map: Vec<usize> = (0..self.num_vertices())
            .map(|v| {
                let v = if v == vb { va } else { v };
                v - usize::from(v > vb)
            })
            .collect();
        let mut vertices = Vec::new();
        for (v, cyc) in self.vertices.iter().enumerate() {
            if v == vb {
                continue;
            }
            let src = if v == va { &merged } else { cyc };
            vertices.push(src.iter().map(|&h| dart_map[h].unwrap()).collect());
        }
        let mut edge_map = vec![None; self.num_edges()];
        let mut edges = Vec::new();
        for (x, &[a, b]) in self.edges.iter().enumerate() {
            if x != e {
                edge_map[x] = Some(edges.len());
                edges.push([dart_map[a].unwrap(), dart_map[b].unwrap()]);
            }
        }
        let graph = RibbonGraph::new(
            edges,
            vertices,
            self.incoming.iter().map(|&v| vertex_map[v]).collect(),
            self.outgoing.iter().map(|&v| vertex_map[v]).collect(),
        )?;
        Ok(Contraction {
            graph,
            dart_map,
            vertex_map,
            edge_map,
        })
    }

    /// Trivialization of `γ/e` induced from one of `γ`, and the det sign
    /// relating the restriction of the form to `γ/e` with that trivialization.
    pub fn induced_contraction(
        &self,
        e: usize,
        t: &DetTrivialization,
        c: &Contraction,
    ) -> (DetTrivialization, i32) {
        let [h0, h1] = self.oriented(e, t);
        let (a, b) = (self.dart_vertex[h0], self.dart_vertex[h1]);
        let pos_e = t.edge_order.iter().position(|&x| x == e).unwrap();
        let pos_a = t.vertex_order.iter().position(|&x| x == a).unwrap();
        let pos_b = t.vertex_order.iter().position(|&x| x == b).unwrap();
        let r = t.vertex_order.len();
        let after_b = r - 1 - pos_b - usize::from(pos_a > pos_b);
        let exponent = pos_e + after_b + usize::from(pos_b < pos_a);
        let vertex_order = t
            .vertex_order
            .iter()
            .filter(|&&v| v != b)
            .map(|&v| c.vertex_map[v])
            .collect();
        let edge_order = t.edge_order.iter().filter_map(|&x| c.edge_map[x]).collect();
        let mut flipped = vec![false; c.graph.num_edges()];
        for (x, m) in c.edge_map.iter().enumerate() {
            if let Some(y) = m {
                flipped[*y] = t.flipped[x];
            }
        }
        (
            DetTrivialization {
                vertex_order,
                edge_order,
                flipped,
            },
            if exponent.is_multiple_of(2) { 1 } else { -1 },
        )
    }

    /// Disjoint union; darts, edges and vertices of `other` are shifted and
    /// its external vertices are appended after ours.
    pub fn disjoint_union(&self, other: &RibbonGraph) -> RibbonGraph {
        let dk = self.num_darts();
        let dv = self.num_vertices();
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|&[a, b]| [a + dk, b + dk]));
        let mut vertices = self.vertices.clone();
        vertices.extend(other.vertices.iter().map(|c| c.iter().map(|h| h + dk).collect()));
        let mut incoming = self.incoming.clone();
        incoming.extend(other.incoming.iter().map(|v| v + dv));
        let mut outgoing = self.outgoing.clone();
        outgoing.extend(other.outgoing.iter().map(|v| v + dv));
        RibbonGraph::new(edges, vertices, incoming, outgoing).expect("union of valid graphs")
    }

    /// `other ∘ self`: the i-th outgoing vertex of `self` is welded to the
    /// i-th incoming vertex of `other`, and the two external edges there
    /// become one edge (oriented from the `self` side) whose length is the sum.
    pub fn glue(&self, other: &RibbonGraph) -> Result<Glued, GraphError> {
        if self.outgoing.len() != other.incoming.len() {
            return Err(GraphError::Arity {
                outputs: self.outgoing.len(),
                inputs: other.incoming.len(),
            });
        }
        let dk = self.num_darts();
        let dv = self.num_vertices();
        let removed_darts: Vec<usize> = self
            .outgoing
            .iter()
            .map(|&v| self.external_dart(v))
            .chain(other.incoming.iter().map(|&v| other.external_dart(v) + dk))
            .collect();
        let removed_vertices: Vec<usize> = self
            .outgoing
            .iter()
            .cloned()
            .chain(other.incoming.iter().map(|v| v + dv))
            .collect();
        let total_darts = dk + other.num_darts();
        let mut dart_map = vec![None; total_darts];
        let mut next = 0;
        for (h, slot) in dart_map.iter_mut().enumerate() {
            if !removed_darts.contains(&h) {
                *slot = Some(next);
                next += 1;
            }
        }
        let total_vertices = dv + other.num_vertices();
        let mut vertex_map = vec![None; total_vertices];
        let mut next = 0;
        for (v, slot) in vertex_map.iter_mut().enumerate() {
            if !removed_vertices.contains(&v) {
                *slot = Some(next);
                next += 1;
            }
        }
        let mut vertices = Vec::new();
        for (v, cyc) in self
            .vertices
            .iter()
            .cloned()
            .chain(other.vertices.iter().map(|c| c.iter().map(|h| h + dk).collect()))
            .enumerate()
        {
            if vertex_map[v].is_some() {
                vertices.push(cyc.iter().map(|&h| dart_map[h].unwrap()).collect());
            }
        }
        // edge provenance: Left(e1), Right(e2), or Welded(e1, e2)
        let mut edges = Vec::new();
        let mut origin = Vec::new();
        let welded_left: Vec<usize> = self.outgoing.iter().map(|&v| self.edge_of(self.external_dart(v))).collect();
        let welded_right: Vec<usize> = other.incoming.iter().map(|&v| other.edge_of(other.external_dart(v))).collect();
        for (e, &[a, b]) in self.edges.iter().enumerate() {
            if let Some(i) = welded_left.iter().position(|&x| x == e) {
                let x = if self.external_dart(self.outgoing[i]) == a { b } else { a };
                let e2 = welded_right[i];
                let d2 = other.external_dart(other.incoming[i]);
                let [c2, d2b] = other.edges[e2];
                let y = if c2 == d2 { d2b } else { c2 };
                edges.push([dart_map[x].unwrap(), dart_map[y + dk].unwrap()]);
                origin.push(EdgeOrigin::Welded(e, e2));
            } else {
                edges.push([dart_map[a].unwrap(), dart_map[b].unwrap()]);
                origin.push(EdgeOrigin::Left(e));
            }
        }
        for (e, &[a, b]) in other.edges.iter().enumerate() {
            if !welded_right.contains(&e) {
                edges.push([dart_map[a + dk].unwrap(), dart_map[b + dk].unwrap()]);
                origin.push(EdgeOrigin::Right(e));
            }
        }
        let incoming = self.incoming.iter().map(|&v| vertex_map[v].unwrap()).collect();
        let outgoing = other.outgoing.iter().map(|&v| vertex_map[v + dv].unwrap()).collect();
        let graph = RibbonGraph::new(edges, vertices, incoming, outgoing)?;
        Ok(Glued {
            graph,
            origin,
            left_vertex_map: (0..dv).map(|v| vertex_map[v]).collect(),
            right_vertex_map: (0..other.num_vertices()).map(|v| vertex_map[v + dv]).collect(),
        })
    }

    /// Checks the admissibility conditions on a metric: no cycle of zero
    /// length and no zero-length path between distinct outgoing vertices.
    pub fn check_metric(&self, lengths: &[Length]) -> Result<(), GraphError> {
        if lengths.len() != self.num_edges() {
            return Err(GraphError::LengthCount {
                expected: self.num_edges(),
                found: lengths.len(),
            });
        }
        let n = self.num_vertices();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            r
        }
        for (e, l) in lengths.iter().enumerate() {
            if !l.is_zero() {
                continue;
            }
            let [a, b] = self.edges[e];
            let (ra, rb) = (find(&mut parent, self.dart_vertex[a]), find(&mut parent, self.dart_vertex[b]));
            if ra == rb {
                return Err(GraphError::ZeroLengthCycle);
            }
            parent[ra] = rb;
        }
        for (i, &u) in self.outgoing.iter().enumerate() {
            for &w in &self.outgoing[i + 1..] {
                if find(&mut parent, u) == find(&mut parent, w) {
                    return Err(GraphError::ZeroLengthOutPath(u, w));
                }
            }
        }
        Ok(())
    }

    /// Label of a dart for canonical coding: 0 for darts at internal
    /// vertices, `1 + i` at incoming vertex `i`, `1 + n + j` at outgoing `j`.
    fn dart_label(&self, h: usize) -> u32 {
        let v = self.dart_vertex[h];
        if let Some(i) = self.incoming.iter().position(|&x| x == v) {
            1 + i as u32
        } else if let Some(j) = self.outgoing.iter().position(|&x| x == v) {
            1 + (self.incoming.len() + j) as u32
        } else {
            0
        }
    }

    /// Traversal code of the component containing `start`, numbering darts
    /// in breadth-first order along `sigma` then `rho`.
    fn code_from(&self, start: usize) -> Vec<u32> {
        let k = self.num_darts();
        let mut num = vec![u32::MAX; k];
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        num[start] = 0;
        order.push(start);
        queue.push_back(start);
        while let Some(h) = queue.pop_front() {
            for nb in [self.sigma(h), self.rho(h)] {
                if num[nb] == u32::MAX {
                    num[nb] = order.len() as u32;
                    order.push(nb);
                    queue.push_back(nb);
                }
            }
        }
        let mut code = Vec::with_capacity(3 * order.len());
        for &h in &order {
            code.push(num[self.sigma(h)]);
            code.push(num[self.rho(h)]);
            code.push(self.dart_label(h));
        }
        code
    }

    /// Darts of the component containing dart `h`.
    fn component_darts(&self, h: usize) -> Vec<usize> {
        let comp = self.component_of_vertex();
        let c = comp[self.dart_vertex[h]];
        (0..self.num_darts()).filter(|&x| comp[self.dart_vertex[x]] == c).collect()
    }

    /// Canonical code and automorphism count of the component containing `h`.
    fn component_canonical(&self, h: usize) -> (Vec<u32>, usize) {
        let darts = self.component_darts(h);
        let labelled: Vec<usize> = darts.iter().cloned().filter(|&x| self.dart_label(x) != 0).collect();
        let starts = if labelled.is_empty() {
            darts
        } else {
            let first = *labelled.iter().min_by_key(|&&x| self.dart_label(x)).unwrap();
            vec![first]
        };
        let mut best: Option<Vec<u32>> = None;
        let mut count = 0;
        for s in starts {
            let code = self.code_from(s);
            match &best {
                Some(b) if code > *b => {}
                Some(b) if code == *b => count += 1,
                _ => {
                    best = Some(code);
                    count = 1;
                }
            }
        }
        (best.unwrap_or_default(), count)
    }

    /// Canonical form of the whole graph: sorted component codes. Two graphs
    /// are isomorphic (respecting external labels) iff their codes agree.
    pub fn canonical_code(&self) -> Vec<Vec<u32>> {
        let comp = self.component_of_vertex();
        let ncomp = comp.iter().max().map_or(0, |m| m + 1);
        let mut codes: Vec<Vec<u32>> = (0..ncomp)
            .filter_map(|c| {
                (0..self.num_darts())
                    .find(|&h| comp[self.dart_vertex[h]] == c)
                    .map(|h| self.component_canonical(h).0)
            })
            .collect();
        // isolated vertices with no darts cannot occur: every vertex has a dart
        codes.sort();
        codes
    }

    pub fn is_isomorphic(&self, other: &RibbonGraph) -> bool {
        self.canonical_code() == other.canonical_code()
    }

    /// All automorphisms (dart permutations commuting with sigma and rho and
    /// fixing external darts) of a connected graph.
    pub fn automorphisms_connected(&self) -> Vec<Vec<usize>> {
        let k = self.num_darts();
        if k == 0 {
            return vec![vec![]];
        }
        let labelled: Vec<usize> = (0..k).filter(|&h| self.dart_label(h) != 0).collect();
        let base = labelled.first().cloned().unwrap_or(0);
        let candidates: Vec<usize> = if labelled.is_empty() { (0..k).collect() } else { vec![base] };
        let mut out = Vec::new();
        'cand: for img in candidates {
            let mut map = vec![usize::MAX; k];
            map[base] = img;
            let mut stack = vec![base];
            while let Some(h) = stack.pop() {
                let m = map[h];
                for (a, b) in [(self.sigma(h), self.sigma(m)), (self.rho(h), self.rho(m))] {
                    if map[a] == usize::MAX {
                        map[a] = b;
                        stack.push(a);
                    } else if map[a] != b {
                        continue 'cand;
                    }
                }
            }
            if map.contains(&usize::MAX) {
                continue;
            }
            let mut seen = vec![false; k];
            for &x in &map {
                if seen[x] {
                    continue 'cand;
                }
                seen[x] = true;
            }
            if (0..k).any(|h| self.dart_label(h) != self.dart_label(map[h])) {
                continue;
            }
            out.push(map);
        }
        out
    }

    /// Order of the automorphism group.
    pub fn automorphism_order(&self) -> usize {
        let comp = self.component_of_vertex();
        let ncomp = comp.iter().max().map_or(0, |m| m + 1);
        let mut order = 1usize;
        let mut free_codes: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
        for c in 0..ncomp {
            let h = (0..self.num_darts()).find(|&h| comp[self.dart_vertex[h]] == c).unwrap();
            let (code, count) = self.component_canonical(h);
            order *= count;
            if self.component_darts(h).iter().all(|&x| self.dart_label(x) == 0) {
                *free_codes.entry(code).or_default() += 1;
            }
        }
        for (_, m) in free_codes {
            order *= (1..=m).product::<usize>();
        }
        order
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeOrigin {
    Left(usize),
    Right(usize),
    Welded(usize, usize),
}

#[derive(Debug, Clone)]
pub struct Glued {
    pub graph: RibbonGraph,
    pub origin: Vec<EdgeOrigin>,
    pub left_vertex_map: Vec<Option<usize>>,
    pub right_vertex_map: Vec<Option<usize>>,
}

impl Glued {
    /// Position of the composite edge coming from edge `a` of the left graph.
    pub fn from_left(&self, a: usize) -> usize {
        self.origin
            .iter()
            .position(|o| matches!(o, EdgeOrigin::Left(x) | EdgeOrigin::Welded(x, _) if *x == a))
            .expect("left edge present")
    }

    /// Position of the composite edge coming from edge `b` of the right graph.
    pub fn from_right(&self, b: usize) -> usize {
        self.origin
            .iter()
            .position(|o| matches!(o, EdgeOrigin::Right(x) | EdgeOrigin::Welded(_, x) if *x == b))
            .expect("right edge present")
    }

    /// Trivialization of the composite induced by `t1` on the left graph and
    /// `t2` on the right graph, with the sign `kappa` such that composing the
    /// two forms equals `kappa` times the composite form (up to the `dl`
    /// reordering of the wedge product).
    ///
    /// Both trivializations are first normalized: welded edges of the left
    /// graph go last (in output order, pointing at the outputs); incoming
    /// vertices and welded edges of the right graph go first (in input order,
    /// pointing away from the inputs). The composite lists left vertices then
    /// the remaining right vertices, and left edges then remaining right edges.
    pub fn induced_trivialization(
        &self,
        left: &RibbonGraph,
        right: &RibbonGraph,
        t1: &DetTrivialization,
        t2: &DetTrivialization,
        p: u8,
    ) -> (DetTrivialization, i32) {
        let m = left.outgoing.len();
        let welded_left: Vec<usize> = left.outgoing.iter().map(|&v| left.edge_of(left.external_dart(v))).collect();
        let welded_right: Vec<usize> = right.incoming.iter().map(|&v| right.edge_of(right.external_dart(v))).collect();

        let mut n1 = t1.clone();
        n1.edge_order.retain(|e| !welded_left.contains(e));
        n1.edge_order.extend(&welded_left);
        for (i, &e) in welded_left.iter().enumerate() {
            // orient towards the output dart
            n1.flipped[e] = left.edges[e][1] != left.external_dart(left.outgoing[i]);
        }
        let mut n2 = t2.clone();
        n2.vertex_order.retain(|v| !right.incoming.contains(v));
        let mut vo = right.incoming.clone();
        vo.extend(&n2.vertex_order);
        n2.vertex_order = vo;
        n2.edge_order.retain(|e| !welded_right.contains(e));
        let mut eo = welded_right.clone();
        eo.extend(&n2.edge_order);
        n2.edge_order = eo;
        for (i, &e) in welded_right.iter().enumerate() {
            n2.flipped[e] = right.edges[e][0] != right.external_dart(right.incoming[i]);
        }

        let vertex_order: Vec<usize> = n1
            .vertex_order
            .iter()
            .map(|&v| self.left_vertex_map[v].expect("non-outgoing left vertex survives"))
            .chain(n2.vertex_order[m..].iter().map(|&v| self.right_vertex_map[v].expect("right vertex survives")))
            .collect();
        let edge_order: Vec<usize> = n1
            .edge_order
            .iter()
            .map(|&a| self.from_left(a))
            .chain(n2.edge_order[m..].iter().map(|&b| self.from_right(b)))
            .collect();
        let flipped = self
            .origin
            .iter()
            .map(|o| match *o {
                EdgeOrigin::Left(a) => n1.flipped[a],
                EdgeOrigin::Right(b) => n2.flipped[b],
                EdgeOrigin::Welded(..) => false,
            })
            .collect();
        let composite = DetTrivialization {
            vertex_order,
            edge_order,
            flipped,
        };
        let base = glue_base_exponent(m);
        let twist = det_sign(t1, &n1) * det_sign(t2, &n2);
        let kappa = if p % 2 == 1 { twist * if base.is_multiple_of(2) { 1 } else { -1 } } else { 1 };
        (composite, kappa)
    }
}

/// Exponent of the gluing sign for normalized trivializations: each of the
/// `m` removed incoming vertices of the right graph carries its weld along.
fn glue_base_exponent(m: usize) -> usize {
    m * (m + 1) / 2
}

/// Sign of the permutation taking `from` to `to` (same elements).
pub fn permutation_sign<T: PartialEq>(from: &[T], to: &[T]) -> i32 {
    let pos: Vec<usize> = from.iter().map(|x| to.iter().position(|y| y == x).expect("same elements")).collect();
    let mut inv = 0;
    for i in 0..pos.len() {
        for j in i + 1..pos.len() {
            if pos[i] > pos[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sign relating two trivializations of the same graph: signatures of the
/// vertex and edge reorderings times `-1` per differently oriented edge.
pub fn det_sign(t1: &DetTrivialization, t2: &DetTrivialization) -> i32 {
    let flips = t1.flipped.iter().zip(&t2.flipped).filter(|(a, b)| a != b).count();
    permutation_sign(&t1.vertex_order, &t2.vertex_order)
        * permutation_sign(&t1.edge_order, &t2.edge_order)
        * if flips % 2 == 0 { 1 } else { -1 }
}

/// An isomorphism class produced by the enumerator.
#[derive(Debug, Clone)]
pub struct GraphClass {
    pub graph: RibbonGraph,
    pub automorphisms: usize,
}

/// Connected ribbon graphs with trivalent internal vertices, genus `g`,
/// `h` boundary cycles and `n` labelled incoming legs, one per class.
///
/// Rooted maps are grown dart by dart: the smallest unmatched dart is paired
/// with an existing unmatched dart, a fresh trivalent vertex or a fresh leg.
/// Each rooted map arises exactly once; classes are the canonical codes.
pub fn enumerate_trivalent(g: usize, h: usize, n: usize) -> Result<Vec<GraphClass>, GraphError> {
    let twice = 4 * g as i64 - 4 + 2 * h as i64 + n as i64;
    if h == 0 || twice <= 0 {
        return Err(GraphError::Unstable(g, h, n));
    }
    let v_int = twice as usize;
    if !(3 * v_int + n).is_multiple_of(2) {
        return Ok(vec![]);
    }
    let mut found: BTreeMap<Vec<Vec<u32>>, GraphClass> = BTreeMap::new();
    let mut state = Growth::new(v_int, n);
    state.grow(&mut |gr: &RibbonGraph| {
        if gr.genus_boundaries() == (g, h) {
            let code = gr.canonical_code();
            found.entry(code).or_insert_with(|| GraphClass {
                automorphisms: gr.automorphism_order(),
                graph: gr.clone(),
            });
        }
    });
    Ok(found.into_values().collect())
}

struct Growth {
    v_int: usize,
    n: usize,
    partner: Vec<usize>,
    /// vertex cycles; legs are single darts
    cycles: Vec<Vec<usize>>,
    leg_vertex: Vec<Option<usize>>,
    dart_vertex: Vec<usize>,
    internal: usize,
}

impl Growth {
    fn new(v_int: usize, n: usize) -> Self {
        let mut s = Growth {
            v_int,
            n,
            partner: Vec::new(),
            cycles: Vec::new(),
            leg_vertex: vec![None; n],
            dart_vertex: Vec::new(),
            internal: 0,
        };
        if n > 0 {
            s.add_leg(0);
        } else {
            s.add_vertex();
        }
        s
    }

    fn add_vertex(&mut self) -> usize {
        let k = self.partner.len();
        let v = self.cycles.len();
        self.cycles.push(vec![k, k + 1, k + 2]);
        for _ in 0..3 {
            self.partner.push(usize::MAX);
            self.dart_vertex.push(v);
        }
        self.internal += 1;
        k
    }

    fn remove_vertex(&mut self) {
        self.cycles.pop();
        for _ in 0..3 {
            self.partner.pop();
            self.dart_vertex.pop();
        }
        self.internal -= 1;
    }

    fn add_leg(&mut self, label: usize) -> usize {
        let k = self.partner.len();
        let v = self.cycles.len();
        self.cycles.push(vec![k]);
        self.partner.push(usize::MAX);
        self.dart_vertex.push(v);
        self.leg_vertex[label] = Some(v);
        k
    }

    fn remove_leg(&mut self, label: usize) {
        self.cycles.pop();
        self.partner.pop();
        self.dart_vertex.pop();
        self.leg_vertex[label] = None;
    }

    fn link(&mut self, a: usize, b: usize) {
        self.partner[a] = b;
        self.partner[b] = a;
    }

    fn unlink(&mut self, a: usize, b: usize) {
        self.partner[a] = usize::MAX;
        self.partner[b] = usize::MAX;
    }

    fn open_count(&self) -> usize {
        self.partner.iter().filter(|&&p| p == usize::MAX).count()
    }

    fn grow(&mut self, emit: &mut dyn FnMut(&RibbonGraph)) {
        let Some(d) = self.partner.iter().position(|&p| p == usize::MAX) else {
            if self.internal == self.v_int && self.leg_vertex.iter().all(|l| l.is_some()) {
                emit(&self.to_graph());
            }
            return;
        };
        // open darts must still be closable: each new vertex adds 1 net open dart,
        // each leg removes one
        let legs_left = self.leg_vertex.iter().filter(|l| l.is_none()).count();
        let verts_left = self.v_int - self.internal;
        let open = self.open_count();
        if open + verts_left < legs_left || !(open + verts_left + legs_left).is_multiple_of(2) {
            return;
        }
        let is_leg = |s: &Self, h: usize| s.cycles[s.dart_vertex[h]].len() == 1;
        // pair with an existing open dart
        for e in d + 1..self.partner.len() {
            if self.partner[e] != usize::MAX {
                continue;
            }
            if is_leg(self, d) && is_leg(self, e) && self.v_int > 0 {
                continue;
            }
            self.link(d, e);
            self.grow(emit);
            self.unlink(d, e);
        }
        if verts_left > 0 {
            let k = self.add_vertex();
            self.link(d, k);
            self.grow(emit);
            self.unlink(d, k);
            self.remove_vertex();
        }
        if !is_leg(self, d) {
            for label in 0..self.n {
                if self.leg_vertex[label].is_some() {
                    continue;
                }
                let k = self.add_leg(label);
                self.link(d, k);
                self.grow(emit);
                self.unlink(d, k);
                self.remove_leg(label);
            }
        }
    }

    fn to_graph(&self) -> RibbonGraph {
        let mut edges = Vec::new();
        for (a, &b) in self.partner.iter().enumerate() {
            if a < b {
                edges.push([a, b]);
            }
        }
        let incoming = self.leg_vertex.iter().map(|l| l.unwrap()).collect();
        RibbonGraph::new(edges, self.cycles.clone(), incoming, vec![]).expect("grown graph is valid")
    }
}

/// Standard small graphs.
pub mod zoo {
    use super::RibbonGraph;

    /// Two trivalent vertices joined by three edges; cyclic orders
    /// `(abc),(abc)` give genus one with one boundary cycle.
    pub fn theta_genus_one() -> RibbonGraph {
        RibbonGraph::new(vec![[0, 3], [1, 4], [2, 5]], vec![vec![0, 1, 2], vec![3, 4, 5]], vec![], vec![]).unwrap()
    }

    /// The planar theta graph: cyclic orders `(abc),(acb)`.
    pub fn theta_planar() -> RibbonGraph {
        RibbonGraph::new(vec![[0, 3], [1, 4], [2, 5]], vec![vec![0, 1, 2], vec![3, 5, 4]], vec![], vec![]).unwrap()
    }

    /// Two loops joined by a bar.
    pub fn dumbbell() -> RibbonGraph {
        RibbonGraph::new(vec![[0, 1], [2, 5], [3, 4]], vec![vec![0, 1, 2], vec![3, 4, 5]], vec![], vec![]).unwrap()
    }

    /// A single edge from an incoming to an outgoing vertex.
    pub fn unit() -> RibbonGraph {
        RibbonGraph::new(vec![[1, 0]], vec![vec![0], vec![1]], vec![0], vec![1]).unwrap()
    }

    /// Trivalent vertex with two incoming legs and one outgoing leg.
    pub fn corolla(inputs: usize) -> RibbonGraph {
        let k = inputs + 1;
        let mut edges = Vec::new();
        let mut vertices = vec![(0..k).collect::<Vec<_>>()];
        for i in 0..inputs {
            edges.push([i, k + i]);
            vertices.push(vec![k + i]);
        }
        edges.push([2 * k - 1, inputs]);
        vertices.push(vec![2 * k - 1]);
        let incoming = (1..=inputs).collect();
        RibbonGraph::new(edges, vertices, incoming, vec![inputs + 1]).unwrap()
    }

    /// Theta with one incoming and one outgoing leg attached at the two vertices.
    pub fn theta_with_legs(planar: bool) -> RibbonGraph {
        let v1 = if planar { vec![3, 5, 4, 7] } else { vec![3, 4, 5, 7] };
        RibbonGraph::new(
            vec![[0, 3], [1, 4], [2, 5], [6, 8], [9, 7]],
            vec![vec![0, 1, 2, 6], v1, vec![8], vec![9]],
            vec![2],
            vec![3],
        )
        .unwrap()
    }

    /// Theta with a single incoming leg on one vertex and a tadpole shape.
    pub fn theta_one_leg() -> RibbonGraph {
        RibbonGraph::new(
            vec![[0, 3], [1, 4], [2, 5], [6, 7]],
            vec![vec![0, 1, 2, 6], vec![3, 4, 5], vec![7]],
            vec![2],
            vec![],
        )
        .unwrap()
    }

    /// A binary tree with three incoming leaves and one root.
    pub fn tree3(left_comb: bool) -> RibbonGraph {
        // vertices: A = [0,1,2], B = [3,4,5]; edge 2-3 internal
        let edges = if left_comb {
            vec![[2, 3], [0, 6], [1, 7], [4, 8], [9, 5]]
        } else {
            vec![[3, 2], [0, 6], [1, 7], [4, 8], [9, 5]]
        };
        RibbonGraph::new(
            edges,
            vec![vec![0, 1, 2], vec![3, 4, 5], vec![6], vec![7], vec![8], vec![9]],
            vec![2, 3, 4],
            vec![5],
        )
        .unwrap()
    }
}

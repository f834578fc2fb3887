use crate::error::{Error, Result};
use crate::weight::Weight;

/// Vertices are numbered 0..=n, with 0 reserved for the root.
pub type VertexId = usize;

/// Stable arc identifier, assigned from an insertion counter. Ids survive
/// copies and removals; transformations that replace arcs mint fresh ids.
pub type ArcId = usize;

/// A weighted directed arc. Self-loops are never constructed.
#[derive(Debug, Clone, PartialEq)]
pub struct Arc<W> {
    pub id: ArcId,
    pub source: VertexId,
    pub target: VertexId,
    pub weight: W,
}

/// A weighted directed multigraph on vertices {0..n}. Values are immutable:
/// every transformation returns a new graph. Arcs keep insertion order, which
/// makes all downstream iteration and output deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct Digraph<W> {
    vertex_count: usize,
    arcs: Vec<Arc<W>>,
    next_id: ArcId,
}

impl<W: Weight> Digraph<W> {
    /// Create a graph with `vertex_count` vertices (root plus n others) and
    /// no arcs.
    pub fn new(vertex_count: usize) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::InvalidInput(
                "vertex_count must be at least 1".into(),
            ));
        }
        Ok(Digraph {
            vertex_count,
            arcs: Vec::new(),
            next_id: 0,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Number of non-root vertices (n for a matrix digraph on {0..n}).
    pub fn non_root_count(&self) -> usize {
        self.vertex_count - 1
    }

    pub fn arcs(&self) -> &[Arc<W>] {
        &self.arcs
    }

    pub fn arc(&self, id: ArcId) -> Result<&Arc<W>> {
        self.arcs
            .iter()
            .find(|arc| arc.id == id)
            .ok_or(Error::UnknownArc(id))
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v < self.vertex_count {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                count: self.vertex_count,
            })
        }
    }

    /// Add an arc, returning the extended graph and the new arc's id.
    pub fn add_arc(&self, source: VertexId, target: VertexId, weight: W) -> Result<(Self, ArcId)> {
        self.check_vertex(source)?;
        self.check_vertex(target)?;
        if source == target {
            return Err(Error::SelfLoop(source));
        }
        let mut next = self.clone();
        let id = next.next_id;
        next.next_id += 1;
        next.arcs.push(Arc {
            id,
            source,
            target,
            weight,
        });
        Ok((next, id))
    }

    /// Remove an arc by id, keeping all others in order.
    pub fn remove_arc(&self, id: ArcId) -> Result<Self> {
        let index = self
            .arcs
            .iter()
            .position(|arc| arc.id == id)
            .ok_or(Error::UnknownArc(id))?;
        let mut next = self.clone();
        next.arcs.remove(index);
        Ok(next)
    }

    /// Insert an arc with a fresh id at a given list position, shifting
    /// later arcs. Used when a merged arc takes over a predecessor's slot.
    pub(crate) fn insert_arc_at(
        &self,
        position: usize,
        source: VertexId,
        target: VertexId,
        weight: W,
    ) -> Result<(Self, ArcId)> {
        self.check_vertex(source)?;
        self.check_vertex(target)?;
        if source == target {
            return Err(Error::SelfLoop(source));
        }
        let mut next = self.clone();
        let id = next.next_id;
        next.next_id += 1;
        next.arcs.insert(
            position.min(next.arcs.len()),
            Arc {
                id,
                source,
                target,
                weight,
            },
        );
        Ok((next, id))
    }

    /// Replace the source of an arc in place (same position, same id).
    /// Callers are responsible for precondition checks; see `move_arc`.
    pub(crate) fn with_arc_source(&self, id: ArcId, new_source: VertexId) -> Result<Self> {
        self.check_vertex(new_source)?;
        let index = self
            .arcs
            .iter()
            .position(|arc| arc.id == id)
            .ok_or(Error::UnknownArc(id))?;
        let mut next = self.clone();
        next.arcs[index].source = new_source;
        Ok(next)
    }

    /// Arcs with target `v`, in insertion order.
    pub fn in_arcs(&self, v: VertexId) -> Result<Vec<&Arc<W>>> {
        self.check_vertex(v)?;
        Ok(self.arcs.iter().filter(|arc| arc.target == v).collect())
    }

    /// Arcs with source `v`, in insertion order.
    pub fn out_arcs(&self, v: VertexId) -> Result<Vec<&Arc<W>>> {
        self.check_vertex(v)?;
        Ok(self.arcs.iter().filter(|arc| arc.source == v).collect())
    }

    /// Whether vertex 0 has no in-arcs.
    pub fn is_root_valid(&self) -> bool {
        self.arcs.iter().all(|arc| arc.target != 0)
    }

    /// True iff the only in-arc to `v` is a single arc from the root.
    pub fn is_rooted_at(&self, v: VertexId) -> Result<bool> {
        if v == 0 {
            return Err(Error::RootQuery);
        }
        let incoming = self.in_arcs(v)?;
        Ok(incoming.len() == 1 && incoming[0].source == 0)
    }

    /// True iff `v` is rooted and has no out-arcs.
    pub fn is_isolated_at(&self, v: VertexId) -> Result<bool> {
        Ok(self.is_rooted_at(v)? && self.out_arcs(v)?.is_empty())
    }

    /// Partition the vertices into strongly connected components.
    pub fn scc_partition(&self) -> SccPartition {
        Tarjan::run(self)
    }

    /// True iff `u` and `v` lie on a common directed cycle (or are equal).
    pub fn strongly_connected(&self, u: VertexId, v: VertexId) -> Result<bool> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        let partition = self.scc_partition();
        Ok(partition.component_of(u) == partition.component_of(v))
    }
}

/// The strongly-connected-component partition of a digraph's vertices.
/// Vertices share a component index exactly when each reaches the other.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SccPartition {
    component_of: Vec<usize>,
    component_count: usize,
}

impl SccPartition {
    pub fn component_of(&self, v: VertexId) -> usize {
        self.component_of[v]
    }

    pub fn component_count(&self) -> usize {
        self.component_count
    }

    pub fn same_component(&self, u: VertexId, v: VertexId) -> bool {
        self.component_of[u] == self.component_of[v]
    }
}

/// Tarjan's algorithm over the adjacency lists implied by the arc multiset.
struct Tarjan {
    adjacency: Vec<Vec<VertexId>>,
    index: Vec<Option<usize>>,
    lowlink: Vec<usize>,
    on_stack: Vec<bool>,
    stack: Vec<VertexId>,
    next_index: usize,
    component_of: Vec<usize>,
    component_count: usize,
}

impl Tarjan {
    fn run<W: Weight>(g: &Digraph<W>) -> SccPartition {
        let n = g.vertex_count();
        let mut adjacency = vec![Vec::new(); n];
        for arc in g.arcs() {
            adjacency[arc.source].push(arc.target);
        }
        let mut state = Tarjan {
            adjacency,
            index: vec![None; n],
            lowlink: vec![0; n],
            on_stack: vec![false; n],
            stack: Vec::new(),
            next_index: 0,
            component_of: vec![0; n],
            component_count: 0,
        };
        for v in 0..n {
            if state.index[v].is_none() {
                state.visit(v);
            }
        }
        SccPartition {
            component_of: state.component_of,
            component_count: state.component_count,
        }
    }

    fn visit(&mut self, v: VertexId) {
        self.index[v] = Some(self.next_index);
        self.lowlink[v] = self.next_index;
        self.next_index += 1;
        self.stack.push(v);
        self.on_stack[v] = true;

        for i in 0..self.adjacency[v].len() {
            let w = self.adjacency[v][i];
            match self.index[w] {
                None => {
                    self.visit(w);
                    self.lowlink[v] = self.lowlink[v].min(self.lowlink[w]);
                }
                Some(w_index) => {
                    if self.on_stack[w] {
                        self.lowlink[v] = self.lowlink[v].min(w_index);
                    }
                }
            }
        }

        if self.lowlink[v] == self.index[v].unwrap() {
            loop {
                let w = self.stack.pop().unwrap();
                self.on_stack[w] = false;
                self.component_of[w] = self.component_count;
                if w == v {
                    break;
                }
            }
            self.component_count += 1;
        }
    }
}

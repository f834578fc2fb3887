use crate::error::{Error, Result};
use crate::graph::{ArcId, Digraph, VertexId};
use crate::transforms::{combine_all_parallel, combine_arcs, move_arc};
use crate::weight::Weight;

/// Which factoring recursion produced a factorization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// One branch per vertex rooted at j and unrooted at the vertices tried
    /// before it; n! leaves on a complete digraph.
    Sequential,
    /// One branch per nonempty rooted vertex subset; ordered-Bell-many
    /// leaves on a complete digraph.
    Partitioned,
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Strategy::Sequential => write!(f, "sequential"),
            Strategy::Partitioned => write!(f, "partitioned"),
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sequential" => Ok(Strategy::Sequential),
            "partitioned" => Ok(Strategy::Partitioned),
            other => Err(Error::InvalidInput(format!(
                "unknown strategy `{other}`, expected sequential or partitioned"
            ))),
        }
    }
}

/// One leaf of a factoring recursion: the root-arc weight of every vertex
/// (in vertex order 1..n) and the order in which vertices were isolated on
/// the way down.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorTerm<W> {
    pub factors: Vec<W>,
    pub isolation_order: Vec<VertexId>,
}

impl<W: Weight> FactorTerm<W> {
    /// Product of the factors; for symbolic weights this keeps the factored
    /// product-of-sums shape rather than expanding.
    pub fn value(&self) -> W {
        let mut product = W::one();
        for factor in &self.factors {
            product = product.mul(factor);
        }
        product
    }
}

/// The result of factoring a digraph's determinant: a sum of per-leaf
/// products that evaluates to the arborescence sum of the source graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization<W> {
    pub strategy: Strategy,
    pub terms: Vec<FactorTerm<W>>,
}

impl<W: Weight> Factorization<W> {
    /// Sum of all term values, unexpanded.
    pub fn total(&self) -> W {
        let mut sum = W::zero();
        for term in &self.terms {
            sum = sum.add(&term.value());
        }
        sum
    }

    /// Sum of all term values in canonical form.
    pub fn total_normalized(&self) -> Result<W> {
        self.total().normalize()
    }
}

/// Progress callbacks from the factoring recursions, used for DOT export
/// and structural tests. Graph references are only valid for the call.
pub enum FactorEvent<'a, W> {
    /// The normalized input graph, sent once before recursion starts.
    Start { graph: &'a Digraph<W> },
    /// A rooted subgraph, before isolation.
    Rooted {
        graph: &'a Digraph<W>,
        vertices: &'a [VertexId],
    },
    /// The same branch after isolating the rooted vertices.
    Isolated {
        graph: &'a Digraph<W>,
        vertices: &'a [VertexId],
    },
    /// A fully isolated leaf.
    Leaf {
        graph: &'a Digraph<W>,
        isolation_order: &'a [VertexId],
    },
}

/// Split `g` at vertex `v` into the branch rooted at `v` (all non-root
/// in-arcs to `v` dropped) and the branch not rooted at `v` (the root arc
/// dropped). Arborescence sums satisfy sum(g) = sum(rooted) + sum(unrooted).
pub fn root_split<W: Weight>(g: &Digraph<W>, v: VertexId) -> Result<(Digraph<W>, Digraph<W>)> {
    if v == 0 {
        return Err(Error::RootQuery);
    }
    g.check_vertex(v)?;
    let in_arcs: Vec<(ArcId, VertexId)> = g
        .in_arcs(v)?
        .iter()
        .map(|arc| (arc.id, arc.source))
        .collect();
    if !in_arcs.iter().any(|&(_, source)| source == 0) {
        return Err(Error::NoRootArc(v));
    }
    let mut rooted = g.clone();
    let mut unrooted = g.clone();
    for (id, source) in in_arcs {
        if source == 0 {
            unrooted = unrooted.remove_arc(id)?;
        } else {
            rooted = rooted.remove_arc(id)?;
        }
    }
    Ok((rooted, unrooted))
}

/// Move every out-arc of the rooted vertex `j` to the root, then combine the
/// parallel root arcs that creates. Afterwards `j` is isolated and the
/// arborescence sum is unchanged.
pub fn isolate_vertex<W: Weight>(g: &Digraph<W>, j: VertexId) -> Result<Digraph<W>> {
    if !g.is_rooted_at(j)? {
        return Err(Error::NotRooted { vertex: j });
    }
    let out_ids: Vec<ArcId> = g.out_arcs(j)?.iter().map(|arc| arc.id).collect();
    let mut current = g.clone();
    let mut touched = Vec::new();
    for id in out_ids {
        let target = current.arc(id)?.target;
        current = move_arc(&current, id, 0)?;
        if !touched.contains(&target) {
            touched.push(target);
        }
    }
    for target in touched {
        loop {
            let root_arcs: Vec<ArcId> = current
                .in_arcs(target)?
                .iter()
                .filter(|arc| arc.source == 0)
                .map(|arc| arc.id)
                .collect();
            if root_arcs.len() < 2 {
                break;
            }
            current = combine_arcs(&current, root_arcs[0], root_arcs[1])?.0;
        }
    }
    Ok(current)
}

/// Factor with the sequential strategy in the default vertex order 1..n.
pub fn sequential_factor<W: Weight>(g: &Digraph<W>) -> Result<Factorization<W>> {
    let order: Vec<VertexId> = (1..g.vertex_count()).collect();
    sequential_factor_traced(g, &order, &mut |_| {})
}

/// Sequential strategy with an explicit isolation order.
pub fn sequential_factor_ordered<W: Weight>(
    g: &Digraph<W>,
    order: &[VertexId],
) -> Result<Factorization<W>> {
    sequential_factor_traced(g, order, &mut |_| {})
}

/// Sequential strategy with event callbacks for every intermediate graph.
///
/// Level by level, each branch takes the subgraph rooted at one vertex of
/// the pending ring and not rooted at the ring vertices tried before it,
/// isolates that vertex, and recurses on the rest of the ring continued
/// cyclically from the chosen vertex. Branches whose root arc is missing or
/// zero contribute nothing and are skipped.
pub fn sequential_factor_traced<W: Weight>(
    g: &Digraph<W>,
    order: &[VertexId],
    sink: &mut dyn FnMut(FactorEvent<W>),
) -> Result<Factorization<W>> {
    validate_order(g, order)?;
    if !g.is_root_valid() {
        return Err(Error::RootHasInArcs);
    }
    let normalized = combine_all_parallel(g)?;
    sink(FactorEvent::Start { graph: &normalized });
    let mut terms = Vec::new();
    let mut trace = Vec::new();
    sequential_recurse(&normalized, order, &mut trace, &mut terms, sink)?;
    Ok(Factorization {
        strategy: Strategy::Sequential,
        terms,
    })
}

fn sequential_recurse<W: Weight>(
    g: &Digraph<W>,
    ring: &[VertexId],
    trace: &mut Vec<VertexId>,
    terms: &mut Vec<FactorTerm<W>>,
    sink: &mut dyn FnMut(FactorEvent<W>),
) -> Result<()> {
    if ring.is_empty() {
        sink(FactorEvent::Leaf {
            graph: g,
            isolation_order: trace,
        });
        terms.push(FactorTerm {
            factors: leaf_factors(g)?,
            isolation_order: trace.clone(),
        });
        return Ok(());
    }
    let mut current = g.clone();
    for (k, &j) in ring.iter().enumerate() {
        if let Some(rooted) = try_root(&current, j)? {
            let vertices = [j];
            sink(FactorEvent::Rooted {
                graph: &rooted,
                vertices: &vertices,
            });
            let isolated = isolate_vertex(&rooted, j)?;
            sink(FactorEvent::Isolated {
                graph: &isolated,
                vertices: &vertices,
            });
            let mut next_ring = ring[k + 1..].to_vec();
            next_ring.extend_from_slice(&ring[..k]);
            trace.push(j);
            sequential_recurse(&isolated, &next_ring, trace, terms, sink)?;
            trace.pop();
        }
        current = unroot(&current, j)?;
    }
    Ok(())
}

/// Factor with the partitioned strategy in the default vertex order 1..n.
pub fn partitioned_factor<W: Weight>(g: &Digraph<W>) -> Result<Factorization<W>> {
    let order: Vec<VertexId> = (1..g.vertex_count()).collect();
    partitioned_factor_traced(g, &order, &mut |_| {})
}

/// Partitioned strategy with an explicit vertex order.
pub fn partitioned_factor_ordered<W: Weight>(
    g: &Digraph<W>,
    order: &[VertexId],
) -> Result<Factorization<W>> {
    partitioned_factor_traced(g, order, &mut |_| {})
}

/// Partitioned strategy with event callbacks.
///
/// Each step enumerates every nonempty subset of the still-active vertices
/// as the rooted set, builds the subgraph rooted exactly there (other active
/// vertices lose their root arcs), isolates the whole set, and recurses on
/// the rest. Subsets whose root arcs are missing or zero, and branches that
/// leave some vertex without in-arcs, contribute nothing and are skipped.
pub fn partitioned_factor_traced<W: Weight>(
    g: &Digraph<W>,
    order: &[VertexId],
    sink: &mut dyn FnMut(FactorEvent<W>),
) -> Result<Factorization<W>> {
    validate_order(g, order)?;
    if !g.is_root_valid() {
        return Err(Error::RootHasInArcs);
    }
    let normalized = combine_all_parallel(g)?;
    sink(FactorEvent::Start { graph: &normalized });
    let mut terms = Vec::new();
    let mut trace = Vec::new();
    partitioned_recurse(&normalized, order, &mut trace, &mut terms, sink)?;
    Ok(Factorization {
        strategy: Strategy::Partitioned,
        terms,
    })
}

fn partitioned_recurse<W: Weight>(
    g: &Digraph<W>,
    active: &[VertexId],
    trace: &mut Vec<VertexId>,
    terms: &mut Vec<FactorTerm<W>>,
    sink: &mut dyn FnMut(FactorEvent<W>),
) -> Result<()> {
    if active.is_empty() {
        sink(FactorEvent::Leaf {
            graph: g,
            isolation_order: trace,
        });
        terms.push(FactorTerm {
            factors: leaf_factors(g)?,
            isolation_order: trace.clone(),
        });
        return Ok(());
    }
    let m = active.len();
    for mask in 1u64..(1u64 << m) {
        let rooted_set: Vec<VertexId> = (0..m)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| active[i])
            .collect();
        let rest: Vec<VertexId> = (0..m)
            .filter(|i| mask & (1 << i) == 0)
            .map(|i| active[i])
            .collect();

        let Some(mut branch) = try_root_set(g, &rooted_set, &rest)? else {
            continue;
        };
        sink(FactorEvent::Rooted {
            graph: &branch,
            vertices: &rooted_set,
        });
        for &r in &rooted_set {
            branch = isolate_vertex(&branch, r)?;
        }
        sink(FactorEvent::Isolated {
            graph: &branch,
            vertices: &rooted_set,
        });
        // a vertex with no in-arcs left can never be spanned: dead branch
        if rest
            .iter()
            .any(|&k| branch.in_arcs(k).expect("vertex in range").is_empty())
        {
            continue;
        }
        let depth = trace.len();
        trace.extend_from_slice(&rooted_set);
        partitioned_recurse(&branch, &rest, trace, terms, sink)?;
        trace.truncate(depth);
    }
    Ok(())
}

/// The branch rooted at `j`, or None when the root arc is missing or has
/// zero weight (either way the branch's arborescence sum is zero).
fn try_root<W: Weight>(g: &Digraph<W>, j: VertexId) -> Result<Option<Digraph<W>>> {
    let in_arcs: Vec<(ArcId, VertexId, bool)> = g
        .in_arcs(j)?
        .iter()
        .map(|arc| (arc.id, arc.source, arc.weight.is_zero()))
        .collect();
    let has_live_root = in_arcs
        .iter()
        .any(|&(_, source, zero)| source == 0 && !zero);
    if !has_live_root {
        return Ok(None);
    }
    let mut rooted = g.clone();
    for (id, source, _) in in_arcs {
        if source != 0 {
            rooted = rooted.remove_arc(id)?;
        }
    }
    Ok(Some(rooted))
}

/// Root the graph at exactly `rooted_set`: each member keeps only its root
/// arc, each other active vertex loses its root arc. None when any member's
/// root arc is missing or zero.
fn try_root_set<W: Weight>(
    g: &Digraph<W>,
    rooted_set: &[VertexId],
    rest: &[VertexId],
) -> Result<Option<Digraph<W>>> {
    let mut branch = g.clone();
    for &r in rooted_set {
        match try_root(&branch, r)? {
            Some(rooted) => branch = rooted,
            None => return Ok(None),
        }
    }
    for &k in rest {
        branch = unroot(&branch, k)?;
    }
    Ok(Some(branch))
}

/// Drop the root arc of `v` if present.
fn unroot<W: Weight>(g: &Digraph<W>, v: VertexId) -> Result<Digraph<W>> {
    let root_ids: Vec<ArcId> = g
        .in_arcs(v)?
        .iter()
        .filter(|arc| arc.source == 0)
        .map(|arc| arc.id)
        .collect();
    let mut next = g.clone();
    for id in root_ids {
        next = next.remove_arc(id)?;
    }
    Ok(next)
}

/// Root-arc weight of every vertex of a fully isolated leaf, vertex order.
fn leaf_factors<W: Weight>(g: &Digraph<W>) -> Result<Vec<W>> {
    let mut factors = Vec::with_capacity(g.non_root_count());
    for v in 1..g.vertex_count() {
        let root_arcs: Vec<&W> = g
            .in_arcs(v)?
            .iter()
            .filter(|arc| arc.source == 0)
            .map(|arc| &arc.weight)
            .collect();
        let mut iter = root_arcs.into_iter();
        let first = iter.next().ok_or(Error::NoRootArc(v))?;
        let mut weight = first.clone();
        for next in iter {
            weight = weight.add(next);
        }
        factors.push(weight);
    }
    Ok(factors)
}

fn validate_order<W: Weight>(g: &Digraph<W>, order: &[VertexId]) -> Result<()> {
    let n = g.non_root_count();
    let mut sorted: Vec<VertexId> = order.to_vec();
    sorted.sort_unstable();
    let expected: Vec<VertexId> = (1..=n).collect();
    if sorted != expected {
        return Err(Error::InvalidOrder(format!(
            "expected a permutation of 1..={n}, got {order:?}"
        )));
    }
    Ok(())
}

/// Number of weak orderings of n elements: 1, 1, 3, 13, 75, 541, ...
/// This is the leaf count of the partitioned strategy.
pub fn ordered_bell(n: usize) -> Result<u128> {
    check_combinatorial_range(n)?;
    let mut binom = vec![vec![0u128; n + 1]; n + 1];
    for m in 0..=n {
        binom[m][0] = 1;
        for k in 1..=m {
            binom[m][k] = binom[m - 1][k - 1] + if k < m { binom[m - 1][k] } else { 0 };
        }
    }
    let mut bell = vec![0u128; n + 1];
    bell[0] = 1;
    for m in 1..=n {
        for k in 1..=m {
            bell[m] += binom[m][k] * bell[m - k];
        }
    }
    Ok(bell[n])
}

/// Number of nonempty rooted vertex subsets at one partitioned step:
/// 2^n - 1, which is also the Stirling partition count S(n+1, 2).
pub fn rooted_subset_count(n: usize) -> Result<u128> {
    check_combinatorial_range(n)?;
    Ok((1u128 << n) - 1)
}

const MAX_COMBINATORIAL_N: usize = 20;

fn check_combinatorial_range(n: usize) -> Result<()> {
    if n > MAX_COMBINATORIAL_N {
        return Err(Error::TooLarge {
            size: n as u128,
            limit: MAX_COMBINATORIAL_N as u128,
        });
    }
    Ok(())
}

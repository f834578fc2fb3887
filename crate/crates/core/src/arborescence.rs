use crate::error::{Error, Result};
use crate::graph::{ArcId, Digraph, VertexId};
use crate::weight::Weight;

/// Reject enumerations whose in-degree product exceeds this bound.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

/// A spanning directed tree: one in-arc per non-root vertex, none at the
/// root, no directed cycle. `arc_ids` is ordered by target vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arborescence {
    pub root: VertexId,
    pub arc_ids: Vec<ArcId>,
}

impl Arborescence {
    pub fn contains(&self, arc: ArcId) -> bool {
        self.arc_ids.contains(&arc)
    }
}

/// Enumerate every arborescence of `g` rooted at `root`, in deterministic
/// order, by walking the Cartesian product of in-arc choices and keeping the
/// acyclic selections. This is the brute-force ground truth the rest of the
/// crate is checked against.
pub fn enumerate_arborescences<W: Weight>(
    g: &Digraph<W>,
    root: VertexId,
) -> Result<Vec<Arborescence>> {
    g.check_vertex(root)?;
    let vertex_count = g.vertex_count();
    let others: Vec<VertexId> = (0..vertex_count).filter(|&v| v != root).collect();
    if others.is_empty() {
        return Ok(vec![Arborescence {
            root,
            arc_ids: Vec::new(),
        }]);
    }

    let choices: Vec<Vec<_>> = others
        .iter()
        .map(|&v| g.in_arcs(v).expect("vertex checked"))
        .collect();
    if choices.iter().any(|arcs| arcs.is_empty()) {
        return Ok(Vec::new());
    }
    let mut size: u128 = 1;
    for arcs in &choices {
        size = size.saturating_mul(arcs.len() as u128);
    }
    if size > ENUMERATION_LIMIT {
        return Err(Error::TooLarge {
            size,
            limit: ENUMERATION_LIMIT,
        });
    }

    let mut found = Vec::new();
    let mut indices = vec![0usize; others.len()];
    let mut parent = vec![usize::MAX; vertex_count];
    loop {
        for (k, &v) in others.iter().enumerate() {
            parent[v] = choices[k][indices[k]].source;
        }
        if others
            .iter()
            .all(|&v| reaches_root(&parent, root, v, vertex_count))
        {
            found.push(Arborescence {
                root,
                arc_ids: indices
                    .iter()
                    .enumerate()
                    .map(|(k, &i)| choices[k][i].id)
                    .collect(),
            });
        }

        // odometer over the in-arc choices, last position fastest
        let mut k = others.len();
        loop {
            if k == 0 {
                return Ok(found);
            }
            k -= 1;
            indices[k] += 1;
            if indices[k] < choices[k].len() {
                break;
            }
            indices[k] = 0;
        }
    }
}

/// A one-in-arc-per-vertex selection is an arborescence exactly when every
/// parent chain ends at the root instead of entering a cycle.
fn reaches_root(parent: &[usize], root: VertexId, start: VertexId, vertex_count: usize) -> bool {
    let mut v = start;
    for _ in 0..vertex_count {
        if v == root {
            return true;
        }
        v = parent[v];
    }
    v == root
}

/// Product of the arc weights; the empty product is one.
pub fn arborescence_weight<W: Weight>(a: &Arborescence, g: &Digraph<W>) -> Result<W> {
    let mut product = W::one();
    for &id in &a.arc_ids {
        product = product.mul(&g.arc(id)?.weight);
    }
    Ok(product)
}

/// Sum of all arborescence weights for the given root; zero when no
/// arborescence exists. Symbolic sums come back in canonical polynomial form
/// so equality checks are structural.
pub fn arborescence_sum<W: Weight>(g: &Digraph<W>, root: VertexId) -> Result<W> {
    let mut total = W::zero();
    for a in enumerate_arborescences(g, root)? {
        total = total.add(&arborescence_weight(&a, g)?);
    }
    total.normalize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Expr};

    #[test]
    fn single_vertex_has_the_empty_arborescence() {
        let g: Digraph<f64> = Digraph::new(1).unwrap();
        let all = enumerate_arborescences(&g, 0).unwrap();
        assert_eq!(all.len(), 1);
        assert!(all[0].arc_ids.is_empty());
        assert_eq!(arborescence_weight(&all[0], &g).unwrap(), 1.0);
        assert_eq!(arborescence_sum(&g, 0).unwrap(), 1.0);
    }

    #[test]
    fn two_vertex_graph_has_one_arborescence() {
        let (g, id) = Digraph::<f64>::new(2).unwrap().add_arc(0, 1, 7.0).unwrap();
        let all = enumerate_arborescences(&g, 0).unwrap();
        assert_eq!(all.len(), 1);
        assert!(all[0].contains(id));
        assert_eq!(arborescence_sum(&g, 0).unwrap(), 7.0);
    }

    #[test]
    fn missing_in_arc_means_no_arborescence() {
        let g: Digraph<f64> = Digraph::new(3).unwrap();
        let (g, _) = g.add_arc(0, 1, 1.0).unwrap();
        // vertex 2 has no in-arcs
        assert!(enumerate_arborescences(&g, 0).unwrap().is_empty());
        assert_eq!(arborescence_sum(&g, 0).unwrap(), 0.0);
    }

    #[test]
    fn cycle_selections_are_filtered() {
        let g: Digraph<f64> = Digraph::new(3).unwrap();
        let (g, _) = g.add_arc(1, 2, 1.0).unwrap();
        let (g, _) = g.add_arc(2, 1, 1.0).unwrap();
        // both vertices have an in-arc, but the only selection is a 2-cycle
        assert!(enumerate_arborescences(&g, 0).unwrap().is_empty());
    }

    /// Acyclic graph on {0..3} shaped like an upper-triangular matrix:
    /// weights chosen so the sum is 1·(2+3)·(4+5+6) = 75.
    fn upper_triangular_graph() -> Digraph<f64> {
        let g = Digraph::new(4).unwrap();
        let (g, _) = g.add_arc(1, 2, 2.0).unwrap();
        let (g, _) = g.add_arc(1, 3, 4.0).unwrap();
        let (g, _) = g.add_arc(2, 3, 5.0).unwrap();
        let (g, _) = g.add_arc(0, 1, 1.0).unwrap();
        let (g, _) = g.add_arc(0, 2, 3.0).unwrap();
        let (g, _) = g.add_arc(0, 3, 6.0).unwrap();
        g
    }

    #[test]
    fn acyclic_count_is_the_indegree_product() {
        let g = upper_triangular_graph();
        let all = enumerate_arborescences(&g, 0).unwrap();
        assert_eq!(all.len(), 6);
        assert_eq!(arborescence_sum(&g, 0).unwrap(), 75.0);
    }

    #[test]
    fn complete_three_vertex_graph_has_sixteen() {
        let mut g: Digraph<f64> = Digraph::new(4).unwrap();
        for i in 1..4 {
            for j in 1..4 {
                if i != j {
                    g = g.add_arc(i, j, 1.0).unwrap().0;
                }
            }
        }
        for j in 1..4 {
            g = g.add_arc(0, j, 1.0).unwrap().0;
        }
        let all = enumerate_arborescences(&g, 0).unwrap();
        assert_eq!(all.len(), 16);
        assert_eq!(arborescence_sum(&g, 0).unwrap(), 16.0);
    }

    #[test]
    fn symbolic_sum_matches_the_expanded_determinant() {
        let g: Digraph<Expr> = Digraph::new(3).unwrap();
        let (g, _) = g.add_arc(1, 2, Expr::var("u12")).unwrap();
        let (g, _) = g.add_arc(2, 1, Expr::var("u21")).unwrap();
        let (g, _) = g.add_arc(0, 1, Expr::var("u11")).unwrap();
        let (g, _) = g.add_arc(0, 2, Expr::var("u22")).unwrap();
        let sum = arborescence_sum(&g, 0).unwrap();
        let expected = parse("u11·u12 + u11·u22 + u21·u22")
            .unwrap()
            .canonical_polynomial()
            .unwrap();
        assert_eq!(sum, expected);
    }

    #[test]
    fn sum_ignores_arc_insertion_order() {
        let g = upper_triangular_graph();
        let mut permuted: Digraph<f64> = Digraph::new(4).unwrap();
        let mut arcs: Vec<_> = g.arcs().to_vec();
        arcs.reverse();
        for arc in arcs {
            permuted = permuted
                .add_arc(arc.source, arc.target, arc.weight)
                .unwrap()
                .0;
        }
        assert_eq!(
            arborescence_sum(&g, 0).unwrap(),
            arborescence_sum(&permuted, 0).unwrap()
        );
    }

    #[test]
    fn guard_rail_rejects_huge_enumerations() {
        // 7 non-root vertices with 11 parallel in-arcs each: 11^7 > 10^7
        let mut g: Digraph<f64> = Digraph::new(8).unwrap();
        for v in 1..8 {
            for _ in 0..11 {
                g = g.add_arc(0, v, 1.0).unwrap().0;
            }
        }
        match enumerate_arborescences(&g, 0) {
            Err(Error::TooLarge { size, limit }) => {
                assert_eq!(size, 11u128.pow(7));
                assert_eq!(limit, ENUMERATION_LIMIT);
            }
            other => panic!("expected TooLarge, got {other:?}"),
        }
    }

    #[test]
    fn every_enumerated_tree_is_valid() {
        let g = upper_triangular_graph();
        for a in enumerate_arborescences(&g, 0).unwrap() {
            // one in-arc per non-root vertex, none at the root
            let mut seen_targets = [false; 4];
            for &id in &a.arc_ids {
                let arc = g.arc(id).unwrap();
                assert!(!seen_targets[arc.target]);
                seen_targets[arc.target] = true;
                assert_ne!(arc.target, 0);
            }
            assert!(seen_targets[1..].iter().all(|&t| t));
        }
    }
}

use crate::error::{Error, Result};
use crate::graph::{ArcId, Digraph, VertexId};
use crate::weight::Weight;

/// Move the source of an arc to `new_source`, keeping its target, weight,
/// and id. Legal only when the arc's current source and its target are not
/// strongly connected, and the new source and the target are not strongly
/// connected in the moved graph (the check runs on the candidate result).
/// A legal move preserves the arborescence sum for the root of the graph.
pub fn move_arc<W: Weight>(
    g: &Digraph<W>,
    arc_id: ArcId,
    new_source: VertexId,
) -> Result<Digraph<W>> {
    let arc = g.arc(arc_id)?;
    let (a, b) = (arc.source, arc.target);
    let c = new_source;
    g.check_vertex(c)?;
    if c == b {
        return Err(Error::SelfLoop(c));
    }
    if g.strongly_connected(a, b)? {
        return Err(Error::PreconditionSourceTarget(a, b));
    }
    if a == c {
        return Ok(g.clone());
    }
    let candidate = g.with_arc_source(arc_id, c)?;
    if candidate.strongly_connected(c, b)? {
        return Err(Error::PreconditionNewSourceTarget(c, b));
    }
    Ok(candidate)
}

/// Replace two parallel arcs by a single fresh arc whose weight is the sum
/// of theirs. The merged arc takes the earlier arc's position in the arc
/// list. Preserves the arborescence sum for every choice of root.
pub fn combine_arcs<W: Weight>(
    g: &Digraph<W>,
    arc1: ArcId,
    arc2: ArcId,
) -> Result<(Digraph<W>, ArcId)> {
    if arc1 == arc2 {
        return Err(Error::NotParallel(arc1, arc2));
    }
    let first = g.arc(arc1)?;
    let second = g.arc(arc2)?;
    if first.source != second.source || first.target != second.target {
        return Err(Error::NotParallel(arc1, arc2));
    }
    let (source, target) = (first.source, first.target);
    let weight = first.weight.add(&second.weight);

    let position = g
        .arcs()
        .iter()
        .position(|arc| arc.id == arc1 || arc.id == arc2)
        .expect("both arcs exist");
    let trimmed = g.remove_arc(arc1)?.remove_arc(arc2)?;
    trimmed.insert_arc_at(position, source, target, weight)
}

/// Merge every parallel class down to a single arc. Classes are processed in
/// insertion order of their first member and weights are folded left to
/// right in insertion order, so the result is deterministic. Idempotent.
pub fn combine_all_parallel<W: Weight>(g: &Digraph<W>) -> Result<Digraph<W>> {
    let mut current = g.clone();
    loop {
        let mut pair: Option<(ArcId, ArcId)> = None;
        'scan: for (i, first) in current.arcs().iter().enumerate() {
            for second in &current.arcs()[i + 1..] {
                if first.source == second.source && first.target == second.target {
                    pair = Some((first.id, second.id));
                    break 'scan;
                }
            }
        }
        match pair {
            Some((a, b)) => {
                current = combine_arcs(&current, a, b)?.0;
            }
            None => return Ok(current),
        }
    }
}

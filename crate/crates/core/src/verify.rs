//! Randomized self-checks. Each suite draws graphs or matrices from a seeded
//! generator, applies one operation, and compares against the brute-force
//! arborescence enumeration or the numeric reference determinant.

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arborescence::{arborescence_sum, enumerate_arborescences};
use crate::graph::{ArcId, Digraph, VertexId};
use crate::isolation::root_split;
use crate::matrix::{det_reference, det_via_arborescences, Matrix};
use crate::transforms::{combine_all_parallel, combine_arcs, move_arc};

/// Outcome of one randomized suite.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    pub passed: usize,
    pub failures: Vec<String>,
}

/// Cap on stored failure messages per suite; failures beyond it still count.
const MAX_REPORTED_FAILURES: usize = 8;

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        SuiteReport {
            name,
            cases: 0,
            passed: 0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, case: usize, outcome: Result<(), String>) {
        self.cases += 1;
        match outcome {
            Ok(()) => self.passed += 1,
            Err(message) => {
                if self.failures.len() < MAX_REPORTED_FAILURES {
                    self.failures.push(format!("case {case}: {message}"));
                }
            }
        }
    }

    pub fn all_passed(&self) -> bool {
        self.passed == self.cases
    }
}

/// Aggregated outcome of a verification run.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub seed: u64,
    pub suites: Vec<SuiteReport>,
}

impl VerifyReport {
    pub fn total_cases(&self) -> usize {
        self.suites.iter().map(|s| s.cases).sum()
    }

    pub fn total_passed(&self) -> usize {
        self.suites.iter().map(|s| s.passed).sum()
    }

    pub fn all_passed(&self) -> bool {
        self.total_passed() == self.total_cases()
    }
}

/// Run every suite, splitting `cases` across them (earlier suites take the
/// remainder) so the report totals exactly `cases`.
pub fn run_all(seed: u64, cases: usize) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let quota = split_cases(cases, 4);
    let suites = vec![
        moving_arc_suite(&mut rng, quota[0]),
        combining_arcs_suite(&mut rng, quota[1]),
        root_split_suite(&mut rng, quota[2]),
        matrix_tree_suite(&mut rng, quota[3]),
    ];
    VerifyReport { seed, suites }
}

fn split_cases(total: usize, buckets: usize) -> Vec<usize> {
    let base = total / buckets;
    let extra = total % buckets;
    (0..buckets)
        .map(|i| base + usize::from(i < extra))
        .collect()
}

/// Random legal arc moves must preserve the arborescence sum and count, and
/// must leave the arborescences that avoid the moved arc untouched.
pub fn moving_arc_suite(rng: &mut ChaCha8Rng, cases: usize) -> SuiteReport {
    let mut report = SuiteReport::new("moving-arc");
    for case in 0..cases {
        report.record(case, moving_arc_case(rng));
    }
    report
}

fn moving_arc_case(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for _ in 0..50 {
        let g = random_root_valid_graph(rng, 2, 5);
        let mut candidates: Vec<(ArcId, VertexId)> = Vec::new();
        for arc in g.arcs() {
            for c in 0..g.vertex_count() {
                if c != arc.target && c != arc.source {
                    candidates.push((arc.id, c));
                }
            }
        }
        candidates.shuffle(rng);
        for (id, c) in candidates {
            if let Ok(moved) = move_arc(&g, id, c) {
                return check_move_invariants(&g, &moved, id);
            }
        }
    }
    Err("no legal move found across 50 random graphs".into())
}

fn check_move_invariants(
    g: &Digraph<BigRational>,
    moved: &Digraph<BigRational>,
    id: ArcId,
) -> Result<(), String> {
    let before = enumerate_arborescences(g, 0).map_err(|e| e.to_string())?;
    let after = enumerate_arborescences(moved, 0).map_err(|e| e.to_string())?;
    if before.len() != after.len() {
        return Err(format!(
            "arborescence count changed: {} before, {} after",
            before.len(),
            after.len()
        ));
    }
    let untouched_before: Vec<_> = before.iter().filter(|a| !a.contains(id)).collect();
    let untouched_after: Vec<_> = after.iter().filter(|a| !a.contains(id)).collect();
    if untouched_before != untouched_after {
        return Err("arborescences avoiding the moved arc changed".into());
    }
    let sum_before = arborescence_sum(g, 0).map_err(|e| e.to_string())?;
    let sum_after = arborescence_sum(moved, 0).map_err(|e| e.to_string())?;
    if sum_before != sum_after {
        return Err(format!(
            "sum changed: {sum_before} before, {sum_after} after"
        ));
    }
    Ok(())
}

/// Combining a parallel pair must preserve the arborescence sum for every
/// root, and collapsing all parallels must be idempotent.
pub fn combining_arcs_suite(rng: &mut ChaCha8Rng, cases: usize) -> SuiteReport {
    let mut report = SuiteReport::new("combining-arcs");
    for case in 0..cases {
        report.record(case, combining_arcs_case(rng));
    }
    report
}

fn combining_arcs_case(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let base = random_digraph(rng, 1, 4);
    // force a parallel pair so there is always something to combine
    let (source, target) = match base.arcs().choose(rng) {
        Some(arc) => (arc.source, arc.target),
        None => pick_distinct_pair(rng, base.vertex_count()),
    };
    let (g, first) = base
        .add_arc(source, target, random_rational(rng))
        .map_err(|e| e.to_string())?;
    let (g, second) = g
        .add_arc(source, target, random_rational(rng))
        .map_err(|e| e.to_string())?;

    let sums_before = all_root_sums(&g)?;
    let expected = g.arc(first).unwrap().weight.clone() + g.arc(second).unwrap().weight.clone();
    let (combined, merged) = combine_arcs(&g, first, second).map_err(|e| e.to_string())?;
    if combined.arcs().len() + 1 != g.arcs().len() {
        return Err("combining did not shrink the arc list by one".into());
    }
    let merged_arc = combined.arc(merged).map_err(|e| e.to_string())?;
    if merged_arc.weight != expected {
        return Err(format!(
            "merged weight is {}, expected {}",
            merged_arc.weight, expected
        ));
    }
    let sums_after = all_root_sums(&combined)?;
    if sums_before != sums_after {
        return Err("arborescence sums changed for some root".into());
    }

    let collapsed = combine_all_parallel(&combined).map_err(|e| e.to_string())?;
    let collapsed_again = combine_all_parallel(&collapsed).map_err(|e| e.to_string())?;
    if collapsed != collapsed_again {
        return Err("collapsing all parallels is not idempotent".into());
    }
    if all_root_sums(&collapsed)? != sums_before {
        return Err("collapsing all parallels changed a root sum".into());
    }
    Ok(())
}

fn all_root_sums(g: &Digraph<BigRational>) -> Result<Vec<BigRational>, String> {
    (0..g.vertex_count())
        .map(|r| arborescence_sum(g, r).map_err(|e| e.to_string()))
        .collect()
}

/// Splitting at a vertex must partition the arborescence sum exactly.
pub fn root_split_suite(rng: &mut ChaCha8Rng, cases: usize) -> SuiteReport {
    let mut report = SuiteReport::new("root-split");
    for case in 0..cases {
        report.record(case, root_split_case(rng));
    }
    report
}

fn root_split_case(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let mut g = random_root_valid_graph(rng, 1, 5);
    let v = rng.gen_range(1..g.vertex_count());
    if !g.in_arcs(v).unwrap().iter().any(|arc| arc.source == 0) {
        g = g.add_arc(0, v, random_rational(rng)).unwrap().0;
    }
    let (rooted, unrooted) = root_split(&g, v).map_err(|e| e.to_string())?;
    if !rooted.is_rooted_at(v).map_err(|e| e.to_string())? {
        return Err(format!("rooted branch is not rooted at {v}"));
    }
    if unrooted
        .in_arcs(v)
        .unwrap()
        .iter()
        .any(|arc| arc.source == 0)
    {
        return Err(format!("unrooted branch kept a root arc at {v}"));
    }
    let whole = arborescence_sum(&g, 0).map_err(|e| e.to_string())?;
    let rooted_sum = arborescence_sum(&rooted, 0).map_err(|e| e.to_string())?;
    let unrooted_sum = arborescence_sum(&unrooted, 0).map_err(|e| e.to_string())?;
    if whole != rooted_sum.clone() + unrooted_sum.clone() {
        return Err(format!(
            "split sums {rooted_sum} + {unrooted_sum} do not add up to {whole}"
        ));
    }
    Ok(())
}

/// The arborescence determinant must match Gaussian elimination, both for
/// matrices assembled from nonnegative entries and for arbitrary ones.
pub fn matrix_tree_suite(rng: &mut ChaCha8Rng, cases: usize) -> SuiteReport {
    let mut report = SuiteReport::new("matrix-tree");
    for case in 0..cases {
        // alternate between the two generation styles
        report.record(case, matrix_tree_case(rng, case % 2 == 0));
    }
    report
}

fn matrix_tree_case(rng: &mut ChaCha8Rng, assembled: bool) -> Result<(), String> {
    let n = rng.gen_range(1..=5usize);
    let a = if assembled {
        assembled_matrix(rng, n)
    } else {
        arbitrary_matrix(rng, n)
    };
    let tree = det_via_arborescences(&a).map_err(|e| e.to_string())?;
    let reference = det_reference(&a).map_err(|e| e.to_string())?;
    let tolerance = 1e-9 * reference.abs().max(1.0);
    if (tree - reference).abs() > tolerance {
        return Err(format!(
            "determinants disagree: {tree} from arborescences, {reference} from elimination"
        ));
    }
    Ok(())
}

/// Matrix whose off-diagonal is the negated entry grid and whose diagonal is
/// the column sum of the grid, as a determinant-to-digraph bridge produces.
fn assembled_matrix(rng: &mut ChaCha8Rng, n: usize) -> Matrix<f64> {
    let u: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.gen_range(0.0..1.0)).collect())
        .collect();
    let entries = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        (0..n).map(|k| u[k][j]).sum()
                    } else {
                        -u[i][j]
                    }
                })
                .collect()
        })
        .collect();
    Matrix::new(entries).unwrap()
}

fn arbitrary_matrix(rng: &mut ChaCha8Rng, n: usize) -> Matrix<f64> {
    let entries = (0..n)
        .map(|_| (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect())
        .collect();
    Matrix::new(entries).unwrap()
}

fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    let numer: i64 = rng.gen_range(-6..=6);
    let denom: i64 = rng.gen_range(1..=4);
    BigRational::new(numer.into(), denom.into())
}

/// Random graph with no in-arcs at the root, at least one root arc, and at
/// most one arc per ordered vertex pair.
fn random_root_valid_graph(
    rng: &mut ChaCha8Rng,
    min_n: usize,
    max_n: usize,
) -> Digraph<BigRational> {
    let n = rng.gen_range(min_n..=max_n);
    let mut g = Digraph::new(n + 1).unwrap();
    for source in 0..=n {
        for target in 1..=n {
            if source != target && rng.gen_bool(0.5) {
                g = g.add_arc(source, target, random_rational(rng)).unwrap().0;
            }
        }
    }
    if !g.arcs().iter().any(|arc| arc.source == 0) {
        let target = rng.gen_range(1..=n);
        g = g.add_arc(0, target, random_rational(rng)).unwrap().0;
    }
    g
}

/// Random digraph over all ordered vertex pairs, root included as a possible
/// target, at most one arc per pair.
fn random_digraph(rng: &mut ChaCha8Rng, min_n: usize, max_n: usize) -> Digraph<BigRational> {
    let n = rng.gen_range(min_n..=max_n);
    let mut g = Digraph::new(n + 1).unwrap();
    for source in 0..=n {
        for target in 0..=n {
            if source != target && rng.gen_bool(0.5) {
                g = g.add_arc(source, target, random_rational(rng)).unwrap().0;
            }
        }
    }
    g
}

fn pick_distinct_pair(rng: &mut ChaCha8Rng, vertex_count: usize) -> (VertexId, VertexId) {
    let source = rng.gen_range(0..vertex_count);
    let mut target = rng.gen_range(0..vertex_count);
    while target == source {
        target = rng.gen_range(0..vertex_count);
    }
    (source, target)
}

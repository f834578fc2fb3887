use crate::arborescence::arborescence_sum;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::graph::Digraph;
use crate::weight::Weight;

/// A dense square matrix of weights. Rows and columns are 0-indexed here;
/// row i corresponds to graph vertex i + 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<W> {
    n: usize,
    entries: Vec<Vec<W>>,
}

impl<W: Weight> Matrix<W> {
    pub fn new(entries: Vec<Vec<W>>) -> Result<Self> {
        let n = entries.len();
        if n == 0 {
            return Err(Error::InvalidInput(
                "matrix must have at least one row".into(),
            ));
        }
        if let Some(row) = entries.iter().find(|row| row.len() != n) {
            return Err(Error::NotSquare {
                rows: n,
                cols: row.len(),
            });
        }
        Ok(Matrix { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, row: usize, col: usize) -> &W {
        &self.entries[row][col]
    }

    pub fn rows(&self) -> &[Vec<W>] {
        &self.entries
    }
}

impl Matrix<Expr> {
    /// The fully symbolic n×n matrix whose digraph is complete: entry (i,j)
    /// is -u_{i+1,j+1} off the diagonal and the column sum of u's on it.
    pub fn symbolic(n: usize) -> Result<Self> {
        let mut entries = Vec::with_capacity(n);
        for i in 1..=n {
            let mut row = Vec::with_capacity(n);
            for j in 1..=n {
                if i == j {
                    let column = (1..=n).map(|k| u_var(k, j)).collect();
                    row.push(Expr::sum(column));
                } else {
                    row.push(Weight::neg(&u_var(i, j)));
                }
            }
            entries.push(row);
        }
        Matrix::new(entries)
    }
}

/// The variable u_{ij}, named `u12` for single-digit indices and `u1_2`
/// style past 9 so names stay unambiguous.
pub fn u_var(i: usize, j: usize) -> Expr {
    Expr::var(u_name(i, j))
}

pub fn u_name(i: usize, j: usize) -> String {
    if i <= 9 && j <= 9 {
        format!("u{i}{j}")
    } else {
        format!("u{i}_{j}")
    }
}

/// The u-table behind a matrix: off-diagonal entries are the arc weights
/// u_ij (the negated matrix entries) and diagonal entries are the root-arc
/// weights u_jj, recovered as the j-th column sum of the matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct UDecomposition<W> {
    n: usize,
    u: Vec<Vec<W>>,
}

impl<W: Weight> UDecomposition<W> {
    pub fn from_matrix(a: &Matrix<W>) -> Result<Self> {
        let n = a.n();
        let mut u = Vec::with_capacity(n);
        for i in 1..=n {
            let mut row = Vec::with_capacity(n);
            for j in 1..=n {
                if i == j {
                    let mut column_sum = W::zero();
                    for k in 1..=n {
                        column_sum = column_sum.add(a.entry(k - 1, j - 1));
                    }
                    row.push(column_sum.normalize()?);
                } else {
                    row.push(a.entry(i - 1, j - 1).neg().normalize()?);
                }
            }
            u.push(row);
        }
        Ok(UDecomposition { n, u })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// u_ij with 1-indexed vertex labels.
    pub fn u(&self, i: usize, j: usize) -> &W {
        &self.u[i - 1][j - 1]
    }

    /// Build the matrix digraph: an arc (i,j) per nonzero off-diagonal u_ij,
    /// then a root arc (0,j) per diagonal u_jj. Numeric zero root arcs are
    /// omitted; symbolic weights always keep their root arcs.
    pub fn to_digraph(&self) -> Digraph<W> {
        let n = self.n;
        let mut g = Digraph::new(n + 1).expect("n + 1 >= 1");
        for i in 1..=n {
            for j in 1..=n {
                if i != j && !self.u(i, j).is_zero() {
                    g = g
                        .add_arc(i, j, self.u(i, j).clone())
                        .expect("valid endpoints")
                        .0;
                }
            }
        }
        for j in 1..=n {
            let weight = self.u(j, j);
            if W::SYMBOLIC || !weight.is_zero() {
                g = g.add_arc(0, j, weight.clone()).expect("valid endpoints").0;
            }
        }
        g
    }

    /// Assemble the matrix: a_ij = -u_ij off the diagonal, a_jj = sum of
    /// column j of the u-table.
    pub fn to_matrix(&self) -> Result<Matrix<W>> {
        let n = self.n;
        let mut entries = Vec::with_capacity(n);
        for i in 1..=n {
            let mut row = Vec::with_capacity(n);
            for j in 1..=n {
                if i == j {
                    let mut column_sum = W::zero();
                    for k in 1..=n {
                        column_sum = column_sum.add(self.u(k, j));
                    }
                    row.push(column_sum.normalize()?);
                } else {
                    row.push(self.u(i, j).neg().normalize()?);
                }
            }
            entries.push(row);
        }
        Matrix::new(entries)
    }
}

/// Turn a square matrix into its matrix digraph on vertices {0..n}.
pub fn matrix_to_digraph<W: Weight>(a: &Matrix<W>) -> Result<Digraph<W>> {
    Ok(UDecomposition::from_matrix(a)?.to_digraph())
}

/// Read a matrix back off a root-valid digraph, summing parallel arcs.
pub fn digraph_to_matrix<W: Weight>(g: &Digraph<W>) -> Result<Matrix<W>> {
    if !g.is_root_valid() {
        return Err(Error::RootHasInArcs);
    }
    let n = g.non_root_count();
    if n == 0 {
        return Err(Error::InvalidInput("graph has no non-root vertices".into()));
    }
    let mut u = vec![vec![W::zero(); n]; n];
    for arc in g.arcs() {
        if arc.source != 0 {
            u[arc.source - 1][arc.target - 1] = u[arc.source - 1][arc.target - 1].add(&arc.weight);
        }
    }
    let mut entries = Vec::with_capacity(n);
    for i in 1..=n {
        let mut row = Vec::with_capacity(n);
        for j in 1..=n {
            if i == j {
                // a_jj = u_jj + sum of the off-diagonal u_kj, folded in
                // in-arc insertion order to stay deterministic
                let mut sum = W::zero();
                for arc in g.in_arcs(j).expect("vertex in range") {
                    sum = sum.add(&arc.weight);
                }
                row.push(sum.normalize()?);
            } else {
                row.push(u[i - 1][j - 1].neg().normalize()?);
            }
        }
        entries.push(row);
    }
    Matrix::new(entries)
}

/// Determinant by the arborescence sum of the matrix digraph.
pub fn det_via_arborescences<W: Weight>(a: &Matrix<W>) -> Result<W> {
    arborescence_sum(&matrix_to_digraph(a)?, 0)
}

/// Pivot magnitudes below this are treated as exactly singular.
pub const PIVOT_EPSILON: f64 = 1e-12;

/// Reference determinant: Gaussian elimination with partial pivoting over
/// doubles. Errors on symbolic entries.
pub fn det_reference<W: Weight>(a: &Matrix<W>) -> Result<f64> {
    let n = a.n();
    let mut m = a
        .rows()
        .iter()
        .map(|row| {
            row.iter()
                .map(|w| {
                    w.to_f64()
                        .ok_or_else(|| Error::NonNumericWeight(w.to_string()))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut det = 1.0f64;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| {
                m[r1][col]
                    .abs()
                    .partial_cmp(&m[r2][col].abs())
                    .expect("finite entries")
            })
            .expect("non-empty range");
        if m[pivot_row][col].abs() < PIVOT_EPSILON {
            return Ok(0.0);
        }
        if pivot_row != col {
            m.swap(pivot_row, col);
            det = -det;
        }
        det *= m[col][col];
        let (upper, lower) = m.split_at_mut(col + 1);
        let pivot = &upper[col];
        for row in lower {
            let factor = row[col] / pivot[col];
            for (entry, p) in row[col..].iter_mut().zip(&pivot[col..]) {
                *entry -= factor * p;
            }
        }
    }
    Ok(det)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use approx::assert_relative_eq;
    use num_rational::BigRational;

    fn rational(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// The numeric upper-triangular matrix with u-values 1..6:
    /// u11=1, u12=2, u22=3, u13=4, u23=5, u33=6.
    fn upper_numeric() -> Matrix<f64> {
        Matrix::new(vec![
            vec![1.0, -2.0, -4.0],
            vec![0.0, 5.0, -5.0],
            vec![0.0, 0.0, 15.0],
        ])
        .unwrap()
    }

    #[test]
    fn one_by_one_matrix_gives_a_single_arc() {
        let a = Matrix::new(vec![vec![3.5f64]]).unwrap();
        let g = matrix_to_digraph(&a).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.arcs().len(), 1);
        let arc = &g.arcs()[0];
        assert_eq!((arc.source, arc.target, arc.weight), (0, 1, 3.5));
    }

    #[test]
    fn upper_triangular_digraph_has_the_expected_arcs() {
        let g = matrix_to_digraph(&upper_numeric()).unwrap();
        let triples: Vec<_> = g
            .arcs()
            .iter()
            .map(|a| (a.source, a.target, a.weight))
            .collect();
        assert_eq!(
            triples,
            vec![
                (1, 2, 2.0),
                (1, 3, 4.0),
                (2, 3, 5.0),
                (0, 1, 1.0),
                (0, 2, 3.0),
                (0, 3, 6.0),
            ]
        );
    }

    #[test]
    fn numeric_mode_omits_zero_weight_arcs() {
        let a = Matrix::new(vec![vec![2.0, 0.0], vec![-1.0, 1.0]]).unwrap();
        // u12 = 0 (no arc), u21 = 1, u11 = 2 - 1 = 1, u22 = 0 + 1 ... column
        // sums: col1 = 2 - 1 = 1, col2 = 0 + 1 = 1
        let g = matrix_to_digraph(&a).unwrap();
        let triples: Vec<_> = g
            .arcs()
            .iter()
            .map(|a| (a.source, a.target, a.weight))
            .collect();
        assert_eq!(triples, vec![(2, 1, 1.0), (0, 1, 1.0), (0, 2, 1.0)]);

        let singular = Matrix::new(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        let g = matrix_to_digraph(&singular).unwrap();
        // both column sums vanish: no root arcs at all
        assert!(g.arcs().iter().all(|a| a.source != 0));
    }

    #[test]
    fn symbolic_mode_keeps_root_arcs() {
        let a = Matrix::symbolic(2).unwrap();
        let g = matrix_to_digraph(&a).unwrap();
        let rendered: Vec<_> = g
            .arcs()
            .iter()
            .map(|a| (a.source, a.target, a.weight.to_string()))
            .collect();
        assert_eq!(
            rendered,
            vec![
                (1, 2, "u12".to_string()),
                (2, 1, "u21".to_string()),
                (0, 1, "u11".to_string()),
                (0, 2, "u22".to_string()),
            ]
        );
    }

    #[test]
    fn round_trip_is_exact_for_rationals() {
        let a = Matrix::new(vec![
            vec![rational(3, 1), rational(-1, 2), rational(0, 1)],
            vec![rational(-5, 3), rational(7, 4), rational(-1, 1)],
            vec![rational(1, 6), rational(-2, 7), rational(9, 5)],
        ])
        .unwrap();
        let back = digraph_to_matrix(&matrix_to_digraph(&a).unwrap()).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn round_trip_matches_for_doubles() {
        let a = upper_numeric();
        let back = digraph_to_matrix(&matrix_to_digraph(&a).unwrap()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_relative_eq!(back.entry(i, j), a.entry(i, j), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn digraph_to_matrix_sums_parallel_arcs() {
        let g: Digraph<f64> = Digraph::new(3).unwrap();
        let (g, _) = g.add_arc(1, 2, 3.0).unwrap();
        let (g, _) = g.add_arc(1, 2, 4.0).unwrap();
        let (g, _) = g.add_arc(0, 1, 1.0).unwrap();
        let a = digraph_to_matrix(&g).unwrap();
        assert_eq!(*a.entry(0, 1), -7.0);
        // column 2 sum: u12 = 7, no root arc
        assert_eq!(*a.entry(1, 1), 7.0);
    }

    #[test]
    fn digraph_to_matrix_rejects_in_arcs_at_root() {
        let g: Digraph<f64> = Digraph::new(2).unwrap();
        let (g, _) = g.add_arc(1, 0, 1.0).unwrap();
        assert_eq!(digraph_to_matrix(&g).unwrap_err(), Error::RootHasInArcs);
    }

    #[test]
    fn det_via_arborescences_matches_known_values() {
        assert_relative_eq!(
            det_via_arborescences(&upper_numeric()).unwrap(),
            75.0,
            max_relative = 1e-12
        );
        let zero = Matrix::new(vec![vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(det_via_arborescences(&zero).unwrap(), 0.0);
    }

    #[test]
    fn det_reference_matches_known_values() {
        let identity = Matrix::new(vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap();
        assert_eq!(det_reference(&identity).unwrap(), 1.0);
        assert_relative_eq!(
            det_reference(&upper_numeric()).unwrap(),
            75.0,
            max_relative = 1e-12
        );
        let singular = Matrix::new(vec![vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert_eq!(det_reference(&singular).unwrap(), 0.0);
    }

    #[test]
    fn det_reference_rejects_symbolic_entries() {
        let a = Matrix::symbolic(2).unwrap();
        assert!(matches!(
            det_reference(&a).unwrap_err(),
            Error::NonNumericWeight(_)
        ));
    }

    #[test]
    fn symbolic_diagonal_entries_reduce_to_plain_variables() {
        let a = Matrix::symbolic(3).unwrap();
        let u = UDecomposition::from_matrix(&a).unwrap();
        for j in 1..=3 {
            assert_eq!(u.u(j, j).to_string(), u_name(j, j));
            for i in 1..=3 {
                if i != j {
                    assert_eq!(u.u(i, j).to_string(), u_name(i, j));
                }
            }
        }
    }

    #[test]
    fn symbolic_det_of_upper_triangular_expands_correctly() {
        // matrix with u12, u13, u23 above the diagonal and diagonal column
        // sums; its determinant is u11·(u12+u22)·(u13+u23+u33)
        let entries = vec![
            vec![
                parse("u11").unwrap(),
                parse("-u12").unwrap(),
                parse("-u13").unwrap(),
            ],
            vec![
                parse("0").unwrap(),
                parse("u12+u22").unwrap(),
                parse("-u23").unwrap(),
            ],
            vec![
                parse("0").unwrap(),
                parse("0").unwrap(),
                parse("u13+u23+u33").unwrap(),
            ],
        ];
        let a = Matrix::new(entries).unwrap();
        let det = det_via_arborescences(&a).unwrap();
        let expected = parse("u11·(u12+u22)·(u13+u23+u33)")
            .unwrap()
            .canonical_polynomial()
            .unwrap();
        assert_eq!(det, expected);
    }

    #[test]
    fn u_names_stay_unambiguous_past_nine() {
        assert_eq!(u_name(3, 7), "u37");
        assert_eq!(u_name(12, 3), "u12_3");
        assert_eq!(u_name(1, 23), "u1_23");
    }

    #[test]
    fn non_square_matrices_are_rejected() {
        let err = Matrix::new(vec![vec![1.0, 2.0], vec![3.0]]).unwrap_err();
        assert_eq!(err, Error::NotSquare { rows: 2, cols: 1 });
    }
}

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{Abp, AbpError, Label};
use crate::poly::{OracleError, SparsePoly};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Entry {
    Zero,
    One,
    Var(String),
    Const(BigInt),
}

impl Entry {
    pub fn is_zero(&self) -> bool {
        matches!(self, Entry::Zero)
    }

    pub fn to_poly(&self, vars: &Arc<[String]>) -> SparsePoly {
        match self {
            Entry::Zero => SparsePoly::zero(vars),
            Entry::One => SparsePoly::one(vars),
            Entry::Var(v) => SparsePoly::var(vars, v),
            Entry::Const(c) => SparsePoly::constant(vars, c.clone()),
        }
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entry::Zero => write!(f, "0"),
            Entry::One => write!(f, "1"),
            Entry::Var(v) => write!(f, "{v}"),
            Entry::Const(c) => write!(f, "{c}"),
        }
    }
}

/// Square matrix of edge labels, indexed from 1 like the program's nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledMatrix {
    dim: usize,
    entries: Vec<Entry>,
}

impl LabeledMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry at row `i`, column `j`, both 1-based.
    pub fn get(&self, i: usize, j: usize) -> &Entry {
        &self.entries[(i - 1) * self.dim + (j - 1)]
    }

    fn slot(&mut self, i: usize, j: usize) -> &mut Entry {
        &mut self.entries[(i - 1) * self.dim + (j - 1)]
    }
}

impl fmt::Display for LabeledMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.dim {
            let row: Vec<String> = (1..=self.dim).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Adjacency matrix of a trimmed program with a weight-1 loop on the sink.
///
/// Parallel constant edges are merged into their sum; a variable edge
/// parallel to any other edge is rejected.
pub fn abp_to_matrix(g: &Abp) -> Result<LabeledMatrix, AbpError> {
    g.require_trimmed()?;
    let m = g.nodes();
    let mut mat = LabeledMatrix {
        dim: m,
        entries: vec![Entry::Zero; m * m],
    };
    let mut seen = vec![false; m * m];
    for e in g.edges() {
        let idx = (e.from - 1) * m + (e.to - 1);
        let slot = mat.slot(e.from, e.to);
        let next = match (&*slot, &e.label, seen[idx]) {
            (_, Label::Var(v), false) => Entry::Var(v.clone()),
            (_, Label::Const(c), false) => Entry::Const(c.clone()),
            (Entry::Const(a), Label::Const(b), true) => Entry::Const(a + b),
            (Entry::Zero, Label::Const(b), true) => Entry::Const(b.clone()),
            _ => return Err(AbpError::ParallelEdges { from: e.from, to: e.to }),
        };
        seen[idx] = true;
        *slot = match next {
            Entry::Const(c) if c.is_zero() => Entry::Zero,
            other => other,
        };
    }
    *mat.slot(m, m) = Entry::One;
    Ok(mat)
}

/// Symbolic power `M^p` as a row-major grid of polynomials over `vars`.
pub fn matrix_power(
    mat: &LabeledMatrix,
    p: usize,
    vars: &Arc<[String]>,
    cap: usize,
) -> Result<Vec<Vec<SparsePoly>>, OracleError> {
    let m = mat.dim();
    let base: Vec<Vec<SparsePoly>> = (1..=m)
        .map(|i| (1..=m).map(|j| mat.get(i, j).to_poly(vars)).collect())
        .collect();
    let mut acc: Vec<Vec<SparsePoly>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| if i == j { SparsePoly::one(vars) } else { SparsePoly::zero(vars) })
                .collect()
        })
        .collect();
    for _ in 0..p {
        let mut next = vec![vec![SparsePoly::zero(vars); m]; m];
        for (i, row) in next.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                for k in 0..m {
                    if acc[i][k].is_zero() || base[k][j].is_zero() {
                        continue;
                    }
                    *cell = &*cell + &(&acc[i][k] * &base[k][j]);
                }
                if cell.len() > cap {
                    return Err(OracleError::CapExceeded {
                        at: format!("matrix entry ({}, {})", i + 1, j + 1),
                        monomials: cell.len(),
                    });
                }
            }
        }
        acc = next;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abp::tests::{a1, a2, var};
    use crate::abp::Edge;
    use crate::poly::DEFAULT_MONOMIAL_CAP;

    fn vars(names: &[&str]) -> Arc<[String]> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn single_edge_matrix() {
        let m = abp_to_matrix(&a1()).unwrap();
        assert_eq!(m.to_string(), "[0, x]\n[0, 1]\n");
        let v = vars(&["x"]);
        for p in 1..4 {
            let pw = matrix_power(&m, p, &v, DEFAULT_MONOMIAL_CAP).unwrap();
            assert_eq!(pw[0][1], SparsePoly::var(&v, "x"));
        }
    }

    #[test]
    fn square_and_fourth_power_of_two_path_program() {
        let m = abp_to_matrix(&a2()).unwrap();
        let v = vars(&["x", "y", "z"]);
        let expect = &(&SparsePoly::var(&v, "x") * &SparsePoly::var(&v, "y")) + &SparsePoly::var(&v, "z");
        for p in [2, 4] {
            let pw = matrix_power(&m, p, &v, DEFAULT_MONOMIAL_CAP).unwrap();
            assert_eq!(pw[0][2], expect);
        }
    }

    #[test]
    fn parallel_edges() {
        let c = |k: i32| Label::Const(k.into());
        let g = Abp::new(
            "g",
            2,
            vec![
                Edge { from: 1, to: 2, label: c(2) },
                Edge { from: 1, to: 2, label: c(3) },
            ],
        )
        .unwrap();
        assert_eq!(abp_to_matrix(&g).unwrap().get(1, 2), &Entry::Const(5.into()));
        let g = Abp::new("g", 2, vec![var(1, 2, "x"), var(1, 2, "y")]).unwrap();
        assert_eq!(abp_to_matrix(&g), Err(AbpError::ParallelEdges { from: 1, to: 2 }));
    }

    #[test]
    fn untrimmed_is_rejected() {
        let g = Abp::new("g", 3, vec![var(1, 3, "x")]).unwrap();
        assert_eq!(abp_to_matrix(&g), Err(AbpError::NotTrimmed(2)));
        assert!(abp_to_matrix(&Abp::zero("z")).is_ok());
    }
}

//! Dense two-phase tableau simplex with Bland's anti-cycling rule.
//!
//! Solves min cᵀx subject to Ax ≤ b, x ≥ 0 (b of arbitrary sign; rows with
//! negative right-hand side get an artificial variable in phase 1). The
//! problems solved here are tiny and dense, so a plain tableau is the
//! simplest correct choice; Bland's rule guarantees termination under
//! degeneracy. Optimality is certified by recovering the dual solution from
//! the final basis and reporting the duality gap.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-9;
const COST_EPS: f64 = 1e-9;
const FEAS_EPS: f64 = 1e-9;

/// min `objective`ᵀx subject to `rows[i]`·x ≤ `rhs[i]` and x ≥ 0.
#[derive(Clone, Debug)]
pub struct DenseLp {
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    /// Values of the structural variables.
    pub x: Vec<f64>,
    pub objective: f64,
    /// Total pivot count over both phases.
    pub iterations: usize,
    /// |cᵀx − bᵀy| for the dual solution y recovered from the final basis.
    pub duality_gap: f64,
    /// Largest violation of the dual constraints Aᵀy ≤ c.
    pub dual_infeasibility: f64,
}

struct Tableau {
    /// Constraint rows, reduced in place; one extra column for the rhs.
    rows: Vec<Vec<f64>>,
    obj: Vec<f64>,
    basis: Vec<usize>,
    n_structural: usize,
    n_slack: usize,
    n_artificial: usize,
    iterations: usize,
}

impl Tableau {
    fn total_vars(&self) -> usize {
        self.n_structural + self.n_slack + self.n_artificial
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let width = self.rows[row].len();
        let p = self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            *v /= p;
        }
        for r in 0..self.rows.len() {
            if r == row {
                continue;
            }
            let factor = self.rows[r][col];
            if factor != 0.0 {
                for k in 0..width {
                    let upd = self.rows[row][k] * factor;
                    self.rows[r][k] -= upd;
                }
                self.rows[r][col] = 0.0;
            }
        }
        let factor = self.obj[col];
        if factor != 0.0 {
            for k in 0..width {
                self.obj[k] -= self.rows[row][k] * factor;
            }
            self.obj[col] = 0.0;
        }
        self.basis[row] = col;
        self.iterations += 1;
    }

    /// Runs simplex iterations with Bland's rule until optimal. `allowed`
    /// limits the entering columns (used to bar artificials in phase 2).
    fn run(&mut self, allowed: usize, max_iterations: usize) -> Result<()> {
        loop {
            if self.iterations > max_iterations {
                return Err(Error::NotConverged(max_iterations));
            }
            // Bland: entering column is the lowest index with negative
            // reduced cost.
            let mut entering = None;
            for j in 0..allowed {
                if self.obj[j] < -COST_EPS {
                    entering = Some(j);
                    break;
                }
            }
            let Some(col) = entering else {
                return Ok(());
            };
            // Ratio test; ties broken by the lowest basic-variable index.
            let rhs_idx = self.total_vars();
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows.len() {
                let a = self.rows[r][col];
                if a > PIVOT_EPS {
                    let ratio = self.rows[r][rhs_idx] / a;
                    let better = match leave {
                        None => true,
                        Some((lr, lratio)) => {
                            ratio < lratio - PIVOT_EPS
                                || (ratio < lratio + PIVOT_EPS && self.basis[r] < self.basis[lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((row, _)) = leave else {
                return Err(Error::Unbounded);
            };
            self.pivot(row, col);
        }
    }

    fn objective_value(&self) -> f64 {
        let rhs_idx = self.total_vars();
        -self.obj[rhs_idx]
    }
}

/// Solves the program with the two-phase method.
pub fn solve_simplex(lp: &DenseLp, max_iterations: usize) -> Result<LpSolution> {
    let n = lp.objective.len();
    let m = lp.rows.len();
    if lp.rhs.len() != m || lp.rows.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch(
            "lp rows, rhs and objective sizes disagree".to_string(),
        ));
    }

    // Equality form: negate rows with negative rhs, attach one slack per row
    // (+1 for kept rows, -1 for negated ones) and artificials where the
    // slack cannot start basic.
    let negated: Vec<bool> = lp.rhs.iter().map(|&b| b < 0.0).collect();
    let n_art = negated.iter().filter(|&&v| v).count();
    let total = n + m + n_art;
    let rhs_idx = total;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut art_seen = 0usize;
    for i in 0..m {
        let sign = if negated[i] { -1.0 } else { 1.0 };
        let mut row = vec![0.0; total + 1];
        for j in 0..n {
            row[j] = sign * lp.rows[i][j];
        }
        row[n + i] = sign; // slack
        row[rhs_idx] = sign * lp.rhs[i];
        if negated[i] {
            let art_col = n + m + art_seen;
            row[art_col] = 1.0;
            basis.push(art_col);
            art_seen += 1;
        } else {
            basis.push(n + i);
        }
        rows.push(row);
    }

    // Keep the untouched equality system for the dual certificate
    // (filtered alongside the tableau when redundant rows are dropped).
    let mut eq_rows = rows.clone();

    let mut tab = Tableau {
        rows,
        obj: vec![0.0; total + 1],
        basis,
        n_structural: n,
        n_slack: m,
        n_artificial: n_art,
        iterations: 0,
    };

    // Phase 1: minimize the artificial sum.
    if n_art > 0 {
        for j in n + m..total {
            tab.obj[j] = 1.0;
        }
        for r in 0..m {
            if tab.basis[r] >= n + m {
                let row = tab.rows[r].clone();
                for k in 0..=total {
                    tab.obj[k] -= row[k];
                }
            }
        }
        tab.run(total, max_iterations)?;
        if tab.objective_value() > 1e-9 {
            return Err(Error::Infeasible);
        }
        // Drive leftover artificials out of the basis where a real pivot
        // exists. Rows without one are redundant; they must be dropped, or
        // a later pivot could push the basic artificial positive again.
        for r in 0..m {
            if tab.basis[r] >= n + m {
                if let Some(col) = (0..n + m).find(|&j| tab.rows[r][j].abs() > PIVOT_EPS) {
                    tab.pivot(r, col);
                }
            }
        }
        let keep: Vec<bool> = tab.basis.iter().map(|&b| b < n + m).collect();
        if keep.iter().any(|k| !k) {
            let mut filter = keep.iter().copied();
            tab.rows.retain(|_| filter.next().unwrap());
            let mut filter = keep.iter().copied();
            tab.basis.retain(|_| filter.next().unwrap());
            let mut filter = keep.iter().copied();
            eq_rows.retain(|_| filter.next().unwrap());
        }
    }

    // Phase 2 objective row: original costs reduced against the basis.
    let n_rows = tab.rows.len();
    tab.obj = vec![0.0; total + 1];
    for (j, &c) in lp.objective.iter().enumerate() {
        tab.obj[j] = c;
    }
    for r in 0..n_rows {
        let b = tab.basis[r];
        if b < n {
            let factor = lp.objective[b];
            if factor != 0.0 {
                let row = tab.rows[r].clone();
                for k in 0..=total {
                    tab.obj[k] -= row[k] * factor;
                }
                tab.obj[b] = 0.0;
            }
        }
    }
    tab.run(n + m, max_iterations)?;

    let mut x_full = vec![0.0; total];
    for r in 0..n_rows {
        x_full[tab.basis[r]] = tab.rows[r][rhs_idx];
    }
    if x_full[n + m..].iter().any(|&v| v.abs() > FEAS_EPS) {
        return Err(Error::Infeasible);
    }
    let x: Vec<f64> = x_full[..n].to_vec();
    let objective: f64 = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();

    // Dual certificate: y solves Bᵀ y = c_B over the original equality
    // system; the gap cᵀx − bᵀy and the worst violation of Aᵀy ≤ c vanish at
    // a true optimum.
    let mut bmat = DMatrix::zeros(n_rows, n_rows);
    let mut cb = DVector::zeros(n_rows);
    for (r, &bv) in tab.basis.iter().enumerate() {
        for i in 0..n_rows {
            bmat[(i, r)] = eq_rows[i][bv];
        }
        cb[r] = if bv < n { lp.objective[bv] } else { 0.0 };
    }
    let (duality_gap, dual_infeasibility) = match bmat.transpose().full_piv_lu().solve(&cb) {
        Some(y) => {
            let b_eq: Vec<f64> = eq_rows.iter().map(|r| r[rhs_idx]).collect();
            let dual_obj: f64 = b_eq.iter().zip(y.iter()).map(|(b, yi)| b * yi).sum();
            let mut worst: f64 = 0.0;
            for j in 0..n + m {
                let aj: f64 = (0..n_rows).map(|i| eq_rows[i][j] * y[i]).sum();
                let cj = if j < n { lp.objective[j] } else { 0.0 };
                worst = worst.max(aj - cj);
            }
            ((objective - dual_obj).abs(), worst)
        }
        None => (f64::INFINITY, f64::INFINITY),
    };

    Ok(LpSolution {
        x,
        objective,
        iterations: tab.iterations,
        duality_gap,
        dual_infeasibility,
    })
}

use super::{LpError, LpOptions, LpProblem, LpSolution, LpStatus};

const PIVOT_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-9;
/// Entries that cancel below this magnitude are flushed to zero so the
/// tableau keeps the sparsity of the original rows.
const DROP_TOL: f64 = 1e-13;

/// How an original variable maps onto non-negative tableau columns.
#[derive(Clone, Copy)]
enum Column {
    /// `v = shift + col`
    Shifted { col: usize, shift: f64 },
    /// `v = plus - minus`
    Split { plus: usize, minus: usize },
}

enum Outcome {
    Optimal,
    Unbounded,
}

/// Condensed tableau: each row expresses a basic variable as
/// `basic_i = rhs_i - sum_k t[i][k] * nonbasic_k`, and the objective as
/// `z + sum_k d[k] * nonbasic_k`.
struct Tableau {
    rows: usize,
    cols: usize,
    t: Vec<f64>,
    rhs: Vec<f64>,
    d: Vec<f64>,
    z: f64,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    frozen: Option<usize>,
    pivots: usize,
    max_pivots: usize,
    pivot_row: Vec<f64>,
    nz: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, k: usize) -> f64 {
        self.t[i * self.cols + k]
    }

    fn pivot(&mut self, r: usize, j: usize) -> Result<(), LpError> {
        if self.pivots >= self.max_pivots {
            return Err(LpError::PivotLimit(self.max_pivots));
        }
        self.pivots += 1;

        let cols = self.cols;
        let inv = 1.0 / self.at(r, j);
        {
            let row = &mut self.t[r * cols..(r + 1) * cols];
            for v in row.iter_mut() {
                *v *= inv;
            }
            row[j] = inv;
            self.pivot_row.clear();
            self.pivot_row.extend_from_slice(row);
        }
        self.rhs[r] *= inv;
        let rhs_r = self.rhs[r];

        self.nz.clear();
        self.nz.extend((0..cols).filter(|&k| self.pivot_row[k] != 0.0));

        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.t[i * cols + j];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.t[i * cols..(i + 1) * cols];
            row[j] = 0.0;
            for &k in &self.nz {
                let v = row[k] - f * self.pivot_row[k];
                row[k] = if v.abs() < DROP_TOL { 0.0 } else { v };
            }
            self.rhs[i] -= f * rhs_r;
        }

        let f = self.d[j];
        if f != 0.0 {
            self.d[j] = 0.0;
            for &k in &self.nz {
                let v = self.d[k] - f * self.pivot_row[k];
                self.d[k] = if v.abs() < DROP_TOL { 0.0 } else { v };
            }
            self.z += f * rhs_r;
        }

        std::mem::swap(&mut self.basic[r], &mut self.nonbasic[j]);
        Ok(())
    }

    /// Bland's rule: the entering column holds the lowest-labelled variable
    /// with negative reduced cost; the leaving row is the lowest-labelled
    /// basic variable among the minimum-ratio rows.
    fn run(&mut self) -> Result<Outcome, LpError> {
        loop {
            let mut entering: Option<usize> = None;
            for k in 0..self.cols {
                if Some(k) == self.frozen || self.d[k] >= -OPT_TOL {
                    continue;
                }
                if entering.is_none_or(|e| self.nonbasic[k] < self.nonbasic[e]) {
                    entering = Some(k);
                }
            }
            let Some(j) = entering else {
                return Ok(Outcome::Optimal);
            };

            let mut leaving: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, j);
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs[i].max(0.0) / a;
                leaving = match leaving {
                    None => Some((i, ratio)),
                    Some((r, best)) => {
                        let slack = 1e-12 * (1.0 + best.abs());
                        if ratio < best - slack || (ratio <= best + slack && self.basic[i] < self.basic[r]) {
                            Some((i, ratio.min(best)))
                        } else {
                            Some((r, best))
                        }
                    }
                };
            }
            let Some((r, _)) = leaving else {
                return Ok(Outcome::Unbounded);
            };
            self.pivot(r, j)?;
        }
    }

    fn remove_row(&mut self, r: usize) {
        let last = self.rows - 1;
        if r != last {
            let cols = self.cols;
            self.t.copy_within(last * cols..(last + 1) * cols, r * cols);
            self.rhs[r] = self.rhs[last];
            self.basic[r] = self.basic[last];
        }
        self.t.truncate(last * self.cols);
        self.rhs.truncate(last);
        self.basic.truncate(last);
        self.rows = last;
    }
}

pub(super) fn solve(problem: &LpProblem, opts: &LpOptions) -> Result<LpSolution, LpError> {
    let n_vars = problem.n_vars();
    let rows = problem.n_constraints();

    let mut columns = Vec::with_capacity(n_vars);
    let mut n_struct = 0;
    for lower in problem.var_lower() {
        match lower {
            Some(shift) => {
                columns.push(Column::Shifted {
                    col: n_struct,
                    shift: *shift,
                });
                n_struct += 1;
            }
            None => {
                columns.push(Column::Split {
                    plus: n_struct,
                    minus: n_struct + 1,
                });
                n_struct += 2;
            }
        }
    }

    // One extra column for the phase-one auxiliary variable.
    let aux_col = n_struct;
    let cols = n_struct + 1;
    let slack_id = |i: usize| n_struct + i;
    let aux_id = n_struct + rows;

    let mut cost = vec![0.0; n_struct];
    let mut t = vec![0.0; rows * cols];
    let mut rhs = problem.rhs().to_vec();
    for (j, col) in columns.iter().enumerate() {
        let c = problem.objective()[j];
        match *col {
            Column::Shifted { col, shift } => {
                cost[col] = c;
                for i in 0..rows {
                    let a = problem.row(i)[j];
                    t[i * cols + col] = a;
                    rhs[i] -= a * shift;
                }
            }
            Column::Split { plus, minus } => {
                cost[plus] = c;
                cost[minus] = -c;
                for i in 0..rows {
                    let a = problem.row(i)[j];
                    t[i * cols + plus] = a;
                    t[i * cols + minus] = -a;
                }
            }
        }
    }

    let mut tab = Tableau {
        rows,
        cols,
        t,
        rhs,
        d: vec![0.0; cols],
        z: 0.0,
        basic: (0..rows).map(slack_id).collect(),
        nonbasic: (0..n_struct).chain(std::iter::once(aux_id)).collect(),
        frozen: None,
        pivots: 0,
        max_pivots: opts.max_pivots,
        pivot_row: Vec::with_capacity(cols),
        nz: Vec::with_capacity(cols),
    };

    // Phase one: introduce x0 >= 0 in every row and minimise it.
    let most_negative = (0..rows)
        .filter(|&i| tab.rhs[i] < 0.0)
        .min_by(|&p, &q| tab.rhs[p].total_cmp(&tab.rhs[q]).then(p.cmp(&q)));
    if let Some(r) = most_negative {
        for i in 0..rows {
            tab.t[i * cols + aux_col] = -1.0;
        }
        tab.d[aux_col] = 1.0;
        tab.pivot(r, aux_col)?;
        tab.run()?;
        if tab.z > opts.feas_tol {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: None,
                objective: None,
                iterations: tab.pivots,
            });
        }
        if let Some(r) = tab.basic.iter().position(|&b| b == aux_id) {
            let replacement = (0..cols)
                .filter(|&k| tab.at(r, k).abs() > PIVOT_TOL)
                .min_by_key(|&k| tab.nonbasic[k]);
            match replacement {
                Some(k) => tab.pivot(r, k)?,
                None => tab.remove_row(r),
            }
        }
        tab.frozen = tab.nonbasic.iter().position(|&v| v == aux_id);
    } else {
        tab.frozen = Some(aux_col);
    }

    // Phase two: price out the true objective against the current basis.
    let var_cost = |id: usize| if id < n_struct { cost[id] } else { 0.0 };
    tab.z = 0.0;
    for k in 0..cols {
        tab.d[k] = var_cost(tab.nonbasic[k]);
    }
    for i in 0..tab.rows {
        let cb = var_cost(tab.basic[i]);
        if cb == 0.0 {
            continue;
        }
        tab.z += cb * tab.rhs[i];
        for k in 0..cols {
            let a = tab.t[i * cols + k];
            if a != 0.0 {
                tab.d[k] -= cb * a;
            }
        }
    }
    if let Some(f) = tab.frozen {
        tab.d[f] = 0.0;
    }

    if let Outcome::Unbounded = tab.run()? {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            x: None,
            objective: None,
            iterations: tab.pivots,
        });
    }

    let mut value = vec![0.0; n_struct];
    for (i, &id) in tab.basic.iter().enumerate() {
        if id < n_struct {
            value[id] = tab.rhs[i].max(0.0);
        }
    }
    let x: Vec<f64> = columns
        .iter()
        .map(|col| match *col {
            Column::Shifted { col, shift } => shift + value[col],
            Column::Split { plus, minus } => value[plus] - value[minus],
        })
        .collect();
    let objective = problem.evaluate(&x);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x: Some(x),
        objective: Some(objective),
        iterations: tab.pivots,
    })
}

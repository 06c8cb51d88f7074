#![allow(dead_code)]

use morphbox::data::Dataset;
use morphbox::lp::LpProblem;
use morphbox::minimax::{ClassModule, Hyperbox};
use rand::Rng;

pub fn random_box<R: Rng>(rng: &mut R, n: usize) -> Hyperbox {
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    for _ in 0..n {
        let a: f64 = rng.random_range(-5.0..5.0);
        let w: f64 = rng.random_range(0.0..4.0);
        lo.push(a);
        hi.push(a + w);
    }
    Hyperbox::new(lo, hi).unwrap()
}

pub fn random_point<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-8.0..8.0)).collect()
}

pub fn random_module<R: Rng>(rng: &mut R, n: usize, k: usize) -> ClassModule {
    ClassModule::new(1, (0..k).map(|_| random_box(rng, n)).collect()).unwrap()
}

/// Solves the square system `m y = r` by Gaussian elimination with partial
/// pivoting; `None` when (numerically) singular.
pub fn solve_square(mut m: Vec<Vec<f64>>, mut r: Vec<f64>) -> Option<Vec<f64>> {
    let n = r.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col].abs() < 1e-10 {
            return None;
        }
        m.swap(col, piv);
        r.swap(col, piv);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            if f != 0.0 {
                for j in col..n {
                    m[row][j] -= f * m[col][j];
                }
                r[row] -= f * r[col];
            }
        }
    }
    let mut y = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| m[i][j] * y[j]).sum();
        y[i] = (r[i] - s) / m[i][i];
    }
    Some(y)
}

fn next_subset(idx: &mut [usize], total: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < total - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Brute-force optimum of a bounded LP: the best feasible vertex, or `None`
/// when no vertex is feasible.
pub fn vertex_oracle(p: &LpProblem) -> Option<(f64, Vec<f64>)> {
    let v = p.n_vars();
    let mut rows: Vec<(Vec<f64>, f64)> = (0..p.n_constraints())
        .map(|i| (p.row(i).to_vec(), p.rhs()[i]))
        .collect();
    for (j, l) in p.var_lower().iter().enumerate() {
        if let Some(l) = l {
            let mut e = vec![0.0; v];
            e[j] = -1.0;
            rows.push((e, -l));
        }
    }
    if rows.len() < v {
        return None;
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut idx: Vec<usize> = (0..v).collect();
    loop {
        let m = idx.iter().map(|&i| rows[i].0.clone()).collect();
        let r = idx.iter().map(|&i| rows[i].1).collect();
        if let Some(x) = solve_square(m, r) {
            let feasible = rows.iter().all(|(a, b)| {
                let lhs: f64 = a.iter().zip(&x).map(|(u, w)| u * w).sum();
                lhs <= b + 1e-9 * (1.0 + b.abs())
            });
            if feasible {
                let obj = p.evaluate(&x);
                if best.as_ref().is_none_or(|(o, _)| obj < *o) {
                    best = Some((obj, x));
                }
            }
        }
        if !next_subset(&mut idx, rows.len()) {
            break;
        }
    }
    best
}

/// Random LP whose feasible region sits inside the box `[-3, 3]^V`.
///
/// Every variable is bounded above by an explicit row and below either by a
/// lower bound or (for free variables) by another row. When `feasible` the
/// general rows are built around an interior point.
pub fn random_bounded_lp<R: Rng>(rng: &mut R, max_vars: usize, max_rows: usize, feasible: bool) -> LpProblem {
    let v = rng.random_range(1..=max_vars);
    let free: Vec<bool> = (0..v).map(|_| rng.random_bool(0.4)).collect();
    let n_free = free.iter().filter(|&&f| f).count();
    let fixed_rows = v + n_free;
    let extra = rng.random_range(0..=max_rows.saturating_sub(fixed_rows));
    let anchor: Vec<f64> = (0..v).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for j in 0..v {
        let mut row = vec![0.0; v];
        row[j] = 1.0;
        a.extend(row);
        b.push(rng.random_range(1.0..3.0));
        if free[j] {
            let mut row = vec![0.0; v];
            row[j] = -1.0;
            a.extend(row);
            b.push(rng.random_range(1.0..3.0));
        }
    }
    for _ in 0..extra {
        let row: Vec<f64> = (0..v)
            .map(|_| {
                if rng.random_bool(0.2) {
                    0.0
                } else {
                    rng.random_range(-3.0..3.0)
                }
            })
            .collect();
        let at: f64 = row.iter().zip(&anchor).map(|(x, y)| x * y).sum();
        b.push(if feasible {
            at + rng.random_range(0.0..2.0)
        } else {
            rng.random_range(-4.0..1.0)
        });
        a.extend(row);
    }
    let lower = free
        .iter()
        .map(|&f| if f { None } else { Some(rng.random_range(-2.0..-1.0)) })
        .collect();
    let c = (0..v)
        .map(|_| {
            if rng.random_bool(0.1) {
                0.0
            } else {
                rng.random_range(-5.0..5.0)
            }
        })
        .collect();
    LpProblem::new(c, a, b, lower).unwrap()
}

/// Datasets whose classes are each exactly covered by the listed boxes.
pub fn separable_fixtures() -> Vec<(String, Dataset, usize)> {
    let mut out = Vec::new();

    // Two classes in a checkerboard of four cells, two boxes per class.
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (cx, cy, label) in [(0.0, 0.0, 1), (3.0, 3.0, 1), (3.0, 0.0, 2), (0.0, 3.0, 2)] {
        for i in 0..4 {
            for j in 0..4 {
                x.extend([cx + 0.5 * i as f64, cy + 0.5 * j as f64]);
                y.push(label);
            }
        }
    }
    out.push(("checkerboard".into(), Dataset::new(x, y, 2, 2).unwrap(), 2));

    // Three classes stacked along one axis, one box each, in 3-D.
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (s, z0) in [(1usize, 0.0), (2, 4.0), (3, 8.0)] {
        for i in 0..10 {
            let t = i as f64;
            x.extend([t * 0.3, (t * 0.7) % 2.0, z0 + (t * 0.37) % 2.0]);
            y.push(s);
        }
    }
    out.push(("stacked slabs".into(), Dataset::new(x, y, 3, 3).unwrap(), 1));

    // A class split into three far-apart clusters around a central class.
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (cx, cy) in [(-6.0, 0.0), (6.0, 0.0), (0.0, 6.0)] {
        for i in 0..6 {
            x.extend([cx + (i % 3) as f64 * 0.4, cy + (i / 3) as f64 * 0.4]);
            y.push(1);
        }
    }
    for i in 0..9 {
        x.extend([-0.5 + (i % 3) as f64 * 0.5, -0.5 + (i / 3) as f64 * 0.5]);
        y.push(2);
    }
    out.push(("three islands".into(), Dataset::new(x, y, 2, 2).unwrap(), 3));
    out
}

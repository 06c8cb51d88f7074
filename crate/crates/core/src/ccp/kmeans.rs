use rand::Rng;

use crate::error::{Error, Result};
use crate::minimax::Hyperbox;

const MAX_LLOYD_ROUNDS: usize = 100;

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (k, c) in centroids.iter().enumerate() {
        let d = sq_dist(point, c);
        if d < best_d {
            best = k;
            best_d = d;
        }
    }
    best
}

/// k-means++ seeding followed by Lloyd refinement over row-major `points`.
pub fn kmeans<R: Rng>(points: &[f64], n: usize, k: usize, rng: &mut R) -> Result<Vec<Vec<f64>>> {
    if k == 0 {
        return Err(Error::InvalidConfig("need at least one centroid".into()));
    }
    if n == 0 || points.is_empty() || points.len() % n != 0 {
        return Err(Error::InvalidDataset("k-means needs at least one point".into()));
    }
    let rows: Vec<&[f64]> = points.chunks_exact(n).collect();

    let mut centroids = vec![rows[rng.random_range(0..rows.len())].to_vec()];
    let mut d2: Vec<f64> = rows.iter().map(|r| sq_dist(r, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = rows.len() - 1;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 && target < w {
                    chosen = i;
                    break;
                }
                target -= w;
            }
            // skip trailing zero-weight rows that round-off might land on
            while d2[chosen] == 0.0 && chosen > 0 {
                chosen -= 1;
            }
            chosen
        } else {
            // every point already coincides with a centroid: duplicate one
            rng.random_range(0..rows.len())
        };
        let c = rows[pick].to_vec();
        for (w, r) in d2.iter_mut().zip(&rows) {
            *w = w.min(sq_dist(r, &c));
        }
        centroids.push(c);
    }

    let mut assign: Vec<usize> = rows.iter().map(|r| nearest(r, &centroids)).collect();
    for _ in 0..MAX_LLOYD_ROUNDS {
        let mut sums = vec![vec![0.0; n]; k];
        let mut counts = vec![0usize; k];
        for (r, &a) in rows.iter().zip(&assign) {
            counts[a] += 1;
            for (s, v) in sums[a].iter_mut().zip(r.iter()) {
                *s += v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centroids[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
        let next: Vec<usize> = rows.iter().map(|r| nearest(r, &centroids)).collect();
        if next == assign {
            break;
        }
        assign = next;
    }
    Ok(centroids)
}

/// Point boxes `[c, c]` on the k-means centroids of `points`.
pub fn kmeanspp_init<R: Rng>(points: &[f64], n: usize, k: usize, rng: &mut R) -> Result<Vec<Hyperbox>> {
    kmeans(points, n, k, rng)?.into_iter().map(Hyperbox::point).collect()
}

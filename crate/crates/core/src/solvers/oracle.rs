//! Dense-grid maximizers used as independent checks on the analytic solvers.
//!
//! Grid values may be computed on the rayon pool, but the reduction always
//! scans in index order, so results are identical with and without
//! parallelism.

use rayon::prelude::*;

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n).map(|i| if i == n - 1 { hi } else { lo + step * i as f64 }).collect()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridMax {
    pub index: usize,
    pub arg: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridMax2 {
    pub x: f64,
    pub y: f64,
    pub value: f64,
}

fn evaluate<F>(points: &[f64], f: &F, parallel: bool) -> Vec<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    if parallel {
        points.par_iter().map(|&x| f(x)).collect()
    } else {
        points.iter().map(|&x| f(x)).collect()
    }
}

/// First index holding the largest value. NaNs never win.
fn first_argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            Some(b) if !(v > values[b]) => {}
            _ if v.is_nan() => {}
            _ => best = Some(i),
        }
    }
    best
}

/// Maximizes `f` over `n` grid points on `[lo, hi]`.
pub fn grid_argmax<F>(f: F, lo: f64, hi: f64, n: usize, parallel: bool) -> Option<GridMax>
where
    F: Fn(f64) -> f64 + Sync,
{
    let points = linspace(lo, hi, n);
    let values = evaluate(&points, &f, parallel);
    first_argmax(&values).map(|index| GridMax { index, arg: points[index], value: values[index] })
}

/// Maximizes `f(x, y)` over the product grid, rows in `x`.
pub fn grid_argmax_2d<F>(
    f: F,
    x_range: (f64, f64, usize),
    y_range: (f64, f64, usize),
    parallel: bool,
) -> Option<GridMax2>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let xs = linspace(x_range.0, x_range.1, x_range.2);
    let ys = linspace(y_range.0, y_range.1, y_range.2);
    let row_max = |x: f64| {
        let values: Vec<f64> = ys.iter().map(|&y| f(x, y)).collect();
        first_argmax(&values).map(|j| (ys[j], values[j]))
    };
    let rows: Vec<Option<(f64, f64)>> = if parallel {
        xs.par_iter().map(|&x| row_max(x)).collect()
    } else {
        xs.iter().map(|&x| row_max(x)).collect()
    };
    let mut best: Option<GridMax2> = None;
    for (&x, row) in xs.iter().zip(rows) {
        if let Some((y, value)) = row {
            if best.map_or(true, |b| value > b.value) {
                best = Some(GridMax2 { x, y, value });
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_endpoints() {
        let v = linspace(0.0, 1.0, 5);
        assert_eq!(v, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(linspace(2.0, 3.0, 1), vec![2.0]);
        assert!(linspace(0.0, 1.0, 0).is_empty());
    }

    #[test]
    fn argmax_parabola() {
        let m = grid_argmax(|x| -(x - 0.3) * (x - 0.3), 0.0, 1.0, 11, false).unwrap();
        assert_eq!(m.index, 3);
        assert!((m.arg - 0.3).abs() < 1e-15);
    }

    #[test]
    fn ties_resolve_to_first_index() {
        let m = grid_argmax(|_| 1.0, 0.0, 1.0, 7, true).unwrap();
        assert_eq!(m.index, 0);
        let m = grid_argmax(|x| if x < 0.5 { f64::NAN } else { x }, 0.0, 1.0, 5, false).unwrap();
        assert_eq!(m.arg, 1.0);
    }

    #[test]
    fn parallel_matches_sequential() {
        let f = |x: f64, y: f64| (3.0 * x).sin() * (2.0 * y).cos() - x * y;
        let a = grid_argmax_2d(f, (0.0, 2.0, 97), (0.0, 3.0, 83), false).unwrap();
        let b = grid_argmax_2d(f, (0.0, 2.0, 97), (0.0, 3.0, 83), true).unwrap();
        assert_eq!(a, b);
    }
}

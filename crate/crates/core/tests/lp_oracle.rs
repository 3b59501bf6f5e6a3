//! Simplex kernel checked against brute-force vertex enumeration and an
//! independently assembled dual.

use gsd_core::lp::{feasible, solve, Comparison, LinearProgram, LpStatus, Sense};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Solves the square system by Gaussian elimination with partial pivoting.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for c in col..n {
                        a[r][c] -= f * a[col][c];
                    }
                    b[r] -= f * b[col];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

fn combinations(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::new(), f);
}

/// max c.x over {A x <= b, 0 <= x <= 1} by enumerating basic solutions.
fn vertex_oracle(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Option<f64> {
    let n = c.len();
    // All halfspaces as (row, rhs) with row.x <= rhs.
    let mut hs: Vec<(Vec<f64>, f64)> = a.iter().cloned().zip(b.iter().copied()).collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        hs.push((e.clone(), 1.0));
        e[j] = -1.0;
        hs.push((e, 0.0));
    }
    let mut best: Option<f64> = None;
    combinations(hs.len(), n, &mut |idx| {
        let rows: Vec<Vec<f64>> = idx.iter().map(|&i| hs[i].0.clone()).collect();
        let rhs: Vec<f64> = idx.iter().map(|&i| hs[i].1).collect();
        if let Some(x) = solve_square(rows, rhs) {
            let ok = hs
                .iter()
                .all(|(r, h)| r.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() <= h + 1e-9);
            if ok {
                let v: f64 = c.iter().zip(&x).map(|(p, q)| p * q).sum();
                best = Some(best.map_or(v, |bv: f64| bv.max(v)));
            }
        }
    });
    best
}

#[test]
fn random_bounded_lps_match_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 20 {
        let n = rng.gen_range(2..=6);
        let m = rng.gen_range(1..=8);
        let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let a: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect())
            .collect();
        // rhs chosen so that x0 in the box is feasible
        let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let b: Vec<f64> = a
            .iter()
            .map(|r| r.iter().zip(&x0).map(|(p, q)| p * q).sum::<f64>() + rng.gen_range(0.0..1.0))
            .collect();

        let mut lp = LinearProgram::new(n, Sense::Maximize);
        lp.set_objective(c.clone()).unwrap();
        for j in 0..n {
            lp.set_bounds(j, 0.0, 1.0).unwrap();
        }
        for (r, &h) in a.iter().zip(&b) {
            lp.add_constraint(r.clone(), Comparison::Le, h).unwrap();
        }
        let out = solve(&lp).unwrap();
        assert_eq!(out.status(), LpStatus::Optimal);
        let expected = vertex_oracle(&c, &a, &b).expect("feasible by construction");
        let got = out.objective_value().unwrap();
        assert!(
            (got - expected).abs() < 1e-7,
            "kernel {got} vs oracle {expected} (n={n}, m={m})"
        );
        checked += 1;
    }
}

#[test]
fn duality_spot_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..30 {
        let n = rng.gen_range(2..=8);
        let m = rng.gen_range(1..=8);
        let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-4.0..4.0)).collect();
        let upper: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..3.0)).collect();
        let a: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect())
            .collect();
        let x0: Vec<f64> = upper.iter().map(|u| rng.gen_range(0.0..*u)).collect();
        let b: Vec<f64> = a
            .iter()
            .map(|r| r.iter().zip(&x0).map(|(p, q)| p * q).sum::<f64>() - rng.gen_range(0.0..1.0))
            .collect();

        // primal: min c.x s.t. A x >= b, 0 <= x <= upper
        let mut primal = LinearProgram::new(n, Sense::Minimize);
        primal.set_objective(c.clone()).unwrap();
        for j in 0..n {
            primal.set_bounds(j, 0.0, upper[j]).unwrap();
        }
        for (r, &h) in a.iter().zip(&b) {
            primal.add_constraint(r.clone(), Comparison::Ge, h).unwrap();
        }

        // dual: max b.y - upper.w s.t. A^T y - w <= c, y, w >= 0
        let mut dual = LinearProgram::new(m + n, Sense::Maximize);
        let mut obj: Vec<f64> = b.clone();
        obj.extend(upper.iter().map(|u| -u));
        dual.set_objective(obj).unwrap();
        for j in 0..n {
            let mut row: Vec<f64> = a.iter().map(|r| r[j]).collect();
            row.extend((0..n).map(|k| if k == j { -1.0 } else { 0.0 }));
            dual.add_constraint(row, Comparison::Le, c[j]).unwrap();
        }

        let p = solve(&primal).unwrap();
        let d = solve(&dual).unwrap();
        let (p, d) = (p.optimal().unwrap(), d.optimal().unwrap());
        assert!(
            (p.objective_value - d.objective_value).abs() < 1e-6,
            "primal {} dual {}",
            p.objective_value,
            d.objective_value
        );
        // Reported row multipliers are dual feasible (y >= 0 for >= rows in a min problem).
        assert!(p.duals.iter().all(|&y| y > -1e-7), "{:?}", p.duals);
    }
}

#[test]
fn feasible_agrees_with_solve_status() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut seen = [0usize; 2];
    for _ in 0..200 {
        let n = rng.gen_range(1..=5);
        let m = rng.gen_range(1..=6);
        let mut lp = LinearProgram::new(n, Sense::Minimize);
        lp.set_objective((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        for j in 0..n {
            lp.set_bounds(j, -1.0, 1.0).unwrap();
        }
        for _ in 0..m {
            let row: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let cmp = match rng.gen_range(0..3) {
                0 => Comparison::Le,
                1 => Comparison::Ge,
                _ => Comparison::Eq,
            };
            lp.add_constraint(row, cmp, rng.gen_range(-2.0..2.0)).unwrap();
        }
        let f = feasible(&lp).unwrap();
        let status = solve(&lp).unwrap().status();
        assert_eq!(f, status == LpStatus::Optimal);
        seen[f as usize] += 1;
    }
    assert!(seen[0] > 0 && seen[1] > 0, "{seen:?}");
}

#[test]
fn solve_is_deterministic() {
    let mut lp = LinearProgram::new(3, Sense::Minimize);
    lp.set_objective(vec![1.0, 1.0, 1.0]).unwrap();
    lp.add_constraint(vec![1.0, 1.0, 0.0], Comparison::Ge, 1.0).unwrap();
    lp.add_constraint(vec![0.0, 1.0, 1.0], Comparison::Ge, 1.0).unwrap();
    lp.add_constraint(vec![1.0, 0.0, 1.0], Comparison::Ge, 1.0).unwrap();
    let a = solve(&lp).unwrap();
    let b = solve(&lp).unwrap();
    assert_eq!(a, b);
}

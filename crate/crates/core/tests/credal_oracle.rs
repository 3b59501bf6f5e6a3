//! Credal-set vertices against brute-force basis enumeration and the hull LP.

use gsd_core::credal::{contains, extreme_points, in_convex_hull, CredalSet, Pmf};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn st(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("s{i}")).collect()
}

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
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Vertices of `{p >= 0, sum p = 1, lo <= f.p <= hi}` by trying every choice
/// of `k - 1` tight inequalities.
fn brute_vertices(k: usize, f: &[Vec<f64>], lo: &[f64], hi: &[f64]) -> Vec<Vec<f64>> {
    // inequalities a.p >= b
    let mut ineq: Vec<(Vec<f64>, f64)> = (0..k)
        .map(|s| ((0..k).map(|t| if s == t { 1.0 } else { 0.0 }).collect(), 0.0))
        .collect();
    for l in 0..f.len() {
        ineq.push((f[l].clone(), lo[l]));
        ineq.push((f[l].iter().map(|x| -x).collect(), -hi[l]));
    }
    let m = ineq.len();
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut pick = vec![0usize; k - 1];
    fn rec(
        start: usize,
        depth: usize,
        pick: &mut Vec<usize>,
        m: usize,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if depth == pick.len() {
            visit(pick);
            return;
        }
        for i in start..m {
            pick[depth] = i;
            rec(i + 1, depth + 1, pick, m, visit);
        }
    }
    rec(0, 0, &mut pick, m, &mut |sel: &[usize]| {
        let mut a = vec![vec![1.0; k]];
        let mut b = vec![1.0];
        for &i in sel {
            a.push(ineq[i].0.clone());
            b.push(ineq[i].1);
        }
        if let Some(p) = solve_square(a, b) {
            let ok = ineq
                .iter()
                .all(|(g, h)| g.iter().zip(&p).map(|(x, y)| x * y).sum::<f64>() >= h - 1e-9);
            if ok && !out.iter().any(|q| q.iter().zip(&p).all(|(x, y)| (x - y).abs() < 1e-7)) {
                out.push(p);
            }
        }
    });
    out
}

fn same_set(a: &[Vec<f64>], b: &[Vec<f64>]) -> bool {
    a.len() == b.len()
        && a
            .iter()
            .all(|p| b.iter().any(|q| p.iter().zip(q).all(|(x, y)| (x - y).abs() < 1e-7)))
}

#[test]
fn constraint_form_matches_basis_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut nonempty = 0;
    for _ in 0..60 {
        let k = rng.gen_range(2..=4);
        let nf = rng.gen_range(1..=3);
        let f: Vec<Vec<f64>> = (0..nf)
            .map(|_| (0..k).map(|_| rng.gen_range(-4..=4) as f64 / 2.0).collect())
            .collect();
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        for fl in &f {
            let mn = fl.iter().copied().fold(f64::INFINITY, f64::min);
            let mx = fl.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let a = rng.gen_range(mn..=mx);
            let b = rng.gen_range(a..=mx + 0.5);
            lo.push((a * 4.0).round() / 4.0);
            hi.push((b * 4.0).round() / 4.0);
        }
        let m = CredalSet::ConstraintForm {
            states: st(k),
            functions: f.clone(),
            lower: lo.clone(),
            upper: hi.clone(),
        };
        let expected = brute_vertices(k, &f, &lo, &hi);
        match extreme_points(&m) {
            Ok(v) => {
                nonempty += 1;
                let got: Vec<Vec<f64>> = v.iter().map(|p| p.probs().to_vec()).collect();
                assert!(same_set(&got, &expected), "{got:?} vs {expected:?}");
                for (i, p) in got.iter().enumerate() {
                    let others: Vec<Vec<f64>> =
                        got.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, q)| q.clone()).collect();
                    assert!(!in_convex_hull(p, &others).unwrap(), "redundant vertex {p:?}");
                }
            }
            Err(_) => assert!(expected.is_empty(), "DD found nothing, brute force {expected:?}"),
        }
    }
    assert!(nonempty > 20);
}

#[test]
fn members_lie_in_the_vertex_hull() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let m = CredalSet::ordering_chain(st(4), vec!["s3".into(), "s1".into(), "s4".into(), "s2".into()]).unwrap();
    let verts: Vec<Vec<f64>> = extreme_points(&m).unwrap().iter().map(|p| p.probs().to_vec()).collect();
    let mut hits = 0;
    for _ in 0..300 {
        let raw: Vec<f64> = (0..4).map(|_| -rng.gen::<f64>().ln()).collect();
        let s: f64 = raw.iter().sum();
        let p: Vec<f64> = raw.iter().map(|x| x / s).collect();
        let member = contains(&m, &Pmf::new(st(4), p.clone()).unwrap()).unwrap();
        assert_eq!(member, in_convex_hull(&p, &verts).unwrap(), "{p:?}");
        hits += member as usize;
    }
    assert!(hits > 0);
}

#[test]
fn linear_vacuous_vertices() {
    let base = Pmf::new(st(3), vec![0.5, 0.3, 0.2]).unwrap();
    let m = CredalSet::linear_vacuous(base, 0.2).unwrap();
    let got: Vec<Vec<f64>> = extreme_points(&m).unwrap().iter().map(|p| p.probs().to_vec()).collect();
    let want = vec![vec![0.6, 0.24, 0.16], vec![0.4, 0.44, 0.16], vec![0.4, 0.24, 0.36]];
    assert!(same_set(&got, &want), "{got:?}");
}

#[test]
fn chain_equals_its_constraint_form() {
    let chain: Vec<String> = ["s2", "s4", "s1", "s3"].iter().map(|s| s.to_string()).collect();
    let idx = |s: &str| st(4).iter().position(|t| t == s).unwrap();
    let functions: Vec<Vec<f64>> = chain
        .windows(2)
        .map(|w| {
            let mut f = vec![0.0; 4];
            f[idx(&w[0])] = 1.0;
            f[idx(&w[1])] = -1.0;
            f
        })
        .collect();
    let n = functions.len();
    let cf = CredalSet::ConstraintForm {
        states: st(4),
        functions,
        lower: vec![0.0; n],
        upper: vec![1.0; n],
    };
    let oc = CredalSet::ordering_chain(st(4), chain).unwrap();
    let a: Vec<Vec<f64>> = extreme_points(&cf).unwrap().iter().map(|p| p.probs().to_vec()).collect();
    let b: Vec<Vec<f64>> = extreme_points(&oc).unwrap().iter().map(|p| p.probs().to_vec()).collect();
    assert!(same_set(&a, &b));
}

//! Independent oracles shared by the oracle tests and the acceptance suite.
//! Nothing here calls the LP layer.
#![allow(dead_code)]

use gsd_core::order::ElementId;
use gsd_core::preference::{build_system, Pair, PreferenceSystem};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn id(s: &str) -> ElementId {
    ElementId::new(s).unwrap()
}

pub fn ids(names: &[&str]) -> Vec<ElementId> {
    names.iter().map(|s| id(s)).collect()
}

/// Grid step denominator: utilities are `k / GRID` for `k` in `0..=GRID`.
pub const GRID: i64 = 20;

/// Random 4-element system `t > {x, y} > b` with a random relation between
/// `x` and `y` and up to three random intensity statements.
pub fn random_four_element<R: Rng>(rng: &mut R) -> PreferenceSystem {
    let e = ids(&["t", "x", "y", "b"]);
    let mut r1: Vec<Pair> = vec![
        (id("t"), id("x")),
        (id("t"), id("y")),
        (id("x"), id("b")),
        (id("y"), id("b")),
        (id("t"), id("b")),
    ];
    match rng.gen_range(0..4) {
        0 => {}
        1 => r1.push((id("x"), id("y"))),
        2 => r1.push((id("y"), id("x"))),
        _ => {
            r1.push((id("x"), id("y")));
            r1.push((id("y"), id("x")));
        }
    }
    let closed = build_system(e.clone(), &r1, &[]).unwrap();
    let pairs = closed.r1().pairs();
    let k = rng.gen_range(0..=3);
    let r2: Vec<(Pair, Pair)> = (0..k)
        .map(|_| (pairs.choose(rng).unwrap().clone(), pairs.choose(rng).unwrap().clone()))
        .collect();
    build_system(e, &r1, &r2).unwrap()
}

/// Constraints straight from the definition, on integer grid utilities:
/// every strict pair needs slack `>= delta_units`, indifference is equality.
pub fn grid_admits(ps: &PreferenceSystem, u: &[i64], delta_units: i64) -> bool {
    let (b, t) = ps.bound_indices().unwrap();
    if u[b] != 0 || u[t] != GRID {
        return false;
    }
    let r1 = ps.r1();
    let n = ps.len();
    for i in 0..n {
        for j in 0..n {
            if r1.contains_index(i, j) {
                let d = u[i] - u[j];
                if r1.contains_index(j, i) {
                    if d != 0 {
                        return false;
                    }
                } else if d < delta_units {
                    return false;
                }
            }
        }
    }
    let r2 = ps.r2();
    let pu = r2.universe();
    let diff = |p: &Pair| u[ps.position(&p.0).unwrap()] - u[ps.position(&p.1).unwrap()];
    for i in 0..pu.len() {
        for j in 0..pu.len() {
            if r2.contains_index(i, j) {
                let d = diff(&pu[i]) - diff(&pu[j]);
                if r2.contains_index(j, i) {
                    if d != 0 {
                        return false;
                    }
                } else if d < delta_units {
                    return false;
                }
            }
        }
    }
    true
}

/// Some grid utility satisfies the system at slack `delta_units / GRID`.
pub fn grid_feasible(ps: &PreferenceSystem, delta_units: i64) -> bool {
    let n = ps.len();
    let mut u = vec![0i64; n];
    loop {
        if grid_admits(ps, &u, delta_units) {
            return true;
        }
        let mut k = 0;
        loop {
            if k == n {
                return false;
            }
            u[k] += 1;
            if u[k] <= GRID {
                break;
            }
            u[k] = 0;
            k += 1;
        }
    }
}

/// All up-sets of the preorder R1 (as membership masks), by enumeration.
pub fn up_sets(ps: &PreferenceSystem) -> Vec<Vec<bool>> {
    let n = ps.len();
    let r1 = ps.r1();
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let inset = |i: usize| mask >> i & 1 == 1;
        let closed = (0..n).all(|i| !inset(i) || (0..n).all(|j| !r1.contains_index(j, i) || inset(j)));
        if closed {
            out.push((0..n).map(inset).collect());
        }
    }
    out
}

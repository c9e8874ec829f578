//! Population response distribution at each trial.

use super::{emission_matrix, mat_mul, vec_mat, AggregateParams, Vec4};

/// Response distribution at 1-based trial `t`: `a X^(t-1) W R`.
pub fn forward_response_dist(p: &AggregateParams, t: usize) -> Vec4 {
    assert!(t >= 1, "trials are 1-based");
    let mut u = p.a;
    for _ in 1..t {
        u = vec_mat(&u, &p.x);
    }
    vec_mat(&vec_mat(&u, &p.w), &emission_matrix())
}

/// Response distributions for trials `1..=t_max`.
pub fn forward_all(p: &AggregateParams, t_max: usize) -> Vec<Vec4> {
    let wr = mat_mul(&p.w, &emission_matrix());
    let mut u = p.a;
    let mut out = Vec::with_capacity(t_max);
    for _ in 0..t_max {
        out.push(vec_mat(&u, &wr));
        u = vec_mat(&u, &p.x);
    }
    out
}

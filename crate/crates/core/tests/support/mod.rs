//! Shared helpers for the acceptance suite, including an independent
//! projected-subgradient reference solver for small nuclear-norm problems.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use secia_core::linalg::CMat;
use secia_core::solver::{
    evaluate_objective, floor_projection, AffineMatrixMap, BlockSpec, FloorConstraint,
    NuclearNormProblem, ObjectiveTerm,
};

pub fn rand_cmat(rng: &mut ChaCha8Rng, r: usize, c: usize) -> CMat {
    DMatrix::from_fn(r, c, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Random small instance with one floor constraint acting on a dedicated
/// square block through identity factors, so that Euclidean projection onto
/// the feasible set is exact in variable space (it touches only that block).
///
/// Block 0 is the floor block (s x s, s in {1, 2}); an optional second
/// block is at most 4 x 2. Objective terms (1 or 2) mix both blocks and
/// sometimes carry left/right weights.
pub fn random_instance(rng: &mut ChaCha8Rng) -> NuclearNormProblem {
    let s = 1 + (rng.random::<u32>() % 2) as usize;
    let mut blocks = vec![BlockSpec { rows: s, cols: s }];
    let extra = rng.random::<bool>();
    if extra {
        let r = 1 + (rng.random::<u32>() % 4) as usize;
        let c = 1 + (rng.random::<u32>() % 2) as usize;
        blocks.push(BlockSpec { rows: r, cols: c });
    }

    let floor_const = rand_cmat(rng, s, s) * Complex64::new(0.3, 0.0);
    let epsilon = 0.05 + 0.25 * rng.random::<f64>();
    let floors = vec![FloorConstraint {
        map: AffineMatrixMap::new(floor_const)
            .with_term(0, CMat::identity(s, s), CMat::identity(s, s)),
        epsilon,
    }];

    let n_terms = 1 + (rng.random::<u32>() % 2) as usize;
    let mut objective = Vec::new();
    for _ in 0..n_terms {
        let m = 1 + (rng.random::<u32>() % 4) as usize;
        let n = 1 + (rng.random::<u32>() % 4) as usize;
        let mut map = AffineMatrixMap::new(rand_cmat(rng, m, n) * Complex64::new(0.5, 0.0));
        for (b, spec) in blocks.iter().enumerate() {
            if b == 0 || rng.random::<bool>() {
                map = map.with_term(b, rand_cmat(rng, m, spec.rows), rand_cmat(rng, spec.cols, n));
            }
        }
        let mut term = ObjectiveTerm::unweighted(map);
        if rng.random::<f64>() < 0.3 {
            // Positive-definite weight keeps the term a genuine norm.
            let g = rand_cmat(rng, m, m);
            term.left_weight = Some(&g * g.adjoint() + CMat::identity(m, m) * Complex64::new(0.5, 0.0));
        }
        if rng.random::<f64>() < 0.3 {
            let g = rand_cmat(rng, n, n);
            term.right_weight = Some(&g * g.adjoint() + CMat::identity(n, n) * Complex64::new(0.5, 0.0));
        }
        objective.push(term);
    }

    NuclearNormProblem {
        blocks,
        objective,
        floors,
    }
}

/// Weighted value of one objective term at the given blocks.
fn term_value(term: &ObjectiveTerm, blocks: &[CMat]) -> CMat {
    let mut v = term.map.eval(blocks);
    if let Some(lw) = &term.left_weight {
        v = lw * v;
    }
    if let Some(rw) = &term.right_weight {
        v = v * rw;
    }
    v
}

/// A subgradient of `sum_t ||term_t(X)||_*` with respect to every block,
/// assembled through the adjoint of each affine term: `U V^H` in value
/// space pulled back as `L^H (U V^H) R^H`.
fn subgradient(problem: &NuclearNormProblem, blocks: &[CMat]) -> Vec<CMat> {
    let mut grad: Vec<CMat> = problem
        .blocks
        .iter()
        .map(|b| CMat::zeros(b.rows, b.cols))
        .collect();
    for term in &problem.objective {
        let v = term_value(term, blocks);
        let svd = v.clone().svd(true, true);
        let u = svd.u.as_ref().unwrap();
        let vt = svd.v_t.as_ref().unwrap();
        let mut g = CMat::zeros(v.nrows(), v.ncols());
        for i in 0..svd.singular_values.len() {
            if svd.singular_values[i] > 1e-12 {
                let ui = u.column(i);
                let vi = vt.row(i);
                for r in 0..v.nrows() {
                    for c in 0..v.ncols() {
                        g[(r, c)] += ui[r] * vi[c];
                    }
                }
            }
        }
        for t in &term.map.terms {
            let mut l = t.left.clone();
            let mut r = t.right.clone();
            if let Some(lw) = &term.left_weight {
                l = lw * l;
            }
            if let Some(rw) = &term.right_weight {
                r = &r * rw;
            }
            grad[t.block] += l.adjoint() * &g * r.adjoint();
        }
    }
    grad
}

/// Exact projection onto the feasible set of a [`random_instance`]: only
/// the floor block moves, by clamping the Hermitian part of `C + X_0`.
fn project(problem: &NuclearNormProblem, blocks: &mut [CMat]) {
    let floor = &problem.floors[0];
    let value = floor.map.eval(blocks);
    let projected = floor_projection(&value, floor.epsilon);
    blocks[0] += projected - value;
}

/// Projected-subgradient reference solver with target-level step sizes:
/// every iterate is feasible by construction; returns the best objective
/// seen.
///
/// The step follows the Polyak rule against a target `delta` below the
/// best value found so far. The travelled path length is tracked; once it
/// exceeds a fixed budget without sufficient descent, the target was too
/// ambitious, so `delta` halves and the iterate resets to the best point.
/// This reaches far tighter accuracy within a fixed iteration budget than
/// a diminishing `1/sqrt(t)` schedule.
pub fn projected_subgradient(
    problem: &NuclearNormProblem,
    iterations: usize,
    init: Option<&[CMat]>,
) -> f64 {
    let mut x: Vec<CMat> = match init {
        Some(blocks) => blocks.to_vec(),
        None => problem
            .blocks
            .iter()
            .map(|b| CMat::zeros(b.rows, b.cols))
            .collect(),
    };
    project(problem, &mut x);
    let mut f = evaluate_objective(problem, &x).unwrap();
    let mut best = f;
    let mut best_x = x.clone();
    let mut delta = 0.5 * best.max(1.0);
    let mut path = 0.0f64;
    for _ in 0..iterations {
        let g = subgradient(problem, &x);
        let gnorm_sq: f64 = g
            .iter()
            .map(secia_core::linalg::frobenius_norm_sq)
            .sum();
        if gnorm_sq < 1e-30 {
            break;
        }
        let step = (f - (best - delta)) / gnorm_sq;
        for (xb, gb) in x.iter_mut().zip(g.iter()) {
            *xb -= gb * Complex64::new(step, 0.0);
        }
        project(problem, &mut x);
        path += step * gnorm_sq.sqrt();
        f = evaluate_objective(problem, &x).unwrap();
        if f <= best - 0.5 * delta {
            best = f;
            best_x = x.clone();
            path = 0.0;
        } else if f < best {
            best = f;
            best_x = x.clone();
        }
        if path > 10.0 {
            delta = (0.5 * delta).max(1e-14);
            path = 0.0;
            x = best_x.clone();
            f = best;
        }
    }
    best
}

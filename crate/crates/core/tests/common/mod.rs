//! Independent reference computations used by the integration tests. None of these call
//! into the library's numerics: they work from explicit index sums, a Taylor-series
//! exponential and hand-built operators.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type M = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Strictly increasing energies starting at a random offset with gaps in `[0.1, 1.5)`.
pub fn increasing_energies(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut e = Vec::with_capacity(n);
    let mut x = rng.random_range(-1.0..1.0);
    for _ in 0..n {
        e.push(x);
        x += rng.random_range(0.1..1.5);
    }
    e
}

/// `exp(-i t G)` by scaling and squaring a 30-term Taylor series.
pub fn taylor_expm(g: &M, t: f64) -> M {
    let n = g.nrows();
    let a = g * c(0.0, -t);
    let norm: f64 = a.iter().map(|z| z.norm()).sum::<f64>().max(1e-300);
    let squarings = norm.log2().ceil().max(0.0) as u32 + 1;
    let scaled = &a / c(2f64.powi(squarings as i32), 0.0);
    let mut term = M::identity(n, n);
    let mut sum = M::identity(n, n);
    for k in 1..=30 {
        term = &term * &scaled / c(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Raising operator `|k+1><k|` on `n` levels.
pub fn raising(n: usize) -> M {
    M::from_fn(
        n,
        n,
        |i, j| if i == j + 1 { c(1.0, 0.0) } else { c(0.0, 0.0) },
    )
}

pub fn kron(a: &M, b: &M) -> M {
    let (ra, ca) = (a.nrows(), a.ncols());
    let (rb, cb) = (b.nrows(), b.ncols());
    M::from_fn(ra * rb, ca * cb, |i, j| {
        a[(i / rb, j / cb)] * b[(i % rb, j % cb)]
    })
}

/// The two drive generators, built from scratch in battery-major order.
pub fn drive_generators(n: usize) -> (M, M) {
    let pi = std::f64::consts::PI;
    let sx = M::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    let sp = M::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    let flip = kron(&M::identity(n, n), &sx) * c(-pi, 0.0);
    let up = raising(n);
    let hop = (kron(&up, &sp) + kron(&up.adjoint(), &sp.adjoint())) * c(pi, 0.0);
    (flip, hop)
}

/// Drive unitary from the Taylor exponential of each half-period segment.
pub fn drive_unitary(n: usize) -> M {
    let (flip, hop) = drive_generators(n);
    taylor_expm(&hop, 0.5) * taylor_expm(&flip, 0.5)
}

/// Closed-form drive unitary written from its action on basis states.
pub fn closed_form(n: usize) -> M {
    let idx = |k: usize, a: usize| 2 * k + a;
    let mut u = M::zeros(2 * n, 2 * n);
    for k in 0..n {
        if k + 1 < n {
            u[(idx(k + 1, 0), idx(k, 0))] = c(1.0, 0.0);
        } else {
            u[(idx(k, 1), idx(k, 0))] = c(0.0, 1.0);
        }
        if k > 0 {
            u[(idx(k - 1, 1), idx(k, 1))] = c(1.0, 0.0);
        } else {
            u[(idx(k, 0), idx(k, 1))] = c(0.0, 1.0);
        }
    }
    u
}

/// `sum_k Tr[H K_k rho K_k^dag] - Tr[H rho]` with `H = diag(energies)`, by index sums.
pub fn delta_e_kraus(kraus: &[M], energies: &[f64], rho: &M) -> f64 {
    let n = energies.len();
    let mut after = 0.0;
    for k in kraus {
        for i in 0..n {
            let mut out_ii = c(0.0, 0.0);
            for a in 0..n {
                for b in 0..n {
                    out_ii += k[(i, a)] * rho[(a, b)] * k[(i, b)].conj();
                }
            }
            after += energies[i] * out_ii.re;
        }
    }
    let before: f64 = (0..n).map(|i| energies[i] * rho[(i, i)].re).sum();
    after - before
}

/// `U^dag H U - H` with `H = diag(energies)`, by index sums.
pub fn unitary_q(u: &M, energies: &[f64]) -> M {
    let n = energies.len();
    M::from_fn(n, n, |i, j| {
        let mut acc = c(0.0, 0.0);
        for k in 0..n {
            acc += u[(k, i)].conj() * energies[k] * u[(k, j)];
        }
        if i == j {
            acc - energies[i]
        } else {
            acc
        }
    })
}

/// Capacity from sorted populations: `sum_i E_i lambda_i^asc - Tr[H rho]`. Eigenvalues
/// come from the Jacobi iteration below.
pub fn capacity_oracle(rho: &M, energies: &[f64]) -> f64 {
    let mut lambda = jacobi_eigenvalues(rho);
    lambda.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let top: f64 = lambda.iter().zip(energies).map(|(l, e)| l * e).sum();
    let energy: f64 = (0..energies.len())
        .map(|i| energies[i] * rho[(i, i)].re)
        .sum();
    top - energy
}

/// Eigenvalues of a Hermitian matrix via the real symmetric embedding
/// `[[Re, -Im], [Im, Re]]` and cyclic Jacobi rotations; each eigenvalue appears twice.
#[allow(clippy::needless_range_loop)]
pub fn jacobi_eigenvalues(h: &M) -> Vec<f64> {
    let n = h.nrows();
    let m = 2 * n;
    let mut a = vec![vec![0.0; m]; m];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            a[i][j] = z.re;
            a[i + n][j + n] = z.re;
            a[i][j + n] = -z.im;
            a[i + n][j] = z.im;
        }
    }
    for _sweep in 0..100 {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..m {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = cs * akp - sn * akq;
                    a[k][q] = sn * akp + cs * akq;
                }
                for k in 0..m {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = cs * apk - sn * aqk;
                    a[q][k] = sn * apk + cs * aqk;
                }
            }
        }
    }
    let mut diag: Vec<f64> = (0..m).map(|i| a[i][i]).collect();
    diag.sort_by(|x, y| x.partial_cmp(y).unwrap());
    diag.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

/// Flow index as `Tr[P - U P U^dag]` restricted to sites within `radius` of the cut, where
/// `P` projects onto sites `>= cut`. Sites are `first + index / internal`.
pub fn flow_trace_oracle(u: &M, first: i64, internal: usize, cut: i64, radius: i64) -> f64 {
    let n = u.nrows();
    let site = |i: usize| first + (i / internal) as i64;
    let right: Vec<usize> = (0..n).filter(|&i| site(i) >= cut).collect();
    let mut total = 0.0;
    for x in 0..n {
        let s = site(x);
        if s < cut - radius || s >= cut + radius {
            continue;
        }
        let p = if s >= cut { 1.0 } else { 0.0 };
        let upu: f64 = right.iter().map(|&y| u[(x, y)].norm_sqr()).sum();
        total += p - upu;
    }
    total
}

//! Dense brute-force references shared by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use coxbar::SurvivalDataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Dense {
    pub time: Vec<f64>,
    pub status: Vec<u8>,
    /// Row-major, represented (centered/scaled) values.
    pub x: Vec<Vec<f64>>,
}

impl Dense {
    pub fn from_dataset(ds: &SurvivalDataset) -> Self {
        let cols: Vec<Vec<f64>> = (0..ds.p()).map(|j| ds.column_dense(j)).collect();
        let x = (0..ds.n()).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
        Self {
            time: ds.time().to_vec(),
            status: ds.status().to_vec(),
            x,
        }
    }

    pub fn p(&self) -> usize {
        self.x.first().map_or(0, Vec::len)
    }

    fn eta(&self, beta: &[f64]) -> Vec<f64> {
        self.x
            .iter()
            .map(|row| row.iter().zip(beta).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Risk set of subject `i`: everyone with time >= t_i.
    fn risk_set(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let t = self.time[i];
        (0..self.time.len()).filter(move |&k| self.time[k] >= t)
    }

    pub fn loglik(&self, beta: &[f64]) -> f64 {
        let eta = self.eta(beta);
        let mut l = 0.0;
        for i in 0..self.time.len() {
            if self.status[i] == 1 {
                let s: f64 = self.risk_set(i).map(|k| eta[k].exp()).sum();
                l += eta[i] - s.ln();
            }
        }
        l
    }

    pub fn gradient(&self, beta: &[f64]) -> Vec<f64> {
        let p = self.p();
        let eta = self.eta(beta);
        let mut g = vec![0.0; p];
        for i in 0..self.time.len() {
            if self.status[i] != 1 {
                continue;
            }
            let mut s0 = 0.0;
            let mut s1 = vec![0.0; p];
            for k in self.risk_set(i) {
                let w = eta[k].exp();
                s0 += w;
                for j in 0..p {
                    s1[j] += w * self.x[k][j];
                }
            }
            for j in 0..p {
                g[j] += self.x[i][j] - s1[j] / s0;
            }
        }
        g
    }

    pub fn hessian(&self, beta: &[f64]) -> Vec<Vec<f64>> {
        let p = self.p();
        let eta = self.eta(beta);
        let mut h = vec![vec![0.0; p]; p];
        for i in 0..self.time.len() {
            if self.status[i] != 1 {
                continue;
            }
            let mut s0 = 0.0;
            let mut s1 = vec![0.0; p];
            let mut s2 = vec![vec![0.0; p]; p];
            for k in self.risk_set(i) {
                let w = eta[k].exp();
                s0 += w;
                for a in 0..p {
                    s1[a] += w * self.x[k][a];
                    for b in 0..p {
                        s2[a][b] += w * self.x[k][a] * self.x[k][b];
                    }
                }
            }
            for a in 0..p {
                for b in 0..p {
                    h[a][b] -= s2[a][b] / s0 - s1[a] * s1[b] / (s0 * s0);
                }
            }
        }
        h
    }

    /// Damped Newton maximizer of `l(beta) - 0.5 * sum ridge_j beta_j^2`.
    pub fn newton_mple(&self, ridge: &[f64]) -> Vec<f64> {
        let p = self.p();
        let obj = |b: &[f64]| self.loglik(b) - 0.5 * b.iter().zip(ridge).map(|(x, r)| r * x * x).sum::<f64>();
        let mut beta = vec![0.0; p];
        for _ in 0..200 {
            let mut g = self.gradient(&beta);
            let mut h = self.hessian(&beta);
            for j in 0..p {
                g[j] -= ridge[j] * beta[j];
                h[j][j] -= ridge[j];
            }
            let neg: Vec<Vec<f64>> = h.iter().map(|r| r.iter().map(|v| -v).collect()).collect();
            let step = solve(neg, g.clone());
            let base = obj(&beta);
            let mut t = 1.0;
            let mut next = beta.clone();
            for _ in 0..50 {
                next = beta.iter().zip(&step).map(|(b, s)| b + t * s).collect();
                if obj(&next) >= base {
                    break;
                }
                t /= 2.0;
            }
            let change = next
                .iter()
                .zip(&beta)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            beta = next;
            if change < 1e-13 {
                break;
            }
        }
        beta
    }
}

/// Gaussian elimination with partial pivoting.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let piv = (c..n)
            .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
            .unwrap();
        a.swap(c, piv);
        b.swap(c, piv);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

/// Minimizer of a unimodal `f` on `[lo, hi]` to absolute width `tol`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

/// Small random dataset with ties in time, a share of zeros in the design
/// and roughly 30% censoring.
pub fn random_dataset(seed: u64, n: usize, p: usize, density: f64) -> SurvivalDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let time: Vec<f64> = (0..n)
        .map(|_| f64::from(rng.random_range(1..=n as u32 / 2 + 1)))
        .collect();
    let mut status: Vec<u8> = (0..n).map(|_| u8::from(rng.random::<f64>() < 0.7)).collect();
    status[0] = 1;
    let cols: Vec<Vec<f64>> = (0..p)
        .map(|_| {
            (0..n)
                .map(|_| {
                    if rng.random::<f64>() < density {
                        rng.random_range(-2.0..2.0)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    SurvivalDataset::from_columns(time, status, &cols).unwrap()
}

pub fn random_beta(seed: u64, p: usize, scale: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xABCD);
    (0..p).map(|_| rng.random_range(-scale..scale)).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

//! Limited-memory BFGS with a preconditioned two-loop recursion and
//! backtracking Armijo line search.

use std::collections::VecDeque;

#[derive(Clone, Copy, Debug)]
pub struct LbfgsOptions {
    pub memory: usize,
    pub c1: f64,
    pub max_iter: usize,
    pub max_backtracks: usize,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        LbfgsOptions {
            memory: 10,
            c1: 1e-4,
            max_iter: 20_000,
            max_backtracks: 60,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stop {
    Converged,
    MaxIterations,
    LineSearchFailed,
}

pub struct Outcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad: Vec<f64>,
    pub iterations: usize,
    pub stop: Stop,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Objective seen by [`minimize`].
pub trait Problem {
    /// Value and gradient, or `None` when the point is outside the
    /// admissible set (the trial is then rejected like a failed Armijo test).
    fn eval(&mut self, x: &[f64]) -> Option<(f64, Vec<f64>)>;

    /// f(y) − f(x). Override when it can be computed without cancellation;
    /// the Armijo test and the tracked value both use it.
    fn difference(&mut self, _x: &[f64], fx: f64, _y: &[f64], fy: f64) -> Option<f64> {
        Some(fy - fx)
    }

    /// Called at every accepted iterate before a direction is computed.
    fn update(&mut self, _x: &[f64]) {}

    /// Approximate inverse Hessian applied to `v`.
    fn precondition(&self, v: &[f64]) -> Vec<f64> {
        v.to_vec()
    }

    fn converged(&self, f: f64, g: &[f64]) -> bool;

    fn accepted(&mut self, _it: usize, _x: &[f64], _f: f64, _g: &[f64]) {}
}

/// Minimize from `x0`. Returns `None` if `x0` itself is not admissible.
pub fn minimize(x0: Vec<f64>, opts: &LbfgsOptions, p: &mut impl Problem) -> Option<Outcome> {
    let (mut f, mut g) = p.eval(&x0)?;
    let mut x = x0;
    let mut hist: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    p.accepted(0, &x, f, &g);
    for it in 0..opts.max_iter {
        if p.converged(f, &g) {
            return Some(Outcome {
                x,
                value: f,
                grad: g,
                iterations: it,
                stop: Stop::Converged,
            });
        }
        p.update(&x);
        let mut d = direction(&g, &hist, p);
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            hist.clear();
            d = p.precondition(&g).iter().map(|v| -v).collect();
            slope = dot(&g, &d);
            if !(slope < 0.0) {
                return Some(Outcome {
                    x,
                    value: f,
                    grad: g,
                    iterations: it,
                    stop: Stop::LineSearchFailed,
                });
            }
        }
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..opts.max_backtracks {
            let xt: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + t * b).collect();
            if let Some((ft, gt)) = p.eval(&xt) {
                if let Some(df) = p.difference(&x, f, &xt, ft) {
                    if df <= opts.c1 * t * slope {
                        accepted = Some((xt, df, gt));
                        break;
                    }
                }
            }
            t *= 0.5;
        }
        let Some((xn, df, gn)) = accepted else {
            return Some(Outcome {
                x,
                value: f,
                grad: g,
                iterations: it,
                stop: Stop::LineSearchFailed,
            });
        };
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-300 {
            if hist.len() == opts.memory {
                hist.pop_front();
            }
            hist.push_back((s, y, 1.0 / sy));
        }
        x = xn;
        // df < 0, so the tracked value never increases
        f = (f + df).min(f);
        g = gn;
        p.accepted(it + 1, &x, f, &g);
    }
    let stop = if p.converged(f, &g) {
        Stop::Converged
    } else {
        Stop::MaxIterations
    };
    Some(Outcome {
        x,
        value: f,
        grad: g,
        iterations: opts.max_iter,
        stop,
    })
}

fn direction(g: &[f64], hist: &VecDeque<(Vec<f64>, Vec<f64>, f64)>, p: &impl Problem) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut a = vec![0.0; hist.len()];
    for (i, (s, y, rho)) in hist.iter().enumerate().rev() {
        a[i] = rho * dot(s, &q);
        q.iter_mut().zip(y).for_each(|(qv, yv)| *qv -= a[i] * yv);
    }
    let mut r = p.precondition(&q);
    if let Some((s, y, _)) = hist.back() {
        let hy = p.precondition(y);
        let gamma = dot(s, y) / dot(y, &hy);
        r.iter_mut().for_each(|v| *v *= gamma);
    }
    for (i, (s, y, rho)) in hist.iter().enumerate() {
        let b = rho * dot(y, &r);
        r.iter_mut()
            .zip(s)
            .for_each(|(rv, sv)| *rv += (a[i] - b) * sv);
    }
    r.iter().map(|v| -v).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        struct Rosenbrock;
        impl Problem for Rosenbrock {
            fn eval(&mut self, x: &[f64]) -> Option<(f64, Vec<f64>)> {
                let (a, b) = (x[0], x[1]);
                let f = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
                let g = vec![
                    -2.0 * (1.0 - a) - 400.0 * a * (b - a * a),
                    200.0 * (b - a * a),
                ];
                Some((f, g))
            }
            fn converged(&self, _: f64, g: &[f64]) -> bool {
                g.iter().map(|v| v * v).sum::<f64>().sqrt() < 1e-10
            }
        }
        let out = minimize(vec![-1.2, 1.0], &LbfgsOptions::default(), &mut Rosenbrock).unwrap();
        assert_eq!(out.stop, Stop::Converged);
        assert!((out.x[0] - 1.0).abs() < 1e-8 && (out.x[1] - 1.0).abs() < 1e-8);
    }
}

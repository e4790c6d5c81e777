//! Free coordinates of a symmetric loop and the block preconditioner.

use crate::action::{LoopPath, SymmetryReduction};
use crate::error::Result;
use crate::groups::{Mat3, Vec3};

/// Linear parametrization of the loops that satisfy a symmetry reduction.
///
/// Node `j` is `S_j·y_f` where `y_f` is free node `f` with some components
/// pinned to zero.
#[derive(Clone, Debug)]
pub struct FreeSpace {
    n: usize,
    masks: Vec<[bool; 3]>,
    offsets: Vec<usize>,
    map: Vec<(usize, Mat3)>,
    count: Vec<f64>,
    dim: usize,
}

impl FreeSpace {
    pub fn new(reduction: Option<&SymmetryReduction>, n: usize) -> Result<Self> {
        if let Some(r) = reduction {
            r.check_nodes(n)?;
        }
        let id = Mat3::identity();
        let full = [true; 3];
        let (masks, map): (Vec<[bool; 3]>, Vec<(usize, Mat3)>) = match reduction {
            None => (vec![full; n], (0..n).map(|j| (j, id)).collect()),
            Some(SymmetryReduction::Italian) => {
                let h = n / 2;
                (
                    vec![full; h],
                    (0..n)
                        .map(|j| if j < h { (j, id) } else { (j - h, -id) })
                        .collect(),
                )
            }
            Some(SymmetryReduction::Extra { r, m }) => {
                let s = n / m;
                let mut powers = vec![id];
                for k in 1..*m {
                    powers.push(r * powers[k - 1]);
                }
                (
                    vec![full; s],
                    (0..n).map(|j| (j % s, powers[j / s])).collect(),
                )
            }
            Some(SymmetryReduction::KleinReflections) => {
                let q = n / 4;
                let r3 = Mat3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0));
                let r2 = Mat3::from_diagonal(&Vec3::new(1.0, -1.0, 1.0));
                let mut masks = vec![full; q + 1];
                masks[0] = [true, true, false];
                masks[q] = [true, false, true];
                let map = (0..n)
                    .map(|j| {
                        if j <= q {
                            (j, id)
                        } else if j <= 2 * q {
                            (2 * q - j, r2)
                        } else if j <= 3 * q {
                            (j - 2 * q, r2 * r3)
                        } else {
                            (n - j, r3)
                        }
                    })
                    .collect();
                (masks, map)
            }
        };
        let mut offsets = Vec::with_capacity(masks.len());
        let mut dim = 0;
        for m in &masks {
            offsets.push(dim);
            dim += m.iter().filter(|&&b| b).count();
        }
        let mut count = vec![0.0; masks.len()];
        for (f, _) in &map {
            count[*f] += 1.0;
        }
        Ok(FreeSpace {
            n,
            masks,
            offsets,
            map,
            count,
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> usize {
        self.n
    }

    fn free_node(&self, z: &[f64], f: usize) -> Vec3 {
        let mut y = Vec3::zeros();
        let mut k = self.offsets[f];
        for c in 0..3 {
            if self.masks[f][c] {
                y[c] = z[k];
                k += 1;
            }
        }
        y
    }

    fn add_free(&self, out: &mut [f64], f: usize, v: &Vec3) {
        let mut k = self.offsets[f];
        for c in 0..3 {
            if self.masks[f][c] {
                out[k] += v[c];
                k += 1;
            }
        }
    }

    /// Nodes of the loop with free coordinates `z`.
    pub fn lift(&self, z: &[f64]) -> Vec<Vec3> {
        let ys: Vec<Vec3> = (0..self.masks.len())
            .map(|f| self.free_node(z, f))
            .collect();
        self.map.iter().map(|(f, s)| s * ys[*f]).collect()
    }

    /// Free coordinates of a loop, read from the representative nodes.
    pub fn restrict(&self, nodes: &[Vec3]) -> Vec<f64> {
        let mut acc = vec![Vec3::zeros(); self.masks.len()];
        for (j, (f, s)) in self.map.iter().enumerate() {
            acc[*f] += s.transpose() * nodes[j];
        }
        let mut z = vec![0.0; self.dim];
        for (f, a) in acc.iter().enumerate() {
            self.add_free(&mut z, f, &(a / self.count[f]));
        }
        z
    }

    /// Gradient in free coordinates from the gradient at every node.
    pub fn pull_back(&self, g: &[Vec3]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (j, (f, s)) in self.map.iter().enumerate() {
            self.add_free(&mut out, *f, &(s.transpose() * g[j]));
        }
        out
    }

    /// L² norm of the constrained gradient, `sqrt(Σ |G_f|²/(count_f·h))`.
    pub fn scaled_norm(&self, g: &[f64], h: f64) -> f64 {
        let mut s = 0.0;
        for f in 0..self.masks.len() {
            let v = self.free_node(g, f);
            s += v.norm_squared() / self.count[f];
        }
        (s / h).sqrt()
    }

    /// Approximate inverse Hessian `D⁻¹Pᵀ H⁻¹ P D⁻¹` for the node-space
    /// operator `H` factored in `solver`.
    pub fn precondition(&self, g: &[f64], solver: &BlockSolver) -> Vec<f64> {
        let mut w = vec![0.0; self.dim];
        for f in 0..self.masks.len() {
            let v = self.free_node(g, f) / self.count[f];
            self.add_free(&mut w, f, &v);
        }
        let solved = solver.solve(&self.lift(&w));
        let mut out = self.pull_back(&solved);
        for f in 0..self.masks.len() {
            let v = self.free_node(&out, f) * (1.0 / self.count[f] - 1.0);
            self.add_free(&mut out, f, &v);
        }
        out
    }

    pub fn path(&self, z: &[f64], period: f64) -> LoopPath {
        LoopPath::new(self.lift(z), period)
    }
}

/// Factored cyclic block-tridiagonal system
/// `B_j x_j − a·(x_{j−1} + x_{j+1}) = b_j` with 3×3 diagonal blocks.
///
/// Node 0 is eliminated by a Schur complement; the remaining chain is
/// solved by block Thomas elimination.
#[derive(Clone, Debug)]
pub struct BlockSolver {
    a: f64,
    /// Inverted pivots of the chain 1..n.
    pivots: Vec<Mat3>,
    /// Response of the chain to a unit load at node 0.
    w: Vec<Mat3>,
    schur: Mat3,
}

impl BlockSolver {
    pub fn new(blocks: &[Mat3], a: f64) -> Option<Self> {
        let n = blocks.len();
        if n < 3 {
            return None;
        }
        let mut pivots = Vec::with_capacity(n - 1);
        for b in &blocks[1..] {
            let m = match pivots.last() {
                None => *b,
                Some(p) => b - p * (a * a),
            };
            pivots.push(m.try_inverse()?);
        }
        let mut solver = BlockSolver {
            a,
            pivots,
            w: vec![],
            schur: Mat3::zeros(),
        };
        let mut load = vec![Mat3::zeros(); n - 1];
        load[0] = Mat3::identity() * a;
        load[n - 2] += Mat3::identity() * a;
        let w = solver.chain_columns(&load);
        solver.schur = (blocks[0] - (w[0] + w[n - 2]) * a).try_inverse()?;
        solver.w = w;
        Some(solver)
    }

    fn chain<T>(&self, b: &[T]) -> Vec<T>
    where
        T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
        Mat3: std::ops::Mul<T, Output = T>,
    {
        let m = b.len();
        let mut y = Vec::with_capacity(m);
        for i in 0..m {
            let v = if i == 0 {
                b[0]
            } else {
                b[i] + self.pivots[i - 1] * y[i - 1] * self.a
            };
            y.push(v);
        }
        let mut x = y.clone();
        x[m - 1] = self.pivots[m - 1] * y[m - 1];
        for i in (0..m - 1).rev() {
            x[i] = self.pivots[i] * (y[i] + x[i + 1] * self.a);
        }
        x
    }

    fn chain_columns(&self, b: &[Mat3]) -> Vec<Mat3> {
        self.chain(b)
    }

    pub fn solve(&self, b: &[Vec3]) -> Vec<Vec3> {
        let n = b.len();
        let r = self.chain(&b[1..]);
        let x0 = self.schur * (b[0] + (r[0] + r[n - 2]) * self.a);
        let mut out = Vec::with_capacity(n);
        out.push(x0);
        out.extend(r.iter().zip(&self.w).map(|(ri, wi)| ri + wi * x0));
        out
    }
}

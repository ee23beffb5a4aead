//! Symmetric banded matrices with a two-column border, factored by Cholesky.
//!
//! The rod Hessian only couples nodes that share a bending stencil, so its
//! bandwidth is fixed; the free object couples to every node in contact and
//! lives in the border.

/// Lower band of a symmetric matrix: `data[i * (bw + 1) + (i - j)] = a[i][j]`.
#[derive(Debug, Clone)]
pub struct SymBand {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl SymBand {
    pub fn zeros(n: usize, bw: usize) -> Self {
        SymBand { n, bw, data: vec![0.0; n * (bw + 1)] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bw, "({i},{j}) outside band {}", self.bw);
        i * (self.bw + 1) + (i - j)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.bw {
            0.0
        } else {
            self.data[self.idx(i, j)]
        }
    }

    /// Adds `v` at `(i, j)`; callers add each unordered off-diagonal pair once.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    /// Copy of the principal block `[lo, hi)`.
    pub fn sub(&self, lo: usize, hi: usize) -> SymBand {
        let mut out = SymBand::zeros(hi - lo, self.bw);
        for i in lo..hi {
            for j in i.saturating_sub(self.bw).max(lo)..=i {
                let k = out.idx(i - lo, j - lo);
                out.data[k] = self.get(i, j);
            }
        }
        out
    }

    pub fn diag(&self, i: usize) -> f64 {
        self.data[i * (self.bw + 1)]
    }

    pub fn add_diag(&mut self, i: usize, v: f64) {
        self.data[i * (self.bw + 1)] += v;
    }

    /// In-place Cholesky; `None` when the matrix is not positive definite.
    pub fn cholesky(mut self) -> Option<BandCholesky> {
        let (n, bw) = (self.n, self.bw);
        for j in 0..n {
            let lo = j.saturating_sub(bw);
            let mut s = self.data[self.idx(j, j)];
            for k in lo..j {
                let l = self.data[self.idx(j, k)];
                s -= l * l;
            }
            if !(s > 0.0) || !s.is_finite() {
                return None;
            }
            let d = s.sqrt();
            let jj = self.idx(j, j);
            self.data[jj] = d;
            for i in j + 1..(j + bw + 1).min(n) {
                let mut s = self.data[self.idx(i, j)];
                for k in i.saturating_sub(bw)..j {
                    s -= self.data[self.idx(i, k)] * self.data[self.idx(j, k)];
                }
                let ij = self.idx(i, j);
                self.data[ij] = s / d;
            }
        }
        Some(BandCholesky { l: self })
    }
}

pub struct BandCholesky {
    l: SymBand,
}

impl BandCholesky {
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let l = &self.l;
        let (n, bw) = (l.n, l.bw);
        let mut y = rhs.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in i.saturating_sub(bw)..i {
                s -= l.data[l.idx(i, k)] * y[k];
            }
            y[i] = s / l.data[l.idx(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..(i + bw + 1).min(n) {
                s -= l.data[l.idx(k, i)] * y[k];
            }
            y[i] = s / l.data[l.idx(i, i)];
        }
        y
    }
}

/// `[[A, B], [Bᵀ, C]]` with `A` banded, `B` of shape `n × 2`, `C` 2 × 2.
#[derive(Debug, Clone)]
pub struct Bordered {
    pub band: SymBand,
    pub border: Vec<[f64; 2]>,
    pub corner: [[f64; 2]; 2],
}

impl Bordered {
    pub fn dim(&self) -> usize {
        self.band.dim() + 2
    }

    pub fn max_diag(&self) -> f64 {
        (0..self.band.dim())
            .map(|i| self.band.diag(i).abs())
            .chain([self.corner[0][0].abs(), self.corner[1][1].abs()])
            .fold(0.0, f64::max)
    }

    /// Diagonal scale per unknown: the larger diagonal entry of the 2×2 block it
    /// belongs to, so both coordinates of a node are damped alike.
    pub fn block_scales(&self) -> Vec<f64> {
        let n = self.band.dim();
        let mut out = Vec::with_capacity(n + 2);
        for i in (0..n).step_by(2) {
            let d = self.band.diag(i).abs().max(if i + 1 < n { self.band.diag(i + 1).abs() } else { 0.0 });
            out.push(d);
            if i + 1 < n {
                out.push(d);
            }
        }
        let c = self.corner[0][0].abs().max(self.corner[1][1].abs());
        out.push(c);
        out.push(c);
        out
    }

    /// Solves `(M + λ·diag(scale + floor)) x = rhs` where `scale` comes from
    /// [`Bordered::block_scales`]. Returns `None` if the shifted matrix is not
    /// positive definite.
    pub fn solve_shifted(&self, rhs: &[f64], lambda: f64, floor: f64) -> Option<Vec<f64>> {
        let n = self.band.dim();
        let mut band = self.band.clone();
        let mut c = self.corner;
        if lambda > 0.0 {
            let scales = self.block_scales();
            for (i, s) in scales[..n].iter().enumerate() {
                band.add_diag(i, lambda * (s + floor));
            }
            c[0][0] += lambda * (scales[n] + floor);
            c[1][1] += lambda * (scales[n + 1] + floor);
        }
        let chol = band.cholesky()?;
        let col = |k: usize| -> Vec<f64> { self.border.iter().map(|r| r[k]).collect() };
        let z0 = chol.solve(&col(0));
        let z1 = chol.solve(&col(1));
        let dot = |a: &[f64], k: usize| -> f64 { self.border.iter().zip(a).map(|(r, v)| r[k] * v).sum() };
        let s = [
            [c[0][0] - dot(&z0, 0), c[0][1] - dot(&z1, 0)],
            [c[1][0] - dot(&z0, 1), c[1][1] - dot(&z1, 1)],
        ];
        let det = s[0][0] * s[1][1] - s[0][1] * s[1][0];
        if !(s[0][0] > 0.0 && det > 0.0) {
            return None;
        }
        let u0 = chol.solve(&rhs[..n]);
        let g0 = rhs[n] - dot(&u0, 0);
        let g1 = rhs[n + 1] - dot(&u0, 1);
        let v0 = (s[1][1] * g0 - s[0][1] * g1) / det;
        let v1 = (s[0][0] * g1 - s[1][0] * g0) / det;
        let mut x: Vec<f64> = u0
            .iter()
            .zip(z0.iter().zip(&z1))
            .map(|(u, (a, b))| u - a * v0 - b * v1)
            .collect();
        x.push(v0);
        x.push(v1);
        Some(x)
    }
}

//! Orthonormal sets stored as real and imaginary planes so that a whole batch
//! of candidates is projected with two real matrix products per plane pair.

use num_complex::Complex64 as C64;

use super::PIVOT_THRESHOLD;

/// Column-major `dim × cols` real plane, with an optional imaginary plane.
#[derive(Clone, Debug)]
struct Planes {
    dim: usize,
    cols: usize,
    re: Vec<f64>,
    im: Option<Vec<f64>>,
}

impl Planes {
    fn empty(dim: usize, real: bool) -> Self {
        Planes { dim, cols: 0, re: Vec::new(), im: (!real).then(Vec::new) }
    }

    fn from_columns(dim: usize, cols: &[Vec<C64>], real: bool) -> Self {
        let mut p = Planes::empty(dim, real);
        p.re.reserve(dim * cols.len());
        for c in cols {
            p.re.extend(c.iter().map(|z| z.re));
            if let Some(im) = p.im.as_mut() {
                im.extend(c.iter().map(|z| z.im));
            }
        }
        p.cols = cols.len();
        p
    }

    fn col(&self, j: usize) -> (&[f64], Option<&[f64]>) {
        let r = j * self.dim..(j + 1) * self.dim;
        (&self.re[r.clone()], self.im.as_ref().map(|im| &im[r]))
    }

    fn col_norm(&self, j: usize) -> f64 {
        let (re, im) = self.col(j);
        let s: f64 = re.iter().map(|x| x * x).sum::<f64>() + im.map_or(0.0, |v| v.iter().map(|x| x * x).sum());
        s.sqrt()
    }

    /// `<col a of self | col b of other>`.
    fn dot(&self, a: usize, other: &Planes, b: usize) -> C64 {
        let (ar, ai) = self.col(a);
        let (br, bi) = other.col(b);
        let mut re: f64 = ar.iter().zip(br).map(|(x, y)| x * y).sum();
        let mut imv = 0.0;
        if let (Some(ai), Some(bi)) = (ai, bi) {
            re += ai.iter().zip(bi).map(|(x, y)| x * y).sum::<f64>();
            imv =
                ar.iter().zip(bi).map(|(x, y)| x * y).sum::<f64>() - ai.iter().zip(br).map(|(x, y)| x * y).sum::<f64>();
        }
        C64::new(re, imv)
    }

    /// `col b of self -= c · col a of src`.
    fn sub_scaled(&mut self, b: usize, c: C64, src: &Planes, a: usize) {
        let r = b * self.dim..(b + 1) * self.dim;
        let (sr, si) = src.col(a);
        for (y, x) in self.re[r.clone()].iter_mut().zip(sr) {
            *y -= c.re * x;
        }
        if let (Some(im), Some(si)) = (self.im.as_mut(), si) {
            for (y, x) in im[r.clone()].iter_mut().zip(si) {
                *y -= c.re * x;
            }
            for (y, x) in self.re[r.clone()].iter_mut().zip(si) {
                *y += c.im * x;
            }
            for (y, x) in im[r].iter_mut().zip(sr) {
                *y -= c.im * x;
            }
        }
    }

    fn scale_col(&mut self, j: usize, s: f64) {
        let r = j * self.dim..(j + 1) * self.dim;
        self.re[r.clone()].iter_mut().for_each(|x| *x *= s);
        if let Some(im) = self.im.as_mut() {
            im[r].iter_mut().for_each(|x| *x *= s);
        }
    }

    fn push_col_from(&mut self, src: &Planes, j: usize) {
        let (re, im) = src.col(j);
        self.re.extend_from_slice(re);
        if let (Some(dst), Some(im)) = (self.im.as_mut(), im) {
            dst.extend_from_slice(im);
        }
        self.cols += 1;
    }
}

/// `c = alpha · op(a) · b + beta · c` on column-major slices; `op(a)` is `a`
/// (`m × k`) or, with `trans_a`, the transpose of a `k × m` matrix.
#[allow(clippy::too_many_arguments)]
fn dgemm(m: usize, k: usize, n: usize, alpha: f64, a: &[f64], trans_a: bool, b: &[f64], beta: f64, c: &mut [f64]) {
    if m == 0 || n == 0 {
        return;
    }
    assert!(a.len() >= m * k && b.len() >= k * n && c.len() >= m * n);
    let (rsa, csa) = if trans_a { (k as isize, 1) } else { (1, m as isize) };
    // SAFETY: the strides above address exactly the asserted slice extents.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            alpha,
            a.as_ptr(),
            rsa,
            csa,
            b.as_ptr(),
            1,
            k as isize,
            beta,
            c.as_mut_ptr(),
            1,
            m as isize,
        );
    }
}

/// Orthonormal set for batched span-membership tests. In real mode every
/// vector handed in must have zero imaginary part.
#[derive(Clone, Debug)]
pub struct BlockedBasis {
    dim: usize,
    real: bool,
    blocks: Vec<Planes>,
    count: usize,
}

impl BlockedBasis {
    pub fn new(dim: usize, real: bool) -> Self {
        BlockedBasis { dim, real, blocks: Vec::new(), count: 0 }
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    /// One classical Gram-Schmidt sweep of every candidate column against
    /// every stored block.
    fn project_pass(&self, c: &mut Planes) {
        let (d, n) = (self.dim, c.cols);
        for b in &self.blocks {
            let k = b.cols;
            let mut ar = vec![0.0; k * n];
            dgemm(k, d, n, 1.0, &b.re, true, &c.re, 0.0, &mut ar);
            match (&b.im, c.im.as_mut()) {
                (Some(bi), Some(ci)) => {
                    let mut ai = vec![0.0; k * n];
                    dgemm(k, d, n, 1.0, bi, true, ci, 1.0, &mut ar);
                    dgemm(k, d, n, 1.0, &b.re, true, ci, 0.0, &mut ai);
                    dgemm(k, d, n, -1.0, bi, true, &c.re, 1.0, &mut ai);
                    dgemm(d, k, n, -1.0, &b.re, false, &ar, 1.0, &mut c.re);
                    dgemm(d, k, n, 1.0, bi, false, &ai, 1.0, &mut c.re);
                    dgemm(d, k, n, -1.0, &b.re, false, &ai, 1.0, ci);
                    dgemm(d, k, n, -1.0, bi, false, &ar, 1.0, ci);
                }
                _ => dgemm(d, k, n, -1.0, &b.re, false, &ar, 1.0, &mut c.re),
            }
        }
    }

    /// Same selection rule as [`super::OrthoBasis::admit`]: every candidate is
    /// projected twice against the stored set, then the batch is pivoted by
    /// residual. Returns admitted indices in admission order together with the
    /// residual each had when it was admitted.
    pub fn admit(&mut self, candidates: &[Vec<C64>], abs_tol: f64) -> Vec<(usize, f64)> {
        let mut c = Planes::from_columns(self.dim, candidates, self.real);
        self.project_pass(&mut c);
        self.project_pass(&mut c);
        let m = c.cols;
        let mut norms: Vec<f64> = (0..m).map(|j| c.col_norm(j)).collect();
        let mut alive: Vec<bool> = norms.iter().map(|&r| r > abs_tol).collect();
        let mut fresh = Planes::empty(self.dim, self.real);
        let mut admitted = Vec::new();
        loop {
            let max = (0..m).filter(|&i| alive[i]).map(|i| norms[i]).fold(0.0f64, f64::max);
            if max <= abs_tol {
                break;
            }
            let pick = (0..m).find(|&i| alive[i] && norms[i] >= PIVOT_THRESHOLD * max).expect("maximum is attained");
            alive[pick] = false;
            // Reorthogonalize against this batch's admissions before normalizing.
            for q in 0..fresh.cols {
                let s = fresh.dot(q, &c, pick);
                c.sub_scaled(pick, s, &fresh, q);
            }
            let nv = c.col_norm(pick);
            if nv == 0.0 || !nv.is_finite() {
                continue;
            }
            c.scale_col(pick, 1.0 / nv);
            fresh.push_col_from(&c, pick);
            admitted.push((pick, norms[pick]));
            let q = fresh.cols - 1;
            for i in 0..m {
                if !alive[i] {
                    continue;
                }
                let s = fresh.dot(q, &c, i);
                c.sub_scaled(i, s, &fresh, q);
                norms[i] = c.col_norm(i);
                if norms[i] <= abs_tol {
                    alive[i] = false;
                }
            }
        }
        if fresh.cols > 0 {
            self.count += fresh.cols;
            self.blocks.push(fresh);
        }
        admitted
    }

    /// Residual norm of `v` outside the span (two projection sweeps).
    pub fn residual(&self, v: &[C64]) -> f64 {
        let mut c = Planes::from_columns(self.dim, std::slice::from_ref(&v.to_vec()), self.real);
        self.project_pass(&mut c);
        self.project_pass(&mut c);
        c.col_norm(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::OrthoBasis;
    use rand::{Rng, SeedableRng};

    fn random_vecs(dim: usize, count: usize, real: bool, seed: u64) -> Vec<Vec<C64>> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                (0..dim)
                    .map(|_| C64::new(rng.gen_range(-1.0..1.0), if real { 0.0 } else { rng.gen_range(-1.0..1.0) }))
                    .collect()
            })
            .collect()
    }

    #[test]
    fn agrees_with_vector_basis() {
        for real in [true, false] {
            let base = random_vecs(12, 4, real, 3);
            let mut cands = base.clone();
            // Dependent combinations and a duplicate.
            let mix: Vec<C64> = base[0].iter().zip(&base[2]).map(|(a, b)| a * 2.0 - b).collect();
            cands.push(mix);
            cands.push(base[1].clone());
            cands.extend(random_vecs(12, 3, real, 9));
            let mut blocked = BlockedBasis::new(12, real);
            let first: Vec<usize> = blocked.admit(&cands[..3], 1e-9).into_iter().map(|p| p.0).collect();
            let second: Vec<usize> = blocked.admit(&cands[3..], 1e-9).into_iter().map(|p| p.0 + 3).collect();
            let mut ortho = OrthoBasis::new(12);
            let a = ortho.admit(cands[..3].to_vec(), 1e-9);
            let b: Vec<usize> = ortho.admit(cands[3..].to_vec(), 1e-9).into_iter().map(|i| i + 3).collect();
            assert_eq!(first, a);
            assert_eq!(second, b);
            assert_eq!(blocked.len(), 7);
            assert!(blocked.residual(&cands[4]) < 1e-12);
        }
    }
}

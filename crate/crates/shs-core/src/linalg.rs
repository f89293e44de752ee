//! LU factorization and a 1-norm condition estimate for the small systems
//! produced by the SHS solver (a few dozen unknowns, a handful of nonzeros
//! per row).

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.n + col] = value;
    }

    #[inline]
    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.n + col] += value;
    }

    pub fn row_mut(&mut self, row: usize) -> &mut [f64] {
        let n = self.n;
        &mut self.data[row * n..(row + 1) * n]
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        (0..self.n)
            .map(|c| (0..self.n).map(|r| self.get(r, c).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for r in 0..self.n {
            for c in 0..self.n {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|r| {
                self.data[r * self.n..(r + 1) * self.n]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }
}

/// Square matrix in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    start: Vec<usize>,
    col: Vec<usize>,
    val: Vec<f64>,
}

impl SparseMatrix {
    /// Sums duplicate `(row, col, value)` entries and drops exact zeros.
    pub fn from_triplets(n: usize, entries: Vec<(usize, usize, f64)>) -> Self {
        let mut start = vec![0usize; n + 1];
        for &(r, c, _) in &entries {
            assert!(r < n && c < n, "entry ({r}, {c}) outside a {n}x{n} matrix");
            start[r + 1] += 1;
        }
        for r in 0..n {
            start[r + 1] += start[r];
        }
        let mut fill = start.clone();
        let mut col = vec![0usize; entries.len()];
        let mut val = vec![0.0; entries.len()];
        for (r, c, v) in entries {
            col[fill[r]] = c;
            val[fill[r]] = v;
            fill[r] += 1;
        }
        // Sort each (short) row by column, merge duplicates, compact.
        let mut out = 0;
        let mut row_start = 0;
        for r in 0..n {
            let (lo, hi) = (row_start, start[r + 1]);
            row_start = hi;
            for i in lo + 1..hi {
                let mut j = i;
                while j > lo && col[j - 1] > col[j] {
                    col.swap(j - 1, j);
                    val.swap(j - 1, j);
                    j -= 1;
                }
            }
            start[r] = out;
            let mut i = lo;
            while i < hi {
                let c = col[i];
                let mut v = val[i];
                i += 1;
                while i < hi && col[i] == c {
                    v += val[i];
                    i += 1;
                }
                if v != 0.0 {
                    col[out] = c;
                    val[out] = v;
                    out += 1;
                }
            }
        }
        start[n] = out;
        col.truncate(out);
        val.truncate(out);
        Self { n, start, col, val }
    }

    pub fn from_dense(a: &DenseMatrix) -> Self {
        let mut entries = Vec::new();
        for (r, row) in a.data.chunks_exact(a.n.max(1)).enumerate().take(a.n) {
            for (c, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    entries.push((r, c, v));
                }
            }
        }
        Self::from_triplets(a.n, entries)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.col.len()
    }

    #[inline]
    fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let span = self.start[r]..self.start[r + 1];
        (&self.col[span.clone()], &self.val[span])
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.n);
        for r in 0..self.n {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                d.set(r, c, v);
            }
        }
        d
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        let mut sums = vec![0.0; self.n];
        for (&c, &v) in self.col.iter().zip(&self.val) {
            sums[c] += v.abs();
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|r| {
                let (cols, vals) = self.row(r);
                cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum()
            })
            .collect()
    }
}

/// `P A Q = L U` with unit-diagonal `L`, stored as sparse rows.
#[derive(Debug, Clone)]
pub struct LuFactorization {
    n: usize,
    /// `(P A Q)[i][j] = A[row_perm[i]][col_perm[j]]`.
    row_perm: Vec<usize>,
    col_perm: Vec<usize>,
    diag: Vec<f64>,
    lower: SparseRows,
    upper: SparseRows,
    norm_1: f64,
}

#[derive(Debug, Clone, Default)]
struct SparseRows {
    start: Vec<usize>,
    col: Vec<usize>,
    val: Vec<f64>,
}

impl SparseRows {
    fn with_rows(n: usize) -> Self {
        Self {
            start: Vec::with_capacity(n + 1),
            ..Self::default()
        }
    }

    #[inline]
    fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let span = self.start[r]..self.start[r + 1];
        (&self.col[span.clone()], &self.val[span])
    }
}

/// Set bits of `mask`, lowest first.
fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (mask != 0).then(|| {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            i
        })
    })
}

/// Mask of the `k` lowest bits.
fn low_mask(k: usize) -> u64 {
    if k >= 64 {
        u64::MAX
    } else {
        (1u64 << k) - 1
    }
}

/// Returned when a pivot is exactly zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularPivot {
    pub column: usize,
}

/// Diagonal pivots smaller than this fraction of their column fall back to
/// row pivoting.
const PIVOT_THRESHOLD: f64 = 0.01;

impl LuFactorization {
    /// Dense partial pivoting.
    pub fn factor(a: &DenseMatrix) -> Result<Self, SingularPivot> {
        Self::factor_dense(a.clone(), a.norm_1())
    }

    /// Systems of 16 to 64 unknowns are first tried with a fill-reducing
    /// symmetric ordering and threshold diagonal pivots. Anything else, or a
    /// rejected pivot, goes through dense partial pivoting.
    pub fn factor_sparse(a: &SparseMatrix) -> Result<Self, SingularPivot> {
        let norm_1 = a.norm_1();
        if (16..=64).contains(&a.n) {
            if let Some(f) = Self::factor_ordered(a, norm_1) {
                return Ok(f);
            }
        }
        Self::factor_dense(a.to_dense(), norm_1)
    }

    fn factor_ordered(a: &SparseMatrix, norm_1: f64) -> Option<Self> {
        let n = a.n;
        let mut adj = vec![0u64; n];
        for i in 0..n {
            for &j in a.row(i).0 {
                if i != j {
                    adj[i] |= 1 << j;
                    adj[j] |= 1 << i;
                }
            }
        }
        let mut remaining: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut order = Vec::with_capacity(n);
        for _ in 0..n {
            let mut best = 0;
            let mut best_deg = u32::MAX;
            for i in bits(remaining) {
                let deg = (adj[i] & remaining).count_ones();
                if deg < best_deg {
                    best_deg = deg;
                    best = i;
                }
            }
            remaining &= !(1u64 << best);
            let nb = adj[best] & remaining;
            for j in bits(nb) {
                adj[j] |= nb & !(1u64 << j);
            }
            order.push(best);
        }

        // Permuted copy with row and column patterns kept as bitmasks.
        let mut inv = vec![0; n];
        for (i, &o) in order.iter().enumerate() {
            inv[o] = i;
        }
        let mut b = vec![0.0; n * n];
        let mut row_nz = vec![0u64; n];
        let mut col_nz = vec![0u64; n];
        for (i, &oi) in order.iter().enumerate() {
            let (cols, vals) = a.row(oi);
            for (&c, &v) in cols.iter().zip(vals) {
                let j = inv[c];
                b[i * n + j] = v;
                row_nz[i] |= 1 << j;
                col_nz[j] |= 1 << i;
            }
        }
        for k in 0..n {
            let pivot = b[k * n + k];
            let below = col_nz[k] & !low_mask(k + 1);
            let col_max = bits(below).map(|r| b[r * n + k].abs()).fold(0.0, f64::max);
            if pivot == 0.0 || !pivot.is_finite() || pivot.abs() < PIVOT_THRESHOLD * col_max {
                return None;
            }
            let right = row_nz[k] & !low_mask(k + 1);
            for r in bits(below) {
                let f = b[r * n + k] / pivot;
                b[r * n + k] = f;
                for j in bits(right) {
                    b[r * n + j] -= f * b[k * n + j];
                    col_nz[j] |= 1 << r;
                }
                row_nz[r] |= right;
            }
        }

        let mut lower = SparseRows::with_rows(n);
        let mut upper = SparseRows::with_rows(n);
        let mut diag = Vec::with_capacity(n);
        let total: usize = row_nz.iter().map(|m| m.count_ones() as usize).sum();
        lower.col.reserve(total);
        lower.val.reserve(total);
        upper.col.reserve(total);
        upper.val.reserve(total);
        for (r, &mask) in row_nz.iter().enumerate() {
            lower.start.push(lower.col.len());
            upper.start.push(upper.col.len());
            for c in bits(mask & low_mask(r)) {
                lower.col.push(c);
                lower.val.push(b[r * n + c]);
            }
            for c in bits(mask & !low_mask(r + 1)) {
                upper.col.push(c);
                upper.val.push(b[r * n + c]);
            }
            diag.push(b[r * n + r]);
        }
        lower.start.push(lower.col.len());
        upper.start.push(upper.col.len());
        Some(Self {
            n,
            row_perm: order.clone(),
            col_perm: order,
            diag,
            lower,
            upper,
            norm_1,
        })
    }

    fn factor_dense(mut a: DenseMatrix, norm_1: f64) -> Result<Self, SingularPivot> {
        let n = a.n;
        let mut perm: Vec<usize> = (0..n).collect();
        let data = &mut a.data;
        for k in 0..n {
            let mut pivot_row = k;
            let mut pivot_abs = data[k * n + k].abs();
            for r in (k + 1)..n {
                let v = data[r * n + k].abs();
                if v > pivot_abs {
                    pivot_abs = v;
                    pivot_row = r;
                }
            }
            if pivot_abs == 0.0 || !pivot_abs.is_finite() {
                return Err(SingularPivot { column: k });
            }
            if pivot_row != k {
                let (head, tail) = data.split_at_mut(pivot_row * n);
                head[k * n..(k + 1) * n].swap_with_slice(&mut tail[..n]);
                perm.swap(k, pivot_row);
            }
            let (top, rest) = data.split_at_mut((k + 1) * n);
            let prow = &top[k * n + k..(k + 1) * n];
            let pivot = prow[0];
            for row in rest.chunks_exact_mut(n) {
                if row[k] == 0.0 {
                    continue;
                }
                let factor = row[k] / pivot;
                row[k] = factor;
                for (d, s) in row[k + 1..].iter_mut().zip(&prow[1..]) {
                    *d -= factor * s;
                }
            }
        }
        Ok(Self::from_dense(n, &a.data, perm, (0..n).collect(), norm_1))
    }

    fn from_dense(
        n: usize,
        lu: &[f64],
        row_perm: Vec<usize>,
        col_perm: Vec<usize>,
        norm_1: f64,
    ) -> Self {
        let mut lower = SparseRows::with_rows(n);
        let mut upper = SparseRows::with_rows(n);
        let mut diag = Vec::with_capacity(n);
        for r in 0..n {
            lower.start.push(lower.col.len());
            upper.start.push(upper.col.len());
            for c in 0..n {
                let v = lu[r * n + c];
                if v == 0.0 {
                    continue;
                }
                match c.cmp(&r) {
                    std::cmp::Ordering::Less => {
                        lower.col.push(c);
                        lower.val.push(v);
                    }
                    std::cmp::Ordering::Greater => {
                        upper.col.push(c);
                        upper.val.push(v);
                    }
                    std::cmp::Ordering::Equal => {}
                }
            }
            diag.push(lu[r * n + r]);
        }
        lower.start.push(lower.col.len());
        upper.start.push(upper.col.len());
        Self {
            n,
            row_perm,
            col_perm,
            diag,
            lower,
            upper,
            norm_1,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        let mut work = vec![0.0; self.n];
        self.solve_into(b, &mut work, &mut x);
        x
    }

    fn solve_into(&self, b: &[f64], y: &mut [f64], x: &mut [f64]) {
        for (yi, &p) in y.iter_mut().zip(&self.row_perm) {
            *yi = b[p];
        }
        for r in 0..self.n {
            let (cols, vals) = self.lower.row(r);
            let mut s = 0.0;
            for (&c, &l) in cols.iter().zip(vals) {
                s += l * y[c];
            }
            y[r] -= s;
        }
        for r in (0..self.n).rev() {
            let (cols, vals) = self.upper.row(r);
            let mut s = 0.0;
            for (&c, &u) in cols.iter().zip(vals) {
                s += u * y[c];
            }
            y[r] = (y[r] - s) / self.diag[r];
        }
        for (&p, &yi) in self.col_perm.iter().zip(y.iter()) {
            x[p] = yi;
        }
    }

    /// Solves `A^T x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        let mut work = vec![0.0; self.n];
        self.solve_transpose_into(b, &mut work, &mut x);
        x
    }

    fn solve_transpose_into(&self, b: &[f64], y: &mut [f64], x: &mut [f64]) {
        // A^T = Q U^T L^T P
        for (yi, &p) in y.iter_mut().zip(&self.col_perm) {
            *yi = b[p];
        }
        for r in 0..self.n {
            let yr = y[r] / self.diag[r];
            y[r] = yr;
            let (cols, vals) = self.upper.row(r);
            for (&c, &u) in cols.iter().zip(vals) {
                y[c] -= u * yr;
            }
        }
        for r in (0..self.n).rev() {
            let yr = y[r];
            let (cols, vals) = self.lower.row(r);
            for (&c, &l) in cols.iter().zip(vals) {
                y[c] -= l * yr;
            }
        }
        for (&p, &yi) in self.row_perm.iter().zip(y.iter()) {
            x[p] = yi;
        }
    }

    /// Hager's estimate of `||A||_1 ||A^{-1}||_1`. A lower bound on the true
    /// condition number that is almost always within a small factor of it.
    pub fn condition_estimate(&self) -> f64 {
        if self.n == 0 {
            return 1.0;
        }
        let n = self.n;
        let mut x = vec![1.0 / n as f64; n];
        let mut y = vec![0.0; n];
        let mut z = vec![0.0; n];
        let mut work = vec![0.0; n];
        let mut estimate = 0.0;
        for iter in 0..2 {
            self.solve_into(&x, &mut work, &mut y);
            let norm: f64 = y.iter().map(|v| v.abs()).sum();
            if !norm.is_finite() {
                return f64::INFINITY;
            }
            if iter > 0 && norm <= estimate {
                break;
            }
            estimate = norm;
            for v in y.iter_mut() {
                *v = if *v >= 0.0 { 1.0 } else { -1.0 };
            }
            self.solve_transpose_into(&y, &mut work, &mut z);
            let (j, zmax) = z.iter().enumerate().map(|(i, v)| (i, v.abs())).fold(
                (0, f64::NEG_INFINITY),
                |acc, c| if c.1 > acc.1 { c } else { acc },
            );
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
            if zmax <= ztx {
                break;
            }
            x.iter_mut().for_each(|v| *v = 0.0);
            x[j] = 1.0;
        }
        // Higham's alternating-sign vector guards against Hager's worst cases.
        for (i, v) in x.iter_mut().enumerate() {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            *v = sign * (1.0 + i as f64 / (n.max(2) - 1) as f64);
        }
        self.solve_into(&x, &mut work, &mut y);
        let alt_est = 2.0 * y.iter().map(|v| v.abs()).sum::<f64>() / (3.0 * n as f64);
        estimate.max(alt_est) * self.norm_1
    }
}

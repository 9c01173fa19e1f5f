//! Dense integer matrices and Smith normal form with optional transforms.

use super::CohomologyError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i128>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(k: usize) -> Self {
        let mut m = Self::zeros(k, k);
        for i in 0..k {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<i128>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let r = rows.len();
        let data: Vec<i128> = rows.into_iter().flatten().collect();
        assert_eq!(data.len(), r * cols, "ragged rows");
        IntMatrix { rows: r, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i128 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i128) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: i128) {
        self.data[i * self.cols + j] += v;
    }

    pub fn row(&self, i: usize) -> &[i128] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, CohomologyError> {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b != 0 {
                        let idx = i * out.cols + j;
                        out.data[idx] = a
                            .checked_mul(b)
                            .and_then(|p| out.data[idx].checked_add(p))
                            .ok_or(CohomologyError::Overflow)?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `v · M` for a row vector `v`.
    pub fn left_apply(&self, v: &[i128]) -> Result<Vec<i128>, CohomologyError> {
        assert_eq!(v.len(), self.rows, "shape mismatch");
        let mut out = vec![0i128; self.cols];
        for (i, &x) in v.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                if a != 0 {
                    *o = x
                        .checked_mul(a)
                        .and_then(|p| o.checked_add(p))
                        .ok_or(CohomologyError::Overflow)?;
                }
            }
        }
        Ok(out)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// `row_dst += q * row_src`, touching columns from `from` on.
    fn row_axpy(&mut self, dst: usize, src: usize, q: i128, from: usize) -> Result<(), CohomologyError> {
        let c = self.cols;
        for j in from..c {
            let s = self.data[src * c + j];
            if s != 0 {
                let d = &mut self.data[dst * c + j];
                *d = s
                    .checked_mul(q)
                    .and_then(|p| d.checked_add(p))
                    .ok_or(CohomologyError::Overflow)?;
            }
        }
        Ok(())
    }

    /// `col_dst += q * col_src`, touching rows from `from` on.
    fn col_axpy(&mut self, dst: usize, src: usize, q: i128, from: usize) -> Result<(), CohomologyError> {
        let c = self.cols;
        for i in from..self.rows {
            let s = self.data[i * c + src];
            if s != 0 {
                let d = &mut self.data[i * c + dst];
                *d = s
                    .checked_mul(q)
                    .and_then(|p| d.checked_add(p))
                    .ok_or(CohomologyError::Overflow)?;
            }
        }
        Ok(())
    }

    fn negate_row(&mut self, i: usize) {
        for v in &mut self.data[i * self.cols..(i + 1) * self.cols] {
            *v = -*v;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            self.data[i * self.cols + j] = -self.data[i * self.cols + j];
        }
    }
}

/// `U · M · V = D` with `D` diagonal and `d1 | d2 | ... | d_rank`.
#[derive(Debug, Clone)]
pub struct Smith {
    pub diagonal: Vec<i128>,
    pub u: Option<IntMatrix>,
    pub u_inv: Option<IntMatrix>,
    pub v: Option<IntMatrix>,
    pub v_inv: Option<IntMatrix>,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }
}

struct Tracker {
    u: Option<(IntMatrix, IntMatrix)>,
    v: Option<(IntMatrix, IntMatrix)>,
}

impl Tracker {
    fn row_add(&mut self, dst: usize, src: usize, q: i128) -> Result<(), CohomologyError> {
        if let Some((u, ui)) = &mut self.u {
            u.row_axpy(dst, src, q, 0)?;
            ui.col_axpy(src, dst, -q, 0)?;
        }
        Ok(())
    }

    fn col_add(&mut self, dst: usize, src: usize, q: i128) -> Result<(), CohomologyError> {
        if let Some((v, vi)) = &mut self.v {
            v.col_axpy(dst, src, q, 0)?;
            vi.row_axpy(src, dst, -q, 0)?;
        }
        Ok(())
    }

    fn row_swap(&mut self, a: usize, b: usize) {
        if let Some((u, ui)) = &mut self.u {
            u.swap_rows(a, b);
            ui.swap_cols(a, b);
        }
    }

    fn col_swap(&mut self, a: usize, b: usize) {
        if let Some((v, vi)) = &mut self.v {
            v.swap_cols(a, b);
            vi.swap_rows(a, b);
        }
    }

    fn row_negate(&mut self, i: usize) {
        if let Some((u, ui)) = &mut self.u {
            u.negate_row(i);
            ui.negate_col(i);
        }
    }
}

/// Smith normal form; `rows`/`cols` request the left/right transforms and
/// their inverses.
pub fn smith(m: &IntMatrix, rows: bool, cols: bool) -> Result<Smith, CohomologyError> {
    let mut a = m.clone();
    let (r, c) = (a.rows, a.cols);
    let mut tr = Tracker {
        u: rows.then(|| (IntMatrix::identity(r), IntMatrix::identity(r))),
        v: cols.then(|| (IntMatrix::identity(c), IntMatrix::identity(c))),
    };
    let mut diagonal = Vec::new();
    let mut t = 0;
    while t < r.min(c) {
        // Global minimum of the remaining block keeps entries small.
        let mut best: Option<(usize, usize, i128)> = None;
        'scan: for i in t..r {
            for j in t..c {
                let v = a.get(i, j).abs();
                if v != 0 && best.is_none_or(|b| v < b.2) {
                    best = Some((i, j, v));
                    if v == 1 {
                        break 'scan;
                    }
                }
            }
        }
        let Some((pi, pj, _)) = best else { break };
        a.swap_rows(t, pi);
        tr.row_swap(t, pi);
        a.swap_cols(t, pj);
        tr.col_swap(t, pj);
        loop {
            let p = a.get(t, t);
            let mut clean = true;
            for i in t + 1..r {
                let x = a.get(i, t);
                if x != 0 {
                    let q = x / p;
                    a.row_axpy(i, t, -q, t)?;
                    tr.row_add(i, t, -q)?;
                    clean &= a.get(i, t) == 0;
                }
            }
            for j in t + 1..c {
                let x = a.get(t, j);
                if x != 0 {
                    let q = x / p;
                    a.col_axpy(j, t, -q, t)?;
                    tr.col_add(j, t, -q)?;
                    clean &= a.get(t, j) == 0;
                }
            }
            if !clean {
                // Bring the smallest leftover in row/column t to the pivot.
                let mut best = (t, t, p.abs());
                for i in t + 1..r {
                    let v = a.get(i, t).abs();
                    if v != 0 && v < best.2 {
                        best = (i, t, v);
                    }
                }
                for j in t + 1..c {
                    let v = a.get(t, j).abs();
                    if v != 0 && v < best.2 {
                        best = (t, j, v);
                    }
                }
                a.swap_rows(t, best.0);
                tr.row_swap(t, best.0);
                a.swap_cols(t, best.1);
                tr.col_swap(t, best.1);
                continue;
            }
            if p.abs() != 1 {
                let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| a.get(i, j) % p != 0));
                if let Some(i) = bad {
                    a.row_axpy(t, i, 1, t)?;
                    tr.row_add(t, i, 1)?;
                    continue;
                }
            }
            break;
        }
        if a.get(t, t) < 0 {
            a.negate_row(t);
            tr.row_negate(t);
        }
        diagonal.push(a.get(t, t));
        t += 1;
    }
    let (u, u_inv) = tr.u.map_or((None, None), |(x, y)| (Some(x), Some(y)));
    let (v, v_inv) = tr.v.map_or((None, None), |(x, y)| (Some(x), Some(y)));
    Ok(Smith {
        diagonal,
        u,
        u_inv,
        v,
        v_inv,
    })
}

pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `(g, x, y)` with `a x + b y = g = gcd(a, b)`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// Some `x` with `d x ≡ t (mod m)`, if one exists.
pub fn solve_linear_mod(d: i128, t: i128, m: i128) -> Option<i128> {
    let d = d.rem_euclid(m);
    let t = t.rem_euclid(m);
    let g = gcd(d, m);
    if t % g != 0 {
        return None;
    }
    let (m2, d2, t2) = (m / g, d / g, t / g);
    if m2 == 1 {
        return Some(0);
    }
    let (_, inv, _) = ext_gcd(d2.rem_euclid(m2), m2);
    Some((t2 * inv.rem_euclid(m2)).rem_euclid(m2))
}

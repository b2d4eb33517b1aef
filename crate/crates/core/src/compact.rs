//! Bit-packed arithmetic for GF(2^m) matrices of size at most 8, used by the
//! enumeration oracles. Elements are u16 codes; matrices are column-major.

use crate::field::{gf_inv, gf_mul, gf_sqrt, gf_trace, FieldElement, FieldSpec};
use crate::linalg::Mat;

pub const MAX_N: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Gf {
    pub m: u32,
    pub modulus: u32,
}

impl Gf {
    pub fn from_spec(spec: FieldSpec) -> Option<Gf> {
        match spec {
            FieldSpec::BinaryExt { m, modulus } => Some(Gf { m, modulus }),
            FieldSpec::RatFunc => None,
        }
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec::BinaryExt { m: self.m, modulus: self.modulus }
    }

    pub fn size(&self) -> u32 {
        1 << self.m
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            return 0;
        }
        if self.m == 1 {
            return a & b;
        }
        gf_mul(a, b, self.m, self.modulus)
    }

    pub fn inv(&self, a: u16) -> u16 {
        gf_inv(a, self.m, self.modulus)
    }

    pub fn sqrt(&self, a: u16) -> u16 {
        gf_sqrt(a, self.m, self.modulus)
    }

    pub fn trace(&self, a: u16) -> u16 {
        gf_trace(a, self.m, self.modulus)
    }

    pub fn elem(&self, c: u16) -> FieldElement {
        self.spec().from_code(c as u64)
    }
}

/// Column-major n x n matrix: `c[j][i]` is entry (i, j).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct CMat {
    pub n: usize,
    pub c: [[u16; MAX_N]; MAX_N],
}

/// Vectors of k^n as packed codes: coordinate i occupies bits [m*i, m*(i+1)).
pub type VCode = u32;

#[inline]
pub fn vget(v: VCode, i: usize, m: u32) -> u16 {
    ((v >> (m * i as u32)) & ((1 << m) - 1)) as u16
}

#[inline]
pub fn vset(v: VCode, i: usize, m: u32, x: u16) -> VCode {
    let sh = m * i as u32;
    (v & !(((1 << m) - 1) << sh)) | ((x as u32) << sh)
}

impl CMat {
    pub fn identity(n: usize) -> CMat {
        let mut c = [[0u16; MAX_N]; MAX_N];
        for (i, col) in c.iter_mut().enumerate().take(n) {
            col[i] = 1;
        }
        CMat { n, c }
    }

    pub fn zero(n: usize) -> CMat {
        CMat { n, c: [[0u16; MAX_N]; MAX_N] }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u16 {
        self.c[j][i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: u16) {
        self.c[j][i] = x;
    }

    pub fn from_cols(n: usize, cols: &[VCode], m: u32) -> CMat {
        let mut r = CMat::zero(n);
        for (j, &v) in cols.iter().enumerate() {
            for i in 0..n {
                r.c[j][i] = vget(v, i, m);
            }
        }
        r
    }

    pub fn col_code(&self, j: usize, m: u32) -> VCode {
        let mut v = 0;
        for i in 0..self.n {
            v |= (self.c[j][i] as u32) << (m * i as u32);
        }
        v
    }

    pub fn mul(&self, o: &CMat, gf: &Gf) -> CMat {
        let n = self.n;
        let mut r = CMat::zero(n);
        if gf.m == 1 {
            for j in 0..n {
                let mut col = [0u16; MAX_N];
                for k in 0..n {
                    if o.c[j][k] != 0 {
                        for (x, y) in col.iter_mut().zip(&self.c[k]).take(n) {
                            *x ^= *y;
                        }
                    }
                }
                r.c[j] = col;
            }
            return r;
        }
        for j in 0..n {
            for k in 0..n {
                let b = o.c[j][k];
                if b == 0 {
                    continue;
                }
                for i in 0..n {
                    r.c[j][i] ^= gf.mul(self.c[k][i], b);
                }
            }
        }
        r
    }

    pub fn apply(&self, v: VCode, gf: &Gf) -> VCode {
        let mut out = [0u16; MAX_N];
        for k in 0..self.n {
            let x = vget(v, k, gf.m);
            if x == 0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(&self.c[k]).take(self.n) {
                *o ^= gf.mul(*a, x);
            }
        }
        let mut r = 0;
        for (i, o) in out.iter().enumerate().take(self.n) {
            r |= (*o as u32) << (gf.m * i as u32);
        }
        r
    }

    pub fn add_identity(&self) -> CMat {
        let mut r = *self;
        for i in 0..self.n {
            r.c[i][i] ^= 1;
        }
        r
    }

    pub fn is_identity(&self) -> bool {
        *self == CMat::identity(self.n)
    }

    pub fn transpose(&self) -> CMat {
        let mut r = CMat::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                r.c[i][j] = self.c[j][i];
            }
        }
        r
    }

    pub fn inverse(&self, gf: &Gf) -> Option<CMat> {
        let n = self.n;
        // row-major working copy [A | I]
        let mut a = [[0u16; 2 * MAX_N]; MAX_N];
        for (i, row) in a.iter_mut().enumerate().take(n) {
            for j in 0..n {
                row[j] = self.c[j][i];
            }
            row[n + i] = 1;
        }
        for col in 0..n {
            let p = (col..n).find(|&i| a[i][col] != 0)?;
            a.swap(p, col);
            let inv = gf.inv(a[col][col]);
            for x in a[col].iter_mut().take(2 * n) {
                *x = gf.mul(*x, inv);
            }
            for i in 0..n {
                if i != col && a[i][col] != 0 {
                    let f = a[i][col];
                    let pivot_row = a[col];
                    for (x, y) in a[i].iter_mut().zip(pivot_row.iter()).take(2 * n) {
                        *x ^= gf.mul(f, *y);
                    }
                }
            }
        }
        let mut r = CMat::zero(n);
        for (i, row) in a.iter().enumerate().take(n) {
            for j in 0..n {
                r.c[j][i] = row[n + j];
            }
        }
        Some(r)
    }

    pub fn rank(&self, gf: &Gf) -> usize {
        let n = self.n;
        let mut a: Vec<[u16; MAX_N]> = (0..n).map(|j| self.c[j]).collect();
        let mut rank = 0;
        for i in 0..n {
            let Some(p) = (rank..n).find(|&r| a[r][i] != 0) else { continue };
            a.swap(p, rank);
            let inv = gf.inv(a[rank][i]);
            let piv: [u16; MAX_N] = a[rank].map(|x| gf.mul(x, inv));
            a[rank] = piv;
            for (r, row) in a.iter_mut().enumerate() {
                if r != rank && row[i] != 0 {
                    let f = row[i];
                    for (x, y) in row.iter_mut().zip(piv.iter()) {
                        *x ^= gf.mul(f, *y);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Pack into a u128: entry (i, j) at bit offset m*(j*n + i). Needs n*n*m <= 128.
    pub fn pack(&self, m: u32) -> u128 {
        let mut k = 0u128;
        let mut sh = 0;
        for j in 0..self.n {
            for i in 0..self.n {
                k |= (self.c[j][i] as u128) << sh;
                sh += m;
            }
        }
        k
    }

    pub fn unpack(key: u128, n: usize, m: u32) -> CMat {
        let mut r = CMat::zero(n);
        let mask = (1u128 << m) - 1;
        let mut sh = 0;
        for j in 0..n {
            for i in 0..n {
                r.c[j][i] = ((key >> sh) & mask) as u16;
                sh += m;
            }
        }
        r
    }

    pub fn to_mat(&self, gf: &Gf) -> Mat {
        let spec = gf.spec();
        let mut out = Mat::zeros(spec, self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out[(i, j)] = gf.elem(self.c[j][i]);
            }
        }
        out
    }

    pub fn from_mat(m: &Mat) -> Option<CMat> {
        if !m.is_square() || m.rows() > MAX_N {
            return None;
        }
        let mut r = CMat::zero(m.rows());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                r.c[j][i] = m[(i, j)].code()?;
            }
        }
        Some(r)
    }
}

/// Quadratic form in compact coordinates: `diag[i] = q(e_i)`, `b[i][j] = B(e_i, e_j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CForm {
    pub n: usize,
    pub gf: Gf,
    pub diag: [u16; MAX_N],
    pub b: [[u16; MAX_N]; MAX_N],
}

impl CForm {
    pub fn eval(&self, v: VCode) -> u16 {
        let m = self.gf.m;
        let mut acc = 0u16;
        for i in 0..self.n {
            let xi = vget(v, i, m);
            if xi == 0 {
                continue;
            }
            acc ^= self.gf.mul(self.diag[i], self.gf.mul(xi, xi));
            for j in i + 1..self.n {
                let xj = vget(v, j, m);
                if xj != 0 && self.b[i][j] != 0 {
                    acc ^= self.gf.mul(self.b[i][j], self.gf.mul(xi, xj));
                }
            }
        }
        acc
    }

    /// Coefficients of the functional B(v, .) in the standard basis, as a packed vector.
    pub fn dual(&self, v: VCode) -> VCode {
        let m = self.gf.m;
        let mut out = 0;
        for j in 0..self.n {
            let mut acc = 0u16;
            for i in 0..self.n {
                let xi = vget(v, i, m);
                if xi != 0 && self.b[i][j] != 0 {
                    acc ^= self.gf.mul(xi, self.b[i][j]);
                }
            }
            out = vset(out, j, m, acc);
        }
        out
    }

    pub fn pairing(&self, u: VCode, v: VCode) -> u16 {
        dot(self.dual(u), v, self.n, &self.gf)
    }

    pub fn is_isometry(&self, g: &CMat) -> bool {
        let m = self.gf.m;
        let cols: Vec<VCode> = (0..self.n).map(|j| g.col_code(j, m)).collect();
        for i in 0..self.n {
            if self.eval(cols[i]) != self.diag[i] {
                return false;
            }
            for j in i + 1..self.n {
                if self.pairing(cols[i], cols[j]) != self.b[i][j] {
                    return false;
                }
            }
        }
        g.rank(&self.gf) == self.n
    }

    pub fn vector_count(&self) -> u64 {
        1u64 << (self.gf.m as usize * self.n)
    }
}

#[inline]
pub fn dot(a: VCode, b: VCode, n: usize, gf: &Gf) -> u16 {
    let m = gf.m;
    if m == 1 {
        return ((a & b).count_ones() & 1) as u16;
    }
    let mut acc = 0;
    for i in 0..n {
        acc ^= gf.mul(vget(a, i, m), vget(b, i, m));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pack_round_trip() {
        let gf = Gf { m: 2, modulus: 0b111 };
        let mut a = CMat::identity(3);
        a.set(0, 2, 3);
        a.set(1, 0, 2);
        assert_eq!(CMat::unpack(a.pack(2), 3, 2), a);
        let inv = a.inverse(&gf).unwrap();
        assert!(a.mul(&inv, &gf).is_identity());
    }

    #[test]
    fn apply_matches_mat() {
        let gf = Gf { m: 2, modulus: 0b111 };
        let mut a = CMat::identity(2);
        a.set(0, 1, 2);
        let v = vset(vset(0, 0, 2, 1), 1, 2, 3);
        let w = a.apply(v, &gf);
        // (1 + 2*3, 3) with 2*3 = t*(t+1) = 1
        assert_eq!(vget(w, 0, 2), 0);
        assert_eq!(vget(w, 1, 2), 3);
    }
}

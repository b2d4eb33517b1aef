//! Elements of O(q, k): isometries, transvections, basic null and radical
//! involutions, residual spaces, and exhaustive enumeration for small finite
//! cases.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;

use crate::compact::{dot, CForm, CMat, Gf, VCode};
use crate::error::{check_dim, precondition, Error, Result};
use crate::field::FieldElement;
use crate::linalg::{unit, vec_add, Mat, Subspace, Vector};
use crate::quadspace::QuadForm;

/// Preserves q on basis vectors and their pairwise sums, and is invertible.
pub fn is_isometry(q: &QuadForm, m: &Mat) -> bool {
    let n = q.dim();
    if !m.is_square() || m.rows() != n {
        return false;
    }
    let cols = m.columns();
    for i in 0..n {
        if q.q(&cols[i]) != q.norm(i) {
            return false;
        }
        for j in i + 1..n {
            let s = vec_add(&cols[i], &cols[j]);
            let e = vec_add(&unit(q.spec(), n, i), &unit(q.spec(), n, j));
            if q.q(&s) != q.q(&e) {
                return false;
            }
        }
    }
    m.rank() == n
}

/// Preserves B on basis pairs (the symplectic condition), and is invertible.
pub fn preserves_bilinear(q: &QuadForm, m: &Mat) -> bool {
    let n = q.dim();
    if !m.is_square() || m.rows() != n {
        return false;
    }
    let g = q.gram();
    m.transpose().mul(&g).mul(m) == g && m.rank() == n
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Isometry {
    form: QuadForm,
    matrix: Mat,
}

impl Isometry {
    pub fn new(form: &QuadForm, matrix: Mat) -> Result<Isometry> {
        check_dim(form.dim(), matrix.rows())?;
        if !is_isometry(form, &matrix) {
            return Err(Error::NotAnIsometry(format!("{:?}", matrix)));
        }
        Ok(Isometry { form: form.clone(), matrix })
    }

    pub(crate) fn new_unchecked(form: &QuadForm, matrix: Mat) -> Isometry {
        Isometry { form: form.clone(), matrix }
    }

    pub fn identity(form: &QuadForm) -> Isometry {
        Isometry { form: form.clone(), matrix: Mat::identity(form.spec(), form.dim()) }
    }

    pub fn form(&self) -> &QuadForm {
        &self.form
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.form.dim()
    }

    /// self after other.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        Isometry { form: self.form.clone(), matrix: self.matrix.mul(&other.matrix) }
    }

    pub fn inverse(&self) -> Isometry {
        Isometry { form: self.form.clone(), matrix: self.matrix.inverse().expect("isometries are invertible") }
    }

    pub fn apply(&self, v: &[FieldElement]) -> Vector {
        self.matrix.mul_vec(v)
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }

    pub fn is_involution(&self) -> bool {
        !self.is_identity() && self.matrix.mul(&self.matrix).is_identity()
    }

    /// A vector w with phi(phi(w)) != w, if any.
    pub fn involution_witness(&self) -> Option<Vector> {
        let sq = self.matrix.mul(&self.matrix);
        (0..self.dim()).map(|i| unit(self.form.spec(), self.dim(), i)).find(|e| sq.mul_vec(e) != *e)
    }

    pub fn to_compact(&self) -> Option<CMat> {
        CMat::from_mat(&self.matrix)
    }

    /// Conjugate g phi g^{-1}.
    pub fn conjugate_by(&self, g: &Isometry) -> Isometry {
        g.compose(self).compose(&g.inverse())
    }
}

/// The map z -> z + a B(w, z) w; not validated.
pub fn transvection(q: &QuadForm, w: &[FieldElement], a: FieldElement) -> Mat {
    let spec = q.spec();
    let n = q.dim();
    let bw = q.gram().mul_vec(w);
    let mut m = Mat::identity(spec, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = m[(i, j)] + a * bw[j] * w[i];
        }
    }
    m
}

pub fn orthogonal_transvection(q: &QuadForm, w: &[FieldElement]) -> Result<Isometry> {
    check_dim(q.dim(), w.len())?;
    let norm = q.q(w);
    precondition(!norm.is_zero(), || "orthogonal transvection along an isotropic vector".into())?;
    Ok(Isometry::new_unchecked(q, transvection(q, w, norm.inv())))
}

/// z -> z + B(z, x1) x2 + B(z, x2) x1 for a hyperbolic basis (x1, y1, x2, y2) of P.
/// Fixes x1, x2 and P^perp; sends y1 to y1 + x2 and y2 to y2 + x1.
pub fn basic_null(q: &QuadForm, p: &[Vector; 4]) -> Result<Isometry> {
    let [x1, y1, x2, y2] = p;
    for v in p.iter() {
        check_dim(q.dim(), v.len())?;
    }
    let z = q.spec().zero();
    let o = q.spec().one();
    let expect = [
        (x1, y1, o),
        (x2, y2, o),
        (x1, x2, z),
        (x1, y2, z),
        (y1, x2, z),
        (y1, y2, z),
    ];
    let hyperbolic = p.iter().all(|v| q.q(v).is_zero()) && expect.iter().all(|(a, b, c)| q.b(a, b) == *c);
    precondition(hyperbolic, || "P is not an orthogonal sum of two hyperbolic planes in the given basis".into())?;
    let g = q.gram();
    let (b1, b2) = (g.mul_vec(x1), g.mul_vec(x2));
    let n = q.dim();
    let mut m = Mat::identity(q.spec(), n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = m[(i, j)] + b1[j] * x2[i] + b2[j] * x1[i];
        }
    }
    Ok(Isometry::new_unchecked(q, m))
}

/// The basic null on the first two hyperbolic planes of a signature-basis form.
pub fn canonical_basic_null(q: &QuadForm) -> Result<Isometry> {
    precondition(q.dim() >= 4, || "needs two hyperbolic planes".into())?;
    let e = |i| unit(q.spec(), q.dim(), i);
    basic_null(q, &[e(0), e(1), e(2), e(3)])
}

/// Swaps g and g' (both radical, independent, equal norms) and fixes a complement.
pub fn basic_radical(q: &QuadForm, g: &[FieldElement], g2: &[FieldElement]) -> Result<Isometry> {
    check_dim(q.dim(), g.len())?;
    check_dim(q.dim(), g2.len())?;
    let spec = q.spec();
    let n = q.dim();
    let rad = q.radical();
    precondition(rad.contains(g) && rad.contains(g2), || "vectors must lie in the radical".into())?;
    let span = Subspace::span(spec, n, &[g.to_vec(), g2.to_vec()]);
    precondition(span.dim() == 2, || "vectors must be independent".into())?;
    precondition(q.q(g) == q.q(g2), || "norms differ".into())?;
    // functional l with l(g) = l(g') = 1 vanishing on the standard complement
    let mut basis = vec![g.to_vec(), g2.to_vec()];
    basis.extend(span.complement_basis());
    let bm = Mat::from_cols(spec, n, &basis);
    let binv = bm.inverse().expect("basis");
    let mut ell = vec![spec.zero(); n];
    for (j, x) in ell.iter_mut().enumerate() {
        *x = binv[(0, j)] + binv[(1, j)];
    }
    let d = vec_add(g, g2);
    let mut m = Mat::identity(spec, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = m[(i, j)] + d[i] * ell[j];
        }
    }
    Ok(Isometry::new_unchecked(q, m))
}

/// Image of phi + id.
pub fn residual_space(phi: &Isometry) -> Subspace {
    let n = phi.dim();
    phi.matrix().add(&Mat::identity(phi.form().spec(), n)).column_space()
}

pub fn residue(phi: &Isometry) -> usize {
    residual_space(phi).dim()
}

#[derive(Clone, Copy, Debug)]
pub struct Budget {
    /// Upper bound on n * log2|k|.
    pub max_bits: u32,
    /// Upper bound on the number of group elements kept.
    pub max_elements: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_bits: 14, max_elements: 20_000_000 }
    }
}

/// An enumerated finite subgroup of O(q, k). Elements are packed matrices kept
/// sorted, so lookup is a binary search and the order is canonical.
#[derive(Clone, Debug)]
pub struct GroupTable {
    form: QuadForm,
    cform: CForm,
    keys: Vec<u128>,
}

impl GroupTable {
    pub(crate) fn from_keys(form: &QuadForm, mut keys: Vec<u128>) -> GroupTable {
        keys.sort_unstable();
        keys.dedup();
        GroupTable { form: form.clone(), cform: form.to_compact().expect("finite field, small dim"), keys }
    }

    pub fn form(&self) -> &QuadForm {
        &self.form
    }

    pub fn cform(&self) -> &CForm {
        &self.cform
    }

    pub fn gf(&self) -> Gf {
        self.cform.gf
    }

    pub fn n(&self) -> usize {
        self.cform.n
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn keys(&self) -> &[u128] {
        &self.keys
    }

    pub fn get(&self, i: usize) -> CMat {
        CMat::unpack(self.keys[i], self.n(), self.gf().m)
    }

    pub fn key(&self, g: &CMat) -> u128 {
        g.pack(self.gf().m)
    }

    pub fn index_of(&self, g: &CMat) -> Option<usize> {
        self.keys.binary_search(&self.key(g)).ok()
    }

    pub fn contains(&self, g: &CMat) -> bool {
        self.index_of(g).is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = CMat> + '_ {
        let (n, m) = (self.n(), self.gf().m);
        self.keys.iter().map(move |&k| CMat::unpack(k, n, m))
    }

    pub fn isometry(&self, g: &CMat) -> Isometry {
        Isometry::new_unchecked(&self.form, g.to_mat(&self.gf()))
    }

    /// Newline-delimited row-major element codes, one matrix per line.
    pub fn export_lines(&self) -> String {
        let mut out = String::new();
        for g in self.iter() {
            let mut row = Vec::new();
            for i in 0..g.n {
                for j in 0..g.n {
                    row.push(g.get(i, j).to_string());
                }
            }
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

struct Search<'a> {
    cf: &'a CForm,
    /// candidate images for each basis vector
    levels: Vec<Vec<VCode>>,
    dual: Vec<VCode>,
    count: &'a AtomicU64,
    abort: &'a AtomicBool,
    cap: u64,
}

impl Search<'_> {
    /// Reduce v against an echelon list; zero means dependent.
    fn reduce(&self, mut v: VCode, ech: &[(usize, VCode)]) -> VCode {
        let gf = &self.cf.gf;
        let m = gf.m;
        for &(p, row) in ech {
            let f = crate::compact::vget(v, p, m);
            if f != 0 {
                v ^= scale_code(row, f, self.cf.n, gf);
            }
        }
        v
    }

    fn push_echelon(&self, ech: &mut Vec<(usize, VCode)>, v: VCode) {
        let gf = &self.cf.gf;
        let m = gf.m;
        let p = (0..self.cf.n).find(|&i| crate::compact::vget(v, i, m) != 0).expect("nonzero");
        let inv = gf.inv(crate::compact::vget(v, p, m));
        let v = scale_code(v, inv, self.cf.n, gf);
        // keep rows reduced at the new pivot
        for (_, row) in ech.iter_mut() {
            let f = crate::compact::vget(*row, p, m);
            if f != 0 {
                *row ^= scale_code(v, f, self.cf.n, gf);
            }
        }
        ech.push((p, v));
    }

    fn extend(&self, images: &mut Vec<VCode>, ech: &mut Vec<(usize, VCode)>, out: &mut Vec<u128>) {
        if self.abort.load(Ordering::Relaxed) {
            return;
        }
        let n = self.cf.n;
        let k = images.len();
        if k == n {
            let g = CMat::from_cols(n, images, self.cf.gf.m);
            out.push(g.pack(self.cf.gf.m));
            if self.count.fetch_add(1, Ordering::Relaxed) + 1 > self.cap {
                self.abort.store(true, Ordering::Relaxed);
            }
            return;
        }
        for &v in &self.levels[k] {
            if (0..k).any(|j| dot(self.dual[images[j] as usize], v, n, &self.cf.gf) != self.cf.b[j][k]) {
                continue;
            }
            let r = self.reduce(v, ech);
            if r == 0 {
                continue;
            }
            let mut e2 = ech.clone();
            self.push_echelon(&mut e2, r);
            images.push(v);
            self.extend(images, &mut e2, out);
            images.pop();
        }
    }
}

pub(crate) fn scale_code(v: VCode, c: u16, n: usize, gf: &Gf) -> VCode {
    if c == 1 {
        return v;
    }
    let m = gf.m;
    let mut out = 0;
    for i in 0..n {
        out = crate::compact::vset(out, i, m, gf.mul(crate::compact::vget(v, i, m), c));
    }
    out
}

pub fn enumerate_group(q: &QuadForm) -> Result<GroupTable> {
    enumerate_group_with(q, &Budget::default())
}

/// All of O(q, k), by backtracking over images of basis vectors. Each new image
/// must have the right norm, the right pairings with earlier images, and be
/// independent of them.
pub fn enumerate_group_with(q: &QuadForm, budget: &Budget) -> Result<GroupTable> {
    backtrack(q, budget, false)
}

/// All invertible maps preserving B alone (the symplectic group of the polar form).
pub fn enumerate_symplectic(q: &QuadForm) -> Result<GroupTable> {
    backtrack(q, &Budget::default(), true)
}

fn backtrack(q: &QuadForm, budget: &Budget, symplectic: bool) -> Result<GroupTable> {
    let spec = q.spec();
    let bits = spec.bits().ok_or_else(|| Error::Precondition("enumeration needs a finite field".into()))?;
    let n = q.dim();
    if n * bits as usize > budget.max_bits as usize {
        return Err(Error::BudgetExceeded(format!(
            "n*log2|k| = {} exceeds {}",
            n * bits as usize,
            budget.max_bits
        )));
    }
    if n == 0 {
        return Ok(GroupTable::from_keys(q, vec![0]));
    }
    let cf = q.to_compact().ok_or_else(|| Error::Precondition("dimension above 8".into()))?;
    let total = cf.vector_count() as usize;
    let mut by_norm = vec![Vec::new(); cf.gf.size() as usize];
    let mut dual = vec![0; total];
    for v in 0..total as VCode {
        dual[v as usize] = cf.dual(v);
        if v != 0 {
            by_norm[cf.eval(v) as usize].push(v);
        }
    }
    let levels: Vec<Vec<VCode>> = if symplectic {
        vec![(1..total as VCode).collect(); n]
    } else {
        (0..n).map(|k| by_norm[cf.diag[k] as usize].clone()).collect()
    };
    let count = AtomicU64::new(0);
    let abort = AtomicBool::new(false);
    let search = Search { cf: &cf, levels, dual, count: &count, abort: &abort, cap: budget.max_elements };
    let first: Vec<VCode> = search.levels[0].clone();
    let parts: Vec<Vec<u128>> = first
        .par_iter()
        .map(|&v| {
            let mut out = Vec::new();
            let mut ech = Vec::new();
            search.push_echelon(&mut ech, v);
            let mut images = vec![v];
            search.extend(&mut images, &mut ech, &mut out);
            out
        })
        .collect();
    if abort.load(Ordering::Relaxed) {
        return Err(Error::BudgetExceeded(format!("more than {} group elements", budget.max_elements)));
    }
    let keys: Vec<u128> = parts.into_iter().flatten().collect();
    Ok(GroupTable::from_keys(q, keys))
}

/// Every phi in the table with phi^2 = id and phi != id.
pub fn involutions_of(table: &GroupTable) -> Vec<CMat> {
    let gf = table.gf();
    table.iter().filter(|g| !g.is_identity() && g.mul(g, &gf).is_identity()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    fn form(spec: FieldSpec, pairs: &[(u64, u64)], diag: &[u64]) -> QuadForm {
        let p: Vec<_> = pairs.iter().map(|&(a, b)| (spec.from_code(a), spec.from_code(b))).collect();
        let d: Vec<_> = diag.iter().map(|&c| spec.from_code(c)).collect();
        QuadForm::from_signature(spec, &p, &d)
    }

    #[test]
    fn isometry_examples() {
        let k = FieldSpec::gf2();
        let (o, z) = (k.one(), k.zero());
        let h = form(k, &[(0, 0)], &[]);
        assert!(is_isometry(&h, &Mat::identity(k, 2)));
        assert!(is_isometry(&h, &Mat::from_rows(k, &[vec![z, o], vec![o, z]])));
        let q = form(k, &[(1, 1)], &[]);
        // x -> x, y -> x + y
        assert!(is_isometry(&q, &Mat::from_rows(k, &[vec![o, o], vec![z, o]])));
    }

    #[test]
    fn transvection_examples() {
        let k = FieldSpec::gf2();
        let (o, z) = (k.one(), k.zero());
        let q = form(k, &[(1, 1)], &[]);
        assert!(transvection(&q, &[o, z], z).is_identity());
        let t = orthogonal_transvection(&q, &[o, z]).unwrap();
        assert_eq!(t.apply(&[z, o]), vec![o, o]);
        assert!(t.is_involution());
        assert_eq!(residue(&t), 1);
        assert!(orthogonal_transvection(&form(k, &[(0, 0)], &[]), &[o, z]).is_err());
        let d = form(k, &[(1, 1)], &[1]);
        assert!(transvection(&d, &[z, z, o], o).is_identity());
    }

    #[test]
    fn basic_null_examples() {
        let k = FieldSpec::gf2();
        let q = form(k, &[(0, 0), (0, 0)], &[1]);
        let eta = canonical_basic_null(&q).unwrap();
        assert!(is_isometry(&q, eta.matrix()));
        assert!(eta.is_involution());
        let r = residual_space(&eta);
        assert_eq!(r.dim(), 2);
        assert!(r.basis().iter().all(|v| q.q(v).is_zero()));
        let g = unit(k, 5, 4);
        assert_eq!(eta.apply(&g), g);
    }

    #[test]
    fn basic_radical_examples() {
        let k = FieldSpec::gf2();
        let e = |n, i| unit(k, n, i);
        let q = form(k, &[], &[0, 0]);
        let rho = basic_radical(&q, &e(2, 0), &e(2, 1)).unwrap();
        assert!(rho.is_involution() && is_isometry(&q, rho.matrix()));
        let q = form(k, &[], &[1, 1]);
        assert!(basic_radical(&q, &e(2, 0), &e(2, 1)).is_ok());
        let q = form(k, &[], &[1, 0]);
        assert!(basic_radical(&q, &e(2, 0), &e(2, 1)).is_err());
    }

    #[test]
    fn small_group_orders() {
        let k = FieldSpec::gf2();
        assert_eq!(enumerate_group(&form(k, &[(0, 0)], &[])).unwrap().len(), 2);
        assert_eq!(enumerate_group(&form(k, &[(1, 1)], &[])).unwrap().len(), 6);
        assert_eq!(enumerate_group(&form(k, &[(0, 0), (0, 0)], &[])).unwrap().len(), 72);
    }

    #[test]
    fn involution_counts() {
        let k = FieldSpec::gf2();
        assert_eq!(involutions_of(&enumerate_group(&form(k, &[(0, 0)], &[])).unwrap()).len(), 1);
        assert_eq!(involutions_of(&enumerate_group(&form(k, &[(1, 1)], &[])).unwrap()).len(), 3);
        assert_eq!(involutions_of(&enumerate_group(&form(k, &[], &[0])).unwrap()).len(), 0);
    }

    #[test]
    fn symplectic_orders() {
        let k = FieldSpec::gf2();
        // Sp(2,2) = SL(2,2) has order 6, Sp(4,2) has order 720
        assert_eq!(enumerate_symplectic(&form(k, &[(0, 0)], &[])).unwrap().len(), 6);
        assert_eq!(enumerate_symplectic(&form(k, &[(1, 0), (0, 0)], &[])).unwrap().len(), 720);
    }

    #[test]
    fn budget_is_enforced() {
        let k = FieldSpec::gf16();
        let q = form(k, &[(0, 0), (0, 0)], &[]);
        assert!(matches!(enumerate_group(&q), Err(Error::BudgetExceeded(_))));
        let tight = Budget { max_bits: 14, max_elements: 10 };
        assert!(matches!(
            enumerate_group_with(&form(FieldSpec::gf2(), &[(0, 0), (0, 0)], &[]), &tight),
            Err(Error::BudgetExceeded(_))
        ));
    }
}

//! Fixed-point groups of conjugation by an involution phi, i.e. centralizers
//! C(phi) = { g : phi g phi^{-1} = g }. Brute force over a group table, plus
//! the block structures for radical involutions on totally singular spaces
//! and for transvection-product involutions on nonsingular spaces.

use serde::Serialize;

use crate::compact::CMat;
use crate::error::{check_dim, precondition, Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::involutions::oracle::centralizer_of;
use crate::involutions::{classify, transvection_factorization, InvolutionKind, Triple};
use crate::linalg::{unit, vec_add, vec_scale, Mat, Subspace, Vector};
use crate::orthogroup::{enumerate_group, is_isometry, preserves_bilinear, GroupTable, Isometry};
use crate::quadspace::{symplectic_basis, QuadForm};

#[derive(Clone, Debug)]
pub struct FixedPointGroup {
    pub table: GroupTable,
    pub involution: Isometry,
}

pub fn centralizer(table: &GroupTable, phi: &Isometry) -> Result<FixedPointGroup> {
    let c = phi.to_compact().ok_or(Error::NotInTable)?;
    if phi.form() != table.form() || !table.contains(&c) {
        return Err(Error::NotInTable);
    }
    let gf = table.gf();
    let keys = centralizer_of(table, &c).iter().map(|g| g.pack(gf.m)).collect();
    Ok(FixedPointGroup { table: GroupTable::from_keys(table.form(), keys), involution: phi.clone() })
}

impl FixedPointGroup {
    pub fn order(&self) -> u64 {
        self.table.len() as u64
    }

    /// Every element commutes with the involution and products stay inside.
    /// Closure is checked on all pairs up to 4096 elements, otherwise against
    /// the first 64.
    pub fn is_closed_subgroup(&self) -> bool {
        let gf = self.table.gf();
        let Some(phi) = self.involution.to_compact() else {
            return false;
        };
        let elems: Vec<CMat> = self.table.iter().collect();
        if !elems.iter().all(|g| g.mul(&phi, &gf) == phi.mul(g, &gf)) {
            return false;
        }
        let left = if elems.len() <= 4096 { elems.len() } else { 64 };
        elems[..left].iter().all(|a| elems.iter().all(|b| self.table.contains(&a.mul(b, &gf))))
    }

    pub fn matrices(&self) -> Vec<Mat> {
        let gf = self.table.gf();
        self.table.iter().map(|g| g.to_mat(&gf)).collect()
    }
}

/// A map A from span(V) to span(U), as the matrix with (i, j) entry the
/// u_i-coefficient of A v_j.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AGroupElement {
    pub a: Mat,
}

/// The additive group { A : q(Av) = B(v, Av) } for a totally singular U with
/// dual basis V. Over a finite field the elements are listed; over GF(2)(t)
/// only membership is available.
#[derive(Clone, Debug)]
pub struct AGroup {
    spec: FieldSpec,
    norms: Vec<FieldElement>,
    elements: Option<Vec<AGroupElement>>,
}

pub fn a_group(q: &QuadForm, u: &[Vector], v: &[Vector]) -> Result<AGroup> {
    check_dim(u.len(), v.len())?;
    for w in u.iter().chain(v) {
        check_dim(q.dim(), w.len())?;
    }
    let spec = q.spec();
    for (i, a) in u.iter().enumerate() {
        for (j, b) in u.iter().enumerate() {
            precondition(q.b(a, b).is_zero(), || "U is not totally singular".into())?;
            let want = if i == j { spec.one() } else { spec.zero() };
            precondition(q.b(a, &v[j]) == want, || format!("B(u_{i}, v_{j}) is not {want}"))?;
        }
    }
    let norms: Vec<FieldElement> = u.iter().map(|x| q.q(x)).collect();
    Ok(a_group_from_norms(spec, &norms))
}

/// The A-group for q_U = <norms> in a dual pair of bases.
pub fn a_group_from_norms(spec: FieldSpec, norms: &[FieldElement]) -> AGroup {
    let elements = spec.is_finite().then(|| enumerate_a(spec, norms));
    AGroup { spec, norms: norms.to_vec(), elements }
}

/// Symmetric A whose diagonal solves a_jj = sum_i a_ij^2 q(u_i), one
/// coordinate at a time.
fn enumerate_a(spec: FieldSpec, norms: &[FieldElement]) -> Vec<AGroupElement> {
    let l = norms.len();
    let elems = spec.enumerate().expect("finite");
    let pairs: Vec<(usize, usize)> = (0..l).flat_map(|i| (i + 1..l).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    let mut digits = vec![0usize; pairs.len()];
    loop {
        let mut a = Mat::zeros(spec, l, l);
        for (d, &(i, j)) in digits.iter().zip(&pairs) {
            a[(i, j)] = elems[*d];
            a[(j, i)] = elems[*d];
        }
        let mut diag: Vec<Vec<FieldElement>> = Vec::with_capacity(l);
        for j in 0..l {
            let rest = (0..l).filter(|&i| i != j).fold(spec.zero(), |s, i| s + a[(i, j)].square() * norms[i]);
            diag.push(elems.iter().copied().filter(|&x| x == x.square() * norms[j] + rest).collect());
        }
        let mut idx = vec![0usize; l];
        if diag.iter().all(|d| !d.is_empty()) {
            loop {
                let mut m = a.clone();
                for j in 0..l {
                    m[(j, j)] = diag[j][idx[j]];
                }
                out.push(AGroupElement { a: m });
                let mut p = 0;
                while p < l {
                    idx[p] += 1;
                    if idx[p] < diag[p].len() {
                        break;
                    }
                    idx[p] = 0;
                    p += 1;
                }
                if p == l {
                    break;
                }
            }
        }
        let mut p = 0;
        while p < digits.len() {
            digits[p] += 1;
            if digits[p] < elems.len() {
                break;
            }
            digits[p] = 0;
            p += 1;
        }
        if p == digits.len() {
            return out;
        }
    }
}

impl AGroup {
    pub fn dim(&self) -> usize {
        self.norms.len()
    }

    pub fn norms(&self) -> &[FieldElement] {
        &self.norms
    }

    pub fn elements(&self) -> Option<&[AGroupElement]> {
        self.elements.as_deref()
    }

    pub fn order(&self) -> Option<u64> {
        self.elements.as_ref().map(|e| e.len() as u64)
    }

    fn q_u(&self, w: &[FieldElement]) -> FieldElement {
        w.iter().zip(&self.norms).fold(self.spec.zero(), |s, (c, n)| s + c.square() * *n)
    }

    /// q(Av) = B(v, Av) on every basis vector and every sum of two.
    pub fn contains(&self, a: &Mat) -> bool {
        let l = self.dim();
        if a.rows() != l || a.cols() != l {
            return false;
        }
        let check = |v: &Vector| {
            let av = a.mul_vec(v);
            let b = v.iter().zip(&av).fold(self.spec.zero(), |s, (x, y)| s + *x * *y);
            self.q_u(&av) == b
        };
        (0..l).all(|i| {
            let ei = unit(self.spec, l, i);
            check(&ei) && (i + 1..l).all(|j| check(&vec_add(&ei, &unit(self.spec, l, j))))
        })
    }

    /// The norm form on U in the u-basis.
    pub fn form(&self) -> QuadForm {
        QuadForm::from_signature(self.spec, &[], &self.norms)
    }
}

/// (phi_U^{-1})^T: the map on V with B(phi_U u, phi_U^* v) = B(u, v) in dual bases.
pub fn star_map(phi_u: &Mat) -> Result<Mat> {
    phi_u
        .inverse()
        .map(|m| m.transpose())
        .ok_or_else(|| Error::Precondition("star map of a singular matrix".into()))
}

/// phi_U A phi_U^{-*}, which is phi_U A phi_U^T.
pub fn conjugation_action(group: &AGroup, phi_u: &Mat, a: &AGroupElement) -> Result<AGroupElement> {
    precondition(is_isometry(&group.form(), phi_u), || "phi_U is not in O(q_U)".into())?;
    precondition(group.contains(&a.a), || "A is not in the A-group".into())?;
    Ok(AGroupElement { a: phi_u.mul(&a.a).mul(&phi_u.transpose()) })
}

fn kind_is(phi: &Isometry) -> Result<InvolutionKind> {
    Ok(classify(phi)?.kind)
}

/// Fixed-point structure of a radical involution rho on W = rad(W). Basis
/// columns: e_i = g_i + rho(g_i), a complement H of span(e) in Fix(rho), then
/// the g_i. Every element of C(rho) has the block form
/// [[d11, d12, d13], [0, d22, d23], [0, 0, d11]] and
/// C(rho) = M x| M' with M given by the stabilizer of H in O(q_{H u G}) and
/// M' = { [[1, a, b], [0, 1, 0], [0, 0, 1]] } of order |k|^{n(s-n)}.
#[derive(Clone, Debug)]
pub struct RadicalStructure {
    pub form: QuadForm,
    pub rho: Isometry,
    pub basis: Mat,
    pub n: usize,
    pub s: usize,
    pub hg_form: QuadForm,
    /// |O(q_{H u G})|
    pub hg_group_order: u64,
    /// |O(q_{H u G}, H)|, the stabilizer of span(H)
    pub stabilizer_order: u64,
    pub mat_dims: (usize, usize),
    pub predicted_order: u64,
    basis_inv: Mat,
}

#[derive(Clone, Debug, Serialize)]
pub struct RadicalReport {
    pub n: usize,
    pub s: usize,
    pub hg_form: String,
    pub hg_group_order: u64,
    pub stabilizer_order: u64,
    pub mat_dims: (usize, usize),
    pub predicted_order: u64,
}

pub fn radical_fixed_structure(q: &QuadForm, rho: &Isometry) -> Result<RadicalStructure> {
    precondition(rho.form() == q, || "involution on a different space".into())?;
    precondition(q.is_totally_singular(), || "the space is not totally singular".into())?;
    if !matches!(kind_is(rho)?, InvolutionKind::Radical { .. }) {
        return Err(Error::TypeMismatch("not a radical involution".into()));
    }
    let spec = q.spec();
    let s = q.dim();
    let m1 = rho.matrix().add(&Mat::identity(spec, s));
    let e: Vec<Vector> = m1.column_space().basis().to_vec();
    let n = e.len();
    let g: Vec<Vector> = e.iter().map(|x| m1.solve(x).expect("residual vector")).collect();
    let mut span = Subspace::span(spec, s, &e);
    let mut h = Vec::new();
    for f in m1.kernel() {
        let next = span.sum(&Subspace::span(spec, s, std::slice::from_ref(&f)));
        if next.dim() > span.dim() {
            span = next;
            h.push(f);
        }
    }
    let mut cols = e.clone();
    cols.extend(h.iter().cloned());
    cols.extend(g.iter().cloned());
    let basis = Mat::from_cols(spec, s, &cols);
    let basis_inv = basis.inverse().ok_or_else(|| Error::Precondition("adapted basis is singular".into()))?;
    let hg: Vec<Vector> = h.iter().chain(&g).cloned().collect();
    let hg_form = q.restrict(&hg);
    let table = enumerate_group(&hg_form)?;
    let hd = h.len();
    let stabilizer_order = table
        .iter()
        .filter(|m| (0..hd).all(|j| (hd..hd + n).all(|i| m.get(i, j) == 0)))
        .count() as u64;
    let order = spec.order().ok_or_else(|| Error::Precondition("needs a finite field".into()))?;
    let mat = order
        .checked_pow((n * (s - n)) as u32)
        .ok_or_else(|| Error::BudgetExceeded("predicted order overflows".into()))?;
    Ok(RadicalStructure {
        form: q.clone(),
        rho: rho.clone(),
        basis,
        n,
        s,
        hg_form,
        hg_group_order: table.len() as u64,
        stabilizer_order,
        mat_dims: (n, s - n),
        predicted_order: stabilizer_order * mat,
        basis_inv,
    })
}

impl RadicalStructure {
    pub fn report(&self) -> RadicalReport {
        RadicalReport {
            n: self.n,
            s: self.s,
            hg_form: self.hg_form.to_string(),
            hg_group_order: self.hg_group_order,
            stabilizer_order: self.stabilizer_order,
            mat_dims: self.mat_dims,
            predicted_order: self.predicted_order,
        }
    }

    pub fn to_block(&self, g: &Mat) -> Mat {
        self.basis_inv.mul(g).mul(&self.basis)
    }

    pub fn from_block(&self, g: &Mat) -> Mat {
        self.basis.mul(g).mul(&self.basis_inv)
    }

    fn ranges(&self) -> [Vec<usize>; 3] {
        let (n, s) = (self.n, self.s);
        [(0..n).collect(), (n..s - n).collect(), (s - n..s).collect()]
    }

    /// Zero lower blocks and equal (E, E) and (G, G) blocks.
    pub fn block_form_holds(&self, g: &Mat) -> bool {
        let b = self.to_block(g);
        let [e, h, gg] = self.ranges();
        b.select(&h, &e).is_zero()
            && b.select(&gg, &e).is_zero()
            && b.select(&gg, &h).is_zero()
            && b.select(&e, &e) == b.select(&gg, &gg)
    }

    /// g = M_g M'_g with M_g = diag(d11, [[d22, d23], [0, d11]]).
    pub fn split(&self, g: &Mat) -> Result<(Mat, Mat)> {
        let b = self.to_block(g);
        let mut m = b.clone();
        let [e, h, gg] = self.ranges();
        for &i in &e {
            for &j in h.iter().chain(&gg) {
                m[(i, j)] = self.form.spec().zero();
            }
        }
        let minv = m.inverse().ok_or_else(|| Error::Precondition("singular block".into()))?;
        let mp = minv.mul(&b);
        Ok((self.from_block(&m), self.from_block(&mp)))
    }

    pub fn is_m_prime(&self, g: &Mat) -> bool {
        let b = self.to_block(g);
        let [e, h, gg] = self.ranges();
        let rest: Vec<usize> = h.iter().chain(&gg).copied().collect();
        b.select(&e, &e).is_identity() && b.select(&rest, &rest).is_identity() && b.select(&rest, &e).is_zero()
    }

    pub fn is_m(&self, g: &Mat) -> bool {
        let b = self.to_block(g);
        let [e, h, gg] = self.ranges();
        let rest: Vec<usize> = h.iter().chain(&gg).copied().collect();
        if !self.block_form_holds(g) || !b.select(&e, &rest).is_zero() {
            return false;
        }
        is_isometry(&self.hg_form, &b.select(&rest, &rest))
    }

    /// All of M', in original coordinates.
    pub fn m_prime_elements(&self) -> Result<Vec<Mat>> {
        let spec = self.form.spec();
        let elems = spec.enumerate()?;
        let (n, rest) = self.mat_dims;
        let count = (elems.len() as u64)
            .checked_pow((n * rest) as u32)
            .filter(|&c| c <= 1 << 20)
            .ok_or_else(|| Error::BudgetExceeded("M' too large to list".into()))?;
        let mut out = Vec::with_capacity(count as usize);
        for mut code in 0..count {
            let mut b = Mat::identity(spec, self.s);
            for i in 0..n {
                for j in n..self.s {
                    b[(i, j)] = elems[(code % elems.len() as u64) as usize];
                    code /= elems.len() as u64;
                }
            }
            out.push(self.from_block(&b));
        }
        Ok(out)
    }

    /// c M' c^{-1} lies in M' for every listed c.
    pub fn m_prime_normal(&self, elements: &[Mat]) -> Result<bool> {
        let mp = self.m_prime_elements()?;
        Ok(elements.iter().all(|c| {
            let ci = c.inverse().expect("group element");
            mp.iter().all(|m| self.is_m_prime(&c.mul(m).mul(&ci)))
        }))
    }
}

/// Fixed-point structure of a transvection-product involution tau on a
/// nonsingular space. U' spans the residual space with its isotropic part
/// first; V' is a dual basis, totally singular, with q(v'_i) = 0 on the
/// isotropic indices; X = x_1..x_k, y_1..y_k is a symplectic basis of the
/// orthogonal complement. The ordered basis is U_is, U_an, X, V_an, V_is.
#[derive(Clone, Debug)]
pub struct DiagonalStructure {
    pub form: QuadForm,
    pub tau: Isometry,
    pub l: usize,
    pub m: usize,
    pub k: usize,
    pub u: Vec<Vector>,
    /// dual to u, same index order
    pub v: Vec<Vector>,
    pub x: Vec<Vector>,
    pub basis: Mat,
    pub q_u: QuadForm,
    pub q_uan_x: QuadForm,
    pub o_u_order: u64,
    /// (i, j) entry: u'_i-coefficient of (tau + 1) v'_j
    pub n_matrix: Mat,
    /// |{ phi_U in O(q_U) : phi_U N phi_U^T = N }|
    pub o_u_fix_order: u64,
    pub o_uan_x_order: u64,
    pub a_group: AGroup,
    /// |k|^{2mk}: free (U_is, X) blocks of the C-part
    pub extra_factor: u64,
    ordered_form: QuadForm,
    basis_inv: Mat,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagonalReport {
    pub l: usize,
    pub m: usize,
    pub x_dim: usize,
    pub q_u: String,
    pub q_uan_x: String,
    pub o_u_order: u64,
    pub o_u_fix_order: u64,
    pub o_uan_x_order: u64,
    pub a_group_order: u64,
    pub predicted_order: u64,
    pub extra_factor: u64,
    pub corrected_order: u64,
}

/// Kernel of the additive map c -> sum c_i^2 norms_i, via square-class coordinates.
fn norm_kernel(spec: FieldSpec, norms: &[FieldElement]) -> Vec<Vector> {
    let l = norms.len();
    if l == 0 {
        return vec![];
    }
    let coords: Vec<(FieldElement, FieldElement)> = norms.iter().map(|x| x.square_class_coordinates()).collect();
    let rows = vec![coords.iter().map(|c| c.0).collect::<Vector>(), coords.iter().map(|c| c.1).collect()];
    Mat::from_rows(spec, &rows).kernel()
}

fn combine(spec: FieldSpec, n: usize, coeffs: &[FieldElement], basis: &[Vector]) -> Vector {
    let mut v = vec![spec.zero(); n];
    for (c, b) in coeffs.iter().zip(basis) {
        if !c.is_zero() {
            v = vec_add(&v, &vec_scale(*c, b));
        }
    }
    v
}

pub fn diagonal_fixed_structure(q: &QuadForm, tau: &Isometry) -> Result<DiagonalStructure> {
    precondition(tau.form() == q, || "involution on a different space".into())?;
    precondition(q.is_nonsingular(), || "the space is not nonsingular".into())?;
    match kind_is(tau)? {
        InvolutionKind::Diagonal { .. } | InvolutionKind::Hyperbolic { .. } => {}
        _ => return Err(Error::TypeMismatch("not a transvection-product involution".into())),
    }
    let spec = q.spec();
    let n = q.dim();
    let r_basis: Vec<Vector> = tau.matrix().add(&Mat::identity(spec, n)).column_space().basis().to_vec();
    let l = r_basis.len();
    let norms: Vec<FieldElement> = r_basis.iter().map(|w| q.q(w)).collect();
    let ker = norm_kernel(spec, &norms);
    let m = ker.len();
    let mut coeffs = ker.clone();
    coeffs.extend(Subspace::span(spec, l, &ker).complement_basis());
    let u: Vec<Vector> = coeffs.iter().map(|c| combine(spec, n, c, &r_basis)).collect();
    let v = crate::quadspace::nonsingular_completion(q, &u)?;
    let g = q.gram();
    let rows: Vec<Vector> = u.iter().chain(&v).map(|w| g.mul_vec(w)).collect();
    let perp = if rows.is_empty() {
        (0..n).map(|i| unit(spec, n, i)).collect()
    } else {
        Mat::from_rows(spec, &rows).kernel()
    };
    let pairs = symplectic_basis(q, &perp)?;
    let k = pairs.len();
    let mut x: Vec<Vector> = pairs.iter().map(|p| p.0.clone()).collect();
    x.extend(pairs.iter().map(|p| p.1.clone()));
    let mut cols: Vec<Vector> = u.clone();
    cols.extend(x.iter().cloned());
    cols.extend(v[m..].iter().cloned());
    cols.extend(v[..m].iter().cloned());
    let basis = Mat::from_cols(spec, n, &cols);
    let basis_inv = basis.inverse().ok_or_else(|| Error::Precondition("ordered basis is singular".into()))?;
    let q_u = q.restrict(&u);
    let uan_x: Vec<Vector> = u[m..].iter().chain(&x).cloned().collect();
    let q_uan_x = q.restrict(&uan_x);
    let tp = tau.matrix().add(&Mat::identity(spec, n));
    let mut n_matrix = Mat::zeros(spec, l, l);
    for i in 0..l {
        for j in 0..l {
            n_matrix[(i, j)] = q.b(&v[i], &tp.mul_vec(&v[j]));
        }
    }
    let ou = enumerate_group(&q_u)?;
    let ougf = ou.gf();
    let o_u_order = ou.len() as u64;
    let o_u_fix_order =
        ou.iter().filter(|g| fixes(&n_matrix, &g.to_mat(&ougf))).count() as u64;
    let o_uan_x_order = enumerate_group(&q_uan_x)?.len() as u64;
    let a_group = a_group(q, &u, &v)?;
    let order = spec.order().expect("finite after enumeration");
    let extra_factor = order
        .checked_pow((2 * m * k) as u32)
        .ok_or_else(|| Error::BudgetExceeded("order overflows".into()))?;
    Ok(DiagonalStructure {
        ordered_form: q.transport(&basis),
        form: q.clone(),
        tau: tau.clone(),
        l,
        m,
        k,
        u,
        v,
        x,
        basis,
        q_u,
        q_uan_x,
        o_u_order,
        n_matrix,
        o_u_fix_order,
        o_uan_x_order,
        a_group,
        extra_factor,
        basis_inv,
    })
}

#[derive(Clone, Debug)]
pub struct PxcBlocks {
    pub p1: Mat,
    pub p2: Mat,
    pub a_phi: Mat,
    pub x1: Mat,
    pub x2: Mat,
    pub x3: Mat,
    pub x4: Mat,
    pub c1: Mat,
    pub c2: Mat,
    pub c3: Mat,
    pub c4: Mat,
    pub m_x: Mat,
    pub m1: Mat,
    pub m2: Mat,
    pub m4: Mat,
    pub e: Mat,
    pub f: Mat,
}

/// phi = P X C with P from O(q_U), X from O(q_{U_an u X}) and C from the
/// C-group. Matrices are in original coordinates, blocks in the ordered basis.
#[derive(Clone, Debug)]
pub struct PXCFactorization {
    pub p_part: Isometry,
    pub x_part: Isometry,
    pub c_part: Isometry,
    pub blocks: PxcBlocks,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GroupCChecks {
    pub shape: bool,
    pub f_is_c1t: bool,
    pub e_is_c2t: bool,
    pub m4_is_m1t: bool,
    pub m2_symmetric_part: bool,
    pub m2_diagonal: bool,
}

impl GroupCChecks {
    pub fn all(&self) -> bool {
        self.shape && self.f_is_c1t && self.e_is_c2t && self.m4_is_m1t && self.m2_symmetric_part && self.m2_diagonal
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ProductLaws {
    pub product: bool,
    pub inverse: bool,
    pub a_for_p: bool,
}

impl ProductLaws {
    pub fn all(&self) -> bool {
        self.product && self.inverse && self.a_for_p
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CompletionPath {
    Zero,
    Transvection,
    Factorized,
    Search,
}

#[derive(Clone, Debug)]
pub struct MCompletion {
    /// (a, i) entry: u_a-coefficient of M v_i
    pub m: Mat,
    pub path: CompletionPath,
    /// The assembled map [[1, C, M], [0, phi_X, phi_X C^dagger], [0, 0, 1]] in original coordinates.
    pub assembled: Mat,
}

impl DiagonalStructure {
    pub fn spec(&self) -> FieldSpec {
        self.form.spec()
    }

    pub fn dim(&self) -> usize {
        self.form.dim()
    }

    pub fn predicted_order(&self) -> u64 {
        self.o_u_order * self.o_uan_x_order * self.a_group.order().unwrap_or(0)
    }

    /// |O(q_U)^N| |O(q_{U_an u X})| |A| |k|^{2mk}
    pub fn corrected_order(&self) -> u64 {
        self.o_u_fix_order * self.o_uan_x_order * self.a_group.order().unwrap_or(0) * self.extra_factor
    }

    pub fn fixes_n(&self, phi_u: &Mat) -> bool {
        fixes(&self.n_matrix, phi_u)
    }

    pub fn report(&self) -> DiagonalReport {
        DiagonalReport {
            l: self.l,
            m: self.m,
            x_dim: 2 * self.k,
            q_u: self.q_u.to_string(),
            q_uan_x: self.q_uan_x.to_string(),
            o_u_order: self.o_u_order,
            o_u_fix_order: self.o_u_fix_order,
            o_uan_x_order: self.o_uan_x_order,
            a_group_order: self.a_group.order().unwrap_or(0),
            predicted_order: self.predicted_order(),
            extra_factor: self.extra_factor,
            corrected_order: self.corrected_order(),
        }
    }

    pub fn to_ordered(&self, g: &Mat) -> Mat {
        self.basis_inv.mul(g).mul(&self.basis)
    }

    pub fn from_ordered(&self, g: &Mat) -> Mat {
        self.basis.mul(g).mul(&self.basis_inv)
    }

    pub fn u_is(&self) -> Vec<usize> {
        (0..self.m).collect()
    }

    pub fn u_an(&self) -> Vec<usize> {
        (self.m..self.l).collect()
    }

    pub fn u_all(&self) -> Vec<usize> {
        (0..self.l).collect()
    }

    pub fn x_x(&self) -> Vec<usize> {
        (self.l..self.l + self.k).collect()
    }

    pub fn x_y(&self) -> Vec<usize> {
        (self.l + self.k..self.l + 2 * self.k).collect()
    }

    pub fn x_all(&self) -> Vec<usize> {
        (self.l..self.l + 2 * self.k).collect()
    }

    pub fn v_an(&self) -> Vec<usize> {
        let s = self.l + 2 * self.k;
        (s..s + self.l - self.m).collect()
    }

    pub fn v_is(&self) -> Vec<usize> {
        let s = self.l + 2 * self.k + self.l - self.m;
        (s..s + self.m).collect()
    }

    /// Ordered position of v'_j.
    pub fn v_pos(&self, j: usize) -> usize {
        let s = self.l + 2 * self.k;
        if j < self.m {
            s + self.l - self.m + j
        } else {
            s + j - self.m
        }
    }

    fn v_positions(&self) -> Vec<usize> {
        (0..self.l).map(|j| self.v_pos(j)).collect()
    }

    /// A_phi: diagonal, q(phi_U^* v'_j) on the isotropic indices, zero elsewhere.
    pub fn a_phi(&self, phi_u: &Mat) -> Result<Mat> {
        let spec = self.spec();
        let star = star_map(phi_u)?;
        let mut a = Mat::zeros(spec, self.l, self.l);
        for j in 0..self.m {
            let w = combine(spec, self.dim(), &star.col(j), &self.v);
            a[(j, j)] = self.form.q(&w);
        }
        Ok(a)
    }

    fn embed_ordered(&self, phi_u: &Mat, a: &Mat) -> Result<Mat> {
        let spec = self.spec();
        let star = star_map(phi_u)?;
        let top = phi_u.mul(&self.a_phi(phi_u)?.add(a));
        let vp = self.v_positions();
        let mut g = Mat::identity(spec, self.dim());
        for i in 0..self.l {
            for j in 0..self.l {
                g[(i, j)] = phi_u[(i, j)];
                g[(vp[i], vp[j])] = star[(i, j)];
                g[(i, vp[j])] = top[(i, j)];
            }
        }
        Ok(g)
    }

    /// The element (phi_U, A) = [[phi_U, phi_U (A_phi + A)], [0, phi_U^*]],
    /// identity on X, in original coordinates.
    pub fn embed(&self, phi_u: &Mat, a: &Mat) -> Result<Mat> {
        precondition(is_isometry(&self.q_u, phi_u), || "phi_U is not in O(q_U)".into())?;
        Ok(self.from_ordered(&self.embed_ordered(phi_u, a)?))
    }

    /// phi_U read off an element preserving span(U).
    pub fn phi_u_of(&self, phi: &Mat) -> Result<Mat> {
        let o = self.to_ordered(phi);
        let rest: Vec<usize> = (self.l..self.dim()).collect();
        precondition(o.select(&rest, &self.u_all()).is_zero(), || "does not preserve span(U)".into())?;
        Ok(o.select(&self.u_all(), &self.u_all()))
    }

    pub fn maps_u_onto_u(&self, phi: &Mat) -> bool {
        self.phi_u_of(phi).is_ok()
    }

    pub fn commutes_with_tau(&self, phi: &Mat) -> bool {
        phi.mul(self.tau.matrix()) == self.tau.matrix().mul(phi)
    }

    pub fn pxc_factorize(&self, phi: &Isometry) -> Result<PXCFactorization> {
        precondition(phi.form() == &self.form, || "element of a different space".into())?;
        precondition(self.commutes_with_tau(phi.matrix()), || "element is not fixed by the involution".into())?;
        let spec = self.spec();
        let n = self.dim();
        let o = self.to_ordered(phi.matrix());
        let phi_u = self.phi_u_of(phi.matrix())?;
        let a_phi = self.a_phi(&phi_u)?;
        let p = self.embed_ordered(&phi_u, &Mat::zeros(spec, self.l, self.l))?;
        let r = p.inverse().expect("invertible").mul(&o);
        let mut xm = r.clone();
        for j in self.x_all().into_iter().chain(self.v_an()) {
            for i in 0..self.m {
                xm[(i, j)] = spec.zero();
            }
        }
        for j in self.v_is() {
            for i in 0..n {
                xm[(i, j)] = if i == j { spec.one() } else { spec.zero() };
            }
        }
        let xinv = xm.inverse().ok_or_else(|| Error::Precondition("X-part is singular".into()))?;
        let cm = xinv.mul(&r);
        let (uis, uan, xx, xy, xall, van, vis) =
            (self.u_is(), self.u_an(), self.x_x(), self.x_y(), self.x_all(), self.v_an(), self.v_is());
        let blocks = PxcBlocks {
            p1: phi_u.select(&uis, &uis),
            p2: phi_u.select(&uis, &uan),
            a_phi,
            x1: xm.select(&xx, &xx),
            x2: xm.select(&xx, &xy),
            x3: xm.select(&xy, &xx),
            x4: xm.select(&xy, &xy),
            c1: cm.select(&uis, &xx),
            c2: cm.select(&uis, &xy),
            c3: xm.select(&uan, &xx),
            c4: xm.select(&uan, &xy),
            m_x: xm.select(&uan, &van),
            m1: cm.select(&uis, &van),
            m2: cm.select(&uis, &vis),
            m4: cm.select(&uan, &vis),
            e: cm.select(&xx, &vis),
            f: cm.select(&xy, &vis),
        };
        let _ = xall;
        Ok(PXCFactorization {
            p_part: Isometry::new(&self.form, self.from_ordered(&p))?,
            x_part: Isometry::new(&self.form, self.from_ordered(&xm))?,
            c_part: Isometry::new(&self.form, self.from_ordered(&cm))?,
            blocks,
        })
    }

    /// Shape of an X-part: identity outside (U_an, X), (U_an, V_an), (X, X), (X, V_an).
    pub fn is_x_shape(&self, g: &Mat) -> bool {
        let o = self.to_ordered(g);
        let allowed = |i: usize, j: usize| {
            let ui = i >= self.m && i < self.l;
            let xi = i >= self.l && i < self.l + 2 * self.k;
            let xj = j >= self.l && j < self.l + 2 * self.k;
            let vanj = self.v_an().contains(&j);
            (ui || xi) && (xj || vanj)
        };
        self.only_allowed(&o, allowed)
    }

    /// Shape of a C-part: identity outside (U_is, X u V), (U_an, V_is), (X, V_is).
    pub fn is_c_shape(&self, g: &Mat) -> bool {
        let o = self.to_ordered(g);
        let vis = self.v_is();
        let allowed = |i: usize, j: usize| {
            let xj = j >= self.l && j < self.l + 2 * self.k;
            let vj = j >= self.l + 2 * self.k;
            if i < self.m {
                xj || vj
            } else if i < self.l + 2 * self.k {
                vis.contains(&j)
            } else {
                false
            }
        };
        self.only_allowed(&o, allowed)
    }

    fn only_allowed(&self, o: &Mat, allowed: impl Fn(usize, usize) -> bool) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            (0..n).all(|j| {
                let id = if i == j { self.spec().one() } else { self.spec().zero() };
                o[(i, j)] == id || allowed(i, j)
            })
        })
    }

    pub fn group_c_checks(&self, f: &PXCFactorization) -> GroupCChecks {
        let b = &f.blocks;
        let spec = self.spec();
        let n = self.dim();
        let m2_diagonal = (0..self.m).all(|i| {
            let mut w = vec![spec.zero(); n];
            for (a, &pos) in self.u_an().iter().enumerate() {
                w[pos] = b.m4[(a, i)];
            }
            for s in 0..self.k {
                w[self.l + s] = b.e[(s, i)];
                w[self.l + self.k + s] = b.f[(s, i)];
            }
            b.m2[(i, i)] == self.ordered_form.q(&w)
        });
        let sym = b.c1.mul(&b.c2.transpose()).add(&b.c2.mul(&b.c1.transpose()));
        GroupCChecks {
            shape: self.is_c_shape(f.c_part.matrix()),
            f_is_c1t: b.f == b.c1.transpose(),
            e_is_c2t: b.e == b.c2.transpose(),
            m4_is_m1t: b.m4 == b.m1.transpose(),
            m2_symmetric_part: b.m2.add(&b.m2.transpose()) == sym,
            m2_diagonal,
        }
    }

    /// Both sides of the product, inverse and A_{phi theta} identities as matrices.
    pub fn product_law_check(&self, phi_u: &Mat, a: &Mat, theta_u: &Mat, c: &Mat) -> Result<ProductLaws> {
        precondition(self.a_group.contains(a) && self.a_group.contains(c), || "not in the A-group".into())?;
        let lhs = self.embed(phi_u, a)?.mul(&self.embed(theta_u, c)?);
        let ti = theta_u.inverse().ok_or_else(|| Error::Precondition("singular theta_U".into()))?;
        let tstar = star_map(theta_u)?;
        let rhs = self.embed(&phi_u.mul(theta_u), &ti.mul(a).mul(&tstar).add(c))?;
        let pi = phi_u.inverse().ok_or_else(|| Error::Precondition("singular phi_U".into()))?;
        let inv = self.embed(&pi, &phi_u.mul(a).mul(&phi_u.transpose()))?;
        let inverse = self.embed(phi_u, a)?.inverse().is_some_and(|x| x == inv);
        let a_for_p =
            self.a_phi(&phi_u.mul(theta_u))? == ti.mul(&self.a_phi(phi_u)?).mul(&tstar).add(&self.a_phi(theta_u)?);
        Ok(ProductLaws { product: lhs == rhs, inverse, a_for_p })
    }

    /// For an element of C(tau) with no X part, q(v + A v) = q(phi_U^* v) on
    /// the completion basis, where the (U, V) block is phi_U A.
    pub fn completion_relation(&self, phi: &Mat) -> Result<bool> {
        precondition(self.k == 0, || "needs dim = 2l".into())?;
        let spec = self.spec();
        let o = self.to_ordered(phi);
        let phi_u = self.phi_u_of(phi)?;
        let star = star_map(&phi_u)?;
        let vp = self.v_positions();
        let top = o.select(&self.u_all(), &vp);
        let a = phi_u.inverse().expect("invertible").mul(&top);
        Ok((0..self.l).all(|j| {
            let v = self.v[j].clone();
            let av = combine(spec, self.dim(), &a.col(j), &self.u);
            let sv = combine(spec, self.dim(), &star.col(j), &self.v);
            self.form.q(&vec_add(&v, &av)) == self.form.q(&sv)
        }))
    }

    /// C^dagger = J C^T: the map V -> X with B(C^dagger v, z) = B(v, C z).
    pub fn dagger(&self, c: &Mat) -> Mat {
        let mut d = Mat::zeros(self.spec(), 2 * self.k, self.l);
        for i in 0..self.l {
            for s in 0..self.k {
                d[(s, i)] = c[(i, self.k + s)];
                d[(self.k + s, i)] = c[(i, s)];
            }
        }
        d
    }

    /// [[1, C, M], [0, phi_X, phi_X C^dagger], [0, 0, 1]] in original coordinates;
    /// C is l x 2k over (U', X), M is l x l over (U', V').
    pub fn assemble(&self, c: &Mat, phi_x: &Mat, m: &Mat) -> Mat {
        let spec = self.spec();
        let mut g = Mat::identity(spec, self.dim());
        let xs = self.x_all();
        let vp = self.v_positions();
        let down = phi_x.mul(&self.dagger(c));
        for i in 0..self.l {
            for (a, &xa) in xs.iter().enumerate() {
                g[(i, xa)] = c[(i, a)];
            }
            for j in 0..self.l {
                g[(i, vp[j])] = m[(i, j)];
            }
        }
        for (a, &xa) in xs.iter().enumerate() {
            for (b, &xb) in xs.iter().enumerate() {
                g[(xa, xb)] = phi_x[(a, b)];
            }
            for j in 0..self.l {
                g[(xa, vp[j])] = down[(a, j)];
            }
        }
        self.from_ordered(&g)
    }

    fn x_form(&self) -> QuadForm {
        self.form.restrict(&self.x)
    }

    fn solve_in_u(&self, value: FieldElement) -> Option<Vector> {
        let spec = self.spec();
        let coords: Vec<(FieldElement, FieldElement)> =
            self.u.iter().map(|w| self.form.q(w).square_class_coordinates()).collect();
        let rows = vec![coords.iter().map(|c| c.0).collect::<Vector>(), coords.iter().map(|c| c.1).collect()];
        let (t0, t1) = value.square_class_coordinates();
        if self.l == 0 {
            return value.is_zero().then(Vec::new);
        }
        Mat::from_rows(spec, &rows).solve(&[t0, t1])
    }

    /// C_t and M_t for one symplectic transvection z -> z + w B(x, z) x on X:
    /// C_t z = B(x, z) c with q(c) = w^2 q(x) + w, and M_t v = B(v, c) c / w.
    fn transvection_completion(&self, xv: &Vector, w: FieldElement) -> Option<(Mat, Mat)> {
        let spec = self.spec();
        let qx = self.x_form();
        let c = self.solve_in_u(w.square() * qx.q(xv) + w)?;
        let bx = qx.gram().mul_vec(xv);
        let mut cm = Mat::zeros(spec, self.l, 2 * self.k);
        for i in 0..self.l {
            for a in 0..2 * self.k {
                cm[(i, a)] = c[i] * bx[a];
            }
        }
        let mut mm = Mat::zeros(spec, self.l, self.l);
        for a in 0..self.l {
            for i in 0..self.l {
                mm[(a, i)] = c[i] * c[a] / w;
            }
        }
        Some((cm, mm))
    }

    /// An M making [[1, C, M], [0, phi_X, phi_X C^dagger], [0, 0, 1]] an
    /// isometry. With U anisotropic it is built along a factorization of
    /// phi_X into symplectic transvections; otherwise by search. The result
    /// is one point of a coset of the A-group.
    pub fn m_completion(&self, c: &Mat, phi_x: &Mat) -> Result<MCompletion> {
        let spec = self.spec();
        let kk = 2 * self.k;
        precondition(c.rows() == self.l && c.cols() == kk, || "C has the wrong shape".into())?;
        precondition(phi_x.rows() == kk && phi_x.cols() == kk, || "phi_X has the wrong shape".into())?;
        let qx = self.x_form();
        precondition(preserves_bilinear(&qx, phi_x) && phi_x.inverse().is_some(), || {
            "phi_X is not symplectic".into()
        })?;
        let qu = &self.q_u;
        let compat = (0..kk).all(|a| {
            let z = unit(spec, kk, a);
            qx.q(&phi_x.mul_vec(&z)) + qu.q(&c.col(a)) == qx.q(&z)
        });
        precondition(compat, || "compatibility q(phi_X z + C z) = q(z) fails".into())?;
        let done = |m: Mat, path| {
            let assembled = self.assemble(c, phi_x, &m);
            if is_isometry(&self.form, &assembled) {
                Ok(MCompletion { m, path, assembled })
            } else {
                Err(Error::NotAnIsometry("assembled completion".into()))
            }
        };
        if phi_x.is_identity() && c.is_zero() {
            return done(Mat::zeros(spec, self.l, self.l), CompletionPath::Zero);
        }
        if self.m == 0 {
            if let Some(m) = self.factorized_m(c, phi_x)? {
                let path = if phi_x.add(&Mat::identity(spec, kk)).rank() == 1 {
                    CompletionPath::Transvection
                } else {
                    CompletionPath::Factorized
                };
                return done(m, path);
            }
        }
        let all = self.search_m(c, phi_x, true)?;
        match all.into_iter().next() {
            Some(m) => done(m, CompletionPath::Search),
            None => Err(Error::Precondition("no completion exists".into())),
        }
    }

    fn factorized_m(&self, c: &Mat, phi_x: &Mat) -> Result<Option<Mat>> {
        let spec = self.spec();
        let kk = 2 * self.k;
        let qx = self.x_form();
        let Some(factors) = transvection_factorization(&qx, phi_x)? else {
            return Ok(None);
        };
        let mut total = Mat::identity(spec, self.dim());
        for (xv, w) in &factors {
            let Some((ct, mt)) = self.transvection_completion(xv, *w) else {
                return Ok(None);
            };
            let t = crate::orthogroup::transvection(&qx, xv, *w);
            total = total.mul(&self.assemble(&ct, &t, &mt));
        }
        let o = self.to_ordered(&total);
        let xs = self.x_all();
        let vp = self.v_positions();
        if o.select(&self.u_all(), &xs) != *c || o.select(&xs, &xs) != *phi_x {
            return Ok(None);
        }
        let _ = kk;
        Ok(Some(o.select(&self.u_all(), &vp)))
    }

    /// Every M (or just the first, in a fixed scan order) solving
    /// M_ij + M_ji = B(C^dagger v_i, C^dagger v_j) and
    /// q(M v_i) + M_ii = q(phi_X C^dagger v_i).
    pub fn search_m(&self, c: &Mat, phi_x: &Mat, first_only: bool) -> Result<Vec<Mat>> {
        let spec = self.spec();
        let elems = spec.enumerate()?;
        let l = self.l;
        let qx = self.x_form();
        let dag = self.dagger(c);
        let img = phi_x.mul(&dag);
        let target: Vec<FieldElement> = (0..l).map(|i| qx.q(&img.col(i))).collect();
        let b = |i: usize, j: usize| qx.b(&dag.col(i), &dag.col(j));
        let pairs: Vec<(usize, usize)> = (0..l).flat_map(|i| (i + 1..l).map(move |j| (i, j))).collect();
        let total = (elems.len() as u64).checked_pow(pairs.len() as u32).filter(|&t| t <= 1 << 20);
        let total = total.ok_or_else(|| Error::BudgetExceeded("completion search".into()))?;
        let mut out = Vec::new();
        for mut code in 0..total {
            let mut m = Mat::zeros(spec, l, l);
            for &(i, j) in &pairs {
                let t = elems[(code % elems.len() as u64) as usize];
                code /= elems.len() as u64;
                m[(i, j)] = t;
                m[(j, i)] = t + b(i, j);
            }
            let mut diag = Vec::with_capacity(l);
            for i in 0..l {
                let rest = (0..l).filter(|&a| a != i).fold(spec.zero(), |s, a| s + m[(a, i)].square() * qu_norm(self, a));
                let sols: Vec<FieldElement> =
                    elems.iter().copied().filter(|&x| x.square() * qu_norm(self, i) + x + rest == target[i]).collect();
                diag.push(sols);
            }
            if diag.iter().any(|d| d.is_empty()) {
                continue;
            }
            let mut idx = vec![0usize; l];
            loop {
                let mut mm = m.clone();
                for i in 0..l {
                    mm[(i, i)] = diag[i][idx[i]];
                }
                out.push(mm);
                if first_only {
                    return Ok(out);
                }
                let mut p = 0;
                while p < l {
                    idx[p] += 1;
                    if idx[p] < diag[p].len() {
                        break;
                    }
                    idx[p] = 0;
                    p += 1;
                }
                if p == l {
                    break;
                }
            }
        }
        Ok(out)
    }
}

fn fixes(n: &Mat, phi_u: &Mat) -> bool {
    &phi_u.mul(n).mul(&phi_u.transpose()) == n
}

fn qu_norm(d: &DiagonalStructure, i: usize) -> FieldElement {
    d.q_u.norm(i)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FixedClauses {
    pub rho_psi_commute: bool,
    pub tau_mu_commute: bool,
    pub y_law: bool,
}

impl FixedClauses {
    pub fn all(&self) -> bool {
        self.rho_psi_commute && self.tau_mu_commute && self.y_law
    }
}

/// For an involution (rho, Y, tau) and a group element (psi, Z, mu): psi
/// commutes with rho, mu with tau, and Y + psi^{-1} Y mu = Z + rho Z tau.
pub fn general_fixed_clauses(t_inv: &Triple, cand: &Triple) -> Result<FixedClauses> {
    if t_inv.form != cand.form {
        return Err(Error::TypeMismatch("triples on different spaces".into()));
    }
    let psi_inv = cand.rho.inverse().ok_or_else(|| Error::NotAnIsometry("singular on the radical".into()))?;
    let (rho, tau, y) = (&t_inv.rho, &t_inv.tau, &t_inv.y);
    let (psi, mu, z) = (&cand.rho, &cand.tau, &cand.y);
    Ok(FixedClauses {
        rho_psi_commute: rho.mul(psi) == psi.mul(rho),
        tau_mu_commute: tau.mul(mu) == mu.mul(tau),
        y_law: y.add(&psi_inv.mul(y).mul(mu)) == z.add(&rho.mul(z).mul(tau)),
    })
}

pub fn general_fixed_check(t_inv: &Triple, cand: &Triple) -> Result<bool> {
    Ok(general_fixed_clauses(t_inv, cand)?.all())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::involutions::oracle::InvolutionClasses;
    use crate::orthogroup::orthogonal_transvection;

    fn form(spec: FieldSpec, pairs: &[(u64, u64)], diag: &[u64]) -> QuadForm {
        let p: Vec<_> = pairs.iter().map(|&(a, b)| (spec.from_code(a), spec.from_code(b))).collect();
        let d: Vec<_> = diag.iter().map(|&c| spec.from_code(c)).collect();
        QuadForm::from_signature(spec, &p, &d)
    }

    #[test]
    fn centralizer_examples() {
        let k = FieldSpec::gf2();
        let q = form(k, &[(0, 0)], &[]);
        let g = enumerate_group(&q).unwrap();
        let id = Isometry::identity(&q);
        assert_eq!(centralizer(&g, &id).unwrap().order(), 2);
        let q = form(k, &[(1, 1)], &[]);
        let g = enumerate_group(&q).unwrap();
        let t = orthogonal_transvection(&q, &unit(k, 2, 0)).unwrap();
        let c = centralizer(&g, &t).unwrap();
        assert_eq!(c.order(), 2);
        assert!(c.is_closed_subgroup());
        assert_eq!(centralizer(&g, &Isometry::identity(&q)).unwrap().order(), 6);
    }

    #[test]
    fn a_group_scalar_case() {
        let k = FieldSpec::gf2();
        let a = a_group_from_norms(k, &[k.one()]);
        assert_eq!(a.order(), Some(2));
        assert!(a.contains(&Mat::zeros(k, 1, 1)));
    }

    #[test]
    fn star_map_identities() {
        let k = FieldSpec::gf4();
        let id = Mat::identity(k, 2);
        assert_eq!(star_map(&id).unwrap(), id);
        let mut a = Mat::identity(k, 2);
        a[(0, 1)] = k.from_code(2);
        let mut b = Mat::identity(k, 2);
        b[(1, 0)] = k.from_code(3);
        assert_eq!(star_map(&a.mul(&b)).unwrap(), star_map(&a).unwrap().mul(&star_map(&b).unwrap()));
        assert!(star_map(&Mat::zeros(k, 2, 2)).is_err());
    }

    #[test]
    fn radical_swap_on_two_zeros() {
        let k = FieldSpec::gf2();
        let q = form(k, &[], &[0, 0]);
        let rho = crate::orthogroup::basic_radical(&q, &unit(k, 2, 0), &unit(k, 2, 1)).unwrap();
        let rs = radical_fixed_structure(&q, &rho).unwrap();
        let g = enumerate_group(&q).unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(rs.predicted_order, centralizer(&g, &rho).unwrap().order());
    }

    #[test]
    fn reflection_on_one_plane() {
        let k = FieldSpec::gf2();
        let q = form(k, &[(1, 1)], &[]);
        let t = orthogonal_transvection(&q, &unit(k, 2, 0)).unwrap();
        let ds = diagonal_fixed_structure(&q, &t).unwrap();
        assert_eq!(ds.predicted_order(), 2);
        let g = enumerate_group(&q).unwrap();
        for e in centralizer(&g, &t).unwrap().matrices() {
            let f = ds.pxc_factorize(&Isometry::new(&q, e.clone()).unwrap()).unwrap();
            assert_eq!(f.p_part.matrix().mul(f.x_part.matrix()).mul(f.c_part.matrix()), e);
        }
    }

    #[test]
    fn identity_candidate_is_fixed() {
        let k = FieldSpec::gf2();
        let q = form(k, &[(1, 1)], &[0]);
        let oc = InvolutionClasses::for_form(&q).unwrap();
        for i in 0..oc.len() {
            let phi = Isometry::new(&q, oc.matrix(i)).unwrap();
            let t = Triple::of(&phi).unwrap();
            assert!(general_fixed_check(&t, &Triple::of(&Isometry::identity(&q)).unwrap()).unwrap());
            assert!(general_fixed_check(&t, &t).unwrap());
        }
    }

    #[test]
    fn transvection_on_two_planes() {
        let k = FieldSpec::gf2();
        let q = form(k, &[(1, 1), (1, 1)], &[]);
        let t = orthogonal_transvection(&q, &unit(k, 4, 0)).unwrap();
        let ds = diagonal_fixed_structure(&q, &t).unwrap();
        let g = enumerate_group(&q).unwrap();
        assert_eq!(ds.predicted_order(), 12);
        assert_eq!(centralizer(&g, &t).unwrap().order(), 12);
    }

    #[test]
    fn pxc_of_identity_is_trivial() {
        let k = FieldSpec::gf2();
        let q = form(k, &[(1, 1), (1, 1)], &[]);
        let t = orthogonal_transvection(&q, &unit(k, 4, 0)).unwrap();
        let ds = diagonal_fixed_structure(&q, &t).unwrap();
        let f = ds.pxc_factorize(&Isometry::identity(&q)).unwrap();
        assert!(f.p_part.is_identity() && f.x_part.is_identity() && f.c_part.is_identity());
    }

    #[test]
    fn pxc_of_pure_a_element() {
        // l = 2, m = 1: A on the isotropic row lands in C, the anisotropic corner in X
        let k = FieldSpec::gf2();
        let q = form(k, &[(0, 0), (0, 0)], &[]);
        let w1 = vec_add(&unit(k, 4, 0), &unit(k, 4, 1));
        let w2 = vec_add(&unit(k, 4, 2), &unit(k, 4, 3));
        let t1 = orthogonal_transvection(&q, &w1).unwrap();
        let t2 = orthogonal_transvection(&q, &w2).unwrap();
        let tau = t1.compose(&t2);
        let ds = diagonal_fixed_structure(&q, &tau).unwrap();
        assert_eq!((ds.l, ds.m), (2, 1));
        let id = Mat::identity(k, 2);
        let mut seen_c = false;
        for a in ds.a_group.elements().unwrap() {
            let e = ds.embed(&id, &a.a).unwrap();
            let f = ds.pxc_factorize(&Isometry::new(&q, e.clone()).unwrap()).unwrap();
            assert!(f.p_part.is_identity());
            if a.a[(1, 1)].is_zero() {
                assert!(f.x_part.is_identity());
                assert_eq!(f.c_part.matrix(), &e);
                seen_c |= !a.a.is_zero();
            }
        }
        assert!(seen_c);
    }

    #[test]
    fn completion_paths_and_non_uniqueness() {
        let k = FieldSpec::gf2();
        let q = form(k, &[(1, 1), (1, 1)], &[]);
        let t = orthogonal_transvection(&q, &unit(k, 4, 0)).unwrap();
        let ds = diagonal_fixed_structure(&q, &t).unwrap();
        assert_eq!((ds.l, ds.m, ds.k), (1, 0, 1));
        let sp = crate::orthogroup::enumerate_symplectic(&ds.x_form()).unwrap();
        let gf = sp.gf();
        let c = Mat::zeros(k, ds.l, 2 * ds.k);
        let mut paths = Vec::new();
        for g in sp.iter() {
            let phi_x = g.to_mat(&gf);
            let Ok(done) = ds.m_completion(&c, &phi_x) else {
                continue;
            };
            paths.push(done.path);
            let all = ds.search_m(&c, &phi_x, false).unwrap();
            assert_eq!(all.len(), 2);
            assert_ne!(all[0], all[1]);
        }
        assert!(paths.contains(&CompletionPath::Zero));
        assert!(paths.contains(&CompletionPath::Transvection));
    }

    #[test]
    fn anisotropic_radical_has_trivial_group() {
        for spec in [FieldSpec::gf2(), FieldSpec::gf4()] {
            let q = form(spec, &[], &[1]);
            let g = enumerate_group(&q).unwrap();
            assert_eq!(g.len(), 1);
            assert!(crate::orthogroup::involutions_of(&g).is_empty());
        }
    }
}

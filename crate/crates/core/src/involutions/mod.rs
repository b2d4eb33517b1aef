//! Involutions of O(q, k): classification, transvection factorizations, the
//! (rho, Y, tau) block form on defective spaces, and conjugacy tests.

mod general;
pub mod oracle;
pub mod sweep;

use serde::Serialize;

pub use general::{conjugate_test_general, GeneralTester};

use crate::error::{precondition, Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::linalg::{unit, vec_add, vec_scale, Mat, Subspace, Vector};
use crate::orthogroup::{is_isometry, orthogonal_transvection, transvection, Isometry};
use crate::quadspace::{is_isometric, nonsingular_completion, projective_points, same_k2_span, QuadForm};

/// Canonical basis of the k^2-span of a list of scalars. A scalar a is held by
/// its coordinates (h0, h1) with a = h0^2 + t h1^2; k^2-subspaces of k
/// correspond to k-subspaces of these coordinate pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct K2Span {
    spec: FieldSpec,
    rows: Vec<[FieldElement; 2]>,
    pivots: Vec<usize>,
}

fn coords(a: &FieldElement) -> [FieldElement; 2] {
    let (h0, h1) = a.square_class_coordinates();
    [h0, h1]
}

fn from_coords(spec: FieldSpec, c: &[FieldElement; 2]) -> FieldElement {
    c[0].square() + spec.t() * c[1].square()
}

impl K2Span {
    pub fn new(spec: FieldSpec, elems: &[FieldElement]) -> K2Span {
        if elems.is_empty() {
            return K2Span { spec, rows: vec![], pivots: vec![] };
        }
        let rows: Vec<Vector> = elems.iter().map(|e| coords(e).to_vec()).collect();
        let (r, pivots) = Mat::from_rows(spec, &rows).rref();
        let rows = (0..pivots.len()).map(|i| [r[(i, 0)], r[(i, 1)]]).collect();
        K2Span { spec, rows, pivots }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> Vec<FieldElement> {
        self.rows.iter().map(|c| from_coords(self.spec, c)).collect()
    }

    /// Canonical representative of a modulo the span.
    pub fn reduce(&self, a: &FieldElement) -> FieldElement {
        let mut c = coords(a);
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let f = c[p];
            if !f.is_zero() {
                c = [c[0] + f * row[0], c[1] + f * row[1]];
            }
        }
        from_coords(self.spec, &c)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum InvolutionKind {
    /// Residual space inside the radical. On a totally singular space the
    /// signature holds the norms of preimages of a residual basis reduced
    /// modulo the k^2-span of the norms of fixed vectors, and `fixed_norms` is
    /// a canonical basis of that span. On a defective space with nonzero
    /// nonsingular part the signature is the residual norms and `fixed_norms` is empty.
    Radical { signature: Vec<FieldElement>, fixed_norms: Vec<FieldElement> },
    Null { length: usize },
    Diagonal { inducing_norms: Vec<FieldElement>, dim_u: usize },
    Hyperbolic { inducing_norms: Vec<FieldElement>, dim_u: usize },
    GeneralTriple { rho_residue: usize, tau_residue: usize },
}

#[derive(Clone, Debug)]
pub struct InvolutionDescriptor {
    pub kind: InvolutionKind,
    pub residue: usize,
    pub residual: Subspace,
    pub residual_q: QuadForm,
    /// Inducing vectors of a transvection factorization, for Diagonal and Hyperbolic.
    pub inducing: Vec<Vector>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct DescriptorReport {
    pub kind: String,
    pub residue: usize,
    pub length: usize,
    pub norm_signature: Vec<String>,
    pub field: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim_u: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_norms: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_residue: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_residue: Option<usize>,
}

impl InvolutionDescriptor {
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            InvolutionKind::Radical { .. } => "Radical",
            InvolutionKind::Null { .. } => "Null",
            InvolutionKind::Diagonal { .. } => "Diagonal",
            InvolutionKind::Hyperbolic { .. } => "Hyperbolic",
            InvolutionKind::GeneralTriple { .. } => "GeneralTriple",
        }
    }

    pub fn length(&self) -> usize {
        match &self.kind {
            InvolutionKind::Radical { signature, .. } => signature.len(),
            InvolutionKind::Null { length } => *length,
            InvolutionKind::Diagonal { inducing_norms, .. } | InvolutionKind::Hyperbolic { inducing_norms, .. } => {
                inducing_norms.len()
            }
            InvolutionKind::GeneralTriple { .. } => self.residue,
        }
    }

    pub fn norm_signature(&self) -> Vec<FieldElement> {
        match &self.kind {
            InvolutionKind::Radical { signature, .. } => signature.clone(),
            InvolutionKind::Diagonal { inducing_norms, .. } | InvolutionKind::Hyperbolic { inducing_norms, .. } => {
                inducing_norms.clone()
            }
            _ => (0..self.residual_q.dim()).map(|i| self.residual_q.norm(i)).collect(),
        }
    }

    pub fn report(&self) -> DescriptorReport {
        let strs = |v: &[FieldElement]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let mut r = DescriptorReport {
            kind: self.kind_name().into(),
            residue: self.residue,
            length: self.length(),
            norm_signature: strs(&self.norm_signature()),
            field: self.residual_q.spec().to_string(),
            dim_u: None,
            fixed_norms: None,
            rho_residue: None,
            tau_residue: None,
        };
        match &self.kind {
            InvolutionKind::Radical { fixed_norms, .. } => r.fixed_norms = Some(strs(fixed_norms)),
            InvolutionKind::Diagonal { dim_u, .. } | InvolutionKind::Hyperbolic { dim_u, .. } => r.dim_u = Some(*dim_u),
            InvolutionKind::GeneralTriple { rho_residue, tau_residue } => {
                r.rho_residue = Some(*rho_residue);
                r.tau_residue = Some(*tau_residue);
            }
            InvolutionKind::Null { .. } => {}
        }
        r
    }
}

fn plus_identity(m: &Mat) -> Mat {
    m.add(&Mat::identity(m.spec(), m.rows()))
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

/// Coefficient vectors to try when searching a space of dimension l: the
/// projective points over a finite field, the GF(2)-combinations otherwise.
fn scan_points(spec: FieldSpec, l: usize) -> Result<Vec<Vector>> {
    if spec.is_finite() {
        return Ok(projective_points(spec, l)?.collect());
    }
    if l > 16 {
        return Err(Error::BudgetExceeded("search space too large".into()));
    }
    Ok((1u32..(1 << l))
        .map(|c| (0..l).map(|i| if (c >> i) & 1 == 1 { spec.one() } else { spec.zero() }).collect())
        .collect())
}

/// Pairs (u_i, a_i) with phi = t(u_1, a_1) ... t(u_l, a_l), l the residue, where
/// t(u, a) is the transvection z -> z + a B(u, z) u. Each step removes one
/// transvection along a residual vector u with a = 1/chi(u, u), chi the Wall
/// form of the current map. For an isometry chi(u, u) = q(u), so the factors
/// are orthogonal transvections.
pub fn transvection_factorization(q: &QuadForm, phi: &Mat) -> Result<Option<Vec<(Vector, FieldElement)>>> {
    let mut budget: u64 = 200_000;
    peel(q, phi, &mut budget)
}

fn peel(q: &QuadForm, phi: &Mat, budget: &mut u64) -> Result<Option<Vec<(Vector, FieldElement)>>> {
    let spec = q.spec();
    let n = q.dim();
    let m1 = plus_identity(phi);
    let r = m1.column_space();
    let l = r.dim();
    if l == 0 {
        return Ok(Some(vec![]));
    }
    for c in scan_points(spec, l)? {
        if *budget == 0 {
            return Err(Error::BudgetExceeded("transvection factorization search".into()));
        }
        *budget -= 1;
        let u = combine(spec, n, &c, r.basis());
        let pre = m1.solve(&u).expect("u lies in the residual space");
        let chi = q.b(&u, &pre);
        if chi.is_zero() {
            continue;
        }
        let a = chi.inv();
        let psi = transvection(q, &u, a).mul(phi);
        if plus_identity(&psi).rank() != l - 1 {
            continue;
        }
        if let Some(mut rest) = peel(q, &psi, budget)? {
            rest.insert(0, (u, a));
            return Ok(Some(rest));
        }
    }
    Ok(None)
}

/// Product of transvections t(u_1, a_1) ... t(u_l, a_l).
pub fn transvection_product(q: &QuadForm, factors: &[(Vector, FieldElement)]) -> Mat {
    let mut m = Mat::identity(q.spec(), q.dim());
    for (u, a) in factors {
        m = m.mul(&transvection(q, u, *a));
    }
    m
}

/// A factorization into residue + 1 orthogonal transvections when none of length residue exists.
fn hyperbolic_factorization(q: &QuadForm, phi: &Mat) -> Result<Option<Vec<(Vector, FieldElement)>>> {
    let spec = q.spec();
    let n = q.dim();
    let r = plus_identity(phi).column_space();
    let l = r.dim();
    let mut budget: u64 = 200_000;
    for c in scan_points(spec, l)? {
        let u = combine(spec, n, &c, r.basis());
        let nu = q.q(&u);
        if nu.is_zero() {
            continue;
        }
        let psi = transvection(q, &u, nu.inv()).mul(phi);
        if plus_identity(&psi).rank() != l {
            continue;
        }
        if let Some(mut rest) = peel(q, &psi, &mut budget)? {
            rest.insert(0, (u, nu.inv()));
            return Ok(Some(rest));
        }
    }
    Ok(None)
}

fn not_involution(phi: &Isometry) -> Error {
    match phi.involution_witness() {
        Some(w) => {
            let s: Vec<String> = w.iter().map(|x| x.to_string()).collect();
            Error::NotAnInvolution(format!("phi^2 moves basis vector ({})", s.join(",")))
        }
        None => Error::NotAnInvolution("the identity".into()),
    }
}

fn radical_signature(q: &QuadForm, m1: &Mat, r: &Subspace) -> InvolutionKind {
    let spec = q.spec();
    let fix = m1.kernel();
    let fixed = K2Span::new(spec, &fix.iter().map(|f| q.q(f)).collect::<Vec<_>>());
    let signature = r
        .basis()
        .iter()
        .map(|v| {
            let g = m1.solve(v).expect("residual vector has a preimage");
            fixed.reduce(&q.q(&g))
        })
        .collect();
    InvolutionKind::Radical { signature, fixed_norms: fixed.basis() }
}

pub fn classify(phi: &Isometry) -> Result<InvolutionDescriptor> {
    if !phi.is_involution() {
        return Err(not_involution(phi));
    }
    let q = phi.form();
    let n = q.dim();
    let m1 = plus_identity(phi.matrix());
    let residual = m1.column_space();
    let residue = residual.dim();
    let residual_q = q.restrict(residual.basis());
    let rad = q.radical();
    let mut inducing = Vec::new();
    let kind = if rad.contains_subspace(&residual) {
        if rad.dim() == n {
            radical_signature(q, &m1, &residual)
        } else {
            InvolutionKind::Radical {
                signature: (0..residue).map(|i| residual_q.norm(i)).collect(),
                fixed_norms: vec![],
            }
        }
    } else if rad.dim() == 0 {
        if (0..residue).all(|i| residual_q.norm(i).is_zero()) {
            InvolutionKind::Null { length: residue / 2 }
        } else if let Some(f) = transvection_factorization(q, phi.matrix())? {
            inducing = f.iter().map(|(u, _)| u.clone()).collect();
            InvolutionKind::Diagonal { inducing_norms: inducing.iter().map(|u| q.q(u)).collect(), dim_u: residue }
        } else if let Some(f) = hyperbolic_factorization(q, phi.matrix())? {
            inducing = f.iter().map(|(u, _)| u.clone()).collect();
            InvolutionKind::Hyperbolic {
                inducing_norms: inducing.iter().map(|u| q.q(u)).collect(),
                dim_u: inducing.len(),
            }
        } else {
            return Err(Error::Undecidable("no transvection factorization found".into()));
        }
    } else {
        let t = Triple::of(phi)?;
        InvolutionKind::GeneralTriple {
            rho_residue: plus_identity(&t.rho).rank(),
            tau_residue: plus_identity(&t.tau).rank(),
        }
    };
    Ok(InvolutionDescriptor { kind, residue, residual, residual_q, inducing })
}

/// Basis [complement of rad | rad] used for the block form; the complement is
/// spanned by standard basis vectors.
pub fn space_split(q: &QuadForm) -> (Mat, usize, usize) {
    let rad = q.radical();
    let mut cols = rad.complement_basis();
    let w1 = cols.len();
    cols.extend(rad.basis().iter().cloned());
    (Mat::from_cols(q.spec(), q.dim(), &cols), w1, rad.dim())
}

/// Block form of an isometry relative to W = W1 _|_ rad(W): on W1 it acts as
/// w -> tau(w) + rho(Y w), on the radical as rho. Also used for arbitrary
/// group elements, read as (psi, Z, mu).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triple {
    pub form: QuadForm,
    /// columns: W1 basis then radical basis, in original coordinates
    pub basis: Mat,
    pub w1_dim: usize,
    pub rad_dim: usize,
    pub rho: Mat,
    pub y: Mat,
    pub tau: Mat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TripleLaws {
    pub tau_involutive: bool,
    pub rho_involutive: bool,
    pub y_law: bool,
    pub norm_law: bool,
}

impl TripleLaws {
    pub fn all(&self) -> bool {
        self.tau_involutive && self.rho_involutive && self.y_law && self.norm_law
    }
}

impl Triple {
    pub fn of(phi: &Isometry) -> Result<Triple> {
        let q = phi.form();
        let (t, w1, s) = space_split(q);
        let tinv = t.inverse().expect("basis");
        let p = tinv.mul(phi.matrix()).mul(&t);
        let top: Vec<usize> = (0..w1).collect();
        let bottom: Vec<usize> = (w1..w1 + s).collect();
        precondition(p.select(&top, &bottom).is_zero(), || "map does not preserve the radical".into())?;
        let tau = p.select(&top, &top);
        let rho = p.select(&bottom, &bottom);
        let yhat = p.select(&bottom, &top);
        let rinv = rho.inverse().ok_or_else(|| Error::NotAnIsometry("singular on the radical".into()))?;
        Ok(Triple { form: q.clone(), basis: t, w1_dim: w1, rad_dim: s, y: rinv.mul(&yhat), rho, tau })
    }

    /// Radical component rho Y of the map on W1.
    pub fn rad_component(&self) -> Mat {
        self.rho.mul(&self.y)
    }

    /// The map in split coordinates.
    pub fn block_matrix(&self) -> Mat {
        let (w1, s) = (self.w1_dim, self.rad_dim);
        let mut m = Mat::zeros(self.form.spec(), w1 + s, w1 + s);
        let yh = self.rad_component();
        for i in 0..w1 {
            for j in 0..w1 {
                m[(i, j)] = self.tau[(i, j)];
            }
        }
        for i in 0..s {
            for j in 0..w1 {
                m[(w1 + i, j)] = yh[(i, j)];
            }
            for j in 0..s {
                m[(w1 + i, w1 + j)] = self.rho[(i, j)];
            }
        }
        m
    }

    /// The map in original coordinates.
    pub fn reassemble(&self) -> Mat {
        self.basis.mul(&self.block_matrix()).mul(&self.basis.inverse().expect("basis"))
    }

    pub fn split_form(&self) -> QuadForm {
        self.form.transport(&self.basis)
    }

    pub fn q_w1(&self) -> QuadForm {
        let cols: Vec<Vector> = (0..self.w1_dim).map(|j| self.basis.col(j)).collect();
        self.form.restrict(&cols)
    }

    pub fn q_rad(&self) -> QuadForm {
        let cols: Vec<Vector> = (self.w1_dim..self.w1_dim + self.rad_dim).map(|j| self.basis.col(j)).collect();
        self.form.restrict(&cols)
    }

    pub fn laws(&self) -> TripleLaws {
        let spec = self.form.spec();
        let (w1, s) = (self.w1_dim, self.rad_dim);
        let qs = self.split_form();
        let yh = self.rad_component();
        let norm_law = (0..w1).all(|i| {
            let mut v = self.tau.col(i);
            v.extend(yh.col(i));
            qs.q(&v) == qs.q(&unit(spec, w1 + s, i))
        });
        TripleLaws {
            tau_involutive: self.tau.mul(&self.tau).is_identity(),
            rho_involutive: self.rho.mul(&self.rho).is_identity(),
            y_law: self.rho.mul(&self.y).mul(&self.tau) == self.y,
            norm_law,
        }
    }
}

pub fn decompose_triple(phi: &Isometry) -> Result<Triple> {
    if !phi.is_involution() {
        return Err(not_involution(phi));
    }
    Triple::of(phi)
}

/// Output of [`normalize_triple`]. The new basis is u'_1..u'_l, v_1..v_l, x_1..,
/// then the radical basis, where u'_i = u_i + (1/a_i) rho(Y v_i).
#[derive(Clone, Debug)]
pub struct NormalizedTriple {
    pub basis: Mat,
    pub l: usize,
    pub a: Vec<FieldElement>,
    pub u_prime: Vec<Vector>,
    pub rho: Mat,
    /// radical component of phi on the new complement basis
    pub y0: Mat,
    /// phi on the new complement, modulo the radical
    pub tau_y: Mat,
    pub transvections: Vec<Isometry>,
    phi: Mat,
    form: QuadForm,
    w1_dim: usize,
    rad_dim: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NormalizeChecks {
    pub inducing_norms: bool,
    pub fixes_u_prime: bool,
    pub tau_y_is_transvection_product: bool,
    pub y0_isotropic: bool,
    pub y0_vanishes_on_u_v: bool,
}

impl NormalizeChecks {
    pub fn all(&self) -> bool {
        self.inducing_norms
            && self.fixes_u_prime
            && self.tau_y_is_transvection_product
            && self.y0_isotropic
            && self.y0_vanishes_on_u_v
    }
}

pub fn normalize_triple(t: &Triple) -> Result<NormalizedTriple> {
    let spec = t.form.spec();
    let (w1, s) = (t.w1_dim, t.rad_dim);
    let n = w1 + s;
    let qw1 = t.q_w1();
    let factors = peel(&qw1, &t.tau, &mut 200_000)?.ok_or_else(|| {
        Error::Precondition("tau is not a product of residue-many transvections: some a_i = 0".into())
    })?;
    let us: Vec<Vector> = factors.iter().map(|(u, _)| u.clone()).collect();
    let a: Vec<FieldElement> = factors.iter().map(|(_, a)| *a).collect();
    let l = us.len();
    let vs = nonsingular_completion(&qw1, &us)?;
    let g = qw1.gram();
    let rows: Vec<Vector> = us.iter().chain(&vs).map(|x| g.mul_vec(x)).collect();
    let xs: Vec<Vector> = if rows.is_empty() {
        (0..w1).map(|i| unit(spec, w1, i)).collect()
    } else {
        Mat::from_rows(spec, &rows).kernel()
    };
    let yh = t.rad_component();
    let embed = |w: &Vector, r: Option<Vector>| {
        let mut v = w.clone();
        v.extend(r.unwrap_or_else(|| vec![spec.zero(); s]));
        v
    };
    let mut cols: Vec<Vector> = Vec::with_capacity(n);
    for i in 0..l {
        cols.push(embed(&us[i], Some(vec_scale(a[i].inv(), &yh.mul_vec(&vs[i])))));
    }
    for v in &vs {
        cols.push(embed(v, None));
    }
    for x in &xs {
        cols.push(embed(x, None));
    }
    for j in 0..s {
        cols.push(unit(spec, n, w1 + j));
    }
    let basis = t.basis.mul(&Mat::from_cols(spec, n, &cols));
    let phi = t.reassemble();
    let binv = basis.inverse().ok_or_else(|| Error::Precondition("normalized basis is singular".into()))?;
    let pn = binv.mul(&phi).mul(&basis);
    let top: Vec<usize> = (0..w1).collect();
    let bottom: Vec<usize> = (w1..n).collect();
    let u_prime: Vec<Vector> = (0..l).map(|i| basis.col(i)).collect();
    let transvections = u_prime
        .iter()
        .map(|u| orthogonal_transvection(&t.form, u))
        .collect::<Result<Vec<_>>>()?;
    Ok(NormalizedTriple {
        l,
        a,
        u_prime,
        rho: pn.select(&bottom, &bottom),
        y0: pn.select(&bottom, &top),
        tau_y: pn.select(&top, &top),
        transvections,
        phi,
        form: t.form.clone(),
        w1_dim: w1,
        rad_dim: s,
        basis,
    })
}

impl NormalizedTriple {
    pub fn checks(&self) -> NormalizeChecks {
        let spec = self.form.spec();
        let (w1, s) = (self.w1_dim, self.rad_dim);
        let n = w1 + s;
        let inducing_norms = self.u_prime.iter().zip(&self.a).all(|(u, a)| self.form.q(u) == a.inv());
        let fixes_u_prime = self.u_prime.iter().all(|u| self.phi.mul_vec(u) == *u);
        let mut prod = Mat::identity(spec, n);
        for t in &self.transvections {
            prod = prod.mul(t.matrix());
        }
        let binv = self.basis.inverse().expect("basis");
        let pn = binv.mul(&prod).mul(&self.basis);
        let top: Vec<usize> = (0..w1).collect();
        let bottom: Vec<usize> = (w1..n).collect();
        let tau_y_is_transvection_product = is_isometry(&self.form, &prod)
            && pn.select(&top, &top) == self.tau_y
            && pn.select(&bottom, &top).is_zero()
            && pn.select(&bottom, &bottom).is_identity();
        let rad_cols: Vec<Vector> = (w1..n).map(|j| self.basis.col(j)).collect();
        let q_rad = self.form.restrict(&rad_cols);
        let y0_isotropic = (0..w1).all(|j| q_rad.q(&self.y0.col(j)).is_zero());
        let y0_vanishes_on_u_v = (0..2 * self.l).all(|j| self.y0.col(j).iter().all(|x| x.is_zero()));
        NormalizeChecks { inducing_norms, fixes_u_prime, tau_y_is_transvection_product, y0_isotropic, y0_vanishes_on_u_v }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Conjugate,
    NotConjugate,
    Unknown,
}

impl From<bool> for Verdict {
    fn from(b: bool) -> Verdict {
        if b {
            Verdict::Conjugate
        } else {
            Verdict::NotConjugate
        }
    }
}

fn mismatch(what: &str) -> Error {
    Error::TypeMismatch(format!("expected two {what} involutions"))
}

pub fn conjugate_test_transvections(d1: &InvolutionDescriptor, d2: &InvolutionDescriptor) -> Result<bool> {
    use InvolutionKind::*;
    let (n1, u1) = match &d1.kind {
        Diagonal { inducing_norms, dim_u } | Hyperbolic { inducing_norms, dim_u } => (inducing_norms, *dim_u),
        _ => return Err(mismatch("transvection-product")),
    };
    let (n2, u2) = match &d2.kind {
        Diagonal { inducing_norms, dim_u } | Hyperbolic { inducing_norms, dim_u } => (inducing_norms, *dim_u),
        _ => return Err(mismatch("transvection-product")),
    };
    if u1 != u2 || n1.len() != n2.len() {
        return Ok(false);
    }
    let spec = d1.residual_q.spec();
    is_isometric(&QuadForm::from_signature(spec, &[], n1), &QuadForm::from_signature(spec, &[], n2))
}

pub fn conjugate_test_null(d1: &InvolutionDescriptor, d2: &InvolutionDescriptor) -> Result<bool> {
    match (&d1.kind, &d2.kind) {
        (InvolutionKind::Null { length: a }, InvolutionKind::Null { length: b }) => Ok(a == b),
        _ => Err(mismatch("null")),
    }
}

pub fn conjugate_test_radical(d1: &InvolutionDescriptor, d2: &InvolutionDescriptor) -> Result<bool> {
    match (&d1.kind, &d2.kind) {
        (
            InvolutionKind::Radical { signature: s1, fixed_norms: f1 },
            InvolutionKind::Radical { signature: s2, fixed_norms: f2 },
        ) => {
            if s1.len() != s2.len() || !same_k2_span(f1, f2) {
                return Ok(false);
            }
            let mut a = s1.clone();
            a.extend_from_slice(f1);
            let mut b = s2.clone();
            b.extend_from_slice(f2);
            Ok(same_k2_span(&a, &b))
        }
        _ => Err(mismatch("radical")),
    }
}

/// An involution with its classification and, on defective spaces with a
/// nonzero nonsingular part, its block form.
#[derive(Clone, Debug)]
pub struct Classified {
    pub phi: Isometry,
    pub desc: InvolutionDescriptor,
    pub triple: Option<Triple>,
}

impl Classified {
    pub fn new(phi: &Isometry) -> Result<Classified> {
        let desc = classify(phi)?;
        let q = phi.form();
        let triple = if is_mixed(q) { Some(decompose_triple(phi)?) } else { None };
        Ok(Classified { phi: phi.clone(), desc, triple })
    }
}

/// Radical and its complement both nonzero.
pub fn is_mixed(q: &QuadForm) -> bool {
    let s = q.radical().dim();
    s > 0 && s < q.dim()
}

/// The type-appropriate predicate: null, transvection or radical tests on
/// nonsingular and totally singular spaces, the block-form test otherwise.
pub fn conjugate_test(a: &Classified, b: &Classified, tester: &mut GeneralTester) -> Result<Verdict> {
    if a.phi.form() != b.phi.form() {
        return Err(Error::TypeMismatch("involutions on different spaces".into()));
    }
    use InvolutionKind::*;
    if let (Some(t1), Some(t2)) = (&a.triple, &b.triple) {
        let same_kind = matches!(
            (&a.desc.kind, &b.desc.kind),
            (Radical { .. }, Radical { .. }) | (GeneralTriple { .. }, GeneralTriple { .. })
        );
        if !same_kind || a.desc.residue != b.desc.residue {
            return Ok(Verdict::NotConjugate);
        }
        return tester.test(t1, t2);
    }
    Ok(match (&a.desc.kind, &b.desc.kind) {
        (Null { .. }, Null { .. }) => conjugate_test_null(&a.desc, &b.desc)?.into(),
        (Diagonal { .. } | Hyperbolic { .. }, Diagonal { .. } | Hyperbolic { .. }) => {
            conjugate_test_transvections(&a.desc, &b.desc)?.into()
        }
        (Radical { .. }, Radical { .. }) => conjugate_test_radical(&a.desc, &b.desc)?.into(),
        _ => Verdict::NotConjugate,
    })
}

/// The invariant compared by the radical, null and transvection predicates:
/// for two involutions without a block form, `conjugate_test` says Conjugate
/// exactly when the keys are equal. None when a block form is present.
pub fn predicate_key(c: &Classified) -> Option<Vec<String>> {
    if c.triple.is_some() {
        return None;
    }
    let spec = c.desc.residual_q.spec();
    let strs = |v: &[FieldElement]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    Some(match &c.desc.kind {
        InvolutionKind::Radical { signature, fixed_norms } => {
            let mut all = signature.clone();
            all.extend_from_slice(fixed_norms);
            vec![
                "radical".into(),
                signature.len().to_string(),
                strs(&K2Span::new(spec, fixed_norms).basis()),
                strs(&K2Span::new(spec, &all).basis()),
            ]
        }
        InvolutionKind::Null { length } => vec!["null".into(), length.to_string()],
        InvolutionKind::Diagonal { inducing_norms, dim_u } | InvolutionKind::Hyperbolic { inducing_norms, dim_u } => {
            vec![
                "transvection".into(),
                dim_u.to_string(),
                inducing_norms.len().to_string(),
                strs(&K2Span::new(spec, inducing_norms).basis()),
            ]
        }
        InvolutionKind::GeneralTriple { rho_residue, tau_residue } => {
            vec!["triple".into(), rho_residue.to_string(), tau_residue.to_string()]
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orthogroup::{basic_radical, canonical_basic_null, enumerate_group, involutions_of};

    fn form(spec: FieldSpec, pairs: &[(u64, u64)], diag: &[u64]) -> QuadForm {
        let p: Vec<_> = pairs.iter().map(|&(a, b)| (spec.from_code(a), spec.from_code(b))).collect();
        let d: Vec<_> = diag.iter().map(|&c| spec.from_code(c)).collect();
        QuadForm::from_signature(spec, &p, &d)
    }

    #[test]
    fn classify_examples() {
        let k = FieldSpec::gf2();
        let e = |n, i| unit(k, n, i);
        let q = form(k, &[], &[1, 1]);
        let d = classify(&basic_radical(&q, &e(2, 0), &e(2, 1)).unwrap()).unwrap();
        assert_eq!(d.kind_name(), "Radical");
        assert_eq!(d.norm_signature(), vec![k.one()]);
        assert_eq!(d.length(), 1);
        let q = form(k, &[(0, 0), (0, 0)], &[]);
        let d = classify(&canonical_basic_null(&q).unwrap()).unwrap();
        assert_eq!(d.kind, InvolutionKind::Null { length: 1 });
        let q = form(k, &[(1, 1)], &[]);
        let d = classify(&orthogonal_transvection(&q, &e(2, 0)).unwrap()).unwrap();
        assert_eq!(d.kind, InvolutionKind::Diagonal { inducing_norms: vec![k.one()], dim_u: 1 });
        assert!(classify(&Isometry::identity(&q)).is_err());
    }

    #[test]
    fn factorizations_reproduce_the_map() {
        let k = FieldSpec::gf2();
        let q = form(k, &[(0, 0), (1, 1)], &[]);
        let g = enumerate_group(&q).unwrap();
        for c in involutions_of(&g) {
            let phi = g.isometry(&c);
            let d = classify(&phi).unwrap();
            if let InvolutionKind::Diagonal { .. } = d.kind {
                let f = transvection_factorization(&q, phi.matrix()).unwrap().unwrap();
                assert_eq!(f.len(), d.residue);
                assert_eq!(&transvection_product(&q, &f), phi.matrix());
            }
        }
    }

    #[test]
    fn triple_round_trip() {
        let k = FieldSpec::gf2();
        for q in [form(k, &[(1, 1)], &[0]), form(k, &[(0, 0)], &[0, 0]), form(k, &[(1, 1)], &[1])] {
            let g = enumerate_group(&q).unwrap();
            for c in involutions_of(&g) {
                let phi = g.isometry(&c);
                let t = decompose_triple(&phi).unwrap();
                assert!(t.laws().all());
                assert_eq!(&t.reassemble(), phi.matrix());
            }
        }
    }

    #[test]
    fn k2_span_reduction() {
        let f = FieldSpec::RatFunc;
        let t = f.t();
        let s = K2Span::new(f, &[t, t * t * t]);
        assert_eq!(s.dim(), 1);
        assert!(s.reduce(&(t * f.from_code(0b101))).is_zero());
        assert_eq!(s.reduce(&(f.one() + t)), f.one());
    }
}

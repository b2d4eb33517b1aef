//! Quadratic forms in characteristic 2: evaluation, polarization, radical,
//! Witt decomposition, Arf invariant and isometry testing.

use std::fmt;

use serde::Serialize;

use crate::compact::{CForm, Gf, MAX_N};
use crate::error::{check_dim, precondition, Error, Result};
use crate::field::{k2_linear_rank, FieldElement, FieldSpec};
use crate::linalg::{unit, vec_add, vec_scale, Mat, Subspace, Vector};

/// A quadratic form on k^n. `coeffs` is upper triangular: the diagonal holds
/// q(e_i) and entry (i, j) for i < j holds B(e_i, e_j).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadForm {
    spec: FieldSpec,
    coeffs: Mat,
}

/// Block data of a form written as [a_1,b_1] _|_ ... _|_ <c_1, ...>.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub pairs: Vec<(FieldElement, FieldElement)>,
    pub diag: Vec<FieldElement>,
}

impl QuadForm {
    pub fn from_signature(spec: FieldSpec, pairs: &[(FieldElement, FieldElement)], diag: &[FieldElement]) -> QuadForm {
        let n = 2 * pairs.len() + diag.len();
        let mut c = Mat::zeros(spec, n, n);
        for (i, (a, b)) in pairs.iter().enumerate() {
            c[(2 * i, 2 * i)] = *a;
            c[(2 * i + 1, 2 * i + 1)] = *b;
            c[(2 * i, 2 * i + 1)] = spec.one();
        }
        for (j, g) in diag.iter().enumerate() {
            let p = 2 * pairs.len() + j;
            c[(p, p)] = *g;
        }
        QuadForm { spec, coeffs: c }
    }

    /// From an upper-triangular coefficient matrix; entries below the diagonal are ignored.
    pub fn from_coeffs(coeffs: &Mat) -> QuadForm {
        let n = coeffs.rows();
        let mut c = Mat::zeros(coeffs.spec(), n, n);
        for i in 0..n {
            for j in i..n {
                c[(i, j)] = coeffs[(i, j)];
            }
        }
        QuadForm { spec: coeffs.spec(), coeffs: c }
    }

    pub fn empty(spec: FieldSpec) -> QuadForm {
        QuadForm { spec, coeffs: Mat::zeros(spec, 0, 0) }
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn dim(&self) -> usize {
        self.coeffs.rows()
    }

    pub fn coeffs(&self) -> &Mat {
        &self.coeffs
    }

    /// Norm of the i-th basis vector.
    pub fn norm(&self, i: usize) -> FieldElement {
        self.coeffs[(i, i)]
    }

    pub fn eval(&self, w: &[FieldElement]) -> Result<FieldElement> {
        check_dim(self.dim(), w.len())?;
        let mut acc = self.spec.zero();
        for i in 0..self.dim() {
            if w[i].is_zero() {
                continue;
            }
            acc = acc + self.coeffs[(i, i)] * w[i].square();
            for j in i + 1..self.dim() {
                let c = self.coeffs[(i, j)];
                if !c.is_zero() && !w[j].is_zero() {
                    acc = acc + c * w[i] * w[j];
                }
            }
        }
        Ok(acc)
    }

    pub fn q(&self, w: &[FieldElement]) -> FieldElement {
        self.eval(w).expect("vector length")
    }

    pub fn bilinear(&self, w: &[FieldElement], v: &[FieldElement]) -> Result<FieldElement> {
        check_dim(self.dim(), w.len())?;
        check_dim(self.dim(), v.len())?;
        Ok(self.b(w, v))
    }

    pub fn b(&self, w: &[FieldElement], v: &[FieldElement]) -> FieldElement {
        let g = self.gram();
        let gv = g.mul_vec(v);
        let mut acc = self.spec.zero();
        for (x, y) in w.iter().zip(&gv) {
            acc = acc + *x * *y;
        }
        acc
    }

    /// Symmetric Gram matrix of B; its diagonal is zero.
    pub fn gram(&self) -> Mat {
        let n = self.dim();
        let mut g = Mat::zeros(self.spec, n, n);
        for i in 0..n {
            for j in i + 1..n {
                g[(i, j)] = self.coeffs[(i, j)];
                g[(j, i)] = self.coeffs[(i, j)];
            }
        }
        g
    }

    pub fn radical(&self) -> Subspace {
        Subspace::span(self.spec, self.dim(), &self.gram().kernel())
    }

    /// Radical basis taken straight from the Gram kernel (free-column order).
    pub fn radical_basis(&self) -> Vec<Vector> {
        self.gram().kernel()
    }

    /// Number of nonsingular pairs: half the rank of B.
    pub fn r(&self) -> usize {
        self.gram().rank() / 2
    }

    pub fn s(&self) -> usize {
        self.dim() - 2 * self.r()
    }

    pub fn is_nonsingular(&self) -> bool {
        self.s() == 0
    }

    pub fn is_totally_singular(&self) -> bool {
        self.r() == 0
    }

    /// The form q'(e_i) = q(T e_i), i.e. q expressed in the basis given by the columns of T.
    /// T may be rectangular; then this is the restriction to the column span.
    pub fn transport(&self, t: &Mat) -> QuadForm {
        assert_eq!(t.rows(), self.dim(), "basis change size");
        let cols = t.columns();
        self.restrict(&cols)
    }

    /// q restricted to span(vs), in the basis vs.
    pub fn restrict(&self, vs: &[Vector]) -> QuadForm {
        let k = vs.len();
        let g = self.gram();
        let mut c = Mat::zeros(self.spec, k, k);
        let gv: Vec<Vector> = vs.iter().map(|v| g.mul_vec(v)).collect();
        for i in 0..k {
            c[(i, i)] = self.q(&vs[i]);
            for j in i + 1..k {
                let mut acc = self.spec.zero();
                for (x, y) in vs[i].iter().zip(&gv[j]) {
                    acc = acc + *x * *y;
                }
                c[(i, j)] = acc;
            }
        }
        QuadForm { spec: self.spec, coeffs: c }
    }

    /// Block data when the coefficient matrix has signature shape.
    pub fn signature(&self) -> Option<Signature> {
        let n = self.dim();
        let mut r = 0;
        while 2 * r + 1 < n && self.coeffs[(2 * r, 2 * r + 1)].is_one() {
            r += 1;
        }
        let sig = Signature {
            pairs: (0..r).map(|i| (self.coeffs[(2 * i, 2 * i)], self.coeffs[(2 * i + 1, 2 * i + 1)])).collect(),
            diag: (2 * r..n).map(|j| self.coeffs[(j, j)]).collect(),
        };
        if QuadForm::from_signature(self.spec, &sig.pairs, &sig.diag) == *self {
            Some(sig)
        } else {
            None
        }
    }

    pub fn to_compact(&self) -> Option<CForm> {
        let gf = Gf::from_spec(self.spec)?;
        let n = self.dim();
        if n > MAX_N {
            return None;
        }
        let mut diag = [0u16; MAX_N];
        let mut b = [[0u16; MAX_N]; MAX_N];
        for i in 0..n {
            diag[i] = self.coeffs[(i, i)].code()?;
            for j in i + 1..n {
                let c = self.coeffs[(i, j)].code()?;
                b[i][j] = c;
                b[j][i] = c;
            }
        }
        Some(CForm { n, gf, diag, b })
    }

    /// Orthogonal sum self _|_ other.
    pub fn direct_sum(&self, other: &QuadForm) -> QuadForm {
        let (a, b) = (self.dim(), other.dim());
        let mut c = Mat::zeros(self.spec, a + b, a + b);
        for i in 0..a {
            for j in i..a {
                c[(i, j)] = self.coeffs[(i, j)];
            }
        }
        for i in 0..b {
            for j in i..b {
                c[(a + i, a + j)] = other.coeffs[(i, j)];
            }
        }
        QuadForm { spec: self.spec, coeffs: c }
    }
}

impl fmt::Display for QuadForm {
    /// Canonical signature text, or the coefficient matrix when not in signature shape.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.signature() {
            Some(sig) => write!(f, "{}", sig),
            None => {
                let n = self.dim();
                let rows: Vec<String> = (0..n)
                    .map(|i| (0..n).map(|j| self.coeffs[(i, j)].to_string()).collect::<Vec<_>>().join(","))
                    .collect();
                write!(f, "coeffs[{}]", rows.join(";"))
            }
        }
    }
}

impl fmt::Debug for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadForm({} over {})", self, self.spec)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<String> = self.pairs.iter().map(|(a, b)| format!("[{a},{b}]")).collect();
        if !self.diag.is_empty() {
            let d: Vec<String> = self.diag.iter().map(|c| c.to_string()).collect();
            terms.push(format!("<{}>", d.join(",")));
        }
        write!(f, "{}", terms.join("_|_"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittDecomposition {
    pub m: usize,
    pub d: usize,
    pub aniso_pairs: Vec<(FieldElement, FieldElement)>,
    pub aniso_diag: Vec<FieldElement>,
    /// Columns are the decomposed basis written in the original coordinates,
    /// ordered as the hyperbolic pairs, anisotropic pairs, anisotropic diagonal, defect.
    pub change_of_basis: Mat,
}

#[derive(Serialize)]
pub struct WittReport {
    pub m: usize,
    pub d: usize,
    pub aniso_kernel: String,
    pub normal_form: String,
}

impl WittDecomposition {
    pub fn normal_form(&self, spec: FieldSpec) -> QuadForm {
        let mut pairs = vec![(spec.zero(), spec.zero()); self.m];
        pairs.extend(self.aniso_pairs.iter().cloned());
        let mut diag = self.aniso_diag.clone();
        diag.extend(std::iter::repeat_n(spec.zero(), self.d));
        QuadForm::from_signature(spec, &pairs, &diag)
    }

    pub fn kernel_form(&self, spec: FieldSpec) -> QuadForm {
        QuadForm::from_signature(spec, &self.aniso_pairs, &self.aniso_diag)
    }

    pub fn report(&self, spec: FieldSpec) -> WittReport {
        let k = self.kernel_form(spec);
        WittReport {
            m: self.m,
            d: self.d,
            aniso_kernel: if k.dim() == 0 { String::new() } else { k.to_string() },
            normal_form: self.normal_form(spec).to_string(),
        }
    }
}

/// Radical vectors split into an isotropic part (the defect) and an anisotropic complement.
struct RadicalSplit {
    defect: Vec<Vector>,
    aniso: Vec<Vector>,
}

fn split_radical(q: &QuadForm) -> RadicalSplit {
    let spec = q.spec();
    let rad = q.radical_basis();
    if rad.is_empty() {
        return RadicalSplit { defect: vec![], aniso: vec![] };
    }
    // q(sum a_i g_i) = (sum a_i h0_i)^2 + t (sum a_i h1_i)^2, zero iff both sums vanish
    let coords: Vec<(FieldElement, FieldElement)> = rad.iter().map(|g| q.q(g).square_class_coordinates()).collect();
    let h = Mat::from_rows(
        spec,
        &[coords.iter().map(|c| c.0).collect(), coords.iter().map(|c| c.1).collect()],
    );
    let ker = h.kernel();
    let comb = |a: &Vector| -> Vector {
        let mut v = vec![spec.zero(); q.dim()];
        for (c, g) in a.iter().zip(&rad) {
            if !c.is_zero() {
                v = vec_add(&v, &vec_scale(*c, g));
            }
        }
        v
    };
    let defect = ker.iter().map(comb).collect();
    // preimages of the echelon basis of the coordinate image, so the norms
    // come out as 1, t or 1 + c^2 t
    let aniso = h
        .column_space()
        .basis()
        .iter()
        .map(|b| comb(&h.solve(b).expect("image vector")))
        .collect();
    RadicalSplit { defect, aniso }
}

/// Coefficient vectors of k^s, skipping those whose first nonzero coordinate is not 1.
pub(crate) fn projective_points(spec: FieldSpec, s: usize) -> Result<impl Iterator<Item = Vector>> {
    let elems = spec.enumerate()?;
    let base = elems.len() as u64;
    let total = base.checked_pow(s as u32).ok_or_else(|| Error::BudgetExceeded("vector space too large".into()))?;
    Ok((1..total).filter_map(move |mut code| {
        let mut v = Vec::with_capacity(s);
        for _ in 0..s {
            v.push(elems[(code % base) as usize]);
            code /= base;
        }
        let lead = v.iter().find(|x| !x.is_zero())?;
        if lead.is_one() {
            Some(v)
        } else {
            None
        }
    }))
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

/// First isotropic nonzero vector of span(basis) in scan order.
fn find_isotropic(q: &QuadForm, basis: &[Vector]) -> Result<Option<Vector>> {
    for a in projective_points(q.spec(), basis.len())? {
        let w = combine(q.spec(), q.dim(), &a, basis);
        if q.q(&w).is_zero() {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Greedy independent subset in order.
fn independent_subset(spec: FieldSpec, n: usize, vs: &[Vector]) -> Vec<Vector> {
    let mut out: Vec<Vector> = Vec::new();
    for v in vs {
        let mut trial = out.clone();
        trial.push(v.clone());
        if Subspace::span(spec, n, &trial).dim() == trial.len() {
            out = trial;
        }
    }
    out
}

/// Split a nonsingular span into orthogonal symplectic pairs (x_i, y_i) with B(x_i, y_i) = 1.
pub(crate) fn symplectic_basis(q: &QuadForm, basis: &[Vector]) -> Result<Vec<(Vector, Vector)>> {
    let mut rest: Vec<Vector> = basis.to_vec();
    let mut out = Vec::new();
    while let Some(x) = rest.first().cloned() {
        let Some(pos) = rest.iter().position(|v| !q.b(&x, v).is_zero()) else {
            return Err(Error::Precondition("span is not nonsingular".into()));
        };
        let y = vec_scale(q.b(&x, &rest[pos]).inv(), &rest[pos]);
        let proj: Vec<Vector> = rest
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != 0 && *i != pos)
            .map(|(_, z)| {
                // z - B(z,y) x - B(z,x) y lies in span(x,y)^perp
                let z1 = vec_add(z, &vec_scale(q.b(z, &y), &x));
                vec_add(&z1, &vec_scale(q.b(z, &x), &y))
            })
            .collect();
        out.push((x, y));
        rest = proj;
    }
    Ok(out)
}

pub fn witt_decompose(q: &QuadForm) -> Result<WittDecomposition> {
    let spec = q.spec();
    let n = q.dim();
    if !spec.is_finite() && q.r() > 0 {
        return Err(Error::Undecidable(
            "isotropy of nonsingular forms over GF(2)(t) is not decided".into(),
        ));
    }
    let split = split_radical(q);
    let radical = q.radical();
    let mut work: Vec<Vector> = radical.complement_basis();
    work.extend(split.aniso.iter().cloned());

    let mut hyper: Vec<(Vector, Vector)> = Vec::new();
    if spec.is_finite() {
        while let Some(w) = find_isotropic(q, &work)? {
            let y0 = work
                .iter()
                .find(|v| !q.b(&w, v).is_zero())
                .cloned()
                .ok_or_else(|| Error::Precondition("isotropic vector in the radical".into()))?;
            let y = vec_scale(q.b(&w, &y0).inv(), &y0);
            let y = vec_add(&y, &vec_scale(q.q(&y), &w));
            let proj: Vec<Vector> = work
                .iter()
                .map(|z| {
                    let z1 = vec_add(z, &vec_scale(q.b(z, &y), &w));
                    vec_add(&z1, &vec_scale(q.b(z, &w), &y))
                })
                .collect();
            work = independent_subset(spec, n, &proj);
            hyper.push((w, y));
        }
    }

    // anisotropic remainder: its own radical is the anisotropic radical part
    let rq = q.restrict(&work);
    let rker = rq.gram().kernel();
    let kspace = Subspace::span(spec, work.len(), &rker);
    let nonsing: Vec<Vector> = kspace.complement_basis().iter().map(|a| combine(spec, n, a, &work)).collect();
    let rad_an: Vec<Vector> = rker.iter().map(|a| combine(spec, n, a, &work)).collect();
    let pairs = symplectic_basis(q, &nonsing)?;

    let mut cols: Vec<Vector> = Vec::new();
    for (x, y) in &hyper {
        cols.push(x.clone());
        cols.push(y.clone());
    }
    for (x, y) in &pairs {
        cols.push(x.clone());
        cols.push(y.clone());
    }
    cols.extend(rad_an.iter().cloned());
    cols.extend(split.defect.iter().cloned());
    let t = Mat::from_cols(spec, n, &cols);
    let wd = WittDecomposition {
        m: hyper.len(),
        d: split.defect.len(),
        aniso_pairs: pairs.iter().map(|(x, y)| (q.q(x), q.q(y))).collect(),
        aniso_diag: rad_an.iter().map(|g| q.q(g)).collect(),
        change_of_basis: t,
    };
    debug_assert_eq!(q.transport(&wd.change_of_basis), wd.normal_form(spec));
    Ok(wd)
}

/// True when q has no nonzero isotropic vector.
pub fn is_anisotropic(q: &QuadForm) -> Result<bool> {
    let wd = witt_decompose(q)?;
    Ok(wd.m == 0 && wd.d == 0)
}

/// Exhaustive check that span(basis) has no nonzero isotropic vector.
pub fn anisotropic_by_scan(q: &QuadForm) -> Result<bool> {
    let basis: Vec<Vector> = (0..q.dim()).map(|i| unit(q.spec(), q.dim(), i)).collect();
    Ok(find_isotropic(q, &basis)?.is_none())
}

/// Arf class of a nonsingular form over GF(2^m): 0, or the least element code of absolute trace 1.
pub fn arf_invariant(q: &QuadForm) -> Result<FieldElement> {
    let spec = q.spec();
    precondition(spec.is_finite(), || "Arf invariant needs a finite field".into())?;
    precondition(q.is_nonsingular(), || "Arf invariant needs a nonsingular form".into())?;
    let basis: Vec<Vector> = (0..q.dim()).map(|i| unit(spec, q.dim(), i)).collect();
    let mut acc = spec.zero();
    for (x, y) in symplectic_basis(q, &basis)? {
        acc = acc + q.q(&x) * q.q(&y);
    }
    let tr = acc.trace().expect("finite field");
    if tr.is_zero() {
        Ok(spec.zero())
    } else {
        Ok(spec
            .enumerate()?
            .into_iter()
            .find(|e| e.trace().is_some_and(|t| t.is_one()))
            .expect("trace is onto"))
    }
}

/// The k^2-spans of two lists of scalars coincide.
pub fn same_k2_span(a: &[FieldElement], b: &[FieldElement]) -> bool {
    let ra = k2_linear_rank(a);
    let rb = k2_linear_rank(b);
    let mut all = a.to_vec();
    all.extend_from_slice(b);
    ra == rb && k2_linear_rank(&all) == ra
}

pub fn is_isometric(q1: &QuadForm, q2: &QuadForm) -> Result<bool> {
    if q1.spec() != q2.spec() {
        return Err(Error::Field(crate::field::FieldError::SpecMismatch(q1.spec(), q2.spec())));
    }
    if q1.dim() != q2.dim() {
        return Ok(false);
    }
    let (w1, w2) = (witt_decompose(q1)?, witt_decompose(q2)?);
    if (w1.m, w1.d, w1.aniso_pairs.len(), w1.aniso_diag.len()) != (w2.m, w2.d, w2.aniso_pairs.len(), w2.aniso_diag.len()) {
        return Ok(false);
    }
    let spec = q1.spec();
    if !w1.aniso_pairs.is_empty() {
        let a1 = arf_invariant(&QuadForm::from_signature(spec, &w1.aniso_pairs, &[]))?;
        let a2 = arf_invariant(&QuadForm::from_signature(spec, &w2.aniso_pairs, &[]))?;
        if a1 != a2 {
            return Ok(false);
        }
    }
    Ok(same_k2_span(&w1.aniso_diag, &w2.aniso_diag))
}

/// Vectors V with B(u_i, v_j) = delta_ij, B(v_i, v_j) = 0, and q(v_i) = 0 whenever q(u_i) = 0.
pub fn nonsingular_completion(q: &QuadForm, u: &[Vector]) -> Result<Vec<Vector>> {
    let spec = q.spec();
    let n = q.dim();
    for v in u {
        check_dim(n, v.len())?;
    }
    for (i, a) in u.iter().enumerate() {
        for b in &u[i..] {
            precondition(q.b(a, b).is_zero(), || "U is not totally singular".into())?;
        }
    }
    let g = q.gram();
    let rows: Vec<Vector> = u.iter().map(|x| g.mul_vec(x)).collect();
    let l = u.len();
    if l == 0 {
        return Ok(vec![]);
    }
    let sys = Mat::from_rows(spec, &rows);
    precondition(sys.rank() == l, || "U meets the radical or is dependent".into())?;
    let mut v: Vec<Vector> = Vec::with_capacity(l);
    for j in 0..l {
        let x = sys.solve(&unit(spec, l, j)).expect("full row rank");
        v.push(x);
    }
    for j in 0..l {
        let mut vj = v[j].clone();
        for i in 0..j {
            let c = q.b(&v[i], &v[j]);
            if !c.is_zero() {
                vj = vec_add(&vj, &vec_scale(c, &u[i]));
            }
        }
        v[j] = vj;
    }
    for i in 0..l {
        if q.q(&u[i]).is_zero() {
            let c = q.q(&v[i]);
            v[i] = vec_add(&v[i], &vec_scale(c, &u[i]));
        }
    }
    Ok(v)
}

/// One application of each signature rewrite rule at each position.
pub fn rewrite_equivalences(q: &QuadForm) -> Vec<QuadForm> {
    let Some(sig) = q.signature() else {
        return vec![];
    };
    let spec = q.spec();
    let mut scalars = vec![spec.one()];
    if !spec.t().is_one() {
        scalars.push(spec.t());
    }
    let mut out = Vec::new();
    let mk = |pairs: Vec<(FieldElement, FieldElement)>| QuadForm::from_signature(spec, &pairs, &sig.diag);
    for i in 0..sig.pairs.len() {
        let (a, a2) = sig.pairs[i];
        let mut p = sig.pairs.clone();
        p[i] = (a, a + a2 + spec.one());
        out.push(mk(p));
        let mut p = sig.pairs.clone();
        p[i] = (a2, a);
        out.push(mk(p));
        for alpha in &scalars {
            let sq = alpha.square();
            let mut p = sig.pairs.clone();
            p[i] = (sq * a, sq.inv() * a2);
            out.push(mk(p));
        }
        for j in i + 1..sig.pairs.len() {
            let (b, b2) = sig.pairs[j];
            let mut p = sig.pairs.clone();
            p[i] = (a + b, a2);
            p[j] = (b, a2 + b2);
            out.push(mk(p));
        }
    }
    out
}

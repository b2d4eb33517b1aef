//! Brute-force conjugacy classes of involutions, used as the reference for the
//! predicates. Two routes: a full group table, or for the zero form (where
//! O(q) = GL_n) a direct construction of involutions as I + N, N^2 = 0.

use rayon::prelude::*;
use serde::Serialize;

use crate::compact::{CMat, Gf};
use crate::error::{Error, Result};
use crate::linalg::{Mat, Vector};
use crate::orthogroup::{involutions_of, GroupTable};
use crate::quadspace::QuadForm;

/// Whether some g in the table satisfies g phi1 = phi2 g.
pub fn oracle_conjugate(table: &GroupTable, phi1: &CMat, phi2: &CMat) -> bool {
    let gf = table.gf();
    table.keys().par_iter().any(|&k| {
        let g = CMat::unpack(k, table.n(), gf.m);
        g.mul(phi1, &gf) == phi2.mul(&g, &gf)
    })
}

pub fn centralizer_of(table: &GroupTable, phi: &CMat) -> Vec<CMat> {
    let gf = table.gf();
    table
        .keys()
        .par_iter()
        .filter_map(|&k| {
            let g = CMat::unpack(k, table.n(), gf.m);
            (g.mul(phi, &gf) == phi.mul(&g, &gf)).then_some(g)
        })
        .collect()
}

pub fn centralizer_order(table: &GroupTable, phi: &CMat) -> u64 {
    let gf = table.gf();
    table
        .keys()
        .par_iter()
        .filter(|&&k| {
            let g = CMat::unpack(k, table.n(), gf.m);
            g.mul(phi, &gf) == phi.mul(&g, &gf)
        })
        .count() as u64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OracleMethod {
    Table,
    GeneralLinear,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassInfo {
    #[serde(skip)]
    pub rep: CMat,
    pub size: u64,
    pub centralizer_order: u64,
}

#[derive(Clone, Debug)]
pub struct InvolutionClasses {
    pub form: QuadForm,
    pub gf: Gf,
    pub group_order: u64,
    /// packed involutions, sorted
    pub involutions: Vec<u128>,
    pub class_of: Vec<usize>,
    pub classes: Vec<ClassInfo>,
    pub method: OracleMethod,
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

struct Orbits<'a> {
    gf: Gf,
    n: usize,
    invs: &'a [u128],
    gens: Vec<(CMat, CMat)>,
}

impl Orbits<'_> {
    fn orbit(&self, start: usize, class_of: &mut [usize], id: usize) -> u64 {
        let mut stack = vec![start];
        class_of[start] = id;
        let mut size = 1u64;
        while let Some(i) = stack.pop() {
            let x = CMat::unpack(self.invs[i], self.n, self.gf.m);
            for (g, gi) in &self.gens {
                let y = g.mul(&x, &self.gf).mul(gi, &self.gf);
                let j = self.invs.binary_search(&y.pack(self.gf.m)).expect("conjugate of an involution");
                if class_of[j] == usize::MAX {
                    class_of[j] = id;
                    size += 1;
                    stack.push(j);
                }
            }
        }
        size
    }

    /// Orbit decomposition, with each orbit checked against |G| / |C(rep)|.
    /// Adds generators and restarts when an orbit comes up short.
    fn classes(
        &mut self,
        group_order: u64,
        centralizer: &dyn Fn(&CMat) -> u64,
        more_gens: &mut dyn FnMut() -> Option<(CMat, CMat)>,
    ) -> Result<(Vec<usize>, Vec<ClassInfo>)> {
        'restart: loop {
            let mut class_of = vec![usize::MAX; self.invs.len()];
            let mut classes = Vec::new();
            for i in 0..self.invs.len() {
                if class_of[i] != usize::MAX {
                    continue;
                }
                let size = self.orbit(i, &mut class_of, classes.len());
                let rep = CMat::unpack(self.invs[i], self.n, self.gf.m);
                let c = centralizer(&rep);
                if size * c != group_order {
                    match more_gens() {
                        Some(g) => {
                            self.gens.push(g);
                            continue 'restart;
                        }
                        None => {
                            return Err(Error::Precondition(format!(
                                "orbit of size {size} with centralizer {c} does not fill a group of order {group_order}"
                            )))
                        }
                    }
                }
                classes.push(ClassInfo { rep, size, centralizer_order: c });
            }
            return Ok((class_of, classes));
        }
    }
}

fn is_zero_form(q: &QuadForm) -> bool {
    let c = q.coeffs();
    (0..q.dim()).all(|i| (i..q.dim()).all(|j| c[(i, j)].is_zero()))
}

impl InvolutionClasses {
    /// Route selection: the zero form goes through GL_n, anything else through
    /// a full table.
    pub fn for_form(q: &QuadForm) -> Result<InvolutionClasses> {
        if q.dim() > 0 && is_zero_form(q) {
            return Self::general_linear(q);
        }
        let t = crate::orthogroup::enumerate_group(q)?;
        Self::from_table(&t)
    }

    pub fn from_table(table: &GroupTable) -> Result<InvolutionClasses> {
        let gf = table.gf();
        let n = table.n();
        let mut involutions: Vec<u128> = involutions_of(table).iter().map(|g| g.pack(gf.m)).collect();
        involutions.sort_unstable();
        let len = table.len();
        let mut next = 1u64;
        let mut pick = move || {
            let i = (next.wrapping_mul(GOLDEN) % len as u64) as usize;
            next += 1;
            i
        };
        let gen_of = |i: usize| {
            let g = table.get(i);
            let gi = g.inverse(&gf).expect("group element");
            (g, gi)
        };
        let gens: Vec<(CMat, CMat)> = (0..8.min(len)).map(|_| gen_of(pick())).collect();
        let mut orbits = Orbits { gf, n, invs: &involutions, gens };
        let order = len as u64;
        let mut extra = 0;
        let (class_of, classes) = orbits.classes(
            order,
            &|rep| centralizer_order(table, rep),
            &mut || {
                extra += 1;
                (extra <= 64).then(|| gen_of(pick()))
            },
        )?;
        Ok(InvolutionClasses {
            form: table.form().clone(),
            gf,
            group_order: order,
            involutions,
            class_of,
            classes,
            method: OracleMethod::Table,
        })
    }

    /// For q = 0 every invertible map is an isometry.
    pub fn general_linear(q: &QuadForm) -> Result<InvolutionClasses> {
        let spec = q.spec();
        let gf = Gf::from_spec(spec).ok_or_else(|| Error::Precondition("needs a finite field".into()))?;
        let n = q.dim();
        if !is_zero_form(q) || n > crate::compact::MAX_N {
            return Err(Error::Precondition("general linear route needs the zero form in dimension at most 8".into()));
        }
        let qn = gf.size() as u64;
        let mut order: u64 = 1;
        for i in 0..n {
            order = order
                .checked_mul(qn.pow(n as u32) - qn.pow(i as u32))
                .ok_or_else(|| Error::BudgetExceeded("group order overflows".into()))?;
        }
        let mut involutions = gl_involutions(gf, n)?;
        involutions.sort_unstable();
        involutions.dedup();
        let mut gens = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                for b in 0..gf.m {
                    let mut g = CMat::identity(n);
                    g.set(i, j, 1 << b);
                    gens.push((g, g.inverse(&gf).expect("elementary")));
                }
            }
        }
        let omega = primitive(&gf);
        let mut d = CMat::identity(n);
        d.set(0, 0, omega);
        gens.push((d, d.inverse(&gf).expect("diagonal")));
        let mut orbits = Orbits { gf, n, invs: &involutions, gens };
        let (class_of, classes) = orbits.classes(order, &|rep| gl_centralizer_order(gf, rep), &mut || None)?;
        Ok(InvolutionClasses {
            form: q.clone(),
            gf,
            group_order: order,
            involutions,
            class_of,
            classes,
            method: OracleMethod::GeneralLinear,
        })
    }

    pub fn len(&self) -> usize {
        self.involutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.involutions.is_empty()
    }

    pub fn get(&self, i: usize) -> CMat {
        CMat::unpack(self.involutions[i], self.form.dim(), self.gf.m)
    }

    pub fn matrix(&self, i: usize) -> Mat {
        self.get(i).to_mat(&self.gf)
    }

    pub fn index_of(&self, g: &CMat) -> Option<usize> {
        self.involutions.binary_search(&g.pack(self.gf.m)).ok()
    }

    pub fn conjugate(&self, i: usize, j: usize) -> bool {
        self.class_of[i] == self.class_of[j]
    }

    /// Class sizes are |G| / |C(rep)| and add up to the number of involutions.
    pub fn class_equation_holds(&self) -> bool {
        let total: u64 = self.classes.iter().map(|c| c.size).sum();
        total == self.involutions.len() as u64
            && self.classes.iter().all(|c| c.size * c.centralizer_order == self.group_order)
    }
}

fn primitive(gf: &Gf) -> u16 {
    let order = gf.size() - 1;
    (1..gf.size() as u16)
        .find(|&w| {
            let mut x = w;
            let mut k = 1;
            while x != 1 {
                x = gf.mul(x, w);
                k += 1;
            }
            k == order
        })
        .expect("multiplicative group is cyclic")
}

/// All I + N with N^2 = 0, N != 0: N = C F where the columns of C are an
/// echelon basis of the image and the rows of F are independent and vanish on
/// that image.
fn gl_involutions(gf: Gf, n: usize) -> Result<Vec<u128>> {
    let spec = gf.spec();
    let mut out = Vec::new();
    for k in 1..=n / 2 {
        for c in subspaces(spec, n, k)? {
            // annihilator of the image, as row vectors
            let ann = Mat::from_rows(spec, &c).kernel();
            let cmat = Mat::from_cols(spec, n, &c);
            for f_rows in independent_tuples(spec, &ann, k)? {
                let f = Mat::from_rows(spec, &f_rows);
                let nm = cmat.mul(&f);
                let g = nm.add(&Mat::identity(spec, n));
                out.push(CMat::from_mat(&g).expect("small").pack(gf.m));
            }
        }
    }
    Ok(out)
}

fn all_vectors(spec: crate::field::FieldSpec, basis: &[Vector]) -> Result<Vec<Vector>> {
    let elems = spec.enumerate()?;
    let n = basis.first().map_or(0, |b| b.len());
    let mut out = vec![vec![spec.zero(); n]];
    for b in basis {
        let mut next = Vec::with_capacity(out.len() * elems.len());
        for v in &out {
            for e in &elems {
                next.push(crate::linalg::vec_add(v, &crate::linalg::vec_scale(*e, b)));
            }
        }
        out = next;
    }
    Ok(out)
}

/// Echelon bases of all k-dimensional subspaces of k^n.
fn subspaces(spec: crate::field::FieldSpec, n: usize, k: usize) -> Result<Vec<Vec<Vector>>> {
    let full: Vec<Vector> = (0..n).map(|i| crate::linalg::unit(spec, n, i)).collect();
    let vecs = all_vectors(spec, &full)?;
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for tuple in independent_tuples_from(&vecs, n, k, spec) {
        let s = crate::linalg::Subspace::span(spec, n, &tuple);
        if seen.insert(s.basis().to_vec()) {
            out.push(s.basis().to_vec());
        }
    }
    Ok(out)
}

fn independent_tuples(spec: crate::field::FieldSpec, basis: &[Vector], k: usize) -> Result<Vec<Vec<Vector>>> {
    let vecs = all_vectors(spec, basis)?;
    let n = basis.first().map_or(0, |b| b.len());
    Ok(independent_tuples_from(&vecs, n, k, spec))
}

fn independent_tuples_from(vecs: &[Vector], n: usize, k: usize, spec: crate::field::FieldSpec) -> Vec<Vec<Vector>> {
    let mut out = Vec::new();
    let mut cur: Vec<Vector> = Vec::new();
    fn rec(
        vecs: &[Vector],
        n: usize,
        k: usize,
        spec: crate::field::FieldSpec,
        cur: &mut Vec<Vector>,
        out: &mut Vec<Vec<Vector>>,
    ) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in vecs {
            cur.push(v.clone());
            if Mat::from_rows(spec, cur).rank() == cur.len() {
                rec(vecs, n, k, spec, cur, out);
            }
            cur.pop();
        }
    }
    rec(vecs, n, k, spec, &mut cur, &mut out);
    out
}

/// |C_GL(x)|: the commutant {g : g x = x g} is a subspace of dimension D;
/// count its invertible members.
fn gl_centralizer_order(gf: Gf, x: &CMat) -> u64 {
    let spec = gf.spec();
    let n = x.n;
    let xm = x.to_mat(&gf);
    let mut eqs = Mat::zeros(spec, n * n, n * n);
    // unknown g_ab at index a*n + b; equation (g x + x g)_ij = 0
    for i in 0..n {
        for j in 0..n {
            let e = i * n + j;
            for l in 0..n {
                eqs[(e, i * n + l)] = eqs[(e, i * n + l)] + xm[(l, j)];
                eqs[(e, l * n + j)] = eqs[(e, l * n + j)] + xm[(i, l)];
            }
        }
    }
    let basis: Vec<CMat> = eqs
        .kernel()
        .iter()
        .map(|v| {
            let mut g = CMat::zero(n);
            for a in 0..n {
                for b in 0..n {
                    g.set(a, b, v[a * n + b].code().expect("finite"));
                }
            }
            g
        })
        .collect();
    let q = gf.size() as usize;
    // scaled copies of each basis matrix
    let scaled: Vec<Vec<CMat>> = basis
        .iter()
        .map(|b| {
            (0..q as u16)
                .map(|c| {
                    let mut s = CMat::zero(n);
                    for a in 0..n {
                        for bb in 0..n {
                            s.set(a, bb, gf.mul(b.get(a, bb), c));
                        }
                    }
                    s
                })
                .collect()
        })
        .collect();
    let xor = |a: &mut CMat, b: &CMat| {
        for j in 0..n {
            for i in 0..n {
                a.c[j][i] ^= b.c[j][i];
            }
        }
    };
    let d = basis.len();
    let mut digits = vec![0usize; d];
    let mut cur = CMat::zero(n);
    let mut count = 0u64;
    loop {
        if cur.rank(&gf) == n {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == d {
                return count;
            }
            let old = digits[i];
            let new = (old + 1) % q;
            xor(&mut cur, &scaled[i][old]);
            xor(&mut cur, &scaled[i][new]);
            digits[i] = new;
            if new != 0 {
                break;
            }
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    fn zero_form(spec: FieldSpec, n: usize) -> QuadForm {
        QuadForm::from_signature(spec, &[], &vec![spec.zero(); n])
    }

    #[test]
    fn gl_route_matches_table_route() {
        let k = FieldSpec::gf2();
        for n in 2..=4 {
            let q = zero_form(k, n);
            let a = InvolutionClasses::general_linear(&q).unwrap();
            let b = InvolutionClasses::from_table(&crate::orthogroup::enumerate_group(&q).unwrap()).unwrap();
            assert_eq!(a.involutions, b.involutions);
            assert_eq!(a.group_order, b.group_order);
            assert_eq!(a.classes.len(), b.classes.len());
            assert!(a.class_equation_holds() && b.class_equation_holds());
        }
    }

    #[test]
    fn gl2_over_gf4() {
        let q = zero_form(FieldSpec::gf4(), 2);
        let c = InvolutionClasses::general_linear(&q).unwrap();
        assert_eq!(c.group_order, 180);
        // 5 image lines, 3 functionals vanishing on each
        assert_eq!(c.len(), 15);
        assert_eq!(c.classes.len(), 1);
    }
}

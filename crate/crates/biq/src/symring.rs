//! Truncated multivariate rewrite rings over a finite base field.
//!
//! A [`SymRing`] is a polynomial ring with one rewrite discipline per
//! generator: `Unit` (Laurent exponents), `UnitCyclic(n)` (`x^n = 1`),
//! `Nilpotent(n)` (`x^n = 0`), `Rewrite(n, r)` (`x^n` rewrites to a
//! polynomial of x-degree < n in the generator itself and arbitrary earlier
//! generators), or `Free`. Rules are triangular, so normal forms terminate
//! and are unique; every expression is stored in normal form.

use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

use crate::field::{Field, FieldElem};
use crate::ring::Ring;
use crate::testring::{TestRing, TrElem};
use crate::Error;

/// Rewrite discipline of one generator.
#[derive(Clone, Debug)]
pub enum GenAttr {
    /// Invertible with no relation; exponents may be negative.
    Unit,
    /// Invertible with `x^n = 1`; exponents reduced mod n.
    UnitCyclic(u32),
    /// `x^n = 0`; higher powers vanish.
    Nilpotent(u32),
    /// `x^n` rewrites to the stored polynomial (x-degree < n, generators of
    /// index <= this one only).
    Rewrite(u32, Vec<(Vec<i32>, FieldElem)>),
    /// No relation, no inverse.
    Free,
}

struct Inner {
    base: Field,
    gens: Vec<(String, GenAttr)>,
}

/// A truncated rewrite ring, cheap to clone.
#[derive(Clone)]
pub struct SymRing(Rc<Inner>);

/// An element of a [`SymRing`], always in normal form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SymExpr {
    pub terms: BTreeMap<Vec<i32>, FieldElem>,
}

impl fmt::Debug for SymRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SymRing[{}]",
            self.0
                .gens
                .iter()
                .map(|(n, _)| n.as_str())
                .collect::<Vec<_>>()
                .join(",")
        )
    }
}

impl SymRing {
    pub fn new(base: Field) -> SymRing {
        SymRing(Rc::new(Inner { base, gens: Vec::new() }))
    }

    pub fn base(&self) -> &Field {
        &self.0.base
    }

    pub fn num_gens(&self) -> usize {
        self.0.gens.len()
    }

    pub fn gen_name(&self, i: usize) -> &str {
        &self.0.gens[i].0
    }

    pub fn gen_attr(&self, i: usize) -> &GenAttr {
        &self.0.gens[i].1
    }

    pub fn gen_index(&self, name: &str) -> Option<usize> {
        self.0.gens.iter().position(|(n, _)| n == name)
    }

    /// Extends by a generator with a non-rewrite attribute.
    pub fn with_gen(&self, name: &str, attr: GenAttr) -> SymRing {
        assert!(!matches!(attr, GenAttr::Rewrite(..)), "use with_rewrite_gen");
        assert!(self.gen_index(name).is_none(), "duplicate generator {name}");
        let mut gens = self.0.gens.clone();
        gens.push((name.to_string(), attr));
        SymRing(Rc::new(Inner { base: self.0.base.clone(), gens }))
    }

    /// Extends by a generator `x` with rule `x^n = rhs(self-and-earlier)`;
    /// the closure receives the extended ring to build the right-hand side.
    pub fn with_rewrite_gen(
        &self,
        name: &str,
        n: u32,
        rhs: impl FnOnce(&SymRing) -> SymExpr,
    ) -> SymRing {
        let tmp = self.with_gen(name, GenAttr::Free);
        let i = tmp.num_gens() - 1;
        let r = rhs(&tmp);
        for (exps, _) in &r.terms {
            assert!(
                exps[i] >= 0 && (exps[i] as u32) < n,
                "rewrite rhs must have {name}-degree < {n}"
            );
            assert!(exps.iter().all(|&e| e >= 0), "rewrite rhs must be polynomial");
        }
        let mut gens = self.0.gens.clone();
        gens.push((
            name.to_string(),
            GenAttr::Rewrite(n, r.terms.into_iter().collect()),
        ));
        SymRing(Rc::new(Inner { base: self.0.base.clone(), gens }))
    }

    pub fn same_ring(&self, other: &SymRing) -> bool {
        Rc::ptr_eq(&self.0, &other.0)
    }

    /// The i-th generator as an expression.
    pub fn gen(&self, i: usize) -> SymExpr {
        assert!(i < self.num_gens());
        let mut exps = vec![0; self.num_gens()];
        exps[i] = 1;
        self.monomial(exps, self.0.base.one())
    }

    pub fn gen_named(&self, name: &str) -> SymExpr {
        self.gen(self.gen_index(name).unwrap_or_else(|| panic!("no generator {name}")))
    }

    pub fn constant(&self, c: FieldElem) -> SymExpr {
        self.monomial(vec![0; self.num_gens()], c)
    }

    pub fn monomial(&self, exps: Vec<i32>, coeff: FieldElem) -> SymExpr {
        let mut terms = BTreeMap::new();
        terms.insert(exps, coeff);
        self.normalize_terms(terms.into_iter().collect())
    }

    /// Reduces a bag of raw terms to the unique normal form.
    fn normalize_terms(&self, work: Vec<(Vec<i32>, FieldElem)>) -> SymExpr {
        let base = &self.0.base;
        let mut acc: BTreeMap<Vec<i32>, FieldElem> = BTreeMap::new();
        let mut stack = work;
        'outer: while let Some((mut exps, mut coeff)) = stack.pop() {
            if base.is_zero(&coeff) {
                continue;
            }
            for i in 0..self.num_gens() {
                match &self.0.gens[i].1 {
                    GenAttr::Unit => {}
                    GenAttr::UnitCyclic(n) => {
                        exps[i] = exps[i].rem_euclid(*n as i32);
                    }
                    GenAttr::Nilpotent(n) => {
                        assert!(exps[i] >= 0, "nilpotent generator has no inverse");
                        if exps[i] as u32 >= *n {
                            continue 'outer;
                        }
                    }
                    GenAttr::Free => {
                        assert!(exps[i] >= 0, "free generator has no inverse");
                    }
                    GenAttr::Rewrite(n, rhs) => {
                        assert!(exps[i] >= 0, "rewrite generator has no inverse");
                        if exps[i] as u32 >= *n {
                            exps[i] -= *n as i32;
                            for (rexp, rcoeff) in rhs {
                                let mut e = exps.clone();
                                for (j, re) in rexp.iter().enumerate() {
                                    e[j] += re;
                                }
                                stack.push((e, base.mul(&coeff, rcoeff)));
                            }
                            continue 'outer;
                        }
                    }
                }
            }
            let entry = acc.entry(exps).or_insert_with(|| base.zero());
            *entry = base.add(entry, &coeff);
            coeff = base.zero();
            let _ = coeff;
        }
        acc.retain(|_, c| !base.is_zero(c));
        SymExpr { terms: acc }
    }

    /// Substitutes expressions for generators (identity where absent),
    /// checking that images respect the generator attributes.
    pub fn substitute(
        &self,
        e: &SymExpr,
        images: &BTreeMap<String, SymExpr>,
        target: &SymRing,
    ) -> Result<SymExpr, Error> {
        // attribute checks
        for (name, img) in images {
            let i = self
                .gen_index(name)
                .ok_or_else(|| Error::RingMismatch(format!("no generator {name}")))?;
            match &self.0.gens[i].1 {
                GenAttr::Unit => {
                    if target.inv(img).is_none() {
                        return Err(Error::AttributeViolation {
                            gen: name.clone(),
                            detail: "image of a unit generator is not invertible".into(),
                        });
                    }
                }
                GenAttr::UnitCyclic(n) => {
                    if target.pow(img, *n as u64) != target.one() {
                        return Err(Error::AttributeViolation {
                            gen: name.clone(),
                            detail: format!("image^{n} != 1"),
                        });
                    }
                }
                GenAttr::Nilpotent(n) => {
                    if !target.is_zero(&target.pow(img, *n as u64)) {
                        return Err(Error::AttributeViolation {
                            gen: name.clone(),
                            detail: format!("image^{n} != 0"),
                        });
                    }
                }
                GenAttr::Rewrite(n, rhs) => {
                    let mut rhs_sub = target.zero();
                    for (rexp, rcoeff) in rhs {
                        let mut t = target.constant(rcoeff.clone());
                        for (j, &re) in rexp.iter().enumerate() {
                            if re != 0 {
                                let gj = self.gen_name(j);
                                let img_j = images
                                    .get(gj)
                                    .cloned()
                                    .unwrap_or_else(|| target.gen_named(gj));
                                t = target.mul(&t, &target.pow_i(&img_j, re as i64));
                            }
                        }
                        rhs_sub = target.add(&rhs_sub, &t);
                    }
                    if target.pow(img, *n as u64) != rhs_sub {
                        return Err(Error::AttributeViolation {
                            gen: name.clone(),
                            detail: format!("image^{n} does not satisfy the rewrite relation"),
                        });
                    }
                }
                GenAttr::Free => {}
            }
        }
        let mut out = target.zero();
        for (exps, coeff) in &e.terms {
            let mut t = target.constant(coeff.clone());
            for (i, &ei) in exps.iter().enumerate() {
                if ei != 0 {
                    let name = self.gen_name(i);
                    let img = images
                        .get(name)
                        .cloned()
                        .unwrap_or_else(|| target.gen_named(name));
                    t = target.mul(&t, &target.pow_i(&img, ei as i64));
                }
            }
            out = target.add(&out, &t);
        }
        Ok(out)
    }

    /// Evaluates in a test ring, checking attributes concretely.
    pub fn eval_testring(
        &self,
        e: &SymExpr,
        images: &BTreeMap<String, TrElem>,
        target: &TestRing,
    ) -> Result<TrElem, Error> {
        for i in 0..self.num_gens() {
            let name = self.gen_name(i);
            let img = images.get(name).ok_or_else(|| {
                Error::AttributeViolation {
                    gen: name.to_string(),
                    detail: "no image provided".into(),
                }
            })?;
            match &self.0.gens[i].1 {
                GenAttr::Unit => {
                    if !target.is_unit(img) {
                        return Err(Error::AttributeViolation {
                            gen: name.to_string(),
                            detail: "image of a unit generator is not a unit".into(),
                        });
                    }
                }
                GenAttr::UnitCyclic(n) => {
                    if target.pow(img, *n as u64) != target.one() {
                        return Err(Error::AttributeViolation {
                            gen: name.to_string(),
                            detail: format!("image^{n} != 1"),
                        });
                    }
                }
                GenAttr::Nilpotent(n) => {
                    if !target.is_zero(&target.pow(img, *n as u64)) {
                        return Err(Error::AttributeViolation {
                            gen: name.to_string(),
                            detail: format!("image^{n} != 0"),
                        });
                    }
                }
                GenAttr::Rewrite(n, rhs) => {
                    let mut rhs_val = target.zero();
                    for (rexp, rcoeff) in rhs {
                        let mut t = target.from_field(rcoeff);
                        for (j, &re) in rexp.iter().enumerate() {
                            if re != 0 {
                                let img_j = images.get(self.gen_name(j)).ok_or_else(|| {
                                    Error::AttributeViolation {
                                        gen: self.gen_name(j).to_string(),
                                        detail: "no image provided".into(),
                                    }
                                })?;
                                let p = if re >= 0 {
                                    target.pow(img_j, re as u64)
                                } else {
                                    target.pow(&target.inv(img_j).unwrap(), (-re) as u64)
                                };
                                t = target.mul(&t, &p);
                            }
                        }
                        rhs_val = target.add(&rhs_val, &t);
                    }
                    if target.pow(img, *n as u64) != rhs_val {
                        return Err(Error::AttributeViolation {
                            gen: name.to_string(),
                            detail: format!("image^{n} does not satisfy the rewrite relation"),
                        });
                    }
                }
                GenAttr::Free => {}
            }
        }
        let mut out = target.zero();
        for (exps, coeff) in &e.terms {
            let mut t = target.from_field(coeff);
            for (i, &ei) in exps.iter().enumerate() {
                if ei != 0 {
                    let img = &images[self.gen_name(i)];
                    let p = if ei >= 0 {
                        target.pow(img, ei as u64)
                    } else {
                        target.pow(&target.inv(img).unwrap(), (-ei) as u64)
                    };
                    t = target.mul(&t, &p);
                }
            }
            out = target.add(&out, &t);
        }
        Ok(out)
    }

    pub fn display(&self, e: &SymExpr) -> String {
        if e.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (exps, coeff) in &e.terms {
            let mut s = String::new();
            let is_const_one = coeff == &self.0.base.one();
            let has_gens = exps.iter().any(|&e| e != 0);
            if !is_const_one || !has_gens {
                s.push_str(&format!("{:?}", coeff.0));
            }
            for (i, &ei) in exps.iter().enumerate() {
                if ei != 0 {
                    if !s.is_empty() {
                        s.push('*');
                    }
                    s.push_str(self.gen_name(i));
                    if ei != 1 {
                        s.push_str(&format!("^{ei}"));
                    }
                }
            }
            parts.push(s);
        }
        parts.join(" + ")
    }
}

impl Ring for SymRing {
    type El = SymExpr;

    fn zero(&self) -> SymExpr {
        SymExpr { terms: BTreeMap::new() }
    }

    fn one(&self) -> SymExpr {
        self.constant(self.0.base.one())
    }

    fn add(&self, a: &SymExpr, b: &SymExpr) -> SymExpr {
        let mut terms: Vec<(Vec<i32>, FieldElem)> =
            a.terms.iter().map(|(e, c)| (e.clone(), c.clone())).collect();
        terms.extend(b.terms.iter().map(|(e, c)| (e.clone(), c.clone())));
        self.normalize_terms(terms)
    }

    fn neg(&self, a: &SymExpr) -> SymExpr {
        SymExpr {
            terms: a
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), self.0.base.neg(c)))
                .collect(),
        }
    }

    fn mul(&self, a: &SymExpr, b: &SymExpr) -> SymExpr {
        let mut terms = Vec::with_capacity(a.terms.len() * b.terms.len());
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                let exps: Vec<i32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                terms.push((exps, self.0.base.mul(ca, cb)));
            }
        }
        self.normalize_terms(terms)
    }

    fn from_int(&self, n: i64) -> SymExpr {
        self.constant(self.0.base.from_int(n))
    }

    /// Inverts expressions of the form `m u (1 + n)` with m a Laurent
    /// monomial, u of small finite multiplicative order, and n nilpotent
    /// (the shape every invertible coefficient in this crate takes).
    fn inv(&self, a: &SymExpr) -> Option<SymExpr> {
        if a.terms.is_empty() {
            return None;
        }
        // strip the common power of each Laurent/cyclic generator
        let mut strip = vec![0i32; self.num_gens()];
        for (i, s) in strip.iter_mut().enumerate() {
            if matches!(self.0.gens[i].1, GenAttr::Unit | GenAttr::UnitCyclic(_)) {
                *s = a.terms.keys().map(|e| e[i]).min().unwrap();
            }
        }
        if strip.iter().any(|&s| s != 0) {
            let shift = self.monomial(strip.iter().map(|&s| -s).collect(), self.0.base.one());
            let rest = self.mul(&shift, a);
            let rest_inv = self.inv(&rest)?;
            return Some(self.mul(&shift, &rest_inv));
        }
        let invertible_monomial = |exps: &Vec<i32>, coeff: &FieldElem| -> Option<SymExpr> {
            // split into Laurent-invertible generators and rewrite-bound ones
            let mut easy = vec![0i32; exps.len()];
            let mut hard = vec![0i32; exps.len()];
            for (i, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match self.0.gens[i].1 {
                    GenAttr::Unit | GenAttr::UnitCyclic(_) => easy[i] = e,
                    GenAttr::Rewrite(..) if e > 0 => hard[i] = e,
                    _ => return None,
                }
            }
            let cinv = self.0.base.inv(coeff)?;
            let easy_inv = self.monomial(easy.iter().map(|&e| -e).collect(), cinv);
            if hard.iter().all(|&e| e == 0) {
                return Some(easy_inv);
            }
            // rewrite-bound units (roots of unity) have small finite order
            let h = self.monomial(hard, self.0.base.one());
            let mut pw = h.clone();
            for _ in 1..24 {
                let next = self.mul(&pw, &h);
                if next == self.one() {
                    return Some(self.mul(&easy_inv, &pw));
                }
                pw = next;
            }
            None
        };
        for (exps, coeff) in &a.terms {
            let Some(minv) = invertible_monomial(exps, coeff) else { continue };
            // a = m (1 + n); invert the second factor by geometric series
            let n = self.sub(&self.mul(&minv, a), &self.one());
            let mut acc = self.one();
            let mut pw = self.neg(&n);
            let mut steps = 0;
            while !self.is_zero(&pw) {
                acc = self.add(&acc, &pw);
                pw = self.mul(&pw, &self.neg(&n));
                steps += 1;
                if steps > 64 {
                    break;
                }
            }
            if steps <= 64 {
                return Some(self.mul(&minv, &acc));
            }
        }
        // finite multiplicative order (rewrite-constrained roots of unity)
        let mut pw = a.clone();
        for _ in 1..24 {
            let next = self.mul(&pw, a);
            if next == self.one() {
                return Some(pw);
            }
            pw = next;
        }
        None
    }

    fn is_zero(&self, a: &SymExpr) -> bool {
        a.terms.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn char3_ring() -> SymRing {
        let f3 = Field::new(3, 1).unwrap();
        SymRing::new(f3)
            .with_gen("b", GenAttr::Unit)
            .with_gen("c", GenAttr::Free)
            .with_gen("d", GenAttr::Nilpotent(3))
    }

    #[test]
    fn nilpotent_cube_vanishes() {
        let r = char3_ring();
        let d = r.gen_named("d");
        let d3 = r.mul(&r.mul(&d, &d), &d);
        assert!(r.is_zero(&d3));
    }

    #[test]
    fn unit_cyclic_reduces() {
        let f3 = Field::new(3, 1).unwrap();
        let r = SymRing::new(f3).with_gen("a", GenAttr::UnitCyclic(3));
        let a = r.gen_named("a");
        assert_eq!(r.pow(&a, 4), a);
        assert_eq!(r.pow(&a, 3), r.one());
        // inverse of a is a^2
        assert_eq!(r.inv(&a).unwrap(), r.pow(&a, 2));
    }

    #[test]
    fn rewrite_zeta_cubed() {
        // zeta^3 = lambda*zeta + 1 over F_2
        let f2 = Field::new(2, 1).unwrap();
        let r = SymRing::new(f2).with_gen("lam", GenAttr::Unit).with_rewrite_gen(
            "zeta",
            3,
            |rr| {
                let lam = rr.gen_named("lam");
                let z = rr.gen_named("zeta");
                rr.add(&rr.mul(&lam, &z), &rr.one())
            },
        );
        let z = r.gen_named("zeta");
        let z3 = r.pow(&z, 3);
        let lam = r.gen_named("lam");
        let expect = r.add(&r.mul(&lam, &z), &r.one());
        assert_eq!(z3, expect);
        // zeta^4 = lambda*zeta^2 + zeta
        let z4 = r.pow(&z, 4);
        let expect4 = r.add(&r.mul(&lam, &r.pow(&z, 2)), &z);
        assert_eq!(z4, expect4);
    }

    #[test]
    fn normalize_idempotent_and_multiplicative() {
        // normal form is closed under ring operations: normalize(a*b) is
        // computed from already-normal inputs, so check ring identities on
        // pseudo-random expressions instead.
        let r = char3_ring();
        let mut state = 12345u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            state >> 33
        };
        let rand_expr = |next: &mut dyn FnMut() -> u64| {
            let mut e = r.zero();
            for _ in 0..3 {
                let exps = vec![
                    (next() % 5) as i32 - 2, // b: Laurent
                    (next() % 3) as i32,
                    (next() % 4) as i32,
                ];
                let c = r.base().from_int((next() % 3) as i64);
                e = r.add(&e, &r.monomial(exps, c));
            }
            e
        };
        for _ in 0..1000 {
            let a = rand_expr(&mut next);
            let b = rand_expr(&mut next);
            let c = rand_expr(&mut next);
            assert_eq!(r.mul(&a, &b), r.mul(&b, &a));
            assert_eq!(r.mul(&r.mul(&a, &b), &c), r.mul(&a, &r.mul(&b, &c)));
            assert_eq!(
                r.mul(&a, &r.add(&b, &c)),
                r.add(&r.mul(&a, &b), &r.mul(&a, &c))
            );
        }
    }

    #[test]
    fn substitution_attribute_checks() {
        let r = char3_ring();
        let f3 = Field::new(3, 1).unwrap();
        // d -> eps in F_3[eps]/eps^3 is fine
        let t3 = TestRing::new(f3.clone(), vec![("eps".into(), 3)]);
        let mut img = BTreeMap::new();
        img.insert("b".to_string(), t3.one());
        img.insert("c".to_string(), t3.zero());
        img.insert("d".to_string(), t3.gen_elem(0));
        let d = r.gen_named("d");
        assert!(r.eval_testring(&d, &img, &t3).is_ok());

        // d -> eps in F_3[eps]/eps^4 violates d^3 = 0
        let t4 = TestRing::new(f3, vec![("eps".into(), 4)]);
        let mut img4 = BTreeMap::new();
        img4.insert("b".to_string(), t4.one());
        img4.insert("c".to_string(), t4.zero());
        img4.insert("d".to_string(), t4.gen_elem(0));
        match r.eval_testring(&d, &img4, &t4) {
            Err(Error::AttributeViolation { gen, .. }) => assert_eq!(gen, "d"),
            other => panic!("expected AttributeViolation, got {other:?}"),
        }
    }
}

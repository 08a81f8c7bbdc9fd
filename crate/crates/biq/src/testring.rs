//! Finite test rings `F_q[e_1,...,e_m]/(e_1^{n_1},...,e_m^{n_m})`: the local
//! algebras through which infinitesimal group schemes are probed.
//!
//! Elements are dense coefficient vectors over the monomial basis
//! `e_1^{a_1} ... e_m^{a_m}` with `a_i < n_i`. A ring is enumerable when its
//! element count `q^dim` stays below the guard (`BIQ_MAX_ENUM` overrides).

use std::fmt;
use std::rc::Rc;

use crate::field::{Field, FieldElem, FieldEmbedding};
use crate::ring::Ring;
use crate::Error;

struct Inner {
    field: Field,
    gens: Vec<(String, u32)>,
    strides: Vec<usize>,
    total: usize,
    /// basis-monomial product: `prod[i * total + j]` is the index of the
    /// product monomial, or usize::MAX when it truncates to zero
    prod: Vec<usize>,
}

/// A finite local `F_q`-algebra with nilpotent generators, cheap to clone.
#[derive(Clone)]
pub struct TestRing(Rc<Inner>);

/// An element of a [`TestRing`]: dense coefficients in monomial-basis order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct TrElem(pub Vec<FieldElem>);

impl fmt::Debug for TestRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}", self.0.field.p(), self.0.field.degree())?;
        for (name, n) in &self.0.gens {
            write!(f, "[{name}^{n}=0]")?;
        }
        Ok(())
    }
}

fn enum_guard() -> u64 {
    std::env::var("BIQ_MAX_ENUM")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(1 << 22)
}

impl TestRing {
    /// The ring `F_q[gens]/(gen_i^{order_i})`. With no generators this is the
    /// field itself viewed as a test ring.
    pub fn new(field: Field, gens: Vec<(String, u32)>) -> TestRing {
        assert!(gens.iter().all(|&(_, n)| n >= 2), "nilpotent order must be >= 2");
        let mut strides = Vec::with_capacity(gens.len());
        let mut total = 1usize;
        for &(_, n) in &gens {
            strides.push(total);
            total *= n as usize;
        }
        let degrees_of = |mut idx: usize| -> Vec<u32> {
            gens.iter()
                .map(|&(_, n)| {
                    let d = (idx % n as usize) as u32;
                    idx /= n as usize;
                    d
                })
                .collect()
        };
        let mut prod = vec![usize::MAX; total * total];
        for i in 0..total {
            let di = degrees_of(i);
            'pair: for j in 0..total {
                let dj = degrees_of(j);
                let mut idx = 0;
                for (g, (&x, &y)) in di.iter().zip(&dj).enumerate() {
                    let s = x + y;
                    if s >= gens[g].1 {
                        continue 'pair;
                    }
                    idx += s as usize * strides[g];
                }
                prod[i * total + j] = idx;
            }
        }
        TestRing(Rc::new(Inner { field, gens, strides, total, prod }))
    }

    pub fn field(&self) -> &Field {
        &self.0.field
    }

    pub fn gens(&self) -> &[(String, u32)] {
        &self.0.gens
    }

    /// Dimension over the base field.
    pub fn dim(&self) -> usize {
        self.0.total
    }

    /// Total element count `q^dim` (saturating at u64::MAX).
    pub fn count(&self) -> u64 {
        let q = self.0.field.order();
        let mut c: u64 = 1;
        for _ in 0..self.0.total {
            c = c.saturating_mul(q);
        }
        c
    }

    /// Degree vector of basis monomial `idx`.
    fn degrees(&self, mut idx: usize) -> Vec<u32> {
        let mut d = Vec::with_capacity(self.0.gens.len());
        for &(_, n) in &self.0.gens {
            d.push((idx % n as usize) as u32);
            idx /= n as usize;
        }
        d
    }

    fn index_of(&self, degrees: &[u32]) -> Option<usize> {
        let mut idx = 0;
        for (i, &d) in degrees.iter().enumerate() {
            if d >= self.0.gens[i].1 {
                return None;
            }
            idx += d as usize * self.0.strides[i];
        }
        Some(idx)
    }

    pub fn from_field(&self, c: &FieldElem) -> TrElem {
        let mut v = vec![self.0.field.zero(); self.0.total];
        v[0] = self.coerce_scalar(c);
        TrElem(v)
    }

    /// Accepts scalars from the base field itself or from its prime field.
    fn coerce_scalar(&self, c: &FieldElem) -> FieldElem {
        if c.0.len() == self.0.field.degree() {
            c.clone()
        } else if c.0.len() == 1 {
            self.0.field.from_int(c.0[0] as i64)
        } else {
            panic!("scalar from an incompatible field");
        }
    }

    /// The i-th nilpotent generator as an element.
    pub fn gen_elem(&self, i: usize) -> TrElem {
        let mut v = vec![self.0.field.zero(); self.0.total];
        v[self.0.strides[i]] = self.0.field.one();
        TrElem(v)
    }

    pub fn gen_by_name(&self, name: &str) -> Option<TrElem> {
        self.0
            .gens
            .iter()
            .position(|(n, _)| n == name)
            .map(|i| self.gen_elem(i))
    }

    /// Constant term (image modulo the nilradical).
    pub fn constant_term<'a>(&self, a: &'a TrElem) -> &'a FieldElem {
        &a.0[0]
    }

    pub fn is_nilpotent(&self, a: &TrElem) -> bool {
        self.0.field.is_zero(&a.0[0])
    }

    /// Enumerates all elements in canonical order: lexicographic on the
    /// coefficient vector, first basis monomial most significant.
    pub fn enumerate(&self) -> Result<Vec<TrElem>, Error> {
        let n = self.count();
        if n > enum_guard() {
            return Err(Error::TooLarge(format!(
                "{:?} has {} elements, above the enumeration guard",
                self, n
            )));
        }
        let q = self.0.field.order();
        let mut out = Vec::with_capacity(n as usize);
        let mut idxs = vec![0u64; self.0.total];
        loop {
            out.push(TrElem(
                idxs.iter().map(|&i| self.0.field.elem_from_index(i)).collect(),
            ));
            // odometer: last coordinate fastest
            let mut pos = self.0.total;
            loop {
                if pos == 0 {
                    return Ok(out);
                }
                pos -= 1;
                idxs[pos] += 1;
                if idxs[pos] < q {
                    break;
                }
                idxs[pos] = 0;
            }
        }
    }

    /// Adds one nilpotent generator, returning the extended ring; use
    /// [`TestRing::lift`] to map elements in.
    pub fn with_gen(&self, name: &str, order: u32) -> TestRing {
        let mut gens = self.0.gens.clone();
        gens.push((name.to_string(), order));
        TestRing::new(self.0.field.clone(), gens)
    }

    /// Lifts an element of a subring (a prefix of this ring's generators).
    pub fn lift(&self, sub: &TestRing, a: &TrElem) -> TrElem {
        assert!(sub.0.gens.len() <= self.0.gens.len());
        assert_eq!(
            &self.0.gens[..sub.0.gens.len()],
            &sub.0.gens[..],
            "not a generator-prefix subring"
        );
        let mut v = vec![self.0.field.zero(); self.0.total];
        for (i, c) in a.0.iter().enumerate() {
            let degs = sub.degrees(i);
            let mut full = degs.clone();
            full.resize(self.0.gens.len(), 0);
            v[self.index_of(&full).unwrap()] = c.clone();
        }
        TrElem(v)
    }

    /// Projects to a generator-prefix subring by evaluating the extra
    /// generators at 0.
    pub fn project(&self, sub: &TestRing, a: &TrElem) -> TrElem {
        assert_eq!(
            &self.0.gens[..sub.0.gens.len()],
            &sub.0.gens[..],
            "not a generator-prefix subring"
        );
        let mut v = vec![self.0.field.zero(); sub.0.total];
        for (i, c) in v.iter_mut().enumerate() {
            let degs = sub.degrees(i);
            let mut full = degs.clone();
            full.resize(self.0.gens.len(), 0);
            *c = a.0[self.index_of(&full).unwrap()].clone();
        }
        TrElem(v)
    }

    /// Substitutes a value for generator `i` (the value's own powers must be
    /// taken in this ring); a ring homomorphism to the same ring.
    pub fn eval_gen(&self, a: &TrElem, i: usize, value: &TrElem) -> TrElem {
        let mut acc = self.zero();
        for (idx, c) in a.0.iter().enumerate() {
            if self.0.field.is_zero(c) {
                continue;
            }
            let degs = self.degrees(idx);
            let mut term = self.from_field(c);
            for (j, &d) in degs.iter().enumerate() {
                if d == 0 {
                    continue;
                }
                let base = if j == i { value.clone() } else { self.gen_elem(j) };
                term = self.mul(&term, &self.pow(&base, d as u64));
            }
            acc = self.add(&acc, &term);
        }
        acc
    }

    /// Base-changes along a field embedding, keeping the generators.
    pub fn base_change(&self, emb: &FieldEmbedding) -> TestRing {
        assert!(emb.src == self.0.field);
        TestRing::new(emb.dst.clone(), self.0.gens.clone())
    }

    /// Maps an element coefficient-wise through a field embedding.
    pub fn base_change_elem(&self, emb: &FieldEmbedding, a: &TrElem) -> TrElem {
        TrElem(a.0.iter().map(|c| emb.apply(c)).collect())
    }
}

impl Ring for TestRing {
    type El = TrElem;

    fn zero(&self) -> TrElem {
        TrElem(vec![self.0.field.zero(); self.0.total])
    }

    fn one(&self) -> TrElem {
        self.from_field(&self.0.field.one())
    }

    fn add(&self, a: &TrElem, b: &TrElem) -> TrElem {
        TrElem(
            a.0.iter()
                .zip(&b.0)
                .map(|(x, y)| self.0.field.add(x, y))
                .collect(),
        )
    }

    fn neg(&self, a: &TrElem) -> TrElem {
        TrElem(a.0.iter().map(|x| self.0.field.neg(x)).collect())
    }

    fn mul(&self, a: &TrElem, b: &TrElem) -> TrElem {
        let f = &self.0.field;
        let total = self.0.total;
        let mut out = vec![f.zero(); total];
        for i in 0..total {
            if f.is_zero(&a.0[i]) {
                continue;
            }
            let row = &self.0.prod[i * total..(i + 1) * total];
            for j in 0..total {
                let idx = row[j];
                if idx != usize::MAX && !f.is_zero(&b.0[j]) {
                    let prod = f.mul(&a.0[i], &b.0[j]);
                    out[idx] = f.add(&out[idx], &prod);
                }
            }
        }
        TrElem(out)
    }

    fn from_int(&self, n: i64) -> TrElem {
        self.from_field(&self.0.field.from_int(n))
    }

    /// A unit iff the image modulo the nilradical (the constant term) is
    /// nonzero; the inverse is computed by the finite geometric series.
    fn inv(&self, a: &TrElem) -> Option<TrElem> {
        let c = &a.0[0];
        let cinv = self.0.field.inv(c)?;
        let cinv = self.from_field(&cinv);
        // a = c(1 - n): inv = c^-1 * sum n^i
        let u = self.mul(a, &cinv);
        let n = self.sub(&self.one(), &u);
        let mut acc = self.one();
        let mut pw = n.clone();
        while !self.is_zero(&pw) {
            acc = self.add(&acc, &pw);
            pw = self.mul(&pw, &n);
        }
        Some(self.mul(&acc, &cinv))
    }

    fn is_zero(&self, a: &TrElem) -> bool {
        a.0.iter().all(|c| self.0.field.is_zero(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerate_f2_eps2() {
        let f2 = Field::new(2, 1).unwrap();
        let r = TestRing::new(f2.clone(), vec![("e".into(), 2)]);
        let all = r.enumerate().unwrap();
        assert_eq!(all.len(), 4);
        // 0, 1, e, 1+e in some deterministic order; check set
        assert!(all.contains(&r.zero()));
        assert!(all.contains(&r.one()));
        assert!(all.contains(&r.gen_elem(0)));
        assert!(all.contains(&r.add(&r.one(), &r.gen_elem(0))));
        // no duplicates
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 4);
    }

    #[test]
    fn enumerate_f8_eps2_count() {
        let f8 = Field::new(2, 3).unwrap();
        let r = TestRing::new(f8, vec![("e".into(), 2)]);
        assert_eq!(r.count(), 64);
        assert_eq!(r.enumerate().unwrap().len(), 64);
    }

    #[test]
    fn unit_count_f3_eps3() {
        // Units of F_3[e]/e^3: constant term nonzero, 2 * 9 = 18 of 27.
        let f3 = Field::new(3, 1).unwrap();
        let r = TestRing::new(f3, vec![("e".into(), 3)]);
        let units = r
            .enumerate()
            .unwrap()
            .into_iter()
            .filter(|a| r.is_unit(a))
            .count();
        assert_eq!(units, 18);
    }

    #[test]
    fn inverse_is_two_sided() {
        let f3 = Field::new(3, 1).unwrap();
        let r = TestRing::new(f3, vec![("e".into(), 3), ("d".into(), 2)]);
        for a in r.enumerate().unwrap() {
            if let Some(inv) = r.inv(&a) {
                assert_eq!(r.mul(&a, &inv), r.one());
                assert_eq!(r.mul(&inv, &a), r.one());
            } else {
                assert!(r.is_nilpotent(&a));
            }
        }
    }

    #[test]
    fn nilpotency_enforced() {
        let f2 = Field::new(2, 1).unwrap();
        let r = TestRing::new(f2, vec![("e".into(), 3)]);
        let e = r.gen_elem(0);
        assert!(!r.is_zero(&r.pow(&e, 2)));
        assert!(r.is_zero(&r.pow(&e, 3)));
    }

    #[test]
    fn lift_and_project() {
        let f2 = Field::new(2, 1).unwrap();
        let r = TestRing::new(f2, vec![("e".into(), 2)]);
        let big = r.with_gen("nu", 4);
        let x = r.add(&r.one(), &r.gen_elem(0));
        let lifted = big.lift(&r, &x);
        assert_eq!(big.project(&r, &lifted), x);
        let nu = big.gen_elem(1);
        assert!(big.is_zero(&big.pow(&nu, 4)));
        assert!(!big.is_zero(&big.pow(&nu, 3)));
    }
}

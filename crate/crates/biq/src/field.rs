//! Finite fields `F_{p^k}` with exact, deterministic element encodings.
//!
//! Elements are reduced polynomials of degree < k over `F_p`, stored as
//! little-endian digit vectors. The canonical order on elements compares
//! digit vectors from the highest-degree digit down, which coincides with
//! ascending integer value `sum c_i * p^i`. The modulus of `F_{p^k}` is the
//! canonically least monic irreducible polynomial of degree k, so every run
//! and every build agrees bit-for-bit on element encodings.

use std::cmp::Ordering;
use std::fmt;
use std::rc::Rc;

use crate::Error;

/// A single coefficient in `F_p`; `p <= 13` throughout this crate.
pub type Digit = u16;

/// An element of a [`Field`], as a reduced little-endian digit vector of length k.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FieldElem(pub Vec<Digit>);

impl FieldElem {
    /// Canonical total order: by value `sum c_i p^i`, i.e. highest digit first.
    pub fn cmp_canonical(&self, other: &FieldElem) -> Ordering {
        debug_assert_eq!(self.0.len(), other.0.len());
        for i in (0..self.0.len()).rev() {
            match self.0[i].cmp(&other.0[i]) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for FieldElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_canonical(other))
    }
}

impl Ord for FieldElem {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_canonical(other)
    }
}

struct FieldInner {
    p: u64,
    k: usize,
    /// Monic modulus, little-endian, length k+1. For k = 1 this is `x - c` with c = 0.
    modulus: Vec<Digit>,
    /// `x^{k+i} mod modulus` for i in 0..k-1, precomputed for reduction.
    red: Vec<Vec<Digit>>,
}

/// The field `F_{p^k}`, cheap to clone.
#[derive(Clone)]
pub struct Field(Rc<FieldInner>);

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}", self.0.p, self.0.k)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p && self.0.k == other.0.k
    }
}
impl Eq for Field {}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    /// Builds `F_{p^k}` with the canonically least irreducible modulus.
    ///
    /// Fails with `NotPrime` if p is composite and `DegreeTooLarge` if
    /// `p^k > 2^20` (the desk-scale bound).
    pub fn new(p: u64, k: usize) -> Result<Field, Error> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::DegreeTooLarge { p, k });
        }
        let mut q: u64 = 1;
        for _ in 0..k {
            q = q.checked_mul(p).ok_or(Error::DegreeTooLarge { p, k })?;
            if q > 1 << 20 {
                return Err(Error::DegreeTooLarge { p, k });
            }
        }
        let modulus = least_irreducible(p, k);
        let mut red = Vec::new();
        if k > 1 {
            // x^k = -(modulus minus leading term)
            let mut cur: Vec<Digit> = (0..k)
                .map(|i| ((p - modulus[i] as u64) % p) as Digit)
                .collect();
            red.push(cur.clone());
            for _ in 1..k {
                // multiply by x and reduce using red[0]
                let top = cur[k - 1] as u64;
                let mut next = vec![0 as Digit; k];
                for i in (1..k).rev() {
                    next[i] = cur[i - 1];
                }
                for i in 0..k {
                    next[i] = (((next[i] as u64) + top * red[0][i] as u64) % p) as Digit;
                }
                cur = next;
                red.push(cur.clone());
            }
            red.pop();
        }
        Ok(Field(Rc::new(FieldInner { p, k, modulus, red })))
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn degree(&self) -> usize {
        self.0.k
    }

    /// Number of elements `p^k`.
    pub fn order(&self) -> u64 {
        self.0.p.pow(self.0.k as u32)
    }

    pub fn modulus(&self) -> &[Digit] {
        &self.0.modulus
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem(vec![0; self.0.k])
    }

    pub fn one(&self) -> FieldElem {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> FieldElem {
        let p = self.0.p as i64;
        let mut v = vec![0; self.0.k];
        v[0] = (n.rem_euclid(p)) as Digit;
        FieldElem(v)
    }

    /// The generator `x` of the polynomial basis (for k >= 2).
    pub fn gen(&self) -> FieldElem {
        let mut v = vec![0; self.0.k];
        if self.0.k >= 2 {
            v[1] = 1;
        } else {
            // prime field: no proper generator; return 1
            v[0] = 1;
        }
        FieldElem(v)
    }

    pub fn is_zero(&self, a: &FieldElem) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let p = self.0.p;
        FieldElem(
            a.0.iter()
                .zip(&b.0)
                .map(|(&x, &y)| (((x as u64) + (y as u64)) % p) as Digit)
                .collect(),
        )
    }

    pub fn neg(&self, a: &FieldElem) -> FieldElem {
        let p = self.0.p;
        FieldElem(a.0.iter().map(|&x| ((p - x as u64) % p) as Digit).collect())
    }

    pub fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let p = self.0.p;
        let k = self.0.k;
        if k == 1 {
            return FieldElem(vec![((a.0[0] as u64 * b.0[0] as u64) % p) as Digit]);
        }
        let mut prod = vec![0u64; 2 * k - 1];
        for i in 0..k {
            if a.0[i] == 0 {
                continue;
            }
            let ai = a.0[i] as u64;
            for j in 0..k {
                prod[i + j] += ai * b.0[j] as u64;
            }
        }
        let mut out = vec![0u64; k];
        for i in 0..k {
            out[i] = prod[i] % p;
        }
        for i in k..2 * k - 1 {
            let c = prod[i] % p;
            if c != 0 {
                let r = &self.0.red[i - k];
                for j in 0..k {
                    out[j] = (out[j] + c * r[j] as u64) % p;
                }
            }
        }
        FieldElem(out.into_iter().map(|c| c as Digit).collect())
    }

    pub fn pow(&self, a: &FieldElem, mut e: u64) -> FieldElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Integer power allowing negative exponents on units.
    pub fn pow_i(&self, a: &FieldElem, e: i64) -> FieldElem {
        if e >= 0 {
            self.pow(a, e as u64)
        } else {
            let inv = self.inv(a).expect("negative power of non-unit");
            self.pow(&inv, (-e) as u64)
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: &FieldElem) -> Option<FieldElem> {
        if self.is_zero(a) {
            return None;
        }
        Some(self.pow(a, self.order() - 2))
    }

    /// Index of an element in canonical order: `sum c_i p^i` in `0..order()`.
    pub fn elem_index(&self, a: &FieldElem) -> u64 {
        let p = self.0.p;
        let mut idx = 0u64;
        for i in (0..self.0.k).rev() {
            idx = idx * p + a.0[i] as u64;
        }
        idx
    }

    pub fn elem_from_index(&self, mut idx: u64) -> FieldElem {
        let p = self.0.p;
        let mut v = vec![0; self.0.k];
        for d in v.iter_mut() {
            *d = (idx % p) as Digit;
            idx /= p;
        }
        FieldElem(v)
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.order()).map(move |i| self.elem_from_index(i))
    }

    /// The multiplicative order of a unit.
    pub fn mult_order(&self, a: &FieldElem) -> u64 {
        assert!(!self.is_zero(a));
        let mut n = 1;
        let mut x = a.clone();
        let one = self.one();
        while x != one {
            x = self.mul(&x, a);
            n += 1;
        }
        n
    }

    /// Frobenius `a -> a^p`.
    pub fn frobenius(&self, a: &FieldElem) -> FieldElem {
        self.pow(a, self.0.p)
    }

    /// The unique square root in characteristic 2 (inverse of Frobenius).
    pub fn sqrt_char2(&self, a: &FieldElem) -> FieldElem {
        assert_eq!(self.0.p, 2);
        // a^(q/2) squares to a^q = a
        self.pow(a, self.order() / 2)
    }
}

/// Finds the canonically least monic irreducible polynomial of degree k over `F_p`.
fn least_irreducible(p: u64, k: usize) -> Vec<Digit> {
    if k == 1 {
        // x itself; representation x - 0
        return vec![0, 1];
    }
    let total = p.pow(k as u32);
    for val in 0..total {
        let mut cand = vec![0 as Digit; k + 1];
        let mut v = val;
        for c in cand.iter_mut().take(k) {
            *c = (v % p) as Digit;
            v /= p;
        }
        cand[k] = 1;
        if poly_is_irreducible(p, &cand) {
            return cand;
        }
    }
    unreachable!("irreducible polynomials of every degree exist");
}

/// Irreducibility over `F_p` by trial division against all monic polynomials
/// of degree 1..=k/2.
fn poly_is_irreducible(p: u64, poly: &[Digit]) -> bool {
    let k = poly.len() - 1;
    for d in 1..=k / 2 {
        let count = p.pow(d as u32);
        for val in 0..count {
            let mut div = vec![0 as Digit; d + 1];
            let mut v = val;
            for c in div.iter_mut().take(d) {
                *c = (v % p) as Digit;
                v /= p;
            }
            div[d] = 1;
            if poly_divides(p, &div, poly) {
                return false;
            }
        }
    }
    true
}

/// Whether monic `div` divides `poly` over `F_p`.
fn poly_divides(p: u64, div: &[Digit], poly: &[Digit]) -> bool {
    let mut rem: Vec<u64> = poly.iter().map(|&c| c as u64).collect();
    let d = div.len() - 1;
    while rem.len() > d {
        let lead = *rem.last().unwrap() % p;
        let shift = rem.len() - 1 - d;
        if lead != 0 {
            for i in 0..=d {
                let idx = shift + i;
                rem[idx] = (rem[idx] + (p - div[i] as u64 % p) * lead) % p;
            }
        }
        rem.pop();
    }
    rem.iter().all(|&c| c % p == 0)
}

/// A polynomial over a [`Field`], little-endian coefficients, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    pub coeffs: Vec<FieldElem>,
}

impl Poly {
    pub fn new(field: &Field, mut coeffs: Vec<FieldElem>) -> Poly {
        while coeffs.len() > 1 && field.is_zero(coeffs.last().unwrap()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(field.zero());
        }
        Poly { coeffs }
    }

    pub fn zero(field: &Field) -> Poly {
        Poly { coeffs: vec![field.zero()] }
    }

    pub fn is_zero(&self, field: &Field) -> bool {
        self.coeffs.len() == 1 && field.is_zero(&self.coeffs[0])
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, field: &Field, x: &FieldElem) -> FieldElem {
        let mut acc = field.zero();
        for c in self.coeffs.iter().rev() {
            acc = field.add(&field.mul(&acc, x), c);
        }
        acc
    }

    /// Divides by the linear factor `x - r`, assuming r is a root.
    pub fn deflate(&self, field: &Field, r: &FieldElem) -> Poly {
        debug_assert!(field.is_zero(&self.eval(field, r)));
        let n = self.coeffs.len();
        let mut out = vec![field.zero(); n - 1];
        let mut carry = field.zero();
        for i in (1..n).rev() {
            carry = field.add(&self.coeffs[i], &field.mul(&carry, r));
            out[i - 1] = carry.clone();
        }
        Poly::new(field, out)
    }

    /// Maps coefficients through a field embedding.
    pub fn map(&self, emb: &FieldEmbedding) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| emb.apply(c)).collect() }
    }
}

/// All roots of `poly` in `field`, with multiplicity, in canonical order.
pub fn roots(field: &Field, poly: &Poly) -> Result<Vec<FieldElem>, Error> {
    if poly.is_zero(field) {
        return Err(Error::ZeroPolynomial);
    }
    let mut out = Vec::new();
    for x in field.elements() {
        let mut p = poly.clone();
        while !p.is_zero(field) && p.degree() >= 1 && field.is_zero(&p.eval(field, &x)) {
            out.push(x.clone());
            p = p.deflate(field, &x);
        }
    }
    out.sort();
    Ok(out)
}

/// Least k such that `poly` (with coefficients in a field of degree m over F_p)
/// splits completely over `F_{p^k}`; k ranges over multiples of m.
pub fn splitting_degree(field: &Field, poly: &Poly, bound: usize) -> Result<usize, Error> {
    if poly.is_zero(field) {
        return Err(Error::ZeroPolynomial);
    }
    let m = field.degree();
    let deg = poly.degree();
    let mut k = m;
    while k <= bound {
        let ext = Field::new(field.p(), k).expect("extension within bound");
        let emb = embed(field, &ext);
        let lifted = poly.map(&emb);
        let r = roots(&ext, &lifted)?;
        if r.len() == deg {
            return Ok(k);
        }
        k += m;
    }
    Err(Error::BoundExceeded(format!(
        "polynomial does not split within degree {bound}"
    )))
}

/// An embedding `F_{p^m} -> F_{p^n}` (m | n), determined by the canonically
/// least root of the source modulus in the target.
pub struct FieldEmbedding {
    pub src: Field,
    pub dst: Field,
    root_powers: Vec<FieldElem>,
}

impl FieldEmbedding {
    pub fn apply(&self, a: &FieldElem) -> FieldElem {
        let mut acc = self.dst.zero();
        for (i, &c) in a.0.iter().enumerate() {
            if c != 0 {
                let term = self.dst.mul(&self.root_powers[i], &self.dst.from_int(c as i64));
                acc = self.dst.add(&acc, &term);
            }
        }
        acc
    }
}

/// Constructs the canonical embedding `src -> dst`. Panics if src does not
/// embed (degree non-divisible or different characteristic).
pub fn embed(src: &Field, dst: &Field) -> FieldEmbedding {
    assert_eq!(src.p(), dst.p(), "characteristic mismatch");
    assert_eq!(dst.degree() % src.degree(), 0, "no embedding");
    // Find the least root of src.modulus in dst.
    let srcmod = Poly {
        coeffs: src
            .modulus()
            .iter()
            .map(|&c| dst.from_int(c as i64))
            .collect(),
    };
    let root = dst
        .elements()
        .find(|x| dst.is_zero(&srcmod.eval(dst, x)))
        .expect("modulus must have a root in the extension");
    let mut root_powers = vec![dst.one()];
    for i in 1..src.degree() {
        let prev = root_powers[i - 1].clone();
        root_powers.push(dst.mul(&prev, &root));
    }
    FieldEmbedding { src: src.clone(), dst: dst.clone(), root_powers }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_basics() {
        let f = Field::new(13, 1).unwrap();
        assert_eq!(f.order(), 13);
        let a = f.from_int(7);
        let b = f.from_int(9);
        assert_eq!(f.mul(&a, &b), f.from_int(63));
        assert_eq!(f.inv(&a).unwrap(), f.from_int(2)); // 7*2 = 14 = 1
    }

    #[test]
    fn f8_modulus_is_least_irreducible_cubic() {
        // Oracle: scan all 8 monic cubics over F_2; a cubic is irreducible
        // iff it has no root. Candidates in canonical order (highest digit
        // first => ascending value of the non-leading part).
        let mut least = None;
        for val in 0u64..8 {
            let cand = [val & 1, (val >> 1) & 1, (val >> 2) & 1];
            let has_root = (0u64..2).any(|x| {
                (x * x * x + cand[2] * x * x + cand[1] * x + cand[0]) % 2 == 0
            });
            if !has_root {
                least = Some(cand);
                break;
            }
        }
        // x^3 + x + 1
        assert_eq!(least, Some([1, 1, 0]));
        let f = Field::new(2, 3).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 0, 1]);
    }

    #[test]
    fn f9_modulus() {
        // Oracle: monic quadratics over F_3 in canonical order; x^2 is
        // reducible, x^2+1 has no root (1, 2 square to 1), so it is least.
        let f = Field::new(3, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 0, 1]);
        assert_eq!(f.order(), 9);
    }

    #[test]
    fn not_prime_and_too_large() {
        assert!(matches!(Field::new(6, 1), Err(Error::NotPrime(6))));
        assert!(matches!(Field::new(2, 21), Err(Error::DegreeTooLarge { .. })));
    }

    #[test]
    fn roots_quadratic_f13() {
        let f = Field::new(13, 1).unwrap();
        // x^2 - 1 -> {1, 12}
        let p = Poly::new(&f, vec![f.from_int(-1), f.zero(), f.one()]);
        let r = roots(&f, &p).unwrap();
        assert_eq!(r, vec![f.from_int(1), f.from_int(12)]);
    }

    #[test]
    fn roots_centralizer_quartic_f8() {
        // c^4 + c^2 + c over F_8 (lambda = 1): oracle is exhaustive
        // evaluation over all 8 elements.
        let f = Field::new(2, 3).unwrap();
        let p = Poly::new(
            &f,
            vec![f.zero(), f.one(), f.one(), f.zero(), f.one()],
        );
        let mut count = 0;
        for x in f.elements() {
            if f.is_zero(&p.eval(&f, &x)) {
                count += 1;
            }
        }
        assert_eq!(count, 4);
        let r = roots(&f, &p).unwrap();
        assert_eq!(r.len(), 4);
        // all distinct
        for w in r.windows(2) {
            assert_ne!(w[0], w[1]);
        }
    }

    #[test]
    fn roots_zeta_cubic_f4() {
        // x^3 + 1 over F_4 with lambda = 0: splits as {1, w, w^2}.
        let f = Field::new(2, 2).unwrap();
        let p = Poly::new(&f, vec![f.one(), f.zero(), f.zero(), f.one()]);
        let r = roots(&f, &p).unwrap();
        assert_eq!(r.len(), 3);
        assert!(r.contains(&f.one()));
        assert!(r.contains(&f.gen()));
    }

    #[test]
    fn splitting_degrees() {
        let f3 = Field::new(3, 1).unwrap();
        // x^2 + 1 irreducible over F_3 (oracle: evaluate at 0,1,2)
        let p = Poly::new(&f3, vec![f3.one(), f3.zero(), f3.one()]);
        assert_eq!(splitting_degree(&f3, &p, 12).unwrap(), 2);

        let f2 = Field::new(2, 1).unwrap();
        let lin = Poly::new(&f2, vec![f2.one(), f2.one()]);
        assert_eq!(splitting_degree(&f2, &lin, 12).unwrap(), 1);
        // c^3 + c + 1: irreducible cubic
        let c3 = Poly::new(&f2, vec![f2.one(), f2.one(), f2.zero(), f2.one()]);
        assert_eq!(splitting_degree(&f2, &c3, 12).unwrap(), 3);
    }

    #[test]
    fn field_axioms_random() {
        // 1000 random triples per constructed field.
        let fields = [
            Field::new(2, 3).unwrap(),
            Field::new(3, 2).unwrap(),
            Field::new(13, 1).unwrap(),
            Field::new(2, 6).unwrap(),
        ];
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for f in &fields {
            let q = f.order();
            for _ in 0..1000 {
                let a = f.elem_from_index(next() % q);
                let b = f.elem_from_index(next() % q);
                let c = f.elem_from_index(next() % q);
                let ab_c = f.mul(&f.mul(&a, &b), &c);
                let a_bc = f.mul(&a, &f.mul(&b, &c));
                assert_eq!(ab_c, a_bc);
                let dist = f.mul(&a, &f.add(&b, &c));
                let dist2 = f.add(&f.mul(&a, &b), &f.mul(&a, &c));
                assert_eq!(dist, dist2);
                if !f.is_zero(&a) {
                    let inv = f.inv(&a).unwrap();
                    assert_eq!(f.mul(&a, &inv), f.one());
                }
            }
        }
    }

    #[test]
    fn embedding_is_homomorphism() {
        let f4 = Field::new(2, 2).unwrap();
        let f16 = Field::new(2, 4).unwrap();
        let emb = embed(&f4, &f16);
        for a in f4.elements() {
            for b in f4.elements() {
                assert_eq!(
                    emb.apply(&f4.mul(&a, &b)),
                    f16.mul(&emb.apply(&a), &emb.apply(&b))
                );
                assert_eq!(
                    emb.apply(&f4.add(&a, &b)),
                    f16.add(&emb.apply(&a), &emb.apply(&b))
                );
            }
        }
    }

    #[test]
    fn sqrt_char2_roundtrip() {
        let f = Field::new(2, 4).unwrap();
        for a in f.elements() {
            let s = f.sqrt_char2(&a);
            assert_eq!(f.mul(&s, &s), a);
        }
    }
}

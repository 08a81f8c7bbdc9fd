//! Truncated power series over a generic ring, univariate and bivariate.
//!
//! All operations truncate consistently at the series' order. Functional
//! composition requires the inner series to have zero constant term;
//! functional inversion requires zero constant term and a unit linear
//! coefficient.

use crate::ring::Ring;
use crate::Error;

/// A univariate series `sum c_i z^i` truncated at order `trunc` (exclusive).
#[derive(Clone, Debug, PartialEq)]
pub struct Series<R: Ring> {
    pub coeffs: Vec<R::El>,
}

impl<R: Ring> Series<R> {
    pub fn new(ring: &R, mut coeffs: Vec<R::El>, trunc: usize) -> Series<R> {
        coeffs.resize(trunc, ring.zero());
        Series { coeffs }
    }

    pub fn zero(ring: &R, trunc: usize) -> Series<R> {
        Series { coeffs: vec![ring.zero(); trunc] }
    }

    /// The identity series z.
    pub fn z(ring: &R, trunc: usize) -> Series<R> {
        let mut s = Self::zero(ring, trunc);
        if trunc > 1 {
            s.coeffs[1] = ring.one();
        }
        s
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len()
    }

    pub fn add(&self, ring: &R, other: &Series<R>) -> Series<R> {
        let n = self.trunc().min(other.trunc());
        Series {
            coeffs: (0..n).map(|i| ring.add(&self.coeffs[i], &other.coeffs[i])).collect(),
        }
    }

    pub fn sub(&self, ring: &R, other: &Series<R>) -> Series<R> {
        let n = self.trunc().min(other.trunc());
        Series {
            coeffs: (0..n).map(|i| ring.sub(&self.coeffs[i], &other.coeffs[i])).collect(),
        }
    }

    pub fn scale(&self, ring: &R, c: &R::El) -> Series<R> {
        Series { coeffs: self.coeffs.iter().map(|x| ring.mul(x, c)).collect() }
    }

    pub fn mul(&self, ring: &R, other: &Series<R>) -> Series<R> {
        let n = self.trunc().min(other.trunc());
        let mut out = vec![ring.zero(); n];
        for i in 0..n {
            if ring.is_zero(&self.coeffs[i]) {
                continue;
            }
            for j in 0..n - i {
                if !ring.is_zero(&other.coeffs[j]) {
                    let p = ring.mul(&self.coeffs[i], &other.coeffs[j]);
                    out[i + j] = ring.add(&out[i + j], &p);
                }
            }
        }
        Series { coeffs: out }
    }

    /// Multiplicative inverse of a series with unit constant term.
    pub fn mul_inverse(&self, ring: &R) -> Result<Series<R>, Error> {
        let c0 = ring.inv(&self.coeffs[0]).ok_or_else(|| {
            Error::NonInvertible("constant term is not a unit".into())
        })?;
        let n = self.trunc();
        let mut out = vec![ring.zero(); n];
        out[0] = c0.clone();
        for k in 1..n {
            // out_k = -c0 * sum_{i=1..k} self_i * out_{k-i}
            let mut s = ring.zero();
            for i in 1..=k {
                let p = ring.mul(&self.coeffs[i], &out[k - i]);
                s = ring.add(&s, &p);
            }
            out[k] = ring.neg(&ring.mul(&c0, &s));
        }
        Ok(Series { coeffs: out })
    }

    /// Functional composition `self(other)`; `other` must have zero
    /// constant term.
    pub fn compose(&self, ring: &R, other: &Series<R>) -> Result<Series<R>, Error> {
        if !ring.is_zero(&other.coeffs[0]) {
            return Err(Error::NonComposable(
                "inner series has a nonzero constant term".into(),
            ));
        }
        let n = self.trunc().min(other.trunc());
        let mut acc = Series::zero(ring, n);
        acc.coeffs[0] = self.coeffs[0].clone();
        let mut pw = Series::zero(ring, n);
        pw.coeffs[0] = ring.one();
        for i in 1..n {
            pw = pw.mul(ring, other);
            if !ring.is_zero(&self.coeffs[i]) {
                let term = pw.scale(ring, &self.coeffs[i]);
                acc = acc.add(ring, &term);
            }
        }
        Ok(acc)
    }

    /// Functional inverse: g with `self(g(z)) = z` mod `z^trunc`. Requires
    /// zero constant term and unit linear coefficient.
    pub fn func_inverse(&self, ring: &R) -> Result<Series<R>, Error> {
        if !ring.is_zero(&self.coeffs[0]) {
            return Err(Error::NonInvertible("nonzero constant term".into()));
        }
        let f1inv = ring.inv(&self.coeffs[1]).ok_or_else(|| {
            Error::NonInvertible("linear coefficient is not a unit".into())
        })?;
        let n = self.trunc();
        let mut g = Series::zero(ring, n);
        if n > 1 {
            g.coeffs[1] = f1inv.clone();
        }
        for k in 2..n {
            // with g known below degree k, f(g) = z + h_k z^k + ...;
            // correcting g_k subtracts f_1 g_k z^k.
            let h = self.compose(ring, &g)?;
            g.coeffs[k] = ring.neg(&ring.mul(&f1inv, &h.coeffs[k]));
        }
        Ok(g)
    }

    /// Index of the lowest nonzero coefficient, or trunc() if zero.
    pub fn valuation(&self, ring: &R) -> usize {
        self.coeffs
            .iter()
            .position(|c| !ring.is_zero(c))
            .unwrap_or_else(|| self.trunc())
    }

    /// Whether this is the identity series z (mod truncation).
    pub fn is_identity(&self, ring: &R) -> bool {
        self.sub(ring, &Series::z(ring, self.trunc())).coeffs.iter().all(|c| ring.is_zero(c))
    }
}

/// A bivariate series truncated at `(n1, n2)` per variable; `coeffs[i][j]`
/// is the coefficient of `z1^i z2^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct BiSeries<R: Ring> {
    pub coeffs: Vec<Vec<R::El>>,
}

impl<R: Ring> BiSeries<R> {
    pub fn zero(ring: &R, n1: usize, n2: usize) -> BiSeries<R> {
        BiSeries { coeffs: vec![vec![ring.zero(); n2]; n1] }
    }

    pub fn n1(&self) -> usize {
        self.coeffs.len()
    }

    pub fn n2(&self) -> usize {
        self.coeffs[0].len()
    }

    pub fn constant(ring: &R, c: R::El, n1: usize, n2: usize) -> BiSeries<R> {
        let mut s = Self::zero(ring, n1, n2);
        s.coeffs[0][0] = c;
        s
    }

    /// z1 as a bivariate series.
    pub fn z1(ring: &R, n1: usize, n2: usize) -> BiSeries<R> {
        let mut s = Self::zero(ring, n1, n2);
        s.coeffs[1][0] = ring.one();
        s
    }

    pub fn z2(ring: &R, n1: usize, n2: usize) -> BiSeries<R> {
        let mut s = Self::zero(ring, n1, n2);
        s.coeffs[0][1] = ring.one();
        s
    }

    /// Lifts a univariate series into variable 1 or 2.
    pub fn from_univar(ring: &R, s: &Series<R>, var: usize, n1: usize, n2: usize) -> BiSeries<R> {
        let mut out = Self::zero(ring, n1, n2);
        for (i, c) in s.coeffs.iter().enumerate() {
            match var {
                1 if i < n1 => out.coeffs[i][0] = c.clone(),
                2 if i < n2 => out.coeffs[0][i] = c.clone(),
                _ => {}
            }
        }
        out
    }

    pub fn add(&self, ring: &R, other: &BiSeries<R>) -> BiSeries<R> {
        let (n1, n2) = (self.n1().min(other.n1()), self.n2().min(other.n2()));
        let mut out = Self::zero(ring, n1, n2);
        for i in 0..n1 {
            for j in 0..n2 {
                out.coeffs[i][j] = ring.add(&self.coeffs[i][j], &other.coeffs[i][j]);
            }
        }
        out
    }

    pub fn sub(&self, ring: &R, other: &BiSeries<R>) -> BiSeries<R> {
        self.add(ring, &other.neg(ring))
    }

    pub fn neg(&self, ring: &R) -> BiSeries<R> {
        BiSeries {
            coeffs: self
                .coeffs
                .iter()
                .map(|row| row.iter().map(|c| ring.neg(c)).collect())
                .collect(),
        }
    }

    pub fn mul(&self, ring: &R, other: &BiSeries<R>) -> BiSeries<R> {
        let (n1, n2) = (self.n1().min(other.n1()), self.n2().min(other.n2()));
        let mut out = Self::zero(ring, n1, n2);
        for i1 in 0..n1 {
            for j1 in 0..n2 {
                if ring.is_zero(&self.coeffs[i1][j1]) {
                    continue;
                }
                for i2 in 0..n1 - i1 {
                    for j2 in 0..n2 - j1 {
                        if !ring.is_zero(&other.coeffs[i2][j2]) {
                            let p = ring.mul(&self.coeffs[i1][j1], &other.coeffs[i2][j2]);
                            out.coeffs[i1 + i2][j1 + j2] =
                                ring.add(&out.coeffs[i1 + i2][j1 + j2], &p);
                        }
                    }
                }
            }
        }
        out
    }

    /// Multiplicative inverse of a series with unit constant term, by
    /// geometric expansion.
    pub fn mul_inverse(&self, ring: &R) -> Result<BiSeries<R>, Error> {
        let c0 = ring.inv(&self.coeffs[0][0]).ok_or_else(|| {
            Error::NonInvertible("constant term is not a unit".into())
        })?;
        let (n1, n2) = (self.n1(), self.n2());
        let u = self.scale(ring, &c0);
        let nilp = Self::constant(ring, ring.one(), n1, n2).sub(ring, &u);
        let mut acc = Self::constant(ring, ring.one(), n1, n2);
        let mut pw = nilp.clone();
        for _ in 0..(n1 + n2) {
            acc = acc.add(ring, &pw);
            pw = pw.mul(ring, &nilp);
        }
        Ok(acc.scale(ring, &c0))
    }

    pub fn scale(&self, ring: &R, c: &R::El) -> BiSeries<R> {
        BiSeries {
            coeffs: self
                .coeffs
                .iter()
                .map(|row| row.iter().map(|x| ring.mul(x, c)).collect())
                .collect(),
        }
    }

    /// Substitutes this (zero-constant-term) series into a univariate one.
    pub fn substitute_into(&self, ring: &R, outer: &Series<R>) -> Result<BiSeries<R>, Error> {
        if !ring.is_zero(&self.coeffs[0][0]) {
            return Err(Error::NonComposable(
                "inner bivariate series has a nonzero constant term".into(),
            ));
        }
        let (n1, n2) = (self.n1(), self.n2());
        let mut acc = Self::constant(ring, outer.coeffs[0].clone(), n1, n2);
        let mut pw = Self::constant(ring, ring.one(), n1, n2);
        for i in 1..outer.trunc().min(n1 + n2) {
            pw = pw.mul(ring, self);
            if !ring.is_zero(&outer.coeffs[i]) {
                acc = acc.add(ring, &pw.scale(ring, &outer.coeffs[i]));
            }
        }
        Ok(acc)
    }

    /// Evaluates at z2 = 0, returning a univariate series in z1.
    pub fn at_z2_zero(&self, _ring: &R) -> Series<R> {
        Series { coeffs: self.coeffs.iter().map(|row| row[0].clone()).collect() }
    }

    /// Swaps the two variables (requires square truncation).
    pub fn swap_vars(&self, ring: &R) -> BiSeries<R> {
        let (n1, n2) = (self.n1(), self.n2());
        let mut out = Self::zero(ring, n2, n1);
        for i in 0..n1 {
            for j in 0..n2 {
                out.coeffs[j][i] = self.coeffs[i][j].clone();
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    #[test]
    fn compose_identity() {
        let f = Field::new(13, 1).unwrap();
        let id = Series::z(&f, 6);
        let mut g = Series::zero(&f, 6);
        g.coeffs[1] = f.from_int(3);
        g.coeffs[4] = f.from_int(7);
        assert_eq!(id.compose(&f, &g).unwrap(), g);
    }

    #[test]
    fn func_inverse_z_plus_z2_f13() {
        // Oracle: undetermined coefficients by hand. f = z + z^2;
        // g = z + a z^2 + b z^3: f(g) = g + g^2
        //   z^2: a + 1 = 0        => a = -1
        //   z^3: b + 2a = 0       => b = 2
        let f13 = Field::new(13, 1).unwrap();
        let mut f = Series::zero(&f13, 4);
        f.coeffs[1] = f13.one();
        f.coeffs[2] = f13.one();
        let g = f.func_inverse(&f13).unwrap();
        assert_eq!(g.coeffs[1], f13.from_int(1));
        assert_eq!(g.coeffs[2], f13.from_int(-1));
        assert_eq!(g.coeffs[3], f13.from_int(2));
        // back-substitution
        assert!(f.compose(&f13, &g).unwrap().is_identity(&f13));
        assert!(g.compose(&f13, &f).unwrap().is_identity(&f13));
    }

    #[test]
    fn w_expansion_fixed_point() {
        // w solving z^3 = w + lam*w^2 over F_2, lam = 1:
        // iterate w <- z^3 + lam*w^2; mod z^7 this is z^3 + z^6.
        let f2 = Field::new(2, 1).unwrap();
        let n = 7;
        let mut z3 = Series::zero(&f2, n);
        z3.coeffs[3] = f2.one();
        let mut w = z3.clone();
        for _ in 0..3 {
            let w2 = w.mul(&f2, &w);
            w = z3.add(&f2, &w2);
        }
        let mut expect = Series::zero(&f2, n);
        expect.coeffs[3] = f2.one();
        expect.coeffs[6] = f2.one();
        assert_eq!(w, expect);
        // check the relation: w + w^2 = z^3 mod z^7
        let lhs = w.add(&f2, &w.mul(&f2, &w));
        assert_eq!(lhs, z3);
    }

    #[test]
    fn inverse_compose_roundtrip_random() {
        let f13 = Field::new(13, 1).unwrap();
        let mut state = 99u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            (state >> 33) % 13
        };
        for _ in 0..200 {
            let mut f = Series::zero(&f13, 7);
            f.coeffs[1] = f13.from_int(1 + (next() % 12) as i64);
            for i in 2..7 {
                f.coeffs[i] = f13.from_int(next() as i64);
            }
            let g = f.func_inverse(&f13).unwrap();
            assert!(f.compose(&f13, &g).unwrap().is_identity(&f13));
        }
    }

    #[test]
    fn bivariate_mul_and_subst() {
        let f = Field::new(3, 1).unwrap();
        let z1 = BiSeries::z1(&f, 4, 4);
        let z2 = BiSeries::z2(&f, 4, 4);
        let s = z1.add(&f, &z2);
        let sq = s.mul(&f, &s);
        // (z1+z2)^2 = z1^2 + 2 z1 z2 + z2^2
        assert_eq!(sq.coeffs[2][0], f.one());
        assert_eq!(sq.coeffs[1][1], f.from_int(2));
        assert_eq!(sq.coeffs[0][2], f.one());
        // substitute into u + u^2
        let mut outer = Series::zero(&f, 8);
        outer.coeffs[1] = f.one();
        outer.coeffs[2] = f.one();
        let sub = s.substitute_into(&f, &outer).unwrap();
        assert_eq!(sub.coeffs[1][0], f.one());
        assert_eq!(sub.coeffs[1][1], f.from_int(2));
    }
}

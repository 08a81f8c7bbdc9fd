//! A minimal commutative-ring interface shared by fields, test rings, and
//! symbolic rewrite rings, in context-passing style: the ring value carries
//! the structure, elements are plain data.

use std::fmt::Debug;

pub trait Ring: Clone {
    type El: Clone + PartialEq + Debug;

    fn zero(&self) -> Self::El;
    fn one(&self) -> Self::El;
    fn add(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn neg(&self, a: &Self::El) -> Self::El;
    fn mul(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn from_int(&self, n: i64) -> Self::El;

    /// Multiplicative inverse when one exists and is recognizable.
    fn inv(&self, a: &Self::El) -> Option<Self::El>;

    fn sub(&self, a: &Self::El, b: &Self::El) -> Self::El {
        self.add(a, &self.neg(b))
    }

    fn is_zero(&self, a: &Self::El) -> bool {
        *a == self.zero()
    }

    fn is_unit(&self, a: &Self::El) -> bool {
        self.inv(a).is_some()
    }

    fn pow(&self, a: &Self::El, e: u64) -> Self::El {
        let mut acc = self.one();
        let mut base = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Integer power; negative exponents require a unit.
    fn pow_i(&self, a: &Self::El, e: i64) -> Self::El {
        if e >= 0 {
            self.pow(a, e as u64)
        } else {
            let inv = self.inv(a).expect("negative power of non-unit");
            self.pow(&inv, (-e) as u64)
        }
    }
}

impl Ring for crate::field::Field {
    type El = crate::field::FieldElem;

    fn zero(&self) -> Self::El {
        crate::field::Field::zero(self)
    }
    fn one(&self) -> Self::El {
        crate::field::Field::one(self)
    }
    fn add(&self, a: &Self::El, b: &Self::El) -> Self::El {
        crate::field::Field::add(self, a, b)
    }
    fn neg(&self, a: &Self::El) -> Self::El {
        crate::field::Field::neg(self, a)
    }
    fn mul(&self, a: &Self::El, b: &Self::El) -> Self::El {
        crate::field::Field::mul(self, a, b)
    }
    fn from_int(&self, n: i64) -> Self::El {
        crate::field::Field::from_int(self, n)
    }
    fn inv(&self, a: &Self::El) -> Option<Self::El> {
        crate::field::Field::inv(self, a)
    }
    fn is_zero(&self, a: &Self::El) -> bool {
        crate::field::Field::is_zero(self, a)
    }
}

//! Recognition of small finite groups from multiplication tables, and
//! structure labels for finite group schemes.
//!
//! The catalog is closed: it contains exactly the etale groups that occur in
//! the classification tables. Anything else fails with `NotInCatalog`,
//! carrying the computed fingerprint for diagnostics.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use crate::Error;

/// A validated multiplication table of a finite group (closure,
/// associativity, identity, inverses all checked at construction).
#[derive(Clone, Debug)]
pub struct MultTable {
    pub n: usize,
    pub table: Vec<Vec<usize>>,
    pub labels: Vec<String>,
    pub identity: usize,
}

impl MultTable {
    /// Builds and validates the table of `elements` under `op`. Errors name
    /// the failing axiom with witnesses.
    pub fn new<T, F>(elements: &[T], op: F) -> Result<MultTable, Error>
    where
        T: Clone + Eq + Hash + fmt::Debug,
        F: Fn(&T, &T) -> T,
    {
        let n = elements.len();
        if n == 0 {
            return Err(Error::NoIdentity);
        }
        if n > 256 {
            return Err(Error::TooLarge(format!("{n} elements exceed the table cap")));
        }
        let index: HashMap<&T, usize> = elements.iter().enumerate().map(|(i, e)| (e, i)).collect();
        if index.len() != n {
            return Err(Error::NotClosed("duplicate elements in the list".into()));
        }
        let mut table = vec![vec![0usize; n]; n];
        for i in 0..n {
            for j in 0..n {
                let prod = op(&elements[i], &elements[j]);
                match index.get(&prod) {
                    Some(&k) => table[i][j] = k,
                    None => {
                        return Err(Error::NotClosed(format!(
                            "product of #{i} and #{j} is outside the set: {prod:?}"
                        )))
                    }
                }
            }
        }
        let labels = elements.iter().map(|e| format!("{e:?}")).collect();
        Self::from_raw(table, labels)
    }

    /// Validates a raw index table.
    pub fn from_raw(table: Vec<Vec<usize>>, labels: Vec<String>) -> Result<MultTable, Error> {
        let n = table.len();
        // associativity
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::NotAssociative(format!(
                            "witness ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        // identity
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or(Error::NoIdentity)?;
        // inverses
        for a in 0..n {
            if !(0..n).any(|b| table[a][b] == identity && table[b][a] == identity) {
                return Err(Error::NoInverse(labels.get(a).cloned().unwrap_or(a.to_string())));
            }
        }
        Ok(MultTable { n, table, labels, identity })
    }

    pub fn order_of(&self, a: usize) -> usize {
        let mut x = a;
        let mut n = 1;
        while x != self.identity {
            x = self.table[x][a];
            n += 1;
        }
        n
    }

    pub fn is_abelian(&self) -> bool {
        for a in 0..self.n {
            for b in 0..a {
                if self.table[a][b] != self.table[b][a] {
                    return false;
                }
            }
        }
        true
    }

    /// Sorted multiset of element orders.
    pub fn order_profile(&self) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.n).map(|a| self.order_of(a)).collect();
        v.sort_unstable();
        v
    }

    pub fn inverse_of(&self, a: usize) -> usize {
        (0..self.n)
            .find(|&b| self.table[a][b] == self.identity)
            .expect("validated table has inverses")
    }
}

/// The closed catalog of etale groups occurring in the tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupId {
    Trivial,
    Z2,
    Z3,
    Z4,
    Z6,
    Z2xZ2,
    Z3xZ3,
    Z4xZ2,
    S3,
    D8,
    Q8,
    A4,
    Z3SemiZ4,
    Q8SemiZ3,
    Z2xZ2SemiS3,
}

impl GroupId {
    /// The exact label used in reports and expected-value columns.
    pub fn label(&self) -> &'static str {
        match self {
            GroupId::Trivial => "1",
            GroupId::Z2 => "Z/2",
            GroupId::Z3 => "Z/3",
            GroupId::Z4 => "Z/4",
            GroupId::Z6 => "Z/6",
            GroupId::Z2xZ2 => "(Z/2)^2",
            GroupId::Z3xZ3 => "(Z/3)^2",
            GroupId::Z4xZ2 => "Z/4 × Z/2",
            GroupId::S3 => "S3",
            GroupId::D8 => "D8",
            GroupId::Q8 => "Q8",
            GroupId::A4 => "A4",
            GroupId::Z3SemiZ4 => "Z/3 ⋊ Z/4",
            GroupId::Q8SemiZ3 => "Q8 ⋊ Z/3",
            GroupId::Z2xZ2SemiS3 => "(Z/2)^2 ⋊ S3",
        }
    }

    pub fn order(&self) -> usize {
        match self {
            GroupId::Trivial => 1,
            GroupId::Z2 => 2,
            GroupId::Z3 => 3,
            GroupId::Z4 => 4,
            GroupId::Z6 => 6,
            GroupId::Z2xZ2 => 4,
            GroupId::Z3xZ3 => 9,
            GroupId::Z4xZ2 => 8,
            GroupId::S3 => 6,
            GroupId::D8 => 8,
            GroupId::Q8 => 8,
            GroupId::A4 => 12,
            GroupId::Z3SemiZ4 => 12,
            GroupId::Q8SemiZ3 => 24,
            GroupId::Z2xZ2SemiS3 => 24,
        }
    }

    pub fn all() -> &'static [GroupId] {
        &[
            GroupId::Trivial,
            GroupId::Z2,
            GroupId::Z3,
            GroupId::Z4,
            GroupId::Z6,
            GroupId::Z2xZ2,
            GroupId::Z3xZ3,
            GroupId::Z4xZ2,
            GroupId::S3,
            GroupId::D8,
            GroupId::Q8,
            GroupId::A4,
            GroupId::Z3SemiZ4,
            GroupId::Q8SemiZ3,
            GroupId::Z2xZ2SemiS3,
        ]
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Identifies a validated table against the catalog. Within the catalog the
/// sorted order profile is a complete invariant: it subsumes the classical
/// disambiguations (D8 vs Q8 by involution count, A4 vs Z/3 ⋊ Z/4 by order
/// profile, and the order-24 pair by their 2- and 3-element counts).
pub fn recognize(t: &MultTable) -> Result<GroupId, Error> {
    let profile = t.order_profile();
    let fingerprint = || {
        format!(
            "order={}, abelian={}, profile={:?}",
            t.n,
            t.is_abelian(),
            profile
        )
    };
    let id = match (t.n, profile.as_slice()) {
        (1, [1]) => GroupId::Trivial,
        (2, [1, 2]) => GroupId::Z2,
        (3, [1, 3, 3]) => GroupId::Z3,
        (4, [1, 2, 4, 4]) => GroupId::Z4,
        (4, [1, 2, 2, 2]) => GroupId::Z2xZ2,
        (6, [1, 2, 3, 3, 6, 6]) => GroupId::Z6,
        (6, [1, 2, 2, 2, 3, 3]) => GroupId::S3,
        (8, [1, 2, 2, 2, 2, 2, 4, 4]) => GroupId::D8,
        (8, [1, 2, 4, 4, 4, 4, 4, 4]) => GroupId::Q8,
        (8, [1, 2, 2, 2, 4, 4, 4, 4]) => GroupId::Z4xZ2,
        (9, [1, 3, 3, 3, 3, 3, 3, 3, 3]) => GroupId::Z3xZ3,
        (12, [1, 2, 2, 2, 3, 3, 3, 3, 3, 3, 3, 3]) => GroupId::A4,
        (12, [1, 2, 3, 3, 4, 4, 4, 4, 4, 4, 6, 6]) => GroupId::Z3SemiZ4,
        (24, _) => {
            let twos = profile.iter().filter(|&&o| o == 2).count();
            let threes = profile.iter().filter(|&&o| o == 3).count();
            let fours = profile.iter().filter(|&&o| o == 4).count();
            let sixes = profile.iter().filter(|&&o| o == 6).count();
            if (twos, threes, fours, sixes) == (1, 8, 6, 8) {
                GroupId::Q8SemiZ3
            } else if (twos, threes, fours, sixes) == (9, 8, 6, 0) {
                GroupId::Z2xZ2SemiS3
            } else {
                return Err(Error::NotInCatalog { order: t.n, fingerprint: fingerprint() });
            }
        }
        _ => return Err(Error::NotInCatalog { order: t.n, fingerprint: fingerprint() }),
    };
    Ok(id)
}

/// Reference construction of each catalog group, for round-trip tests and
/// quotient identification.
pub fn reference_table(id: GroupId) -> MultTable {
    match id {
        GroupId::Trivial => cyclic(1),
        GroupId::Z2 => cyclic(2),
        GroupId::Z3 => cyclic(3),
        GroupId::Z4 => cyclic(4),
        GroupId::Z6 => cyclic(6),
        GroupId::Z2xZ2 => product(&cyclic(2), &cyclic(2)),
        GroupId::Z3xZ3 => product(&cyclic(3), &cyclic(3)),
        GroupId::Z4xZ2 => product(&cyclic(4), &cyclic(2)),
        GroupId::S3 => sym(3),
        GroupId::D8 => dihedral8(),
        GroupId::Q8 => quaternion8(),
        GroupId::A4 => alt4(),
        GroupId::Z3SemiZ4 => dicyclic3(),
        GroupId::Q8SemiZ3 => sl2_f3(),
        GroupId::Z2xZ2SemiS3 => sym(4),
    }
}

fn cyclic(n: usize) -> MultTable {
    let elems: Vec<usize> = (0..n).collect();
    MultTable::new(&elems, |a, b| (a + b) % n).unwrap()
}

fn product(a: &MultTable, b: &MultTable) -> MultTable {
    let elems: Vec<(usize, usize)> = (0..a.n)
        .flat_map(|i| (0..b.n).map(move |j| (i, j)))
        .collect();
    MultTable::new(&elems, |x, y| (a.table[x.0][y.0], b.table[x.1][y.1])).unwrap()
}

fn perms(n: usize) -> Vec<Vec<usize>> {
    if n == 1 {
        return vec![vec![0]];
    }
    let mut out = Vec::new();
    for p in perms(n - 1) {
        for pos in 0..n {
            let mut q: Vec<usize> = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn compose_perm(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&i| a[i]).collect()
}

fn sym(n: usize) -> MultTable {
    let elems = perms(n);
    MultTable::new(&elems, |a, b| compose_perm(a, b)).unwrap()
}

fn alt4() -> MultTable {
    let elems: Vec<Vec<usize>> = perms(4)
        .into_iter()
        .filter(|p| {
            let mut inv = 0;
            for i in 0..4 {
                for j in 0..i {
                    if p[j] > p[i] {
                        inv += 1;
                    }
                }
            }
            inv % 2 == 0
        })
        .collect();
    MultTable::new(&elems, |a, b| compose_perm(a, b)).unwrap()
}

fn dihedral8() -> MultTable {
    // symmetries of the square as permutations of its 4 vertices
    let r = vec![1usize, 2, 3, 0];
    let s = vec![1usize, 0, 3, 2];
    let mut elems = vec![vec![0usize, 1, 2, 3]];
    let mut frontier = elems.clone();
    while let Some(p) = frontier.pop() {
        for g in [&r, &s] {
            let q = compose_perm(g, &p);
            if !elems.contains(&q) {
                elems.push(q.clone());
                frontier.push(q);
            }
        }
    }
    assert_eq!(elems.len(), 8);
    MultTable::new(&elems, |a, b| compose_perm(a, b)).unwrap()
}

fn quaternion8() -> MultTable {
    // elements coded 0..8 as +-1, +-i, +-j, +-k = (sign, axis)
    #[derive(Clone, PartialEq, Eq, Hash, Debug)]
    struct Q(u8, u8); // (sign 0/1, axis 0..4: 1,i,j,k)
    let elems: Vec<Q> = (0..2).flat_map(|s| (0..4).map(move |a| Q(s, a))).collect();
    let mul = |x: &Q, y: &Q| -> Q {
        let (s1, a) = (x.0, x.1);
        let (s2, b) = (y.0, y.1);
        // axis multiplication table with result sign
        let (s3, c) = match (a, b) {
            (0, t) => (0, t),
            (t, 0) => (0, t),
            (1, 1) => (1, 0),
            (2, 2) => (1, 0),
            (3, 3) => (1, 0),
            (1, 2) => (0, 3),
            (2, 1) => (1, 3),
            (2, 3) => (0, 1),
            (3, 2) => (1, 1),
            (3, 1) => (0, 2),
            (1, 3) => (1, 2),
            _ => unreachable!(),
        };
        Q((s1 + s2 + s3) % 2, c)
    };
    MultTable::new(&elems, mul).unwrap()
}

fn dicyclic3() -> MultTable {
    // <a, b | a^6 = 1, b^2 = a^3, b a b^-1 = a^-1>, elements a^i b^j
    let elems: Vec<(usize, usize)> = (0..6).flat_map(|i| (0..2).map(move |j| (i, j))).collect();
    let mul = |x: &(usize, usize), y: &(usize, usize)| -> (usize, usize) {
        let (i, j) = *x;
        let (k, l) = *y;
        // b a^k = a^-k b
        let (i2, j2) = if j == 0 { (i + k, l) } else { (i + 6 - k, 1 + l) };
        if j2 == 2 {
            ((i2 + 3) % 6, 0)
        } else {
            (i2 % 6, j2)
        }
    };
    MultTable::new(&elems, mul).unwrap()
}

fn sl2_f3() -> MultTable {
    let mut elems = Vec::new();
    for a in 0..3u8 {
        for b in 0..3u8 {
            for c in 0..3u8 {
                for d in 0..3u8 {
                    if (3 + a * d % 3 + 3 - b * c % 3) % 3 == 1 {
                        elems.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    assert_eq!(elems.len(), 24);
    let mul = |x: &[u8; 4], y: &[u8; 4]| -> [u8; 4] {
        [
            (x[0] * y[0] + x[1] * y[2]) % 3,
            (x[0] * y[1] + x[1] * y[3]) % 3,
            (x[2] * y[0] + x[3] * y[2]) % 3,
            (x[2] * y[1] + x[3] * y[3]) % 3,
        ]
    };
    MultTable::new(&elems, mul).unwrap()
}

/// One connected (infinitesimal) factor of a group scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConnFactor {
    Mu(u32),
    Alpha(u32),
    M2,
}

impl ConnFactor {
    pub fn label(&self) -> String {
        match self {
            ConnFactor::Mu(n) => format!("μ{n}"),
            ConnFactor::Alpha(n) => format!("α{n}"),
            ConnFactor::M2 => "M2".to_string(),
        }
    }

    /// Length as a finite group scheme.
    pub fn length(&self) -> u64 {
        match self {
            ConnFactor::Mu(n) | ConnFactor::Alpha(n) => *n as u64,
            ConnFactor::M2 => 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductKind {
    Direct,
    Semidirect,
    UnresolvedExtension,
}

/// Structure of a finite group scheme: connected factors (with the inner
/// product kind between them) and an etale part (with the outer kind).
#[derive(Clone, Debug, PartialEq)]
pub struct SchemeStructure {
    pub connected: Vec<ConnFactor>,
    pub inner_kind: ProductKind,
    pub etale: GroupId,
    pub outer_kind: ProductKind,
}

impl SchemeStructure {
    pub fn etale_only(g: GroupId) -> SchemeStructure {
        SchemeStructure {
            connected: Vec::new(),
            inner_kind: ProductKind::Direct,
            etale: g,
            outer_kind: ProductKind::Direct,
        }
    }

    pub fn length(&self) -> u64 {
        self.connected.iter().map(|f| f.length()).product::<u64>() * self.etale.order() as u64
    }

    fn connected_label(&self) -> Option<String> {
        if self.connected.is_empty() {
            return None;
        }
        if self.connected.len() == 1 {
            return Some(self.connected[0].label());
        }
        // power notation only for direct products of equal factors
        if self.connected.iter().all(|f| *f == self.connected[0])
            && self.inner_kind == ProductKind::Direct
        {
            return Some(format!("{}^{}", self.connected[0].label(), self.connected.len()));
        }
        let sep = match self.inner_kind {
            ProductKind::Direct => " × ",
            ProductKind::Semidirect => " ⋊ ",
            ProductKind::UnresolvedExtension => " . ",
        };
        Some(format!(
            "({})",
            self.connected.iter().map(|f| f.label()).collect::<Vec<_>>().join(sep)
        ))
    }

    /// The exact report label, matching the table entries.
    pub fn label(&self) -> String {
        match (self.connected_label(), self.etale) {
            (None, g) => g.label().to_string(),
            (Some(c), GroupId::Trivial) => c,
            (Some(c), g) => {
                let sep = match self.outer_kind {
                    ProductKind::Direct => " × ",
                    ProductKind::Semidirect => " ⋊ ",
                    ProductKind::UnresolvedExtension => " . ",
                };
                format!("{c}{sep}{g}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_round_trips() {
        for &id in GroupId::all() {
            let t = reference_table(id);
            assert_eq!(t.n, id.order(), "{id:?}");
            assert_eq!(recognize(&t).unwrap(), id, "{id:?}");
        }
    }

    #[test]
    fn relabeling_invariance() {
        // permuting element labels never changes the recognized id
        let mut state = 7u64;
        let mut next = move |m: usize| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as usize) % m
        };
        for &id in GroupId::all() {
            let t = reference_table(id);
            for _ in 0..100 {
                // random permutation via Fisher-Yates
                let mut perm: Vec<usize> = (0..t.n).collect();
                for i in (1..t.n).rev() {
                    perm.swap(i, next(i + 1));
                }
                let mut table = vec![vec![0; t.n]; t.n];
                for a in 0..t.n {
                    for b in 0..t.n {
                        table[perm[a]][perm[b]] = perm[t.table[a][b]];
                    }
                }
                let labels = (0..t.n).map(|i| i.to_string()).collect();
                let rt = MultTable::from_raw(table, labels).unwrap();
                assert_eq!(recognize(&rt).unwrap(), id);
            }
        }
    }

    #[test]
    fn trivial_table() {
        let t = MultTable::new(&[0usize], |_, _| 0).unwrap();
        assert_eq!(recognize(&t).unwrap(), GroupId::Trivial);
    }

    #[test]
    fn non_closed_rejected() {
        // {1, 2} under multiplication mod 5 is not closed (2*2 = 4)
        let err = MultTable::new(&[1u64, 2], |a, b| (a * b) % 5);
        assert!(matches!(err, Err(Error::NotClosed(_))));
    }

    #[test]
    fn q8_vs_d8_disambiguation() {
        // Q8 has exactly one involution, D8 has five.
        let q8 = reference_table(GroupId::Q8);
        let d8 = reference_table(GroupId::D8);
        let invol = |t: &MultTable| (0..t.n).filter(|&a| t.order_of(a) == 2).count();
        assert_eq!(invol(&q8), 1);
        assert_eq!(invol(&d8), 5);
        assert_eq!(recognize(&q8).unwrap(), GroupId::Q8);
        assert_eq!(recognize(&d8).unwrap(), GroupId::D8);
    }

    #[test]
    fn z2_cubed_not_in_catalog() {
        let z2 = reference_table(GroupId::Z2);
        let z2sq = product(&z2, &z2);
        let elems: Vec<(usize, usize)> = (0..z2sq.n)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .collect();
        let t = MultTable::new(&elems, |x, y| {
            (z2sq.table[x.0][y.0], (x.1 + y.1) % 2)
        })
        .unwrap();
        assert!(matches!(recognize(&t), Err(Error::NotInCatalog { order: 8, .. })));
    }

    #[test]
    fn structure_labels() {
        let s = SchemeStructure {
            connected: vec![ConnFactor::M2, ConnFactor::Alpha(2)],
            inner_kind: ProductKind::Direct,
            etale: GroupId::Z2,
            outer_kind: ProductKind::Semidirect,
        };
        assert_eq!(s.label(), "(M2 × α2) ⋊ Z/2");
        assert_eq!(s.length(), 16);
        let s2 = SchemeStructure {
            connected: vec![ConnFactor::Alpha(4), ConnFactor::Alpha(4)],
            inner_kind: ProductKind::Semidirect,
            etale: GroupId::Z3,
            outer_kind: ProductKind::Semidirect,
        };
        assert_eq!(s2.label(), "(α4 ⋊ α4) ⋊ Z/3");
        let s4 = SchemeStructure {
            connected: vec![ConnFactor::Alpha(2), ConnFactor::Alpha(2)],
            inner_kind: ProductKind::Direct,
            etale: GroupId::Z2,
            outer_kind: ProductKind::Semidirect,
        };
        assert_eq!(s4.label(), "α2^2 ⋊ Z/2");
        let s3 = SchemeStructure {
            connected: vec![ConnFactor::Alpha(3)],
            inner_kind: ProductKind::Direct,
            etale: GroupId::Z2,
            outer_kind: ProductKind::Semidirect,
        };
        assert_eq!(s3.label(), "α3 ⋊ Z/2");
    }
}

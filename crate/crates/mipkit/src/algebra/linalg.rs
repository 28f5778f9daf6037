//! Exact row-reduced subspaces of GF(p)^n. GF(2) rows are bit-packed into
//! words; odd p uses byte vectors. Plain Gaussian elimination throughout.

/// Row-reduced basis of a subspace, pivot columns strictly increasing and
/// fully back-substituted (RREF).
#[derive(Clone, Debug)]
pub struct Subspace {
    p: u64,
    n: usize,
    pivots: Vec<usize>,
    kind: Kind,
}

#[derive(Clone, Debug)]
enum Kind {
    Gf2 { rows: Vec<Vec<u64>> },
    Gfp { rows: Vec<Vec<u8>> },
}

fn words(n: usize) -> usize {
    n.div_ceil(64)
}

fn pack(v: &[u8]) -> Vec<u64> {
    let mut w = vec![0u64; words(v.len())];
    for (i, &c) in v.iter().enumerate() {
        debug_assert!(c < 2);
        if c != 0 {
            w[i / 64] |= 1 << (i % 64);
        }
    }
    w
}

fn unpack(w: &[u64], n: usize) -> Vec<u8> {
    (0..n).map(|i| ((w[i / 64] >> (i % 64)) & 1) as u8).collect()
}

fn lowest_bit(w: &[u64]) -> Option<usize> {
    w.iter().enumerate().find(|(_, &x)| x != 0).map(|(i, &x)| 64 * i + x.trailing_zeros() as usize)
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // Fermat; p prime and small.
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

impl Subspace {
    pub fn new(p: u64, n: usize) -> Subspace {
        assert!((2..256).contains(&p), "field order out of range");
        assert!((2..p).all(|d| !p.is_multiple_of(d)), "field order must be prime");
        let kind = if p == 2 { Kind::Gf2 { rows: Vec::new() } } else { Kind::Gfp { rows: Vec::new() } };
        Subspace { p, n, pivots: Vec::new(), kind }
    }

    pub fn field(&self) -> u64 {
        self.p
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_zero(&self) -> bool {
        self.pivots.is_empty()
    }

    /// Reduces `v` against the basis and absorbs any nonzero remainder.
    /// Returns true when the dimension grew.
    pub fn insert(&mut self, v: &[u8]) -> bool {
        assert_eq!(v.len(), self.n);
        match &mut self.kind {
            Kind::Gf2 { rows } => {
                let mut w = pack(v);
                for (k, &piv) in self.pivots.iter().enumerate() {
                    if (w[piv / 64] >> (piv % 64)) & 1 == 1 {
                        for (a, b) in w.iter_mut().zip(&rows[k]) {
                            *a ^= b;
                        }
                    }
                }
                let Some(piv) = lowest_bit(&w) else { return false };
                let pos = self.pivots.partition_point(|&q| q < piv);
                // Back-substitute to keep RREF.
                for row in rows.iter_mut() {
                    if (row[piv / 64] >> (piv % 64)) & 1 == 1 {
                        for (a, b) in row.iter_mut().zip(&w) {
                            *a ^= b;
                        }
                    }
                }
                self.pivots.insert(pos, piv);
                rows.insert(pos, w);
                true
            }
            Kind::Gfp { rows } => {
                let p = self.p;
                let mut w: Vec<u8> = v.iter().map(|&c| (c as u64 % p) as u8).collect();
                for (k, &piv) in self.pivots.iter().enumerate() {
                    let c = w[piv] as u64;
                    if c != 0 {
                        let f = p - c;
                        for (a, b) in w.iter_mut().zip(&rows[k]) {
                            *a = ((*a as u64 + f * *b as u64) % p) as u8;
                        }
                    }
                }
                let Some(piv) = w.iter().position(|&c| c != 0) else { return false };
                let scale = inv_mod(w[piv] as u64, p);
                for a in w.iter_mut() {
                    *a = (*a as u64 * scale % p) as u8;
                }
                let pos = self.pivots.partition_point(|&q| q < piv);
                for row in rows.iter_mut() {
                    let c = row[piv] as u64;
                    if c != 0 {
                        let f = p - c;
                        for (a, b) in row.iter_mut().zip(&w) {
                            *a = ((*a as u64 + f * *b as u64) % p) as u8;
                        }
                    }
                }
                self.pivots.insert(pos, piv);
                rows.insert(pos, w);
                true
            }
        }
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        assert_eq!(v.len(), self.n);
        match &self.kind {
            Kind::Gf2 { rows } => {
                let mut w = pack(v);
                for (k, &piv) in self.pivots.iter().enumerate() {
                    if (w[piv / 64] >> (piv % 64)) & 1 == 1 {
                        for (a, b) in w.iter_mut().zip(&rows[k]) {
                            *a ^= b;
                        }
                    }
                }
                w.iter().all(|&x| x == 0)
            }
            Kind::Gfp { rows } => {
                let p = self.p;
                let mut w: Vec<u8> = v.iter().map(|&c| (c as u64 % p) as u8).collect();
                for (k, &piv) in self.pivots.iter().enumerate() {
                    let c = w[piv] as u64;
                    if c != 0 {
                        let f = p - c;
                        for (a, b) in w.iter_mut().zip(&rows[k]) {
                            *a = ((*a as u64 + f * *b as u64) % p) as u8;
                        }
                    }
                }
                w.iter().all(|&x| x == 0)
            }
        }
    }

    pub fn basis_rows(&self) -> Vec<Vec<u8>> {
        match &self.kind {
            Kind::Gf2 { rows } => rows.iter().map(|w| unpack(w, self.n)).collect(),
            Kind::Gfp { rows } => rows.clone(),
        }
    }

    /// Mutual membership of bases; robust against row ordering.
    pub fn eq_space(&self, other: &Subspace) -> bool {
        self.p == other.p
            && self.n == other.n
            && self.dim() == other.dim()
            && other.basis_rows().iter().all(|r| self.contains(r))
            && self.basis_rows().iter().all(|r| other.contains(r))
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.p == other.p
            && self.n == other.n
            && self.basis_rows().iter().all(|r| other.contains(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf2_insert_and_membership() {
        let mut s = Subspace::new(2, 4);
        assert!(s.insert(&[1, 1, 0, 0]));
        assert!(s.insert(&[0, 1, 1, 0]));
        assert!(!s.insert(&[1, 0, 1, 0]), "sum of the first two");
        assert_eq!(s.dim(), 2);
        assert!(s.contains(&[1, 0, 1, 0]));
        assert!(!s.contains(&[1, 1, 1, 0]));
        assert!(s.contains(&[0, 0, 0, 0]));
    }

    #[test]
    fn gf2_rows_are_rref() {
        let mut s = Subspace::new(2, 5);
        s.insert(&[0, 1, 1, 0, 1]);
        s.insert(&[1, 1, 0, 1, 0]);
        s.insert(&[0, 0, 1, 1, 1]);
        let rows = s.basis_rows();
        // Pivot columns strictly increasing and cleared elsewhere.
        let pivots: Vec<usize> =
            rows.iter().map(|r| r.iter().position(|&c| c != 0).unwrap()).collect();
        assert!(pivots.windows(2).all(|w| w[0] < w[1]));
        for (i, r) in rows.iter().enumerate() {
            for (j, &piv) in pivots.iter().enumerate() {
                if i != j {
                    assert_eq!(r[piv], 0, "pivot column not cleared");
                }
            }
        }
    }

    #[test]
    fn gf3_arithmetic() {
        let mut s = Subspace::new(3, 3);
        assert!(s.insert(&[2, 1, 0]));
        // Scaled copy is dependent: 2*(2,1,0) = (1,2,0) mod 3.
        assert!(!s.insert(&[1, 2, 0]));
        assert!(s.insert(&[0, 0, 1]));
        assert_eq!(s.dim(), 2);
        assert!(s.contains(&[2, 1, 2]));
        assert!(!s.contains(&[1, 0, 0]));
    }

    #[test]
    fn gfp_pivot_normalized_to_one() {
        let mut s = Subspace::new(5, 3);
        s.insert(&[3, 1, 4]);
        let rows = s.basis_rows();
        assert_eq!(rows[0][0], 1);
    }

    #[test]
    fn equality_by_mutual_membership() {
        let mut a = Subspace::new(2, 4);
        a.insert(&[1, 1, 0, 0]);
        a.insert(&[0, 0, 1, 1]);
        let mut b = Subspace::new(2, 4);
        b.insert(&[1, 1, 1, 1]);
        b.insert(&[0, 0, 1, 1]);
        assert!(a.eq_space(&b));
        b.insert(&[1, 0, 0, 0]);
        assert!(!a.eq_space(&b));
        assert!(a.is_subspace_of(&b));
        assert!(!b.is_subspace_of(&a));
    }

    #[test]
    fn full_space_and_zero_space() {
        let mut s = Subspace::new(2, 130);
        for i in 0..130 {
            let mut v = vec![0u8; 130];
            v[i] = 1;
            assert!(s.insert(&v));
        }
        assert_eq!(s.dim(), 130);
        let z = Subspace::new(2, 130);
        assert!(z.is_zero());
        assert!(z.is_subspace_of(&s));
    }

    #[test]
    #[should_panic]
    fn composite_field_order_rejected() {
        Subspace::new(6, 3);
    }
}

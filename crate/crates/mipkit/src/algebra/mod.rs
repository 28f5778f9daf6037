//! The modular group algebra F_pG as exact linear algebra: augmentation
//! ideal powers, dimension subgroups, ideals attached to normal subgroups,
//! the class-sum ideal, and the d(G') dimension formula.

pub mod linalg;
pub mod units;

use thiserror::Error;

use crate::bitset::BitSet;
use crate::groups::{section_invariants, FiniteGroup, Subgroup};
use linalg::Subspace;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("element length {found} does not match the algebra dimension {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("subspace belongs to a different algebra (field or ambient dimension)")]
    ParentMismatch,
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("group order {order} is not a power of {p}")]
    NotAPGroup { order: usize, p: u64 },
    #[error("unit group too large: 2^{exponent} units exceeds the enumeration budget")]
    UnitBudget { exponent: usize },
}

/// F_pG for a p-group G. Elements are dense coefficient vectors of length
/// |G| indexed by group element, entries in 0..p.
#[derive(Debug)]
pub struct GroupAlgebra {
    g: FiniteGroup,
    p: u64,
}

impl GroupAlgebra {
    pub fn new(g: &FiniteGroup, p: u64) -> Result<GroupAlgebra, AlgebraError> {
        assert!((2..256).contains(&p) && (2..p).all(|d| !p.is_multiple_of(d)), "field order must be prime");
        let mut n = g.order() as u64;
        while n.is_multiple_of(p) {
            n /= p;
        }
        if n != 1 {
            return Err(AlgebraError::NotAPGroup { order: g.order(), p });
        }
        Ok(GroupAlgebra { g: g.clone(), p })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.g
    }

    pub fn field(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.g.order()
    }

    pub fn zero(&self) -> Vec<u8> {
        vec![0; self.g.order()]
    }

    pub fn basis_elem(&self, x: usize) -> Vec<u8> {
        let mut v = self.zero();
        v[x] = 1;
        v
    }

    pub fn one(&self) -> Vec<u8> {
        self.basis_elem(self.g.identity())
    }

    pub fn augmentation(&self, a: &[u8]) -> u64 {
        a.iter().map(|&c| c as u64).sum::<u64>() % self.p
    }

    fn check_len(&self, v: &[u8]) -> Result<(), AlgebraError> {
        if v.len() != self.g.order() {
            return Err(AlgebraError::LengthMismatch {
                expected: self.g.order(),
                found: v.len(),
            });
        }
        Ok(())
    }

    /// Convolution over the group operation, coefficients mod p.
    pub fn multiply(&self, a: &[u8], b: &[u8]) -> Result<Vec<u8>, AlgebraError> {
        self.check_len(a)?;
        self.check_len(b)?;
        let mut out = vec![0u64; self.g.order()];
        for (i, &ca) in a.iter().enumerate() {
            if ca == 0 {
                continue;
            }
            for (j, &cb) in b.iter().enumerate() {
                if cb == 0 {
                    continue;
                }
                let k = self.g.mult(i, j);
                out[k] = (out[k] + ca as u64 * cb as u64) % self.p;
            }
        }
        Ok(out.into_iter().map(|c| c as u8).collect())
    }

    fn translate_right(&self, v: &[u8], x: usize) -> Vec<u8> {
        let mut out = self.zero();
        for (i, &c) in v.iter().enumerate() {
            if c != 0 {
                out[self.g.mult(i, x)] = c;
            }
        }
        out
    }

    fn translate_left(&self, v: &[u8], x: usize) -> Vec<u8> {
        let mut out = self.zero();
        for (i, &c) in v.iter().enumerate() {
            if c != 0 {
                out[self.g.mult(x, i)] = c;
            }
        }
        out
    }

    fn sub(&self, a: &[u8], b: &[u8]) -> Vec<u8> {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| ((x as u64 + self.p - y as u64) % self.p) as u8)
            .collect()
    }

    pub fn new_subspace(&self) -> Subspace {
        Subspace::new(self.p, self.g.order())
    }

    fn check_subspace(&self, s: &Subspace) -> Result<(), AlgebraError> {
        if s.field() != self.p || s.ambient_dim() != self.g.order() {
            return Err(AlgebraError::ParentMismatch);
        }
        Ok(())
    }

    /// Span of { g - 1 : g != identity }, dimension |G| - 1.
    pub fn augmentation_ideal(&self) -> Subspace {
        let mut s = self.new_subspace();
        for x in 1..self.g.order() {
            let mut v = self.basis_elem(x);
            v[0] = (self.p - 1) as u8;
            s.insert(&v);
        }
        debug_assert_eq!(s.dim(), self.g.order() - 1);
        s
    }

    /// Row-reduced span of pairwise products of basis vectors.
    pub fn subspace_product(&self, u: &Subspace, v: &Subspace) -> Result<Subspace, AlgebraError> {
        self.check_subspace(u)?;
        self.check_subspace(v)?;
        let mut out = self.new_subspace();
        for a in u.basis_rows() {
            for b in v.basis_rows() {
                out.insert(&self.multiply(&a, &b)?);
            }
        }
        Ok(out)
    }

    /// Smallest two-sided ideal containing the seeds: closure under left and
    /// right translation by the generator basis vectors (translations by
    /// generators compose to translations by every group element).
    pub fn ideal_closure(&self, seeds: &[Vec<u8>]) -> Subspace {
        let mut s = self.new_subspace();
        let mut pending: Vec<Vec<u8>> = Vec::new();
        for v in seeds {
            assert_eq!(v.len(), self.g.order());
            if s.insert(v) {
                pending.push(v.clone());
            }
        }
        while let Some(v) = pending.pop() {
            for &x in self.g.gen_images() {
                for t in [self.translate_right(&v, x), self.translate_left(&v, x)] {
                    if s.insert(&t) {
                        pending.push(t);
                    }
                }
            }
        }
        s
    }

    /// Delta^{k+1} from Delta^k: since Delta is generated as a left ideal by
    /// the generator differences, Delta^k . Delta = sum of Delta^k (x_j - 1).
    fn next_delta(&self, cur: &Subspace) -> Subspace {
        let mut next = self.new_subspace();
        for row in cur.basis_rows() {
            for &x in self.g.gen_images() {
                let t = self.translate_right(&row, x);
                next.insert(&self.sub(&t, &row));
            }
        }
        next
    }

    pub fn delta_power(&self, k: usize) -> Subspace {
        if k == 0 {
            let mut s = self.new_subspace();
            for x in 0..self.g.order() {
                s.insert(&self.basis_elem(x));
            }
            return s;
        }
        let mut cur = self.augmentation_ideal();
        for _ in 1..k {
            cur = self.next_delta(&cur);
        }
        cur
    }

    /// dims[k] = dim Delta^k, from dims[0] = |G| down to the first zero.
    pub fn augmentation_filtration(&self) -> Vec<usize> {
        let mut dims = vec![self.g.order()];
        let mut cur = self.augmentation_ideal();
        dims.push(cur.dim());
        while cur.dim() > 0 {
            cur = self.next_delta(&cur);
            assert!(cur.dim() < dims[dims.len() - 1], "powers of Delta must shrink strictly");
            dims.push(cur.dim());
        }
        dims
    }

    fn members_of_delta_power(&self, delta_k: &Subspace) -> Subgroup {
        let mut members = BitSet::new(self.g.order());
        for x in 0..self.g.order() {
            let mut v = self.basis_elem(x);
            v[0] = ((v[0] as u64 + self.p - 1) % self.p) as u8;
            if delta_k.contains(&v) {
                members.insert(x);
            }
        }
        Subgroup::from_members(self.g.clone(), members)
            .expect("elements with g - 1 in an ideal form a subgroup")
    }

    /// D_k = { g : g - 1 in Delta^k }.
    pub fn dimension_subgroup(&self, k: usize) -> Subgroup {
        assert!(k >= 1);
        self.members_of_delta_power(&self.delta_power(k))
    }

    /// D_1 = G down to the first trivial term.
    pub fn dimension_subgroup_series(&self) -> Vec<Subgroup> {
        let mut terms = vec![self.g.full_subgroup()];
        let mut cur = self.augmentation_ideal();
        loop {
            cur = self.next_delta(&cur);
            let d = self.members_of_delta_power(&cur);
            let last = terms.last().unwrap();
            assert!(d.is_subgroup_of(last), "dimension subgroups must descend");
            terms.push(d);
            if terms.last().unwrap().is_trivial() {
                return terms;
            }
        }
    }

    /// Delta(N)FG for normal N: the ideal generated by { h - 1 : h in N },
    /// of dimension |G| - |G|/|N|.
    pub fn ideal_of_normal_subgroup(&self, n: &Subgroup) -> Result<Subspace, AlgebraError> {
        assert!(n.parent().same_group(&self.g));
        if !n.is_normal() {
            return Err(AlgebraError::NotNormal);
        }
        let seeds: Vec<Vec<u8>> = n
            .members()
            .iter()
            .filter(|&h| h != 0)
            .map(|h| {
                let mut v = self.basis_elem(h);
                v[0] = (self.p - 1) as u8;
                v
            })
            .collect();
        let s = self.ideal_closure(&seeds);
        assert_eq!(
            s.dim(),
            self.g.order() - self.g.order() / n.order(),
            "dim Delta(N)FG formula"
        );
        Ok(s)
    }

    /// Delta(N)Delta(G) for normal N, generated as a two-sided ideal by
    /// (h - 1)(x_j - 1): normality moves group elements past Delta(N), and
    /// splitting a word as uv - 1 = u(v - 1) + (u - 1) peels any (n-1)(g-1)
    /// down to those seeds.
    pub fn delta_subgroup_times_delta(&self, n: &Subgroup) -> Result<Subspace, AlgebraError> {
        assert!(n.parent().same_group(&self.g));
        if !n.is_normal() {
            return Err(AlgebraError::NotNormal);
        }
        let mut seeds = Vec::new();
        for h in n.members().iter() {
            if h == 0 {
                continue;
            }
            let mut hv = self.basis_elem(h);
            hv[0] = (self.p - 1) as u8;
            for &x in self.g.gen_images() {
                let t = self.translate_right(&hv, x);
                seeds.push(self.sub(&t, &hv));
            }
        }
        Ok(self.ideal_closure(&seeds))
    }

    /// Span of { xy - yx : x, y group basis vectors }.
    pub fn lie_commutator_subspace(&self) -> Subspace {
        let mut s = self.new_subspace();
        let n = self.g.order();
        for x in 0..n {
            for y in x + 1..n {
                let xy = self.g.mult(x, y);
                let yx = self.g.mult(y, x);
                if xy == yx {
                    continue;
                }
                let mut v = self.zero();
                v[xy] = 1;
                v[yx] = (self.p - 1) as u8;
                s.insert(&v);
            }
        }
        s
    }

    /// The ideal generated by the central elements of Delta together with
    /// [FG, FG]. Central elements of Delta are spanned by the adjusted class
    /// sums C^ - |C|.1 over the nonidentity classes (singleton classes give
    /// z - 1 for central z). Equals Delta(Z(G)G')FG, which is asserted.
    pub fn class_sum_ideal(&self) -> Subspace {
        let mut seeds = Vec::new();
        for class in self.g.conjugacy_classes() {
            if class == [self.g.identity()] {
                continue;
            }
            let mut v = self.zero();
            for &x in &class {
                v[x] = 1;
            }
            v[0] = ((v[0] as u64 + self.p - (class.len() as u64 % self.p)) % self.p) as u8;
            seeds.push(v);
        }
        seeds.extend(self.lie_commutator_subspace().basis_rows());
        let s = self.ideal_closure(&seeds);
        let z = self.g.center();
        let zg = z.join(&self.g.derived_subgroup());
        let expected = self.ideal_of_normal_subgroup(&zg).expect("Z(G)G' is normal");
        assert!(s.eq_space(&expected), "class-sum ideal must equal Delta(Z(G)G')FG");
        s
    }

    /// dim Delta(G')FG - dim Delta(G')Delta(G), which equals the minimal
    /// number of generators of G'; the group-theoretic rank of G'/Phi(G')
    /// is computed alongside and the two are asserted equal.
    pub fn derived_min_generators(&self) -> usize {
        let d = self.g.derived_subgroup();
        let ifg = self.ideal_of_normal_subgroup(&d).expect("derived subgroup is normal");
        let idd = self.delta_subgroup_times_delta(&d).expect("derived subgroup is normal");
        let alg = ifg.dim() - idd.dim();
        let phi = self.g.commutator_subgroup(&d, &d).join(&self.g.power_subgroup(&d, self.p));
        let grp = section_invariants(&self.g, &d, &phi)
            .expect("G'/Phi(G') is elementary abelian")
            .0
            .len();
        assert_eq!(alg, grp, "algebra-side d(G') must match the group side");
        alg
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{realize, DEFAULT_MAX_COSETS};
    use crate::invariants::jennings_series;
    use crate::presentation::parse_presentation;

    fn realize_text(text: &str) -> FiniteGroup {
        realize(&parse_presentation(text).unwrap(), DEFAULT_MAX_COSETS).unwrap()
    }

    fn algebra(text: &str, p: u64) -> GroupAlgebra {
        GroupAlgebra::new(&realize_text(text), p).unwrap()
    }

    const DIHEDRAL8: &str = "<a,b| a^4=1, b^2=1, b^-1*a*b=a^-1>";
    const QUATERNION8: &str = "<a,b| a^4=1, b^2=a^2, b^-1*a*b=a^-1>";

    #[test]
    fn rejects_non_p_group() {
        let g = realize_text("<a| a^6=1>");
        assert_eq!(
            GroupAlgebra::new(&g, 2).unwrap_err(),
            AlgebraError::NotAPGroup { order: 6, p: 2 }
        );
    }

    #[test]
    fn multiplication_basics() {
        let a = algebra("<a| a^2=1>", 2);
        let one = a.one();
        let x = a.basis_elem(1);
        assert_eq!(a.multiply(&one, &x).unwrap(), x);
        // (1 + a)^2 = 0 in characteristic 2.
        let s = vec![1u8, 1];
        assert_eq!(a.multiply(&s, &s).unwrap(), vec![0, 0]);

        let k = algebra("<a,b| a^2=1, b^2=1, a*b=b*a>", 2);
        let ga = k.g.gen_images()[0];
        let gb = k.g.gen_images()[1];
        let mut u = k.one();
        u[ga] = 1;
        let mut v = k.one();
        v[gb] = 1;
        let prod = k.multiply(&u, &v).unwrap();
        // 1 + a + b + ab: all four coefficients set.
        assert_eq!(prod.iter().filter(|&&c| c == 1).count(), 4);
    }

    #[test]
    fn multiply_length_mismatch() {
        let a = algebra("<a| a^2=1>", 2);
        assert_eq!(
            a.multiply(&[1], &[1, 0]).unwrap_err(),
            AlgebraError::LengthMismatch { expected: 2, found: 1 }
        );
    }

    #[test]
    fn augmentation_ideal_dimensions() {
        assert_eq!(algebra("<a| a^2=1>", 2).augmentation_ideal().dim(), 1);
        assert_eq!(algebra("<a| a^1=1>", 2).augmentation_ideal().dim(), 0);
        assert_eq!(algebra(DIHEDRAL8, 2).augmentation_ideal().dim(), 7);
    }

    #[test]
    fn filtration_of_small_2_groups() {
        assert_eq!(algebra("<a| a^2=1>", 2).augmentation_filtration(), vec![2, 1, 0]);
        assert_eq!(algebra("<a| a^4=1>", 2).augmentation_filtration(), vec![4, 3, 2, 1, 0]);
        assert_eq!(
            algebra("<a,b| a^2=1, b^2=1, a*b=b*a>", 2).augmentation_filtration(),
            vec![4, 3, 1, 0]
        );
    }

    #[test]
    fn filtration_of_dihedral_and_quaternion() {
        // Jennings factors C2xC2 then C2 give graded dims 1,2,2,2,1.
        assert_eq!(algebra(DIHEDRAL8, 2).augmentation_filtration(), vec![8, 7, 5, 3, 1, 0]);
        assert_eq!(algebra(QUATERNION8, 2).augmentation_filtration(), vec![8, 7, 5, 3, 1, 0]);
    }

    #[test]
    fn filtration_over_gf3() {
        assert_eq!(algebra("<a| a^3=1>", 3).augmentation_filtration(), vec![3, 2, 1, 0]);
        // F3[C3 x C3] = F3[u,v]/(u^3, v^3); monomial counts by degree are
        // 1, 2, 3, 2, 1, so the tails are 8, 6, 3, 1.
        assert_eq!(
            algebra("<a,b| a^3=1, b^3=1, a*b=b*a>", 3).augmentation_filtration(),
            vec![9, 8, 6, 3, 1, 0]
        );
    }

    #[test]
    fn subspace_products() {
        let a = algebra("<a| a^4=1>", 2);
        let full = a.delta_power(0);
        let delta = a.augmentation_ideal();
        assert!(a.subspace_product(&full, &delta).unwrap().eq_space(&delta));
        assert_eq!(a.subspace_product(&delta, &delta).unwrap().dim(), 2);

        let c2 = algebra("<a| a^2=1>", 2);
        let d2 = c2.augmentation_ideal();
        assert!(c2.subspace_product(&d2, &d2).unwrap().is_zero());
    }

    #[test]
    fn delta_powers_multiply_into_higher_powers() {
        let a = algebra(DIHEDRAL8, 2);
        for i in 1..4 {
            for j in 1..4 {
                let prod = a.subspace_product(&a.delta_power(i), &a.delta_power(j)).unwrap();
                assert!(
                    prod.is_subspace_of(&a.delta_power(i + j)),
                    "Delta^{i} . Delta^{j} not inside Delta^{}",
                    i + j
                );
            }
        }
    }

    #[test]
    fn dimension_subgroups_of_cyclic_4() {
        let a = algebra("<a| a^4=1>", 2);
        assert!(a.dimension_subgroup(1).is_full());
        let d2 = a.dimension_subgroup(2);
        assert_eq!(d2.order(), 2);
        let gen = a.group().gen_images()[0];
        assert!(d2.contains(a.group().mult(gen, gen)));
    }

    #[test]
    fn dimension_subgroups_match_jennings_series() {
        for (text, p) in [
            (DIHEDRAL8, 2),
            (QUATERNION8, 2),
            ("<a| a^8=1>", 2),
            ("<a,b| a^2=1, b^2=1, a*b=b*a>", 2),
            ("<a,b,c| a^3=1, b^3=1, c^3=1, b^-1*a^-1*b*a=c, a*c=c*a, b*c=c*b>", 3),
        ] {
            let g = realize_text(text);
            let alg = GroupAlgebra::new(&g, p).unwrap();
            let m = jennings_series(&g, p).unwrap();
            let d = alg.dimension_subgroup_series();
            assert_eq!(m.len(), d.len(), "{text}");
            for (k, (mk, dk)) in m.iter().zip(&d).enumerate() {
                assert_eq!(mk, dk, "term {} for {text}", k + 1);
            }
        }
    }

    #[test]
    fn ideal_of_normal_subgroup_dimensions() {
        let a = algebra(DIHEDRAL8, 2);
        let g = a.group().clone();
        assert!(a.ideal_of_normal_subgroup(&g.trivial_subgroup()).unwrap().is_zero());
        assert_eq!(a.ideal_of_normal_subgroup(&g.full_subgroup()).unwrap().dim(), 7);
        assert_eq!(a.ideal_of_normal_subgroup(&g.derived_subgroup()).unwrap().dim(), 4);

        let b = algebra(
            "<a,b,c| a^16=1, b^2=a^8, c^2=1, b^-1*a*b=a^-1, a*c=c*a, b*c=c*b>",
            2,
        );
        assert_eq!(b.group().order(), 64);
        let d = b.group().derived_subgroup();
        assert_eq!(d.order(), 8);
        assert_eq!(b.ideal_of_normal_subgroup(&d).unwrap().dim(), 56);
    }

    #[test]
    fn ideal_of_non_normal_subgroup_rejected() {
        let a = algebra(DIHEDRAL8, 2);
        let b = a.group().gen_images()[1];
        let h = a.group().subgroup_closure(&[b]);
        assert_eq!(a.ideal_of_normal_subgroup(&h).unwrap_err(), AlgebraError::NotNormal);
    }

    #[test]
    fn delta_n_delta_g_matches_literal_product() {
        for text in [DIHEDRAL8, QUATERNION8, "<a| a^8=1>", "<a,b| a^8=1, b^2=1, b^-1*a*b=a^3>"] {
            let a = algebra(text, 2);
            let g = a.group().clone();
            for n in [g.derived_subgroup(), g.center(), g.full_subgroup()] {
                let closed = a.delta_subgroup_times_delta(&n).unwrap();
                let literal = a
                    .subspace_product(
                        &a.ideal_of_normal_subgroup(&n).unwrap(),
                        &a.augmentation_ideal(),
                    )
                    .unwrap();
                assert!(closed.eq_space(&literal), "{text}");
            }
        }
    }

    #[test]
    fn lie_commutators_of_abelian_group_vanish() {
        let a = algebra("<a| a^4=1>", 2);
        assert!(a.lie_commutator_subspace().is_zero());
    }

    #[test]
    fn lie_commutator_ideal_is_derived_ideal() {
        for text in [DIHEDRAL8, QUATERNION8] {
            let a = algebra(text, 2);
            let lie = a.lie_commutator_subspace();
            let ideal = a.ideal_closure(&lie.basis_rows());
            let expected = a.ideal_of_normal_subgroup(&a.group().derived_subgroup()).unwrap();
            assert!(ideal.eq_space(&expected), "{text}");
            assert_eq!(ideal.dim(), 4, "{text}");
        }
    }

    #[test]
    fn class_sum_ideal_dimensions() {
        assert_eq!(algebra(DIHEDRAL8, 2).class_sum_ideal().dim(), 4);
        assert_eq!(algebra(QUATERNION8, 2).class_sum_ideal().dim(), 4);
        // Abelian: Z(G)G' = G, so the ideal is all of Delta.
        let a = algebra("<a| a^4=1>", 2);
        assert!(a.class_sum_ideal().eq_space(&a.augmentation_ideal()));
        // Z G' of order 16 inside order 64: 64 - 4.
        let b = algebra(
            "<a,b,c| a^16=1, b^2=1, c^2=1, a*b=b*a, c^-1*a*c=a*b, b*c=c*b>",
            2,
        );
        assert_eq!(b.class_sum_ideal().dim(), 60);
    }

    #[test]
    fn derived_min_generators_examples() {
        assert_eq!(algebra("<a| a^8=1>", 2).derived_min_generators(), 0);
        assert_eq!(algebra(DIHEDRAL8, 2).derived_min_generators(), 1);
        // Derived subgroup C2 x C2 needs two generators.
        let a = algebra(
            "<a,b,c| a^16=1, b^2=1, c^2=1, b^-1*a*b=a^9, c^-1*a*c=a*b, b*c=c*b>",
            2,
        );
        assert_eq!(a.derived_min_generators(), 2);
        // Derived subgroup C4 is cyclic.
        let b = algebra(
            "<a,b,c| a^16=1, b^2=1, c^2=1, a*b=b*a, c^-1*a*c=a^5*b, c^-1*b*c=a^8*b>",
            2,
        );
        assert_eq!(b.derived_min_generators(), 1);
    }
}

//! Nilpotency class of the unit group 1 + Delta of F_2 G, by explicit
//! enumeration. Only viable at desk scale: 2^(|G|-1) units.

use super::AlgebraError;
use crate::groups::FiniteGroup;

const MAX_ORDER: usize = 16;

struct UnitContext {
    n: usize,
    /// left_mult[i][m] = basis element i times the mask m.
    left_mult: Vec<Vec<u32>>,
}

impl UnitContext {
    fn new(g: &FiniteGroup) -> UnitContext {
        let n = g.order();
        let size = 1usize << n;
        let mut left_mult = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = vec![0u32; size];
            for m in 1..size {
                let low = m.trailing_zeros() as usize;
                row[m] = row[m & (m - 1)] ^ (1 << g.mult(i, low));
            }
            left_mult.push(row);
        }
        UnitContext { n, left_mult }
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        let mut out = 0u32;
        let mut rest = a;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            out ^= self.left_mult[i][b as usize];
        }
        out
    }

    /// (1 + x)^-1 = 1 + x + x^2 + ...; x = u - 1 is nilpotent.
    fn inv(&self, u: u32) -> u32 {
        let x = u ^ 1;
        let mut acc = 1u32;
        let mut term = x;
        let mut steps = 0;
        while term != 0 {
            acc ^= term;
            term = self.mul(term, x);
            steps += 1;
            assert!(steps <= self.n, "augmentation part must be nilpotent");
        }
        acc
    }

    fn commutator(&self, u: u32, v: u32) -> u32 {
        self.mul(self.mul(self.mul(self.inv(u), self.inv(v)), u), v)
    }
}

/// Closure of a subgroup under new generators, tracking the generators that
/// actually enlarged it (each at least doubles the order, so few survive).
struct MaskSubgroup {
    members: Vec<u32>,
    seen: Vec<u64>,
    gens: Vec<u32>,
}

impl MaskSubgroup {
    fn trivial(n: usize) -> MaskSubgroup {
        let mut s = MaskSubgroup {
            members: vec![1],
            seen: vec![0u64; (1usize << n).div_ceil(64)],
            gens: Vec::new(),
        };
        s.mark(1);
        s
    }

    fn mark(&mut self, m: u32) {
        self.seen[m as usize / 64] |= 1 << (m % 64);
    }

    fn contains(&self, m: u32) -> bool {
        (self.seen[m as usize / 64] >> (m % 64)) & 1 == 1
    }

    fn absorb(&mut self, seed: u32, cx: &UnitContext) {
        if self.contains(seed) {
            return;
        }
        self.gens.push(seed);
        // Re-walk all members against the enlarged generator list; the seed
        // itself appears as identity . seed.
        let mut head = 0;
        while head < self.members.len() {
            let x = self.members[head];
            head += 1;
            for gi in 0..self.gens.len() {
                let y = cx.mul(x, self.gens[gi]);
                if !self.contains(y) {
                    self.mark(y);
                    self.members.push(y);
                }
            }
        }
        debug_assert!(self.contains(seed));
    }

    fn order(&self) -> usize {
        self.members.len()
    }
}

/// Filtration-adapted basis of Delta: masks drawn from the highest nonzero
/// power of Delta downwards, so that 1 + basis generates all of 1 + Delta.
fn adapted_delta_basis(g: &FiniteGroup, cx: &UnitContext) -> Vec<u32> {
    let n = g.order();
    // Powers of Delta as mask lists via repeated right multiplication by
    // the generator differences (g_j - 1 = mask g_j XOR 1).
    let mut powers: Vec<Vec<u32>> = Vec::new();
    let mut cur: Vec<u32> = (1..n).map(|i| (1u32 << i) ^ 1).collect();
    while !cur.is_empty() {
        powers.push(cur.clone());
        let mut next_span = MaskSpan::new(n);
        let mut next = Vec::new();
        for &v in &cur {
            for &img in g.gen_images() {
                let t = cx.mul(v, (1u32 << img) ^ 1);
                if t != 0 && next_span.insert(t) {
                    next.push(t);
                }
            }
        }
        cur = next;
    }
    let mut span = MaskSpan::new(n);
    let mut basis = Vec::new();
    for level in powers.iter().rev() {
        for &v in level {
            if span.insert(v) {
                basis.push(v);
            }
        }
    }
    assert_eq!(basis.len(), n - 1, "adapted basis must span Delta");
    basis
}

/// GF(2) row space of masks, for basis extraction.
struct MaskSpan {
    rows: Vec<u32>,
}

impl MaskSpan {
    fn new(_n: usize) -> MaskSpan {
        MaskSpan { rows: Vec::new() }
    }

    fn insert(&mut self, v: u32) -> bool {
        let mut w = v;
        for &r in &self.rows {
            let piv = 1u32 << (31 - r.leading_zeros());
            if w & piv != 0 {
                w ^= r;
            }
        }
        if w == 0 {
            return false;
        }
        self.rows.push(w);
        true
    }
}

/// Nilpotency class of 1 + Delta in F_2 G.
pub fn unit_group_class(g: &FiniteGroup, p: u64) -> Result<u64, AlgebraError> {
    assert_eq!(p, 2, "unit enumeration is implemented over GF(2) only");
    let n = g.order();
    {
        let mut m = n;
        while m.is_multiple_of(2) {
            m /= 2;
        }
        if m != 1 {
            return Err(AlgebraError::NotAPGroup { order: n, p });
        }
    }
    if n > MAX_ORDER {
        return Err(AlgebraError::UnitBudget { exponent: n - 1 });
    }
    let cx = UnitContext::new(g);

    let unit_gens: Vec<u32> = adapted_delta_basis(g, &cx).iter().map(|&b| b ^ 1).collect();
    let mut full = MaskSubgroup::trivial(n);
    for &u in &unit_gens {
        full.absorb(u, &cx);
    }
    assert_eq!(full.order(), 1usize << (n - 1), "units 1 + basis must generate 1 + Delta");

    // Lower central series by commutator closure: gamma_{k+1} is the normal
    // closure of the commutators of gamma_k's generators with the unit
    // generators (both subgroups are normal, so generator pairs suffice).
    let mut gens_k: Vec<u32> = unit_gens.clone();
    let mut order_k = full.order();
    let mut class = 0u64;
    loop {
        if order_k == 1 {
            return Ok(class);
        }
        let mut next = MaskSubgroup::trivial(n);
        let mut frontier: Vec<u32> = Vec::new();
        for &x in &gens_k {
            for &u in &unit_gens {
                let c = cx.commutator(x, u);
                if !next.contains(c) {
                    next.absorb(c, &cx);
                    frontier.push(c);
                }
            }
        }
        // Normal closure under conjugation by the unit generators.
        loop {
            let mut grew = false;
            let snapshot = next.members.clone();
            for &x in &snapshot {
                for &u in &unit_gens {
                    let c = cx.mul(cx.mul(cx.inv(u), x), u);
                    if !next.contains(c) {
                        next.absorb(c, &cx);
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        assert!(next.order() < order_k, "lower central series of a finite 2-group descends");
        class += 1;
        gens_k = next.gens.clone();
        order_k = next.order();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{realize, DEFAULT_MAX_COSETS};
    use crate::presentation::parse_presentation;

    fn realize_text(text: &str) -> FiniteGroup {
        realize(&parse_presentation(text).unwrap(), DEFAULT_MAX_COSETS).unwrap()
    }

    #[test]
    fn abelian_groups_have_abelian_unit_groups() {
        for text in ["<a| a^2=1>", "<a| a^4=1>", "<a| a^8=1>", "<a,b| a^2=1, b^2=1, a*b=b*a>"] {
            let g = realize_text(text);
            assert_eq!(unit_group_class(&g, 2).unwrap(), 1, "{text}");
        }
    }

    #[test]
    fn dihedral_and_quaternion_units_have_class_two() {
        for text in ["<a,b| a^4=1, b^2=1, b^-1*a*b=a^-1>", "<a,b| a^4=1, b^2=a^2, b^-1*a*b=a^-1>"] {
            let g = realize_text(text);
            assert_eq!(unit_group_class(&g, 2).unwrap(), 2, "{text}");
        }
    }

    #[test]
    fn trivial_group_units() {
        let g = realize_text("<a| a^1=1>");
        assert_eq!(unit_group_class(&g, 2).unwrap(), 0);
    }

    #[test]
    fn order_budget_enforced() {
        let g = realize_text("<a| a^32=1>");
        assert_eq!(
            unit_group_class(&g, 2).unwrap_err(),
            AlgebraError::UnitBudget { exponent: 31 }
        );
    }

    #[test]
    fn non_2_group_rejected() {
        let g = realize_text("<a| a^3=1>");
        assert_eq!(
            unit_group_class(&g, 2).unwrap_err(),
            AlgebraError::NotAPGroup { order: 3, p: 2 }
        );
    }

    #[test]
    fn unit_inverses_are_two_sided() {
        let g = realize_text("<a,b| a^4=1, b^2=1, b^-1*a*b=a^-1>");
        let cx = UnitContext::new(&g);
        for m in 0..(1u32 << 8) {
            if (m.count_ones() & 1) == 0 {
                continue;
            }
            let inv = cx.inv(m);
            assert_eq!(cx.mul(m, inv), 1);
            assert_eq!(cx.mul(inv, m), 1);
        }
    }
}

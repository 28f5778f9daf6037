//! Concrete finite groups in their regular representation, realized from
//! presentations by coset enumeration, plus subgroup machinery.

use std::collections::HashSet;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::bitset::BitSet;
use crate::presentation::{GeneratorId, Presentation, Syllable, Word};
use crate::todd_coxeter::{enumerate_cosets, CosetTable, TcError};

pub const DEFAULT_MAX_COSETS: usize = 1 << 16;

/// Orders up to this get a full multiplication table; larger groups multiply
/// by composing regular permutations along the representative-word tree.
const TABLE_LIMIT: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error(transparent)]
    Enumeration(#[from] TcError),
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("group or section is not abelian")]
    NotAbelian,
    #[error("subgroups belong to different parent groups")]
    MismatchedParents,
    #[error("subgroup is not contained in the expected overgroup")]
    NotContained,
}

struct GroupData {
    order: usize,
    ngens: usize,
    gen_images: Vec<usize>,
    /// Regular permutations for all 2*ngens columns (generator, inverse).
    perms: Vec<Vec<u32>>,
    /// BFS tree over the columns: entry i-1 is (parent, column) with
    /// parent . column = i. Spells a representative word per element.
    tree: Vec<(u32, u16)>,
    table: Option<Vec<u16>>,
    inverse: Vec<u32>,
}

#[derive(Clone)]
pub struct FiniteGroup {
    d: Arc<GroupData>,
}

impl std::fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("order", &self.d.order)
            .field("ngens", &self.d.ngens)
            .finish()
    }
}

/// Realizes the finitely presented group as a concrete permutation group via
/// coset enumeration over the trivial subgroup.
pub fn realize(p: &Presentation, max_cosets: usize) -> Result<FiniteGroup, GroupError> {
    let relators: Vec<Vec<u16>> = p.relations().iter().map(|r| word_to_cols(&r.relator())).collect();
    let ct = enumerate_cosets(p.ngens(), &relators, max_cosets)?;
    let g = FiniteGroup::from_coset_table(&ct);
    for r in p.relations() {
        assert_eq!(
            g.eval_word(&r.lhs),
            g.eval_word(&r.rhs),
            "realized group violates a defining relation"
        );
    }
    Ok(g)
}

fn word_to_cols(w: &Word) -> Vec<u16> {
    let mut cols = Vec::new();
    for s in w.syllables() {
        let col = if s.exp > 0 { 2 * s.gen.index() } else { 2 * s.gen.index() + 1 } as u16;
        for _ in 0..s.exp.unsigned_abs() {
            cols.push(col);
        }
    }
    cols
}

impl FiniteGroup {
    fn from_coset_table(ct: &CosetTable) -> FiniteGroup {
        let n = ct.n_cosets;
        let ncols = ct.ncols();
        let mut perms = vec![vec![0u32; n]; ncols];
        for c in 0..n {
            for x in 0..ncols {
                perms[x][c] = ct.neighbor(c, x) as u32;
            }
        }
        let tree: Vec<(u32, u16)> = (1..n).map(|i| ct.tree_edge(i)).collect();
        let gen_images = (0..ct.ngens).map(|g| perms[2 * g][0] as usize).collect();
        Self::assemble(n, ct.ngens, gen_images, perms, tree)
    }

    /// Builds a group of the given order from generator images and a
    /// multiplication rule. The images must generate.
    pub fn from_mult_fn(
        order: usize,
        gen_images: Vec<usize>,
        mult: impl Fn(usize, usize) -> usize,
    ) -> FiniteGroup {
        let ngens = gen_images.len();
        let mut perms = Vec::with_capacity(2 * ngens);
        for &img in &gen_images {
            let fwd: Vec<u32> = (0..order).map(|i| mult(i, img) as u32).collect();
            let mut bwd = vec![0u32; order];
            for (i, &t) in fwd.iter().enumerate() {
                bwd[t as usize] = i as u32;
            }
            perms.push(fwd);
            perms.push(bwd);
        }
        // BFS over the columns fixes a representative-word tree. The caller's
        // element numbering is kept, so tree edges are indexed by element id
        // rather than by discovery order.
        let mut tree_elem: Vec<Option<(u32, u16)>> = vec![None; order];
        let mut queue = vec![0u32];
        let mut head = 0;
        while head < queue.len() {
            let c = queue[head];
            head += 1;
            for (x, perm) in perms.iter().enumerate() {
                let t = perm[c as usize] as usize;
                if t != 0 && tree_elem[t].is_none() {
                    tree_elem[t] = Some((c, x as u16));
                    queue.push(t as u32);
                }
            }
        }
        assert_eq!(queue.len(), order, "generator images do not generate the group");
        let tree = (1..order)
            .map(|i| tree_elem[i].expect("every non-identity element has a tree edge"))
            .collect();
        Self::assemble(order, ngens, gen_images, perms, tree)
    }

    fn assemble(
        order: usize,
        ngens: usize,
        gen_images: Vec<usize>,
        perms: Vec<Vec<u32>>,
        tree: Vec<(u32, u16)>,
    ) -> FiniteGroup {
        let table = if order <= TABLE_LIMIT {
            let mut t = vec![0u16; order * order];
            for i in 0..order {
                t[i * order] = i as u16;
            }
            // Column recurrence: w_j = w_parent(j) . col, so
            // mult(i, j) = perms[col][mult(i, parent)]. Element ids need not
            // follow tree depth, so fill parents before children explicitly.
            let mut children: Vec<Vec<usize>> = vec![Vec::new(); order];
            for j in 1..order {
                children[tree[j - 1].0 as usize].push(j);
            }
            let mut stack = vec![0usize];
            while let Some(p) = stack.pop() {
                for &j in &children[p] {
                    let c = tree[j - 1].1 as usize;
                    for i in 0..order {
                        t[i * order + j] = perms[c][t[i * order + p] as usize] as u16;
                    }
                    stack.push(j);
                }
            }
            Some(t)
        } else {
            None
        };

        // Inverse of element i: trace its representative word backwards.
        let mut inverse = vec![0u32; order];
        let mut path = Vec::new();
        for i in 1..order {
            path.clear();
            let mut c = i;
            while c != 0 {
                let (p, x) = tree[c - 1];
                path.push(x);
                c = p as usize;
            }
            let mut r = 0usize;
            for &x in &path {
                r = perms[x as usize ^ 1][r] as usize;
            }
            inverse[i] = r as u32;
        }

        let g = FiniteGroup {
            d: Arc::new(GroupData { order, ngens, gen_images, perms, tree, table, inverse }),
        };
        g.verify_construction();
        g
    }

    fn verify_construction(&self) {
        let n = self.d.order;
        for perm in &self.d.perms {
            debug_assert_eq!(perm.len(), n);
            let mut seen = vec![false; n];
            for &t in perm {
                assert!(!std::mem::replace(&mut seen[t as usize], true), "column not a permutation");
            }
        }
        for i in 0..n {
            assert_eq!(self.mult(0, i), i);
            assert_eq!(self.mult(i, 0), i);
            assert_eq!(self.mult(i, self.inverse(i)), 0);
            assert_eq!(self.mult(self.inverse(i), i), 0);
        }
        // Associativity: exhaustive for small orders, sampled above.
        if n <= 256 {
            for a in 0..n {
                for b in 0..n {
                    let ab = self.mult(a, b);
                    for c in 0..n {
                        assert_eq!(self.mult(ab, c), self.mult(a, self.mult(b, c)));
                    }
                }
            }
        } else {
            let mut state = 0x9e3779b97f4a7c15u64;
            let mut rng = move || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 33) as usize
            };
            for _ in 0..4096 {
                let (a, b, c) = (rng() % n, rng() % n, rng() % n);
                assert_eq!(self.mult(self.mult(a, b), c), self.mult(a, self.mult(b, c)));
            }
        }
    }

    pub fn order(&self) -> usize {
        self.d.order
    }

    pub fn ngens(&self) -> usize {
        self.d.ngens
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn gen_images(&self) -> &[usize] {
        &self.d.gen_images
    }

    pub fn has_table(&self) -> bool {
        self.d.table.is_some()
    }

    pub fn same_group(&self, other: &FiniteGroup) -> bool {
        Arc::ptr_eq(&self.d, &other.d)
    }

    #[inline]
    pub fn mult(&self, i: usize, j: usize) -> usize {
        if let Some(t) = &self.d.table {
            return t[i * self.d.order + j] as usize;
        }
        // Walk j's representative word from i.
        let mut path = Vec::new();
        let mut c = j;
        while c != 0 {
            let (p, x) = self.d.tree[c - 1];
            path.push(x);
            c = p as usize;
        }
        let mut r = i;
        for &x in path.iter().rev() {
            r = self.d.perms[x as usize][r] as usize;
        }
        r
    }

    #[inline]
    pub fn inverse(&self, i: usize) -> usize {
        self.d.inverse[i] as usize
    }

    pub fn conjugate(&self, x: usize, by: usize) -> usize {
        self.mult(self.mult(self.inverse(by), x), by)
    }

    pub fn commutator(&self, x: usize, y: usize) -> usize {
        // x^-1 y^-1 x y
        self.mult(self.mult(self.mult(self.inverse(x), self.inverse(y)), x), y)
    }

    pub fn pow(&self, x: usize, e: i64) -> usize {
        let (mut base, mut e) = if e < 0 { (self.inverse(x), -e) } else { (x, e) };
        let mut acc = 0usize;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mult(acc, base);
            }
            base = self.mult(base, base);
            e >>= 1;
        }
        acc
    }

    /// Image of an abstract word under generator -> realized image.
    pub fn eval_word(&self, w: &Word) -> usize {
        let mut acc = 0usize;
        for s in w.syllables() {
            let img = self.d.gen_images[s.gen.index()];
            acc = self.mult(acc, self.pow(img, s.exp));
        }
        acc
    }

    pub fn element_order(&self, x: usize) -> u64 {
        let mut y = x;
        let mut n = 1u64;
        while y != 0 {
            y = self.mult(y, x);
            n += 1;
        }
        n
    }

    /// Word in the generators spelling element x, read off the BFS tree.
    pub fn representative_word(&self, x: usize) -> Word {
        let mut cols = Vec::new();
        let mut cur = x;
        while cur != 0 {
            let (parent, col) = self.d.tree[cur - 1];
            cols.push(col);
            cur = parent as usize;
        }
        let syllables = cols
            .iter()
            .rev()
            .map(|&c| Syllable {
                gen: GeneratorId((c / 2) as usize),
                exp: if c % 2 == 0 { 1 } else { -1 },
            })
            .collect();
        Word::new(syllables)
    }

    pub fn exponent(&self) -> u64 {
        let mut l = 1u64;
        for x in 0..self.d.order {
            let o = self.element_order(x);
            l = lcm(l, o);
        }
        l
    }

    pub fn is_abelian(&self) -> bool {
        let gi = &self.d.gen_images;
        gi.iter().all(|&a| gi.iter().all(|&b| self.mult(a, b) == self.mult(b, a)))
    }

    pub fn is_cyclic_group(&self) -> bool {
        (0..self.d.order).any(|x| self.element_order(x) == self.d.order as u64)
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        let mut m = BitSet::new(self.d.order);
        m.insert(0);
        Subgroup::from_members_unchecked(self.clone(), m)
    }

    pub fn full_subgroup(&self) -> Subgroup {
        let mut m = BitSet::new(self.d.order);
        for i in 0..self.d.order {
            m.insert(i);
        }
        Subgroup::from_members_unchecked(self.clone(), m)
    }

    /// Subgroup generated by `seeds`: repeated multiplication to a fixpoint.
    pub fn subgroup_closure(&self, seeds: &[usize]) -> Subgroup {
        let mut members = BitSet::new(self.d.order);
        let mut list = vec![0usize];
        members.insert(0);
        for &s in seeds {
            if members.insert(s) {
                list.push(s);
            }
        }
        let mut i = 0;
        while i < list.len() {
            let mut j = 0;
            while j < list.len() {
                for prod in [self.mult(list[i], list[j]), self.mult(list[j], list[i])] {
                    if members.insert(prod) {
                        list.push(prod);
                    }
                }
                j += 1;
            }
            i += 1;
        }
        Subgroup::from_members_unchecked(self.clone(), members)
    }

    /// Smallest normal subgroup containing `seeds`.
    pub fn normal_closure(&self, seeds: &[usize]) -> Subgroup {
        let mut h = self.subgroup_closure(seeds);
        loop {
            let mut extra = Vec::new();
            for x in h.members().iter() {
                for &g in &self.d.gen_images {
                    let c = self.conjugate(x, g);
                    if !h.contains(c) {
                        extra.push(c);
                    }
                }
            }
            if extra.is_empty() {
                return h;
            }
            let mut seeds: Vec<usize> = h.members().iter().collect();
            seeds.extend(extra);
            h = self.subgroup_closure(&seeds);
        }
    }

    /// Elements commuting with everything. It suffices to test against the
    /// generator images; the brute-force oracle re-checks all pairs.
    pub fn center(&self) -> Subgroup {
        let mut m = BitSet::new(self.d.order);
        for z in 0..self.d.order {
            if self.d.gen_images.iter().all(|&g| self.mult(z, g) == self.mult(g, z)) {
                m.insert(z);
            }
        }
        Subgroup::from_members(self.clone(), m).expect("center is a subgroup")
    }

    /// Normal closure of all commutators [x, y] with x in `a`, y in `b`.
    pub fn commutator_subgroup(&self, a: &Subgroup, b: &Subgroup) -> Subgroup {
        assert!(a.parent().same_group(self) && b.parent().same_group(self));
        let mut seeds = BitSet::new(self.d.order);
        for x in a.members().iter() {
            for y in b.members().iter() {
                seeds.insert(self.commutator(x, y));
            }
        }
        self.normal_closure(&seeds.iter().collect::<Vec<_>>())
    }

    pub fn derived_subgroup(&self) -> Subgroup {
        let full = self.full_subgroup();
        self.commutator_subgroup(&full, &full)
    }

    /// Subgroup generated by k-th powers of the elements of `a`.
    pub fn power_subgroup(&self, a: &Subgroup, k: u64) -> Subgroup {
        assert!(a.parent().same_group(self));
        let seeds: Vec<usize> = a.members().iter().map(|x| self.pow(x, k as i64)).collect();
        self.subgroup_closure(&seeds)
    }

    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let n = self.d.order;
        let mut assigned = vec![false; n];
        let mut classes = Vec::new();
        for start in 0..n {
            if assigned[start] {
                continue;
            }
            let mut class = vec![start];
            assigned[start] = true;
            let mut head = 0;
            while head < class.len() {
                let x = class[head];
                head += 1;
                for &g in &self.d.gen_images {
                    let c = self.conjugate(x, g);
                    if !assigned[c] {
                        assigned[c] = true;
                        class.push(c);
                    }
                }
            }
            class.sort_unstable();
            classes.push(class);
        }
        classes
    }

    /// Quotient by a normal subgroup. Returns the quotient group and the
    /// projection as an index map (element -> coset index); the coset of the
    /// identity gets index 0.
    pub fn quotient(&self, n: &Subgroup) -> Result<(FiniteGroup, Vec<usize>), GroupError> {
        assert!(n.parent().same_group(self));
        if !n.is_normal() {
            return Err(GroupError::NotNormal);
        }
        let order = self.d.order;
        let mut proj = vec![usize::MAX; order];
        let mut reps = Vec::new();
        for x in 0..order {
            if proj[x] != usize::MAX {
                continue;
            }
            let id = reps.len();
            reps.push(x);
            for h in n.members().iter() {
                proj[self.mult(x, h)] = id;
            }
        }
        let q_order = reps.len();
        debug_assert_eq!(q_order * n.order(), order);
        let gen_images: Vec<usize> = self.d.gen_images.iter().map(|&g| proj[g]).collect();
        let q = FiniteGroup::from_mult_fn(q_order, gen_images, |a, b| {
            proj[self.mult(reps[a], reps[b])]
        });
        Ok((q, proj))
    }

    /// True iff some cyclic normal subgroup has a cyclic quotient.
    pub fn is_metacyclic(&self) -> bool {
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        for x in 0..self.d.order {
            let n = self.subgroup_closure(&[x]);
            if !seen.insert(n.members().iter().collect()) {
                continue;
            }
            if !n.is_normal() {
                continue;
            }
            let (q, _) = self.quotient(&n).expect("normality just checked");
            if q.is_cyclic_group() {
                return true;
            }
        }
        false
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

#[derive(Clone)]
pub struct Subgroup {
    parent: FiniteGroup,
    members: BitSet,
}

impl std::fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Subgroup").field("order", &self.members.len()).finish()
    }
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.parent.same_group(&other.parent) && self.members == other.members
    }
}
impl Eq for Subgroup {}

impl Subgroup {
    fn from_members_unchecked(parent: FiniteGroup, members: BitSet) -> Subgroup {
        let s = Subgroup { parent, members };
        s.assert_lagrange();
        s
    }

    /// Checks closure under multiplication before accepting the member set.
    pub fn from_members(parent: FiniteGroup, members: BitSet) -> Result<Subgroup, GroupError> {
        if !members.contains(0) {
            return Err(GroupError::NotContained);
        }
        let elems: Vec<usize> = members.iter().collect();
        for &a in &elems {
            for &b in &elems {
                if !members.contains(parent.mult(a, b)) {
                    return Err(GroupError::NotContained);
                }
            }
        }
        Ok(Subgroup::from_members_unchecked(parent, members))
    }

    fn assert_lagrange(&self) {
        assert_eq!(
            self.parent.order() % self.members.len(),
            0,
            "subgroup order must divide the group order"
        );
    }

    pub fn parent(&self) -> &FiniteGroup {
        &self.parent
    }

    pub fn members(&self) -> &BitSet {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.contains(x)
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    pub fn is_full(&self) -> bool {
        self.members.len() == self.parent.order()
    }

    pub fn is_normal(&self) -> bool {
        let g = &self.parent;
        self.members
            .iter()
            .all(|x| g.gen_images().iter().all(|&gi| self.members.contains(g.conjugate(x, gi))))
    }

    pub fn is_abelian(&self) -> bool {
        let g = &self.parent;
        let elems: Vec<usize> = self.members.iter().collect();
        elems.iter().all(|&a| elems.iter().all(|&b| g.mult(a, b) == g.mult(b, a)))
    }

    pub fn is_cyclic(&self) -> bool {
        let n = self.order() as u64;
        self.members.iter().any(|x| self.parent.element_order(x) == n)
    }

    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        assert!(self.parent.same_group(&other.parent));
        Subgroup::from_members_unchecked(
            self.parent.clone(),
            self.members.intersection(&other.members),
        )
    }

    /// The subgroup generated by both member sets.
    pub fn join(&self, other: &Subgroup) -> Subgroup {
        assert!(self.parent.same_group(&other.parent));
        let mut seeds: Vec<usize> = self.members.iter().collect();
        seeds.extend(other.members.iter());
        self.parent.subgroup_closure(&seeds)
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.parent.same_group(&other.parent) && self.members.is_subset(&other.members)
    }
}

/// Isomorphism type of a finite abelian group as elementary divisors,
/// prime powers in descending order. Empty for the trivial group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct AbelianInvariants(pub Vec<u64>);

impl std::fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.0.iter().map(|q| format!("C{q}")).collect();
        f.write_str(&parts.join(" x "))
    }
}

impl AbelianInvariants {
    pub fn group_order(&self) -> u64 {
        self.0.iter().product()
    }
}

fn prime_power_factors(mut t: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= t {
        if t.is_multiple_of(p) {
            let mut q = 1u64;
            while t.is_multiple_of(p) {
                q *= p;
                t /= p;
            }
            out.push(q);
        }
        p += 1;
    }
    if t > 1 {
        out.push(t);
    }
    out
}

/// Invariants of the abelian section h/k (k normal in h, h/k abelian).
///
/// Repeatedly extracts an element of maximal order in the current quotient;
/// in a finite abelian group such an element spans a direct summand, so the
/// extracted orders are exactly the invariant factors.
pub fn section_invariants(
    g: &FiniteGroup,
    h: &Subgroup,
    k: &Subgroup,
) -> Result<AbelianInvariants, GroupError> {
    assert!(h.parent().same_group(g) && k.parent().same_group(g));
    if !k.is_subgroup_of(h) {
        return Err(GroupError::NotContained);
    }
    for x in h.members().iter() {
        for y in h.members().iter() {
            if !k.contains(g.commutator(x, y)) {
                return Err(GroupError::NotAbelian);
            }
        }
    }
    let mut cur = k.members().clone();
    let mut factors: Vec<u64> = Vec::new();
    while cur.len() < h.order() {
        let mut best: Option<(u64, usize)> = None;
        for x in h.members().iter() {
            if cur.contains(x) {
                continue;
            }
            let mut y = x;
            let mut t = 1u64;
            while !cur.contains(y) {
                y = g.mult(y, x);
                t += 1;
            }
            if best.is_none_or(|(bt, _)| t > bt) {
                best = Some((t, x));
            }
        }
        let (t, x) = best.expect("strictly ascending chain");
        factors.push(t);
        // Absorb the cyclic factor: cur . <x>.
        let mut next = cur.clone();
        let mut y = x;
        while !cur.contains(y) {
            for c in cur.iter() {
                next.insert(g.mult(c, y));
            }
            y = g.mult(y, x);
        }
        cur = next;
    }
    let mut out: Vec<u64> = factors.into_iter().flat_map(prime_power_factors).collect();
    out.sort_unstable_by(|a, b| b.cmp(a));
    Ok(AbelianInvariants(out))
}

/// Invariants of an abelian subgroup.
pub fn abelian_invariants(h: &Subgroup) -> Result<AbelianInvariants, GroupError> {
    let g = h.parent().clone();
    let triv = g.trivial_subgroup();
    section_invariants(&g, h, &triv)
}

/// Invariants of an abelian group (e.g. a quotient).
pub fn abelian_invariants_of_group(g: &FiniteGroup) -> Result<AbelianInvariants, GroupError> {
    let full = g.full_subgroup();
    let triv = g.trivial_subgroup();
    section_invariants(g, &full, &triv)
}

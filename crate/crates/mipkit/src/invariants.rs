//! Group-theoretic invariants: central series, the Jennings series, and the
//! procedures that pin down the nilpotency class for special shapes of
//! 2-groups (exponent p, cyclic derived subgroup, central derived subgroup,
//! maximal class with an abelian subgroup of index p).

use serde::Serialize;
use thiserror::Error;

use crate::bitset::BitSet;
use crate::groups::{section_invariants, AbelianInvariants, FiniteGroup, GroupError, Subgroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error("group is not nilpotent: lower central series stalls")]
    NotNilpotent,
    #[error("group order {order} is not a power of {p}")]
    NotAPGroup { order: usize, p: u64 },
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Strictly descending chain G = gamma_1 > gamma_2 > ... > 1 with
/// gamma_{k+1} = [gamma_k, G].
pub fn lower_central_series(g: &FiniteGroup) -> Result<Vec<Subgroup>, InvariantError> {
    let full = g.full_subgroup();
    let mut terms = vec![full.clone()];
    loop {
        let last = terms.last().unwrap();
        if last.is_trivial() {
            return Ok(terms);
        }
        let next = g.commutator_subgroup(last, &full);
        if &next == last {
            return Err(InvariantError::NotNilpotent);
        }
        terms.push(next);
    }
}

pub fn nilpotency_class(g: &FiniteGroup) -> Result<u64, InvariantError> {
    Ok(lower_central_series(g)?.len() as u64 - 1)
}

pub fn is_p_group(g: &FiniteGroup, p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut n = g.order() as u64;
    while n.is_multiple_of(p) {
        n /= p;
    }
    n == 1
}

fn log_p(order: usize, p: u64) -> u64 {
    let mut n = order as u64;
    let mut k = 0;
    while n.is_multiple_of(p) {
        n /= p;
        k += 1;
    }
    debug_assert_eq!(n, 1);
    k
}

/// M_1 = G, M_n = [M_{n-1}, G] . (M_{ceil(n/p)})^p, down to the trivial
/// subgroup. For p-groups this is the series of dimension subgroups of the
/// modular group algebra; consecutive terms may coincide.
pub fn jennings_series(g: &FiniteGroup, p: u64) -> Result<Vec<Subgroup>, InvariantError> {
    if !is_p_group(g, p) {
        return Err(InvariantError::NotAPGroup { order: g.order(), p });
    }
    let full = g.full_subgroup();
    let mut terms = vec![full.clone()];
    while !terms.last().unwrap().is_trivial() {
        let n = terms.len() + 1;
        let commutators = g.commutator_subgroup(&terms[n - 2], &full);
        let idx = n.div_ceil(p as usize);
        let powers = g.power_subgroup(&terms[idx - 1], p);
        let next = commutators.join(&powers);
        assert!(
            next.is_subgroup_of(terms.last().unwrap()),
            "dimension subgroup series must descend"
        );
        // The series can stall for long stretches (cyclic 2-groups stay
        // constant between powers of two), but M_n = 1 once n reaches the
        // nilpotency index of the augmentation ideal, which is at most |G|.
        assert!(terms.len() <= g.order(), "dimension subgroup series failed to terminate");
        terms.push(next);
    }
    Ok(terms)
}

pub fn series_orders(terms: &[Subgroup]) -> Vec<u64> {
    terms.iter().map(|t| t.order() as u64).collect()
}

/// Invariants of the successive factors of a descending series with abelian
/// sections.
pub fn series_factor_invariants(
    g: &FiniteGroup,
    terms: &[Subgroup],
) -> Result<Vec<AbelianInvariants>, GroupError> {
    terms
        .windows(2)
        .map(|w| section_invariants(g, &w[0], &w[1]))
        .collect()
}

/// Frattini subgroup of a p-group: G^p . [G, G].
pub fn frattini_subgroup(g: &FiniteGroup, p: u64) -> Subgroup {
    let full = g.full_subgroup();
    let powers = g.power_subgroup(&full, p);
    powers.join(&g.derived_subgroup())
}

/// All index-p subgroups: preimages of the hyperplanes of G / Phi(G).
pub fn maximal_subgroups(g: &FiniteGroup, p: u64) -> Vec<Subgroup> {
    let phi = frattini_subgroup(g, p);
    let (q, proj) = g.quotient(&phi).expect("Frattini subgroup is normal");
    // q is elementary abelian; fix a basis by greedy closure.
    let mut basis: Vec<usize> = Vec::new();
    let mut span = q.trivial_subgroup();
    for x in 0..q.order() {
        if !span.contains(x) {
            basis.push(x);
            let mut seeds = basis.clone();
            seeds.extend(span.members().iter());
            span = q.subgroup_closure(&seeds);
        }
    }
    let r = basis.len();
    assert_eq!((p as usize).pow(r as u32), q.order());
    // Coordinates of every element of q in that basis.
    let mut coords = vec![vec![0u64; r]; q.order()];
    let mut elems = vec![0usize];
    let mut exps = vec![vec![0u64; r]];
    for (i, &b) in basis.iter().enumerate() {
        let mut next_elems = Vec::new();
        let mut next_exps = Vec::new();
        for (e, exp) in elems.iter().zip(&exps) {
            let mut cur = *e;
            for k in 0..p {
                let mut v = exp.clone();
                v[i] = k;
                next_elems.push(cur);
                next_exps.push(v);
                cur = q.mult(cur, b);
            }
        }
        elems = next_elems;
        exps = next_exps;
    }
    for (e, exp) in elems.iter().zip(&exps) {
        coords[*e] = exp.clone();
    }
    // Hyperplanes are kernels of nonzero functionals, one per projective
    // representative (first nonzero coefficient normalized to 1).
    let mut out = Vec::new();
    let mut phi_vec = vec![0u64; r];
    loop {
        // next functional in lexicographic order
        let mut i = r;
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            phi_vec[i] += 1;
            if phi_vec[i] < p {
                break;
            }
            phi_vec[i] = 0;
        }
        if phi_vec.iter().all(|&c| c == 0) {
            break;
        }
        if phi_vec.iter().find(|&&c| c != 0) != Some(&1) {
            continue;
        }
        let mut members = BitSet::new(g.order());
        for x in 0..g.order() {
            let v = &coords[proj[x]];
            let dot: u64 = v.iter().zip(&phi_vec).map(|(a, b)| a * b % p).sum::<u64>() % p;
            if dot == 0 {
                members.insert(x);
            }
        }
        out.push(Subgroup::from_members(g.clone(), members).expect("hyperplane preimage"));
    }
    for h in &out {
        assert_eq!(h.order() * p as usize, g.order());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassReason {
    ExpP,
    CyclicDerived,
    ClassTwoCriterion,
    MaxClassAbelian,
    Undetermined,
}

impl ClassReason {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassReason::ExpP => "exp_p",
            ClassReason::CyclicDerived => "cyclic_derived",
            ClassReason::ClassTwoCriterion => "class_two_criterion",
            ClassReason::MaxClassAbelian => "max_class_abelian",
            ClassReason::Undetermined => "undetermined",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassDetermination {
    pub value: Option<u64>,
    pub reason: ClassReason,
}

/// Peels central cyclic pieces off a group with cyclic derived subgroup.
///
/// Each round quotients by Z meet G', which for class >= 2 lowers the class
/// by exactly one (gamma_c is central and inside G', so it dies in the
/// quotient); the round count therefore recovers the class.
pub fn class_via_cyclic_derived(g: &FiniteGroup, p: u64) -> Result<u64, InvariantError> {
    let mut cur = g.clone();
    let mut steps = 0u64;
    loop {
        let d = cur.derived_subgroup();
        if d.is_trivial() {
            return Ok(steps + if cur.order() > 1 { 1 } else { 0 });
        }
        assert!(d.is_cyclic(), "procedure requires a cyclic derived subgroup");
        let dorder = d.order() as u64;
        let gen = d
            .members()
            .iter()
            .find(|&x| cur.element_order(x) == dorder)
            .expect("cyclic subgroup has a generator");
        let z = cur.center();
        // Walk gen -> gen^p -> ... until central; that power generates
        // exactly Z meet G' since subgroups of a cyclic p-group are nested.
        let mut w = gen;
        while !z.contains(w) {
            w = cur.pow(w, p as i64);
        }
        let n = cur.subgroup_closure(&[w]);
        assert_eq!(n, z.intersection(&d), "central part of the derived subgroup");
        let (q, _) = cur.quotient(&n)?;
        cur = q;
        steps += 1;
    }
}

fn has_abelian_maximal_subgroup(g: &FiniteGroup, p: u64) -> bool {
    maximal_subgroups(g, p).iter().any(|h| h.is_abelian())
}

/// Central derived subgroup test, G' = Z(G) meet G'. For a nonabelian group
/// this holds exactly when the nilpotency class is two.
pub fn is_class_two_criterion(g: &FiniteGroup) -> bool {
    g.derived_subgroup().is_subgroup_of(&g.center())
}

/// Applies the four class-determining conditions in fixed order and reports
/// which one fired. `value` is `None` exactly when none applies.
pub fn determine_class(g: &FiniteGroup, p: u64) -> Result<ClassDetermination, InvariantError> {
    if !is_p_group(g, p) {
        return Err(InvariantError::NotAPGroup { order: g.order(), p });
    }
    let true_class = nilpotency_class(g)?;
    if g.exponent() == p {
        return Ok(ClassDetermination { value: Some(true_class), reason: ClassReason::ExpP });
    }
    let d = g.derived_subgroup();
    if d.is_cyclic() {
        let c = class_via_cyclic_derived(g, p)?;
        assert_eq!(c, true_class, "cyclic-derived peeling must recover the class");
        return Ok(ClassDetermination { value: Some(c), reason: ClassReason::CyclicDerived });
    }
    let z = g.center();
    if !d.is_trivial() && z.intersection(&d) == d {
        assert_eq!(true_class, 2, "central derived subgroup means class two");
        return Ok(ClassDetermination {
            value: Some(2),
            reason: ClassReason::ClassTwoCriterion,
        });
    }
    let n = log_p(g.order(), p);
    if n >= 3 && true_class == n - 1 && has_abelian_maximal_subgroup(g, p) {
        return Ok(ClassDetermination {
            value: Some(true_class),
            reason: ClassReason::MaxClassAbelian,
        });
    }
    Ok(ClassDetermination { value: None, reason: ClassReason::Undetermined })
}
